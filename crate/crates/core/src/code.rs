//! Tanner graphs with arbitrary binary linear local codes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Longest local code supported. Codewords are stored as bit masks.
pub const MAX_LOCAL_LENGTH: usize = 16;

/// Default cap on block length for exhaustive codeword enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// A binary linear `[n, k, d]` code given by its full list of codewords.
///
/// Bit `k` of a stored word is the symbol on edge label `k` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCode {
    len: usize,
    words: Vec<u32>,
    dimension: usize,
    min_distance: usize,
}

impl LocalCode {
    pub fn from_words(len: usize, mut words: Vec<u32>) -> Result<Self> {
        if len == 0 || len > MAX_LOCAL_LENGTH {
            return Err(Error::invalid(format!(
                "local code length {len} outside 1..={MAX_LOCAL_LENGTH}"
            )));
        }
        words.sort_unstable();
        if words.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate codeword in local code"));
        }
        if let Some(&w) = words.iter().find(|&&w| w >> len != 0) {
            return Err(Error::invalid(format!(
                "codeword {w:#b} longer than {len} bits"
            )));
        }
        if words.first() != Some(&0) {
            return Err(Error::invalid("local code must contain the all-zero word"));
        }
        if !words.len().is_power_of_two() {
            return Err(Error::invalid(format!(
                "local code has {} codewords, not a power of two",
                words.len()
            )));
        }
        for (a_idx, &a) in words.iter().enumerate() {
            for &b in &words[a_idx + 1..] {
                if words.binary_search(&(a ^ b)).is_err() {
                    return Err(Error::invalid("local code is not closed under XOR"));
                }
            }
        }
        let min_distance = words
            .iter()
            .skip(1)
            .map(|w| w.count_ones() as usize)
            .min()
            .ok_or_else(|| Error::invalid("local code has no nonzero codeword"))?;
        let dimension = words.len().trailing_zeros() as usize;
        Ok(LocalCode {
            len,
            words,
            dimension,
            min_distance,
        })
    }

    /// Parses codewords written as bitstrings, leftmost character = label 1.
    pub fn from_bitstrings<S: AsRef<str>>(strings: &[S]) -> Result<Self> {
        let first = strings
            .first()
            .ok_or_else(|| Error::invalid("local code with no codewords"))?;
        let len = first.as_ref().trim().len();
        let words = strings
            .iter()
            .map(|s| {
                let s = s.as_ref().trim();
                if s.len() != len {
                    return Err(Error::parse(format!(
                        "codeword {s:?} has length {} but expected {len}",
                        s.len()
                    )));
                }
                bits_to_word(s)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_words(len, words)
    }

    /// Single parity check code of length `n`.
    pub fn parity(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("parity code needs length >= 2"));
        }
        let words = (0u32..1 << n).filter(|w| w.count_ones() % 2 == 0).collect();
        Self::from_words(n, words)
    }

    pub fn repetition(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("repetition code needs length >= 2"));
        }
        Self::from_words(n, vec![0, (1 << n) - 1])
    }

    /// The `[7,4,3]` Hamming code.
    pub fn hamming7() -> Self {
        let generators = [0b0001011u32, 0b0010110, 0b0101100, 0b1011000];
        Self::span(7, &generators).expect("hamming generators are valid")
    }

    /// The `[8,4,4]` extended Hamming code.
    pub fn extended_hamming8() -> Self {
        let base = Self::hamming7();
        let words = base
            .words
            .iter()
            .map(|&w| w | ((w.count_ones() & 1) << 7))
            .collect();
        Self::from_words(8, words).expect("extended hamming is linear")
    }

    /// Linear span of the given generator words.
    pub fn span(len: usize, generators: &[u32]) -> Result<Self> {
        let mut words = vec![0u32];
        for &g in generators {
            if words.contains(&g) {
                continue;
            }
            let extra: Vec<u32> = words.iter().map(|w| w ^ g).collect();
            words.extend(extra);
        }
        Self::from_words(len, words)
    }

    /// Builds a named local code: `parityN`, `repN`, `hamming7`, `exthamming8`.
    pub fn from_kind(kind: &str) -> Result<Self> {
        let kind = kind.trim();
        if let Some(n) = kind.strip_prefix("parity") {
            return Self::parity(parse_len(n, kind)?);
        }
        if let Some(n) = kind.strip_prefix("rep") {
            return Self::repetition(parse_len(n, kind)?);
        }
        match kind {
            "hamming7" => Ok(Self::hamming7()),
            "exthamming8" => Ok(Self::extended_hamming8()),
            _ => Err(Error::parse(format!("unknown local code kind {kind:?}"))),
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    pub fn contains(&self, word: u32) -> bool {
        self.words.binary_search(&word).is_ok()
    }

    pub fn is_parity(&self) -> bool {
        self.len >= 2
            && self.words.len() == 1 << (self.len - 1)
            && self.words.iter().all(|w| w.count_ones() % 2 == 0)
    }

    /// Whether some codeword agrees with `value` on the positions in `mask`.
    pub fn matches_partial(&self, mask: u32, value: u32) -> bool {
        self.words.iter().any(|w| w & mask == value)
    }

    pub fn word_bitstring(&self, word: u32) -> String {
        (0..self.len)
            .map(|k| if word >> k & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

fn parse_len(digits: &str, kind: &str) -> Result<usize> {
    digits
        .parse()
        .map_err(|_| Error::parse(format!("bad length in local code kind {kind:?}")))
}

fn bits_to_word(s: &str) -> Result<u32> {
    let mut word = 0u32;
    for (k, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => word |= 1 << k,
            _ => return Err(Error::parse(format!("invalid bit {ch:?} in {s:?}"))),
        }
    }
    Ok(word)
}

/// A node of a Tanner graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node {
    Var(usize),
    Check(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Var(v) => write!(f, "v{v}"),
            Node::Check(c) => write!(f, "c{c}"),
        }
    }
}

/// Edge-labeled bipartite graph between variable and local-code nodes.
///
/// Variables of degree zero are allowed here (induced subgraphs keep the
/// original index space); [`TannerCode`] rejects them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    num_vars: usize,
    checks: Vec<Vec<usize>>,
    var_checks: Vec<Vec<(usize, usize)>>,
    edge_offsets: Vec<usize>,
}

impl TannerGraph {
    pub fn new(num_vars: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        let mut var_checks = vec![Vec::new(); num_vars];
        for (c, neighbors) in checks.iter().enumerate() {
            for (label, &v) in neighbors.iter().enumerate() {
                if v >= num_vars {
                    return Err(Error::invalid(format!(
                        "check {c} references variable {v} but N = {num_vars}"
                    )));
                }
                if neighbors[..label].contains(&v) {
                    return Err(Error::invalid(format!(
                        "check {c} lists variable {v} more than once"
                    )));
                }
                var_checks[v].push((c, label));
            }
        }
        let mut edge_offsets = Vec::with_capacity(checks.len() + 1);
        let mut total = 0;
        for neighbors in &checks {
            edge_offsets.push(total);
            total += neighbors.len();
        }
        edge_offsets.push(total);
        Ok(TannerGraph {
            num_vars,
            checks,
            var_checks,
            edge_offsets,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn num_edges(&self) -> usize {
        *self.edge_offsets.last().unwrap_or(&0)
    }

    /// Ordered neighbors `V_j` of check `c`.
    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.checks[c]
    }

    /// `(check, edge label)` pairs incident to variable `v`.
    pub fn var_neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.var_checks[v]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_checks[v].len()
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.checks[c].len()
    }

    pub fn degree(&self, node: Node) -> usize {
        match node {
            Node::Var(v) => self.var_degree(v),
            Node::Check(c) => self.check_degree(c),
        }
    }

    pub fn contains(&self, node: Node) -> bool {
        match node {
            Node::Var(v) => v < self.num_vars,
            Node::Check(c) => c < self.checks.len(),
        }
    }

    /// Neighbors of any node, in label order for checks.
    pub fn neighbors(&self, node: Node) -> Vec<Node> {
        match node {
            Node::Var(v) => self.var_checks[v]
                .iter()
                .map(|&(c, _)| Node::Check(c))
                .collect(),
            Node::Check(c) => self.checks[c].iter().map(|&v| Node::Var(v)).collect(),
        }
    }

    /// Index of the edge `(check c, label k)` in `0..num_edges()`.
    pub fn edge_index(&self, c: usize, label: usize) -> usize {
        self.edge_offsets[c] + label
    }

    pub fn active_variables(&self) -> Vec<usize> {
        (0..self.num_vars)
            .filter(|&v| self.var_degree(v) > 0)
            .collect()
    }

    pub fn active_checks(&self) -> Vec<usize> {
        (0..self.checks.len())
            .filter(|&c| self.check_degree(c) > 0)
            .collect()
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }
}

/// Binary word assigned to the variable nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("assignment components must be 0 or 1"));
        }
        Ok(Assignment(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Assignment(vec![1; n])
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::parse(format!("invalid bit {ch:?} in assignment"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Assignment)
    }

    pub(crate) fn from_mask(mask: u64, n: usize) -> Self {
        Assignment((0..n).map(|v| (mask >> v & 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, v: usize) -> u8 {
        self.0[v]
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&v| self.0[v] == 1).collect()
    }

    pub fn xor(&self, other: &Assignment) -> Result<Assignment> {
        if self.len() != other.len() {
            return Err(Error::invalid("assignment length mismatch"));
        }
        Ok(Assignment(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        self.0
            .iter()
            .map(|&b| if b == 1 { T::one() } else { T::zero() })
            .collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A Tanner code `C(G, C_J)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerCode {
    graph: TannerGraph,
    local_codes: Vec<LocalCode>,
    d_star: usize,
}

impl TannerCode {
    pub fn new(graph: TannerGraph, local_codes: Vec<LocalCode>) -> Result<Self> {
        if graph.num_vars() == 0 {
            return Err(Error::invalid("code needs at least one variable"));
        }
        if local_codes.len() != graph.num_checks() {
            return Err(Error::invalid(format!(
                "{} local codes for {} local-code nodes",
                local_codes.len(),
                graph.num_checks()
            )));
        }
        for (c, code) in local_codes.iter().enumerate() {
            if code.len() != graph.check_degree(c) {
                return Err(Error::invalid(format!(
                    "local-code node {c} has degree {} but its code has length {}",
                    graph.check_degree(c),
                    code.len()
                )));
            }
        }
        if let Some(v) = (0..graph.num_vars()).find(|&v| graph.var_degree(v) == 0) {
            return Err(Error::invalid(format!("variable {v} has degree 0")));
        }
        let d_star = local_codes
            .iter()
            .map(LocalCode::min_distance)
            .min()
            .unwrap_or(0);
        Ok(TannerCode {
            graph,
            local_codes,
            d_star,
        })
    }

    /// Tanner code in which every local code is a single parity check.
    pub fn with_parity_checks(num_vars: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        let local_codes = checks
            .iter()
            .map(|n| LocalCode::parity(n.len()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(TannerGraph::new(num_vars, checks)?, local_codes)
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    pub fn local_code(&self, c: usize) -> &LocalCode {
        &self.local_codes[c]
    }

    pub fn local_codes(&self) -> &[LocalCode] {
        &self.local_codes
    }

    pub fn num_vars(&self) -> usize {
        self.graph.num_vars()
    }

    pub fn num_checks(&self) -> usize {
        self.graph.num_checks()
    }

    /// Smallest local minimum distance.
    pub fn d_star(&self) -> usize {
        self.d_star
    }

    /// Projection `x_{V_j}` packed as a local word.
    pub fn local_view(&self, x: &Assignment, c: usize) -> u32 {
        self.graph
            .check_neighbors(c)
            .iter()
            .enumerate()
            .fold(0u32, |acc, (k, &v)| acc | (u32::from(x.get(v)) << k))
    }

    pub fn satisfies(&self, x: &Assignment, c: usize) -> bool {
        self.local_codes[c].contains(self.local_view(x, c))
    }

    pub fn is_codeword(&self, x: &Assignment) -> Result<bool> {
        self.check_len(x)?;
        Ok((0..self.num_checks()).all(|c| self.satisfies(x, c)))
    }

    pub(crate) fn check_len(&self, x: &Assignment) -> Result<()> {
        if x.len() != self.num_vars() {
            return Err(Error::invalid(format!(
                "assignment has length {} but N = {}",
                x.len(),
                self.num_vars()
            )));
        }
        Ok(())
    }

    /// `G_x`: the subgraph induced by the support of `x` and its local-code
    /// neighbors, on the original index space.
    pub fn induced_support_graph(&self, x: &Assignment) -> Result<TannerGraph> {
        self.check_len(x)?;
        let checks = self
            .graph
            .checks()
            .iter()
            .map(|neighbors| {
                neighbors
                    .iter()
                    .copied()
                    .filter(|&v| x.get(v) == 1)
                    .collect()
            })
            .collect();
        TannerGraph::new(self.num_vars(), checks)
    }

    /// All codewords in lexicographic order. The code is linear, so it is
    /// enumerated as the span of a null-space basis of the parity rows
    /// contributed by the duals of the local codes.
    pub fn codewords(&self, cap: usize) -> Result<Vec<Assignment>> {
        let n = self.num_vars();
        if n > cap || n > 63 {
            return Err(Error::budget(format!(
                "exhaustive enumeration refused: N = {n} exceeds cap {}",
                cap.min(63)
            )));
        }
        let mut rows = Vec::new();
        for (c, local) in self.local_codes.iter().enumerate() {
            let words: Vec<u64> = local.words().iter().map(|&w| u64::from(w)).collect();
            for dual in gf2_nullspace(&words, local.len()) {
                let row = self
                    .graph
                    .check_neighbors(c)
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| dual >> k & 1 == 1)
                    .fold(0u64, |acc, (_, &v)| acc | 1 << v);
                rows.push(row);
            }
        }
        let basis = gf2_nullspace(&rows, n);
        if basis.len() > MAX_ENUMERATED_DIMENSION {
            return Err(Error::budget(format!(
                "exhaustive enumeration refused: dimension {} exceeds {MAX_ENUMERATED_DIMENSION}",
                basis.len()
            )));
        }
        let mut out = Vec::with_capacity(1 << basis.len());
        let mut word = 0u64;
        out.push(Assignment::from_mask(word, n));
        for step in 1u64..1 << basis.len() {
            word ^= basis[step.trailing_zeros() as usize];
            out.push(Assignment::from_mask(word, n));
        }
        out.sort();
        Ok(out)
    }
}

/// Largest code dimension `codewords` will enumerate.
const MAX_ENUMERATED_DIMENSION: usize = 26;

/// Basis of `{x : ⟨r, x⟩ = 0 over GF(2) for every r in rows}` for vectors of
/// `ncols` bits.
fn gf2_nullspace(rows: &[u64], ncols: usize) -> Vec<u64> {
    let mut reduced: Vec<u64> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &row in rows {
        let mut r = row;
        for (&p, &b) in pivots.iter().zip(&reduced) {
            if r >> p & 1 == 1 {
                r ^= b;
            }
        }
        if r == 0 {
            continue;
        }
        let p = r.trailing_zeros() as usize;
        for b in reduced.iter_mut() {
            if *b >> p & 1 == 1 {
                *b ^= r;
            }
        }
        reduced.push(r);
        pivots.push(p);
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = 1u64 << free;
            for (&p, &b) in pivots.iter().zip(&reduced) {
                if b >> free & 1 == 1 {
                    x |= 1 << p;
                }
            }
            x
        })
        .collect()
}

/// Relative point `x ⊕ f`, componentwise `|x_i - f_i|`.
pub fn relative_point<T: Scalar>(x: &Assignment, f: &[T]) -> Result<Vec<T>> {
    if x.len() != f.len() {
        return Err(Error::invalid("relative point: length mismatch"));
    }
    x.bits()
        .iter()
        .zip(f)
        .map(|(&b, fi)| {
            if fi.is_negative_strict() || (fi.clone() - T::one()).is_positive_strict() {
                return Err(Error::invalid(format!("component {fi} outside [0,1]")));
            }
            Ok(if b == 1 {
                T::one() - fi.clone()
            } else {
                fi.clone()
            })
        })
        .collect()
}

/// `⟨a, b⟩` for scalar vectors of equal length.
pub fn inner<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}
