//! Finite M-covers of Tanner codes.
//!
//! Copy `m` of variable `v` has index `v·M + m`, copy `m` of local-code node
//! `c` has index `c·M + m`. Every base edge carries a permutation `π_e` of
//! `0..M`, and copy `m` of `c` is joined to copy `π_e(m)` of the variable
//! on edge `e`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::certifier::{certify_with, CertifyOptions};
use crate::channel::LlrVector;
use crate::code::{Assignment, TannerCode, TannerGraph};
use crate::error::{Error, Result};
use crate::omega::{check_box, is_zero_vector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverKind {
    /// Independent uniform permutations.
    #[default]
    Random,
    /// Cyclic shifts by uniform offsets.
    Cyclic,
}

impl FromStr for CoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(CoverKind::Random),
            "cyclic" => Ok(CoverKind::Cyclic),
            other => Err(Error::parse(format!("unknown cover kind {other:?}"))),
        }
    }
}

impl fmt::Display for CoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverKind::Random => "random",
            CoverKind::Cyclic => "cyclic",
        })
    }
}

#[derive(Debug, Clone)]
pub struct MCover {
    m: usize,
    /// `permutations[e][k]` for base edge `e`.
    permutations: Vec<Vec<usize>>,
    code: TannerCode,
}

impl MCover {
    /// Builds the cover from explicit edge permutations.
    pub fn from_permutations(
        base: &TannerCode,
        m: usize,
        permutations: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("cover degree must be at least 1"));
        }
        let graph = base.graph();
        if permutations.len() != graph.num_edges() {
            return Err(Error::invalid("one permutation per edge required"));
        }
        for p in &permutations {
            let mut seen = vec![false; m];
            if p.len() != m
                || p.iter()
                    .any(|&k| k >= m || std::mem::replace(&mut seen[k], true))
            {
                return Err(Error::invalid(format!(
                    "{p:?} is not a permutation of 0..{m}"
                )));
            }
        }
        let mut checks = Vec::with_capacity(graph.num_checks() * m);
        let mut local_codes = Vec::with_capacity(graph.num_checks() * m);
        for c in 0..graph.num_checks() {
            for copy in 0..m {
                let neighbors = graph
                    .check_neighbors(c)
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| {
                        let pi: &[usize] = &permutations[graph.edge_index(c, k)];
                        v * m + pi[copy]
                    })
                    .collect();
                checks.push(neighbors);
                local_codes.push(base.local_code(c).clone());
            }
        }
        let code = TannerCode::new(TannerGraph::new(graph.num_vars() * m, checks)?, local_codes)?;
        Ok(MCover {
            m,
            permutations,
            code,
        })
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn code(&self) -> &TannerCode {
        &self.code
    }

    pub fn permutation(&self, edge: usize) -> &[usize] {
        &self.permutations[edge]
    }

    /// Base variable of a cover variable.
    pub fn base_var(&self, cover_var: usize) -> usize {
        cover_var / self.m
    }
}

pub fn random_cover(code: &TannerCode, m: usize, seed: u64) -> Result<MCover> {
    cover_of_kind(code, m, CoverKind::Random, seed)
}

pub fn cover_of_kind(code: &TannerCode, m: usize, kind: CoverKind, seed: u64) -> Result<MCover> {
    if m == 0 {
        return Err(Error::invalid("cover degree must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let permutations = (0..code.graph().num_edges())
        .map(|_| match kind {
            CoverKind::Random => {
                let mut p: Vec<usize> = (0..m).collect();
                p.shuffle(&mut rng);
                p
            }
            CoverKind::Cyclic => {
                let shift = rng.random_range(0..m);
                (0..m).map(|k| (k + shift) % m).collect()
            }
        })
        .collect();
    MCover::from_permutations(code, m, permutations)
}

/// Replicates every entry `m` times.
pub fn lift<T: Clone>(values: &[T], m: usize) -> Vec<T> {
    values
        .iter()
        .flat_map(|v| std::iter::repeat_n(v.clone(), m))
        .collect()
}

pub fn lift_assignment(x: &Assignment, m: usize) -> Assignment {
    Assignment::new(lift(x.bits(), m)).expect("lifted bits are binary")
}

/// Averages the `m` copies of each entry.
pub fn project_down<T: Scalar>(values: &[T], m: usize) -> Result<Vec<T>> {
    if m == 0 || !values.len().is_multiple_of(m) {
        return Err(Error::invalid(format!(
            "length {} is not a multiple of {m}",
            values.len()
        )));
    }
    let scale = T::from_ratio(1, m as i64);
    Ok(values
        .chunks(m)
        .map(|copies| copies.iter().fold(T::zero(), |a, b| a + b.clone()) * scale.clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport<T> {
    pub m: usize,
    pub seed: u64,
    pub base_certified: bool,
    pub cover_certified: bool,
    pub base_min_cost: T,
    pub cover_min_cost: T,
    /// Base certifies while the lifted pair does not.
    pub violation: bool,
}

impl<T: Scalar> CoverReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "M": self.m,
            "seed": self.seed,
            "base_certified": self.base_certified,
            "cover_certified": self.cover_certified,
            "base_min_cost": self.base_min_cost.to_exact_string(),
            "cover_min_cost": self.cover_min_cost.to_exact_string(),
            "violation": self.violation,
        })
    }
}

/// Certifies `(x, λ, ω)` on the base code and `(x↑M, λ↑M, M·ω)` on a random
/// M-cover.
#[allow(clippy::too_many_arguments)]
pub fn check_cover_optimality<T: Scalar>(
    code: &TannerCode,
    x: &Assignment,
    llr: &LlrVector<T>,
    h: usize,
    omega: &[T],
    i: usize,
    m: usize,
    seed: u64,
) -> Result<CoverReport<T>> {
    check_cover_optimality_with(
        code,
        x,
        llr,
        h,
        omega,
        i,
        &random_cover(code, m, seed)?,
        seed,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn check_cover_optimality_with<T: Scalar>(
    code: &TannerCode,
    x: &Assignment,
    llr: &LlrVector<T>,
    h: usize,
    omega: &[T],
    i: usize,
    cover: &MCover,
    seed: u64,
) -> Result<CoverReport<T>> {
    let m = cover.degree();
    check_box(omega, &T::from_ratio(1, m as i64))?;
    if is_zero_vector(omega) {
        return Err(Error::invalid("ω must be nonzero"));
    }
    let options = CertifyOptions {
        witness: false,
        ..CertifyOptions::default()
    };
    let base = certify_with(code, x, llr, h, omega, i, options)?;
    let lifted_llr = LlrVector::from_values(lift(llr.values(), m))?;
    let lifted_x = lift_assignment(x, m);
    let scaled: Vec<T> = omega.iter().map(|w| w.clone() * T::from_usize(m)).collect();
    let lifted = certify_with(cover.code(), &lifted_x, &lifted_llr, h, &scaled, i, options)?;
    Ok(CoverReport {
        m,
        seed,
        base_certified: base.certified,
        cover_certified: lifted.certified,
        violation: base.certified && !lifted.certified,
        base_min_cost: base.min_cost,
        cover_min_cost: lifted.min_cost,
    })
}
