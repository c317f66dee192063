//! `(h, ω, i)`-local optimality certificates.
//!
//! The minimum relative cost of an ω-weighted i-tree rooted at a variable is
//! computed leaves-to-root. A message `m_l(c → u)` is the cost of the best
//! subtree hanging below a copy of `u` at depth `2l` entered from check `c`,
//! divided by the product of path factors above that copy. Because weights
//! only depend on the path to a node, the choice at a local-code node
//! decomposes: it keeps the `i - 1` cheapest child messages. Messages depend
//! on the depth but not on the root, so one pass over all edges per level
//! serves every root, for `O(|E| · h)` work in total.

use serde_json::{json, Value};

use crate::channel::LlrVector;
use crate::code::{Assignment, Node, TannerCode};
use crate::error::{Error, Result};
use crate::omega::check_box;
use crate::scalar::Scalar;
use crate::tree::{attach_weights, PathPrefixTree, DEFAULT_NODE_BUDGET};

/// `μ_v = (-1)^{x_v} λ_v`, so that `⟨λ, x⊕β⟩ - ⟨λ, x⟩ = ⟨μ, β⟩` for
/// `β ∈ [0,1]^N`.
pub fn relative_costs<T: Scalar>(x: &Assignment, llr: &LlrVector<T>) -> Result<Vec<T>> {
    llr.check_len(x.len())?;
    Ok(x.bits()
        .iter()
        .zip(llr.values())
        .map(|(&b, l)| if b == 1 { -l.clone() } else { l.clone() })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub root: usize,
    /// Projection of the minimizing weighted i-tree.
    pub beta: Vec<T>,
    pub cost: T,
    pub node_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport<T> {
    /// Minimum relative cost for each variable root.
    pub root_costs: Vec<T>,
    pub min_cost: T,
    pub worst_root: usize,
    /// `min_cost > 0`.
    pub certified: bool,
    /// `min_cost == 0`; such codewords are not certified.
    pub boundary: bool,
    pub h: usize,
    pub omega: Vec<T>,
    pub i: usize,
    pub witness: Option<Witness<T>>,
}

impl<T: Scalar> CertificateReport<T> {
    pub fn to_json(&self) -> Value {
        let strings = |v: &[T]| v.iter().map(Scalar::to_exact_string).collect::<Vec<_>>();
        json!({
            "certified": self.certified,
            "boundary": self.boundary,
            "min_cost": self.min_cost.to_exact_string(),
            "worst_root": self.worst_root,
            "root_costs": strings(&self.root_costs),
            "h": self.h,
            "omega": strings(&self.omega),
            "i": self.i,
            "witness": self.witness.as_ref().map(|w| json!({
                "root": w.root,
                "cost": w.cost.to_exact_string(),
                "beta": strings(&w.beta),
                "node_count": w.node_count,
            })),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Reconstruct the minimizing tree of the worst root.
    pub witness: bool,
    /// Node budget for witness materialization; skipped when exceeded.
    pub witness_budget: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            witness: true,
            witness_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Height-indexed edge messages for one `(x, λ, h, ω, i)`.
struct Messages<'a, T> {
    code: &'a TannerCode,
    i: usize,
    /// `levels[l - 1][e]` is `m_l` on edge `e`.
    levels: Vec<Vec<T>>,
    inv_i_minus_1: T,
}

impl<'a, T: Scalar> Messages<'a, T> {
    fn compute(code: &'a TannerCode, mu: &[T], omega: &[T], i: usize) -> Self {
        let graph = code.graph();
        let h = omega.len();
        let inv_i_minus_1 = T::one() / T::from_usize(i - 1);
        // Edge-ordered copies of the per-variable data.
        let mut edge_var = Vec::with_capacity(graph.num_edges());
        let mut own = Vec::with_capacity(graph.num_edges());
        let mut spread = Vec::with_capacity(graph.num_edges());
        for c in 0..graph.num_checks() {
            for &v in graph.check_neighbors(c) {
                let d = graph.var_degree(v);
                edge_var.push(v);
                own.push(mu[v].clone() / T::from_usize(d));
                spread.push(if d >= 2 {
                    inv_i_minus_1.clone() / T::from_usize(d - 1)
                } else {
                    T::zero()
                });
            }
        }
        let mut var_start = Vec::with_capacity(graph.num_vars() + 1);
        let mut var_edges = Vec::with_capacity(graph.num_edges());
        var_start.push(0);
        for v in 0..graph.num_vars() {
            var_edges.extend(
                graph
                    .var_neighbors(v)
                    .iter()
                    .map(|&(c, k)| graph.edge_index(c, k)),
            );
            var_start.push(var_edges.len());
        }

        let mut levels: Vec<Vec<T>> = vec![Vec::new(); h];
        let mut current: Vec<T> = own
            .iter()
            .map(|o| omega[h - 1].clone() * o.clone())
            .collect();
        for level in (1..h).rev() {
            let below = excluded_sums(code, &current, i);
            // Σ over all incident checks; the entering check is subtracted per edge.
            let totals: Vec<T> = var_start
                .windows(2)
                .map(|w| {
                    var_edges[w[0]..w[1]]
                        .iter()
                        .fold(T::zero(), |acc, &e| acc + below[e].clone())
                })
                .collect();
            let w = &omega[level - 1];
            let next: Vec<T> = (0..graph.num_edges())
                .map(|e| {
                    let base = w.clone() * own[e].clone();
                    if spread[e].is_zero() {
                        base
                    } else {
                        base + spread[e].clone() * (totals[edge_var[e]].clone() - below[e].clone())
                    }
                })
                .collect();
            levels[level] = std::mem::replace(&mut current, next);
        }
        levels[0] = current;
        Messages {
            code,
            i,
            levels,
            inv_i_minus_1,
        }
    }

    fn root_costs(&self) -> Vec<T> {
        let graph = self.code.graph();
        let first = excluded_sums(self.code, &self.levels[0], self.i);
        (0..graph.num_vars())
            .map(|r| {
                let sum = graph
                    .var_neighbors(r)
                    .iter()
                    .fold(T::zero(), |acc, &(c, k)| {
                        acc + first[graph.edge_index(c, k)].clone()
                    });
                sum * self.inv_i_minus_1.clone()
            })
            .collect()
    }

    fn message(&self, level: usize, c: usize, label: usize) -> &T {
        &self.levels[level - 1][self.code.graph().edge_index(c, label)]
    }
}

/// For every edge `e = (c, k)`, the sum of the `i - 1` smallest messages on
/// the other edges of `c`.
fn excluded_sums<T: Scalar>(code: &TannerCode, messages: &[T], i: usize) -> Vec<T> {
    let graph = code.graph();
    let keep = i - 1;
    let mut out = vec![T::zero(); messages.len()];
    let mut order: Vec<usize> = Vec::new();
    for c in 0..graph.num_checks() {
        let start = graph.edge_index(c, 0);
        let local = &messages[start..start + graph.check_degree(c)];
        order.clear();
        order.extend(0..local.len());
        order.sort_by(|&a, &b| local[a].cmp_total(&local[b]));
        let keep_sum = order[..keep]
            .iter()
            .fold(T::zero(), |acc, &k| acc + local[k].clone());
        let with_extra = keep_sum.clone() + local[order[keep]].clone();
        for (pos, &k) in order.iter().enumerate() {
            out[start + k] = if pos < keep {
                with_extra.clone() - local[k].clone()
            } else {
                keep_sum.clone()
            };
        }
    }
    out
}

fn validate<T: Scalar>(
    code: &TannerCode,
    x: &Assignment,
    llr: &LlrVector<T>,
    h: usize,
    omega: &[T],
    i: usize,
) -> Result<()> {
    code.check_len(x)?;
    llr.check_len(code.num_vars())?;
    if h == 0 {
        return Err(Error::invalid("height parameter h must be positive"));
    }
    if omega.len() != h {
        return Err(Error::invalid(format!(
            "ω has length {} but h = {h}",
            omega.len()
        )));
    }
    check_box(omega, &T::one())?;
    if i < 2 || i > code.d_star() {
        return Err(Error::invalid(format!(
            "i = {i} outside 2..={}",
            code.d_star()
        )));
    }
    if !code.is_codeword(x)? {
        return Err(Error::invalid("x is not a codeword"));
    }
    Ok(())
}

/// Minimum over all ω-weighted i-trees of height `2h` rooted at `root` of
/// `⟨λ, x⊕β⟩ - ⟨λ, x⟩`.
pub fn min_cost_tree<T: Scalar>(
    code: &TannerCode,
    x: &Assignment,
    llr: &LlrVector<T>,
    root: usize,
    h: usize,
    omega: &[T],
    i: usize,
) -> Result<T> {
    validate(code, x, llr, h, omega, i)?;
    if root >= code.num_vars() {
        return Err(Error::invalid(format!("root {root} is not a variable")));
    }
    let mu = relative_costs(x, llr)?;
    let messages = Messages::compute(code, &mu, omega, i);
    Ok(messages.root_costs().swap_remove(root))
}

pub fn certify<T: Scalar>(
    code: &TannerCode,
    x: &Assignment,
    llr: &LlrVector<T>,
    h: usize,
    omega: &[T],
    i: usize,
) -> Result<CertificateReport<T>> {
    certify_with(code, x, llr, h, omega, i, CertifyOptions::default())
}

pub fn certify_with<T: Scalar>(
    code: &TannerCode,
    x: &Assignment,
    llr: &LlrVector<T>,
    h: usize,
    omega: &[T],
    i: usize,
    options: CertifyOptions,
) -> Result<CertificateReport<T>> {
    validate(code, x, llr, h, omega, i)?;
    let mu = relative_costs(x, llr)?;
    let messages = Messages::compute(code, &mu, omega, i);
    let root_costs = messages.root_costs();
    let (worst_root, min_cost) = root_costs
        .iter()
        .enumerate()
        .fold(None::<(usize, &T)>, |best, (r, c)| match best {
            Some((_, b)) if c.cmp_total(b) != std::cmp::Ordering::Less => best,
            _ => Some((r, c)),
        })
        .map(|(r, c)| (r, c.clone()))
        .ok_or_else(|| Error::internal("code has no variables"))?;
    let witness = if options.witness {
        reconstruct_witness(&messages, &mu, omega, worst_root, options.witness_budget)?
    } else {
        None
    };
    Ok(CertificateReport {
        certified: min_cost.is_positive_strict(),
        boundary: min_cost.is_zero_approx(),
        min_cost,
        worst_root,
        root_costs,
        h,
        omega: omega.to_vec(),
        i,
        witness,
    })
}

/// Rebuilds the argmin i-tree of `root` by following the message choices
/// down a materialized path-prefix tree.
fn reconstruct_witness<T: Scalar>(
    messages: &Messages<'_, T>,
    mu: &[T],
    omega: &[T],
    root: usize,
    budget: usize,
) -> Result<Option<Witness<T>>> {
    let graph = messages.code.graph();
    let h = omega.len();
    let tree = match PathPrefixTree::build_with_budget(graph, Node::Var(root), 2 * h, budget) {
        Ok(tree) => tree,
        Err(Error::Budget(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut kept = vec![false; tree.len()];
    let mut stack = vec![0usize];
    while let Some(idx) = stack.pop() {
        kept[idx] = true;
        let node = tree.node(idx);
        match node.base {
            Node::Var(_) => stack.extend(&node.children),
            Node::Check(c) => {
                let level = node.depth.div_ceil(2);
                let label_of = |child: usize| match tree.node(child).base {
                    Node::Var(w) => graph
                        .check_neighbors(c)
                        .iter()
                        .position(|&u| u == w)
                        .unwrap_or(0),
                    Node::Check(_) => 0,
                };
                let mut children = node.children.clone();
                children.sort_by(|&a, &b| {
                    let (ka, kb) = (label_of(a), label_of(b));
                    messages
                        .message(level, c, ka)
                        .cmp_total(messages.message(level, c, kb))
                        .then(ka.cmp(&kb))
                });
                stack.extend(children.into_iter().take(messages.i - 1));
            }
        }
    }
    let weighted = attach_weights(&tree, &kept, omega)?;
    let beta = weighted.project(graph.num_vars());
    let cost = beta
        .iter()
        .zip(mu)
        .fold(T::zero(), |acc, (b, m)| acc + b.clone() * m.clone());
    Ok(Some(Witness {
        root,
        beta,
        cost,
        node_count: kept.iter().filter(|&&k| k).count(),
    }))
}
