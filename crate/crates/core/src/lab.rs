//! Exact checks of the decomposition identities relating codewords, weighted
//! path-prefix trees and i-trees.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::code::{Assignment, Node, TannerCode, TannerGraph};
use crate::error::{Error, Result};
use crate::omega::{check_box, is_zero_vector};
use crate::scalar::{Rational, Scalar};
use crate::tree::{
    enumerate_i_trees_with_budget, PathPrefixTree, WeightedTree, DEFAULT_ENUMERATION_BUDGET,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub x: Option<Assignment>,
    pub h: usize,
    pub omega: Vec<Rational>,
    pub i: Option<usize>,
    /// Left-hand side as computed.
    pub aggregate: Vec<Rational>,
    pub target: Vec<Rational>,
    pub alpha: Option<Rational>,
    /// Box parameter `H` for the codeword expectation.
    pub box_h: Option<usize>,
    /// Number of i-trees summed over.
    pub samples: u128,
    pub pass: bool,
}

impl DecompositionReport {
    pub fn to_json(&self) -> Value {
        let strings = |v: &[Rational]| v.iter().map(Scalar::to_exact_string).collect::<Vec<_>>();
        json!({
            "x": self.x.as_ref().map(|x| x.to_string()),
            "h": self.h,
            "omega": strings(&self.omega),
            "i": self.i,
            "aggregate": strings(&self.aggregate),
            "target": strings(&self.target),
            "alpha": self.alpha.as_ref().map(Scalar::to_exact_string),
            "H": self.box_h,
            "samples": self.samples.to_string(),
            "pass": self.pass,
        })
    }
}

fn nonzero_codeword(code: &TannerCode, x: &Assignment) -> Result<()> {
    if !code.is_codeword(x)? {
        return Err(Error::invalid("x is not a codeword"));
    }
    if x.weight() == 0 {
        return Err(Error::invalid("x must be a nonzero codeword"));
    }
    Ok(())
}

fn check_omega(omega: &[Rational], h: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::invalid("h must be at least 1"));
    }
    if omega.len() != h {
        return Err(Error::invalid(format!(
            "ω has length {} but h = {h}",
            omega.len()
        )));
    }
    if omega.iter().any(|w| w.is_negative()) {
        return Err(Error::invalid("ω must be non-negative"));
    }
    Ok(())
}

fn add_into(acc: &mut [Rational], v: &[Rational]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn scaled(v: &[Rational], s: &Rational) -> Vec<Rational> {
    v.iter().map(|a| a * s).collect()
}

/// Sums `π_G` of the ω-weighted prefix trees of height `2h` in `G_x` over the
/// support of `x` and compares with `(Σ_t ω_t)·x`.
pub fn verify_prefix_decomposition(
    code: &TannerCode,
    x: &Assignment,
    h: usize,
    omega: &[Rational],
) -> Result<DecompositionReport> {
    nonzero_codeword(code, x)?;
    check_omega(omega, h)?;
    let gx = code.induced_support_graph(x)?;
    let n = code.num_vars();
    let parts = x
        .support()
        .into_par_iter()
        .map(|r| {
            let tree = PathPrefixTree::build(&gx, Node::Var(r), 2 * h)?;
            Ok(WeightedTree::full(&tree, omega)?.project(n))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut aggregate = vec![Rational::zero(); n];
    for p in &parts {
        add_into(&mut aggregate, p);
    }
    let total: Rational = omega.iter().sum();
    let target = scaled(&x.to_scalars::<Rational>(), &total);
    Ok(DecompositionReport {
        x: Some(x.clone()),
        h,
        omega: omega.to_vec(),
        i: None,
        pass: aggregate == target,
        aggregate,
        target,
        alpha: None,
        box_h: None,
        samples: parts.len() as u128,
    })
}

/// Expected node weights of a random i-tree, indexed by the nodes of the
/// full prefix tree, together with the number of i-trees.
fn itree_expectation(
    tree: &PathPrefixTree,
    i: usize,
    omega: &[Rational],
    budget: u128,
) -> Result<(Vec<Rational>, u128)> {
    let itrees = enumerate_i_trees_with_budget(tree, i, budget)?;
    let mut expectation = vec![Rational::zero(); tree.len()];
    for t in &itrees {
        let p: Rational = t.probability(tree);
        let weighted = WeightedTree::of_itree(tree, t, omega)?;
        for (slot, w) in expectation.iter_mut().zip(weighted.weights()) {
            if let Some(w) = w {
                *slot += &p * w;
            }
        }
    }
    Ok((expectation, itrees.len() as u128))
}

fn node_weights(weighted: &WeightedTree<'_, Rational>) -> Vec<Rational> {
    weighted
        .weights()
        .iter()
        .map(|w| w.clone().unwrap_or_else(Rational::zero))
        .collect()
}

/// Compares, node by node, the expected weights of a random i-tree of
/// `T_r^{2h}(graph)` with the weights of the full ω-weighted prefix tree.
/// Each local-code node keeps `i - 1` children chosen uniformly, which
/// induces the probability of every i-tree.
pub fn verify_itree_expectation(
    graph: &TannerGraph,
    root: usize,
    h: usize,
    i: usize,
    omega: &[Rational],
) -> Result<DecompositionReport> {
    verify_itree_expectation_with_budget(graph, root, h, i, omega, DEFAULT_ENUMERATION_BUDGET)
}

pub fn verify_itree_expectation_with_budget(
    graph: &TannerGraph,
    root: usize,
    h: usize,
    i: usize,
    omega: &[Rational],
    budget: u128,
) -> Result<DecompositionReport> {
    check_omega(omega, h)?;
    if root >= graph.num_vars() || graph.var_degree(root) == 0 {
        return Err(Error::invalid(format!(
            "v{root} is not a variable node of the subgraph"
        )));
    }
    let tree = PathPrefixTree::build(graph, Node::Var(root), 2 * h)?;
    let target = node_weights(&WeightedTree::full(&tree, omega)?);
    let (aggregate, samples) = itree_expectation(&tree, i, omega, budget)?;
    Ok(DecompositionReport {
        x: None,
        h,
        omega: omega.to_vec(),
        i: Some(i),
        pass: aggregate == target,
        aggregate,
        target,
        alpha: None,
        box_h: None,
        samples,
    })
}

/// `H = ⌈h / ‖x‖₁⌉`.
pub fn box_parameter(h: usize, weight: usize) -> usize {
    h.div_ceil(weight)
}

/// Draws a root uniformly from the support of `x` and then a random i-tree
/// of `T_r^{2h}(G_x)`; checks `E[π_G(T)] = α·x` with `α = Σω / ‖x‖₁` and
/// `α ∈ (0, 1]`.
pub fn verify_codeword_expectation(
    code: &TannerCode,
    x: &Assignment,
    h: usize,
    i: usize,
    omega: &[Rational],
) -> Result<DecompositionReport> {
    verify_codeword_expectation_with_budget(code, x, h, i, omega, DEFAULT_ENUMERATION_BUDGET)
}

pub fn verify_codeword_expectation_with_budget(
    code: &TannerCode,
    x: &Assignment,
    h: usize,
    i: usize,
    omega: &[Rational],
    budget: u128,
) -> Result<DecompositionReport> {
    nonzero_codeword(code, x)?;
    check_omega(omega, h)?;
    if i < 2 || i > code.d_star() {
        return Err(Error::invalid(format!(
            "i = {i} outside 2..={}",
            code.d_star()
        )));
    }
    if is_zero_vector(omega) {
        return Err(Error::invalid("ω must be nonzero"));
    }
    let weight = x.weight();
    let box_h = box_parameter(h, weight);
    check_box(omega, &Rational::from_ratio(1, box_h as i64))?;
    let gx = code.induced_support_graph(x)?;
    let n = code.num_vars();
    let root_share = Rational::from_ratio(1, weight as i64);
    let parts = x
        .support()
        .into_par_iter()
        .map(|r| {
            let tree = PathPrefixTree::build(&gx, Node::Var(r), 2 * h)?;
            let (expectation, samples) = itree_expectation(&tree, i, omega, budget)?;
            let mut beta = vec![Rational::zero(); n];
            for (node, w) in tree.nodes().iter().zip(&expectation) {
                if let Node::Var(v) = node.base {
                    beta[v] += w;
                }
            }
            Ok((beta, samples))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut aggregate = vec![Rational::zero(); n];
    let mut samples = 0u128;
    for (beta, s) in &parts {
        add_into(&mut aggregate, &scaled(beta, &root_share));
        samples = samples.saturating_add(*s);
    }
    let alpha: Rational = omega.iter().sum::<Rational>() * &root_share;
    let target = scaled(&x.to_scalars::<Rational>(), &alpha);
    let in_range = alpha.is_positive() && alpha <= Rational::one();
    Ok(DecompositionReport {
        x: Some(x.clone()),
        h,
        omega: omega.to_vec(),
        i: Some(i),
        pass: in_range && aggregate == target,
        aggregate,
        target,
        alpha: Some(alpha),
        box_h: Some(box_h),
        samples,
    })
}

/// `mass[t - 1][v]`: total unit-weight mass on copies of `v` at depth `2t`,
/// summed over the prefix trees of `G_x` rooted at the support of `x`.
pub fn depth_mass(code: &TannerCode, x: &Assignment, h: usize) -> Result<Vec<Vec<Rational>>> {
    nonzero_codeword(code, x)?;
    let gx = code.induced_support_graph(x)?;
    let ones = vec![Rational::one(); h];
    let mut mass = vec![vec![Rational::zero(); code.num_vars()]; h];
    for r in x.support() {
        let tree = PathPrefixTree::build(&gx, Node::Var(r), 2 * h)?;
        let weighted = WeightedTree::full(&tree, &ones)?;
        for (node, w) in tree.nodes().iter().zip(weighted.weights()) {
            if let (Node::Var(v), Some(w)) = (node.base, w) {
                mass[node.depth / 2 - 1][v] += w;
            }
        }
    }
    Ok(mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::fixtures::six_cycle;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn six_cycle_prefix_decomposition() {
        let code = six_cycle();
        let x = Assignment::ones(3);
        let rep = verify_prefix_decomposition(&code, &x, 1, &[r(1, 1)]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.aggregate, vec![r(1, 1); 3]);
        let zero = verify_prefix_decomposition(&code, &x, 2, &[r(0, 1), r(0, 1)]).unwrap();
        assert!(zero.pass);
        assert!(zero.aggregate.iter().all(Zero::is_zero));
        assert!(verify_prefix_decomposition(&code, &Assignment::zeros(3), 1, &[r(1, 1)]).is_err());
    }

    #[test]
    fn degree_three_check_itree_expectation() {
        let graph = TannerGraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let rep = verify_itree_expectation(&graph, 0, 1, 2, &[r(1, 1)]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.samples, 2);
        let full = verify_itree_expectation(&graph, 0, 1, 3, &[r(1, 1)]).unwrap();
        assert!(full.pass);
        assert_eq!(full.samples, 1);
    }

    #[test]
    fn six_cycle_codeword_expectation() {
        let code = six_cycle();
        let x = Assignment::ones(3);
        let rep = verify_codeword_expectation(&code, &x, 1, 2, &[r(1, 2)]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.alpha, Some(r(1, 6)));
        assert_eq!(rep.box_h, Some(1));
        assert!(verify_codeword_expectation(&code, &x, 1, 2, &[r(0, 1)]).is_err());
        assert!(verify_codeword_expectation(&code, &x, 1, 3, &[r(1, 2)]).is_err());
    }

    #[test]
    fn box_parameter_values() {
        assert_eq!(box_parameter(3, 1), 3);
        assert_eq!(box_parameter(3, 2), 2);
        assert_eq!(box_parameter(2, 5), 1);
    }

    #[test]
    fn depth_mass_on_cycle() {
        let code = six_cycle();
        let mass = depth_mass(&code, &Assignment::ones(3), 3).unwrap();
        for level in mass {
            assert_eq!(level, vec![r(1, 1); 3]);
        }
    }
}
