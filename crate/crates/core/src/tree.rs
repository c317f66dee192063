//! Path-prefix trees, i-trees and weighted projections.
//!
//! A [`PathPrefixTree`] is materialized explicitly: node `0` is the root
//! (the empty path) and every other node is a backtrackless path, stored as
//! the index of its length-`k-1` prefix plus the graph node it ends at.
//! Subtrees (in particular i-trees) are masks over the nodes of one
//! materialized tree.

use std::fmt::Write as _;

use itertools::Itertools;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{Node, TannerGraph};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on materialized tree nodes.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// Default cap on the number of i-trees an enumeration may produce.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    /// Graph node the path ends at.
    pub base: Node,
    pub parent: Option<usize>,
    pub depth: usize,
    pub children: Vec<usize>,
    /// Degree of `base` in the graph the tree was built from.
    pub base_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPrefixTree {
    nodes: Vec<TreeNode>,
    height: usize,
}

impl PathPrefixTree {
    pub fn build(graph: &TannerGraph, root: Node, height: usize) -> Result<Self> {
        Self::build_with_budget(graph, root, height, DEFAULT_NODE_BUDGET)
    }

    pub fn build_with_budget(
        graph: &TannerGraph,
        root: Node,
        height: usize,
        budget: usize,
    ) -> Result<Self> {
        if !graph.contains(root) {
            return Err(Error::invalid(format!(
                "root {root} is not a node of the graph"
            )));
        }
        let mut nodes = vec![TreeNode {
            base: root,
            parent: None,
            depth: 0,
            children: Vec::new(),
            base_degree: graph.degree(root),
        }];
        let mut frontier = vec![0usize];
        for depth in 1..=height {
            let mut next = Vec::new();
            for &idx in &frontier {
                let came_from = nodes[idx].parent.map(|p| nodes[p].base);
                for neighbor in graph.neighbors(nodes[idx].base) {
                    if Some(neighbor) == came_from {
                        continue;
                    }
                    if nodes.len() >= budget {
                        return Err(Error::budget(format!(
                            "path-prefix tree exceeds node budget {budget}"
                        )));
                    }
                    let child = nodes.len();
                    nodes.push(TreeNode {
                        base: neighbor,
                        parent: Some(idx),
                        depth,
                        children: Vec::new(),
                        base_degree: graph.degree(neighbor),
                    });
                    nodes[idx].children.push(child);
                    next.push(child);
                }
            }
            frontier = next;
        }
        Ok(PathPrefixTree { nodes, height })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn root(&self) -> Node {
        self.nodes[0].base
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &TreeNode {
        &self.nodes[idx]
    }

    /// Graph nodes along the path from the root to `idx`, root first.
    pub fn path(&self, idx: usize) -> Vec<Node> {
        let mut path = Vec::with_capacity(self.nodes[idx].depth + 1);
        let mut cur = Some(idx);
        while let Some(i) = cur {
            path.push(self.nodes[i].base);
            cur = self.nodes[i].parent;
        }
        path.reverse();
        path
    }

    pub fn full_mask(&self) -> Vec<bool> {
        vec![true; self.nodes.len()]
    }

    /// Indented text rendering, one node per line.
    pub fn dump(&self) -> String {
        self.dump_with(|_| None)
    }

    pub fn dump_weighted<T: Scalar>(&self, weighted: &WeightedTree<'_, T>) -> String {
        self.dump_with(|idx| {
            if !weighted.kept[idx] {
                Some("-".to_string())
            } else {
                weighted.weights[idx].as_ref().map(|w| w.to_string())
            }
        })
    }

    fn dump_with(&self, annotate: impl Fn(usize) -> Option<String>) -> String {
        let mut out = String::new();
        let mut stack = vec![0usize];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx];
            let _ = write!(out, "{}{}", "  ".repeat(node.depth), node.base);
            if let Some(note) = annotate(idx) {
                let _ = write!(out, " {note}");
            }
            out.push('\n');
            stack.extend(node.children.iter().rev());
        }
        out
    }

    fn check_i(&self, i: usize) -> Result<()> {
        if !matches!(self.root(), Node::Var(_)) {
            return Err(Error::invalid("i-trees must be rooted at a variable node"));
        }
        if !self.height.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "i-trees need an even height, got {}",
                self.height
            )));
        }
        if i < 2 {
            return Err(Error::invalid(format!("i = {i} but i must be at least 2")));
        }
        if let Some(node) = self
            .nodes
            .iter()
            .find(|n| matches!(n.base, Node::Check(_)) && n.children.len() < i - 1)
        {
            return Err(Error::invalid(format!(
                "local-code node {} at depth {} has {} children, fewer than i - 1 = {}",
                node.base,
                node.depth,
                node.children.len(),
                i - 1
            )));
        }
        Ok(())
    }
}

/// A subtree of a path-prefix tree in which variable nodes keep all their
/// children and every local-code node keeps exactly `i - 1` children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ITree {
    kept: Vec<bool>,
    i: usize,
}

impl ITree {
    pub fn kept(&self) -> &[bool] {
        &self.kept
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.kept[idx]
    }

    pub fn node_count(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }

    /// Probability of this tree under the growth process that keeps `i - 1`
    /// uniformly chosen children at every kept local-code node.
    pub fn probability<T: Scalar>(&self, tree: &PathPrefixTree) -> T {
        tree.nodes
            .iter()
            .enumerate()
            .filter(|&(idx, n)| self.kept[idx] && matches!(n.base, Node::Check(_)))
            .fold(T::one(), |acc, (_, n)| {
                let choices = num_integer::binomial(n.children.len() as u64, (self.i - 1) as u64);
                acc / T::from_ratio(choices as i64, 1)
            })
    }

    /// Checks the defining degree conditions against `tree`.
    pub fn is_valid_in(&self, tree: &PathPrefixTree) -> bool {
        if self.kept.len() != tree.len() || !self.kept[0] {
            return false;
        }
        tree.nodes.iter().enumerate().all(|(idx, node)| {
            if !self.kept[idx] {
                return node.children.iter().all(|&c| !self.kept[c]);
            }
            let kept_children = node.children.iter().filter(|&&c| self.kept[c]).count();
            match node.base {
                Node::Var(_) => kept_children == node.children.len(),
                Node::Check(_) => kept_children == self.i - 1,
            }
        })
    }
}

/// Number of i-trees, saturating at `u128::MAX`.
pub fn count_i_trees(tree: &PathPrefixTree, i: usize) -> Result<u128> {
    tree.check_i(i)?;
    let mut counts = vec![0u128; tree.len()];
    for idx in (0..tree.len()).rev() {
        let node = &tree.nodes[idx];
        counts[idx] = match node.base {
            Node::Var(_) => node
                .children
                .iter()
                .fold(1u128, |acc, &c| acc.saturating_mul(counts[c])),
            Node::Check(_) => {
                // Elementary symmetric polynomial of degree i-1 in the child counts.
                let k = i - 1;
                let mut e = vec![0u128; k + 1];
                e[0] = 1;
                for &c in &node.children {
                    for j in (1..=k).rev() {
                        e[j] = e[j].saturating_add(e[j - 1].saturating_mul(counts[c]));
                    }
                }
                e[k]
            }
        };
    }
    Ok(counts[0])
}

pub fn enumerate_i_trees(tree: &PathPrefixTree, i: usize) -> Result<Vec<ITree>> {
    enumerate_i_trees_with_budget(tree, i, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_i_trees_with_budget(
    tree: &PathPrefixTree,
    i: usize,
    budget: u128,
) -> Result<Vec<ITree>> {
    let count = count_i_trees(tree, i)?;
    if count > budget {
        return Err(Error::budget(format!(
            "{count} i-trees exceed enumeration budget {budget}"
        )));
    }
    let sets = enumerate_below(tree, 0, i);
    Ok(sets
        .into_iter()
        .map(|set| {
            let mut kept = vec![false; tree.len()];
            for idx in set {
                kept[idx] = true;
            }
            ITree { kept, i }
        })
        .collect())
}

/// Every admissible node set of the subtree hanging at `idx`.
fn enumerate_below(tree: &PathPrefixTree, idx: usize, i: usize) -> Vec<Vec<usize>> {
    let node = &tree.nodes[idx];
    let child_options: Vec<Vec<Vec<usize>>> = node
        .children
        .iter()
        .map(|&c| enumerate_below(tree, c, i))
        .collect();
    let combine = |chosen: &[usize]| -> Vec<Vec<usize>> {
        chosen.iter().fold(vec![vec![idx]], |acc, &pos| {
            acc.iter()
                .cartesian_product(&child_options[pos])
                .map(|(a, b)| a.iter().chain(b).copied().collect())
                .collect()
        })
    };
    match node.base {
        Node::Var(_) => combine(&(0..node.children.len()).collect::<Vec<_>>()),
        Node::Check(_) => (0..node.children.len())
            .combinations(i - 1)
            .flat_map(|chosen| combine(&chosen))
            .collect(),
    }
}

pub fn sample_i_tree(tree: &PathPrefixTree, i: usize, seed: u64) -> Result<ITree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_i_tree_with(tree, i, &mut rng)
}

/// Grows an i-tree from the root, choosing `i - 1` distinct children
/// uniformly at random at each kept local-code node.
pub fn sample_i_tree_with<R: Rng + ?Sized>(
    tree: &PathPrefixTree,
    i: usize,
    rng: &mut R,
) -> Result<ITree> {
    tree.check_i(i)?;
    let mut kept = vec![false; tree.len()];
    let mut stack = vec![0usize];
    while let Some(idx) = stack.pop() {
        kept[idx] = true;
        let node = &tree.nodes[idx];
        match node.base {
            Node::Var(_) => stack.extend(&node.children),
            Node::Check(_) => {
                let mut picks = index::sample(rng, node.children.len(), i - 1).into_vec();
                picks.sort_unstable();
                stack.extend(picks.into_iter().map(|p| node.children[p]));
            }
        }
    }
    Ok(ITree { kept, i })
}

/// Variable-node weights of a subtree.
#[derive(Debug, Clone)]
pub struct WeightedTree<'a, T> {
    tree: &'a PathPrefixTree,
    kept: Vec<bool>,
    weights: Vec<Option<T>>,
}

impl<'a, T: Scalar> WeightedTree<'a, T> {
    /// Weights of the whole path-prefix tree.
    pub fn full(tree: &'a PathPrefixTree, omega: &[T]) -> Result<Self> {
        attach_weights(tree, &tree.full_mask(), omega)
    }

    pub fn of_itree(tree: &'a PathPrefixTree, itree: &ITree, omega: &[T]) -> Result<Self> {
        attach_weights(tree, itree.kept(), omega)
    }

    pub fn tree(&self) -> &PathPrefixTree {
        self.tree
    }

    /// Weight of node `idx`; `None` for the root, local-code nodes and nodes
    /// outside the subtree.
    pub fn weight(&self, idx: usize) -> Option<&T> {
        self.weights[idx].as_ref()
    }

    pub fn weights(&self) -> &[Option<T>] {
        &self.weights
    }

    /// `π_G`: sums the weights of all copies of each variable.
    pub fn project(&self, num_vars: usize) -> Vec<T> {
        self.project_with(num_vars, |v| v)
    }

    /// Projection through a map on variable indices, e.g. cover to base.
    pub fn project_with(&self, len: usize, map: impl Fn(usize) -> usize) -> Vec<T> {
        let mut beta = vec![T::zero(); len];
        for (node, w) in self.tree.nodes.iter().zip(&self.weights) {
            if let (Node::Var(v), Some(w)) = (node.base, w) {
                let slot = &mut beta[map(v)];
                *slot = slot.clone() + w.clone();
            }
        }
        beta
    }
}

/// Attaches depth-dependent weights to the variable nodes of the subtree
/// `kept`: a node at depth `d` ending at `v` gets
/// `ω_t / deg(v) · Π 1/(deg_sub(u) - 1)` over the interior nodes `u` of its
/// path, with `t = ⌈d/2⌉`.
pub fn attach_weights<'a, T: Scalar>(
    tree: &'a PathPrefixTree,
    kept: &[bool],
    omega: &[T],
) -> Result<WeightedTree<'a, T>> {
    let needed = tree.height.div_ceil(2);
    if omega.len() < needed {
        return Err(Error::invalid(format!(
            "weight vector has length {} but height {} needs {needed}",
            omega.len(),
            tree.height
        )));
    }
    if omega.iter().any(|w| w.is_negative_strict()) {
        return Err(Error::invalid("weight vector must be non-negative"));
    }
    if kept.len() != tree.len() || !kept[0] {
        return Err(Error::invalid("subtree mask does not match the tree"));
    }
    let mut path_factor: Vec<Option<T>> = vec![None; tree.len()];
    let mut weights: Vec<Option<T>> = vec![None; tree.len()];
    path_factor[0] = Some(T::one());
    for idx in 0..tree.len() {
        if !kept[idx] {
            continue;
        }
        let node = &tree.nodes[idx];
        let factor = path_factor[idx]
            .clone()
            .ok_or_else(|| Error::invalid(format!("subtree node {idx} has no kept parent")))?;
        if idx != 0 {
            if let Node::Var(_) = node.base {
                let t = node.depth.div_ceil(2);
                weights[idx] =
                    Some(omega[t - 1].clone() / T::from_usize(node.base_degree) * factor.clone());
            }
        }
        let kept_children: Vec<usize> =
            node.children.iter().copied().filter(|&c| kept[c]).collect();
        if kept_children.is_empty() {
            continue;
        }
        let child_factor = if idx == 0 {
            factor
        } else {
            let sub_degree = kept_children.len() + 1;
            debug_assert!(sub_degree >= 2);
            factor / T::from_usize(sub_degree - 1)
        };
        for c in kept_children {
            path_factor[c] = Some(child_factor.clone());
        }
    }
    Ok(WeightedTree {
        tree,
        kept: kept.to_vec(),
        weights,
    })
}
