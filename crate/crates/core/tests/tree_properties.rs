mod common;

use std::collections::HashMap;

use common::{pick_codeword, q, small_code, SPECS};
use proptest::prelude::*;
use tanner_core::lab::depth_mass;
use tanner_core::tree::{count_i_trees, enumerate_i_trees, sample_i_tree};
use tanner_core::{Node, PathPrefixTree, Rational, Scalar, TannerGraph, WeightedTree};

fn copies(tree: &PathPrefixTree, v: usize) -> usize {
    tree.nodes()
        .iter()
        .filter(|n| n.base == Node::Var(v))
        .count()
}

/// Unit weight of a depth-`2t` node computed straight from the parent chain.
fn unit_weight(tree: &PathPrefixTree, idx: usize, graph: &TannerGraph) -> Rational {
    let node = tree.node(idx);
    let mut w = q(1, graph.degree(node.base) as i64);
    let mut cur = node.parent;
    while let Some(p) = cur {
        let n = tree.node(p);
        if n.parent.is_none() {
            break;
        }
        w /= q(graph.degree(n.base) as i64 - 1, 1);
        cur = n.parent;
    }
    w
}

/// 99th percentile of chi-square by the Wilson-Hilferty approximation.
fn chi_square_99(df: usize) -> f64 {
    let k = df as f64;
    let z = 2.326_348;
    k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reversed_path_bijection(spec in 0..SPECS.len(), seed in 0u64..1000, h in 1usize..=3) {
        let code = small_code(spec, seed);
        let g = code.graph();
        let trees: Vec<_> = (0..g.num_vars())
            .map(|v| PathPrefixTree::build(g, Node::Var(v), 2 * h).unwrap())
            .collect();
        for u in 0..g.num_vars() {
            for v in 0..g.num_vars() {
                prop_assert_eq!(copies(&trees[u], v), copies(&trees[v], u));
            }
        }
    }

    #[test]
    fn prefix_trees_are_full_nonbacktracking_walks(
        spec in 0..SPECS.len(),
        seed in 0u64..1000,
        h in 1usize..=3,
    ) {
        let code = small_code(spec, seed);
        let g = code.graph();
        let root = (seed as usize) % g.num_vars();
        let tree = PathPrefixTree::build(g, Node::Var(root), 2 * h).unwrap();
        for (idx, node) in tree.nodes().iter().enumerate() {
            prop_assert!(node.depth <= 2 * h);
            if node.depth < 2 * h {
                let expected = g.degree(node.base) - usize::from(node.parent.is_some());
                prop_assert_eq!(node.children.len(), expected);
            } else {
                prop_assert!(node.children.is_empty());
            }
            let path = tree.path(idx);
            prop_assert_eq!(path.len(), node.depth + 1);
            for w in path.windows(2) {
                prop_assert!(g.neighbors(w[0]).contains(&w[1]));
            }
            for w in path.windows(3) {
                prop_assert_ne!(w[0], w[2]);
            }
        }
    }

    #[test]
    fn itree_projections_lie_in_unit_box(
        spec in 0..SPECS.len(),
        seed in 0u64..1000,
        h in 1usize..=2,
        wseed in any::<u64>(),
    ) {
        let code = small_code(spec, seed);
        let g = code.graph();
        let omega = common::omega(h, 0, 7, wseed);
        let root = (seed as usize) % g.num_vars();
        let tree = PathPrefixTree::build(g, Node::Var(root), 2 * h).unwrap();
        for i in 2..=code.d_star() {
            if count_i_trees(&tree, i).unwrap() > 2_000 {
                continue;
            }
            let itrees = enumerate_i_trees(&tree, i).unwrap();
            let total = itrees
                .iter()
                .fold(q(0, 1), |acc, t| acc + t.probability::<Rational>(&tree));
            prop_assert_eq!(total, q(1, 1));
            for t in &itrees {
                prop_assert!(t.is_valid_in(&tree));
                let beta = WeightedTree::of_itree(&tree, t, &omega).unwrap().project(g.num_vars());
                prop_assert!(beta.iter().all(|b| !b.is_negative_strict() && *b <= q(1, 1)));
            }
        }
    }

    #[test]
    fn depth_sums_on_support_graph_are_one(
        spec in 0..SPECS.len(),
        seed in 0u64..1000,
        h in 1usize..=3,
    ) {
        let code = small_code(spec, seed);
        let x = pick_codeword(&code, seed);
        prop_assume!(x.weight() > 0);
        let gx = code.induced_support_graph(&x).unwrap();
        let n = code.num_vars();
        let mut mass = vec![vec![q(0, 1); n]; h];
        for r in x.support() {
            let tree = PathPrefixTree::build(&gx, Node::Var(r), 2 * h).unwrap();
            for (idx, node) in tree.nodes().iter().enumerate().skip(1) {
                if let Node::Var(v) = node.base {
                    let slot = &mut mass[node.depth / 2 - 1][v];
                    *slot = slot.clone() + unit_weight(&tree, idx, &gx);
                }
            }
        }
        for row in &mass {
            for (v, mass_v) in row.iter().enumerate() {
                prop_assert_eq!(mass_v.clone(), q(i64::from(x.get(v)), 1));
            }
        }
        prop_assert_eq!(depth_mass(&code, &x, h).unwrap(), mass);
    }

    #[test]
    fn support_graph_keeps_full_variable_degrees(spec in 0..SPECS.len(), seed in 0u64..1000) {
        let code = small_code(spec, seed);
        let x = pick_codeword(&code, seed);
        let g = code.graph();
        let gx = code.induced_support_graph(&x).unwrap();
        for v in 0..g.num_vars() {
            let expected = if x.get(v) == 1 { g.var_degree(v) } else { 0 };
            prop_assert_eq!(gx.var_degree(v), expected);
        }
        for c in gx.active_checks() {
            prop_assert!(gx.check_degree(c) >= code.local_code(c).min_distance());
            prop_assert!(gx.check_degree(c) >= code.d_star());
        }
    }
}

#[test]
fn sampler_matches_growth_probabilities() {
    let draws = 10_000u64;
    let mut tested = 0;
    'search: for (spec, name) in SPECS.iter().enumerate() {
        for seed in 0..20 {
            let code = small_code(spec, seed);
            let tree = PathPrefixTree::build(code.graph(), Node::Var(0), 4).unwrap();
            for i in 2..=code.d_star() {
                let count = count_i_trees(&tree, i).unwrap();
                if !(3..=32).contains(&count) {
                    continue;
                }
                let itrees = enumerate_i_trees(&tree, i).unwrap();
                let index: HashMap<Vec<bool>, usize> = itrees
                    .iter()
                    .enumerate()
                    .map(|(k, t)| (t.kept().to_vec(), k))
                    .collect();
                let mut observed = vec![0u64; itrees.len()];
                for s in 0..draws {
                    let t = sample_i_tree(&tree, i, s).unwrap();
                    observed[index[t.kept()]] += 1;
                }
                let chi: f64 = itrees
                    .iter()
                    .zip(&observed)
                    .map(|(t, &o)| {
                        let e = draws as f64 * t.probability::<f64>(&tree);
                        (o as f64 - e).powi(2) / e
                    })
                    .sum();
                let limit = chi_square_99(itrees.len() - 1);
                assert!(
                    chi < limit,
                    "{name}: chi-square {chi:.2} over limit {limit:.2}"
                );
                tested += 1;
                if tested == 4 {
                    break 'search;
                }
            }
        }
    }
    assert_eq!(tested, 4, "not enough small instances");
}

#[test]
fn single_itree_at_full_degree() {
    // Repetition local codes have distance equal to their length.
    let code = small_code(3, 1);
    let max = code.d_star();
    assert!((0..code.num_checks()).all(|c| code.graph().check_degree(c) == max));
    let tree = PathPrefixTree::build(code.graph(), Node::Var(0), 4).unwrap();
    assert_eq!(count_i_trees(&tree, max).unwrap(), 1);
    let t = &enumerate_i_trees(&tree, max).unwrap()[0];
    assert!(t.kept().iter().all(|&k| k));
    assert_eq!(t.probability::<Rational>(&tree), q(1, 1));
}
