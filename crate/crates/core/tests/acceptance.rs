//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tanner_core::certifier::{certify_with, CertifyOptions};
use tanner_core::channel::ChannelSpec;
use tanner_core::code::{inner, relative_point, Assignment, Node, TannerCode, TannerGraph};
use tanner_core::harness::{
    generate_code, run_experiment, CodeSource, CodewordMode, ExperimentConfig, GeneratorSpec,
    IChoice,
};
use tanner_core::lab::{
    verify_codeword_expectation_with_budget, verify_itree_expectation_with_budget,
    verify_prefix_decomposition,
};
use tanner_core::omega::OmegaSchedule;
use tanner_core::tree::{
    count_i_trees, enumerate_i_trees_with_budget, PathPrefixTree, WeightedTree,
};
use tanner_core::{transmit, LlrVector, Rational};

const ITREE_LIMIT: u128 = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Codes with every variable of degree at least two.
const FAMILY: &[&str] = &[
    "regular:dv=2,dc=3,n=6",
    "regular:dv=2,dc=3,n=9",
    "regular:dv=2,dc=3,n=12",
    "regular:dv=2,dc=4,n=10",
    "regular:dv=3,dc=6,n=12",
    "irregular:n=9,codes=rep3*6",
    "irregular:n=14,codes=hamming7*4",
    "irregular:n=16,codes=exthamming8*4",
    "irregular:n=12,codes=hamming7*2+rep3*2+parity4",
];

fn random_code(rng: &mut ChaCha8Rng, family: &[&str]) -> TannerCode {
    let spec = GeneratorSpec::parse(family.choose(rng).unwrap()).unwrap();
    generate_code(&spec, rng.random()).unwrap()
}

fn random_codeword(code: &TannerCode, rng: &mut ChaCha8Rng, nonzero: bool) -> Option<Assignment> {
    let words: Vec<Assignment> = code
        .codewords(30)
        .unwrap()
        .into_iter()
        .filter(|w| !nonzero || w.weight() > 0)
        .collect();
    words.choose(rng).cloned()
}

/// `k / den` with small random denominators, scaled by `1 / scale`.
fn random_omega(rng: &mut ChaCha8Rng, h: usize, scale: i64) -> Vec<Rational> {
    loop {
        let omega: Vec<Rational> = (0..h)
            .map(|_| {
                let den = rng.random_range(1..=6i64);
                r(rng.random_range(0..=den), den * scale)
            })
            .collect();
        if omega.iter().any(|w| !w.is_zero()) {
            return omega;
        }
    }
}

fn prefix_decomposition() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e3);
    let family = [
        FAMILY,
        &["regular:dv=3,dc=6,n=30", "regular:dv=2,dc=3,n=30"],
    ]
    .concat();
    let (mut checked, mut failed) = (0, 0);
    while checked < 200 {
        let code = random_code(&mut rng, &family);
        let Some(x) = random_codeword(&code, &mut rng, true) else {
            continue;
        };
        let h = rng.random_range(1..=3);
        let omega = random_omega(&mut rng, h, 1);
        let report = verify_prefix_decomposition(&code, &x, h, &omega).unwrap();
        checked += 1;
        if !report.pass {
            failed += 1;
            eprintln!("prefix decomposition counterexample: {}", report.to_json());
        }
    }
    let elapsed = started.elapsed();
    outcome(
        failed == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{checked} instances, {failed} mismatches, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn itree_expectation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e4);
    let (mut checked, mut failed, mut nontrivial) = (0, 0, 0);
    while checked < 100 {
        let code = random_code(&mut rng, FAMILY);
        let graph: TannerGraph = if rng.random_bool(0.5) {
            let Some(x) = random_codeword(&code, &mut rng, true) else {
                continue;
            };
            code.induced_support_graph(&x).unwrap()
        } else {
            code.graph().clone()
        };
        let roots = graph.active_variables();
        let root = *roots.choose(&mut rng).unwrap();
        let min_check = graph
            .active_checks()
            .iter()
            .map(|&c| graph.check_degree(c))
            .min()
            .unwrap();
        let i = rng.random_range(2..=min_check);
        let h = rng.random_range(1..=2);
        let tree = PathPrefixTree::build(&graph, Node::Var(root), 2 * h).unwrap();
        let count = count_i_trees(&tree, i).unwrap();
        if count > ITREE_LIMIT {
            continue;
        }
        let omega = random_omega(&mut rng, h, 1);
        let report =
            verify_itree_expectation_with_budget(&graph, root, h, i, &omega, ITREE_LIMIT).unwrap();
        checked += 1;
        nontrivial += usize::from(count > 1);
        if !report.pass {
            failed += 1;
            eprintln!("i-tree expectation counterexample: {}", report.to_json());
        }
    }
    outcome(
        failed == 0,
        format!("{checked} instances ({nontrivial} with several i-trees), {failed} mismatches"),
    )
}

fn codeword_expectation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e2);
    let (mut checked, mut failed, mut composition_breaks) = (0, 0, 0);
    while checked < 100 {
        let code = random_code(&mut rng, FAMILY);
        let Some(x) = random_codeword(&code, &mut rng, true) else {
            continue;
        };
        let h: usize = rng.random_range(1..=2);
        let i = rng.random_range(2..=code.d_star());
        let big_h = h.div_ceil(x.weight());
        let omega = random_omega(&mut rng, h, big_h as i64);
        let report =
            match verify_codeword_expectation_with_budget(&code, &x, h, i, &omega, ITREE_LIMIT) {
                Ok(rep) => rep,
                Err(tanner_core::Error::Budget(_)) => continue,
                Err(e) => panic!("{e}"),
            };
        checked += 1;
        let alpha = report.alpha.clone().unwrap();
        let in_range = alpha > Rational::zero() && alpha <= r(1, 1);
        if !report.pass || !in_range {
            failed += 1;
            eprintln!("codeword expectation counterexample: {}", report.to_json());
        }
        let prefix = verify_prefix_decomposition(&code, &x, h, &omega)
            .unwrap()
            .pass;
        let gx = code.induced_support_graph(&x).unwrap();
        let per_root = x.support().iter().all(|&root| {
            verify_itree_expectation_with_budget(&gx, root, h, i, &omega, ITREE_LIMIT)
                .unwrap()
                .pass
        });
        if prefix && per_root && !report.pass {
            composition_breaks += 1;
        }
    }
    outcome(
        failed == 0 && composition_breaks == 0,
        format!(
            "{checked} instances, {failed} mismatches, {composition_breaks} composition breaks"
        ),
    )
}

fn random_llr(code: &TannerCode, x: &Assignment, rng: &mut ChaCha8Rng) -> LlrVector<Rational> {
    match rng.random_range(0..3) {
        0 => transmit(code, x, &ChannelSpec::bsc(0.1, 100).unwrap(), rng.random()).unwrap(),
        1 => transmit(code, x, &ChannelSpec::awgn(0.8, 100).unwrap(), rng.random()).unwrap(),
        _ => LlrVector::from_values(
            (0..code.num_vars())
                .map(|_| r(rng.random_range(-9..=9), 4))
                .collect(),
        )
        .unwrap(),
    }
}

fn certifier_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xce47);
    let (mut checked, mut failed, mut certified) = (0, 0, 0);
    while checked < 500 {
        let code = random_code(&mut rng, FAMILY);
        let x = random_codeword(&code, &mut rng, false).unwrap();
        let llr = random_llr(&code, &x, &mut rng);
        let h = rng.random_range(1..=2);
        let i = rng.random_range(2..=code.d_star());
        let omega = random_omega(&mut rng, h, 1);
        let trees: Vec<PathPrefixTree> = (0..code.num_vars())
            .map(|root| PathPrefixTree::build(code.graph(), Node::Var(root), 2 * h).unwrap())
            .collect();
        if trees
            .iter()
            .any(|t| count_i_trees(t, i).unwrap() > ITREE_LIMIT)
        {
            continue;
        }
        let base = inner(llr.values(), &x.to_scalars::<Rational>());
        let brute: Vec<Rational> = trees
            .iter()
            .map(|tree| {
                enumerate_i_trees_with_budget(tree, i, ITREE_LIMIT)
                    .unwrap()
                    .iter()
                    .map(|t| {
                        let beta = WeightedTree::of_itree(tree, t, &omega)
                            .unwrap()
                            .project(code.num_vars());
                        inner(llr.values(), &relative_point(&x, &beta).unwrap()) - &base
                    })
                    .min()
                    .unwrap()
            })
            .collect();
        let options = CertifyOptions {
            witness: false,
            ..CertifyOptions::default()
        };
        let report = certify_with(&code, &x, &llr, h, &omega, i, options).unwrap();
        let brute_min = brute.iter().min().unwrap().clone();
        let agree = report.root_costs == brute
            && report.min_cost == brute_min
            && report.certified == (brute_min > Rational::zero());
        checked += 1;
        certified += usize::from(report.certified);
        if !agree {
            failed += 1;
            eprintln!(
                "certifier mismatch: code {:?} x {x} report {}",
                code.graph().checks(),
                report.to_json()
            );
        }
    }
    outcome(
        failed == 0,
        format!("{checked} instances ({certified} certified), {failed} mismatches"),
    )
}

/// Randomized suite shared by the implication criteria.
fn implication_suite() -> Vec<tanner_core::TrialRecord> {
    let codes = [
        "irregular:n=14,codes=hamming7*4",
        "irregular:n=9,codes=rep3*6",
        "irregular:n=16,codes=exthamming8*4",
        "irregular:n=12,codes=hamming7*2+rep3*2+parity4",
        "regular:dv=2,dc=3,n=12",
        "regular:dv=3,dc=6,n=12",
    ];
    let channels = [
        ChannelSpec::bsc(0.04, 1000).unwrap(),
        ChannelSpec::awgn(0.6, 1000).unwrap(),
    ];
    let omegas = ["uniform:1", "geometric:1/2", "1,1/3,2/3"];
    let mut records = Vec::new();
    let mut seed = 0x7e57u64;
    for code in codes {
        for channel in &channels {
            for h in 1..=3 {
                seed += 1;
                let mut cfg = ExperimentConfig::new(
                    CodeSource::Generated(GeneratorSpec::parse(code).unwrap()),
                    *channel,
                );
                cfg.fresh_code = true;
                cfg.codeword = CodewordMode::Random;
                cfg.h = h;
                cfg.omega = OmegaSchedule::parse(omegas[h - 1]).unwrap();
                cfg.i = IChoice::Random;
                cfg.m_sweep = vec![1, 2, 3];
                cfg.trials = 30;
                cfg.seed = seed;
                let experiment = run_experiment(&cfg).unwrap();
                records.extend(experiment.records);
            }
        }
    }
    records
}

fn ml_implication(records: &[tanner_core::TrialRecord]) -> Outcome {
    let checked = records.iter().filter(|r| r.ml_unique.is_some()).count();
    let certified = records
        .iter()
        .filter(|r| r.certified && r.ml_unique.is_some())
        .count();
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    let violations = records.iter().filter(|r| r.ml_violation).count();
    let max_n = records.iter().map(|r| r.num_vars).max().unwrap_or(0);
    outcome(
        checked >= 1000 && errors == 0 && violations == 0 && max_n <= 24,
        format!("{checked} trials ({certified} certified, N <= {max_n}), {violations} violations, {errors} errors"),
    )
}

fn cover_implication(records: &[tanner_core::TrialRecord]) -> Outcome {
    let trials = records
        .iter()
        .filter(|r| r.covers.iter().any(|c| c.m >= 2))
        .count();
    let base_certified: usize = records
        .iter()
        .flat_map(|r| &r.covers)
        .filter(|c| c.m >= 2 && c.base_certified)
        .count();
    let violations = records
        .iter()
        .flat_map(|r| &r.covers)
        .filter(|c| c.m >= 2 && c.violation)
        .count();
    outcome(
        trials >= 300 && violations == 0,
        format!("{trials} trials, {base_certified} certified base pairs over M in {{2,3}}, {violations} violations"),
    )
}

fn lp_implication(records: &[tanner_core::TrialRecord]) -> Outcome {
    let mut parts = Vec::new();
    let mut at_three = usize::MAX;
    for m in 1..=3 {
        let verdicts: Vec<_> = records
            .iter()
            .flat_map(|r| &r.lp_sweep)
            .filter(|t| t.m == m)
            .collect();
        let certified = verdicts.iter().filter(|t| t.certified).count();
        let violations = verdicts.iter().filter(|t| t.violation).count();
        parts.push(format!("M={m}: {violations}/{certified}"));
        if m == 3 {
            at_three = violations;
        }
    }
    for r in records
        .iter()
        .filter(|r| r.lp_sweep.iter().any(|t| t.violation))
    {
        eprintln!(
            "LP implication violation: {}",
            serde_json::to_string(r).unwrap()
        );
    }
    outcome(
        at_three == 0,
        format!("violations/certified {}", parts.join(", ")),
    )
}

fn lp_sanity(records: &[tanner_core::TrialRecord]) -> Outcome {
    let both = records
        .iter()
        .filter(|r| r.lp_value.is_some() && r.ml_value.is_some())
        .count();
    let integral = records
        .iter()
        .filter(|r| r.lp_integral == Some(true))
        .count();
    let fractional = records
        .iter()
        .filter(|r| r.lp_integral == Some(false))
        .count();
    let violations = records.iter().filter(|r| r.lp_ml_violation).count();
    outcome(
        both == records.len() && violations == 0,
        format!("{both} trials ({integral} integral, {fractional} fractional optima), {violations} violations"),
    )
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let cov: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    cov / var
}

fn scaling() -> Outcome {
    let started = Instant::now();
    let sizes = [
        (6_000, 2),
        (12_000, 2),
        (12_000, 4),
        (24_000, 4),
        (24_000, 8),
        (48_000, 8),
        (48_000, 16),
    ];
    let options = CertifyOptions {
        witness: false,
        ..CertifyOptions::default()
    };
    let mut points = Vec::new();
    for (k, &(n, h)) in sizes.iter().enumerate() {
        let code = generate_code(&GeneratorSpec::Regular { dv: 2, dc: 3, n }, k as u64).unwrap();
        let x = Assignment::zeros(n);
        let llr: LlrVector<f64> = transmit(
            &code,
            &x,
            &ChannelSpec::bsc(0.05, 1_000_000).unwrap(),
            k as u64,
        )
        .unwrap();
        let omega = vec![1.0; h];
        let best = (0..5)
            .map(|_| {
                let t = Instant::now();
                certify_with(&code, &x, &llr, h, &omega, 2, options).unwrap();
                t.elapsed()
            })
            .min()
            .unwrap();
        let work = (code.graph().num_edges() * h) as f64;
        points.push((work.ln(), best.as_secs_f64().ln()));
    }
    let slope = least_squares_slope(&points);
    let span = (points.last().unwrap().0 - points[0].0).exp();
    let elapsed = started.elapsed();
    outcome(
        (0.8..=1.2).contains(&slope) && span >= 16.0 && elapsed < Duration::from_secs(300),
        format!(
            "exponent {slope:.3} over a {span:.0}x sweep of |E|*h, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "prefix-tree decomposition exact", prefix_decomposition()),
        (2, "i-tree expectation exact", itree_expectation()),
        (3, "codeword expectation exact", codeword_expectation()),
        (4, "certifier matches brute force", certifier_oracle()),
    ];
    let records = implication_suite();
    results.push((
        5,
        "certified implies unique ML codeword",
        ml_implication(&records),
    ));
    results.push((
        6,
        "certificates survive M-covers",
        cover_implication(&records),
    ));
    results.push((
        7,
        "certified implies unique integral LP optimum",
        lp_implication(&records),
    ));
    results.push((8, "LP value at most ML value", lp_sanity(&records)));
    results.push((9, "certifier time linear in |E|*h", scaling()));
    let mut all = true;
    for (n, name, o) in &results {
        all &= o.pass;
        println!(
            "[{}] criterion {n}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
