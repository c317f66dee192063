#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tanner_core::harness::GeneratorSpec;
use tanner_core::{generate_code, Assignment, LlrVector, Rational, Scalar, TannerCode};

/// Small generated families with every variable degree at least 2.
pub const SPECS: &[&str] = &[
    "regular:dv=2,dc=3,n=6",
    "regular:dv=2,dc=3,n=9",
    "regular:dv=2,dc=4,n=8",
    "irregular:n=9,codes=rep3*6",
    "irregular:n=7,codes=hamming7*2",
];

pub fn small_code(spec: usize, seed: u64) -> TannerCode {
    generate_code(&GeneratorSpec::parse(SPECS[spec]).unwrap(), seed).unwrap()
}

pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::from_ratio(numer, denom)
}

/// A codeword chosen by `seed`; nonzero whenever the code has one.
pub fn pick_codeword(code: &TannerCode, seed: u64) -> Assignment {
    let words = code.codewords(24).unwrap();
    if words.len() == 1 {
        return words[0].clone();
    }
    words[1 + (seed as usize) % (words.len() - 1)].clone()
}

/// LLRs whose relative costs are mostly positive around `x`, as integers
/// over `denom`.
pub fn llr_near(x: &Assignment, seed: u64, denom: i64) -> LlrVector<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = x
        .bits()
        .iter()
        .map(|&b| {
            let mu: i64 = rng.random_range(-2 * denom..=5 * denom);
            q(if b == 0 { mu } else { -mu }, denom)
        })
        .collect();
    LlrVector::from_values(values).unwrap()
}

pub fn to_f64(llr: &LlrVector<Rational>) -> LlrVector<f64> {
    LlrVector::from_values(llr.values().iter().map(Scalar::to_f64).collect()).unwrap()
}

/// Weight vector with entries `k / denom`, `k` drawn from `lo..=denom`.
pub fn omega(h: usize, lo: i64, denom: i64, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..h)
        .map(|_| q(rng.random_range(lo..=denom), denom))
        .collect()
}
