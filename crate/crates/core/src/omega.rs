//! Weight schedules `ω = (ω_1, ..., ω_h)`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum OmegaSchedule {
    /// `ω_t = c` for every level.
    Uniform(Rational),
    /// `ω_t = ρ^(t-1)`.
    Geometric(Rational),
    Explicit(Vec<Rational>),
}

impl OmegaSchedule {
    /// Parses `uniform:c`, `geometric:ρ` or a comma-separated list.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(c) = text.strip_prefix("uniform:") {
            return Ok(OmegaSchedule::Uniform(parse_rational(c)?));
        }
        if let Some(rho) = text.strip_prefix("geometric:") {
            return Ok(OmegaSchedule::Geometric(parse_rational(rho)?));
        }
        let values = text
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        Ok(OmegaSchedule::Explicit(values))
    }

    /// The weight vector for height parameter `h`.
    pub fn weights(&self, h: usize) -> Result<Vec<Rational>> {
        let values = match self {
            OmegaSchedule::Uniform(c) => vec![c.clone(); h],
            OmegaSchedule::Geometric(rho) => {
                let mut v = Vec::with_capacity(h);
                let mut cur = Rational::one();
                for _ in 0..h {
                    v.push(cur.clone());
                    cur *= rho;
                }
                v
            }
            OmegaSchedule::Explicit(values) => {
                if values.len() != h {
                    return Err(Error::invalid(format!(
                        "explicit schedule has {} entries but h = {h}",
                        values.len()
                    )));
                }
                values.clone()
            }
        };
        Ok(values)
    }

    pub fn weights_as<T: Scalar>(&self, h: usize) -> Result<Vec<T>> {
        Ok(self.weights(h)?.iter().map(T::from_rational).collect())
    }
}

impl fmt::Display for OmegaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSchedule::Uniform(c) => write!(f, "uniform:{c}"),
            OmegaSchedule::Geometric(r) => write!(f, "geometric:{r}"),
            OmegaSchedule::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// Requires every component to lie in `[0, bound]`.
pub fn check_box<T: Scalar>(omega: &[T], bound: &T) -> Result<()> {
    for (t, w) in omega.iter().enumerate() {
        if w.is_negative_strict() || (w.clone() - bound.clone()).is_positive_strict() {
            return Err(Error::invalid(format!(
                "ω_{} = {w} outside [0, {bound}]",
                t + 1
            )));
        }
    }
    Ok(())
}

pub fn is_zero_vector<T: Scalar>(omega: &[T]) -> bool {
    omega.iter().all(|w| w.is_zero_approx())
}

/// Rescales `omega` so that its largest component equals `1 / m`.
pub fn scale_into_box(omega: &[Rational], m: usize) -> Vec<Rational> {
    let max = omega
        .iter()
        .cloned()
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    if max.is_zero() {
        return omega.to_vec();
    }
    let factor = Rational::one() / (max * Rational::from_usize(m));
    omega.iter().map(|w| w * &factor).collect()
}
