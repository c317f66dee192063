//! Memoryless binary-input output-symmetric channels producing quantized
//! exact LLR vectors.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::code::{Assignment, TannerCode};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, quantize, Rational, Scalar};

/// Per-variable log-likelihood ratios `ln P(y|0)/P(y|1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> LlrVector<T> {
    /// Wraps values verbatim.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("LLR vector must be non-empty"));
        }
        Ok(LlrVector { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> &T {
        &self.values[v]
    }

    pub fn scaled(&self, factor: &T) -> Self {
        LlrVector {
            values: self
                .values
                .iter()
                .map(|l| l.clone() * factor.clone())
                .collect(),
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.values.len() != n {
            return Err(Error::invalid(format!(
                "LLR vector has length {} but N = {n}",
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// Reads one rational per line (`p/q`, integer or decimal); blank lines and
/// `#` comments are skipped.
pub fn parse_llr_file(text: &str) -> Result<LlrVector<Rational>> {
    let values = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    LlrVector::from_values(values)
}

pub fn write_llr_file<T: Scalar>(llr: &LlrVector<T>) -> String {
    llr.values
        .iter()
        .map(|v| format!("{}\n", v.to_exact_string()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelKind {
    /// Binary symmetric channel with crossover probability `p`.
    Bsc { p: f64 },
    /// Binary-input AWGN, `0 -> +1`, `1 -> -1`, noise deviation `sigma`.
    BiAwgn { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    /// LLRs are rounded to the nearest multiple of `1 / quant_denom`.
    pub quant_denom: u64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, quant_denom: u64) -> Result<Self> {
        match kind {
            ChannelKind::Bsc { p } if !(p > 0.0 && p < 0.5) => {
                return Err(Error::invalid(format!(
                    "BSC crossover {p} outside (0, 1/2)"
                )))
            }
            ChannelKind::BiAwgn { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                return Err(Error::invalid(format!(
                    "AWGN sigma {sigma} must be positive"
                )))
            }
            _ => {}
        }
        if quant_denom == 0 {
            return Err(Error::invalid("quantization denominator must be >= 1"));
        }
        Ok(ChannelSpec { kind, quant_denom })
    }

    pub fn bsc(p: f64, quant_denom: u64) -> Result<Self> {
        Self::new(ChannelKind::Bsc { p }, quant_denom)
    }

    pub fn awgn(sigma: f64, quant_denom: u64) -> Result<Self> {
        Self::new(ChannelKind::BiAwgn { sigma }, quant_denom)
    }

    /// Parses `bsc:p=0.1` or `awgn:sigma=0.8`.
    pub fn parse(text: &str, quant_denom: u64) -> Result<Self> {
        let bad = || {
            Error::parse(format!(
                "channel must be bsc:p=.. or awgn:sigma=.., got {text:?}"
            ))
        };
        let (name, param) = text.trim().split_once(':').ok_or_else(bad)?;
        let (key, value) = param.split_once('=').ok_or_else(bad)?;
        let value = f64::from_str(value.trim()).map_err(|_| bad())?;
        match (name.trim(), key.trim()) {
            ("bsc", "p") => Self::bsc(value, quant_denom),
            ("awgn", "sigma") => Self::awgn(value, quant_denom),
            _ => Err(bad()),
        }
    }

    /// Quantized LLR of a single channel output.
    fn llr_of_output(&self, y: f64) -> Result<Rational> {
        match self.kind {
            ChannelKind::Bsc { p } => {
                let magnitude = ((1.0 - p) / p).ln();
                // For the BSC, y is the received bit.
                quantize(
                    if y == 0.0 { magnitude } else { -magnitude },
                    self.quant_denom,
                )
            }
            ChannelKind::BiAwgn { sigma } => quantize(2.0 * y / (sigma * sigma), self.quant_denom),
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ChannelKind::Bsc { p } => write!(f, "bsc:p={p}"),
            ChannelKind::BiAwgn { sigma } => write!(f, "awgn:sigma={sigma}"),
        }
    }
}

/// Sends codeword `x` through the channel and returns the quantized LLRs of
/// the received word.
pub fn transmit<T: Scalar>(
    code: &TannerCode,
    x: &Assignment,
    spec: &ChannelSpec,
    seed: u64,
) -> Result<LlrVector<T>> {
    if !code.is_codeword(x)? {
        return Err(Error::invalid("transmit requires a codeword"));
    }
    let outputs = channel_outputs(x, spec, seed)?;
    let values = outputs
        .into_iter()
        .map(|y| spec.llr_of_output(y).map(|l| T::from_rational(&l)))
        .collect::<Result<Vec<_>>>()?;
    LlrVector::from_values(values)
}

/// Raw channel outputs: received bits for the BSC, real samples for AWGN.
pub fn channel_outputs(x: &Assignment, spec: &ChannelSpec, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec.kind {
        ChannelKind::Bsc { p } => Ok(x
            .bits()
            .iter()
            .map(|&b| {
                let flip = rng.random_bool(p);
                f64::from(b ^ u8::from(flip))
            })
            .collect()),
        ChannelKind::BiAwgn { sigma } => {
            let noise = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
            Ok(x.bits()
                .iter()
                .map(|&b| if b == 0 { 1.0 } else { -1.0 } + noise.sample(&mut rng))
                .collect())
        }
    }
}
