//! Generalized Tanner codes: local-optimality certificates computed by
//! message passing on computation trees, exact LP and ML decoding, and
//! exhaustive checks of the codeword decomposition identities behind them.
//!
//! The numeric core is generic over [`Scalar`]; [`Rational`] is the exact
//! instantiation used for every verdict, `f64` the fast approximate one.

pub mod certifier;
pub mod channel;
pub mod code;
pub mod codefile;
pub mod cover;
pub mod decoders;
pub mod error;
pub mod harness;
pub mod lab;
pub mod lp;
pub mod omega;
pub mod scalar;
pub mod tree;

pub use certifier::{
    certify, certify_with, min_cost_tree, relative_costs, CertificateReport, CertifyOptions,
};
pub use channel::{transmit, ChannelKind, ChannelSpec, LlrVector};
pub use code::{relative_point, Assignment, LocalCode, Node, TannerCode, TannerGraph};
pub use codefile::{parse_code, write_code};
pub use cover::{check_cover_optimality, lift, project_down, random_cover, CoverReport, MCover};
pub use decoders::{lp_decode, lp_unique_optimum, ml_decode, LpResult, MlResult};
pub use error::{Error, Result};
pub use harness::{generate_code, run_experiment, ExperimentConfig, GeneratorSpec, TrialRecord};
pub use lab::{
    verify_codeword_expectation, verify_itree_expectation, verify_prefix_decomposition,
    DecompositionReport,
};
pub use omega::OmegaSchedule;
pub use scalar::{Rational, Scalar};
pub use tree::{ITree, PathPrefixTree, WeightedTree};

/// Exact LLR vector.
pub type ExactLlr = LlrVector<Rational>;
/// Floating point LLR vector.
pub type FloatLlr = LlrVector<f64>;
/// Certificate report over exact rationals.
pub type ExactReport = CertificateReport<Rational>;
/// Certificate report over `f64`.
pub type FloatReport = CertificateReport<f64>;
/// Exact LP decoding result.
pub type ExactLpResult = LpResult<Rational>;
/// Exact ML decoding result.
pub type ExactMlResult = MlResult<Rational>;
/// Exact weighted tree.
pub type ExactWeightedTree<'a> = WeightedTree<'a, Rational>;
