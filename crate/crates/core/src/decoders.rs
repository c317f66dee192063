//! Exhaustive ML decoding and exact LP decoding over the generalized
//! fundamental polytope.
//!
//! The LP uses the extended formulation: besides `z ∈ R^N`, every local-code
//! node `j` carries a convex combination `γ_j` over its local codewords with
//! `z_{V_j} = Σ_w γ_{j,w} w`. The feasible `z` region is
//! `∩_j conv(C_j)`.

use serde_json::{json, Value};

use crate::channel::LlrVector;
use crate::code::{inner, Assignment, TannerCode, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::lp::{LpOutcome, StandardForm};
use crate::scalar::Scalar;

/// Cap on the total number of local codewords in the LP.
pub const DEFAULT_LP_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MlResult<T> {
    /// Every minimizer of `⟨λ, x⟩`.
    pub best: Vec<Assignment>,
    pub value: T,
    pub unique: bool,
    pub codeword_count: usize,
}

impl<T: Scalar> MlResult<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "best": self.best.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "value": self.value.to_exact_string(),
            "unique": self.unique,
            "codeword_count": self.codeword_count,
        })
    }
}

pub fn ml_decode<T: Scalar>(code: &TannerCode, llr: &LlrVector<T>) -> Result<MlResult<T>> {
    ml_decode_with_cap(code, llr, DEFAULT_ENUMERATION_CAP)
}

pub fn ml_decode_with_cap<T: Scalar>(
    code: &TannerCode,
    llr: &LlrVector<T>,
    cap: usize,
) -> Result<MlResult<T>> {
    llr.check_len(code.num_vars())?;
    let words = code.codewords(cap)?;
    let mut best: Vec<Assignment> = Vec::new();
    let mut value: Option<T> = None;
    for x in &words {
        let cost = x
            .bits()
            .iter()
            .zip(llr.values())
            .filter(|(&b, _)| b == 1)
            .fold(T::zero(), |acc, (_, l)| acc + l.clone());
        match value.as_ref().map(|v| (cost.clone() - v.clone()).sign()) {
            None | Some(std::cmp::Ordering::Less) => {
                value = Some(cost);
                best.clear();
                best.push(x.clone());
            }
            Some(std::cmp::Ordering::Equal) => best.push(x.clone()),
            Some(std::cmp::Ordering::Greater) => {}
        }
    }
    let value = value.ok_or_else(|| Error::internal("code has no codewords"))?;
    Ok(MlResult {
        unique: best.len() == 1,
        best,
        value,
        codeword_count: words.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult<T> {
    pub z: Vec<T>,
    pub value: T,
    /// Every `z_v ∈ {0, 1}`.
    pub integral: bool,
    /// The optimum is the only optimal point in `z`-space.
    pub unique: bool,
    /// Fractional optimum. When `unique` also holds this is a vertex of the
    /// polytope that is not a codeword.
    pub pseudocodeword: bool,
}

impl<T: Scalar> LpResult<T> {
    pub fn as_codeword(&self) -> Option<Assignment> {
        self.integral.then(|| {
            Assignment::new(
                self.z
                    .iter()
                    .map(|v| u8::from(v.is_positive_strict()))
                    .collect(),
            )
            .expect("integral")
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "z": self.z.iter().map(Scalar::to_exact_string).collect::<Vec<_>>(),
            "value": self.value.to_exact_string(),
            "integral": self.integral,
            "unique": self.unique,
            "pseudocodeword": self.pseudocodeword,
        })
    }
}

/// Column layout of the extended formulation.
struct Layout {
    n: usize,
    /// First γ column of each local-code node.
    gamma_start: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(code: &TannerCode, budget: usize) -> Result<Self> {
        let n = code.num_vars();
        let mut gamma_start = Vec::with_capacity(code.num_checks());
        let mut total = n;
        for local in code.local_codes() {
            gamma_start.push(total);
            total += local.words().len();
        }
        if total - n > budget {
            return Err(Error::budget(format!(
                "{} local codewords exceed LP budget {budget}",
                total - n
            )));
        }
        Ok(Layout {
            n,
            gamma_start,
            total,
        })
    }
}

/// Constraints `z ∈ P` in extended form with objective `⟨λ, z⟩`.
fn polytope_lp<T: Scalar>(code: &TannerCode, layout: &Layout, objective: &[T]) -> StandardForm<T> {
    let mut lp = StandardForm::new(layout.total);
    lp.cost[..layout.n].clone_from_slice(objective);
    let graph = code.graph();
    for (c, local) in code.local_codes().iter().enumerate() {
        let start = layout.gamma_start[c];
        let terms: Vec<(usize, T)> = (0..local.words().len())
            .map(|w| (start + w, T::one()))
            .collect();
        lp.add_row(&terms, T::one());
        for (k, &v) in graph.check_neighbors(c).iter().enumerate() {
            let mut terms = vec![(v, T::one())];
            for (w_idx, &w) in local.words().iter().enumerate() {
                if w >> k & 1 == 1 {
                    terms.push((start + w_idx, -T::one()));
                }
            }
            lp.add_row(&terms, T::zero());
        }
    }
    lp
}

fn optimum<T: Scalar>(lp: &StandardForm<T>) -> Result<(Vec<T>, T)> {
    match lp.solve()? {
        LpOutcome::Optimal { x, value } => Ok((x, value)),
        LpOutcome::Infeasible => Err(Error::internal(
            "LP over the fundamental polytope is infeasible",
        )),
        LpOutcome::Unbounded => Err(Error::internal("LP over a bounded polytope is unbounded")),
    }
}

/// Residual check of a solution of the extended formulation.
fn check_extended_solution<T: Scalar>(code: &TannerCode, layout: &Layout, x: &[T]) -> Result<()> {
    let graph = code.graph();
    for (c, local) in code.local_codes().iter().enumerate() {
        let start = layout.gamma_start[c];
        let gamma = &x[start..start + local.words().len()];
        if gamma.iter().any(|g| g.is_negative_strict()) {
            return Err(Error::internal(format!(
                "negative γ at local-code node {c}"
            )));
        }
        let mass = gamma.iter().fold(T::zero(), |a, g| a + g.clone());
        if !(mass - T::one()).is_zero_approx() {
            return Err(Error::internal(format!(
                "γ at node {c} does not sum to one"
            )));
        }
        for (k, &v) in graph.check_neighbors(c).iter().enumerate() {
            let combo = local
                .words()
                .iter()
                .zip(gamma)
                .filter(|(&w, _)| w >> k & 1 == 1)
                .fold(T::zero(), |a, (_, g)| a + g.clone());
            if !(combo - x[v].clone()).is_zero_approx() {
                return Err(Error::internal(format!(
                    "z_{v} is not the local combination at node {c}"
                )));
            }
        }
    }
    Ok(())
}

pub fn lp_decode<T: Scalar>(code: &TannerCode, llr: &LlrVector<T>) -> Result<LpResult<T>> {
    lp_decode_with_budget(code, llr, DEFAULT_LP_BUDGET)
}

pub fn lp_decode_with_budget<T: Scalar>(
    code: &TannerCode,
    llr: &LlrVector<T>,
    budget: usize,
) -> Result<LpResult<T>> {
    llr.check_len(code.num_vars())?;
    let layout = Layout::new(code, budget)?;
    let (x, value) = optimum(&polytope_lp(code, &layout, llr.values()))?;
    check_extended_solution(code, &layout, &x)?;
    let z = x[..layout.n].to_vec();
    let integral = z
        .iter()
        .all(|v| v.is_zero_approx() || (v.clone() - T::one()).is_zero_approx());
    let unique = unique_on_face(code, &layout, llr, &z, &value)?;
    Ok(LpResult {
        z,
        value,
        integral,
        unique,
        pseudocodeword: !integral,
    })
}

/// Whether `z_star` is the only LP optimum in `z`-space.
pub fn lp_unique_optimum<T: Scalar>(
    code: &TannerCode,
    llr: &LlrVector<T>,
    z_star: &[T],
) -> Result<bool> {
    llr.check_len(code.num_vars())?;
    if z_star.len() != code.num_vars() {
        return Err(Error::invalid("z* length mismatch"));
    }
    let layout = Layout::new(code, DEFAULT_LP_BUDGET)?;
    let (_, best) = optimum(&polytope_lp(code, &layout, llr.values()))?;
    if !(inner(llr.values(), z_star) - best.clone()).is_zero_approx() {
        return Err(Error::invalid("z* does not attain the LP optimum"));
    }
    let mut membership = polytope_lp(code, &layout, &vec![T::zero(); layout.n]);
    for (v, zv) in z_star.iter().enumerate() {
        membership.add_row(&[(v, T::one())], zv.clone());
    }
    if matches!(membership.solve()?, LpOutcome::Infeasible) {
        return Err(Error::invalid("z* is not in the fundamental polytope"));
    }
    unique_on_face(code, &layout, llr, z_star, &best)
}

/// For integral `z*`, maximizes the L1 distance to `z*` over the optimal face.
/// For fractional `z*`, minimizes and maximizes every coordinate instead.
fn unique_on_face<T: Scalar>(
    code: &TannerCode,
    layout: &Layout,
    llr: &LlrVector<T>,
    z_star: &[T],
    value: &T,
) -> Result<bool> {
    let n = layout.n;
    let face = |objective: Vec<T>| -> Result<T> {
        let mut lp = polytope_lp(code, layout, &objective);
        let terms: Vec<(usize, T)> = llr.values().iter().cloned().enumerate().collect();
        lp.add_row(&terms, value.clone());
        Ok(optimum(&lp)?.1)
    };
    let integral = z_star
        .iter()
        .all(|v| v.is_zero_approx() || (v.clone() - T::one()).is_zero_approx());
    if integral {
        // minimize Σ_{z*=1} z_v - Σ_{z*=0} z_v; distance = |supp z*| - that.
        let objective: Vec<T> = z_star
            .iter()
            .map(|v| {
                if v.is_zero_approx() {
                    -T::one()
                } else {
                    T::one()
                }
            })
            .collect();
        let ones = z_star.iter().filter(|v| !v.is_zero_approx()).count();
        let distance = T::from_usize(ones) - face(objective)?;
        return Ok(distance.is_zero_approx());
    }
    for v in 0..n {
        for sign in [T::one(), -T::one()] {
            let mut objective = vec![T::zero(); n];
            objective[v] = sign.clone();
            let extreme = face(objective)? * sign.clone();
            if !(extreme - z_star[v].clone()).is_zero_approx() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
