//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves `min c·x  s.t.  A x = b, x >= 0`. With an exact scalar the result
//! is exact and Bland's rule guarantees termination on degenerate problems.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Safety cap on pivots; only reachable with inexact scalars.
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm<T> {
    pub rows: Vec<Vec<T>>,
    pub rhs: Vec<T>,
    pub cost: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T: Scalar> StandardForm<T> {
    pub fn new(num_vars: usize) -> Self {
        StandardForm {
            rows: Vec::new(),
            rhs: Vec::new(),
            cost: vec![T::zero(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    /// Adds `Σ coeff·x_j = rhs` from sparse `(j, coeff)` pairs.
    pub fn add_row(&mut self, terms: &[(usize, T)], rhs: T) {
        let mut row = vec![T::zero(); self.num_vars()];
        for (j, a) in terms {
            row[*j] = row[*j].clone() + a.clone();
        }
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> Result<LpOutcome<T>> {
        Tableau::new(self)?.run(self)
    }
}

struct Tableau<T> {
    /// `m` rows of `width + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<T>>,
    /// Reduced costs, last entry is minus the objective value.
    objective: Vec<T>,
    basis: Vec<usize>,
    width: usize,
    num_structural: usize,
}

impl<T: Scalar> Tableau<T> {
    fn new(lp: &StandardForm<T>) -> Result<Self> {
        let m = lp.rows.len();
        let n = lp.num_vars();
        if lp.rhs.len() != m || lp.rows.iter().any(|r| r.len() != n) {
            return Err(Error::internal("malformed linear program"));
        }
        let width = n + m;
        let mut rows = Vec::with_capacity(m);
        for (r, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let flip = b.is_negative_strict();
            let mut t: Vec<T> = Vec::with_capacity(width + 1);
            t.extend(
                row.iter()
                    .map(|a| if flip { -a.clone() } else { a.clone() }),
            );
            t.extend((0..m).map(|k| if k == r { T::one() } else { T::zero() }));
            t.push(if flip { -b.clone() } else { b.clone() });
            rows.push(t);
        }
        // Phase one: minimize the sum of artificials.
        let mut objective = vec![T::zero(); width + 1];
        for row in &rows {
            for j in (0..n).chain(std::iter::once(width)) {
                objective[j] = objective[j].clone() - row[j].clone();
            }
        }
        Ok(Tableau {
            rows,
            objective,
            basis: (n..n + m).collect(),
            width,
            num_structural: n,
        })
    }

    fn run(mut self, lp: &StandardForm<T>) -> Result<LpOutcome<T>> {
        if !self.iterate(self.width)? {
            return Err(Error::internal("phase one cannot be unbounded"));
        }
        if (-self.objective[self.width].clone()).is_positive_strict() {
            return Ok(LpOutcome::Infeasible);
        }
        self.drive_out_artificials();
        self.install_phase_two(&lp.cost);
        if !self.iterate(self.num_structural)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![T::zero(); self.num_structural];
        for (r, &j) in self.basis.iter().enumerate() {
            x[j] = self.rows[r][self.width].clone();
        }
        let value = lp
            .cost
            .iter()
            .zip(&x)
            .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
        Ok(LpOutcome::Optimal { x, value })
    }

    /// Pivots until optimal (`Ok(true)`) or unbounded (`Ok(false)`). Only
    /// columns below `allowed` may enter.
    fn iterate(&mut self, allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| self.objective[j].is_negative_strict()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive_strict() {
                    continue;
                }
                let ratio = row[self.width].clone() / row[col].clone();
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => match ratio.cmp_total(&bratio) {
                        std::cmp::Ordering::Less => Some((r, ratio)),
                        std::cmp::Ordering::Equal if self.basis[r] < self.basis[br] => {
                            Some((r, ratio))
                        }
                        _ => Some((br, bratio)),
                    },
                };
            }
            let Some((row, _)) = best else {
                return Ok(false);
            };
            self.pivot(row, col);
        }
        Err(Error::internal("simplex pivot limit reached"))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = T::one() / self.rows[row][col].clone();
        for a in self.rows[row].iter_mut() {
            if !a.is_zero() {
                *a = a.clone() * inv.clone();
            }
        }
        let support: Vec<usize> = (0..=self.width)
            .filter(|&j| !self.rows[row][j].is_zero())
            .collect();
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for &j in &support {
                other[j] = other[j].clone() - factor.clone() * pivot_row[j].clone();
            }
        }
        if !self.objective[col].is_zero() {
            let factor = self.objective[col].clone();
            for &j in &support {
                self.objective[j] =
                    self.objective[j].clone() - factor.clone() * pivot_row[j].clone();
            }
        }
        self.basis[row] = col;
    }

    /// Removes artificial variables left in the basis at level zero; rows
    /// with no structural entry are redundant and dropped.
    fn drive_out_artificials(&mut self) {
        let n = self.num_structural;
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= n {
                if let Some(col) = (0..n).find(|&j| !self.rows[r][j].is_zero_approx()) {
                    self.pivot(r, col);
                } else {
                    self.rows.remove(r);
                    self.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
    }

    fn install_phase_two(&mut self, cost: &[T]) {
        let mut objective = vec![T::zero(); self.width + 1];
        objective[..self.num_structural].clone_from_slice(cost);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    objective[j] = objective[j].clone() - cb.clone() * a.clone();
                }
            }
        }
        self.objective = objective;
    }
}
