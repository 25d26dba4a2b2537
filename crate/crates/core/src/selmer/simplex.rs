//! Exact two-phase simplex over the rationals with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Minimize `c.q` subject to `A q = t`, `q >= 0`.
#[derive(Clone, Debug)]
pub struct StandardLp {
    pub a: Vec<Vec<BigRational>>,
    pub t: Vec<BigRational>,
    pub c: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal {
        value: BigRational,
        x: Vec<BigRational>,
        /// Multipliers `y` with `c - y A >= 0` and `y.t = value`.
        dual: Vec<BigRational>,
        pivots: usize,
    },
    /// `y` with `y A <= 0` and `y.t > 0`.
    Infeasible { certificate: Vec<BigRational> },
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let inv = BigRational::one() / &self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        self.rhs[r] *= &inv;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for j in 0..self.rows[i].len() {
                let d = &f * &self.rows[r][j];
                self.rows[i][j] -= d;
            }
            let d = &f * &self.rhs[r];
            self.rhs[i] -= d;
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    fn reduced_cost(&self, cost: &[BigRational], j: usize) -> BigRational {
        let mut z = cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            z -= &cost[b] * &self.rows[i][j];
        }
        z
    }

    /// Bland's rule over the columns `allowed`; `Err(Unbounded)` on an unbounded ray.
    fn optimize(&mut self, cost: &[BigRational], allowed: usize) -> Result<()> {
        loop {
            let entering = (0..allowed).find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j).is_negative());
            let Some(col) = entering else { return Ok(()) };
            let mut best: Option<(BigRational, usize, usize)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][col];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = best else { return Err(Error::Unbounded) };
            self.pivot(r, col);
        }
    }

    /// `cost_B B^-1`, read off the artificial columns starting at `art`.
    fn duals(&self, cost: &[BigRational], art: usize) -> Vec<BigRational> {
        let m = self.rows.len();
        (0..m)
            .map(|k| {
                let mut y = BigRational::zero();
                for (i, &b) in self.basis.iter().enumerate() {
                    y += &cost[b] * &self.rows[i][art + k];
                }
                y
            })
            .collect()
    }
}

impl StandardLp {
    pub fn solve(&self) -> Result<LpResult> {
        let m = self.a.len();
        let n = self.c.len();
        if self.t.len() != m || self.a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("inconsistent LP dimensions".into()));
        }
        // flip rows so that t >= 0, then append an identity block of artificials
        let signs: Vec<BigRational> =
            self.t.iter().map(|v| if v.is_negative() { -BigRational::one() } else { BigRational::one() }).collect();
        let rows = (0..m)
            .map(|i| {
                let mut row: Vec<BigRational> = self.a[i].iter().map(|v| v * &signs[i]).collect();
                row.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        let rhs = (0..m).map(|i| &self.t[i] * &signs[i]).collect();
        let mut tab = Tableau { rows, rhs, basis: (n..n + m).collect(), pivots: 0 };

        let mut phase1 = vec![BigRational::zero(); n + m];
        for v in phase1.iter_mut().skip(n) {
            *v = BigRational::one();
        }
        tab.optimize(&phase1, n + m)?;
        let infeasibility: BigRational = tab.basis.iter().zip(&tab.rhs).filter(|(b, _)| **b >= n).map(|(_, v)| v.clone()).sum();
        if infeasibility.is_positive() {
            // phase-one duals, mapped back through the row flips
            let y = tab.duals(&phase1, n);
            let certificate = y.iter().zip(&signs).map(|(v, s)| v * s).collect();
            return Ok(LpResult::Infeasible { certificate });
        }
        // drive zero-level artificials out of the basis where possible
        for r in 0..m {
            if tab.basis[r] >= n {
                if let Some(col) = (0..n).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, col);
                }
            }
        }
        let mut phase2 = self.c.clone();
        phase2.extend((0..m).map(|_| BigRational::zero()));
        tab.optimize(&phase2, n)?;
        let mut x = vec![BigRational::zero(); n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < n {
                x[b] = tab.rhs[i].clone();
            }
        }
        let value: BigRational = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        let dual = tab.duals(&phase2, n).iter().zip(&signs).map(|(v, s)| v * s).collect();
        Ok(LpResult::Optimal { value, x, dual, pivots: tab.pivots })
    }

    /// `c - y A >= 0` componentwise.
    pub fn dual_feasible(&self, y: &[BigRational]) -> bool {
        (0..self.c.len()).all(|j| {
            let ya: BigRational = (0..self.a.len()).map(|i| &y[i] * &self.a[i][j]).sum();
            !(&self.c[j] - ya).is_negative()
        })
    }

    pub fn dual_value(&self, y: &[BigRational]) -> BigRational {
        y.iter().zip(&self.t).map(|(a, b)| a * b).sum()
    }

    /// `y A <= 0` and `y.t > 0`.
    pub fn certifies_infeasibility(&self, y: &[BigRational]) -> bool {
        let row_ok = (0..self.c.len()).all(|j| {
            let ya: BigRational = (0..self.a.len()).map(|i| &y[i] * &self.a[i][j]).sum();
            !ya.is_positive()
        });
        row_ok && self.dual_value(y).is_positive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn small_problem() {
        // min x0 + 2 x1 + 3 x2 with x0 + x1 + x2 = 1, x1 - x2 = 0
        let lp = StandardLp {
            a: vec![vec![q(1), q(1), q(1)], vec![q(0), q(1), q(-1)]],
            t: vec![q(1), q(0)],
            c: vec![q(1), q(2), q(3)],
        };
        match lp.solve().unwrap() {
            LpResult::Optimal { value, dual, .. } => {
                assert_eq!(value, q(1));
                assert!(lp.dual_feasible(&dual));
                assert_eq!(lp.dual_value(&dual), q(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_rhs_and_infeasible() {
        let lp = StandardLp { a: vec![vec![q(1), q(1)], vec![q(1), q(1)]], t: vec![q(1), q(-2)], c: vec![q(0), q(0)] };
        match lp.solve().unwrap() {
            LpResult::Infeasible { certificate } => assert!(lp.certifies_infeasibility(&certificate)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let lp = StandardLp { a: vec![vec![q(1), q(-1)]], t: vec![q(0)], c: vec![q(-1), q(0)] };
        assert_eq!(lp.solve(), Err(Error::Unbounded));
    }
}
