//! Sizes attached to a 4-Selmer group of shape `(Z/4)^a x (Z/2)^b` and the
//! extremal linear program over distributions of shapes.

pub mod simplex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use simplex::{LpResult, StandardLp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SelmerShape {
    pub a: u32,
    pub b: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerSizes {
    pub size_s4: u128,
    pub size_s2: u128,
    pub order4: u128,
}

/// `#S4 = 4^a 2^b`, `#S2 = 2^(a+b)`, elements of order 4: `(4^a - 2^a) 2^b`.
pub fn selmer_sizes(s: SelmerShape) -> SelmerSizes {
    let two_a = 1u128 << s.a;
    let two_b = 1u128 << s.b;
    SelmerSizes { size_s4: two_a * two_a * two_b, size_s2: two_a * two_b, order4: (two_a * two_a - two_a) * two_b }
}

/// `5 * 2^a - 8 <= 4^a - 2^a` for `a = 1..=a_max`.
pub fn pointwise_inequality_check(a_max: u32) -> bool {
    (1..=a_max).all(|a| {
        let t = BigInt::from(2).pow(a);
        BigInt::from(5) * &t - 8 <= &t * &t - &t
    })
}

/// Exponents `a` in `1..=a_max` where the pointwise inequality is an equality.
pub fn pointwise_equalities(a_max: u32) -> Vec<u32> {
    (1..=a_max)
        .filter(|&a| {
            let t = BigInt::from(2).pow(a);
            BigInt::from(5) * &t - 8 == &t * &t - &t
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentConstraints {
    /// Target average of `#S2`.
    pub s2_avg: BigRational,
    /// Target average number of elements of order 4.
    pub order4_avg: BigRational,
    pub a_max: u32,
    pub b_max: u32,
}

impl MomentConstraints {
    pub fn new(s2_avg: BigRational, order4_avg: BigRational, a_max: u32, b_max: u32) -> Result<Self> {
        if a_max < 1 || b_max < 1 {
            return Err(Error::InvalidArgument("caps must be at least 1".into()));
        }
        if a_max > 60 || b_max > 60 {
            return Err(Error::InvalidArgument("caps above 60 are not supported".into()));
        }
        if s2_avg.is_negative() || order4_avg.is_negative() {
            return Err(Error::InvalidArgument("targets must be nonnegative".into()));
        }
        Ok(MomentConstraints { s2_avg, order4_avg, a_max, b_max })
    }

    pub fn shapes(&self) -> Vec<SelmerShape> {
        (0..=self.a_max).flat_map(|a| (0..=self.b_max).map(move |b| SelmerShape { a, b })).collect()
    }

    /// Rows: total mass, `E[#S2]`, `E[order-4 count]`; objective `E[2^(a+b) - 2^a]`.
    pub fn program(&self) -> StandardLp {
        let int = |v: u128| BigRational::from_integer(BigInt::from(v));
        let shapes = self.shapes();
        let sizes: Vec<SelmerSizes> = shapes.iter().map(|s| selmer_sizes(*s)).collect();
        let a = vec![
            vec![BigRational::one(); shapes.len()],
            sizes.iter().map(|z| int(z.size_s2)).collect(),
            sizes.iter().map(|z| int(z.order4)).collect(),
        ];
        let c = shapes.iter().zip(&sizes).map(|(s, z)| int(z.size_s2) - int(1u128 << s.a)).collect();
        StandardLp { a, t: vec![BigRational::one(), self.s2_avg.clone(), self.order4_avg.clone()], c }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSolution {
    pub optimum: BigRational,
    /// Shapes with positive mass.
    pub distribution: Vec<(SelmerShape, BigRational)>,
    /// Multipliers for (total mass, `#S2` moment, order-4 moment).
    pub dual: Vec<BigRational>,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtremalOutcome {
    Optimal(ExtremalSolution),
    Infeasible { certificate: Vec<BigRational> },
}

pub fn solve_extremal(c: &MomentConstraints) -> Result<ExtremalOutcome> {
    let lp = c.program();
    match lp.solve()? {
        LpResult::Optimal { value, x, dual, pivots } => {
            let distribution =
                c.shapes().into_iter().zip(x).filter(|(_, m)| !m.is_zero()).collect();
            Ok(ExtremalOutcome::Optimal(ExtremalSolution { optimum: value, distribution, dual, pivots }))
        }
        LpResult::Infeasible { certificate } => Ok(ExtremalOutcome::Infeasible { certificate }),
    }
}

/// Minimum of `E[2^(a+b) - 2^a]` over capped shape distributions with the given moments.
pub fn extremal_bound(c: &MomentConstraints) -> Result<ExtremalSolution> {
    match solve_extremal(c)? {
        ExtremalOutcome::Optimal(s) => Ok(s),
        ExtremalOutcome::Infeasible { .. } => Err(Error::Infeasible),
    }
}

/// The hand argument as dual multipliers: `2^a <= (8 + order4) / 5` gives
/// `E[2^(a+b) - 2^a] >= E[#S2] - 8/5 - E[order4] / 5`.
pub fn hand_argument_dual() -> Vec<BigRational> {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    vec![r(-8, 5), r(1, 1), r(-1, 5)]
}

/// Optimum for targets `(3, 4)` when `a_max >= 2`: `3 (2^B - 1) / (5 * 2^B - 8)` with `B = b_max`;
/// it decreases to `3/5` as `B` grows.
pub fn capped_optimum_closed_form(b_max: u32) -> BigRational {
    let t = BigInt::from(2).pow(b_max);
    BigRational::new(BigInt::from(3) * (&t - 1), BigInt::from(5) * &t - 8)
}
