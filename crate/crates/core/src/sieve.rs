//! Sieve sets at a prime `p > 3`: `W_p` (`p^2 | Delta`), the subset `W_p^(1)`
//! where this holds for mod-`p` reasons, normalization of the remaining pairs
//! and the discriminant-preserving rational element `gamma_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{act, act_raw, invariants, GroupElement, PairOfQuadrics, COORDINATE_LABELS};
use crate::linalg::Matrix;
use crate::local::stabilizer::solve_affine;
use crate::quartic::{repeated_factors_mod_p, RepeatedFactor};
use crate::scalar::{PrimeField, Scalar, Zmod};

fn check_prime(p: u64) -> Result<()> {
    PrimeField::new(p)?;
    if p <= 3 {
        return Err(Error::UnsupportedPrime { prime: p, reason: "sieve sets are defined for p > 3".into() });
    }
    Ok(())
}

/// `Delta` as an exact integer.
pub fn discriminant(pair: &PairOfQuadrics<BigInt>) -> BigInt {
    invariants(pair).disc_integer().expect("27 divides 4I^3 - J^2 for integral pairs")
}

/// `p^2 | Delta`.
pub fn in_wp(pair: &PairOfQuadrics<BigInt>, p: u64) -> Result<bool> {
    check_prime(p)?;
    let p2 = BigInt::from(p * p);
    Ok(discriminant(pair).is_multiple_of(&p2))
}

/// A direction `w` with `Delta(v + p w) != 0 mod p^2`: either `w = 0` or a unit vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Zero,
    Coordinate(usize),
}

impl Direction {
    pub fn label(&self) -> String {
        match self {
            Direction::Zero => "0".into(),
            Direction::Coordinate(t) => COORDINATE_LABELS[*t].into(),
        }
    }

    pub fn shift(&self, pair: &PairOfQuadrics<BigInt>, p: u64) -> PairOfQuadrics<BigInt> {
        match self {
            Direction::Zero => pair.clone(),
            Direction::Coordinate(t) => pair.with_coord(*t, pair.coord(*t) + BigInt::from(p)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wp1Check {
    pub member: bool,
    /// Present exactly when `member` is false.
    pub violating_direction: Option<Direction>,
}

/// Membership in `W_p^(1)` by first-order Taylor expansion: `Delta(v + p w) = Delta(v) +
/// p sum_t w_t D_t (mod p^2)` with `D_t = (Delta(v + p e_t) - Delta(v)) / p`.
pub fn in_wp1_detailed(pair: &PairOfQuadrics<BigInt>, p: u64) -> Result<Wp1Check> {
    check_prime(p)?;
    let pb = BigInt::from(p);
    let p2 = &pb * &pb;
    let base = discriminant(pair);
    if !base.is_multiple_of(&p2) {
        return Ok(Wp1Check { member: false, violating_direction: Some(Direction::Zero) });
    }
    for t in 0..20 {
        let dir = Direction::Coordinate(t);
        let shifted = discriminant(&dir.shift(pair, p));
        let derivative = (&shifted - &base) / &pb;
        if !derivative.is_multiple_of(&pb) {
            return Ok(Wp1Check { member: false, violating_direction: Some(dir) });
        }
    }
    Ok(Wp1Check { member: true, violating_direction: None })
}

pub fn in_wp1(pair: &PairOfQuadrics<BigInt>, p: u64) -> Result<bool> {
    Ok(in_wp1_detailed(pair, p)?.member)
}

/// Normalization conditions: `a12, a13, a14, b11 = 0 mod p` and `a11 = 0 mod p^2`.
pub fn is_normalized(pair: &PairOfQuadrics<BigInt>, p: u64) -> bool {
    let pb = BigInt::from(p);
    let p2 = &pb * &pb;
    pair.a(0, 0).is_multiple_of(&p2)
        && [pair.a(0, 1), pair.a(0, 2), pair.a(0, 3), pair.b(0, 0)].iter().all(|c| c.is_multiple_of(&pb))
}

fn int_matrix(rows: Vec<Vec<i64>>) -> Matrix<BigInt> {
    Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
}

/// Moves a pair of `W_p^(2)` into normalized position by an integral group element.
pub fn normalize_wp2(pair: &PairOfQuadrics<BigInt>, p: u64) -> Result<(GroupElement<BigInt>, PairOfQuadrics<BigInt>)> {
    check_prime(p)?;
    if is_normalized(pair, p) {
        return Ok((GroupElement::identity(&BigInt::zero()), pair.clone()));
    }
    if !in_wp(pair, p)? {
        return Err(Error::NotInWp(p));
    }
    if in_wp1(pair, p)? {
        return Err(Error::InWp1(p));
    }
    let f = pair.resolvent().map(|c| Zmod::from_bigint(c, p));
    if f.is_zero() {
        return Err(Error::NormalizationFailed(p));
    }
    let roots = match repeated_factors_mod_p(&f)? {
        RepeatedFactor::Rational(r) => r,
        RepeatedFactor::NotRational => return Err(Error::RepeatedFactorNotRational(p)),
        RepeatedFactor::None => return Err(Error::NoRepeatedFactor(p)),
    };
    for (x, y) in roots {
        // g2 sends [x : y] to [1 : 0] under f -> f((x, y) g2).
        let g2 = if y.vanishes() {
            int_matrix(vec![vec![1, 0], vec![0, 1]])
        } else {
            int_matrix(vec![vec![x.value() as i64, 1], vec![-1, 0]])
        };
        let step = GroupElement::new(g2.clone(), Matrix::identity(4, &BigInt::zero()))?;
        let moved = act(&step, pair)?;
        if let Some(g4) = isotropic_move(&moved, p) {
            let g = GroupElement::new(g2, g4)?;
            let image = act(&g, pair)?;
            if is_normalized(&image, p) {
                return Ok((g, image));
            }
        }
    }
    Err(Error::NormalizationFailed(p))
}

/// A unimodular `g4` whose first row `v` spans part of `ker(2A) mod p` with
/// `Q_A(v) = 0 mod p^2` and `Q_B(v) = 0 mod p`.
fn isotropic_move(pair: &PairOfQuadrics<BigInt>, p: u64) -> Option<Matrix<BigInt>> {
    let (ma, _) = pair.gram2();
    let eqs: Vec<([Zmod; 4], Zmod)> = (0..4)
        .map(|i| (std::array::from_fn(|j| Zmod::from_bigint(ma.get(i, j), p)), Zmod::new(0, p)))
        .collect();
    let kernel = solve_affine(eqs, p)?;
    let pb = BigInt::from(p);
    let p2 = &pb * &pb;
    for v in kernel {
        // first nonzero entry equal to 1 picks one vector per line
        let Some(lead) = v.iter().position(|c| !c.vanishes()) else { continue };
        if !v[lead].is_unity() {
            continue;
        }
        let lifted: [BigInt; 4] = v.map(|c| BigInt::from(c.value()));
        let (qa, qb) = pair.eval(&lifted);
        if !qa.is_multiple_of(&p2) || !qb.is_multiple_of(&pb) {
            continue;
        }
        let mut rows: Vec<Vec<BigInt>> = vec![lifted.to_vec()];
        for j in (0..4).filter(|&j| j != lead) {
            let mut e = vec![BigInt::zero(); 4];
            e[j] = BigInt::one();
            rows.push(e);
        }
        let mut g4 = Matrix::from_rows(rows.clone());
        if g4.det() != BigInt::one() {
            rows[3] = rows[3].iter().map(|c| -c).collect();
            g4 = Matrix::from_rows(rows);
        }
        debug_assert_eq!(g4.det(), BigInt::one());
        return Some(g4);
    }
    None
}

/// Image under `gamma_p = (diag(1, p), diag(1/p, 1, 1, 1))`.
pub fn apply_gamma_p(pair: &PairOfQuadrics<BigInt>, p: u64) -> Result<PairOfQuadrics<BigInt>> {
    check_prime(p)?;
    let q = |n: i64| BigRational::from_integer(BigInt::from(n));
    let g2 = Matrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(p as i64)]]);
    let mut g4 = Matrix::identity(4, &q(0));
    g4.set(0, 0, BigRational::new(BigInt::one(), BigInt::from(p)));
    let image = act_raw(&g2, &g4, &pair.to_rational());
    for (k, c) in image.coords().iter().enumerate() {
        if !c.is_integer() {
            return Err(Error::NonIntegralImage { coordinate: COORDINATE_LABELS[k].into(), value: c.to_string() });
        }
    }
    Ok(image.to_integral().expect("checked integrality"))
}

/// Sieve data of a pair at one prime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SievePrimeData {
    pub prime: u64,
    pub in_wp: bool,
    pub in_wp1: bool,
    pub in_wp2: bool,
    pub normalizer: Option<String>,
    pub image: Option<String>,
    /// The image lies in `W_p^(1)` with the same discriminant.
    pub gamma_verified: Option<bool>,
}

pub fn sieve_data(pair: &PairOfQuadrics<BigInt>, p: u64) -> Result<SievePrimeData> {
    let wp = in_wp(pair, p)?;
    let wp1 = wp && in_wp1(pair, p)?;
    let wp2 = wp && !wp1;
    let mut data =
        SievePrimeData { prime: p, in_wp: wp, in_wp1: wp1, in_wp2: wp2, normalizer: None, image: None, gamma_verified: None };
    if wp2 {
        if let Ok((g, normalized)) = normalize_wp2(pair, p) {
            data.normalizer = Some(format!("{:?} {:?}", g.g2().entries(), g.g4().entries()).replace('"', ""));
            if let Ok(image) = apply_gamma_p(&normalized, p) {
                let ok = in_wp1(&image, p)? && discriminant(&image) == discriminant(pair);
                data.image = Some(image.to_string());
                data.gamma_verified = Some(ok);
            } else {
                data.gamma_verified = Some(false);
            }
        }
    }
    Ok(data)
}

/// A pair satisfying the normalization conditions, other coordinates uniform in `[-bound, bound]`.
pub fn random_normalized<R: rand::Rng + ?Sized>(rng: &mut R, p: u64, bound: i64) -> PairOfQuadrics<BigInt> {
    let p = p as i64;
    let base = PairOfQuadrics::random(rng, bound);
    let mut pair = base;
    let scale = |pair: &PairOfQuadrics<BigInt>, k: usize, m: i64| pair.with_coord(k, pair.coord(k) * BigInt::from(m));
    pair = scale(&pair, 0, p * p);
    for k in [1, 2, 3, 10] {
        pair = scale(&pair, k, p);
    }
    pair
}
