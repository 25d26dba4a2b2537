//! Binary quartic forms `a x^4 + b x^3 y + c x^2 y^2 + d x y^3 + e y^4`:
//! the invariants `I`, `J`, discriminant, height, rational linear factors,
//! exact real-root classification and roots over prime fields.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::divisors;
use crate::error::{Error, Result};
use crate::linalg::det_division_free;
use crate::poly::{Poly, SturmChain};
use crate::scalar::{Scalar, Zmod};

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryQuartic<S> {
    coeffs: [S; 5],
}

impl<S: Scalar> BinaryQuartic<S> {
    pub fn new(a: S, b: S, c: S, d: S, e: S) -> Self {
        BinaryQuartic { coeffs: [a, b, c, d, e] }
    }

    pub fn from_coeffs(coeffs: [S; 5]) -> Self {
        BinaryQuartic { coeffs }
    }

    pub fn coeffs(&self) -> &[S; 5] {
        &self.coeffs
    }

    pub fn a(&self) -> &S {
        &self.coeffs[0]
    }
    pub fn b(&self) -> &S {
        &self.coeffs[1]
    }
    pub fn c(&self) -> &S {
        &self.coeffs[2]
    }
    pub fn d(&self) -> &S {
        &self.coeffs[3]
    }
    pub fn e(&self) -> &S {
        &self.coeffs[4]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.vanishes())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BinaryQuartic<T> {
        BinaryQuartic { coeffs: [f(&self.coeffs[0]), f(&self.coeffs[1]), f(&self.coeffs[2]), f(&self.coeffs[3]), f(&self.coeffs[4])] }
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|c| c.clone() * k.clone())
    }

    pub fn eval(&self, x: &S, y: &S) -> S {
        // Horner in x with powers of y.
        let mut acc = x.zero_like();
        let mut ypow = x.one_like();
        let mut terms = Vec::with_capacity(5);
        for _ in 0..5 {
            terms.push(ypow.clone());
            ypow = ypow * y.clone();
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            acc = acc * x.clone() + c.clone() * terms[k].clone();
        }
        acc
    }

    /// `f((x, y) * g)` for `g = [[r, s], [t, u]]`, i.e. `f(r x + t y, s x + u y)`.
    pub fn substitute(&self, r: &S, s: &S, t: &S, u: &S) -> Self {
        let zero = r.zero_like();
        let first = [r.clone(), t.clone()];
        let second = [s.clone(), u.clone()];
        let mut out: [S; 5] = std::array::from_fn(|_| zero.clone());
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.vanishes() {
                continue;
            }
            // c * X^(4-k) * Y^k
            let mut prod = vec![c.clone()];
            for _ in 0..(4 - k) {
                prod = mul_linear(&prod, &first);
            }
            for _ in 0..k {
                prod = mul_linear(&prod, &second);
            }
            for (i, p) in prod.into_iter().enumerate() {
                out[i] = out[i].clone() + p;
            }
        }
        BinaryQuartic { coeffs: out }
    }

    /// `(I, J)` from the classical formulas, over any domain.
    pub fn invariants_raw(&self) -> (S, S) {
        let [a, b, c, d, e] = self.coeffs.clone();
        let k = |n: i64| a.from_i64_like(n);
        let i = k(12) * a.clone() * e.clone() - k(3) * b.clone() * d.clone() + c.clone() * c.clone();
        let j = k(72) * a.clone() * c.clone() * e.clone() + k(9) * b.clone() * c.clone() * d.clone()
            - k(27) * a.clone() * d.clone() * d.clone()
            - k(27) * e.clone() * b.clone() * b.clone()
            - k(2) * c.clone() * c.clone() * c;
        (i, j)
    }

    /// Resultant of the two partial derivatives (a pair of binary cubics),
    /// which equals `16 * disc(f)` identically.
    pub fn partials_resultant(&self) -> S {
        let [a, b, c, d, e] = self.coeffs.clone();
        let k = |n: i64| a.from_i64_like(n);
        // f_x = 4a x^3 + 3b x^2 y + 2c x y^2 + d y^3
        let fx = [k(4) * a.clone(), k(3) * b.clone(), k(2) * c.clone(), d.clone()];
        // f_y = b x^3 + 2c x^2 y + 3d x y^2 + 4e y^3
        let fy = [b, k(2) * c, k(3) * d, k(4) * e];
        let zero = a.zero_like();
        let mut rows = Vec::with_capacity(36);
        for shift in 0..3 {
            for col in 0..6 {
                rows.push(if col >= shift && col - shift < 4 { fx[col - shift].clone() } else { zero.clone() });
            }
        }
        for shift in 0..3 {
            for col in 0..6 {
                rows.push(if col >= shift && col - shift < 4 { fy[col - shift].clone() } else { zero.clone() });
            }
        }
        det_division_free(&rows, 6)
    }

    /// Discriminant as `Res(f_x, f_y) / 16`; needs 2 to be invertible unless over `Z`.
    pub fn discriminant_by_resultant(&self) -> Option<S> {
        let r = self.partials_resultant();
        let inv16 = r.from_i64_like(16).inverse()?;
        Some(r * inv16)
    }

    /// Dehomogenization `f(x, 1)` as a univariate polynomial in `x`.
    pub fn dehomogenize(&self) -> Poly<S> {
        Poly::new(self.coeffs.iter().rev().cloned().collect())
    }
}

fn mul_linear<S: Scalar>(p: &[S], lin: &[S; 2]) -> Vec<S> {
    let zero = lin[0].zero_like();
    let mut out = vec![zero; p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i] = out[i].clone() + c.clone() * lin[0].clone();
        out[i + 1] = out[i + 1].clone() + c.clone() * lin[1].clone();
    }
    out
}

impl<S: Scalar> fmt::Display for BinaryQuartic<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e] = &self.coeffs;
        write!(f, "{a} {b} {c} {d} {e}")
    }
}

impl FromStr for BinaryQuartic<BigInt> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parsed: Vec<BigInt> = s
            .split_whitespace()
            .map(|t| t.parse::<BigInt>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<_>>()?;
        let coeffs: [BigInt; 5] = parsed
            .try_into()
            .map_err(|v: Vec<BigInt>| Error::Parse(format!("expected 5 integers, got {}", v.len())))?;
        Ok(BinaryQuartic { coeffs })
    }
}

/// The invariant pair of an integral form with its scaled discriminant `27 Delta = 4I^3 - J^2`
/// and scaled height `4H = max(4|I|^3, J^2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantPair {
    pub i: BigInt,
    pub j: BigInt,
    pub scaled_disc: BigInt,
    pub scaled_height: BigInt,
}

impl InvariantPair {
    pub fn new(i: BigInt, j: BigInt) -> Self {
        let i3 = &i * &i * &i;
        let j2 = &j * &j;
        let scaled_disc = BigInt::from(4) * &i3 - &j2;
        let four_i3 = BigInt::from(4) * i3.abs();
        let scaled_height = if four_i3 > j2 { four_i3 } else { j2 };
        InvariantPair { i, j, scaled_disc, scaled_height }
    }

    /// `Delta = (4I^3 - J^2) / 27`.
    pub fn disc(&self) -> BigRational {
        BigRational::new(self.scaled_disc.clone(), BigInt::from(27))
    }

    /// `H = max(|I|^3, J^2 / 4)`.
    pub fn height(&self) -> BigRational {
        BigRational::new(self.scaled_height.clone(), BigInt::from(4))
    }

    /// Exact integer discriminant when `27 | 4I^3 - J^2` (always the case for integral pairs).
    pub fn disc_integer(&self) -> Option<BigInt> {
        let (q, r) = self.scaled_disc.div_rem(&BigInt::from(27));
        r.vanishes().then_some(q)
    }
}

/// Invariants of an integral binary quartic.
pub fn quartic_invariants(f: &BinaryQuartic<BigInt>) -> InvariantPair {
    let (i, j) = f.invariants_raw();
    InvariantPair::new(i, j)
}

/// Discriminant of an integral quartic via the resultant of its partials.
pub fn discriminant_resultant(f: &BinaryQuartic<BigInt>) -> BigInt {
    let r = f.partials_resultant();
    let (q, rem) = r.div_rem(&BigInt::from(16));
    debug_assert!(rem.vanishes(), "Res(f_x, f_y) is divisible by 16");
    q
}

/// A root of `f` in `P^1(Q)` in lowest terms with `s >= 0` (and `r = 1` when `s = 0`), if any.
pub fn rational_linear_factor(f: &BinaryQuartic<BigInt>) -> Result<Option<(BigInt, BigInt)>> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    if f.a().vanishes() {
        return Ok(Some((BigInt::one(), BigInt::zero())));
    }
    if f.e().vanishes() {
        return Ok(Some((BigInt::zero(), BigInt::one())));
    }
    // A rational root reduces to a root in P^1(F_p) wherever f mod p is nonzero.
    for p in [3u64, 5, 7, 11, 13] {
        let fp = f.map(|c| Zmod::from_bigint(c, p));
        if !fp.is_zero() && roots_mod_p_unchecked(&fp).is_empty() {
            return Ok(None);
        }
    }
    let ss = divisors(f.a());
    let rs = divisors(f.e());
    for s in &ss {
        for r in &rs {
            if !r.gcd(s).is_unity() {
                continue;
            }
            for r in [r.clone(), -r.clone()] {
                if f.eval(&r, s).vanishes() {
                    return Ok(Some((r, s.clone())));
                }
            }
        }
    }
    Ok(None)
}

/// Primitive integral multiple of a rational quartic (positive content).
pub fn clear_denominators(f: &BinaryQuartic<BigRational>) -> BinaryQuartic<BigInt> {
    let lcm = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = f.map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer());
    let g = ints.coeffs().iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.vanishes() || g.is_unity() {
        ints
    } else {
        ints.map(|c| c / &g)
    }
}

/// Real-root data of a quartic with nonzero discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarticClassification {
    /// Number of complex-conjugate root pairs; `None` when the discriminant vanishes.
    pub real_class: Option<u8>,
    pub has_rational_linear_factor: bool,
    pub disc_is_zero: bool,
}

/// Number of distinct roots of `f` in `P^1(R)`, counted exactly.
pub fn count_real_projective_roots(f: &BinaryQuartic<BigRational>) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let affine = f.dehomogenize();
    let at_infinity = usize::from(f.a().vanishes());
    let finite = match affine.degree() {
        None | Some(0) => 0,
        Some(_) => SturmChain::new(&affine).count_real_roots(),
    };
    Ok(finite + at_infinity)
}

pub fn real_classification_rational(f: &BinaryQuartic<BigRational>) -> Result<QuarticClassification> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let int_form = clear_denominators(f);
    let disc_is_zero = discriminant_resultant(&int_form).vanishes();
    let has_rational_linear_factor = rational_linear_factor(&int_form)?.is_some();
    let real_class = if disc_is_zero {
        None
    } else {
        let n = count_real_projective_roots(f)?;
        debug_assert!(n % 2 == 0 && n <= 4);
        Some(((4 - n) / 2) as u8)
    };
    Ok(QuarticClassification { real_class, has_rational_linear_factor, disc_is_zero })
}

pub fn real_classification(f: &BinaryQuartic<BigInt>) -> Result<QuarticClassification> {
    real_classification_rational(&f.map(|c| BigRational::from_integer(c.clone())))
}

fn roots_mod_p_unchecked(f: &BinaryQuartic<Zmod>) -> Vec<(Zmod, Zmod)> {
    let m = f.a().modulus();
    let one = Zmod::new(1, m);
    let zero = Zmod::new(0, m);
    let mut roots: Vec<(Zmod, Zmod)> =
        (0..m as i64).map(|x| Zmod::new(x, m)).filter(|x| f.eval(x, &one).vanishes()).map(|x| (x, one)).collect();
    if f.a().vanishes() {
        roots.push((one, zero));
    }
    roots
}

/// Roots in `P^1(F_p)`, normalized as `[x : 1]` (increasing `x`) then `[1 : 0]`.
pub fn roots_mod_p(f: &BinaryQuartic<Zmod>) -> Result<Vec<(Zmod, Zmod)>> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let p = f.a().modulus();
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(roots_mod_p_unchecked(f))
}

/// Repeated linear factors of a quartic over `F_p`.
#[derive(Clone, Debug, PartialEq)]
pub enum RepeatedFactor {
    /// Square-free over the algebraic closure.
    None,
    /// Roots in `P^1(F_p)` of multiplicity at least two.
    Rational(Vec<(Zmod, Zmod)>),
    /// The repeated part has no root over `F_p`.
    NotRational,
}

/// Repeated factors via `gcd(f, f')` on the affine part plus the point at infinity.
pub fn repeated_factors_mod_p(f: &BinaryQuartic<Zmod>) -> Result<RepeatedFactor> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let m = f.a().modulus();
    let one = Zmod::new(1, m);
    let zero = Zmod::new(0, m);
    let mut rational = Vec::new();
    let affine = f.dehomogenize();
    let g = affine.gcd(&affine.derivative());
    let repeated_affine = g.degree().unwrap_or(0) >= 1;
    if repeated_affine {
        for x in 0..m as i64 {
            let x = Zmod::new(x, m);
            if g.eval(&x).vanishes() {
                rational.push((x, one));
            }
        }
    }
    let repeated_infinity = f.a().vanishes() && f.b().vanishes();
    if repeated_infinity {
        rational.push((one, zero));
    }
    if !rational.is_empty() {
        Ok(RepeatedFactor::Rational(rational))
    } else if repeated_affine {
        Ok(RepeatedFactor::NotRational)
    } else {
        Ok(RepeatedFactor::None)
    }
}
