//! Coefficient domains.
//!
//! Every algebraic routine in this crate is written against [`Scalar`], a
//! commutative ring with enough structure to build constants, test for zero
//! and invert units. Implementations cover exact integers ([`BigInt`]),
//! rationals ([`BigRational`]), residues modulo `m` ([`Zmod`], which is also
//! the prime-field type when `m` is prime) and double-precision reals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};

pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// The additive identity of the domain `self` lives in.
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// Image of an integer in the domain of `self`.
    fn from_i64_like(&self, n: i64) -> Self;
    fn from_bigint_like(&self, n: &BigInt) -> Self;
    fn vanishes(&self) -> bool;
    /// Multiplicative inverse when `self` is a unit.
    fn inverse(&self) -> Option<Self>;
    /// A unit `u` such that `u * self` is the canonical associate of `self`
    /// (1 in a field, the positive associate in the integers).
    fn normalizing_unit(&self) -> Self;
    /// Whether two elements live in the same domain (same modulus for `Zmod`).
    fn same_domain(&self, _other: &Self) -> bool {
        true
    }
    fn domain_name(&self) -> String;

    fn is_unity(&self) -> bool {
        *self == self.one_like()
    }
}

impl Scalar for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigInt::from(n)
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        n.clone()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inverse(&self) -> Option<Self> {
        if self.abs().is_one() {
            Some(self.clone())
        } else {
            None
        }
    }
    fn normalizing_unit(&self) -> Self {
        if self.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }
    fn domain_name(&self) -> String {
        "Z".into()
    }
}

impl Scalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn normalizing_unit(&self) -> Self {
        Scalar::inverse(self).unwrap_or_else(BigRational::one)
    }
    fn domain_name(&self) -> String {
        "Q".into()
    }
}

impl Scalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn from_i64_like(&self, n: i64) -> Self {
        n as f64
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
    fn vanishes(&self) -> bool {
        *self == 0.0
    }
    fn inverse(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn normalizing_unit(&self) -> Self {
        if *self == 0.0 {
            1.0
        } else {
            1.0 / self
        }
    }
    fn domain_name(&self) -> String {
        "R".into()
    }
}

/// A residue class modulo `modulus` (`modulus >= 2`, below `2^63`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Zmod {
    value: u64,
    modulus: u64,
}

impl Zmod {
    pub fn new(n: i64, modulus: u64) -> Self {
        assert!(modulus >= 2 && modulus < (1 << 63), "modulus out of range");
        let m = modulus as i128;
        let value = (n as i128).rem_euclid(m) as u64;
        Zmod { value, modulus }
    }

    pub fn from_bigint(n: &BigInt, modulus: u64) -> Self {
        let r = n.mod_floor(&BigInt::from(modulus));
        Zmod { value: r.to_u64().expect("residue fits in u64"), modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Representative in `(-m/2, m/2]`.
    pub fn centered(&self) -> i64 {
        if self.value > self.modulus / 2 {
            self.value as i64 - self.modulus as i64
        } else {
            self.value as i64
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Zmod { value: 1 % self.modulus, modulus: self.modulus };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn check(&self, other: &Zmod) {
        assert_eq!(self.modulus, other.modulus, "mixed moduli in Zmod arithmetic");
    }
}

/// Constructor for the prime field `F_p`; elements are [`Zmod`] values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn el(&self, n: i64) -> Zmod {
        Zmod::new(n, self.p)
    }

    pub fn from_bigint(&self, n: &BigInt) -> Zmod {
        Zmod::from_bigint(n, self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = Zmod> + '_ {
        (0..self.p).map(move |v| Zmod { value: v, modulus: self.p })
    }

    /// Whether `a` is a nonzero square.
    pub fn is_square(&self, a: Zmod) -> bool {
        if a.value == 0 {
            return false;
        }
        if self.p == 2 {
            return true;
        }
        a.pow((self.p - 1) / 2).value == 1
    }
}

impl fmt::Display for Zmod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Zmod {
    type Output = Zmod;
    fn add(self, rhs: Zmod) -> Zmod {
        self.check(&rhs);
        let s = self.value as u128 + rhs.value as u128;
        Zmod { value: (s % self.modulus as u128) as u64, modulus: self.modulus }
    }
}

impl Sub for Zmod {
    type Output = Zmod;
    fn sub(self, rhs: Zmod) -> Zmod {
        self.check(&rhs);
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.modulus - (rhs.value - self.value)
        };
        Zmod { value: v, modulus: self.modulus }
    }
}

impl Mul for Zmod {
    type Output = Zmod;
    fn mul(self, rhs: Zmod) -> Zmod {
        self.check(&rhs);
        let prod = self.value as u128 * rhs.value as u128;
        Zmod { value: (prod % self.modulus as u128) as u64, modulus: self.modulus }
    }
}

impl Neg for Zmod {
    type Output = Zmod;
    fn neg(self) -> Zmod {
        if self.value == 0 {
            self
        } else {
            Zmod { value: self.modulus - self.value, modulus: self.modulus }
        }
    }
}

impl Scalar for Zmod {
    fn zero_like(&self) -> Self {
        Zmod { value: 0, modulus: self.modulus }
    }
    fn one_like(&self) -> Self {
        Zmod { value: 1, modulus: self.modulus }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Zmod::new(n, self.modulus)
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        Zmod::from_bigint(n, self.modulus)
    }
    fn vanishes(&self) -> bool {
        self.value == 0
    }
    fn inverse(&self) -> Option<Self> {
        let (g, x, _) = ext_gcd(self.value as i128, self.modulus as i128);
        if g != 1 {
            return None;
        }
        Some(Zmod { value: x.rem_euclid(self.modulus as i128) as u64, modulus: self.modulus })
    }
    fn normalizing_unit(&self) -> Self {
        Scalar::inverse(self).unwrap_or_else(|| self.one_like())
    }
    fn same_domain(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
    fn domain_name(&self) -> String {
        format!("Z/{}Z", self.modulus)
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Exact rational from a finite double (every finite `f64` is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Nearest double to a rational.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        let a = f.el(3);
        let b = f.el(5);
        assert_eq!((a + b).value(), 1);
        assert_eq!((a - b).value(), 5);
        assert_eq!((a * b).value(), 1);
        assert_eq!(Scalar::inverse(&a).unwrap().value(), 5);
        assert_eq!((-a).value(), 4);
        assert_eq!(f.el(-1).centered(), -1);
    }

    #[test]
    fn non_units_have_no_inverse() {
        assert!(Scalar::inverse(&Zmod::new(4, 10)).is_none());
        assert!(Scalar::inverse(&BigInt::from(2)).is_none());
        assert_eq!(Scalar::inverse(&BigInt::from(-1)), Some(BigInt::from(-1)));
    }

    #[test]
    fn prime_field_rejects_composites() {
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn squares_mod_eleven() {
        let f = PrimeField::new(11).unwrap();
        let squares: Vec<u64> = f.elements().filter(|&a| f.is_square(a)).map(|a| a.value()).collect();
        assert_eq!(squares, vec![1, 3, 4, 5, 9]);
    }
}
