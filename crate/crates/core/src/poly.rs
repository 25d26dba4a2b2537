//! Dense univariate polynomials over a field, with Sturm sequences over `Q`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::scalar::Scalar;

/// Coefficients in increasing degree; no trailing zeros (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.vanishes()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.from_i64_like(i as i64) * c.clone())
            .collect();
        Poly::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    /// Division with remainder; panics if the divisor's leading coefficient is not a unit.
    pub fn div_rem(&self, divisor: &Poly<S>) -> (Poly<S>, Poly<S>) {
        let dl = divisor.leading().expect("division by zero polynomial");
        let inv = dl.inverse().expect("leading coefficient of divisor must be a unit");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            let zero = dl.zero_like();
            return (Poly::new(vec![zero]), self.clone());
        }
        let mut quot = vec![dl.zero_like(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * inv.clone();
            if !c.vanishes() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly<S>) -> Poly<S> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Poly<S> {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inverse().expect("leading coefficient must be a unit");
                Poly::new(self.coeffs.iter().map(|c| c.clone() * inv.clone()).collect())
            }
        }
    }
}

fn sign(q: &BigRational) -> i8 {
    match q.cmp(&BigRational::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Sturm sequence of a nonzero polynomial over `Q`, used for exact real-root counting.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Poly<BigRational>>,
}

impl SturmChain {
    pub fn new(f: &Poly<BigRational>) -> Self {
        assert!(!f.is_zero(), "Sturm chain of the zero polynomial");
        let mut chain = vec![f.clone()];
        let mut prev = f.clone();
        let mut cur = f.derivative();
        while !cur.is_zero() {
            chain.push(cur.clone());
            let (_, r) = prev.div_rem(&cur);
            prev = cur;
            cur = r.neg();
        }
        SturmChain { chain }
    }

    fn changes_at(&self, x: &BigRational) -> usize {
        sign_changes(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    fn changes_at_infinity(&self, positive: bool) -> usize {
        sign_changes(self.chain.iter().map(|p| {
            let lc = sign(p.leading().expect("nonzero chain member"));
            let deg = p.degree().unwrap_or(0);
            if positive || deg % 2 == 0 {
                lc
            } else {
                -lc
            }
        }))
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        self.changes_at_infinity(false) - self.changes_at_infinity(true)
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.changes_at(a) - self.changes_at(b)
    }
}

/// Cauchy bound: every real root lies in `[-bound, bound]`.
pub fn root_bound(f: &Poly<BigRational>) -> BigRational {
    let lc = f.leading().expect("nonzero polynomial").abs();
    let max = f.coeffs().iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero);
    BigRational::from_integer(BigInt::from(1)) + max / lc
}

/// Isolating intervals `(lo, hi]` of width at most `width`, one per distinct real root, in increasing order.
pub fn isolate_real_roots(f: &Poly<BigRational>, width: &BigRational) -> Vec<(BigRational, BigRational)> {
    let chain = SturmChain::new(f);
    let b = root_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    let two = BigRational::from_integer(BigInt::from(2));
    while let Some((lo, hi)) = stack.pop() {
        let n = chain.count_roots_in(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 && &hi - &lo <= *width {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / &two;
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
