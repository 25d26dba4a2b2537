use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::quartic::BinaryQuartic;
use crate::scalar::{PrimeField, Scalar, Zmod};

/// An affine point, or `None` for the point at infinity.
pub type CurvePoint = Option<(Zmod, Zmod)>;

/// `y^2 = x^3 + a2 x^2 + a4 x + a6` over `F_p`, `p` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpCurve {
    p: u64,
    a2: Zmod,
    a4: Zmod,
    a6: Zmod,
}

impl FpCurve {
    pub fn new(p: u64, a2: i64, a4: i64, a6: i64) -> Result<Self> {
        let f = PrimeField::new(p)?;
        if p == 2 {
            return Err(Error::UnsupportedPrime { prime: 2, reason: "characteristic 2".into() });
        }
        let curve = FpCurve { p, a2: f.el(a2), a4: f.el(a4), a6: f.el(a6) };
        if curve.cubic_discriminant().vanishes() {
            return Err(Error::DegenerateCurve(p));
        }
        Ok(curve)
    }

    fn from_zmod(p: u64, a2: Zmod, a4: Zmod, a6: Zmod) -> Result<Self> {
        let curve = FpCurve { p, a2, a4, a6 };
        if curve.cubic_discriminant().vanishes() {
            return Err(Error::DegenerateCurve(p));
        }
        Ok(curve)
    }

    /// `y^2 = x^3 - (I/3) x - J/27` for `p > 3`.
    pub fn from_invariants(i: &BigInt, j: &BigInt, p: u64) -> Result<Self> {
        let f = PrimeField::new(p)?;
        if p <= 3 {
            return Err(Error::UnsupportedPrime { prime: p, reason: "the short model needs p > 3".into() });
        }
        let a4 = -(f.from_bigint(i) * f.el(3).inverse().unwrap());
        let a6 = -(f.from_bigint(j) * f.el(27).inverse().unwrap());
        Self::from_zmod(p, f.el(0), a4, a6)
    }

    /// Jacobian of `y^2 = f(x, z)`: `y^2 = x^3 + c x^2 + (bd - 4ae) x + (b^2 e + a d^2 - 4ace)`.
    /// It has `c4 = 16 I(f)` and `c6 = 32 J(f)`, so it agrees with the short model
    /// whenever `p > 3`, and it stays valid at `p = 3`.
    pub fn jacobian_of_quartic(f: &BinaryQuartic<Zmod>) -> Result<Self> {
        let p = f.a().modulus();
        PrimeField::new(p)?;
        if p == 2 {
            return Err(Error::UnsupportedPrime { prime: 2, reason: "characteristic 2".into() });
        }
        let [a, b, c, d, e] = *f.coeffs();
        let four = Zmod::new(4, p);
        Self::from_zmod(p, c, b * d - four * a * e, b * b * e + a * d * d - four * a * c * e)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coefficients(&self) -> (u64, u64, u64) {
        (self.a2.value(), self.a4.value(), self.a6.value())
    }

    fn cubic_discriminant(&self) -> Zmod {
        let (a2, a4, a6) = (self.a2, self.a4, self.a6);
        let k = |n: i64| Zmod::new(n, self.p);
        a2 * a2 * a4 * a4 - k(4) * a4 * a4 * a4 - k(4) * a2 * a2 * a2 * a6 - k(27) * a6 * a6
            + k(18) * a2 * a4 * a6
    }

    fn rhs(&self, x: Zmod) -> Zmod {
        ((x + self.a2) * x + self.a4) * x + self.a6
    }

    pub fn contains(&self, pt: &CurvePoint) -> bool {
        match pt {
            None => true,
            Some((x, y)) => *y * *y == self.rhs(*x),
        }
    }

    /// All points, starting with infinity.
    pub fn points(&self) -> Vec<CurvePoint> {
        let p = self.p;
        let mut roots: Vec<Vec<Zmod>> = vec![Vec::new(); p as usize];
        for y in 0..p {
            let y = Zmod::new(y as i64, p);
            roots[(y * y).value() as usize].push(y);
        }
        let mut out = vec![None];
        for x in 0..p {
            let x = Zmod::new(x as i64, p);
            for y in &roots[self.rhs(x).value() as usize] {
                out.push(Some((x, *y)));
            }
        }
        out
    }

    pub fn neg(&self, pt: &CurvePoint) -> CurvePoint {
        pt.map(|(x, y)| (x, -y))
    }

    pub fn add(&self, p1: &CurvePoint, p2: &CurvePoint) -> CurvePoint {
        let (Some((x1, y1)), Some((x2, y2))) = (p1, p2) else {
            return p1.or(*p2);
        };
        let k = |n: i64| Zmod::new(n, self.p);
        let slope = if x1 != x2 {
            (*y2 - *y1) * (*x2 - *x1).inverse().unwrap()
        } else if *y1 == -*y2 {
            return None;
        } else {
            (k(3) * *x1 * *x1 + k(2) * self.a2 * *x1 + self.a4) * (k(2) * *y1).inverse().unwrap()
        };
        let x3 = slope * slope - self.a2 - *x1 - *x2;
        let y3 = slope * (*x1 - x3) - *y1;
        Some((x3, y3))
    }

    pub fn double(&self, pt: &CurvePoint) -> CurvePoint {
        self.add(pt, pt)
    }
}

/// `#E(F_p)[4]`: points `P` with `4P = O`.
pub fn curve_four_torsion(curve: &FpCurve) -> u64 {
    curve.points().iter().filter(|pt| curve.double(&curve.double(pt)).is_none()).count() as u64
}
