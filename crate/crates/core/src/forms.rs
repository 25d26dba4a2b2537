//! Pairs of quaternary quadratic forms, the action of `GL2 x GL4` with the
//! determinant condition, resolvent quartics and invariants.
//!
//! A pair is stored through its integral coordinates: `Q_A(x) = sum_{i<=j} a_ij x_i x_j`,
//! so the Gram matrix has `a_ii` on the diagonal and `a_ij / 2` off it. The
//! doubled Gram matrix `2A` is always integral with even diagonal.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quartic::{discriminant_resultant, quartic_invariants, rational_linear_factor, BinaryQuartic, InvariantPair};
use crate::scalar::Scalar;

/// Coordinate labels in serialization order.
pub const COORDINATE_LABELS: [&str; 20] = [
    "a11", "a12", "a13", "a14", "a22", "a23", "a24", "a33", "a34", "a44", "b11", "b12", "b13", "b14", "b22", "b23",
    "b24", "b33", "b34", "b44",
];

/// Position of `(i, j)` (0-based, any order) among the ten upper-triangular slots.
pub fn slot(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    assert!(j < 4);
    // rows start at 0, 4, 7, 9
    [0, 4, 7, 9][i] + (j - i)
}

/// `(i, j)` for a slot index, inverse of [`slot`].
pub fn slot_indices(k: usize) -> (usize, usize) {
    const TABLE: [(usize, usize); 10] =
        [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];
    TABLE[k]
}

/// Index (0..20) of a label such as `"b23"`.
pub fn coordinate_index(label: &str) -> Result<usize> {
    COORDINATE_LABELS.iter().position(|&l| l == label).ok_or_else(|| Error::UnknownCoordinate(label.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairOfQuadrics<S> {
    a: [S; 10],
    b: [S; 10],
}

impl<S: Scalar> PairOfQuadrics<S> {
    pub fn new(a: [S; 10], b: [S; 10]) -> Self {
        PairOfQuadrics { a, b }
    }

    /// From the 20 coordinates in serialization order.
    pub fn from_coords(coords: [S; 20]) -> Self {
        let mut it = coords.into_iter();
        let a = std::array::from_fn(|_| it.next().unwrap());
        let b = std::array::from_fn(|_| it.next().unwrap());
        PairOfQuadrics { a, b }
    }

    pub fn coords(&self) -> [S; 20] {
        std::array::from_fn(|k| if k < 10 { self.a[k].clone() } else { self.b[k - 10].clone() })
    }

    pub fn coord(&self, k: usize) -> &S {
        if k < 10 {
            &self.a[k]
        } else {
            &self.b[k - 10]
        }
    }

    pub fn with_coord(&self, k: usize, v: S) -> Self {
        let mut out = self.clone();
        if k < 10 {
            out.a[k] = v;
        } else {
            out.b[k - 10] = v;
        }
        out
    }

    pub fn a(&self, i: usize, j: usize) -> &S {
        &self.a[slot(i, j)]
    }

    pub fn b(&self, i: usize, j: usize) -> &S {
        &self.b[slot(i, j)]
    }

    pub fn a_coords(&self) -> &[S; 10] {
        &self.a
    }

    pub fn b_coords(&self) -> &[S; 10] {
        &self.b
    }

    fn witness(&self) -> &S {
        &self.a[0]
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(|c| c.vanishes())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PairOfQuadrics<T> {
        PairOfQuadrics { a: std::array::from_fn(|k| f(&self.a[k])), b: std::array::from_fn(|k| f(&self.b[k])) }
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|c| c.clone() * k.clone())
    }

    /// The doubled Gram matrices `(2A, 2B)`.
    pub fn gram2(&self) -> (Matrix<S>, Matrix<S>) {
        (doubled_gram(&self.a), doubled_gram(&self.b))
    }

    /// Diagonal pair with `Q_A = sum a_i x_i^2`, `Q_B = sum b_i x_i^2`.
    pub fn diagonal(a: [S; 4], b: [S; 4]) -> Self {
        let zero = a[0].zero_like();
        let mut ac: [S; 10] = std::array::from_fn(|_| zero.clone());
        let mut bc = ac.clone();
        for i in 0..4 {
            ac[slot(i, i)] = a[i].clone();
            bc[slot(i, i)] = b[i].clone();
        }
        PairOfQuadrics { a: ac, b: bc }
    }

    /// `Q_A(x)` and `Q_B(x)`.
    pub fn eval(&self, x: &[S; 4]) -> (S, S) {
        (quadric_value(&self.a, x), quadric_value(&self.b, x))
    }

    /// `det(2A x + 2B y)` as a binary quartic.
    pub fn resolvent(&self) -> BinaryQuartic<S> {
        let (ma, mb) = self.gram2();
        pencil_determinant(&ma, &mb)
    }

    /// Invariants `(I, J)` of the resolvent over the coefficient domain.
    pub fn invariants_raw(&self) -> (S, S) {
        self.resolvent().invariants_raw()
    }

    pub fn domain_compatible(&self, g: &GroupElement<S>) -> bool {
        g.g2.entries().iter().chain(g.g4.entries()).all(|e| e.same_domain(self.witness()))
    }
}

fn doubled_gram<S: Scalar>(c: &[S; 10]) -> Matrix<S> {
    let rows = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let v = c[slot(i, j)].clone();
                    if i == j {
                        v.clone() + v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows)
}

fn quadric_value<S: Scalar>(c: &[S; 10], x: &[S; 4]) -> S {
    let mut acc = x[0].zero_like();
    for (k, coef) in c.iter().enumerate() {
        if coef.vanishes() {
            continue;
        }
        let (i, j) = slot_indices(k);
        acc = acc + coef.clone() * x[i].clone() * x[j].clone();
    }
    acc
}

/// `sum_{k,l} u_k M_kl v_l`.
fn bilinear<S: Scalar>(m: &Matrix<S>, u: &[S], v: &[S]) -> S {
    let mut acc = u[0].zero_like();
    for k in 0..4 {
        if u[k].vanishes() {
            continue;
        }
        for l in 0..4 {
            acc = acc + u[k].clone() * m.get(k, l).clone() * v[l].clone();
        }
    }
    acc
}

/// Coordinates of the congruent quadric `x -> Q(x g)`, with rows of `g`
/// as the new basis; avoids halving so it is valid over any ring.
fn congruence_coords<S: Scalar>(c: &[S; 10], g4: &Matrix<S>) -> [S; 10] {
    let gram = doubled_gram(c);
    std::array::from_fn(|k| {
        let (i, j) = slot_indices(k);
        let (ri, rj) = (g4.row(i), g4.row(j));
        if i == j {
            let v: [S; 4] = std::array::from_fn(|t| ri[t].clone());
            quadric_value(c, &v)
        } else {
            bilinear(&gram, ri, rj)
        }
    })
}

/// `det(M x + N y)` for square matrices, division-free.
pub fn pencil_determinant<S: Scalar>(m: &Matrix<S>, n: &Matrix<S>) -> BinaryQuartic<S> {
    assert_eq!(m.dim(), 4);
    let zero = m.get(0, 0).zero_like();
    // dp[mask] holds a homogeneous form of degree popcount(mask), coefficients of x^{d-k} y^k.
    let mut dp: Vec<Option<Vec<S>>> = vec![None; 16];
    dp[0] = Some(vec![zero.one_like()]);
    for mask in 0usize..16 {
        let row = mask.count_ones() as usize;
        if row >= 4 {
            continue;
        }
        let Some(cur) = dp[mask].clone() else { continue };
        for col in 0..4 {
            if mask & (1 << col) != 0 {
                continue;
            }
            let (alpha, beta) = (m.get(row, col), n.get(row, col));
            if alpha.vanishes() && beta.vanishes() {
                continue;
            }
            let negate = (mask >> (col + 1)).count_ones() % 2 == 1;
            let mut term = vec![zero.clone(); cur.len() + 1];
            for (k, c) in cur.iter().enumerate() {
                term[k] = term[k].clone() + c.clone() * alpha.clone();
                term[k + 1] = term[k + 1].clone() + c.clone() * beta.clone();
            }
            if negate {
                term = term.into_iter().map(|t| -t).collect();
            }
            let next = mask | (1 << col);
            dp[next] = Some(match dp[next].take() {
                Some(v) => v.into_iter().zip(term).map(|(a, b)| a + b).collect(),
                None => term,
            });
        }
    }
    let full = dp[15].clone().unwrap_or_else(|| vec![zero.clone(); 5]);
    BinaryQuartic::from_coeffs(std::array::from_fn(|k| full[k].clone()))
}

impl<S: Scalar> fmt::Display for PairOfQuadrics<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().chain(&self.b).map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

fn parse_twenty<T>(s: &str, parse: impl Fn(&str) -> Option<T>) -> Result<[T; 20]> {
    let tokens: Vec<&str> = s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
    if tokens.len() != 20 {
        return Err(Error::Parse(format!("a pair needs 20 coordinates, got {}", tokens.len())));
    }
    let values: Vec<T> = tokens
        .iter()
        .map(|t| parse(t).ok_or_else(|| Error::Parse(format!("bad coordinate {t:?}"))))
        .collect::<Result<_>>()?;
    Ok(values.try_into().ok().expect("length checked"))
}

impl FromStr for PairOfQuadrics<BigInt> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_twenty(s, |t| t.parse::<BigInt>().ok()).map(PairOfQuadrics::from_coords)
    }
}

impl FromStr for PairOfQuadrics<BigRational> {
    type Err = Error;

    /// Accepts integers and fractions such as `-1/2`.
    fn from_str(s: &str) -> Result<Self> {
        parse_twenty(s, |t| t.parse::<BigRational>().ok()).map(PairOfQuadrics::from_coords)
    }
}

impl PairOfQuadrics<BigRational> {
    /// The pair with integer coordinates, when all coordinates are integral.
    pub fn to_integral(&self) -> Option<PairOfQuadrics<BigInt>> {
        if self.a.iter().chain(&self.b).all(|c| c.is_integer()) {
            Some(self.map(|c| c.to_integer()))
        } else {
            None
        }
    }
}

impl PairOfQuadrics<BigInt> {
    pub fn to_rational(&self) -> PairOfQuadrics<BigRational> {
        self.map(|c| BigRational::from_integer(c.clone()))
    }

    /// Uniform coordinates in `[-bound, bound]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Self {
        PairOfQuadrics::from_coords(std::array::from_fn(|_| BigInt::from(rng.gen_range(-bound..=bound))))
    }
}

/// An element `(g2, g4)` of `GL2 x GL4` with `det(g2) det(g4) = 1`.
#[derive(Clone, Debug)]
pub struct GroupElement<S> {
    g2: Matrix<S>,
    g4: Matrix<S>,
}

impl<S: Scalar> GroupElement<S> {
    pub fn new(g2: Matrix<S>, g4: Matrix<S>) -> Result<Self> {
        assert_eq!(g2.dim(), 2);
        assert_eq!(g4.dim(), 4);
        let d = g2.det() * g4.det();
        if !d.is_unity() {
            return Err(Error::DeterminantCondition(d.to_string()));
        }
        Ok(GroupElement { g2, g4 })
    }

    pub fn identity(like: &S) -> Self {
        GroupElement { g2: Matrix::identity(2, like), g4: Matrix::identity(4, like) }
    }

    /// The element `(lambda^-2 I2, lambda I4)`, trivial in the quotient group.
    pub fn scaling(lambda: &S) -> Result<Self> {
        let inv = lambda.inverse().ok_or(Error::NotInvertible)?;
        let like = lambda.clone();
        Ok(GroupElement {
            g2: Matrix::identity(2, &like).scale(&(inv.clone() * inv)),
            g4: Matrix::identity(4, &like).scale(lambda),
        })
    }

    pub fn g2(&self) -> &Matrix<S> {
        &self.g2
    }

    pub fn g4(&self) -> &Matrix<S> {
        &self.g4
    }

    /// Product `self * other`, acting as `other` first.
    pub fn compose(&self, other: &GroupElement<S>) -> Self {
        GroupElement { g2: self.g2.mul(&other.g2), g4: self.g4.mul(&other.g4) }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(GroupElement {
            g2: self.g2.inverse().ok_or(Error::NotInvertible)?,
            g4: self.g4.inverse().ok_or(Error::NotInvertible)?,
        })
    }

    /// Representative of the class modulo scalings: the first nonzero entry of
    /// `g4` is brought to its canonical associate.
    pub fn canonical(&self) -> Self {
        let Some(first) = self.g4.entries().iter().find(|x| !x.vanishes()) else {
            return self.clone();
        };
        let lambda = first.normalizing_unit();
        let inv = lambda.inverse().expect("normalizing unit is invertible");
        GroupElement { g2: self.g2.scale(&(inv.clone() * inv)), g4: self.g4.scale(&lambda) }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GroupElement<T> {
        GroupElement { g2: self.g2.map(&f), g4: self.g4.map(&f) }
    }
}

impl<S: Scalar> PartialEq for GroupElement<S> {
    fn eq(&self, other: &Self) -> bool {
        let (x, y) = (self.canonical(), other.canonical());
        x.g2 == y.g2 && x.g4 == y.g4
    }
}

/// Action of arbitrary matrices `g2`, `g4` (no determinant condition).
pub fn act_raw<S: Scalar>(g2: &Matrix<S>, g4: &Matrix<S>, p: &PairOfQuadrics<S>) -> PairOfQuadrics<S> {
    let (r, s, t, u) = (g2.get(0, 0), g2.get(0, 1), g2.get(1, 0), g2.get(1, 1));
    let mix = |x: &S, y: &S, k: usize| x.clone() * p.a[k].clone() + y.clone() * p.b[k].clone();
    let a: [S; 10] = std::array::from_fn(|k| mix(r, s, k));
    let b: [S; 10] = std::array::from_fn(|k| mix(t, u, k));
    PairOfQuadrics { a: congruence_coords(&a, g4), b: congruence_coords(&b, g4) }
}

pub fn act<S: Scalar>(g: &GroupElement<S>, p: &PairOfQuadrics<S>) -> Result<PairOfQuadrics<S>> {
    if !p.domain_compatible(g) {
        return Err(Error::DomainMismatch(format!(
            "group element over {}, pair over {}",
            g.g4.get(0, 0).domain_name(),
            p.witness().domain_name()
        )));
    }
    Ok(act_raw(&g.g2, &g.g4, p))
}

pub fn resolvent_quartic<S: Scalar>(p: &PairOfQuadrics<S>) -> BinaryQuartic<S> {
    p.resolvent()
}

pub fn invariants(p: &PairOfQuadrics<BigInt>) -> InvariantPair {
    quartic_invariants(&p.resolvent())
}

/// `det(2A x + 2B y)` of the image equals `det(g4)^2 f((x, y) g2)` for arbitrary matrices.
pub fn twist_identity_raw<S: Scalar>(g2: &Matrix<S>, g4: &Matrix<S>, p: &PairOfQuadrics<S>) -> bool {
    let lhs = act_raw(g2, g4, p).resolvent();
    let d4 = g4.det();
    let rhs = p
        .resolvent()
        .substitute(g2.get(0, 0), g2.get(0, 1), g2.get(1, 0), g2.get(1, 1))
        .scale(&(d4.clone() * d4));
    lhs == rhs
}

pub fn twist_identity_check<S: Scalar>(g: &GroupElement<S>, p: &PairOfQuadrics<S>) -> bool {
    twist_identity_raw(&g.g2, &g.g4, p)
}

/// Nonzero discriminant and no root of the resolvent in `P^1(Q)`.
pub fn is_strongly_irreducible(p: &PairOfQuadrics<BigInt>) -> bool {
    let f = p.resolvent();
    if f.is_zero() || num_traits::Zero::is_zero(&discriminant_resultant(&f)) {
        return false;
    }
    matches!(rational_linear_factor(&f), Ok(None))
}

/// Coordinates forced to vanish by each of the four reducibility conditions.
pub const REDUCIBILITY_CONDITIONS: [&[&str]; 4] = [
    &["a11", "a12", "a13", "a14"],
    &["a11", "a12", "a13", "a22", "a23"],
    &["a11", "a12", "a13", "b11", "b12", "b13"],
    &["a11", "a12", "a22", "b11", "b12", "b22"],
];

/// First reducibility condition (1..=4) met by the pair, if any.
pub fn reducibility_case<S: Scalar>(p: &PairOfQuadrics<S>) -> Option<u8> {
    REDUCIBILITY_CONDITIONS.iter().position(|labels| {
        labels.iter().all(|l| p.coord(coordinate_index(l).expect("static label")).vanishes())
    }).map(|i| i as u8 + 1)
}

/// `Q_A = sum x_i^2`, `Q_B = 2 x1 x2 + 2s x2 x3 + 2 x3 x4`: with `s^2 = -2 mod p`
/// the resolvent is `16 (x^4 + y^4)` modulo `p`.
pub fn witness_sum_of_fourth_powers(s: i64) -> PairOfQuadrics<BigInt> {
    let mut c = [0i64; 20];
    for i in 0..4 {
        c[slot(i, i)] = 1;
    }
    c[10 + slot(0, 1)] = 2;
    c[10 + slot(1, 2)] = 2 * s;
    c[10 + slot(2, 3)] = 2;
    PairOfQuadrics::from_coords(c.map(BigInt::from))
}

/// The pair with `2A`, `2B` equal to the doubled Gram matrices having
/// `(2A)_33 = 1`, `(2A)_24 = (2A)_42 = 1`, `(2B)_11 = -1`, `(2B)_23 = (2B)_32 = 1`,
/// `(2B)_44 = -t`; its resolvent is `x^3 y - t y^4`.
pub fn witness_cubic_twist(t: &BigRational) -> PairOfQuadrics<BigRational> {
    let half = BigRational::new(1.into(), 2.into());
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    let mut a: [BigRational; 10] = std::array::from_fn(|_| zero.clone());
    let mut b = a.clone();
    a[slot(2, 2)] = half.clone();
    a[slot(1, 3)] = one.clone();
    b[slot(0, 0)] = -half.clone();
    b[slot(1, 2)] = one;
    b[slot(3, 3)] = -(t.clone() * half);
    PairOfQuadrics::new(a, b)
}
