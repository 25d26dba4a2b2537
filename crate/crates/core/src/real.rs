//! Real pairs: signature class of the resolvent, simultaneous diagonalization
//! of split pencils, real solubility and the fundamental representatives.

use std::f64::consts::PI;

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::forms::PairOfQuadrics;
use crate::quartic::{count_real_projective_roots, BinaryQuartic};
use crate::scalar::rational_from_f64;

/// Tolerances used by the floating-point paths.
pub mod tolerance {
    /// Relative size of `4I^3 - J^2` against `4H` below which a pair counts as degenerate.
    pub const DEGENERACY: f64 = 1e-10;
    /// Agreement required of round trips and recovered pencils.
    pub const ROUND_TRIP: f64 = 1e-8;
    /// Slack on the angular-gap test for the origin in a planar hull.
    pub const ANGLE: f64 = 1e-12;
}

/// `true` when `4I^3 - J^2` is negligible relative to `max(4|I|^3, J^2)`.
fn nearly_degenerate(f: &BinaryQuartic<f64>) -> bool {
    let (i, j) = f.invariants_raw();
    let scaled_height = (4.0 * i.abs().powi(3)).max(j * j);
    let scaled_disc = 4.0 * i.powi(3) - j * j;
    !(scaled_height > 0.0) || scaled_disc.abs() <= tolerance::DEGENERACY * scaled_height
}

/// Number of complex-conjugate root pairs of the resolvent of a real pair.
pub fn real_class(p: &PairOfQuadrics<f64>) -> Result<u8> {
    let f = p.resolvent();
    if nearly_degenerate(&f) {
        let (i, j) = f.invariants_raw();
        let scale = (4.0 * i.abs().powi(3)).max(j * j);
        let rel = if scale > 0.0 { (4.0 * i.powi(3) - j * j).abs() / scale } else { 0.0 };
        return Err(Error::DegenerateReal(rel));
    }
    // Every finite double is a dyadic rational, so the count below is exact for the
    // computed coefficients.
    let exact = f.map(|c| rational_from_f64(*c).expect("finite coefficient"));
    let n = count_real_projective_roots(&exact)?;
    Ok(((4 - n.min(4)) / 2) as u8)
}

/// A pencil `diag(a) x + diag(b) y` in diagonal form, with the change of basis
/// that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalPencil {
    pub pairs: [(f64, f64); 4],
    /// Rows `k_i` with `Q_A(k_i) = a_i / 2`, `Q_B(k_i) = b_i / 2` and `k_i` mutually orthogonal for both forms.
    pub basis: [[f64; 4]; 4],
}

impl DiagonalPencil {
    /// Pencil of a pair that is already diagonal; entries are those of `2A`, `2B`.
    pub fn from_pairs(pairs: [(f64, f64); 4]) -> Result<Self> {
        if pairs.iter().any(|&(a, b)| a == 0.0 && b == 0.0) {
            return Err(Error::InvalidArgument("singular pencil: a diagonal pair (a_i, b_i) vanishes".into()));
        }
        let mut basis = [[0.0; 4]; 4];
        for (i, row) in basis.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Ok(DiagonalPencil { pairs, basis })
    }

    /// Whether the origin lies in the convex hull of the points `(a_i, b_i)`,
    /// i.e. whether `sum a_i x_i^2 = sum b_i x_i^2 = 0` has a nonzero real solution.
    pub fn contains_origin(&self) -> bool {
        let mut angles: Vec<f64> = self.pairs.iter().map(|&(a, b)| b.atan2(a)).collect();
        angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut max_gap: f64 = angles[0] + 2.0 * PI - angles[angles.len() - 1];
        for w in angles.windows(2) {
            max_gap = max_gap.max(w[1] - w[0]);
        }
        max_gap <= PI * (1.0 + tolerance::ANGLE)
    }

    /// Nonnegative weights `t` with `sum t_i (a_i, b_i) = 0`, found on a triangle
    /// (or segment) of the points containing the origin.
    pub fn hull_weights(&self) -> Option<[f64; 4]> {
        let cross = |i: usize, j: usize| {
            let (p, q) = (self.pairs[i], self.pairs[j]);
            p.0 * q.1 - p.1 * q.0
        };
        let scale: f64 = self.pairs.iter().map(|&(a, b)| a.hypot(b)).fold(0.0, f64::max);
        let eps = tolerance::ANGLE * scale * scale;
        for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
            let w = [cross(j, k), cross(k, i), cross(i, j)];
            let nonneg = w.iter().all(|&x| x >= -eps);
            let nonpos = w.iter().all(|&x| x <= eps);
            if (nonneg || nonpos) && w.iter().any(|x| x.abs() > eps) {
                let mut t = [0.0; 4];
                t[i] = w[0].abs();
                t[j] = w[1].abs();
                t[k] = w[2].abs();
                return Some(t);
            }
        }
        // All points on one line through the origin.
        for i in 0..4 {
            for j in i + 1..4 {
                let (p, q) = (self.pairs[i], self.pairs[j]);
                if cross(i, j).abs() <= eps && p.0 * q.0 + p.1 * q.1 < 0.0 {
                    let mut t = [0.0; 4];
                    t[i] = q.0.hypot(q.1);
                    t[j] = p.0.hypot(p.1);
                    return Some(t);
                }
            }
        }
        None
    }

    /// A real common zero in the original coordinates, when one exists.
    pub fn real_point(&self) -> Option<[f64; 4]> {
        if !self.contains_origin() {
            return None;
        }
        let t = self.hull_weights()?;
        let mut x = [0.0; 4];
        for (i, ti) in t.iter().enumerate() {
            let s = ti.sqrt();
            for (c, xc) in x.iter_mut().enumerate() {
                *xc += s * self.basis[i][c];
            }
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        Some(x.map(|v| v / norm))
    }
}

fn to_matrix4(m: &crate::linalg::Matrix<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| *m.get(i, j))
}

/// Simultaneous diagonalization of a pencil whose resolvent has four distinct real roots.
pub fn simultaneous_diagonalize(p: &PairOfQuadrics<f64>) -> Result<DiagonalPencil> {
    let class = real_class(p)?;
    if class != 0 {
        return Err(Error::WrongRealClass { expected: 0, found: class });
    }
    let (ga, gb) = p.gram2();
    let (ma, mb) = (to_matrix4(&ga), to_matrix4(&gb));
    let norm = ma.norm().max(mb.norm());
    for c in 1..=8 {
        let combo = ma + mb * c as f64;
        let Some(inv) = combo.try_inverse() else { continue };
        if combo.determinant().abs() <= tolerance::DEGENERACY * norm.powi(4) {
            continue;
        }
        let eig = (inv * mb).complex_eigenvalues();
        let spread = eig.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        if eig.iter().any(|z| z.im.abs() > tolerance::ROUND_TRIP * spread) {
            continue;
        }
        let mut mus: Vec<f64> = eig.iter().map(|z| z.re).collect();
        mus.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if mus.windows(2).any(|w| (w[1] - w[0]).abs() <= tolerance::DEGENERACY * spread) {
            return Err(Error::RepeatedRoots(format!("eigenvalues {mus:?}")));
        }
        let mut pairs = [(0.0, 0.0); 4];
        let mut basis = [[0.0; 4]; 4];
        for (idx, mu) in mus.iter().enumerate() {
            let pencil = mb - combo * *mu;
            let svd = pencil.svd(false, true);
            let v_t = svd.v_t.expect("requested");
            let smallest = (0..4)
                .min_by(|&x, &y| svd.singular_values[x].partial_cmp(&svd.singular_values[y]).unwrap())
                .unwrap();
            let k = v_t.row(smallest).transpose();
            let k = k / k.norm();
            pairs[idx] = ((k.transpose() * ma * k)[0], (k.transpose() * mb * k)[0]);
            for c in 0..4 {
                basis[idx][c] = k[c];
            }
        }
        return Ok(DiagonalPencil { pairs, basis });
    }
    Err(Error::RepeatedRoots("no regular member found in the pencil".into()))
}

/// Real solubility: classes 1 and 2 are always soluble; for class 0 the
/// diagonalized pencil decides through the convex-hull criterion.
pub fn is_r_soluble(p: &PairOfQuadrics<f64>) -> Result<bool> {
    match real_class(p)? {
        0 => Ok(simultaneous_diagonalize(p)?.contains_origin()),
        _ => Ok(true),
    }
}

/// Parameters of the factored resolvent shapes with `0`, `1` or `2` complex pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RepresentativeParams {
    /// `kappa y (x + l1 y)(x + l2 y)(x + l3 y)`, `l1 > l2 > l3`.
    Split { kappa: f64, lambdas: [f64; 3] },
    /// `kappa y (x + lambda y)(x^2 + r^2 y^2)`, `r > 0`.
    Mixed { kappa: f64, lambda: f64, r: f64 },
    /// `kappa (x^2 + r1^2 y^2)(x^2 + r2^2 y^2)`, `r1 > r2 > 0`.
    Definite { kappa: f64, r1: f64, r2: f64 },
}

impl RepresentativeParams {
    /// The quartic `f` of the shape; the representative has resolvent `16 f`.
    pub fn quartic(&self) -> BinaryQuartic<f64> {
        let mul = |p: &[f64], q: &[f64]| {
            let mut out = vec![0.0; p.len() + q.len() - 1];
            for (i, a) in p.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            out
        };
        // coefficient vectors in x^{d-k} y^k
        let y = [0.0, 1.0];
        let (kappa, factors): (f64, Vec<Vec<f64>>) = match *self {
            RepresentativeParams::Split { kappa, lambdas } => {
                (kappa, vec![y.to_vec(), vec![1.0, lambdas[0]], vec![1.0, lambdas[1]], vec![1.0, lambdas[2]]])
            }
            RepresentativeParams::Mixed { kappa, lambda, r } => {
                (kappa, vec![y.to_vec(), vec![1.0, lambda], vec![1.0, 0.0, r * r]])
            }
            RepresentativeParams::Definite { kappa, r1, r2 } => {
                (kappa, vec![vec![1.0, 0.0, r1 * r1], vec![1.0, 0.0, r2 * r2]])
            }
        };
        let prod = factors.iter().fold(vec![kappa], |acc, f| mul(&acc, f));
        BinaryQuartic::from_coeffs(std::array::from_fn(|k| prod[k]))
    }

    fn validate(&self) -> Result<f64> {
        let kappa = match *self {
            RepresentativeParams::Split { kappa, lambdas: [l1, l2, l3] } => {
                if !(l1 > l2 && l2 > l3) {
                    return Err(Error::ParameterOrder(format!("need l1 > l2 > l3, got {l1}, {l2}, {l3}")));
                }
                kappa
            }
            RepresentativeParams::Mixed { kappa, r, .. } => {
                if !(r > 0.0) {
                    return Err(Error::ParameterOrder(format!("need r > 0, got {r}")));
                }
                kappa
            }
            RepresentativeParams::Definite { kappa, r1, r2 } => {
                if !(r1 > r2 && r2 > 0.0) {
                    return Err(Error::ParameterOrder(format!("need r1 > r2 > 0, got {r1}, {r2}")));
                }
                kappa
            }
        };
        if !(kappa > 0.0) {
            return Err(Error::ParameterOrder(format!("need kappa > 0, got {kappa}")));
        }
        Ok(kappa)
    }
}

/// The fundamental representative with the given resolvent shape: Gram matrices
/// scaled by `kappa^(1/4)`, so that the resolvent is `16 f`.
pub fn representative(params: &RepresentativeParams) -> Result<PairOfQuadrics<f64>> {
    let kappa = params.validate()?;
    let s = kappa.powf(0.25);
    // Gram matrices; coordinates are the diagonal entries and twice the off-diagonal ones.
    let (gram_a, gram_b): ([[f64; 4]; 4], [[f64; 4]; 4]) = match *params {
        RepresentativeParams::Split { lambdas: [l1, l2, l3], .. } => {
            (diag4([0.0, -1.0, 1.0, -1.0]), diag4([1.0, -l1, l2, -l3]))
        }
        RepresentativeParams::Mixed { lambda, r, .. } => {
            let mut a = diag4([0.0, -1.0, 0.0, 0.0]);
            a[2][3] = 1.0;
            a[3][2] = 1.0;
            (a, diag4([1.0, -lambda, r, -r]))
        }
        RepresentativeParams::Definite { r1, r2, .. } => {
            let mut a = [[0.0; 4]; 4];
            a[0][1] = 1.0;
            a[1][0] = 1.0;
            a[2][3] = 1.0;
            a[3][2] = 1.0;
            (a, diag4([r1, -r1, r2, -r2]))
        }
    };
    let coords = |g: &[[f64; 4]; 4]| -> [f64; 10] {
        std::array::from_fn(|k| {
            let (i, j) = crate::forms::slot_indices(k);
            if i == j {
                s * g[i][i]
            } else {
                2.0 * s * g[i][j]
            }
        })
    };
    Ok(PairOfQuadrics::new(coords(&gram_a), coords(&gram_b)))
}

fn diag4(d: [f64; 4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        m[i][i] = d[i];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix4;
    use rand::{Rng, SeedableRng};

    fn close_quartic(f: &BinaryQuartic<f64>, g: &BinaryQuartic<f64>, tol: f64) {
        let scale = g.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for (x, y) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((x - y).abs() <= tol * scale, "{f} vs {g}");
        }
    }

    #[test]
    fn representatives_have_the_printed_resolvents() {
        let split = representative(&RepresentativeParams::Split { kappa: 1.0, lambdas: [1.0, 0.0, -1.0] }).unwrap();
        close_quartic(&split.resolvent(), &BinaryQuartic::new(0.0, 16.0, 0.0, -16.0, 0.0), 1e-12);
        let (i, j) = split.resolvent().invariants_raw();
        assert_relative_eq!(i, 768.0);
        assert_relative_eq!(j, 0.0);
        assert_eq!(real_class(&split).unwrap(), 0);

        let definite = representative(&RepresentativeParams::Definite { kappa: 1.0, r1: 2.0, r2: 1.0 }).unwrap();
        close_quartic(&definite.resolvent(), &BinaryQuartic::new(16.0, 0.0, 80.0, 0.0, 64.0), 1e-12);
        assert_eq!(real_class(&definite).unwrap(), 2);
        assert!(is_r_soluble(&definite).unwrap());

        let mixed = representative(&RepresentativeParams::Mixed { kappa: 16.0, lambda: 0.0, r: 1.0 }).unwrap();
        close_quartic(&mixed.resolvent(), &BinaryQuartic::new(0.0, 256.0, 0.0, 256.0, 0.0), 1e-12);
        assert_eq!(real_class(&mixed).unwrap(), 1);
    }

    #[test]
    fn representative_rejects_bad_order() {
        let bad = RepresentativeParams::Split { kappa: 1.0, lambdas: [0.0, 1.0, -1.0] };
        assert!(matches!(representative(&bad), Err(Error::ParameterOrder(_))));
        let bad = RepresentativeParams::Definite { kappa: 1.0, r1: 1.0, r2: 2.0 };
        assert!(matches!(representative(&bad), Err(Error::ParameterOrder(_))));
    }

    #[test]
    fn random_representatives_factor_and_are_soluble() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let kappa = rng.gen_range(0.1..5.0);
            let mut l: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
            l.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let params = [
                RepresentativeParams::Split { kappa, lambdas: l },
                RepresentativeParams::Mixed { kappa, lambda: l[0], r: rng.gen_range(0.1..3.0) },
                RepresentativeParams::Definite { kappa, r1: l[0].abs() + 1.5, r2: rng.gen_range(0.1..1.4) },
            ];
            for (class, params) in params.iter().enumerate() {
                let rep = representative(params).unwrap();
                close_quartic(&rep.resolvent(), &params.quartic().scale(&16.0), 1e-10);
                if let Ok(c) = real_class(&rep) {
                    assert_eq!(c as usize, class);
                    assert!(is_r_soluble(&rep).unwrap());
                }
            }
        }
    }

    #[test]
    fn diagonal_pencils() {
        let d = PairOfQuadrics::diagonal([1.0, 1.0, 1.0, -1.0], [1.0, 2.0, 3.0, -4.0]);
        let pencil = simultaneous_diagonalize(&d).unwrap();
        let mut got: Vec<(f64, f64)> = pencil.pairs.iter().map(|&(a, b)| (b / a, a.signum())).collect();
        got.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let expected = [(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (4.0, -1.0)];
        for (g, e) in got.iter().zip(expected) {
            assert_relative_eq!(g.0, e.0, epsilon = 1e-8);
            assert_eq!(g.1, e.1);
        }

        let positive = DiagonalPencil::from_pairs([(1.0, 1.0), (1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]).unwrap();
        assert!(!positive.contains_origin());
        let balanced = DiagonalPencil::from_pairs([(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]).unwrap();
        assert!(balanced.contains_origin());
        let x = balanced.real_point().unwrap();
        let qa: f64 = [1.0, 1.0, -1.0, -1.0].iter().zip(x).map(|(c, v)| c * v * v).sum();
        let qb: f64 = [1.0, -1.0, 1.0, -1.0].iter().zip(x).map(|(c, v)| c * v * v).sum();
        assert!(qa.abs() < 1e-12 && qb.abs() < 1e-12);
    }

    #[test]
    fn orthogonal_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = [1.0, 1.0, 1.0, -1.0];
        let b = [1.0, 2.0, 3.0, -4.0];
        let base = PairOfQuadrics::diagonal(a, b);
        for _ in 0..20 {
            let q = Matrix4::<f64>::from_fn(|_, _| rng.gen_range(-1.0..1.0)).qr().q();
            let g4 = crate::linalg::Matrix::from_rows((0..4).map(|i| (0..4).map(|j| q[(i, j)]).collect()).collect());
            let moved = crate::forms::act_raw(&crate::linalg::Matrix::identity(2, &1.0), &g4, &base);
            let pencil = simultaneous_diagonalize(&moved).unwrap();
            // doubled Gram entries of the original pencil, normalized to direction
            let mut expected: Vec<(f64, f64)> = a.iter().zip(b).map(|(x, y)| unit(2.0 * x, 2.0 * y)).collect();
            let mut got: Vec<(f64, f64)> = pencil.pairs.iter().map(|&(x, y)| unit(x, y)).collect();
            expected.sort_by(|p, q| p.partial_cmp(q).unwrap());
            got.sort_by(|p, q| p.partial_cmp(q).unwrap());
            for (g, e) in got.iter().zip(&expected) {
                assert!((g.0 - e.0).abs() < 1e-8 && (g.1 - e.1).abs() < 1e-8, "{got:?} vs {expected:?}");
            }
        }
    }

    fn unit(x: f64, y: f64) -> (f64, f64) {
        let n = x.hypot(y);
        (x / n, y / n)
    }

    #[test]
    fn degenerate_pairs_are_rejected() {
        let d = PairOfQuadrics::diagonal([1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0]);
        assert!(matches!(real_class(&d), Err(Error::DegenerateReal(_))));
    }
}
