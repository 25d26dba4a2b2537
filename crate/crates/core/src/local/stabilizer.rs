//! Stabilizers of pairs in `G(F_p)`.
//!
//! Two independent searches: one fixes `g2` first (it must satisfy
//! `f((x, y) g2) = det(g2)^2 f`) and then solves for the rows of `g4`;
//! the other enumerates `g4` row by row, pruning against the requirement that
//! `g4 A g4^t` and `g4 B g4^t` lie in the span of `A` and `B`, and recovers `g2`
//! by linear algebra. Both count raw pairs and divide by the `p - 1` scalings.

use crate::error::{Error, Result};
use crate::forms::PairOfQuadrics;
use crate::scalar::{PrimeField, Scalar, Zmod};

type Mat4 = [[Zmod; 4]; 4];
type Vec4 = [Zmod; 4];

fn to_array(m: &crate::linalg::Matrix<Zmod>) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| *m.get(i, j)))
}

fn bilinear(m: &Mat4, u: &Vec4, v: &Vec4) -> Zmod {
    let zero = u[0].zero_like();
    let mut acc = zero;
    for k in 0..4 {
        if u[k].vanishes() {
            continue;
        }
        let mut row = zero;
        for l in 0..4 {
            row = row + m[k][l] * v[l];
        }
        acc = acc + u[k] * row;
    }
    acc
}

fn mat_vec(m: &Mat4, v: &Vec4) -> Vec4 {
    std::array::from_fn(|k| (0..4).fold(v[0].zero_like(), |acc, l| acc + m[k][l] * v[l]))
}

fn combine(x: Zmod, m: &Mat4, y: Zmod, n: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| x * m[i][j] + y * n[i][j]))
}

fn det4(rows: &[Vec4; 4]) -> Zmod {
    let flat: Vec<Zmod> = rows.iter().flatten().copied().collect();
    crate::linalg::det_division_free(&flat, 4)
}

/// Checks shared by both searches; returns the doubled Gram matrices.
fn prepare(pair: &PairOfQuadrics<Zmod>) -> Result<(u64, Mat4, Mat4)> {
    let p = pair.a_coords()[0].modulus();
    PrimeField::new(p)?;
    if p == 2 {
        return Err(Error::UnsupportedPrime { prime: 2, reason: "characteristic 2".into() });
    }
    let disc = pair.resolvent().discriminant_by_resultant().expect("16 is a unit for odd p");
    if disc.vanishes() {
        return Err(Error::ZeroDiscriminant(format!(" modulo {p}")));
    }
    let (ma, mb) = pair.gram2();
    Ok((p, to_array(&ma), to_array(&mb)))
}

fn divide_by_scalings(raw: u64, p: u64) -> Result<u64> {
    if raw % (p - 1) != 0 {
        return Err(Error::InvalidArgument(format!("raw stabilizer count {raw} is not divisible by p - 1 = {}", p - 1)));
    }
    Ok(raw / (p - 1))
}

/// All solutions of the affine system `rows * x = rhs` over `F_p`.
pub(crate) fn solve_affine(mut rows: Vec<(Vec4, Zmod)>, p: u64) -> Option<Vec<Vec4>> {
    let zero = Zmod::new(0, p);
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..4 {
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i].0[col].vanishes()) else { continue };
        rows.swap(r, sel);
        let inv = rows[r].0[col].inverse().unwrap();
        let (pr, pv) = rows[r];
        let pr: Vec4 = pr.map(|c| c * inv);
        let pv = pv * inv;
        rows[r] = (pr, pv);
        for i in 0..rows.len() {
            if i != r && !rows[i].0[col].vanishes() {
                let f = rows[i].0[col];
                let (ri, vi) = rows[i];
                rows[i] = (std::array::from_fn(|k| ri[k] - f * pr[k]), vi - f * pv);
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|(_, v)| !v.vanishes()) {
        return None;
    }
    let free: Vec<usize> = (0..4).filter(|c| !pivots.contains(c)).collect();
    let total = p.pow(free.len() as u32);
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        let mut x = [zero; 4];
        let mut c = code;
        for &f in &free {
            x[f] = Zmod::new((c % p) as i64, p);
            c /= p;
        }
        for (k, &col) in pivots.iter().enumerate() {
            let (row, v) = rows[k];
            let mut val = v;
            for &f in &free {
                val = val - row[f] * x[f];
            }
            x[col] = val;
        }
        out.push(x);
    }
    Some(out)
}

/// Number of `g4` with `g4 m1 g4^t = target_a`, `g4 m2 g4^t = target_b` and `det(g4) = det`.
fn count_g4(m1: &Mat4, m2: &Mat4, target_a: &Mat4, target_b: &Mat4, det: Zmod, p: u64) -> u64 {
    let mut rows: [Vec4; 4] = [[Zmod::new(0, p); 4]; 4];
    let mut first = Vec::new();
    for code in 0..p.pow(4) {
        let mut c = code;
        let v: Vec4 = std::array::from_fn(|_| {
            let x = Zmod::new((c % p) as i64, p);
            c /= p;
            x
        });
        if bilinear(m1, &v, &v) == target_a[0][0] && bilinear(m2, &v, &v) == target_b[0][0] {
            first.push(v);
        }
    }
    let mut count = 0;
    for v in first {
        rows[0] = v;
        count += extend_rows(&mut rows, 1, m1, m2, target_a, target_b, det, p);
    }
    count
}

#[allow(clippy::too_many_arguments)]
fn extend_rows(
    rows: &mut [Vec4; 4],
    level: usize,
    m1: &Mat4,
    m2: &Mat4,
    target_a: &Mat4,
    target_b: &Mat4,
    det: Zmod,
    p: u64,
) -> u64 {
    if level == 4 {
        return u64::from(det4(rows) == det);
    }
    let mut eqs = Vec::with_capacity(2 * level);
    for j in 0..level {
        eqs.push((mat_vec(m1, &rows[j]), target_a[level][j]));
        eqs.push((mat_vec(m2, &rows[j]), target_b[level][j]));
    }
    let Some(candidates) = solve_affine(eqs, p) else { return 0 };
    let mut count = 0;
    for v in candidates {
        if bilinear(m1, &v, &v) == target_a[level][level] && bilinear(m2, &v, &v) == target_b[level][level] {
            rows[level] = v;
            count += extend_rows(rows, level + 1, m1, m2, target_a, target_b, det, p);
        }
    }
    count
}

/// Order of the stabilizer of a nondegenerate pair in `G(F_p)`, searching over `g2` first.
pub fn stabilizer_order_fp(pair: &PairOfQuadrics<Zmod>) -> Result<u64> {
    let (p, ma, mb) = prepare(pair)?;
    let f = pair.resolvent();
    let field = PrimeField::new(p)?;
    let mut raw = 0u64;
    for code in 0..p.pow(4) {
        let (r, s, t, u) = (
            field.el((code % p) as i64),
            field.el((code / p % p) as i64),
            field.el((code / p / p % p) as i64),
            field.el((code / p / p / p) as i64),
        );
        let d2 = r * u - s * t;
        if d2.vanishes() {
            continue;
        }
        if f.substitute(&r, &s, &t, &u) != f.scale(&(d2 * d2)) {
            continue;
        }
        let m1 = combine(r, &ma, s, &mb);
        let m2 = combine(t, &ma, u, &mb);
        raw += count_g4(&m1, &m2, &ma, &mb, d2.inverse().unwrap(), p);
    }
    divide_by_scalings(raw, p)
}

/// Exhaustive search over `GL4(F_p)` with row-by-row pruning; intended for `p <= 5`.
pub fn stabilizer_order_exhaustive(pair: &PairOfQuadrics<Zmod>) -> Result<u64> {
    let (p, ma, mb) = prepare(pair)?;
    let field = PrimeField::new(p)?;
    let coeffs: Vec<(Zmod, Zmod)> =
        field.elements().flat_map(|x| field.elements().map(move |y| (x, y))).collect();
    let vectors: Vec<Vec4> = (1..p.pow(4))
        .map(|code| {
            let mut c = code;
            std::array::from_fn(|_| {
                let x = field.el((c % p) as i64);
                c /= p;
                x
            })
        })
        .collect();
    let mut search = Exhaustive { ma, mb, vectors, rows: [[field.el(0); 4]; 4], raw: 0 };
    search.descend(0, coeffs.clone(), coeffs);
    divide_by_scalings(search.raw, p)
}

struct Exhaustive {
    ma: Mat4,
    mb: Mat4,
    vectors: Vec<Vec4>,
    rows: [Vec4; 4],
    raw: u64,
}

impl Exhaustive {
    /// `span_a` (resp. `span_b`) holds the `(x, y)` with `g4 A g4^t = x A + y B`
    /// (resp. `g4 B g4^t`) still consistent with the rows chosen so far.
    fn descend(&mut self, level: usize, span_a: Vec<(Zmod, Zmod)>, span_b: Vec<(Zmod, Zmod)>) {
        if level == 4 {
            self.finish(&span_a, &span_b);
            return;
        }
        for idx in 0..self.vectors.len() {
            let v = self.vectors[idx];
            self.rows[level] = v;
            let consistent = |m: &Mat4, span: &[(Zmod, Zmod)]| -> Vec<(Zmod, Zmod)> {
                let values: Vec<Zmod> = (0..=level).map(|j| bilinear(m, &v, &self.rows[j])).collect();
                span.iter()
                    .copied()
                    .filter(|&(x, y)| {
                        (0..=level).all(|j| values[j] == x * self.ma[level][j] + y * self.mb[level][j])
                    })
                    .collect()
            };
            let next_a = consistent(&self.ma, &span_a);
            if next_a.is_empty() {
                continue;
            }
            let next_b = consistent(&self.mb, &span_b);
            if next_b.is_empty() {
                continue;
            }
            self.descend(level + 1, next_a, next_b);
        }
    }

    fn finish(&mut self, span_a: &[(Zmod, Zmod)], span_b: &[(Zmod, Zmod)]) {
        let d4 = det4(&self.rows);
        if d4.vanishes() {
            return;
        }
        for &(xa, ya) in span_a {
            for &(xb, yb) in span_b {
                // (A'', B'') = h (A, B) with h = [[xa, ya], [xb, yb]]; g2 = h^-1.
                let dh = xa * yb - ya * xb;
                let Some(inv) = dh.inverse() else { continue };
                let d2 = inv;
                if (d2 * d4).is_unity() {
                    self.raw += 1;
                }
            }
        }
    }
}
