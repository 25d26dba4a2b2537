use serde::{Deserialize, Serialize};

use crate::forms::PairOfQuadrics;
use crate::scalar::{Scalar, Zmod};

/// A point of `P^3(F_p)` with first nonzero coordinate equal to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    pub coords: [u64; 4],
}

impl ProjPoint {
    /// Normalizes a nonzero vector; `None` for the zero vector.
    pub fn normalize(v: [Zmod; 4]) -> Option<Self> {
        let lead = v.iter().find(|c| !c.vanishes())?;
        let inv = lead.inverse().expect("prime modulus");
        Some(ProjPoint { coords: v.map(|c| (c * inv).value()) })
    }

    pub fn to_zmod(&self, p: u64) -> [Zmod; 4] {
        self.coords.map(|c| Zmod::new(c as i64, p))
    }

    /// Number of points of `P^3(F_p)`.
    pub fn count(p: u64) -> u64 {
        p * p * p + p * p + p + 1
    }

    /// The `index`-th point in a fixed enumeration order of `P^3(F_p)`.
    pub fn nth(p: u64, mut index: u64) -> Self {
        // blocks: leading 1 at position 0 (p^3 points), 1 (p^2), 2 (p), 3 (1)
        for lead in 0..4 {
            let free = 3 - lead as u32;
            let block = p.pow(free);
            if index < block {
                let mut coords = [0u64; 4];
                coords[lead] = 1;
                for k in (lead + 1..4).rev() {
                    coords[k] = index % p;
                    index /= p;
                }
                return ProjPoint { coords };
            }
            index -= block;
        }
        panic!("point index out of range");
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub point: ProjPoint,
    /// The Jacobian of `(Q_A, Q_B)` has rank 2 at the point.
    pub smooth: bool,
}

/// Gradients of `Q_A` and `Q_B` at `x`.
pub fn gradients<S: Scalar>(pair: &PairOfQuadrics<S>, x: &[S; 4]) -> [[S; 4]; 2] {
    let (ma, mb) = pair.gram2();
    let grad = |m: &crate::linalg::Matrix<S>| -> [S; 4] {
        std::array::from_fn(|k| {
            let mut acc = x[0].zero_like();
            for l in 0..4 {
                acc = acc + m.get(k, l).clone() * x[l].clone();
            }
            acc
        })
    };
    [grad(&ma), grad(&mb)]
}

/// The six 2x2 minors of a 2x4 matrix, indexed by column pairs `(i, j)`, `i < j`.
pub fn minors<S: Scalar>(rows: &[[S; 4]; 2]) -> Vec<((usize, usize), S)> {
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            let m = rows[0][i].clone() * rows[1][j].clone() - rows[0][j].clone() * rows[1][i].clone();
            out.push(((i, j), m));
        }
    }
    out
}

fn check_point(pair: &PairOfQuadrics<Zmod>, point: ProjPoint, p: u64) -> Option<IntersectionPoint> {
    let x = point.to_zmod(p);
    let (qa, qb) = pair.eval(&x);
    if !qa.vanishes() || !qb.vanishes() {
        return None;
    }
    let smooth = minors(&gradients(pair, &x)).iter().any(|(_, m)| !m.vanishes());
    Some(IntersectionPoint { point, smooth })
}

/// Points of the intersection among the enumeration indices `range`.
pub fn fp_points_in_range(pair: &PairOfQuadrics<Zmod>, range: std::ops::Range<u64>) -> Vec<IntersectionPoint> {
    let p = pair.a_coords()[0].modulus();
    range.filter_map(|idx| check_point(pair, ProjPoint::nth(p, idx), p)).collect()
}

/// All points of `Q_A = Q_B = 0` in `P^3(F_p)`, with smoothness flags.
pub fn fp_points_on_intersection(pair: &PairOfQuadrics<Zmod>) -> Vec<IntersectionPoint> {
    let p = pair.a_coords()[0].modulus();
    fp_points_in_range(pair, 0..ProjPoint::count(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::slot;

    #[test]
    fn enumeration_is_a_bijection() {
        for p in [2u64, 3, 5] {
            let mut seen = std::collections::HashSet::new();
            for i in 0..ProjPoint::count(p) {
                let pt = ProjPoint::nth(p, i);
                assert_eq!(ProjPoint::normalize(pt.to_zmod(p)), Some(pt));
                assert!(seen.insert(pt));
            }
        }
    }

    #[test]
    fn nested_loop_agreement() {
        // Q_A = sum x_i^2, Q_B = x0 x1 over F_3
        let p = 3u64;
        let mut c = [0i64; 20];
        for i in 0..4 {
            c[slot(i, i)] = 1;
        }
        c[10 + slot(0, 1)] = 1;
        let pair = PairOfQuadrics::from_coords(c.map(|v| Zmod::new(v, p)));
        let fast: Vec<ProjPoint> = fp_points_on_intersection(&pair).iter().map(|q| q.point).collect();
        let mut naive = Vec::new();
        for x0 in 0..p {
            for x1 in 0..p {
                for x2 in 0..p {
                    for x3 in 0..p {
                        let v = [x0, x1, x2, x3];
                        if v == [0; 4] {
                            continue;
                        }
                        let qa: u64 = v.iter().map(|x| x * x).sum::<u64>() % p;
                        let qb = (x0 * x1) % p;
                        if qa == 0 && qb == 0 {
                            naive.push(ProjPoint::normalize(v.map(|t| Zmod::new(t as i64, p))).unwrap());
                        }
                    }
                }
            }
        }
        naive.sort();
        naive.dedup();
        let mut fast_sorted = fast.clone();
        fast_sorted.sort();
        assert_eq!(fast_sorted, naive);
        assert!(!naive.is_empty());
    }

    #[test]
    fn twisted_quartic_points() {
        // Q_A = x0 x3 - x1 x2, Q_B = x0 x2 - x1^2 over F_5 contains (1, t, t^2, t^3).
        let p = 5u64;
        let mut c = [0i64; 20];
        c[slot(0, 3)] = 1;
        c[slot(1, 2)] = -1;
        c[10 + slot(0, 2)] = 1;
        c[10 + slot(1, 1)] = -1;
        let pair = PairOfQuadrics::from_coords(c.map(|v| Zmod::new(v, p)));
        let pts = fp_points_on_intersection(&pair);
        for t in 0..p {
            let pt = ProjPoint { coords: [1, t, t * t % p, t * t * t % p] };
            assert!(pts.iter().any(|q| q.point == pt));
        }
        for q in &pts {
            let (a, b) = pair.eval(&q.point.to_zmod(p));
            assert!(a.vanishes() && b.vanishes());
        }
    }
}
