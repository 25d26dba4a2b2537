use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::valuation;
use crate::error::{Error, Result};
use crate::forms::{invariants, PairOfQuadrics};
use crate::local::points::{gradients, minors};

/// Live residue classes beyond which the search gives up with `Unknown`.
pub const BRANCH_LIMIT: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SolubilityVerdict {
    /// `witness` is a primitive vector with both forms vanishing modulo `p^level`
    /// and a Jacobian minor of valuation `e` with `level >= 2e + 1`.
    Soluble { witness: [BigInt; 4], level: u32, minor_valuation: u32 },
    /// No primitive solution modulo `p^level` once each form is divided by its `p`-content.
    Insoluble { level: u32 },
    /// Singular residue classes were still alive at the depth limit.
    Unknown { depth: u32, live_branches: usize },
}

impl SolubilityVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            SolubilityVerdict::Soluble { .. } => "soluble",
            SolubilityVerdict::Insoluble { .. } => "insoluble",
            SolubilityVerdict::Unknown { .. } => "unknown",
        }
    }
}

/// Divides out the `p`-content of each quadric separately; the zero locus is unchanged.
fn strip_content(pair: &PairOfQuadrics<BigInt>, p: &BigInt) -> PairOfQuadrics<BigInt> {
    let reduce = |c: &[BigInt; 10]| -> [BigInt; 10] {
        let mut c = c.clone();
        if c.iter().all(|x| x.is_zero()) {
            return c;
        }
        while c.iter().all(|x| x.is_multiple_of(p)) {
            c = c.map(|x| x / p);
        }
        c
    };
    PairOfQuadrics::new(reduce(pair.a_coords()), reduce(pair.b_coords()))
}

fn vanishes_mod(pair: &PairOfQuadrics<BigInt>, x: &[BigInt; 4], modulus: &BigInt) -> bool {
    let (qa, qb) = pair.eval(x);
    qa.is_multiple_of(modulus) && qb.is_multiple_of(modulus)
}

/// Smallest valuation of a 2x2 Jacobian minor avoiding the normalized column.
fn minor_valuation(pair: &PairOfQuadrics<BigInt>, x: &[BigInt; 4], lead: usize, p: u64) -> Option<u32> {
    minors(&gradients(pair, x))
        .into_iter()
        .filter(|((i, j), _)| *i != lead && *j != lead)
        .filter_map(|(_, m)| valuation(&m, p))
        .min()
}

/// Breadth-first Hensel search for a point of `Q_A = Q_B = 0` over `Z_p`, up to
/// solutions modulo `p^depth`.
pub fn qp_soluble(pair: &PairOfQuadrics<BigInt>, p: u64, depth: u32) -> Result<SolubilityVerdict> {
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    if invariants(pair).scaled_disc.is_zero() {
        return Err(Error::ZeroDiscriminant(" for the local solubility search".into()));
    }
    let pb = BigInt::from(p);
    let pair = strip_content(pair, &pb);

    // Level 1: residue points, first unit coordinate set to 1.
    let mut live: Vec<([BigInt; 4], usize)> = Vec::new();
    for idx in 0..crate::local::points::ProjPoint::count(p) {
        let pt = crate::local::points::ProjPoint::nth(p, idx);
        let x = pt.coords.map(BigInt::from);
        let lead = pt.coords.iter().position(|&c| c == 1).expect("normalized");
        if vanishes_mod(&pair, &x, &pb) {
            live.push((x, lead));
        }
    }
    let mut level = 1u32;
    let mut modulus = pb.clone();
    loop {
        if live.is_empty() {
            return Ok(SolubilityVerdict::Insoluble { level });
        }
        for (x, lead) in &live {
            if let Some(e) = minor_valuation(&pair, x, *lead, p) {
                if level > 2 * e {
                    return Ok(SolubilityVerdict::Soluble { witness: x.clone(), level, minor_valuation: e });
                }
            }
        }
        if level >= depth {
            return Ok(SolubilityVerdict::Unknown { depth, live_branches: live.len() });
        }
        let next_modulus = &modulus * &pb;
        let mut next = Vec::new();
        for (x, lead) in &live {
            let free: Vec<usize> = (0..4).filter(|k| k != lead).collect();
            for t in 0..p.pow(3) {
                let mut y = x.clone();
                let mut code = t;
                for &k in &free {
                    y[k] += &modulus * BigInt::from(code % p);
                    code /= p;
                }
                if vanishes_mod(&pair, &y, &next_modulus) {
                    next.push((y, *lead));
                }
            }
            if next.len() > BRANCH_LIMIT {
                return Ok(SolubilityVerdict::Unknown { depth: level + 1, live_branches: next.len() });
            }
        }
        live = next;
        modulus = next_modulus;
        level += 1;
    }
}

/// Default search depth `v_p(27 Delta) + 2`.
pub fn default_depth(pair: &PairOfQuadrics<BigInt>, p: u64) -> Result<u32> {
    let inv = invariants(pair);
    valuation(&inv.scaled_disc, p)
        .map(|v| v + 2)
        .ok_or_else(|| Error::ZeroDiscriminant(" for the local solubility search".into()))
}

pub fn qp_soluble_default(pair: &PairOfQuadrics<BigInt>, p: u64) -> Result<(u32, SolubilityVerdict)> {
    let depth = default_depth(pair, p)?;
    Ok((depth, qp_soluble(pair, p, depth)?))
}

/// Whether some primitive vector has both forms vanishing modulo `p^k`, by exhaustive search.
pub fn has_primitive_solution_mod(pair: &PairOfQuadrics<BigInt>, p: u64, k: u32) -> bool {
    let modulus = BigInt::from(p).pow(k);
    let m = p.pow(k);
    for lead in 0..4usize {
        // coordinates before `lead` are multiples of p, `lead` is 1, later ones are free
        let ranges: Vec<(u64, u64)> =
            (0..4).map(|i| if i < lead { (p, m / p) } else if i == lead { (1, 1) } else { (1, m) }).collect();
        let total: u64 = ranges.iter().map(|(_, n)| *n).product();
        for code in 0..total {
            let mut c = code;
            let x: [BigInt; 4] = std::array::from_fn(|i| {
                let (step, n) = ranges[i];
                let v = if i == lead { 1 } else { (c % n) * step };
                if i != lead {
                    c /= n;
                }
                BigInt::from(v)
            });
            if vanishes_mod(pair, &x, &modulus) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::witness_sum_of_fourth_powers;

    fn diag(a: [i64; 4], b: [i64; 4]) -> PairOfQuadrics<BigInt> {
        PairOfQuadrics::diagonal(a.map(BigInt::from), b.map(BigInt::from))
    }

    #[test]
    fn smooth_point_lifts_immediately() {
        let pair = witness_sum_of_fourth_powers(3);
        match qp_soluble(&pair, 11, 1).unwrap() {
            SolubilityVerdict::Soluble { level, minor_valuation, .. } => assert_eq!((level, minor_valuation), (1, 0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_residue_fibre_is_insoluble() {
        // Modulo 3 the forms are x0^2 + x1^2 and x2^2 + x3^2, both anisotropic.
        let pair = diag([1, 1, 3, 0], [3, 0, 1, 1]);
        assert!(!has_primitive_solution_mod(&pair, 3, 1));
        assert_eq!(qp_soluble(&pair, 3, 4).unwrap(), SolubilityVerdict::Insoluble { level: 1 });
    }

    #[test]
    fn depth_monotonicity() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let base = PairOfQuadrics::random(&mut rng, 4);
            if invariants(&base).scaled_disc.is_zero() {
                continue;
            }
            let pair = PairOfQuadrics::new(base.a_coords().clone(), base.b_coords().clone().map(|c| c * 9));
            let mut last: Option<SolubilityVerdict> = None;
            for depth in 1..=5 {
                let v = qp_soluble(&pair, 3, depth).unwrap();
                if let Some(prev) = &last {
                    if !matches!(prev, SolubilityVerdict::Unknown { .. }) {
                        assert_eq!(prev.label(), v.label());
                    }
                }
                last = Some(v);
            }
        }
    }
}
