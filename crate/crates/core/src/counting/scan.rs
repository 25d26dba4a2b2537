use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{fold_units, Checkpoint, CountReport};
use crate::error::{Error, Result};
use crate::forms::{coordinate_index, invariants, is_strongly_irreducible, PairOfQuadrics, REDUCIBILITY_CONDITIONS};
use crate::scalar::Scalar;
use crate::sieve;

/// Items per merge unit; fixed so that checkpoints do not depend on chunking.
const BLOCK: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predicate {
    NonzeroDisc,
    StronglyIrreducible,
    /// The coordinates of reducibility condition `k` (1..=4) all vanish.
    ReducibleCase(u8),
    InWp(u64),
    InWp1(u64),
    InWp2(u64),
}

impl Predicate {
    pub fn name(&self) -> String {
        match self {
            Predicate::NonzeroDisc => "disc-nonzero".into(),
            Predicate::StronglyIrreducible => "strongly-irreducible".into(),
            Predicate::ReducibleCase(k) => format!("case{k}"),
            Predicate::InWp(p) => format!("wp:{p}"),
            Predicate::InWp1(p) => format!("wp1:{p}"),
            Predicate::InWp2(p) => format!("wp2:{p}"),
        }
    }

    pub fn eval(&self, pair: &PairOfQuadrics<BigInt>) -> Result<bool> {
        Ok(match self {
            Predicate::NonzeroDisc => match small_disc_nonzero(pair) {
                Some(v) => v,
                None => !invariants(pair).scaled_disc.vanishes(),
            },
            Predicate::StronglyIrreducible => is_strongly_irreducible(pair),
            Predicate::ReducibleCase(k) => REDUCIBILITY_CONDITIONS[(*k - 1) as usize]
                .iter()
                .all(|l| pair.coord(coordinate_index(l).expect("static label")).vanishes()),
            Predicate::InWp(p) => sieve::in_wp(pair, *p)?,
            Predicate::InWp1(p) => sieve::in_wp1(pair, *p)?,
            Predicate::InWp2(p) => sieve::in_wp(pair, *p)? && !sieve::in_wp1(pair, *p)?,
        })
    }
}

impl std::str::FromStr for Predicate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let prime = |t: &str| -> Result<u64> {
            let p: u64 = t.parse().map_err(|_| Error::Parse(format!("bad prime in predicate {s:?}")))?;
            if p <= 3 || !crate::arith::is_prime_u64(p) {
                return Err(Error::Parse(format!("predicate {s:?} needs a prime p > 3")));
            }
            Ok(p)
        };
        match s.split_once(':') {
            Some(("wp", t)) => Ok(Predicate::InWp(prime(t)?)),
            Some(("wp1", t)) => Ok(Predicate::InWp1(prime(t)?)),
            Some(("wp2", t)) => Ok(Predicate::InWp2(prime(t)?)),
            _ => match s {
                "disc-nonzero" => Ok(Predicate::NonzeroDisc),
                "strongly-irreducible" => Ok(Predicate::StronglyIrreducible),
                "case1" | "case2" | "case3" | "case4" => Ok(Predicate::ReducibleCase(s.as_bytes()[4] - b'0')),
                _ => Err(Error::Parse(format!("unknown predicate {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanMode {
    /// Enumeration indices `start..end` of the box in mixed radix `2M + 1`.
    Exhaustive { start: u128, end: u128 },
    /// `samples` uniform draws; draw `i` uses stream `i` of the seeded generator.
    Sampled { samples: u64, seed: u64 },
}

/// `4I^3 != J^2` in fixed-width arithmetic; `None` when an intermediate overflows.
pub fn small_disc_nonzero(pair: &PairOfQuadrics<BigInt>) -> Option<bool> {
    use num_traits::ToPrimitive;
    let c: Vec<i128> = pair.coords().iter().map(|v| v.to_i128()).collect::<Option<_>>()?;
    let gram = |off: usize| -> [[i128; 4]; 4] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let v = c[off + crate::forms::slot(i.min(j), i.max(j))];
                if i == j { 2 * v } else { v }
            })
        })
    };
    let (m, n) = (gram(0), gram(10));
    // det(x M + y N) by expansion over subsets of columns
    let mut dp: [Option<[i128; 5]>; 16] = [None; 16];
    dp[0] = Some([1, 0, 0, 0, 0]);
    for mask in 0..16usize {
        let row = mask.count_ones() as usize;
        let Some(cur) = dp[mask] else { continue };
        if row == 4 {
            continue;
        }
        for col in (0..4).filter(|col| mask & (1 << col) == 0) {
            let sign = if (mask >> (col + 1)).count_ones() % 2 == 1 { -1 } else { 1 };
            let mut next = dp[mask | 1 << col].unwrap_or([0; 5]);
            for k in 0..row + 1 {
                next[k] = next[k].checked_add(sign * cur[k].checked_mul(m[row][col])?)?;
                next[k + 1] = next[k + 1].checked_add(sign * cur[k].checked_mul(n[row][col])?)?;
            }
            dp[mask | 1 << col] = Some(next);
        }
    }
    let [a, b, cc, d, e] = dp[15]?;
    let mul = |x: i128, y: i128| x.checked_mul(y);
    let i = mul(12, mul(a, e)?)?.checked_sub(mul(3, mul(b, d)?)?)?.checked_add(mul(cc, cc)?)?;
    let j = [mul(72, mul(mul(a, cc)?, e)?)?, mul(9, mul(mul(b, cc)?, d)?)?, -mul(27, mul(mul(a, d)?, d)?)?, -mul(27, mul(mul(e, b)?, b)?)?, -mul(2, mul(mul(cc, cc)?, cc)?)?]
        .iter()
        .try_fold(0i128, |acc, t| acc.checked_add(*t))?;
    let (i, j) = (BigInt::from(i), BigInt::from(j));
    Some(BigInt::from(4) * &i * &i * &i != &j * &j)
}

/// Number of points of `[-M, M]^20`.
pub fn box_size(m: u64) -> Option<u128> {
    ((2 * m + 1) as u128).checked_pow(20)
}

/// The `index`-th point of the box; the first coordinate varies fastest.
pub fn box_point(m: u64, mut index: u128) -> PairOfQuadrics<BigInt> {
    let base = (2 * m + 1) as u128;
    PairOfQuadrics::from_coords(std::array::from_fn(|_| {
        let d = (index % base) as i64;
        index /= base;
        BigInt::from(d - m as i64)
    }))
}

pub fn sample_point(m: u64, seed: u64, index: u64) -> PairOfQuadrics<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let m = m as i64;
    PairOfQuadrics::from_coords(std::array::from_fn(|_| BigInt::from(rng.gen_range(-m..=m))))
}

/// Wilson score interval at 95%.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let (k, n) = (hits as f64, n as f64);
    let phat = k / n;
    let denom = 1.0 + z * z / n;
    let centre = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Applies the predicates to every pair of a box range or a seeded sample.
pub fn scan_box(m: u64, predicates: &[Predicate], mode: ScanMode, resume: Option<&Checkpoint>) -> Result<CountReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let start_time = Instant::now();
    let (lo, hi) = match mode {
        ScanMode::Exhaustive { start, end } => {
            let size = box_size(m).ok_or_else(|| Error::InvalidArgument("box too large to index".into()))?;
            if start > end || end > size {
                return Err(Error::InvalidArgument(format!("index range must lie in 0..{size}")));
            }
            (start, end)
        }
        ScanMode::Sampled { samples, .. } => (0, samples as u128),
    };
    let mut report = CountReport::new(m);
    let mut cursor = lo;
    if let Some(cp) = resume {
        let c = cp.cursor as u128;
        if c < lo || c > hi {
            return Err(Error::InvalidArgument("checkpoint cursor outside the scan range".into()));
        }
        cursor = c;
        report.counts = cp.counts.clone();
        report.items = cp.items;
        report.checkpoints.push(cp.clone());
    }
    let point = |idx: u128| match mode {
        ScanMode::Exhaustive { .. } => box_point(m, idx),
        ScanMode::Sampled { seed, .. } => sample_point(m, seed, idx as u64),
    };
    let blocks: Vec<(u128, u128)> = {
        let mut v = Vec::new();
        let mut s = cursor;
        while s < hi {
            let e = (s + BLOCK as u128).min(hi);
            v.push((s, e));
            s = e;
        }
        v
    };
    let per_block: Vec<Result<(Vec<u64>, u64, u64)>> = blocks
        .par_iter()
        .map(|&(s, e)| {
            let mut hits = vec![0u64; predicates.len()];
            for idx in s..e {
                let pair = point(idx);
                for (h, pred) in hits.iter_mut().zip(predicates) {
                    if pred.eval(&pair)? {
                        *h += 1;
                    }
                }
            }
            Ok((hits, (e - s) as u64, e as u64))
        })
        .collect();
    let mut units = Vec::with_capacity(per_block.len());
    for r in per_block {
        let (hits, items, end) = r?;
        let counts: BTreeMap<String, u64> = predicates.iter().zip(hits).map(|(p, h)| (p.name(), h)).collect();
        units.push((counts, items, end));
    }
    fold_units(&mut report, units);
    for pred in predicates {
        let name = pred.name();
        report.counts.entry(name.clone()).or_insert(0);
        let hits = report.count(&name);
        let (a, b) = wilson_interval(hits, report.items);
        let freq = if report.items == 0 { 0.0 } else { hits as f64 / report.items as f64 };
        report.derived.insert(format!("{name}.frequency"), format!("{freq:.8}"));
        report.derived.insert(format!("{name}.ci95"), format!("[{a:.8}, {b:.8}]"));
    }
    report.elapsed_ms = start_time.elapsed().as_millis();
    Ok(report)
}
