use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{fold_units, Checkpoint, CountReport};
use crate::arith::{icbrt_strict, isqrt_u128};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn key(&self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "pos" => Ok(Sign::Plus),
            "-" | "minus" | "neg" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("sign must be + or -, got {other:?}"))),
        }
    }
}

/// Pairs `(I, J)` with `H(I, J) < X` split by the sign of `4I^3 - J^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantCounts {
    pub plus: u64,
    pub minus: u64,
    pub zero: u64,
}

impl InvariantCounts {
    pub fn total(&self) -> u64 {
        self.plus + self.minus + self.zero
    }

    pub fn get(&self, sign: Sign) -> u64 {
        match sign {
            Sign::Plus => self.plus,
            Sign::Minus => self.minus,
        }
    }

    fn to_map(self) -> BTreeMap<String, u64> {
        BTreeMap::from([("plus".into(), self.plus), ("minus".into(), self.minus), ("zero".into(), self.zero)])
    }

    pub fn from_report(report: &CountReport) -> Self {
        InvariantCounts { plus: report.count("plus"), minus: report.count("minus"), zero: report.count("zero") }
    }
}

/// Row ranges: `|I|^3 < X` and `|J| <= j_max` with `J^2 < 4X`.
fn ranges(x: u128) -> (i128, i128) {
    let i_max = icbrt_strict(x) as i128;
    let j_max = isqrt_u128(4 * x - 1) as i128;
    (i_max, j_max)
}

fn row_by_loop(i: i128, j_max: i128) -> InvariantCounts {
    let c = 4 * i * i * i;
    let mut out = InvariantCounts::default();
    for j in -j_max..=j_max {
        match (c - j * j).signum() {
            1 => out.plus += 1,
            -1 => out.minus += 1,
            _ => out.zero += 1,
        }
    }
    out
}

fn row_closed_form(i: i128, j_max: i128) -> InvariantCounts {
    let width = (2 * j_max + 1) as u64;
    if i < 0 {
        return InvariantCounts { plus: 0, minus: width, zero: 0 };
    }
    if i == 0 {
        return InvariantCounts { plus: 0, minus: width - 1, zero: 1 };
    }
    let c = (4 * i * i * i) as u128;
    let below = (isqrt_u128(c - 1) as i128).min(j_max);
    let plus = (2 * below + 1) as u64;
    let r = isqrt_u128(c);
    let zero = if r * r == c && (r as i128) <= j_max { 2 } else { 0 };
    InvariantCounts { plus, minus: width - plus - zero, zero }
}

/// Exact double loop over `I` rows, chunked and merged in row order. `resume`
/// continues from a checkpoint of an earlier run with the same `X`.
pub fn count_invariant_pairs(x: u64, chunk_rows: usize, resume: Option<&Checkpoint>) -> Result<CountReport> {
    if x == 0 {
        return Err(Error::InvalidArgument("X must be at least 1".into()));
    }
    if chunk_rows == 0 {
        return Err(Error::InvalidArgument("chunk size must be positive".into()));
    }
    let start = Instant::now();
    let (i_max, j_max) = ranges(x as u128);
    let rows: Vec<i128> = (-i_max..=i_max).collect();
    let mut report = CountReport::new(x);
    let first = match resume {
        Some(cp) => {
            if cp.cursor > rows.len() as u64 {
                return Err(Error::InvalidArgument("checkpoint cursor beyond the last row".into()));
            }
            report.counts = cp.counts.clone();
            report.items = cp.items;
            report.checkpoints.push(cp.clone());
            cp.cursor as usize
        }
        None => 0,
    };
    let per_row: Vec<InvariantCounts> = rows[first..]
        .par_chunks(chunk_rows)
        .flat_map_iter(|chunk| chunk.iter().map(|&i| row_by_loop(i, j_max)).collect::<Vec<_>>())
        .collect();
    let units = per_row.into_iter().enumerate().map(|(k, c)| (c.to_map(), c.total(), (first + k + 1) as u64));
    fold_units(&mut report, units);
    for key in ["plus", "minus", "zero"] {
        report.counts.entry(key.into()).or_insert(0);
    }
    let scale = (x as f64).powf(5.0 / 6.0);
    report.derived.insert("plus_ratio".into(), format!("{:.6}", report.count("plus") as f64 / scale));
    report.derived.insert("minus_ratio".into(), format!("{:.6}", report.count("minus") as f64 / scale));
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Per-row closed form, an independent check on the double loop.
pub fn count_invariant_pairs_closed_form(x: u64) -> InvariantCounts {
    let (i_max, j_max) = ranges(x as u128);
    (-i_max..=i_max).map(|i| row_closed_form(i, j_max)).fold(InvariantCounts::default(), |a, b| InvariantCounts {
        plus: a.plus + b.plus,
        minus: a.minus + b.minus,
        zero: a.zero + b.zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_one() {
        let r = count_invariant_pairs(1, 4, None).unwrap();
        assert_eq!(InvariantCounts::from_report(&r), InvariantCounts { plus: 0, minus: 2, zero: 1 });
    }

    #[test]
    fn loop_matches_closed_form_and_partition() {
        for x in [1u64, 2, 7, 8, 9, 100, 1000, 12345, 1_000_000] {
            let r = count_invariant_pairs(x, 3, None).unwrap();
            let c = InvariantCounts::from_report(&r);
            assert_eq!(c, count_invariant_pairs_closed_form(x), "X = {x}");
            // all pairs with 4|I|^3 < 4X and J^2 < 4X
            let (i_max, j_max) = ranges(x as u128);
            assert_eq!(c.total() as i128, (2 * i_max + 1) * (2 * j_max + 1));
            assert_eq!(r.items, c.total());
        }
    }

    #[test]
    fn chunking_and_resume_agree() {
        let x = 50_000_000u64;
        let a = count_invariant_pairs(x, 1, None).unwrap();
        let b = count_invariant_pairs(x, 97, None).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.checkpoints, b.checkpoints);
        let cp = &a.checkpoints[a.checkpoints.len() / 2];
        let resumed = count_invariant_pairs(x, 13, Some(cp)).unwrap();
        assert_eq!(resumed.counts, a.counts);
    }

    #[test]
    fn perfect_square_boundary() {
        // I = 1: J^2 = 4 gives two boundary pairs once 4 < 4X.
        let c = count_invariant_pairs_closed_form(2);
        assert_eq!(c.zero, 3);
    }
}
