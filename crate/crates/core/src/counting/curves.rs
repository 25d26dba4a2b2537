use std::collections::BTreeMap;
use std::time::Instant;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{fold_units, CountReport};
use crate::arith::{factor_u64, icbrt_strict, isqrt_u128, primes_up_to};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficient {
    A,
    B,
}

/// `coefficient = residue mod modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congruence {
    pub coefficient: Coefficient,
    pub residue: u64,
    pub modulus: u64,
}

/// Curves `y^2 = x^3 + A x + B` cut out by congruence conditions; empty means all curves.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub congruences: Vec<Congruence>,
}

impl CurveFamily {
    /// One condition per line, `A r mod m` or `B r mod m`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut congruences = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = || Error::Parse(format!("line {}: expected `A r mod m` or `B r mod m`", lineno + 1));
            let w: Vec<&str> = line.split_whitespace().collect();
            if w.len() != 4 || w[2] != "mod" {
                return Err(err());
            }
            let coefficient = match w[0] {
                "A" => Coefficient::A,
                "B" => Coefficient::B,
                _ => return Err(err()),
            };
            let residue: i64 = w[1].parse().map_err(|_| err())?;
            let modulus: u64 = w[3].parse().map_err(|_| err())?;
            if modulus == 0 {
                return Err(err());
            }
            congruences.push(Congruence { coefficient, residue: residue.rem_euclid(modulus as i64) as u64, modulus });
        }
        Ok(CurveFamily { congruences })
    }

    pub fn contains(&self, a: i64, b: i64) -> bool {
        self.congruences.iter().all(|c| {
            let v = match c.coefficient {
                Coefficient::A => a,
                Coefficient::B => b,
            };
            v.rem_euclid(c.modulus as i64) as u64 == c.residue
        })
    }

    /// The conditions at `p` on one coefficient, as congruences modulo powers of `p`.
    fn local(&self, p: u64, coefficient: Coefficient) -> Vec<(u64, u32)> {
        self.congruences
            .iter()
            .filter(|c| c.coefficient == coefficient)
            .filter_map(|c| {
                let e = factor_u64(c.modulus).into_iter().find(|(q, _)| *q == p)?.1;
                Some((c.residue % p.pow(e), e))
            })
            .collect()
    }

    fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> =
            self.congruences.iter().flat_map(|c| factor_u64(c.modulus).into_iter().map(|(p, _)| p)).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }
}

/// `p^4 | A` implies `p^6 ∤ B` for every prime `p`.
pub fn is_minimal(a: i64, b: i64) -> bool {
    let g = (a as i128).gcd(&(b as i128));
    if g == 0 {
        return false;
    }
    // a prime with p^4 | A and p^6 | B divides gcd(A, B)
    let g = g.unsigned_abs() as u64;
    let (a, b) = (a.unsigned_abs() as u128, b.unsigned_abs() as u128);
    factor_u64(g).into_iter().all(|(p, _)| {
        let (p4, p6) = ((p as u128).pow(4), (p as u128).pow(6));
        !(a % p4 == 0 && b % p6 == 0)
    })
}

fn nonsingular(a: i64, b: i64) -> bool {
    let (a, b) = (a as i128, b as i128);
    4 * a * a * a + 27 * b * b != 0
}

/// `max(27 |A|^3, 729 B^2 / 4) < X`, compared as `4 * 27 |A|^3 < 4X` and `729 B^2 < 4X`.
pub fn height_below(a: i64, b: i64, x: u64) -> bool {
    let (a, b, x) = (a.unsigned_abs() as u128, b.unsigned_abs() as u128, x as u128);
    4 * 27 * a * a * a < 4 * x && 729 * b * b < 4 * x
}

/// Exact count of residues `v mod p^big` with `v = r mod p^e` for every local condition
/// and, when `k > 0`, `v = 0 mod p^k`.
fn residue_count(conditions: &[(u64, u32)], p: u64, k: u32, big: u32) -> u64 {
    let modulus = p.pow(big);
    (0..modulus)
        .filter(|v| conditions.iter().all(|(r, e)| v % p.pow(*e) == *r) && v % p.pow(k) == 0)
        .count() as u64
}

/// Same count by intersecting congruence classes.
fn residue_count_closed(conditions: &[(u64, u32)], p: u64, k: u32, big: u32) -> u64 {
    let mut classes: Vec<(u64, u32)> = conditions.to_vec();
    classes.push((0, k));
    let (mut r, mut e) = (0u64, 0u32);
    for (r2, e2) in classes {
        let m = e.min(e2);
        if r % p.pow(m) != r2 % p.pow(m) {
            return 0;
        }
        if e2 > e {
            r = r2;
            e = e2;
        }
    }
    p.pow(big - e)
}

/// Local density of minimal models in the family at `p`.
pub fn local_density(family: &CurveFamily, p: u64, exact_counting: bool) -> f64 {
    let la = family.local(p, Coefficient::A);
    let lb = family.local(p, Coefficient::B);
    let ea = la.iter().map(|c| c.1).max().unwrap_or(0).max(4);
    let eb = lb.iter().map(|c| c.1).max().unwrap_or(0).max(6);
    let count = if exact_counting { residue_count } else { residue_count_closed };
    let (na, nb) = (p.pow(ea) as f64, p.pow(eb) as f64);
    let fam_a = count(&la, p, 0, ea) as f64 / na;
    let fam_b = count(&lb, p, 0, eb) as f64 / nb;
    let deep_a = count(&la, p, 4, ea) as f64 / na;
    let deep_b = count(&lb, p, 6, eb) as f64 / nb;
    fam_a * fam_b - deep_a * deep_b
}

/// Primes used in the density product.
const DENSITY_PRIME_BOUND: u64 = 1000;

/// `(8/81) prod_p density_p`: the area of `H' < 1` in the `(A, B)` plane times the
/// local densities. Residues are enumerated when `p^(exponent)` is at most `10^6`.
pub fn predicted_constant(family: &CurveFamily) -> (f64, BTreeMap<u64, f64>) {
    let mut primes = primes_up_to(DENSITY_PRIME_BOUND);
    primes.extend(family.primes().into_iter().filter(|p| *p > DENSITY_PRIME_BOUND));
    let mut locals = BTreeMap::new();
    let mut product = 8.0 / 81.0;
    for p in primes {
        let small = (p as f64).powi(6) <= 1e6 && family.local(p, Coefficient::B).iter().all(|c| c.1 <= 6);
        let d = local_density(family, p, small);
        if p < 20 || !family.local(p, Coefficient::A).is_empty() || !family.local(p, Coefficient::B).is_empty() {
            locals.insert(p, d);
        }
        product *= d;
    }
    (product, locals)
}

/// Minimal nonsingular `(A, B)` in the family with `H'(E) < X`.
pub fn enumerate_curves(x: u64, family: &CurveFamily) -> Result<CountReport> {
    if x == 0 {
        return Err(Error::InvalidArgument("X must be at least 1".into()));
    }
    if family.congruences.iter().any(|c| c.modulus < 2) {
        return Err(Error::InvalidArgument("moduli must be at least 2".into()));
    }
    let start = Instant::now();
    let xx = x as u128;
    // 27 |A|^3 < X  and  729 B^2 < 4X
    let a_max = icbrt_strict(xx.div_ceil(27)) as i64;
    let a_max = (0..=a_max + 1).rev().find(|&a| height_below(a, 0, x)).unwrap_or(-1);
    let b_max = isqrt_u128((4 * xx).saturating_sub(1) / 729) as i64;
    let b_max = (0..=b_max + 1).rev().find(|&b| height_below(0, b, x)).unwrap_or(-1);
    let mut report = CountReport::new(x);
    if a_max >= 0 && b_max >= 0 {
        let rows: Vec<(u64, u64)> = (-a_max..=a_max)
            .into_par_iter()
            .map(|a| {
                let n = (-b_max..=b_max).filter(|&b| nonsingular(a, b) && is_minimal(a, b) && family.contains(a, b)).count();
                (n as u64, (2 * b_max + 1) as u64)
            })
            .collect();
        let units = rows
            .into_iter()
            .enumerate()
            .map(|(k, (n, items))| (BTreeMap::from([("curves".to_string(), n)]), items, k as u64 + 1));
        fold_units(&mut report, units);
    }
    report.counts.entry("curves".into()).or_insert(0);
    let (constant, locals) = predicted_constant(family);
    let ratio = report.count("curves") as f64 / (x as f64).powf(5.0 / 6.0);
    report.derived.insert("ratio".into(), format!("{ratio:.6}"));
    report.derived.insert("predicted_constant".into(), format!("{constant:.6}"));
    report.derived.insert("relative_error".into(), format!("{:.6}", (ratio - constant).abs() / constant));
    for (p, d) in locals {
        report.derived.insert(format!("density.{p}"), format!("{d:.10}"));
    }
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(x: u64, bound: i64, family: &CurveFamily) -> u64 {
        let mut n = 0;
        for a in -bound..=bound {
            for b in -bound..=bound {
                if height_below(a, b, x) && nonsingular(a, b) && is_minimal(a, b) && family.contains(a, b) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn tiny_heights_match_brute_force() {
        let full = CurveFamily::default();
        assert_eq!(enumerate_curves(1, &full).unwrap().count("curves"), brute(1, 2, &full));
        assert_eq!(enumerate_curves(1, &full).unwrap().count("curves"), 0);
        for x in [2u64, 28, 200, 730, 5000, 100_000] {
            assert_eq!(enumerate_curves(x, &full).unwrap().count("curves"), brute(x, 40, &full), "X = {x}");
        }
    }

    #[test]
    fn minimality() {
        assert!(!is_minimal(16, 64));
        assert!(is_minimal(16, 32));
        assert!(!is_minimal(0, 0));
        assert!(!is_minimal(0, 729));
        assert!(is_minimal(81, 3));
        let r = enumerate_curves(1_000_000, &CurveFamily::default()).unwrap();
        assert!(r.count("curves") > 0);
    }

    #[test]
    fn densities_by_counting_and_closed_form() {
        let fam = CurveFamily::parse("A 0 mod 4\nB 3 mod 9 # a comment\n").unwrap();
        for p in [2u64, 3, 5, 7] {
            let a = local_density(&fam, p, true);
            let b = local_density(&fam, p, false);
            assert!((a - b).abs() < 1e-15, "p = {p}");
        }
        let full = CurveFamily::default();
        assert!((local_density(&full, 2, true) - (1.0 - 2f64.powi(-10))).abs() < 1e-15);
        let (c, _) = predicted_constant(&full);
        assert!((c - 8.0 / 81.0 * 0.999_005_6).abs() < 1e-6);
    }

    #[test]
    fn family_parse_errors() {
        assert!(CurveFamily::parse("C 0 mod 4").is_err());
        assert!(CurveFamily::parse("A 0 mod 0").is_err());
        assert_eq!(CurveFamily::parse("A -1 mod 4").unwrap().congruences[0].residue, 3);
    }
}
