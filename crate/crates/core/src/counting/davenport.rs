use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial as `(coefficient, exponent tuple)` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(BigRational, Vec<u32>)>,
}

impl Polynomial {
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c.to_f64().unwrap_or(f64::NAN) * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Integer multiple with the same sign pattern.
    fn integral(&self) -> Vec<(i128, Vec<u32>)> {
        let lcm = self.terms.iter().fold(BigInt::one(), |acc, (c, _)| acc.lcm(c.denom()));
        self.terms
            .iter()
            .map(|(c, e)| {
                let v = (c * BigRational::from_integer(lcm.clone())).to_integer();
                (v.to_i128().expect("coefficient fits in i128"), e.clone())
            })
            .collect()
    }
}

/// `poly <= 0` or `poly >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub poly: Polynomial,
    pub upper: bool,
}

/// A bounded region: a coordinate box cut out by polynomial inequalities.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub dim: usize,
    pub bounds: Vec<(BigRational, BigRational)>,
    pub constraints: Vec<Constraint>,
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").trim_start_matches('0').parse().unwrap_or_default();
    let value = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    Ok(if neg { -value } else { value })
}

impl Region {
    /// Parses the line grammar
    /// `dim n`, `bound i lo hi`, `le|ge coef@e1,..,en ...` (the polynomial is compared with 0);
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Region> {
        let mut dim: Option<usize> = None;
        let mut bounds: Vec<Option<(BigRational, BigRational)>> = Vec::new();
        let mut constraints = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let mut words = line.split_whitespace();
            let keyword = words.next().expect("nonempty line");
            match keyword {
                "dim" => {
                    let n: usize = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| err("dim needs a number"))?;
                    if !(1..=4).contains(&n) || dim.is_some() {
                        return Err(err("dim must be given once, between 1 and 4"));
                    }
                    dim = Some(n);
                    bounds = vec![None; n];
                }
                "bound" => {
                    let n = dim.ok_or_else(|| err("dim must come first"))?;
                    let w: Vec<&str> = words.collect();
                    if w.len() != 3 {
                        return Err(err("bound needs: index lo hi"));
                    }
                    let i: usize = w[0].parse().map_err(|_| err("bad index"))?;
                    if i >= n {
                        return Err(err("index out of range"));
                    }
                    let (lo, hi) = (parse_rational(w[1])?, parse_rational(w[2])?);
                    if lo > hi {
                        return Err(err("empty bound"));
                    }
                    bounds[i] = Some((lo, hi));
                }
                "le" | "ge" => {
                    let n = dim.ok_or_else(|| err("dim must come first"))?;
                    let mut terms = Vec::new();
                    for w in words {
                        let (c, e) = w.split_once('@').ok_or_else(|| err("terms look like coef@e1,e2"))?;
                        let exps: Vec<u32> =
                            e.split(',').map(|t| t.parse().map_err(|_| err("bad exponent"))).collect::<Result<_>>()?;
                        if exps.len() != n {
                            return Err(err("exponent tuple length must equal dim"));
                        }
                        terms.push((parse_rational(c)?, exps));
                    }
                    if terms.is_empty() {
                        return Err(err("empty polynomial"));
                    }
                    constraints.push(Constraint { poly: Polynomial { terms }, upper: keyword == "le" });
                }
                other => return Err(err(&format!("unknown keyword {other:?}"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing dim line".into()))?;
        let bounds = bounds
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::UnboundedRegion(format!("coordinate {i} has no bound"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Region { dim, bounds, constraints })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            writeln!(out, "bound {i} {lo} {hi}").unwrap();
        }
        for c in &self.constraints {
            let terms: Vec<String> = c
                .poly
                .terms
                .iter()
                .map(|(k, e)| format!("{k}@{}", e.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
                .collect();
            writeln!(out, "{} {}", if c.upper { "le" } else { "ge" }, terms.join(" ")).unwrap();
        }
        out
    }

    /// Image of `[0, n]^2` under the unimodular matrix `m`.
    pub fn sheared_square(n: i64, m: [[i64; 2]; 2]) -> Result<Region> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() != 1 {
            return Err(Error::InvalidArgument("shear must be unimodular".into()));
        }
        // u = m^-1 v
        let inv = [[m[1][1] * det, -m[0][1] * det], [-m[1][0] * det, m[0][0] * det]];
        let corners = [[0, 0], [n, 0], [0, n], [n, n]].map(|u| [m[0][0] * u[0] + m[0][1] * u[1], m[1][0] * u[0] + m[1][1] * u[1]]);
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        let bounds = (0..2)
            .map(|k| {
                let lo = corners.iter().map(|c| c[k]).min().unwrap();
                let hi = corners.iter().map(|c| c[k]).max().unwrap();
                (q(lo), q(hi))
            })
            .collect();
        let mut constraints = Vec::new();
        for row in inv {
            let lin = |shift: i64, sign: i64| Polynomial {
                terms: vec![(q(sign * row[0]), vec![1, 0]), (q(sign * row[1]), vec![0, 1]), (q(shift), vec![0, 0])],
            };
            constraints.push(Constraint { poly: lin(0, 1), upper: false });
            constraints.push(Constraint { poly: lin(-n, 1), upper: true });
        }
        Ok(Region { dim: 2, bounds, constraints })
    }

    fn integer_ranges(&self) -> Vec<(i64, i64)> {
        self.bounds
            .iter()
            .map(|(lo, hi)| (lo.ceil().to_integer().to_i64().unwrap(), hi.floor().to_integer().to_i64().unwrap()))
            .collect()
    }

    fn contains_f64(&self, x: &[f64]) -> bool {
        self.bounds.iter().zip(x).all(|((lo, hi), v)| lo.to_f64().unwrap() <= *v && *v <= hi.to_f64().unwrap())
            && self.constraints.iter().all(|c| {
                let v = c.poly.eval_f64(x);
                if c.upper { v <= 0.0 } else { v >= 0.0 }
            })
    }
}

fn eval_int(terms: &[(i128, Vec<u32>)], x: &[i64]) -> Option<i128> {
    let mut acc: i128 = 0;
    for (c, e) in terms {
        let mut t = *c;
        for (&k, &v) in e.iter().zip(x) {
            for _ in 0..k {
                t = t.checked_mul(v as i128)?;
            }
        }
        acc = acc.checked_add(t)?;
    }
    Some(acc)
}

/// Exact number of integer points of the region.
pub fn lattice_count(region: &Region) -> Result<u64> {
    let ranges = region.integer_ranges();
    let polys: Vec<(Vec<(i128, Vec<u32>)>, bool)> = region.constraints.iter().map(|c| (c.poly.integral(), c.upper)).collect();
    let (first_lo, first_hi) = ranges[0];
    if first_lo > first_hi {
        return Ok(0);
    }
    let rest = &ranges[1..];
    let total: Result<u64> = (first_lo..=first_hi)
        .into_par_iter()
        .map(|x0| {
            let mut count = 0u64;
            let mut point = vec![x0; region.dim];
            let sizes: Vec<u64> = rest.iter().map(|(lo, hi)| if hi >= lo { (hi - lo + 1) as u64 } else { 0 }).collect();
            let cells: u64 = sizes.iter().product();
            for code in 0..cells {
                let mut c = code;
                for (k, (lo, _)) in rest.iter().enumerate() {
                    point[k + 1] = lo + (c % sizes[k]) as i64;
                    c /= sizes[k];
                }
                let mut inside = true;
                for (poly, upper) in &polys {
                    let v = eval_int(poly, &point).ok_or_else(|| Error::InvalidArgument("overflow evaluating region".into()))?;
                    if (*upper && v > 0) || (!*upper && v < 0) {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    count += 1;
                }
            }
            Ok(count)
        })
        .sum();
    total
}

type Point = (BigRational, BigRational);

/// Clips a convex polygon by `c0 + c1 x + c2 y <= 0`.
fn clip(poly: &[Point], c: &[BigRational; 3]) -> Vec<Point> {
    let f = |p: &Point| &c[0] + &c[1] * &p.0 + &c[2] * &p.1;
    let mut out = Vec::new();
    for k in 0..poly.len() {
        let (p, q) = (&poly[k], &poly[(k + 1) % poly.len()]);
        let (fp, fq) = (f(p), f(q));
        if !fp.is_positive() {
            out.push(p.clone());
        }
        if (fp.is_positive() && fq.is_negative()) || (fp.is_negative() && fq.is_positive()) {
            let t = &fp / (&fp - &fq);
            out.push((&p.0 + &t * (&q.0 - &p.0), &p.1 + &t * (&q.1 - &p.1)));
        }
    }
    out
}

fn linear_coefficients(c: &Constraint) -> Option<[BigRational; 3]> {
    let mut out = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    for (k, e) in &c.poly.terms {
        let slot = match e.as_slice() {
            [0, 0] => 0,
            [1, 0] => 1,
            [0, 1] => 2,
            _ => return None,
        };
        out[slot] += k;
    }
    if !c.upper {
        out = out.map(|v| -v);
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DavenportResult {
    pub count: u64,
    /// Exact rational when `volume_exact`, otherwise a decimal estimate.
    pub volume: String,
    pub volume_f64: f64,
    pub volume_exact: bool,
    /// Difference between the grid estimate and the half-resolution estimate.
    pub volume_error: f64,
    /// Largest volume of a projection onto a proper coordinate subspace.
    pub projection: f64,
    pub projections: Vec<(Vec<usize>, f64)>,
}

impl DavenportResult {
    pub fn discrepancy(&self) -> f64 {
        (self.count as f64 - self.volume_f64).abs()
    }
}

fn polygon(region: &Region) -> Option<Vec<Point>> {
    if region.dim != 2 {
        return None;
    }
    let cuts: Vec<[BigRational; 3]> = region.constraints.iter().map(linear_coefficients).collect::<Option<_>>()?;
    let (x, y) = (&region.bounds[0], &region.bounds[1]);
    let mut poly: Vec<Point> =
        vec![(x.0.clone(), y.0.clone()), (x.1.clone(), y.0.clone()), (x.1.clone(), y.1.clone()), (x.0.clone(), y.1.clone())];
    for c in &cuts {
        poly = clip(&poly, c);
        if poly.is_empty() {
            break;
        }
    }
    Some(poly)
}

fn shoelace(poly: &[Point]) -> BigRational {
    let mut twice = BigRational::zero();
    for k in 0..poly.len() {
        let (p, q) = (&poly[k], &poly[(k + 1) % poly.len()]);
        twice += &p.0 * &q.1 - &q.0 * &p.1;
    }
    (twice / BigRational::from_integer(BigInt::from(2))).abs()
}

fn extent(poly: &[Point], k: usize) -> BigRational {
    let vals: Vec<&BigRational> = poly.iter().map(|p| if k == 0 { &p.0 } else { &p.1 }).collect();
    match (vals.iter().min(), vals.iter().max()) {
        (Some(lo), Some(hi)) => (*hi).clone() - (*lo).clone(),
        _ => BigRational::zero(),
    }
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1..(1u32 << n) - 1).map(|mask| (0..n).filter(|k| mask >> k & 1 == 1).collect()).collect()
}

/// Midpoint-grid volume with `cells` cells per axis, and projected volumes.
fn grid_volume(region: &Region, cells: usize) -> (f64, Vec<(Vec<usize>, f64)>) {
    let n = region.dim;
    let lo: Vec<f64> = region.bounds.iter().map(|b| b.0.to_f64().unwrap()).collect();
    let width: Vec<f64> = region.bounds.iter().map(|b| (b.1.clone() - b.0.clone()).to_f64().unwrap()).collect();
    let h: Vec<f64> = width.iter().map(|w| w / cells as f64).collect();
    let total = cells.pow(n as u32);
    let inside: Vec<usize> = (0..total)
        .into_par_iter()
        .filter(|&code| {
            let mut c = code;
            let x: Vec<f64> = (0..n)
                .map(|k| {
                    let i = c % cells;
                    c /= cells;
                    lo[k] + (i as f64 + 0.5) * h[k]
                })
                .collect();
            region.contains_f64(&x)
        })
        .collect();
    let cell_volume: f64 = h.iter().product();
    let volume = inside.len() as f64 * cell_volume;
    let mut projections = Vec::new();
    for subset in subsets(n) {
        let mut seen = std::collections::HashSet::new();
        for &code in &inside {
            let idx: Vec<usize> = subset.iter().map(|&k| code / cells.pow(k as u32) % cells).collect();
            seen.insert(idx);
        }
        let v: f64 = subset.iter().map(|&k| h[k]).product::<f64>() * seen.len() as f64;
        projections.push((subset, v));
    }
    (volume, projections)
}

/// Exact lattice count against the volume and the largest coordinate projection.
/// Linear planar regions get exact polygon volumes, everything else a grid
/// estimate with `grid_cells` cells per axis.
pub fn davenport_check(region: &Region, grid_cells: usize) -> Result<DavenportResult> {
    let count = lattice_count(region)?;
    if let Some(poly) = polygon(region) {
        let volume = if poly.len() < 3 { BigRational::zero() } else { shoelace(&poly) };
        let projections: Vec<(Vec<usize>, f64)> =
            (0..2).map(|k| (vec![k], if poly.is_empty() { 0.0 } else { extent(&poly, k).to_f64().unwrap() })).collect();
        let projection = projections.iter().map(|(_, v)| *v).fold(0.0, f64::max);
        return Ok(DavenportResult {
            count,
            volume_f64: volume.to_f64().unwrap(),
            volume: volume.to_string(),
            volume_exact: true,
            volume_error: 0.0,
            projection,
            projections,
        });
    }
    if grid_cells < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 cells per axis".into()));
    }
    let (fine, projections) = grid_volume(region, grid_cells);
    let (coarse, _) = grid_volume(region, grid_cells / 2);
    let projection = projections.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(DavenportResult {
        count,
        volume: format!("{fine:.6}"),
        volume_f64: fine,
        volume_exact: false,
        volume_error: (fine - coarse).abs(),
        projection,
        projections,
    })
}
