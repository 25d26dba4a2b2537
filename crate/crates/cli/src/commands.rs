use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use qpl_core::counting::scan::sample_point;
use qpl_core::counting::{
    count_invariant_pairs, davenport_check, enumerate_curves, scan_box, Checkpoint, CountReport, CurveFamily,
    Predicate, Region, ScanMode, Sign,
};
use qpl_core::local::{curve_four_torsion, qp_soluble, qp_soluble_default, stabilizer_order_exhaustive, stabilizer_order_fp, FpCurve, SolubilityVerdict};
use qpl_core::quartic::{clear_denominators, rational_linear_factor, real_classification, real_classification_rational};
use qpl_core::real::is_r_soluble;
use qpl_core::scalar::rational_to_f64;
use qpl_core::selmer::{hand_argument_dual, solve_extremal, ExtremalOutcome, MomentConstraints};
use qpl_core::{reducibility_case, sieve, BinaryQuartic, PairOfQuadrics, Zmod};

use crate::args::{Command, PairInput};
use crate::identities;
use crate::manifest::RunManifest;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(qpl_core::Error),
    Io(std::io::Error),
}

impl From<qpl_core::Error> for CliError {
    fn from(e: qpl_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub enum Format {
    Json,
    Csv,
}

pub struct Outcome {
    pub format: Format,
    pub body: String,
    pub params: BTreeMap<String, String>,
    pub totals: BTreeMap<String, String>,
    pub checkpoints: Vec<Checkpoint>,
    pub elapsed_ms: Option<u128>,
    /// A completed run whose result is a domain failure (exit status 1).
    pub failed: bool,
}

impl Outcome {
    fn json(value: Value) -> Self {
        Outcome {
            format: Format::Json,
            body: serde_json::to_string_pretty(&value).expect("serializable") + "\n",
            params: BTreeMap::new(),
            totals: BTreeMap::new(),
            checkpoints: Vec::new(),
            elapsed_ms: None,
            failed: false,
        }
    }

    fn csv(header: &str, rows: Vec<String>) -> Self {
        let mut body = format!("{header}\n");
        for r in rows {
            body.push_str(&r);
            body.push('\n');
        }
        Outcome { format: Format::Csv, ..Outcome::json(Value::Null) }.with_body(body)
    }

    fn with_body(mut self, body: String) -> Self {
        self.body = body;
        self
    }

    fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.params.insert(k.into(), v.to_string());
        self
    }

    fn total(mut self, k: &str, v: impl ToString) -> Self {
        self.totals.insert(k.into(), v.to_string());
        self
    }

    fn with_report(mut self, report: &CountReport) -> Self {
        for (k, v) in &report.counts {
            self.totals.insert(k.clone(), v.to_string());
        }
        self.checkpoints = report.checkpoints.clone();
        self.elapsed_ms = Some(report.elapsed_ms);
        self
    }
}

fn read_pair_text(input: &PairInput) -> CliResult<String> {
    match (&input.pair, &input.pair_file) {
        (Some(s), None) => Ok(s.clone()),
        (None, Some(path)) => Ok(std::fs::read_to_string(path)?),
        _ => Err(CliError::Usage("give exactly one of --pair or --pair-file".into())),
    }
}

fn rational_pair(input: &PairInput) -> CliResult<PairOfQuadrics<BigRational>> {
    read_pair_text(input)?.parse().map_err(|e: qpl_core::Error| CliError::Usage(e.to_string()))
}

fn integral_pair(input: &PairInput) -> CliResult<PairOfQuadrics<BigInt>> {
    rational_pair(input)?
        .to_integral()
        .ok_or_else(|| CliError::Usage("this command needs integral coordinates".into()))
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn load_checkpoint(path: &PathBuf, command: &str) -> CliResult<Option<Checkpoint>> {
    let manifest = RunManifest::load(path)?;
    if manifest.command != command {
        return Err(CliError::Usage(format!("{} is a manifest of {:?}, not {command:?}", path.display(), manifest.command)));
    }
    Ok(manifest.checkpoints.last().cloned())
}

fn invariants_json(pair: &PairOfQuadrics<BigRational>) -> CliResult<Value> {
    let f = pair.resolvent();
    let (i, j) = f.invariants_raw();
    let four = BigRational::from_integer(4.into());
    let scaled_disc = &four * &i * &i * &i - &j * &j;
    let disc = &scaled_disc / BigRational::from_integer(27.into());
    let abs_i = if i < BigRational::zero() { -i.clone() } else { i.clone() };
    let height = std::cmp::max(&abs_i * &abs_i * &abs_i, &j * &j / &four);
    let strongly_irreducible = if f.is_zero() {
        false
    } else {
        !disc.is_zero() && rational_linear_factor(&clear_denominators(&f))?.is_none()
    };
    Ok(json!({
        "pair": pair.to_string(),
        "I": i.to_string(),
        "J": j.to_string(),
        "disc": disc.to_string(),
        "height": height.to_string(),
        "resolvent": strings(f.coeffs()),
        "strongly_irreducible": strongly_irreducible,
    }))
}

pub fn run(command: &Command, seed: u64) -> CliResult<Outcome> {
    match command {
        Command::Invariants { input } => {
            let pair = rational_pair(input)?;
            Ok(Outcome::json(invariants_json(&pair)?).param("pair", pair))
        }
        Command::Classify { input, quartic } => classify(input, quartic.as_deref()),
        Command::CountIj { x, sign, chunk_rows, resume } => {
            let signs: Vec<Sign> = match sign.as_str() {
                "both" => vec![Sign::Plus, Sign::Minus],
                s => vec![s.parse().map_err(|e: qpl_core::Error| CliError::Usage(e.to_string()))?],
            };
            let cp = match resume {
                Some(path) => {
                    let m = RunManifest::load(path)?;
                    if m.params.get("X") != Some(&x.to_string()) {
                        return Err(CliError::Usage("the resumed manifest has a different X".into()));
                    }
                    load_checkpoint(path, "count-ij")?
                }
                None => None,
            };
            let report = count_invariant_pairs(*x, *chunk_rows, cp.as_ref())?;
            let rows = signs
                .iter()
                .map(|s| {
                    let label = if *s == Sign::Plus { "+" } else { "-" };
                    format!("{x},{label},{},{}", report.count(s.key()), report.derived[&format!("{}_ratio", s.key())])
                })
                .collect();
            Ok(Outcome::csv("X,sign,count,ratio", rows)
                .param("X", x)
                .param("sign", sign)
                .param("chunk_rows", chunk_rows)
                .with_report(&report))
        }
        Command::ScanBox { m, predicates, samples, start, end, resume } => {
            let preds: Vec<Predicate> = predicates
                .iter()
                .map(|s| s.parse())
                .collect::<Result<_, qpl_core::Error>>()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let mode = match (samples, start, end) {
                (Some(n), _, _) => ScanMode::Sampled { samples: *n, seed },
                (None, s, Some(e)) => ScanMode::Exhaustive { start: s.unwrap_or(0), end: *e },
                _ => return Err(CliError::Usage("give --samples, or an index range with --end".into())),
            };
            let cp = match resume {
                Some(path) => load_checkpoint(path, "scan-box")?,
                None => None,
            };
            let report = scan_box(*m, &preds, mode, cp.as_ref())?;
            let rows = preds
                .iter()
                .map(|p| {
                    let name = p.name();
                    let ci = report.derived[&format!("{name}.ci95")].trim_matches(['[', ']']).replace(", ", ",");
                    format!("{name},{},{},{},{ci}", report.count(&name), report.items, report.derived[&format!("{name}.frequency")])
                })
                .collect();
            let mut out = Outcome::csv("predicate,count,items,frequency,ci95_low,ci95_high", rows)
                .param("M", m)
                .param("predicates", predicates.join(","))
                .with_report(&report);
            match mode {
                ScanMode::Sampled { samples, seed } => out = out.param("samples", samples).param("seed", seed),
                ScanMode::Exhaustive { start, end } => out = out.param("start", start).param("end", end),
            }
            Ok(out)
        }
        Command::Davenport { region_file, grid } => {
            let region = Region::parse(&std::fs::read_to_string(region_file)?)?;
            let r = davenport_check(&region, *grid)?;
            let row = format!(
                "{},{},{},{:.6},{:.6},{:.6}",
                r.count,
                r.volume,
                r.volume_exact,
                r.volume_error,
                r.projection,
                r.discrepancy()
            );
            Ok(Outcome::csv("count,volume,volume_exact,volume_error,max_projection,discrepancy", vec![row])
                .param("region_file", region_file.display())
                .param("grid", grid)
                .total("count", r.count)
                .total("volume", &r.volume))
        }
        Command::Curves { x, family_file } => {
            let family = match family_file {
                Some(path) => CurveFamily::parse(&std::fs::read_to_string(path)?)?,
                None => CurveFamily::default(),
            };
            let report = enumerate_curves(*x, &family)?;
            let d = &report.derived;
            let row =
                format!("{x},{},{},{},{}", report.count("curves"), d["ratio"], d["predicted_constant"], d["relative_error"]);
            let mut out = Outcome::csv("X,count,ratio,predicted_constant,relative_error", vec![row])
                .param("X", x)
                .param("family_file", family_file.as_ref().map(|p| p.display().to_string()).unwrap_or_default())
                .with_report(&report);
            for (k, v) in d.iter().filter(|(k, _)| k.starts_with("density.")) {
                out = out.total(k, v);
            }
            Ok(out)
        }
        Command::SieveScan { primes, m, samples, normalized } => sieve_scan(primes, *m, *samples, *normalized, seed),
        Command::StabilizerFp { input, p, exhaustive } => {
            let pair = integral_pair(input)?;
            let reduced = pair.map(|c| Zmod::from_bigint(c, *p));
            let order = if *exhaustive { stabilizer_order_exhaustive(&reduced)? } else { stabilizer_order_fp(&reduced)? };
            let curve = FpCurve::jacobian_of_quartic(&reduced.resolvent())?;
            let torsion = curve_four_torsion(&curve);
            let (a2, a4, a6) = curve.coefficients();
            Ok(Outcome::json(json!({
                "p": p,
                "method": if *exhaustive { "exhaustive" } else { "gl2-first" },
                "order": order,
                "four_torsion": torsion,
                "jacobian": [a2, a4, a6],
                "agrees": order == torsion,
            }))
            .param("pair", &pair)
            .param("p", p)
            .param("exhaustive", exhaustive)
            .total("order", order)
            .total("four_torsion", torsion))
        }
        Command::QpSolve { input, p, depth } => {
            let pair = integral_pair(input)?;
            let (depth, verdict) = match depth {
                Some(d) => (*d, qp_soluble(&pair, *p, *d)?),
                None => qp_soluble_default(&pair, *p)?,
            };
            let mut record = json!({ "prime": p, "depth": depth, "verdict": verdict.label() });
            match &verdict {
                SolubilityVerdict::Soluble { witness, level, minor_valuation } => {
                    record["witness"] = json!(strings(witness));
                    record["level"] = json!(level);
                    record["minor_valuation"] = json!(minor_valuation);
                }
                SolubilityVerdict::Insoluble { level } => record["level"] = json!(level),
                SolubilityVerdict::Unknown { live_branches, .. } => record["live_branches"] = json!(live_branches),
            }
            Ok(Outcome::json(record).param("pair", &pair).param("p", p).param("depth", depth).total("verdict", verdict.label()))
        }
        Command::SelmerBound { s2_avg, order4_avg, caps } => {
            let parse = |s: &str| {
                s.parse::<BigRational>().map_err(|_| CliError::Usage(format!("targets are rationals like 3 or 7/2, got {s:?}")))
            };
            let c = MomentConstraints::new(parse(s2_avg)?, parse(order4_avg)?, caps[0], caps[1])?;
            let lp = c.program();
            let hand = hand_argument_dual();
            let hand_json = json!({
                "dual": strings(&hand),
                "bound": lp.dual_value(&hand).to_string(),
                "dual_feasible": lp.dual_feasible(&hand),
            });
            let params = |o: Outcome| o.param("s2_avg", s2_avg).param("order4_avg", order4_avg).param("caps", format!("{} {}", caps[0], caps[1]));
            match solve_extremal(&c)? {
                ExtremalOutcome::Optimal(s) => {
                    let distribution: Vec<Value> = s
                        .distribution
                        .iter()
                        .map(|(shape, mass)| json!({"a": shape.a, "b": shape.b, "mass": mass.to_string()}))
                        .collect();
                    let out = Outcome::json(json!({
                        "feasible": true,
                        "optimum": s.optimum.to_string(),
                        "optimum_decimal": rational_to_f64(&s.optimum),
                        "distribution": distribution,
                        "dual": strings(&s.dual),
                        "dual_rows": ["mass", "s2_avg", "order4_avg"],
                        "pivots": s.pivots,
                        "hand_argument": hand_json,
                    }));
                    Ok(params(out).total("optimum", &s.optimum))
                }
                ExtremalOutcome::Infeasible { certificate } => {
                    let mut out = Outcome::json(json!({
                        "feasible": false,
                        "certificate": strings(&certificate),
                        "certificate_rows": ["mass", "s2_avg", "order4_avg"],
                    }));
                    out.failed = true;
                    Ok(params(out).total("optimum", "infeasible"))
                }
            }
        }
        Command::VerifyIdentities { samples } => {
            let results = identities::run_all(*samples, seed);
            let failed = results.iter().any(|r| r.failures > 0);
            let rows = results.iter().map(|r| format!("{},{},{}", r.name, r.cases, r.failures)).collect();
            let mut out = Outcome::csv("check,cases,failures", rows).param("samples", samples).param("seed", seed);
            for r in &results {
                out = out.total(&r.name, r.failures);
            }
            out.failed = failed;
            Ok(out)
        }
    }
}

fn classify(input: &PairInput, quartic: Option<&str>) -> CliResult<Outcome> {
    if let Some(q) = quartic {
        if input.pair.is_some() || input.pair_file.is_some() {
            return Err(CliError::Usage("give either a pair or --quartic".into()));
        }
        let f: BinaryQuartic<BigInt> = q.parse().map_err(|e: qpl_core::Error| CliError::Usage(e.to_string()))?;
        let c = real_classification(&f)?;
        return Ok(Outcome::json(json!({
            "quartic": strings(f.coeffs()),
            "real_class": c.real_class,
            "has_rational_linear_factor": c.has_rational_linear_factor,
            "disc_is_zero": c.disc_is_zero,
        }))
        .param("quartic", q));
    }
    let pair = rational_pair(input)?;
    let f = pair.resolvent();
    let c = real_classification_rational(&f)?;
    let r_soluble = if c.disc_is_zero { None } else { is_r_soluble(&pair.map(rational_to_f64)).ok() };
    Ok(Outcome::json(json!({
        "pair": pair.to_string(),
        "strongly_irreducible": !c.disc_is_zero && !c.has_rational_linear_factor,
        "reducibility_case": reducibility_case(&pair),
        "resolvent": strings(f.coeffs()),
        "real_class": c.real_class,
        "has_rational_linear_factor": c.has_rational_linear_factor,
        "disc_is_zero": c.disc_is_zero,
        "r_soluble": r_soluble,
    }))
    .param("pair", pair))
}

fn sieve_scan(primes: &[u64], m: u64, samples: u64, normalized: bool, seed: u64) -> CliResult<Outcome> {
    let mut rows = Vec::new();
    let mut out_totals = BTreeMap::new();
    for &p in primes {
        // validates p > 3
        sieve::in_wp(&PairOfQuadrics::from_coords(std::array::from_fn(|_| BigInt::zero())), p)?;
        let per: Vec<(bool, bool, Option<bool>)> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let pair = if normalized {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i);
                    sieve::random_normalized(&mut rng, p, m as i64)
                } else {
                    sample_point(m, seed, i)
                };
                let wp = sieve::in_wp(&pair, p).expect("prime checked");
                let wp1 = wp && sieve::in_wp1(&pair, p).expect("prime checked");
                let gamma = (wp && !wp1).then(|| gamma_verified(&pair, p));
                (wp, wp1, gamma)
            })
            .collect();
        let wp = per.iter().filter(|t| t.0).count();
        let wp1 = per.iter().filter(|t| t.1).count();
        let wp2 = wp - wp1;
        let failures = per.iter().filter(|t| t.2 == Some(false)).count();
        rows.push(format!("{p},{wp},{wp1},{wp2},{}", failures == 0));
        out_totals.insert(format!("gamma_failures.{p}"), failures.to_string());
    }
    let mut out = Outcome::csv("p,count_Wp,count_Wp1,count_Wp2,gamma_verified", rows)
        .param("primes", primes.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
        .param("M", m)
        .param("samples", samples)
        .param("normalized", normalized)
        .param("seed", seed);
    out.totals = out_totals;
    Ok(out)
}

/// Normalizes a pair of `W_p^(2)`, applies `gamma_p` and checks the image.
fn gamma_verified(pair: &PairOfQuadrics<BigInt>, p: u64) -> bool {
    let Ok((_, normalized)) = sieve::normalize_wp2(pair, p) else { return false };
    match sieve::apply_gamma_p(&normalized, p) {
        Ok(image) => sieve::in_wp1(&image, p).unwrap_or(false) && sieve::discriminant(&image) == sieve::discriminant(pair),
        Err(_) => false,
    }
}
