//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that every criterion is reported even
//! when an earlier one fails. Criteria listed in `EXPECTED_FAILURES` are known
//! to be unattainable as stated; they still print FAIL, and the process only
//! exits nonzero on an unexpected failure (or if an expected failure starts
//! passing, so the list cannot go stale).

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpl_core::counting::davenport::lattice_count;
use qpl_core::counting::weights::sibound_estimates;
use qpl_core::counting::{coordinate_weight, davenport_check, verify_sibound_products, Region, WeightVector};
use qpl_core::forms::{coordinate_index, twist_identity_raw, witness_cubic_twist, witness_sum_of_fourth_powers, REDUCIBILITY_CONDITIONS};
use qpl_core::local::{curve_four_torsion, stabilizer_order_exhaustive, stabilizer_order_fp, FpCurve};
use qpl_core::quartic::{discriminant_resultant, roots_mod_p};
use qpl_core::selmer::{extremal_bound, pointwise_equalities, pointwise_inequality_check, selmer_sizes, MomentConstraints, SelmerShape};
use qpl_core::sieve::{self, Direction};
use qpl_core::{invariants, is_strongly_irreducible, BinaryQuartic, Matrix, PairOfQuadrics, Scalar, Zmod};

const SEED: u64 = 20240601;

/// Criteria that cannot hold as stated, with the reason printed next to FAIL.
const EXPECTED_FAILURES: &[(u32, &str)] = &[(
    10,
    "the exact optimum at caps (6, 10) is 341/568 = 3(2^10 - 1)/(5 * 2^10 - 8); 3/5 is only the limit as the cap on b grows",
)];

// Tolerances and budgets.
const N_PLUS_BRACKET: (f64, f64) = (1.55, 1.65);
const N_MINUS_BRACKET: (f64, f64) = (6.2, 6.6);
const COUNT_IJ_BUDGET: Duration = Duration::from_secs(5 * 60);
const TWIST_BUDGET: Duration = Duration::from_secs(60);
const STABILIZER_BUDGET: Duration = Duration::from_secs(20 * 60);
const DAVENPORT_SLACK: i64 = 4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Matrix<BigInt> {
    Matrix::from_rows((0..n).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()).collect())
}

fn reduce(pair: &PairOfQuadrics<BigInt>, p: u64) -> PairOfQuadrics<Zmod> {
    pair.map(|c| Zmod::from_bigint(c, p))
}

fn reduce_rational(pair: &PairOfQuadrics<BigRational>, p: u64) -> PairOfQuadrics<Zmod> {
    pair.map(|c| Zmod::from_bigint(c.numer(), p) * Zmod::from_bigint(c.denom(), p).inverse().expect("denominator prime to p"))
}

fn invariant_pair_counts() -> Outcome {
    let run = |x: &str, sign: &str| -> Result<Vec<(String, u64, f64)>, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out = Command::new(env!("CARGO_BIN_EXE_qpl"))
            .args(["--out-dir", dir.path().to_str().unwrap(), "count-ij", "--X", x, "--sign", sign])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        let text = String::from_utf8_lossy(&out.stdout).into_owned();
        Ok(text
            .lines()
            .skip(1)
            .filter_map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                Some((f.get(1)?.to_string(), f.get(2)?.parse().ok()?, f.get(3)?.parse().ok()?))
            })
            .collect())
    };
    let start = Instant::now();
    let big = match run("1000000000", "both") {
        Ok(rows) => rows,
        Err(e) => return outcome(false, format!("count-ij failed: {e}")),
    };
    let elapsed = start.elapsed();
    let small = match run("1", "both") {
        Ok(rows) => rows,
        Err(e) => return outcome(false, format!("count-ij failed: {e}")),
    };
    let find = |rows: &[(String, u64, f64)], s: &str| rows.iter().find(|r| r.0 == s).map(|r| (r.1, r.2));
    let (Some((np, rp)), Some((nm, rm)), Some((np1, _)), Some((nm1, _))) =
        (find(&big, "+"), find(&big, "-"), find(&small, "+"), find(&small, "-"))
    else {
        return outcome(false, "missing rows in count-ij output");
    };
    let within = |r: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&r);
    let pass = within(rp, N_PLUS_BRACKET)
        && within(rm, N_MINUS_BRACKET)
        && np1 == 0
        && nm1 == 2
        && elapsed <= COUNT_IJ_BUDGET;
    outcome(
        pass,
        format!(
            "X=1e9: N+={np} ratio {rp:.6}, N-={nm} ratio {rm:.6}; N+(1)={np1}, N-(1)={nm1}; {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn twist_identity() -> Outcome {
    let mut r = rng(2);
    let start = Instant::now();
    let cases = 10_000;
    let failures = (0..cases)
        .filter(|_| {
            let pair = PairOfQuadrics::random(&mut r, 5);
            let g2 = random_matrix(&mut r, 2, 5);
            let g4 = random_matrix(&mut r, 4, 5);
            !twist_identity_raw(&g2, &g4, &pair)
        })
        .count();
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed <= TWIST_BUDGET,
        format!("{cases} cases, {failures} failures, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn invariant_degrees() -> Outcome {
    let mut r = rng(3);
    let cases = 1000;
    let failures = (0..cases)
        .filter(|_| {
            let pair = PairOfQuadrics::random(&mut r, 10);
            let base = invariants(&pair);
            !(-2i64..=3).all(|l| {
                let lam = BigInt::from(l);
                let scaled = invariants(&pair.scale(&lam));
                scaled.i == &base.i * lam.pow(8) && scaled.j == &base.j * lam.pow(12)
            })
        })
        .count();
    outcome(failures == 0, format!("{cases} pairs x 6 scalars, {failures} failures"))
}

fn discriminant_coherence() -> Outcome {
    let mut r = rng(4);
    let cases = 10_000;
    let mut failures = 0;
    for _ in 0..cases {
        let pair = PairOfQuadrics::random(&mut r, 10);
        let inv = invariants(&pair);
        let ok = (&inv.scaled_disc % BigInt::from(27)).is_zero()
            && inv.disc_integer() == Some(discriminant_resultant(&pair.resolvent()));
        failures += usize::from(!ok);
    }
    outcome(failures == 0, format!("{cases} pairs, {failures} failures"))
}

fn reducibility_conditions() -> Outcome {
    let mut r = rng(5);
    let per_condition = 1000;
    let mut failures = [0usize; 4];
    for (k, labels) in REDUCIBILITY_CONDITIONS.iter().enumerate() {
        for _ in 0..per_condition {
            let mut pair = PairOfQuadrics::random(&mut r, 10);
            for l in labels.iter() {
                pair = pair.with_coord(coordinate_index(l).unwrap(), BigInt::zero());
            }
            failures[k] += usize::from(is_strongly_irreducible(&pair));
        }
    }
    outcome(failures == [0; 4], format!("{per_condition} pairs per condition, failures {failures:?}"))
}

fn weight_table() -> Outcome {
    let a11 = coordinate_weight("a11").ok();
    let expected = [[1, 2, 0, -2], [1, -2, 0, 2], [-1, 2, 0, 2], [-1, -2, 2, 2]];
    let monomials: Vec<[i32; 4]> = sibound_estimates().iter().map(|e| e.monomial.0).collect();
    let products = verify_sibound_products();
    let pass = a11 == Some(WeightVector([-1, -6, -2, -2])) && monomials == expected && products;
    let shown = a11.map(|w| w.to_string()).unwrap_or_else(|| "?".into());
    outcome(pass, format!("w(a11) = {shown}; estimates {monomials:?}; products {products}"))
}

/// Random pair over `F_p` with nonzero discriminant, as an integral lift.
fn random_nondegenerate(r: &mut ChaCha8Rng, p: u64) -> PairOfQuadrics<BigInt> {
    loop {
        let pair = PairOfQuadrics::from_coords(std::array::from_fn(|_| BigInt::from(r.gen_range(0..p))));
        if !(sieve::discriminant(&pair) % BigInt::from(p)).is_zero() {
            return pair;
        }
    }
}

fn stabilizers() -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut checked = 0;
    let check = |pair: &PairOfQuadrics<BigInt>, p: u64, exhaustive: bool, mismatches: &mut Vec<String>| {
        let red = reduce(pair, p);
        let order = if exhaustive { stabilizer_order_exhaustive(&red) } else { stabilizer_order_fp(&red) };
        let torsion = FpCurve::jacobian_of_quartic(&red.resolvent()).map(|e| curve_four_torsion(&e));
        match (order, torsion) {
            (Ok(o), Ok(t)) if o == t => {}
            (o, t) => mismatches.push(format!("p={p}: {o:?} vs {t:?}")),
        }
    };
    let mut r = rng(7);
    for _ in 0..20 {
        check(&random_nondegenerate(&mut r, 3), 3, true, &mut mismatches);
        checked += 1;
    }
    for p in [5u64, 7, 11] {
        for _ in 0..50 {
            check(&random_nondegenerate(&mut r, p), p, false, &mut mismatches);
            checked += 1;
        }
    }
    let twist = reduce_rational(&witness_cubic_twist(&BigRational::from_integer(BigInt::from(2))), 7);
    let fixture = stabilizer_order_fp(&twist);
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && matches!(fixture, Ok(1)) && elapsed <= STABILIZER_BUDGET;
    outcome(
        pass,
        format!(
            "{checked} pairs, {} mismatches{}; cubic twist t=2 at p=7 has order {fixture:?}; {:.1}s",
            mismatches.len(),
            mismatches.first().map(|m| format!(" (first: {m})")).unwrap_or_default(),
            elapsed.as_secs_f64()
        ),
    )
}

fn witnesses() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (p, s) in [(3u64, 1i64), (11, 3), (19, 6)] {
        let field_ok = (s * s + 2).rem_euclid(p as i64) == 0;
        let f = reduce(&witness_sum_of_fourth_powers(s), p).resolvent();
        let sixteen = Zmod::new(16, p);
        let target = BinaryQuartic::new(sixteen, Zmod::new(0, p), Zmod::new(0, p), Zmod::new(0, p), sixteen);
        let rootless = roots_mod_p(&f).map(|r| r.is_empty()).unwrap_or(false);
        pass &= field_ok && f == target && rootless;
        notes.push(format!("p={p} s={s}: {}", if f == target && rootless { "ok" } else { "mismatch" }));
    }
    // Each coefficient of the resolvent is affine in t (t occurs in a single entry),
    // so agreement at two values already forces the identity; five are checked.
    let zero = BigRational::zero();
    let one = BigRational::one();
    let cubic_ok = [-5i64, 0, 1, 2, 7].iter().map(|&n| BigRational::new(n.into(), 3.into())).all(|t| {
        let f = witness_cubic_twist(&t).resolvent();
        f == BinaryQuartic::new(zero.clone(), one.clone(), zero.clone(), zero.clone(), -t)
    });
    pass &= cubic_ok;
    notes.push(format!("cubic twist {}", if cubic_ok { "ok" } else { "mismatch" }));
    outcome(pass, notes.join("; "))
}

fn sieve_maps() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for p in [5u64, 7] {
        let mut r = rng(90 + p);
        let (mut cases, mut failures) = (0, 0);
        while cases < 1000 {
            let pair = sieve::random_normalized(&mut r, p, 6);
            let d = sieve::discriminant(&pair);
            if d.is_zero() || !sieve::in_wp(&pair, p).unwrap() || sieve::in_wp1(&pair, p).unwrap() {
                continue;
            }
            cases += 1;
            let ok = sieve::apply_gamma_p(&pair, p)
                .map(|img| sieve::in_wp1(&img, p).unwrap_or(false) && sieve::discriminant(&img) == d)
                .unwrap_or(false);
            failures += usize::from(!ok);
        }
        // Taylor criterion: every non-member gets a direction that really breaks p^2 | Delta.
        let p2 = BigInt::from(p * p);
        let (mut rejected, mut bad_directions) = (0, 0);
        for k in 0..2000 {
            let pair = if k % 2 == 0 { PairOfQuadrics::random(&mut r, 6) } else { sieve::random_normalized(&mut r, p, 6) };
            let check = sieve::in_wp1_detailed(&pair, p).unwrap();
            if check.member {
                bad_directions += usize::from(check.violating_direction.is_some());
                continue;
            }
            rejected += 1;
            let ok = match check.violating_direction {
                None => false,
                Some(Direction::Zero) => !(sieve::discriminant(&pair) % &p2).is_zero(),
                Some(dir) => !(sieve::discriminant(&dir.shift(&pair, p)) % &p2).is_zero(),
            };
            bad_directions += usize::from(!ok);
        }
        pass &= failures == 0 && bad_directions == 0;
        notes.push(format!(
            "p={p}: {cases} W_p^(2) pairs, {failures} failures; {rejected} rejections, {bad_directions} bad directions"
        ));
    }
    outcome(pass, notes.join("; "))
}

fn extremal() -> Outcome {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let pointwise = pointwise_inequality_check(20) && pointwise_equalities(20) == vec![1, 2];
    let lp = MomentConstraints::new(r(3, 1), r(4, 1), 6, 10).and_then(|c| extremal_bound(&c));
    match lp {
        Ok(sol) => {
            let hit = sol.optimum == r(3, 5);
            outcome(
                hit && pointwise,
                format!(
                    "LP optimum at caps (6, 10) = {} (~{:.6}), required 3/5; pointwise inequality a=1..20 {} with equality at {:?}",
                    sol.optimum,
                    qpl_core::scalar::rational_to_f64(&sol.optimum),
                    if pointwise { "holds" } else { "FAILS" },
                    pointwise_equalities(20)
                ),
            )
        }
        Err(e) => outcome(false, format!("LP failed: {e}")),
    }
}

fn davenport() -> Outcome {
    let shears = [[[1, 1], [0, 1]], [[1, 0], [3, 1]], [[2, 1], [1, 1]]];
    let mut worst: i64 = 0;
    let mut pass = true;
    for n in [10i64, 100, 1000] {
        for m in shears {
            let region = match Region::sheared_square(n, m) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("region: {e}")),
            };
            let count = lattice_count(&region).unwrap() as i64;
            let res = davenport_check(&region, 64).unwrap();
            // a unimodular image of [0, N]^2 has area N^2; the computed volume must agree
            let area_ok = res.volume_exact && res.volume == (n * n).to_string();
            let gap = (count - n * n).abs();
            worst = worst.max(gap);
            pass &= area_ok && gap <= DAVENPORT_SLACK * n && res.count as i64 == count;
        }
    }
    outcome(pass, format!("{} shears x N in {{10, 100, 1000}}; worst |count - volume| = {worst}", shears.len()))
}

fn selmer_identity() -> Outcome {
    let mut bad = 0;
    for a in 0..=6 {
        for b in 0..=6 {
            let s = selmer_sizes(SelmerShape { a, b });
            bad += usize::from(s.size_s4 != s.order4 + s.size_s2);
        }
    }
    outcome(
        bad == 0,
        format!("#S4 = order4 + #S2 on 49 shapes, {bad} failures; headline averages are out of scope at desk scale"),
    )
}

fn main() {
    let criteria: Vec<(u32, &str, fn() -> Outcome)> = vec![
        (1, "invariant-pair asymptotics", invariant_pair_counts),
        (2, "twist identity", twist_identity),
        (3, "invariant degrees", invariant_degrees),
        (4, "discriminant coherence", discriminant_coherence),
        (5, "reducibility conditions", reducibility_conditions),
        (6, "weight table", weight_table),
        (7, "stabilizer order equals #E[4]", stabilizers),
        (8, "witness pairs", witnesses),
        (9, "sieve maps", sieve_maps),
        (10, "extremal bound", extremal),
        (11, "lattice points in sheared squares", davenport),
        (12, "selmer bookkeeping", selmer_identity),
    ];
    let filter: Option<Vec<u32>> =
        std::env::var("QPL_ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if filter.as_ref().is_some_and(|f| !f.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let expected = EXPECTED_FAILURES.iter().find(|(k, _)| *k == id);
        let status = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name}: {} [{secs:.1}s]", result.detail);
        match (result.pass, expected) {
            (false, Some((_, why))) => println!("             known failure: {why}"),
            (false, None) => unexpected.push(id),
            (true, Some(_)) => {
                println!("             listed as a known failure but passed; update EXPECTED_FAILURES");
                unexpected.push(id);
            }
            (true, None) => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
