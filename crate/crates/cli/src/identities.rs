use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpl_core::counting::{coordinate_weight, verify_sibound_products, WeightVector};
use qpl_core::forms::{coordinate_index, invariants, twist_identity_raw, REDUCIBILITY_CONDITIONS};
use qpl_core::quartic::discriminant_resultant;
use qpl_core::sieve::{self, Direction};
use qpl_core::{is_strongly_irreducible, Matrix, PairOfQuadrics};

pub struct CheckResult {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Matrix<BigInt> {
    Matrix::from_rows((0..n).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()).collect())
}

fn tally(name: &str, outcomes: impl Iterator<Item = bool>) -> CheckResult {
    let (mut cases, mut failures) = (0, 0);
    for ok in outcomes {
        cases += 1;
        if !ok {
            failures += 1;
        }
    }
    CheckResult { name: name.to_string(), cases, failures }
}

pub fn twist_identity(samples: u64, seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 1);
    tally(
        "twist-identity",
        (0..samples).map(|_| {
            let pair = PairOfQuadrics::random(&mut rng, 5);
            let g2 = random_matrix(&mut rng, 2, 5);
            let g4 = random_matrix(&mut rng, 4, 5);
            twist_identity_raw(&g2, &g4, &pair)
        }),
    )
}

pub fn invariant_degrees(samples: u64, seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 2);
    tally(
        "invariant-degrees",
        (0..samples).map(|_| {
            let pair = PairOfQuadrics::random(&mut rng, 10);
            let base = invariants(&pair);
            (-2i64..=3).all(|l| {
                let lam = BigInt::from(l);
                let scaled = invariants(&pair.scale(&lam));
                scaled.i == &base.i * lam.pow(8) && scaled.j == &base.j * lam.pow(12)
            })
        }),
    )
}

pub fn discriminant_coherence(samples: u64, seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 3);
    tally(
        "discriminant-coherence",
        (0..samples).map(|_| {
            let pair = PairOfQuadrics::random(&mut rng, 10);
            let inv = invariants(&pair);
            match inv.disc_integer() {
                Some(d) => d == discriminant_resultant(&pair.resolvent()),
                None => false,
            }
        }),
    )
}

pub fn weight_table() -> CheckResult {
    let a11 = coordinate_weight("a11").map(|w| w == WeightVector([-1, -6, -2, -2])).unwrap_or(false);
    tally("weight-table", [a11, verify_sibound_products()].into_iter())
}

pub fn reducibility_conditions(samples: u64, seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 4);
    let mut outcomes = Vec::new();
    for labels in REDUCIBILITY_CONDITIONS {
        for _ in 0..samples {
            let mut pair = PairOfQuadrics::random(&mut rng, 10);
            for l in labels {
                pair = pair.with_coord(coordinate_index(l).expect("label"), BigInt::zero());
            }
            outcomes.push(!is_strongly_irreducible(&pair));
        }
    }
    tally("reducibility-conditions", outcomes.into_iter())
}

/// Normalized pairs of `W_p^(2)`: the image under `gamma_p` is integral, lies in
/// `W_p^(1)` and has the same discriminant.
pub fn gamma_p(samples: u64, seed: u64, p: u64) -> CheckResult {
    let mut rng = rng_for(seed, 5 + p);
    let mut outcomes = Vec::new();
    while (outcomes.len() as u64) < samples {
        let pair = sieve::random_normalized(&mut rng, p, 6);
        if sieve::discriminant(&pair).is_zero() || !sieve::in_wp(&pair, p).unwrap_or(false) {
            continue;
        }
        if sieve::in_wp1(&pair, p).unwrap_or(true) {
            continue;
        }
        let ok = match sieve::apply_gamma_p(&pair, p) {
            Ok(image) => {
                sieve::in_wp1(&image, p).unwrap_or(false) && sieve::discriminant(&image) == sieve::discriminant(&pair)
            }
            Err(_) => false,
        };
        outcomes.push(ok);
    }
    tally(&format!("gamma-p-{p}"), outcomes.into_iter())
}

/// Whenever membership in `W_p^(1)` fails, the reported direction `w` has
/// `Delta(v + p w) != 0 mod p^2`.
pub fn violating_directions(samples: u64, seed: u64, p: u64) -> CheckResult {
    let mut rng = rng_for(seed, 100 + p);
    let p2 = BigInt::from(p * p);
    let mut outcomes = Vec::new();
    for k in 0..samples {
        // alternate generic pairs with pairs close to W_p
        let pair = if k % 2 == 0 {
            PairOfQuadrics::random(&mut rng, 6)
        } else {
            sieve::random_normalized(&mut rng, p, 6)
        };
        let Ok(check) = sieve::in_wp1_detailed(&pair, p) else {
            outcomes.push(false);
            continue;
        };
        let ok = match check.violating_direction {
            None => check.member,
            Some(dir) => {
                let shifted = dir.shift(&pair, p);
                let d = sieve::discriminant(&shifted);
                !check.member && !(d % &p2).is_zero() && (dir != Direction::Zero || !sieve::in_wp(&pair, p).unwrap_or(true))
            }
        };
        outcomes.push(ok);
    }
    tally("wp1-violating-direction", outcomes.into_iter())
}

pub fn run_all(samples: u64, seed: u64) -> Vec<CheckResult> {
    vec![
        twist_identity(samples, seed),
        invariant_degrees(samples, seed),
        discriminant_coherence(samples, seed),
        weight_table(),
        reducibility_conditions(samples, seed),
        gamma_p(samples, seed, 5),
        gamma_p(samples, seed, 7),
        violating_directions(samples, seed, 5),
    ]
}
