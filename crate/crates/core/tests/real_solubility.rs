//! Real solubility against an independent criterion: for four variables, two real
//! quadrics have no common nontrivial zero exactly when some member of the pencil
//! is definite. The oracle scans the pencil on a fine angular grid.

use nalgebra::{Matrix4, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpl_core::forms::slot_indices;
use qpl_core::real::{is_r_soluble, real_class, representative, RepresentativeParams};
use qpl_core::PairOfQuadrics;

const ANGLE_STEPS: usize = 20_000;

fn gram(coords: &[f64; 10]) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for (k, c) in coords.iter().enumerate() {
        let (i, j) = slot_indices(k);
        if i == j {
            m[(i, i)] = *c;
        } else {
            m[(i, j)] = c / 2.0;
            m[(j, i)] = c / 2.0;
        }
    }
    m
}

fn has_definite_member(pair: &PairOfQuadrics<f64>) -> bool {
    let (a, b) = (gram(pair.a_coords()), gram(pair.b_coords()));
    (0..ANGLE_STEPS).any(|k| {
        let theta = std::f64::consts::PI * k as f64 / ANGLE_STEPS as f64;
        let eig = SymmetricEigen::new(a * theta.cos() + b * theta.sin()).eigenvalues;
        let scale = eig.amax();
        let tol = 1e-9 * scale;
        eig.iter().all(|&l| l > tol) || eig.iter().all(|&l| l < -tol)
    })
}

#[test]
fn random_integral_pairs_match_the_definite_pencil_criterion() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut soluble, mut insoluble) = (0, 0);
    for _ in 0..400 {
        let coords: [f64; 20] = std::array::from_fn(|_| rng.gen_range(-3..=3) as f64);
        let pair = PairOfQuadrics::from_coords(coords);
        let Ok(verdict) = is_r_soluble(&pair) else { continue };
        assert_eq!(verdict, !has_definite_member(&pair), "pair {coords:?}");
        if verdict {
            soluble += 1;
        } else {
            insoluble += 1;
        }
    }
    assert!(soluble > 50 && insoluble > 5, "soluble {soluble}, insoluble {insoluble}");
}

#[test]
fn diagonal_pencils_match_the_definite_pencil_criterion() {
    // Diagonal pairs with distinct ratios exercise the convex-hull path directly.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 300 {
        let d: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-4..=4) as f64);
        let pair = PairOfQuadrics::diagonal([d[0], d[1], d[2], d[3]], [d[4], d[5], d[6], d[7]]);
        let Ok(verdict) = is_r_soluble(&pair) else { continue };
        assert_eq!(verdict, !has_definite_member(&pair), "pair {d:?}");
        checked += 1;
    }
}

#[test]
fn representatives_with_complex_roots_are_soluble() {
    let params = [
        RepresentativeParams::Mixed { kappa: 2.0, lambda: 0.5, r: 1.5 },
        RepresentativeParams::Definite { kappa: 1.0, r1: 2.0, r2: 0.5 },
        RepresentativeParams::Definite { kappa: 7.0, r1: 1.1, r2: 1.0 },
    ];
    for p in params {
        let pair = representative(&p).unwrap();
        assert!(real_class(&pair).unwrap() >= 1);
        assert!(is_r_soluble(&pair).unwrap());
        assert!(!has_definite_member(&pair));
    }
}

#[test]
fn split_representatives_follow_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..50 {
        let mut l: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
        l.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let params = RepresentativeParams::Split { kappa: rng.gen_range(0.5..4.0), lambdas: l };
        let Ok(pair) = representative(&params) else { continue };
        assert_eq!(real_class(&pair).unwrap(), 0);
        assert_eq!(is_r_soluble(&pair).unwrap(), !has_definite_member(&pair));
    }
}
