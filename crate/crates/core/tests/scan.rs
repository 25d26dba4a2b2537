use num_traits::Zero;

use qpl_core::counting::scan::{sample_point, small_disc_nonzero};
use qpl_core::counting::{scan_box, Checkpoint, Predicate, ScanMode};
use qpl_core::invariants;

#[test]
fn fast_discriminant_path_matches_exact_invariants() {
    let mut nonzero = 0;
    for idx in 0..100_000 {
        let pair = sample_point(1, 17, idx);
        let exact = !invariants(&pair).scaled_disc.is_zero();
        assert_eq!(small_disc_nonzero(&pair), Some(exact), "sample {idx}");
        nonzero += u64::from(exact);
    }
    assert!(nonzero > 50_000);
}

#[test]
fn case_one_frequency_matches_the_box_probability() {
    let n = 100_000u64;
    let report = scan_box(1, &[Predicate::ReducibleCase(1)], ScanMode::Sampled { samples: n, seed: 3 }, None).unwrap();
    let expected = 1.0 / 81.0;
    let freq = report.count("case1") as f64 / n as f64;
    let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
    assert!((freq - expected).abs() <= 3.0 * sigma, "frequency {freq}, expected {expected}, sigma {sigma}");
}

#[test]
fn resumed_scan_matches_a_single_pass() {
    let preds = [Predicate::NonzeroDisc, Predicate::ReducibleCase(2), Predicate::InWp(5)];
    let mode = ScanMode::Exhaustive { start: 0, end: 35_000 };
    let full = scan_box(1, &preds, mode, None).unwrap();
    let head = scan_box(1, &preds, ScanMode::Exhaustive { start: 0, end: 20_000 }, None).unwrap();
    let cp = Checkpoint { cursor: 20_000, items: head.items, counts: head.counts.clone() };
    let resumed = scan_box(1, &preds, mode, Some(&cp)).unwrap();
    assert_eq!(resumed.items, full.items);
    assert_eq!(resumed.counts, full.counts);
    assert_eq!(resumed.derived, full.derived);
}
