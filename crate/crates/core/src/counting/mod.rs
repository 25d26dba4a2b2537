//! Exact enumeration harnesses: invariant-pair counts, torus weights of the
//! cusp analysis, box scans of integral pairs, lattice-point count versus
//! volume, and height-ordered enumeration of elliptic curves.

pub mod curves;
pub mod davenport;
pub mod invariant_pairs;
pub mod report;
pub mod scan;
pub mod weights;

pub use curves::{enumerate_curves, predicted_constant, CurveFamily};
pub use davenport::{davenport_check, DavenportResult, Region};
pub use invariant_pairs::{count_invariant_pairs, count_invariant_pairs_closed_form, InvariantCounts, Sign};
pub use report::{Checkpoint, CountReport};
pub use scan::{scan_box, Predicate, ScanMode};
pub use weights::{coordinate_weight, verify_sibound_products, WeightVector, HAAR_EXPONENTS};
