//! Arithmetic over `F_p` and `Q_p`: points on the intersection of two quadrics,
//! Hensel lifting, stabilizers in `G(F_p)` and elliptic-curve 4-torsion.

pub mod curve;
pub mod hensel;
pub mod points;
pub mod stabilizer;

pub use curve::{curve_four_torsion, FpCurve};
pub use hensel::{qp_soluble, qp_soluble_default, SolubilityVerdict};
pub use points::{fp_points_on_intersection, IntersectionPoint, ProjPoint};
pub use stabilizer::{stabilizer_order_exhaustive, stabilizer_order_fp};
