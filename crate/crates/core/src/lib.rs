//! Pairs of quaternary quadratic forms and the arithmetic around them:
//! invariants and resolvent quartics, real and local solubility, stabilizers
//! over finite fields, the squarefree-sieve maps, exact counting harnesses
//! and the extremal Selmer-statistics linear program.

pub mod arith;
pub mod counting;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod local;
pub mod poly;
pub mod quartic;
pub mod real;
pub mod scalar;
pub mod selmer;
pub mod sieve;

pub use error::{Error, Result};
pub use forms::{act, invariants, is_strongly_irreducible, reducibility_case, resolvent_quartic, GroupElement, PairOfQuadrics};
pub use linalg::Matrix;
pub use quartic::{BinaryQuartic, InvariantPair, QuarticClassification};
pub use scalar::{PrimeField, Scalar, Zmod};
pub use counting::{CountReport, WeightVector};
pub use local::SolubilityVerdict;
pub use selmer::{SelmerShape, SelmerSizes};
pub use sieve::SievePrimeData;
