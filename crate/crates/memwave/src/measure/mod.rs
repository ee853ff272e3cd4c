//! Closed-form algebra for signed Borel measures on ℝ⁺.
//!
//! Measures are atoms plus sign-definite polynomial / exponential density
//! pieces. Interval masses, tails, exponential moments, the tail operator
//! and the dominating-measure constructions are all exact (no quadrature).

pub mod calculus;
mod certificate;
mod repr;
mod transform;

pub use certificate::{
    build_lambda, build_lambda_compact, dyadic_intervals, find_alpha, verify_certificate,
    DecayCertificate, IntervalCheck, VerificationReport,
};
pub use repr::{
    Atom, DensityPiece, MeasureError, MeasureRepr, PieceKind, INTERNAL_MAX_DEGREE, USER_MAX_DEGREE,
};
pub use transform::{TailRepr, TailSegment};
