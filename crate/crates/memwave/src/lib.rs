//! memwave: a numerical laboratory for the wave equation with memory and
//! delay damping on the boundary.
//!
//! The crate has four layers:
//!
//! * [`measure`] — exact algebra for signed Borel measures on ℝ⁺ (atoms plus
//!   polynomial/exponential density pieces), the tail operator, and
//!   dominating-measure decay certificates;
//! * [`geometry`] — multiplier vector fields, their admissibility constants,
//!   and sign-compatible boundary partitions;
//! * [`solver`] — an explicit finite-difference time-domain solver with an
//!   impedance boundary condition driven by instantaneous plus convolution
//!   damping;
//! * [`energy`] — post-hoc energy functionals with boundary memory terms,
//!   monotonicity audits, and exponential decay fitting.
//!
//! [`scenario`] ties them together: JSON configuration, validation that
//! names the violated hypothesis, a library of ready-made example configs,
//! parameter sweeps, and CSV/SVG emission. The `memwave` binary exposes all
//! of it on the command line.

pub mod energy;
pub mod geometry;
pub mod measure;
pub mod scenario;
pub mod solver;
