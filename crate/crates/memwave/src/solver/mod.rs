//! Explicit finite-difference time-domain solver for the wave equation with
//! clamped and memory-damped boundary parts.

mod config;
mod grid;
mod history;
mod stepper;
mod trajectory;

pub use config::{InitialData, SolverConfig};
pub use grid::{BoundaryDirection, Grid, NeumannNode, NodeClass, SolverError};
pub use history::HistoryRing;
pub use stepper::{
    boundary_flux, gradient_energy, kinetic_energy, FluxParts, SimulationState, WaveSolver,
};
pub use trajectory::{Snapshot, Trajectory};
