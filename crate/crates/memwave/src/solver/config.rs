//! Solver configuration and initial data.

use serde::{Deserialize, Serialize};

use super::grid::{Grid, NodeClass, SolverError};

fn default_cfl() -> f64 {
    0.95
}

fn default_eps_hist() -> f64 {
    1e-12
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialData {
    /// u0(x) = amplitude · exp(-|x - center|² / (2 width²)), u1 = 0.
    GaussianBump { center: Vec<f64>, width: f64, amplitude: f64 },
    /// u0 = Π sin(kᵢ π x̂ᵢ) over normalized coordinates, u1 = 0.
    Eigenmode { indices: Vec<usize> },
    /// Nodal arrays in grid order.
    Custom { u0: Vec<f64>, u1: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub h: f64,
    pub dt: f64,
    #[serde(rename = "T_final")]
    pub t_final: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    pub initial: InitialData,
    #[serde(default = "default_cfl")]
    pub cfl_target: f64,
    #[serde(default = "default_eps_hist")]
    pub eps_hist: f64,
}

impl SolverConfig {
    pub fn validate(&self, grid: &Grid) -> Result<(), SolverError> {
        if !(self.cfl_target > 0.0 && self.cfl_target <= 0.95) {
            return Err(SolverError::CflViolation {
                dt: self.dt,
                bound: grid.cfl_bound(0.95),
            });
        }
        let bound = grid.cfl_bound(self.cfl_target);
        if !(self.dt > 0.0 && self.dt <= bound) {
            return Err(SolverError::CflViolation { dt: self.dt, bound });
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(SolverError::BadInitialData("T_final must be finite and >= 0".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(SolverError::BadInitialData("snapshot_stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Evaluates the initial displacement and velocity on the grid, forcing
    /// clamped nodes to zero. Returns warnings for data that does not vanish
    /// where the decay theory expects it to.
    pub fn initial_fields(&self, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>, Vec<String>), SolverError> {
        let n = grid.node_count();
        let (mut u0, u1) = match &self.initial {
            InitialData::GaussianBump { center, width, amplitude } => {
                if center.len() != grid.dim {
                    return Err(SolverError::BadInitialData(
                        "bump center dimension does not match the domain".into(),
                    ));
                }
                if !(*width > 0.0) {
                    return Err(SolverError::BadInitialData("bump width must be positive".into()));
                }
                let mut u0 = vec![0.0; n];
                for (idx, v) in u0.iter_mut().enumerate() {
                    let pos = grid.position(idx);
                    let mut r2 = 0.0;
                    for (axis, c) in center.iter().enumerate() {
                        r2 += (pos[axis] - c) * (pos[axis] - c);
                    }
                    *v = amplitude * (-r2 / (2.0 * width * width)).exp();
                }
                (u0, vec![0.0; n])
            }
            InitialData::Eigenmode { indices } => {
                if indices.len() != grid.dim || indices.iter().any(|&k| k == 0) {
                    return Err(SolverError::BadInitialData(
                        "eigenmode needs one positive index per dimension".into(),
                    ));
                }
                let mut u0 = vec![1.0; n];
                for (idx, v) in u0.iter_mut().enumerate() {
                    let pos = grid.position(idx);
                    for axis in 0..grid.dim {
                        let extent = (grid.shape[axis] - 1) as f64 * grid.h[axis];
                        let xhat = (pos[axis] - grid.origin[axis]) / extent;
                        *v *= (indices[axis] as f64 * std::f64::consts::PI * xhat).sin();
                    }
                }
                (u0, vec![0.0; n])
            }
            InitialData::Custom { u0, u1 } => {
                if u0.len() != n || u1.len() != n {
                    return Err(SolverError::BadInitialData(format!(
                        "custom arrays must have {n} nodes, got {} and {}",
                        u0.len(),
                        u1.len()
                    )));
                }
                (u0.clone(), u1.clone())
            }
        };

        let mut warnings = Vec::new();
        let scale = u0.iter().chain(u1.iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let mut worst_u1_boundary = 0.0f64;
        for (idx, class) in grid.node_class.iter().enumerate() {
            match class {
                NodeClass::Dirichlet => {
                    if u0[idx].abs() > 1e-6 * scale {
                        warnings.push(format!(
                            "initial displacement is {} at clamped node {idx}; forced to zero",
                            u0[idx]
                        ));
                    }
                    u0[idx] = 0.0;
                }
                NodeClass::Neumann(_) => {
                    worst_u1_boundary = worst_u1_boundary.max(u1[idx].abs());
                }
                NodeClass::Interior => {}
            }
        }
        if worst_u1_boundary > 1e-12 * scale {
            warnings.push(format!(
                "initial velocity reaches {worst_u1_boundary:.3e} on the damped boundary; \
                 the compatibility assumption of the decay theory does not hold for this data"
            ));
        }
        Ok((u0, u1, warnings))
    }
}
