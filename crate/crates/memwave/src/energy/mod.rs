//! Post-hoc energy evaluation over a completed trajectory.
//!
//! The full energy is the field energy plus half of two boundary memory
//! terms weighted by the dominating measure: one over the simulated past,
//! one over the (truncated) future. With an admissible field and a valid
//! certificate the total is non-increasing up to discretization error, which
//! the report audits sample by sample.

mod fit;
mod memory;

use std::io::Write;

use thiserror::Error;

use crate::measure::{DecayCertificate, MeasureRepr, TailRepr};
use crate::solver::{gradient_energy, kinetic_energy, Trajectory};

pub use fit::{fit_decay, DecayFit};
pub use memory::{memory_term_future, memory_term_past};

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("no snapshot at t = {0}")]
    SnapshotMissing(f64),
    #[error("trace does not cover t = {t} (final time {t_final})")]
    TraceMissing { t: f64, t_final: f64 },
    #[error("decay fit needs at least 8 positive samples, found {samples}")]
    DegenerateFit { samples: usize },
}

/// Sampled energies on the snapshot grid. `e_total = e0 + (past+future)/2`
/// pointwise; `mono_violation[j] = max(0, e_total[j] - e_total[j-1])`.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    pub e0: Vec<f64>,
    pub e_mem_past: Vec<f64>,
    pub e_mem_future: Vec<f64>,
    pub e_total: Vec<f64>,
    pub trunc_bound: Vec<f64>,
    pub mono_violation: Vec<f64>,
}

impl EnergyReport {
    pub fn max_violation(&self) -> f64 {
        self.mono_violation.iter().fold(0.0f64, |m, &v| m.max(v))
    }

    pub fn initial_energy(&self) -> f64 {
        self.e_total.first().copied().unwrap_or(0.0)
    }

    /// Columns: t, E0, E_mem_past, E_mem_future, E_total, trunc_bound,
    /// mono_violation.
    pub fn write_csv(&self, path: &std::path::Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "t,E0,E_mem_past,E_mem_future,E_total,trunc_bound,mono_violation")?;
        for i in 0..self.times.len() {
            writeln!(
                f,
                "{},{},{},{},{},{},{}",
                self.times[i],
                self.e0[i],
                self.e_mem_past[i],
                self.e_mem_future[i],
                self.e_total[i],
                self.trunc_bound[i],
                self.mono_violation[i]
            )?;
        }
        Ok(())
    }
}

/// ½∫ (u')² + |∇u|² at a snapshot time, by nodal trapezoid weights for the
/// velocity and cell-midpoint differences for the gradient.
pub fn energy_standard(traj: &Trajectory, t: f64) -> Result<f64, EnergyError> {
    let snap = traj.snapshot_at(t).ok_or(EnergyError::SnapshotMissing(t))?;
    Ok(kinetic_energy(&traj.grid, &snap.v) + gradient_energy(&traj.grid, &snap.u))
}

/// Full energy report with the certificate's dominating measure.
pub fn full_energy(traj: &Trajectory, cert: &DecayCertificate) -> Result<EnergyReport, EnergyError> {
    energy_with_measure(traj, &cert.lambda)
}

/// Full energy report with an arbitrary nonnegative weight measure (the
/// energy functional is monotone in this argument).
pub fn energy_with_measure(
    traj: &Trajectory,
    weight: &MeasureRepr,
) -> Result<EnergyReport, EnergyError> {
    let tail = TailRepr::build(weight);
    let sq = memory::SquaredTraces::build(traj);
    let surface: f64 = traj.grid.neumann.iter().map(|n| n.damping_surface).sum();
    let sup_sq = traj.max_trace_sq();
    let n = traj.snapshots.len();
    let mut report = EnergyReport {
        times: Vec::with_capacity(n),
        e0: Vec::with_capacity(n),
        e_mem_past: Vec::with_capacity(n),
        e_mem_future: Vec::with_capacity(n),
        e_total: Vec::with_capacity(n),
        trunc_bound: Vec::with_capacity(n),
        mono_violation: Vec::with_capacity(n),
    };
    let mut scratch = Vec::new();
    for snap in &traj.snapshots {
        let e0 = kinetic_energy(&traj.grid, &snap.v) + gradient_energy(&traj.grid, &snap.u);
        let past = memory::memory_term_past_with(traj, weight, &tail, &sq, snap.t, &mut scratch)?;
        let (future, future_bound) =
            memory::memory_term_future_with(traj, weight, &tail, &sq, snap.t)?;
        let total = e0 + 0.5 * (past + future);
        // budget for history truncation: the dropped kernel mass acts on the
        // damped boundary for the elapsed time at worst at the trace supremum
        let hist_budget = traj.history_trunc_mass * surface * sup_sq * snap.t;
        report.times.push(snap.t);
        report.e0.push(e0);
        report.e_mem_past.push(past);
        report.e_mem_future.push(future);
        report.e_total.push(total);
        report.trunc_bound.push(0.5 * future_bound + hist_budget);
        let viol = match report.e_total.len() {
            0 | 1 => 0.0,
            k => (report.e_total[k - 1] - report.e_total[k - 2]).max(0.0),
        };
        report.mono_violation.push(viol);
    }
    Ok(report)
}

/// Result of the dissipation audit: the largest constant C with
/// `E(S) − E(T) ≥ C·∫_S^T ∫ m·ν (v² + ∫ v(·−s)² dλ) dσ dt − tol` over all
/// sampled pairs. `unconstrained` marks a vanishing flux integral.
#[derive(Debug, Clone)]
pub struct DissipationCheck {
    pub c: f64,
    pub unconstrained: bool,
    pub pairs: usize,
    pub flux_total: f64,
}

pub fn dissipation_check(
    traj: &Trajectory,
    report: &EnergyReport,
    cert: &DecayCertificate,
) -> Result<DissipationCheck, EnergyError> {
    let sq = memory::SquaredTraces::build(traj);
    let n_steps = traj.times.len();
    // flux integrand at every step, then cumulative trapezoid
    let mut g = vec![0.0; n_steps];
    let mut scratch = Vec::new();
    for (k, gk) in g.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (ni, node) in traj.grid.neumann.iter().enumerate() {
            if node.damping_surface == 0.0 {
                continue;
            }
            let v2 = sq.forward[ni][k];
            let conv =
                memory::convolution_sq_node(traj, &cert.lambda, &sq, ni, k, &mut scratch);
            acc += node.damping_surface * (v2 + conv);
        }
        *gk = acc;
    }
    let mut cum = vec![0.0; n_steps];
    for k in 1..n_steps {
        cum[k] = cum[k - 1] + 0.5 * traj.dt * (g[k - 1] + g[k]);
    }

    let e0 = report.initial_energy().max(1e-300);
    let tol = 1e-10 * e0;
    let mut c = f64::INFINITY;
    let mut pairs = 0usize;
    let steps: Vec<usize> = traj.snapshots.iter().map(|s| s.step).collect();
    for i in 0..report.times.len() {
        for j in (i + 1)..report.times.len() {
            let flux = cum[steps[j]] - cum[steps[i]];
            if flux <= tol {
                continue;
            }
            pairs += 1;
            c = c.min((report.e_total[i] - report.e_total[j] + tol) / flux);
        }
    }
    let unconstrained = pairs == 0;
    Ok(DissipationCheck {
        c: if unconstrained { f64::INFINITY } else { c },
        unconstrained,
        pairs,
        flux_total: cum[n_steps - 1],
    })
}
