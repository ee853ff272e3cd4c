//! Leapfrog time stepping with an implicit instantaneous boundary term and
//! an explicit memory term.
//!
//! Interior nodes advance by the standard second-order scheme. On damped
//! boundary nodes the ghost value is eliminated through the impedance
//! condition `∂_ν u + (m·ν)(μ₀ u' + ∫₀ᵗ u'(t-s) dμ(s)) = 0`, with the
//! centered velocity making the μ₀ term implicit (a scalar equation per
//! node, uniquely solvable since μ₀ ≥ 0 and m·ν ≥ 0) while the convolution
//! uses strictly past samples from the ring buffers.

use crate::measure::MeasureRepr;

use super::config::SolverConfig;
use super::grid::{Grid, NodeClass, SolverError};
use super::history::HistoryRing;
use super::trajectory::{Snapshot, Trajectory};

const BLOWUP_LIMIT: f64 = 1e12;

/// The boundary flux split for the implicit update: the instantaneous
/// coefficient (in front of the unknown velocity) and the fully known
/// memory remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParts {
    pub coefficient: f64,
    pub remainder: f64,
}

/// Evaluates `μ₀·v + ∫₀ᵗ v(t-s) dμ(s)` at time `t`, leaving the μ₀ part
/// symbolic. Atom terms interpolate linearly between the two bracketing
/// stored samples; density terms use trapezoids on the stored sample grid
/// with subdivision at piece boundaries; times below the sample spacing
/// take the most recent stored sample, keeping the term explicit.
pub fn boundary_flux(
    ring: &HistoryRing,
    t: f64,
    dt: f64,
    mu: &MeasureRepr,
    mu0: f64,
    horizon: f64,
) -> Result<FluxParts, SolverError> {
    let upper = t.min(horizon);
    let mut remainder = 0.0;
    for atom in mu.atoms() {
        if atom.tau < dt {
            return Err(SolverError::DelayUnderResolved { tau: atom.tau, dt });
        }
        if atom.tau <= upper {
            remainder += atom.weight * ring.value_at(t - atom.tau, dt)?;
        }
    }
    for piece in mu.pieces() {
        let lo = piece.a.max(0.0);
        let hi = piece.b.min(upper);
        if hi <= lo {
            continue;
        }
        let mut s0 = lo;
        let mut f0 = ring.value_at(t - s0, dt)? * piece.density_unclipped(s0);
        let mut j = (lo / dt).floor() as usize + 1;
        loop {
            let s1 = (j as f64 * dt).min(hi);
            if s1 > s0 {
                let f1 = ring.value_at(t - s1, dt)? * piece.density_unclipped(s1);
                remainder += 0.5 * (f0 + f1) * (s1 - s0);
                s0 = s1;
                f0 = f1;
            }
            if s1 >= hi {
                break;
            }
            j += 1;
        }
    }
    Ok(FluxParts { coefficient: mu0, remainder })
}

#[derive(Debug, Clone)]
pub struct SimulationState {
    pub t: f64,
    pub step: usize,
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
}

pub struct WaveSolver {
    pub grid: Grid,
    pub mu: MeasureRepr,
    pub mu0: f64,
    pub config: SolverConfig,
    /// Time horizon actually retained by the ring buffers.
    pub horizon: f64,
    ring_capacity: usize,
    /// |μ| mass beyond the retained horizon (reported in energy budgets).
    pub truncated_mass: f64,
}

impl WaveSolver {
    pub fn new(
        grid: Grid,
        mu: MeasureRepr,
        mu0: f64,
        config: SolverConfig,
    ) -> Result<Self, SolverError> {
        config.validate(&grid)?;
        if let Some(tau) = mu.min_atom_delay() {
            if tau < config.dt {
                return Err(SolverError::DelayUnderResolved { tau, dt: config.dt });
            }
        }
        let tv = mu.total_variation();
        let support = tv.support_bound();
        let needed = if support.is_finite() {
            support
        } else {
            // cut the kernel where its remaining |μ| mass is below eps_hist
            let mut hi = 1.0;
            while tv.tail(hi) > config.eps_hist && hi < 1e9 {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if tv.tail(mid) > config.eps_hist {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        };
        let ring_capacity = ((needed / config.dt).ceil() as usize + 2).max(2);
        let horizon = ring_capacity as f64 * config.dt;
        let truncated_mass = tv.tail(horizon).max(0.0);
        Ok(Self { grid, mu, mu0, config, horizon, ring_capacity, truncated_mass })
    }

    pub fn new_rings(&self) -> Vec<HistoryRing> {
        vec![HistoryRing::new(self.ring_capacity); self.grid.neumann.len()]
    }

    /// Builds the initial state: `u_curr` from the configured data and
    /// `u_prev` one Taylor back-step behind it.
    pub fn initial_state(&self) -> Result<(SimulationState, Vec<f64>, Vec<String>), SolverError> {
        let (u0, u1, warnings) = self.config.initial_fields(&self.grid)?;
        let dt = self.config.dt;
        let n = self.grid.node_count();
        let mut u_prev = vec![0.0; n];
        for idx in 0..n {
            match self.grid.node_class[idx] {
                NodeClass::Dirichlet => u_prev[idx] = 0.0,
                _ => {
                    let lap = self.laplacian_at(idx, &u0, |ni| {
                        // ghost uses the boundary condition at t = 0: no memory yet
                        self.mu0 * u1[self.grid.neumann[ni].node]
                    });
                    u_prev[idx] = u0[idx] - dt * u1[idx] + 0.5 * dt * dt * lap;
                }
            }
        }
        Ok((SimulationState { t: 0.0, step: 0, u_prev, u_curr: u0 }, u1, warnings))
    }

    /// 3/5-point Laplacian at a node; damped boundary nodes eliminate their
    /// ghost neighbors through `q`, the full boundary flux value.
    fn laplacian_at(&self, idx: usize, u: &[f64], q_of: impl Fn(usize) -> f64) -> f64 {
        let sx = 1usize;
        let sy = self.grid.shape[0];
        let i = idx % sy;
        let j = idx / sy;
        let hx2 = self.grid.h[0] * self.grid.h[0];
        let mut lap;
        match self.grid.node_class[idx] {
            NodeClass::Neumann(ni) => {
                let node = &self.grid.neumann[ni];
                let q = q_of(ni);
                lap = 0.0;
                let mut bdir_axes = [false; 2];
                for d in &node.directions {
                    bdir_axes[d.axis] = true;
                    let h = self.grid.h[d.axis];
                    let stride = if d.axis == 0 { sx } else { sy };
                    let mirror = if d.sign > 0.0 { idx - stride } else { idx + stride };
                    lap += (2.0 * u[mirror] - 2.0 * u[idx]) / (h * h)
                        - 2.0 * d.m_dot_nu * q / h;
                }
                for axis in 0..self.grid.dim {
                    if bdir_axes[axis] {
                        continue;
                    }
                    let h2 = self.grid.h[axis] * self.grid.h[axis];
                    let stride = if axis == 0 { sx } else { sy };
                    lap += (u[idx - stride] - 2.0 * u[idx] + u[idx + stride]) / h2;
                }
            }
            _ => {
                lap = (u[idx - sx] - 2.0 * u[idx] + u[idx + sx]) / hx2;
                if self.grid.dim == 2 {
                    let hy2 = self.grid.h[1] * self.grid.h[1];
                    lap += (u[idx - sy] - 2.0 * u[idx] + u[idx + sy]) / hy2;
                }
                let _ = (i, j);
            }
        }
        lap
    }

    /// One leapfrog step: fills `u_next` from the state and the history
    /// rings (which must hold samples strictly before `state.step`).
    pub fn step(
        &self,
        state: &SimulationState,
        rings: &[HistoryRing],
        u_next: &mut Vec<f64>,
    ) -> Result<(), SolverError> {
        let dt = self.config.dt;
        let dt2 = dt * dt;
        let n = self.grid.node_count();
        u_next.resize(n, 0.0);
        let t = state.t;
        let u = &state.u_curr;
        let up = &state.u_prev;

        // memory remainders, from strictly past samples
        let mut remainders = vec![0.0; self.grid.neumann.len()];
        for (ni, r) in remainders.iter_mut().enumerate() {
            let flux = boundary_flux(&rings[ni], t, dt, &self.mu, self.mu0, self.horizon)?;
            *r = flux.remainder;
        }

        for idx in 0..n {
            match self.grid.node_class[idx] {
                NodeClass::Dirichlet => u_next[idx] = 0.0,
                NodeClass::Interior => {
                    let lap = self.laplacian_at(idx, u, |_| 0.0);
                    u_next[idx] = 2.0 * u[idx] - up[idx] + dt2 * lap;
                }
                NodeClass::Neumann(ni) => {
                    let node = &self.grid.neumann[ni];
                    // explicit part: ghost with q = 0
                    let lap0 = self.laplacian_at(idx, u, |_| 0.0);
                    let s_coef = node.gamma_coef;
                    let gamma = dt * self.mu0 * s_coef;
                    let rhs = 2.0 * u[idx] - up[idx] + dt2 * lap0
                        + gamma * up[idx]
                        - 2.0 * dt2 * s_coef * remainders[ni];
                    u_next[idx] = rhs / (1.0 + gamma);
                }
            }
        }

        for &v in u_next.iter() {
            if !v.is_finite() || v.abs() > BLOWUP_LIMIT {
                return Err(SolverError::BlowUp { t });
            }
        }
        Ok(())
    }

    /// Advances from t = 0 to T_final, recording the boundary velocity
    /// traces at every step and interior snapshots on the configured stride.
    /// Deterministic: repeated runs produce identical trajectories.
    pub fn run(&self) -> Result<Trajectory, SolverError> {
        let dt = self.config.dt;
        let n_steps = (self.config.t_final / dt).round() as usize;
        let (mut state, _u1, warnings) = self.initial_state()?;
        let mut rings = self.new_rings();
        let n_neumann = self.grid.neumann.len();
        let mut traces = vec![Vec::with_capacity(n_steps + 1); n_neumann];
        let mut times = Vec::with_capacity(n_steps + 1);
        let mut snapshots = Vec::new();
        let mut grad_energy = Vec::new();
        let mut u_next = vec![0.0; self.grid.node_count()];

        for k in 0..=n_steps {
            state.t = k as f64 * dt;
            state.step = k;
            times.push(state.t);
            self.step(&state, &rings, &mut u_next).map_err(|e| match e {
                SolverError::BlowUp { .. } => SolverError::BlowUp { t: state.t },
                other => other,
            })?;
            let inv2dt = 1.0 / (2.0 * dt);
            for (ni, node) in self.grid.neumann.iter().enumerate() {
                let v = (u_next[node.node] - state.u_prev[node.node]) * inv2dt;
                traces[ni].push(v);
                rings[ni].push(v);
            }
            if k % self.config.snapshot_stride == 0 || k == n_steps {
                let v: Vec<f64> = (0..self.grid.node_count())
                    .map(|idx| (u_next[idx] - state.u_prev[idx]) * inv2dt)
                    .collect();
                grad_energy.push(gradient_energy(&self.grid, &state.u_curr));
                snapshots.push(Snapshot { t: state.t, step: k, u: state.u_curr.clone(), v });
            }
            // rotate: u_prev ← u_curr ← u_next
            std::mem::swap(&mut state.u_prev, &mut state.u_curr);
            std::mem::swap(&mut state.u_curr, &mut u_next);
        }

        Ok(Trajectory {
            grid: self.grid.clone(),
            dt,
            times,
            traces,
            snapshots,
            grad_energy,
            history_trunc_mass: self.truncated_mass,
            warnings,
        })
    }
}

/// ½ ∫ |∇_h u|² by cell-midpoint differences.
pub fn gradient_energy(grid: &Grid, u: &[f64]) -> f64 {
    let sx = grid.shape[0];
    let mut acc = 0.0;
    if grid.dim == 1 {
        let h = grid.h[0];
        for i in 0..sx - 1 {
            let du = (u[i + 1] - u[i]) / h;
            acc += du * du * h;
        }
    } else {
        let (hx, hy) = (grid.h[0], grid.h[1]);
        for j in 0..grid.shape[1] - 1 {
            for i in 0..sx - 1 {
                let a = u[j * sx + i];
                let b = u[j * sx + i + 1];
                let c = u[(j + 1) * sx + i];
                let d = u[(j + 1) * sx + i + 1];
                let ux = 0.5 * ((b - a) + (d - c)) / hx;
                let uy = 0.5 * ((c - a) + (d - b)) / hy;
                acc += (ux * ux + uy * uy) * hx * hy;
            }
        }
    }
    0.5 * acc
}

/// ½ ∫ v² by nodal trapezoid weights.
pub fn kinetic_energy(grid: &Grid, v: &[f64]) -> f64 {
    let sx = grid.shape[0];
    let mut acc = 0.0;
    if grid.dim == 1 {
        let h = grid.h[0];
        for (i, &vi) in v.iter().enumerate() {
            let w = if i == 0 || i == sx - 1 { 0.5 } else { 1.0 };
            acc += w * vi * vi * h;
        }
    } else {
        let (hx, hy) = (grid.h[0], grid.h[1]);
        for j in 0..grid.shape[1] {
            for i in 0..sx {
                let wx = if i == 0 || i == sx - 1 { 0.5 } else { 1.0 };
                let wy = if j == 0 || j == grid.shape[1] - 1 { 0.5 } else { 1.0 };
                let vi = v[j * sx + i];
                acc += wx * wy * vi * vi * hx * hy;
            }
        }
    }
    0.5 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{partition_boundary, Domain, MatN, VectorFieldSpec};
    use crate::measure::{Atom, DensityPiece, MeasureRepr};
    use crate::solver::config::InitialData;

    fn interval_solver(mu: MeasureRepr, mu0: f64, h: f64, t_final: f64) -> WaveSolver {
        let dom = Domain::Interval1D { x_left: 0.0, x_right: 1.0 };
        let spec = VectorFieldSpec::affine(MatN::identity(1), vec![-0.25]).unwrap();
        let part = partition_boundary(&spec, &dom, 8.0).unwrap();
        let grid = Grid::build(&dom, &spec, &part, h).unwrap();
        let dt = 0.5 * h;
        let config = SolverConfig {
            h,
            dt,
            t_final,
            snapshot_stride: 8,
            initial: InitialData::GaussianBump { center: vec![0.4], width: 0.05, amplitude: 1.0 },
            cfl_target: 0.9,
            eps_hist: 1e-12,
        };
        WaveSolver::new(grid, mu, mu0, config).unwrap()
    }

    #[test]
    fn flux_without_memory() {
        let ring = {
            let mut r = HistoryRing::new(8);
            for _ in 0..4 {
                r.push(1.0);
            }
            r
        };
        let flux = boundary_flux(&ring, 4.0 * 0.25, 0.25, &MeasureRepr::zero(), 2.5, 10.0).unwrap();
        assert_eq!(flux.coefficient, 2.5);
        assert_eq!(flux.remainder, 0.0);
    }

    #[test]
    fn flux_pure_delay_linear_trace() {
        // v(t) = t, μ = δ_τ with τ = 0.5: remainder = t - τ (exact under
        // linear interpolation)
        let dt = 0.125;
        let mut ring = HistoryRing::new(64);
        for k in 0..16 {
            ring.push(k as f64 * dt);
        }
        let t = 16.0 * dt;
        let mu = MeasureRepr::new(vec![Atom { tau: 0.5, weight: 1.0 }], vec![]).unwrap();
        let flux = boundary_flux(&ring, t, dt, &mu, 1.0, 64.0 * dt).unwrap();
        assert!((flux.remainder - (t - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn flux_delay_exact_on_grid_is_bitwise() {
        let dt = 0.125;
        let mut ring = HistoryRing::new(64);
        for k in 0..16 {
            ring.push((k as f64 * 0.37).sin());
        }
        let t = 16.0 * dt;
        let tau = 4.0 * dt; // exact multiple
        let mu = MeasureRepr::new(vec![Atom { tau, weight: 1.0 }], vec![]).unwrap();
        let flux = boundary_flux(&ring, t, dt, &mu, 1.0, 64.0 * dt).unwrap();
        let direct = ring.get(12).unwrap();
        assert_eq!(flux.remainder.to_bits(), direct.to_bits());
    }

    #[test]
    fn flux_indicator_kernel_constant_trace() {
        // μ = χ_{[0,1]} ds, v ≡ 1 → remainder = min(t, 1)
        let dt = 0.125;
        let mu = MeasureRepr::new(
            vec![],
            vec![DensityPiece::polynomial(0.0, 1.0, vec![1.0]).unwrap()],
        )
        .unwrap();
        for steps in [3usize, 16, 40] {
            let mut ring = HistoryRing::new(128);
            for _ in 0..steps {
                ring.push(1.0);
            }
            let t = steps as f64 * dt;
            let flux = boundary_flux(&ring, t, dt, &mu, 1.0, 128.0 * dt).unwrap();
            let expect = t.min(1.0);
            assert!(
                (flux.remainder - expect).abs() < 1e-14,
                "t={t}: {} vs {expect}",
                flux.remainder
            );
        }
    }

    #[test]
    fn delay_below_dt_rejected() {
        let mu = MeasureRepr::new(vec![Atom { tau: 1e-4, weight: 0.5 }], vec![]).unwrap();
        let dom = Domain::Interval1D { x_left: 0.0, x_right: 1.0 };
        let spec = VectorFieldSpec::affine(MatN::identity(1), vec![-0.25]).unwrap();
        let part = partition_boundary(&spec, &dom, 8.0).unwrap();
        let grid = Grid::build(&dom, &spec, &part, 1.0 / 64.0).unwrap();
        let config = SolverConfig {
            h: 1.0 / 64.0,
            dt: 0.5 / 64.0,
            t_final: 1.0,
            snapshot_stride: 8,
            initial: InitialData::GaussianBump { center: vec![0.4], width: 0.05, amplitude: 1.0 },
            cfl_target: 0.9,
            eps_hist: 1e-12,
        };
        assert!(matches!(
            WaveSolver::new(grid, mu, 1.0, config),
            Err(SolverError::DelayUnderResolved { .. })
        ));
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let mu = MeasureRepr::new(vec![Atom { tau: 0.5, weight: 0.4 }], vec![]).unwrap();
        let mut solver = interval_solver(mu, 1.0, 1.0 / 32.0, 1.0);
        solver.config.initial = InitialData::Custom {
            u0: vec![0.0; solver.grid.node_count()],
            u1: vec![0.0; solver.grid.node_count()],
        };
        let traj = solver.run().unwrap();
        for snap in &traj.snapshots {
            assert!(snap.u.iter().all(|&u| u == 0.0));
            assert!(snap.v.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn cfl_violation_rejected() {
        let dom = Domain::Interval1D { x_left: 0.0, x_right: 1.0 };
        let spec = VectorFieldSpec::affine(MatN::identity(1), vec![-0.25]).unwrap();
        let part = partition_boundary(&spec, &dom, 8.0).unwrap();
        let grid = Grid::build(&dom, &spec, &part, 1.0 / 32.0).unwrap();
        let config = SolverConfig {
            h: 1.0 / 32.0,
            dt: 1.0 / 16.0, // dt > h
            t_final: 1.0,
            snapshot_stride: 1,
            initial: InitialData::Eigenmode { indices: vec![1] },
            cfl_target: 0.9,
            eps_hist: 1e-12,
        };
        assert!(matches!(
            WaveSolver::new(grid, MeasureRepr::zero(), 1.0, config),
            Err(SolverError::CflViolation { .. })
        ));
    }
}
