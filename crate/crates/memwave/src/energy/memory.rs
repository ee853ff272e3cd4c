//! Boundary memory terms of the energy.
//!
//! Both terms reduce, after swapping the order of integration, to integrals
//! of a squared velocity trace against the tail function of the weight
//! measure. The trace enters as the piecewise-linear interpolant of its
//! squared samples; each cell is integrated in closed form against the
//! polynomial-plus-exponential tail segments, so the only discretization in
//! these terms is the trace itself.

use crate::measure::calculus::{integral_linear_exp, poly_integral, poly_mul_linear};
use crate::measure::{MeasureRepr, TailRepr};
use crate::solver::Trajectory;

use super::EnergyError;

/// ∫_{lo}^{hi} w(r)·g(r) dr with w piecewise linear on the dt-grid
/// (`w[j]` at `r = j·dt`) and g a polynomial plus exponential terms.
fn integrate_pl_times_polyexp(
    w: &[f64],
    dt: f64,
    lo: f64,
    hi: f64,
    poly: &[f64],
    exps: &[(f64, f64)],
) -> f64 {
    if hi <= lo || w.is_empty() {
        return 0.0;
    }
    let last = w.len() - 1;
    let mut total = 0.0;
    let mut r0 = lo;
    while r0 < hi {
        let j = ((r0 / dt).floor() as usize).min(last.saturating_sub(1));
        let mut cell_end = (j + 1) as f64 * dt;
        if cell_end <= r0 {
            cell_end = (j + 2) as f64 * dt;
        }
        let r1 = cell_end.min(hi);
        let wj = w[j.min(last)];
        let wj1 = w[(j + 1).min(last)];
        let slope = (wj1 - wj) / dt;
        let l0 = wj - slope * (j as f64 * dt);
        if !poly.is_empty() {
            total += poly_integral(&poly_mul_linear(l0, slope, poly), r0, r1);
        }
        for &(amp, beta) in exps {
            total += amp * integral_linear_exp(l0, slope, beta, r0, r1);
        }
        r0 = r1;
    }
    total
}

/// Plain ∫ w over [lo, hi] for the same interpolant.
fn integrate_pl(w: &[f64], dt: f64, lo: f64, hi: f64) -> f64 {
    integrate_pl_times_polyexp(w, dt, lo, hi, &[1.0], &[])
}

/// Interpolated value of the squared-sample interpolant at `r`.
fn pl_value(w: &[f64], dt: f64, r: f64) -> f64 {
    if w.is_empty() || r < 0.0 {
        return 0.0;
    }
    let last = w.len() - 1;
    let pos = r / dt;
    let j = (pos.floor() as usize).min(last);
    if j == last {
        return w[last];
    }
    let frac = pos - j as f64;
    w[j] + frac * (w[j + 1] - w[j])
}

/// Zero-based step index of time `t` on the trace grid.
pub(super) fn step_of(traj: &Trajectory, t: f64) -> Result<usize, EnergyError> {
    let k = (t / traj.dt).round();
    if k < 0.0 || (t - k * traj.dt).abs() > 1e-9 * traj.dt.max(t.abs()) {
        return Err(EnergyError::TraceMissing { t, t_final: traj.final_time() });
    }
    let k = k as usize;
    if k >= traj.times.len() {
        return Err(EnergyError::TraceMissing { t, t_final: traj.final_time() });
    }
    Ok(k)
}

/// Per-node squared-trace views for one evaluation time.
pub(super) struct SquaredTraces {
    /// Natural order: w[j] = v(t_j)².
    pub forward: Vec<Vec<f64>>,
}

impl SquaredTraces {
    pub fn build(traj: &Trajectory) -> Self {
        let forward = traj
            .traces
            .iter()
            .map(|tr| tr.iter().map(|v| v * v).collect())
            .collect();
        SquaredTraces { forward }
    }
}

/// ∫_{∂Ω_N} m·ν ∫₀ᵗ v(t−r)² λ([r,t]) dr dσ.
///
/// The weight factors as tail(r) − λ((t,∞)); both parts integrate in closed
/// form against the trace interpolant.
pub fn memory_term_past(
    traj: &Trajectory,
    lambda: &MeasureRepr,
    t: f64,
) -> Result<f64, EnergyError> {
    let tail = TailRepr::build(lambda);
    let sq = SquaredTraces::build(traj);
    memory_term_past_with(traj, lambda, &tail, &sq, t, &mut Vec::new())
}

pub(super) fn memory_term_past_with(
    traj: &Trajectory,
    lambda: &MeasureRepr,
    tail: &TailRepr,
    sq: &SquaredTraces,
    t: f64,
    scratch: &mut Vec<f64>,
) -> Result<f64, EnergyError> {
    let k_t = step_of(traj, t)?;
    let dt = traj.dt;
    let open_tail_at_t = lambda.tail(t) - lambda.atom_weight_at(t);
    let mut total = 0.0;
    for (ni, node) in traj.grid.neumann.iter().enumerate() {
        if node.damping_surface == 0.0 {
            continue;
        }
        // w[j] = v(t - j·dt)²
        scratch.clear();
        scratch.extend(sq.forward[ni][..=k_t].iter().rev());
        let mut inner = 0.0;
        for seg in &tail.segments {
            let lo = seg.lo.max(0.0);
            let hi = seg.hi.min(t);
            inner += integrate_pl_times_polyexp(scratch, dt, lo, hi, &seg.poly, &seg.exps);
        }
        if open_tail_at_t != 0.0 {
            inner -= open_tail_at_t * integrate_pl(scratch, dt, 0.0, t);
        }
        total += node.damping_surface * inner;
    }
    Ok(total)
}

/// ∫_{∂Ω_N} m·ν ∫₀^{T} v(r)² λ([max(r,t),∞)) dr dσ together with a bound on
/// the unsimulated tail beyond T, assuming the squared trace stays within
/// its observed supremum.
pub fn memory_term_future(
    traj: &Trajectory,
    lambda: &MeasureRepr,
    t: f64,
) -> Result<(f64, f64), EnergyError> {
    let tail = TailRepr::build(lambda);
    let sq = SquaredTraces::build(traj);
    memory_term_future_with(traj, lambda, &tail, &sq, t)
}

pub(super) fn memory_term_future_with(
    traj: &Trajectory,
    lambda: &MeasureRepr,
    tail: &TailRepr,
    sq: &SquaredTraces,
    t: f64,
) -> Result<(f64, f64), EnergyError> {
    step_of(traj, t)?;
    let t_final = traj.final_time();
    let dt = traj.dt;
    let tail_at_t = lambda.tail(t);
    let mut total = 0.0;
    for (ni, node) in traj.grid.neumann.iter().enumerate() {
        if node.damping_surface == 0.0 {
            continue;
        }
        let w = &sq.forward[ni];
        let mut inner = tail_at_t * integrate_pl(w, dt, 0.0, t.min(t_final));
        for seg in &tail.segments {
            let lo = seg.lo.max(t);
            let hi = seg.hi.min(t_final);
            inner += integrate_pl_times_polyexp(w, dt, lo, hi, &seg.poly, &seg.exps);
        }
        total += node.damping_surface * inner;
    }
    let surface: f64 = traj.grid.neumann.iter().map(|n| n.damping_surface).sum();
    let bound = surface * traj.max_trace_sq() * tail.integral(t_final.max(t), f64::INFINITY);
    Ok((total, bound))
}

/// ∫₀ᵗ v(t−s)² dλ(s) for one damped node: atoms interpolate the squared
/// trace, density pieces integrate against it cell by cell.
pub(super) fn convolution_sq_node(
    traj: &Trajectory,
    lambda: &MeasureRepr,
    sq: &SquaredTraces,
    ni: usize,
    k_t: usize,
    scratch: &mut Vec<f64>,
) -> f64 {
    let dt = traj.dt;
    let t = traj.times[k_t];
    scratch.clear();
    scratch.extend(sq.forward[ni][..=k_t].iter().rev());
    let mut total = 0.0;
    for atom in lambda.atoms() {
        if atom.tau <= t {
            total += atom.weight * pl_value(scratch, dt, atom.tau);
        }
    }
    for piece in lambda.pieces() {
        let lo = piece.a.max(0.0);
        let hi = piece.b.min(t);
        if hi <= lo {
            continue;
        }
        match &piece.kind {
            crate::measure::PieceKind::Polynomial { coeffs } => {
                total += integrate_pl_times_polyexp(scratch, dt, lo, hi, coeffs, &[]);
            }
            crate::measure::PieceKind::Exponential { amplitude, rate } => {
                total +=
                    integrate_pl_times_polyexp(scratch, dt, lo, hi, &[], &[(*amplitude, *rate)]);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pl_integration_of_constant_against_poly() {
        // w ≡ 1, g(r) = 1 - r on [0, 1] → ∫ = 1/2
        let w = vec![1.0; 11];
        let dt = 0.2;
        let v = integrate_pl_times_polyexp(&w, dt, 0.0, 1.0, &[1.0, -1.0], &[]);
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pl_integration_against_exponential() {
        // w(r) = r (squared-sample grid values j·dt), g = e^{-2r} on [0, 3]
        let dt = 0.25;
        let w: Vec<f64> = (0..20).map(|j| j as f64 * dt).collect();
        let v = integrate_pl_times_polyexp(&w, dt, 0.0, 3.0, &[], &[(1.0, 2.0)]);
        // ∫_0^3 r e^{-2r} dr = [−(r/2 + 1/4)e^{-2r}]_0^3
        let exact = 0.25 - (3.0 / 2.0 + 0.25) * (-6.0f64).exp();
        assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
    }

    #[test]
    fn pl_value_interpolates() {
        let w = vec![0.0, 1.0, 4.0];
        assert_eq!(pl_value(&w, 0.5, 0.25), 0.5);
        assert_eq!(pl_value(&w, 0.5, 0.75), 2.5);
        assert_eq!(pl_value(&w, 0.5, 5.0), 4.0);
    }
}
