//! Ring buffers of boundary velocity samples feeding the memory term.

use super::grid::SolverError;

/// Fixed-capacity ring of velocity samples at uniform dt, oldest-overwrite.
/// Samples are indexed by step number; everything stored is strictly prior
/// to the step currently being advanced.
#[derive(Debug, Clone)]
pub struct HistoryRing {
    buf: Vec<f64>,
    cap: usize,
    next_step: usize,
}

impl HistoryRing {
    pub fn new(cap: usize) -> Self {
        Self { buf: vec![0.0; cap.max(2)], cap: cap.max(2), next_step: 0 }
    }

    pub fn push(&mut self, v: f64) {
        let slot = self.next_step % self.cap;
        self.buf[slot] = v;
        self.next_step += 1;
    }

    pub fn latest_step(&self) -> Option<usize> {
        self.next_step.checked_sub(1)
    }

    /// Sample at a step index; negative steps are quiescent prehistory.
    pub fn get(&self, step: isize) -> Result<f64, SolverError> {
        if step < 0 {
            return Ok(0.0);
        }
        let step = step as usize;
        if step >= self.next_step || step + self.cap < self.next_step {
            return Err(SolverError::HistoryExhausted);
        }
        Ok(self.buf[step % self.cap])
    }

    /// Trace value at time `t_prime ≥ 0`, linearly interpolated between the
    /// two bracketing stored samples. Times at or beyond the most recent
    /// stored sample clamp to it, keeping the memory term fully explicit;
    /// negative times are zero.
    pub fn value_at(&self, t_prime: f64, dt: f64) -> Result<f64, SolverError> {
        if t_prime < 0.0 {
            return Ok(0.0);
        }
        let Some(latest) = self.latest_step() else {
            return Ok(0.0);
        };
        let pos = t_prime / dt;
        let j = pos.floor();
        if j >= latest as f64 {
            return self.get(latest as isize);
        }
        let frac = pos - j;
        let v0 = self.get(j as isize)?;
        let v1 = self.get(j as isize + 1)?;
        Ok(v0 + frac * (v1 - v0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oldest_overwrite_discipline() {
        let mut ring = HistoryRing::new(4);
        for k in 0..10 {
            ring.push(k as f64);
        }
        assert_eq!(ring.get(9).unwrap(), 9.0);
        assert_eq!(ring.get(6).unwrap(), 6.0);
        assert!(ring.get(5).is_err());
        assert!(ring.get(10).is_err());
        assert_eq!(ring.get(-3).unwrap(), 0.0);
    }

    #[test]
    fn interpolation_is_exact_on_grid() {
        let mut ring = HistoryRing::new(16);
        let dt = 0.125; // exactly representable
        for k in 0..8 {
            ring.push((k as f64).sin());
        }
        // exact multiple of dt hits the stored sample bitwise
        let direct = ring.get(4).unwrap();
        let interp = ring.value_at(4.0 * dt, dt).unwrap();
        assert_eq!(direct.to_bits(), interp.to_bits());
        // midpoint interpolates
        let mid = ring.value_at(4.5 * dt, dt).unwrap();
        assert!((mid - 0.5 * (ring.get(4).unwrap() + ring.get(5).unwrap())).abs() < 1e-15);
    }

    #[test]
    fn clamps_to_most_recent() {
        let mut ring = HistoryRing::new(8);
        ring.push(1.0);
        ring.push(2.0);
        // anything at or beyond the last stored time uses that sample
        assert_eq!(ring.value_at(0.2, 0.1).unwrap(), 2.0);
        assert_eq!(ring.value_at(0.15, 0.1).unwrap(), 2.0);
    }
}
