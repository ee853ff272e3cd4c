//! The tail operator and closed-form integrals of tail functions.
//!
//! `T(μ)(B) = ∫_B μ([s,∞)) ds` maps the representation class into itself:
//! atoms become indicator pieces, polynomial pieces gain one degree, and an
//! unbounded exponential piece maps to an exponential piece with the same
//! rate. A finite exponential piece contributes an exponential term plus a
//! constant on its own interval, which is why operator outputs may carry a
//! polynomial and an exponential piece on the same span.

use super::calculus::{poly_add_into, poly_degree, poly_eval, poly_integral, poly_trim};
use super::repr::{DensityPiece, MeasureError, MeasureRepr, PieceKind, INTERNAL_MAX_DEGREE};

/// The tail function `s ↦ μ([s,∞))` restricted to one smooth span:
/// polynomial plus exponential terms `Σ amp·e^{-rate·s}`.
#[derive(Debug, Clone)]
pub struct TailSegment {
    pub lo: f64,
    pub hi: f64,
    pub poly: Vec<f64>,
    pub exps: Vec<(f64, f64)>,
}

impl TailSegment {
    pub fn value_at(&self, s: f64) -> f64 {
        let mut v = poly_eval(&self.poly, s);
        for &(amp, rate) in &self.exps {
            v += amp * (-rate * s).exp();
        }
        v
    }
}

/// Piecewise closed form of `s ↦ μ([s,∞))` on the span where it is nonzero.
#[derive(Debug, Clone)]
pub struct TailRepr {
    pub segments: Vec<TailSegment>,
}

impl TailRepr {
    pub fn build(mu: &MeasureRepr) -> Self {
        let mut cuts: Vec<f64> = vec![0.0];
        for a in mu.atoms() {
            cuts.push(a.tau);
        }
        let mut unbounded = false;
        for p in mu.pieces() {
            cuts.push(p.a);
            if p.b.is_finite() {
                cuts.push(p.b);
            } else {
                unbounded = true;
            }
        }
        cuts.retain(|c| c.is_finite());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut segments = Vec::new();
        let n = cuts.len();
        for i in 0..n {
            let lo = cuts[i];
            let hi = if i + 1 < n {
                cuts[i + 1]
            } else if unbounded {
                f64::INFINITY
            } else {
                break;
            };
            // tail(s) = μ([hi,∞)) + Σ_{active pieces} ∫_s^hi f  on (lo, hi)
            let mut poly = vec![0.0];
            poly[0] = if hi.is_finite() { mu.tail(hi) } else { 0.0 };
            let mut exps: Vec<(f64, f64)> = Vec::new();
            for p in mu.pieces() {
                if p.a > lo || p.b < hi {
                    continue; // pieces only break at cuts, so coverage is all-or-nothing
                }
                match &p.kind {
                    PieceKind::Polynomial { coeffs } => {
                        for (k, &c) in coeffs.iter().enumerate() {
                            let kk = (k + 1) as f64;
                            poly[0] += c / kk * hi.powi(k as i32 + 1);
                            poly_add_into(&mut poly, &unit_power(k + 1), -c / kk);
                        }
                    }
                    PieceKind::Exponential { amplitude, rate } => {
                        let head = amplitude / rate;
                        if hi.is_finite() {
                            poly[0] -= head * (-rate * hi).exp();
                        }
                        match exps.iter_mut().find(|(_, r)| *r == *rate) {
                            Some(e) => e.0 += head,
                            None => exps.push((head, *rate)),
                        }
                    }
                }
            }
            poly_trim(&mut poly);
            exps.retain(|&(amp, _)| amp != 0.0);
            if poly.is_empty() && exps.is_empty() {
                continue;
            }
            segments.push(TailSegment { lo, hi, poly, exps });
        }
        TailRepr { segments }
    }

    /// ∫_lo^hi of the represented tail function. `hi` may be infinite when
    /// the measure has a finite first moment (always true in this class).
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let mut total = 0.0;
        for seg in &self.segments {
            let a = lo.max(seg.lo);
            let b = hi.min(seg.hi);
            if b <= a {
                continue;
            }
            if !seg.poly.is_empty() {
                debug_assert!(b.is_finite(), "polynomial tail on an unbounded span");
                total += poly_integral(&seg.poly, a, b);
            }
            for &(amp, rate) in &seg.exps {
                let upper = if b.is_finite() { (-rate * b).exp() } else { 0.0 };
                total += amp / rate * ((-rate * a).exp() - upper);
            }
        }
        total
    }
}

fn unit_power(k: usize) -> Vec<f64> {
    let mut v = vec![0.0; k + 1];
    v[k] = 1.0;
    v
}

impl MeasureRepr {
    /// The absolutely continuous measure whose density is this measure's
    /// tail function. Requires a nonnegative measure.
    pub fn apply_t(&self) -> Result<MeasureRepr, MeasureError> {
        assert!(
            self.is_nonneg(),
            "the tail operator is defined here for nonnegative measures only"
        );
        let repr = TailRepr::build(self);
        let mut pieces = Vec::new();
        for seg in repr.segments {
            if !seg.poly.is_empty() {
                if poly_degree(&seg.poly) > INTERNAL_MAX_DEGREE {
                    return Err(MeasureError::DegreeOverflow { max: INTERNAL_MAX_DEGREE });
                }
                let sign = if seg.poly.iter().all(|&c| c >= 0.0) { 1 } else { 0 };
                pieces.push(DensityPiece::raw(
                    seg.lo,
                    seg.hi,
                    PieceKind::Polynomial { coeffs: seg.poly },
                    sign,
                ));
            }
            for (amp, rate) in seg.exps {
                let sign = if amp >= 0.0 { 1 } else { -1 };
                pieces.push(DensityPiece::raw(
                    seg.lo,
                    seg.hi,
                    PieceKind::Exponential { amplitude: amp, rate },
                    sign,
                ));
            }
        }
        Ok(MeasureRepr::from_raw(Vec::new(), pieces, true))
    }

    /// ∫_lo^hi μ([s,∞)) ds in closed form; equals `T(μ)([lo,hi))`.
    pub fn tail_integral(&self, lo: f64, hi: f64) -> f64 {
        TailRepr::build(self).integral(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::repr::Atom;

    fn dirac(tau: f64, weight: f64) -> MeasureRepr {
        MeasureRepr::new(vec![Atom { tau, weight }], vec![]).unwrap()
    }

    #[test]
    fn dirac_maps_to_indicator() {
        let t = dirac(2.0, 1.0).apply_t().unwrap();
        assert_eq!(t.atoms().len(), 0);
        assert!((t.mass(0.0, 2.0) - 2.0).abs() < 1e-15);
        assert_eq!(t.mass(2.0, f64::INFINITY), 0.0);
        assert!((t.density_at(1.0) - 1.0).abs() < 1e-15);
        // interval evaluation matches ∫ tail over the same interval
        for &(a, b) in &[(0.0, 0.5), (1.5, 2.5), (0.3, 1.9)] {
            let direct = t.mass(a, b);
            let integral = dirac(2.0, 1.0).tail_integral(a, b);
            assert!((direct - integral).abs() < 1e-14);
        }
    }

    #[test]
    fn iterated_dirac_masses_are_factorial() {
        // Tⁿ(δ_τ)(ℝ⁺) = τⁿ/n!
        let tau = 1.3;
        let mut m = dirac(tau, 1.0);
        let mut fact = 1.0;
        for n in 1..=6usize {
            m = m.apply_t().unwrap();
            fact *= n as f64;
            let expect = tau.powi(n as i32) / fact;
            assert!(
                (m.total_mass() - expect).abs() < 1e-13 * expect,
                "n={n}: {} vs {expect}",
                m.total_mass()
            );
        }
    }

    #[test]
    fn exponential_is_fixed_shape() {
        let mu = MeasureRepr::new(
            vec![],
            vec![DensityPiece::exponential(0.0, f64::INFINITY, 3.0, 2.0).unwrap()],
        )
        .unwrap();
        let t = mu.apply_t().unwrap();
        assert_eq!(t.pieces().len(), 1);
        match &t.pieces()[0].kind {
            PieceKind::Exponential { amplitude, rate } => {
                assert!((amplitude - 1.5).abs() < 1e-15);
                assert_eq!(*rate, 2.0);
            }
            _ => panic!("expected exponential piece"),
        }
    }

    #[test]
    fn finite_exponential_splits_into_exp_plus_constant() {
        let mu = MeasureRepr::new(
            vec![],
            vec![DensityPiece::exponential(0.0, 1.0, 1.0, 1.0).unwrap()],
        )
        .unwrap();
        let t = mu.apply_t().unwrap();
        // density on [0,1) is e^{-s} - e^{-1}: exp piece + negative constant
        assert_eq!(t.pieces().len(), 2);
        assert!(t.is_nonneg());
        let mid = t.density_at(0.5);
        assert!((mid - ((-0.5f64).exp() - (-1.0f64).exp())).abs() < 1e-15);
        // mass identity: T(μ)(ℝ⁺) = ∫ s dμ
        assert!((t.total_mass() - mu.power_moment(1)).abs() < 1e-14);
    }

    #[test]
    fn degree_overflow_guard() {
        let mut m = dirac(1.0, 1.0);
        for _ in 0..INTERNAL_MAX_DEGREE + 1 {
            m = m.apply_t().unwrap();
        }
        // one more application would need degree INTERNAL_MAX_DEGREE + 1
        assert!(matches!(
            m.apply_t(),
            Err(MeasureError::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn first_moment_identity() {
        let mu = MeasureRepr::new(
            vec![Atom { tau: 0.5, weight: 0.25 }],
            vec![
                DensityPiece::polynomial(0.0, 1.0, vec![0.5, 1.0]).unwrap(),
                DensityPiece::exponential(1.0, f64::INFINITY, 0.3, 2.0).unwrap(),
            ],
        )
        .unwrap();
        let lhs = mu.apply_t().unwrap().total_mass();
        let rhs = mu.power_moment(1);
        assert!((lhs - rhs).abs() < 1e-13 * rhs.abs());
        // and T(μ)(ℝ⁺) = ∫_0^∞ tail
        let tail_int = mu.tail_integral(0.0, f64::INFINITY);
        assert!((tail_int - rhs).abs() < 1e-13 * rhs.abs());
    }
}
