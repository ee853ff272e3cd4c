//! Closed-form integrals used by the measure algebra.
//!
//! Everything here reduces to three primitives: polynomial integrals,
//! `∫ s^n e^{γs} ds` over intervals of ℝ⁺ (γ of either sign, upper bound
//! possibly infinite), and `∫ (l0 + l1 s) e^{-βs} ds` for trace-weighted
//! kernels. All branches are arranged so that sums have one sign wherever
//! cancellation would otherwise destroy accuracy.

const MAX_FACTORIAL: usize = 34;

fn factorial(n: usize) -> f64 {
    debug_assert!(n <= MAX_FACTORIAL);
    let mut f = 1.0;
    for k in 2..=n {
        f *= k as f64;
    }
    f
}

/// (1 - e^{-x}) / x, continuous at 0.
pub fn em1(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// (1 - (1 + x) e^{-x}) / x², continuous at 0 with value 1/2.
pub fn em2(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // Σ_{j≥0} (-x)^j (j+1)/(j+2)!
        let mut sum = 0.0;
        let mut pow = 1.0;
        for j in 0..16 {
            sum += pow * (j + 1) as f64 / factorial(j + 2);
            pow *= -x;
        }
        sum
    } else {
        (1.0 - (1.0 + x) * (-x).exp()) / (x * x)
    }
}

/// Regularized lower incomplete gamma P(k+1, x) for integer shape k+1 ≥ 1.
fn reg_lower_gamma_int(k: usize, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let s = (k + 1) as f64;
    if x < s + 1.0 {
        // series: P = x^{k+1} e^{-x} Σ_m x^m / (k+1+m)!
        let mut term = (-x).exp();
        for j in 1..=(k + 1) {
            term *= x / j as f64;
        }
        let mut sum = term;
        let mut m = 1usize;
        while term > f64::EPSILON * sum && m < 500 {
            term *= x / (k + 1 + m) as f64;
            sum += term;
            m += 1;
        }
        sum
    } else {
        // complement: Q = e^{-x} Σ_{j=0}^{k} x^j / j!
        let mut t = (-x).exp();
        let mut q = t;
        for j in 1..=k {
            t *= x / j as f64;
            q += t;
        }
        (1.0 - q).max(0.0)
    }
}

/// ∫_0^L u^k e^{γu} du for finite L ≥ 0.
fn power_exp_from_zero(k: usize, gamma: f64, len: f64) -> f64 {
    debug_assert!(len >= 0.0 && len.is_finite());
    if len == 0.0 {
        return 0.0;
    }
    let x = gamma * len;
    if gamma >= 0.0 || x.abs() < 0.5 {
        // Σ_m γ^m L^{k+m+1} / (m! (k+m+1)); single-signed for γ ≥ 0.
        let mut term = len.powi(k as i32 + 1);
        let mut sum = term / (k + 1) as f64;
        let mut m = 1usize;
        loop {
            term *= x / m as f64;
            let contrib = term / (k + m + 1) as f64;
            sum += contrib;
            if contrib.abs() <= f64::EPSILON * sum.abs() && m as f64 > x.abs() {
                break;
            }
            m += 1;
            assert!(m < 10_000, "power_exp_from_zero failed to converge");
        }
        sum
    } else {
        // γ < 0: k! / c^{k+1} · P(k+1, cL)
        let c = -gamma;
        factorial(k) / c.powi(k as i32 + 1) * reg_lower_gamma_int(k, c * len)
    }
}

/// ∫_a^b s^n e^{γs} ds with 0 ≤ a < b ≤ ∞. An infinite b requires γ < 0.
pub fn integral_power_exp(n: usize, gamma: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= a);
    debug_assert!(n <= MAX_FACTORIAL - 2);
    if a == b {
        return 0.0;
    }
    if gamma == 0.0 {
        debug_assert!(b.is_finite());
        return (b.powi(n as i32 + 1) - a.powi(n as i32 + 1)) / (n + 1) as f64;
    }
    if b.is_infinite() {
        assert!(gamma < 0.0, "divergent moment: e^{{γs}} with γ ≥ 0 on an infinite interval");
        // n!/c^{n+1} · e^{-ca} Σ_{k≤n} (ca)^k / k!
        let c = -gamma;
        let ca = c * a;
        let mut t = (-ca).exp();
        let mut sum = t;
        for k in 1..=n {
            t *= ca / k as f64;
            sum += t;
        }
        return factorial(n) / c.powi(n as i32 + 1) * sum;
    }
    // Shift to [0, L]: e^{γa} Σ_k C(n,k) a^{n-k} B_k(γ, L); single-signed for a ≥ 0.
    let len = b - a;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=n {
        let apow = if n == k { 1.0 } else { a.powi((n - k) as i32) };
        sum += binom * apow * power_exp_from_zero(k, gamma, len);
        binom *= (n - k) as f64 / (k + 1) as f64;
    }
    (gamma * a).exp() * sum
}

/// ∫_{x0}^{x1} (l0 + l1 r) e^{-βr} dr for finite 0 ≤ x0 ≤ x1, β > 0.
pub fn integral_linear_exp(l0: f64, l1: f64, beta: f64, x0: f64, x1: f64) -> f64 {
    debug_assert!(beta > 0.0 && x1 >= x0);
    let h = x1 - x0;
    if h == 0.0 {
        return 0.0;
    }
    let p = l0 + l1 * x0;
    let x = beta * h;
    (-beta * x0).exp() * (p * h * em1(x) + l1 * h * h * em2(x))
}

/// Horner evaluation of c0 + c1 s + …
pub fn poly_eval(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

/// ∫_lo^hi (c0 + c1 s + …) ds.
pub fn poly_integral(coeffs: &[f64], lo: f64, hi: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let p = k as i32 + 1;
        acc += c / p as f64 * (hi.powi(p) - lo.powi(p));
    }
    acc
}

/// Coefficients of (l0 + l1 s) · p(s).
pub fn poly_mul_linear(l0: f64, l1: f64, coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len() + 1];
    for (k, &c) in coeffs.iter().enumerate() {
        out[k] += l0 * c;
        out[k + 1] += l1 * c;
    }
    out
}

pub fn poly_add_into(target: &mut Vec<f64>, other: &[f64], scale: f64) {
    if target.len() < other.len() {
        target.resize(other.len(), 0.0);
    }
    for (t, &o) in target.iter_mut().zip(other.iter()) {
        *t += scale * o;
    }
}

/// Drops trailing coefficients that are exactly zero.
pub fn poly_trim(coeffs: &mut Vec<f64>) {
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    if coeffs.len() == 1 && coeffs[0] == 0.0 {
        coeffs.clear();
    }
}

pub fn poly_degree(coeffs: &[f64]) -> usize {
    coeffs
        .iter()
        .rposition(|&c| c != 0.0)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }

    fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let whole = simpson(f, a, b);
        let halves = simpson(f, a, m) + simpson(f, m, b);
        if (whole - halves).abs() <= 15.0 * tol || depth > 40 {
            halves + (halves - whole) / 15.0
        } else {
            adaptive(f, a, m, tol / 2.0, depth + 1) + adaptive(f, m, b, tol / 2.0, depth + 1)
        }
    }

    #[test]
    fn power_exp_matches_quadrature() {
        let cases = [
            (0, 0.5, 0.0, 2.0),
            (3, 0.5, 0.0, 2.0),
            (5, -2.0, 0.3, 4.0),
            (8, -0.001, 1.0, 3.0),
            (2, 1.7, 0.5, 6.0),
            (12, -1.0, 0.0, 10.0),
            (4, -8.0, 0.0, 0.01),
            (6, 0.0, 0.2, 1.4),
        ];
        for &(n, gamma, a, b) in &cases {
            let exact = integral_power_exp(n, gamma, a, b);
            let f = |s: f64| s.powi(n as i32) * (gamma * s).exp();
            let quad = adaptive(&f, a, b, 1e-14 * exact.abs().max(1e-6), 0);
            assert!(
                (exact - quad).abs() <= 1e-11 * quad.abs().max(1e-12),
                "n={n} gamma={gamma} [{a},{b}]: {exact} vs {quad}"
            );
        }
    }

    #[test]
    fn power_exp_infinite_tail() {
        // ∫_a^∞ s^n e^{-cs} ds, spot values
        let v = integral_power_exp(0, -2.0, 1.0, f64::INFINITY);
        assert!((v - (-2.0f64).exp() / 2.0).abs() < 1e-15);
        let v = integral_power_exp(1, -1.0, 0.0, f64::INFINITY);
        assert!((v - 1.0).abs() < 1e-15);
        let v = integral_power_exp(3, -1.0, 0.0, f64::INFINITY);
        assert!((v - 6.0).abs() < 1e-12);
    }

    #[test]
    fn linear_exp_matches_quadrature() {
        let cases = [
            (1.0, 0.0, 2.0, 0.0, 3.0),
            (0.3, -0.7, 1.3, 0.5, 0.9),
            (2.0, 5.0, 0.001, 1.0, 1.5),
            (-1.0, 2.0, 4.0, 0.0, 0.25),
        ];
        for &(l0, l1, beta, x0, x1) in &cases {
            let exact = integral_linear_exp(l0, l1, beta, x0, x1);
            let f = |r: f64| (l0 + l1 * r) * (-beta * r).exp();
            let quad = adaptive(&f, x0, x1, 1e-15, 0);
            assert!(
                (exact - quad).abs() <= 1e-12 * quad.abs().max(1e-12),
                "{exact} vs {quad}"
            );
        }
    }

    #[test]
    fn em2_series_matches_direct() {
        for &x in &[0.0999, 0.1001, 0.05, -0.05] {
            let direct = (1.0 - (1.0 + x) * (-x as f64).exp()) / (x * x);
            assert!((em2(x) - direct).abs() < 1e-12);
        }
        assert!((em2(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn poly_helpers() {
        let p = vec![1.0, 2.0, 3.0]; // 1 + 2s + 3s²
        assert_eq!(poly_eval(&p, 2.0), 17.0);
        assert!((poly_integral(&p, 0.0, 1.0) - (1.0 + 1.0 + 1.0)).abs() < 1e-15);
        let q = poly_mul_linear(1.0, 1.0, &p); // (1+s)(1+2s+3s²)
        assert_eq!(q, vec![1.0, 3.0, 5.0, 3.0]);
    }
}
