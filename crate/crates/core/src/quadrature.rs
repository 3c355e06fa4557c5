//! Composite Gauss–Legendre quadrature with panel-halving error estimates,
//! and a Filon-type rule for integrals carrying a fast `e^{iωt}` factor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomials `P_0(x) .. P_{n-1}(x)`.
fn legendre_table(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(1.0);
    if n == 1 {
        return out;
    }
    out.push(x);
    for k in 2..n {
        let kf = k as f64;
        let p = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(p);
    }
    out
}

/// Spherical Bessel functions `j_0(x) .. j_nmax(x)`.
pub fn spherical_bessel_j(nmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    let mut out = vec![0.0; nmax + 1];
    if ax == 0.0 {
        out[0] = 1.0;
    } else if ax < 1.0 {
        // Power series, converges quickly for |x| < 1.
        let mut double_fact = 1.0; // (2n+1)!!
        let mut xn = 1.0;
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                double_fact *= (2 * n + 1) as f64;
                xn *= ax;
            }
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..40 {
                term *= -0.5 * ax * ax / (k as f64 * (2 * n + 2 * k + 1) as f64);
                sum += term;
                if term.abs() < 1e-17 * sum.abs() {
                    break;
                }
            }
            *slot = xn / double_fact * sum;
        }
    } else if ax > nmax as f64 + 0.5 {
        // Upward recurrence is stable while n < x.
        out[0] = ax.sin() / ax;
        if nmax >= 1 {
            out[1] = ax.sin() / (ax * ax) - ax.cos() / ax;
        }
        for n in 1..nmax {
            out[n + 1] = (2 * n + 1) as f64 / ax * out[n] - out[n - 1];
        }
    } else {
        // Miller's downward recurrence, normalised against j0 or j1.
        let start = nmax + 30 + ax.ceil() as usize;
        let mut f_next = 0.0;
        let mut f = 1e-300;
        let mut scratch = vec![0.0; start + 1];
        scratch[start] = f;
        for n in (1..=start).rev() {
            let f_prev = (2 * n + 1) as f64 / ax * f - f_next;
            f_next = f;
            f = f_prev;
            scratch[n - 1] = f;
            if f.abs() > 1e250 {
                for v in scratch[n - 1..].iter_mut() {
                    *v *= 1e-250;
                }
                f *= 1e-250;
                f_next *= 1e-250;
            }
        }
        let j0 = ax.sin() / ax;
        let j1 = ax.sin() / (ax * ax) - ax.cos() / ax;
        let scale = if j0.abs() >= j1.abs() { j0 / scratch[0] } else { j1 / scratch[1] };
        for (n, slot) in out.iter_mut().enumerate() {
            *slot = scratch[n] * scale;
        }
    }
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { order: 8, rel_tol: 1e-9, abs_tol: 0.0, initial_panels: 4, max_panels: 1 << 22 }
    }
}

impl QuadratureOptions {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.order > 64 {
            return Err(Error::invalid(format!("quadrature order {} outside 1..=64", self.order)));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if self.initial_panels == 0 || self.max_panels < self.initial_panels {
            return Err(Error::invalid("invalid quadrature panel limits"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

/// Split the segments between sorted `breakpoints` into about `total` panels.
fn panel_counts(breakpoints: &[f64], total: usize) -> Vec<usize> {
    let span = breakpoints[breakpoints.len() - 1] - breakpoints[0];
    breakpoints
        .windows(2)
        .map(|w| (((w[1] - w[0]) / span) * total as f64).ceil().max(1.0) as usize)
        .collect()
}

fn check_breakpoints(breakpoints: &[f64]) -> Result<()> {
    if breakpoints.len() < 2 {
        return Err(Error::invalid("at least two breakpoints required"));
    }
    if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || breakpoints.iter().any(|b| !b.is_finite()) {
        return Err(Error::invalid("breakpoints must be finite and strictly increasing"));
    }
    Ok(())
}

/// `∫ f` over `[breakpoints[0], breakpoints[last]]`, refining by panel halving
/// until two successive estimates agree within tolerance.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    min_panels: usize,
    opts: &QuadratureOptions,
) -> Result<Estimate<f64>> {
    opts.validate()?;
    check_breakpoints(breakpoints)?;
    let rule = GaussLegendre::new(opts.order);
    let run = |total: usize| -> (f64, usize) {
        let mut acc = 0.0;
        let mut used = 0;
        for (w, n) in breakpoints.windows(2).zip(panel_counts(breakpoints, total)) {
            let h = (w[1] - w[0]) / n as f64;
            for k in 0..n {
                let a = w[0] + k as f64 * h;
                acc += rule.integrate(a, a + h, &f);
            }
            used += n;
        }
        (acc, used)
    };
    let mut total = opts.initial_panels.max(min_panels).max(breakpoints.len() - 1);
    let (mut coarse, _) = run(total);
    loop {
        total *= 2;
        let (fine, used) = run(total);
        let err = (fine - coarse).abs();
        if !fine.is_finite() {
            return Err(Error::invalid("integrand is not finite"));
        }
        if err <= (opts.rel_tol * fine.abs()).max(opts.abs_tol) {
            return Ok(Estimate { value: fine, error: err, panels: used });
        }
        if total * 2 > opts.max_panels {
            return Err(Error::NonConvergence {
                achieved: err,
                tolerance: (opts.rel_tol * fine.abs()).max(opts.abs_tol),
            });
        }
        coarse = fine;
    }
}

/// `∫ f(t) e^{iωt} dt` with `f` expanded in Legendre polynomials on each
/// panel and the moments `∫ P_k(u) e^{iκu} du = 2 iᵏ j_k(κ)` taken exactly,
/// so the panel size only has to resolve `f`, not the oscillation.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(
    f: F,
    omega: f64,
    breakpoints: &[f64],
    min_panels: usize,
    opts: &QuadratureOptions,
) -> Result<Estimate<Complex64>> {
    opts.validate()?;
    check_breakpoints(breakpoints)?;
    let rule = GaussLegendre::new(opts.order);
    let n = rule.order();
    let polys: Vec<Vec<f64>> = rule.nodes().iter().map(|&x| legendre_table(n, x)).collect();
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    // returns the panel integral and the panel's ∫|f|
    let panel = |a: f64, b: f64| -> (Complex64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let kappa = omega * h;
        let values: Vec<f64> = rule.nodes().iter().map(|&x| f(c + h * x)).collect();
        let bessel = spherical_bessel_j(n - 1, kappa);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let mut coeff = 0.0;
            for (i, v) in values.iter().enumerate() {
                coeff += rule.weights()[i] * v * polys[i][k];
            }
            coeff *= (2 * k + 1) as f64 / 2.0;
            acc += i_pow[k % 4] * (2.0 * coeff * bessel[k]);
        }
        let magnitude: f64 = values.iter().zip(rule.weights()).map(|(v, w)| v.abs() * w).sum::<f64>() * h;
        (acc * Complex64::from_polar(h, omega * c), magnitude)
    };
    let run = |total: usize| -> (Complex64, f64, usize) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        let mut used = 0;
        for (w, cnt) in breakpoints.windows(2).zip(panel_counts(breakpoints, total)) {
            let h = (w[1] - w[0]) / cnt as f64;
            for k in 0..cnt {
                let a = w[0] + k as f64 * h;
                let (v, m) = panel(a, a + h);
                acc += v;
                mass += m;
            }
            used += cnt;
        }
        (acc, mass, used)
    };
    // e^{iωt} cannot be evaluated better than ε·|ωt|
    let reach = breakpoints[0].abs().max(breakpoints[breakpoints.len() - 1].abs());
    let phase_noise = 64.0 * f64::EPSILON * (1.0 + (omega * reach).abs());
    let mut total = opts.initial_panels.max(min_panels).max(breakpoints.len() - 1);
    let (mut coarse, _, _) = run(total);
    loop {
        total *= 2;
        let (fine, mass, used) = run(total);
        let err = (fine - coarse).norm();
        if !(fine.re.is_finite() && fine.im.is_finite()) {
            return Err(Error::invalid("integrand is not finite"));
        }
        let tolerance = (opts.rel_tol * fine.norm()).max(opts.abs_tol).max(phase_noise * mass);
        if err <= tolerance {
            return Ok(Estimate { value: fine, error: err, panels: used });
        }
        if total * 2 > opts.max_panels {
            return Err(Error::NonConvergence { achieved: err, tolerance });
        }
        coarse = fine;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(6);
        for p in 0..12 {
            let got = rule.integrate(0.0, 2.0, |x| x.powi(p));
            let want = 2f64.powi(p + 1) / (p + 1) as f64;
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
        let wsum: f64 = rule.weights().iter().sum();
        assert_relative_eq!(wsum, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn spherical_bessel_matches_closed_forms() {
        for &x in &[0.3, 1.7, 5.0, 12.0, 40.0, 3.0e6] {
            let j = spherical_bessel_j(3, x);
            let (s, c) = (f64::sin(x), f64::cos(x));
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            let j3 = (15.0 / x.powi(3) - 6.0 / x) * s / x - (15.0 / (x * x) - 1.0) * c / x;
            assert_relative_eq!(j[0], s / x, epsilon = 1e-14, max_relative = 1e-10);
            assert_relative_eq!(j[2], j2, epsilon = 1e-13, max_relative = 1e-8);
            assert_relative_eq!(j[3], j3, epsilon = 1e-13, max_relative = 1e-6);
        }
    }

    #[test]
    fn legendre_moments_against_brute_force() {
        // ∫ P_k(u) e^{iκu} du = 2 i^k j_k(κ), brute-forced with a fine rule.
        let fine = GaussLegendre::new(60);
        for &kappa in &[0.5, 3.0, 9.0, 20.0] {
            let j = spherical_bessel_j(7, kappa);
            for (k, jk) in j.iter().enumerate() {
                let re = fine.integrate(-1.0, 1.0, |u| legendre_table(8, u)[k] * (kappa * u).cos());
                let im = fine.integrate(-1.0, 1.0, |u| legendre_table(8, u)[k] * (kappa * u).sin());
                let want = Complex64::new(0.0, 1.0).powi(k as i32) * 2.0 * jk;
                assert!((Complex64::new(re, im) - want).norm() < 1e-12, "k={k} kappa={kappa}");
            }
        }
    }

    #[test]
    fn oscillatory_integral_of_linear_function() {
        // ∫_0^1 t e^{iωt} dt = e^{iω}(1/(iω) + 1/ω²) − 1/ω²
        let omega = 1.0e6;
        let est = integrate_oscillatory(|t| t, omega, &[0.0, 1.0], 1, &QuadratureOptions::default()).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let e = Complex64::from_polar(1.0, omega);
        let want = e * (1.0 / (i * omega) + 1.0 / (omega * omega)) - 1.0 / (omega * omega);
        assert!((est.value - want).norm() < 1e-12 * want.norm().max(1e-6), "{} vs {}", est.value, want);
    }

    #[test]
    fn adaptive_integration_reports_non_convergence() {
        let opts = QuadratureOptions { max_panels: 16, ..Default::default() };
        let err = integrate(|t| (1.0e4 * t).sin().powi(2), &[0.0, 1.0], 1, &opts).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn breakpoints_must_increase() {
        let opts = QuadratureOptions::default();
        assert!(integrate(|t| t, &[0.0, 0.0], 1, &opts).is_err());
        assert!(integrate(|t| t, &[1.0], 1, &opts).is_err());
    }
}
