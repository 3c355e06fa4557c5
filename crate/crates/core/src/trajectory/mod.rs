//! Ion paths `q(t)` over a transport of length `L` and duration `T`, the
//! dephasing functional `ζ[q] = ∫₀ᵀ q̈² dt`, and well programs.

pub(crate) mod well;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureOptions};

pub use well::{ion_from_well, well_from_ion, ConvolutionOptions, IonResponse, WellProgram, WellShape};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryKind {
    OptimalCubic,
    Quintic,
    RampedCubic { tau: f64 },
    FromWellProgram,
    Sampled,
    Perturbed,
    TimeReversed,
}

/// Position and its first three time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kinematics {
    pub t: f64,
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
    pub jerk: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    length: f64,
    duration: f64,
    profile: Profile,
}

#[derive(Debug, Clone)]
enum Profile {
    Cubic,
    Quintic,
    Ramped(Ramp),
    FromWell(Arc<IonResponse>),
    Sampled(Arc<SampledPath>),
    Perturbed { base: Box<Trajectory>, bump: SmoothBump },
    Reversed(Box<Trajectory>),
}

fn check_span(length: f64, duration: f64) -> Result<()> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::invalid(format!("time of flight must be positive, got {duration}")));
    }
    if !(length >= 0.0) || !length.is_finite() {
        return Err(Error::invalid(format!("transport length must be non-negative, got {length}")));
    }
    Ok(())
}

impl Trajectory {
    /// Minimiser of `ζ` under `q(0)=0, q(T)=L, q̇(0)=q̇(T)=0`:
    /// `q₀(t) = L(3t²/T² − 2t³/T³)`.
    pub fn optimal_cubic(length: f64, duration: f64) -> Result<Self> {
        check_span(length, duration)?;
        Ok(Self { length, duration, profile: Profile::Cubic })
    }

    /// `q(t) = L(10τ³ − 15τ⁴ + 6τ⁵)`, `τ = t/T`; zero acceleration at both ends.
    pub fn quintic(length: f64, duration: f64) -> Result<Self> {
        check_span(length, duration)?;
        Ok(Self { length, duration, profile: Profile::Quintic })
    }

    /// The optimal cubic with its acceleration switched on and off by
    /// half-cosine ramps of duration `tau` at either end.
    pub fn ramped_cubic(length: f64, duration: f64, tau: f64) -> Result<Self> {
        check_span(length, duration)?;
        if !(tau > 0.0 && tau < 0.5 * duration) {
            return Err(Error::invalid(format!("ramp time must lie in (0, T/2), got {tau}")));
        }
        Ok(Self { length, duration, profile: Profile::Ramped(Ramp::new(length, duration, tau)) })
    }

    /// Uniformly sampled path; sample `k` sits at `t = k·T/(n−1)`.
    /// Acceleration is stored explicitly and interpolated linearly.
    pub fn sampled(duration: f64, position: Vec<f64>, velocity: Vec<f64>, acceleration: Vec<f64>) -> Result<Self> {
        let n = position.len();
        if n < 3 || velocity.len() != n || acceleration.len() != n {
            return Err(Error::invalid("sampled trajectory needs >= 3 samples of q, q̇, q̈ of equal length"));
        }
        if position.iter().chain(&velocity).chain(&acceleration).any(|v| !v.is_finite()) {
            return Err(Error::invalid("sampled trajectory contains non-finite values"));
        }
        let length = position[n - 1] - position[0];
        check_span(length.abs(), duration)?;
        Ok(Self {
            length,
            duration,
            profile: Profile::Sampled(Arc::new(SampledPath {
                step: duration / (n - 1) as f64,
                position,
                velocity,
                acceleration,
            })),
        })
    }

    /// `base + δ` with `δ` a smooth bump vanishing with its slope at both ends.
    pub fn perturbed(base: Trajectory, bump: SmoothBump) -> Result<Self> {
        if bump.sine.iter().chain(&bump.cosine).any(|a| !a.is_finite()) {
            return Err(Error::invalid("bump amplitudes must be finite"));
        }
        Ok(Self { length: base.length, duration: base.duration, profile: Profile::Perturbed { base: Box::new(base), bump } })
    }

    /// The path run backwards, `q_r(t) = L − q(T − t)`.
    pub fn time_reversed(&self) -> Self {
        Self { length: self.length, duration: self.duration, profile: Profile::Reversed(Box::new(self.clone())) }
    }

    pub(crate) fn from_response(response: Arc<IonResponse>) -> Self {
        Self { length: response.well().length(), duration: response.well().duration(), profile: Profile::FromWell(response) }
    }

    pub fn kind(&self) -> TrajectoryKind {
        match &self.profile {
            Profile::Cubic => TrajectoryKind::OptimalCubic,
            Profile::Quintic => TrajectoryKind::Quintic,
            Profile::Ramped(r) => TrajectoryKind::RampedCubic { tau: r.tau },
            Profile::FromWell(_) => TrajectoryKind::FromWellProgram,
            Profile::Sampled(_) => TrajectoryKind::Sampled,
            Profile::Perturbed { .. } => TrajectoryKind::Perturbed,
            Profile::Reversed(_) => TrajectoryKind::TimeReversed,
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// True when `ζ` obeys the `L²/T³` scaling law exactly.
    pub fn is_analytic(&self) -> bool {
        match &self.profile {
            Profile::Cubic | Profile::Quintic | Profile::Ramped(_) => true,
            Profile::Reversed(inner) => inner.is_analytic(),
            _ => false,
        }
    }

    /// `ζ` in closed form where one exists.
    pub fn closed_form_zeta(&self) -> Option<f64> {
        let scale = self.length * self.length / self.duration.powi(3);
        match &self.profile {
            Profile::Cubic => Some(12.0 * scale),
            Profile::Quintic => Some(120.0 / 7.0 * scale),
            Profile::Reversed(inner) => inner.closed_form_zeta(),
            _ => None,
        }
    }

    /// Kinematics at `t`, clamped into `[0, T]`.
    pub fn at(&self, t: f64) -> Kinematics {
        let t = t.clamp(0.0, self.duration);
        let (l, big_t) = (self.length, self.duration);
        let (q, v, a, j) = match &self.profile {
            Profile::Cubic => {
                let s = t / big_t;
                (
                    l * (3.0 * s * s - 2.0 * s * s * s),
                    6.0 * l / big_t * (s - s * s),
                    6.0 * l / (big_t * big_t) * (1.0 - 2.0 * s),
                    -12.0 * l / big_t.powi(3),
                )
            }
            Profile::Quintic => {
                let s = t / big_t;
                let (s2, s3) = (s * s, s * s * s);
                (
                    l * (10.0 * s3 - 15.0 * s2 * s2 + 6.0 * s3 * s2),
                    l / big_t * (30.0 * s2 - 60.0 * s3 + 30.0 * s2 * s2),
                    l / (big_t * big_t) * (60.0 * s - 180.0 * s2 + 120.0 * s3),
                    l / big_t.powi(3) * (60.0 - 360.0 * s + 360.0 * s2),
                )
            }
            Profile::Ramped(r) => r.eval(t),
            Profile::FromWell(resp) => resp.kinematics(t),
            Profile::Sampled(p) => p.eval(t),
            Profile::Perturbed { base, bump } => {
                let k = base.at(t);
                let d = bump.eval(t, big_t);
                (k.position + d[0], k.velocity + d[1], k.acceleration + d[2], k.jerk + d[3])
            }
            Profile::Reversed(inner) => {
                let k = inner.at(big_t - t);
                (inner.length - k.position, k.velocity, -k.acceleration, k.jerk)
            }
        };
        Kinematics { t, position: q, velocity: v, acceleration: a, jerk: j }
    }

    pub fn position(&self, t: f64) -> f64 {
        self.at(t).position
    }

    pub fn velocity(&self, t: f64) -> f64 {
        self.at(t).velocity
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        self.at(t).acceleration
    }

    pub fn jerk(&self, t: f64) -> f64 {
        self.at(t).jerk
    }

    /// Points in `[0, T]` where the acceleration is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.profile {
            Profile::Ramped(r) => vec![0.0, r.tau, self.duration - r.tau, self.duration],
            Profile::Perturbed { base, .. } => base.breakpoints(),
            Profile::Reversed(inner) => inner.breakpoints().iter().rev().map(|b| self.duration - b).collect(),
            _ => vec![0.0, self.duration],
        }
    }

    /// Lower bound on quadrature panels needed to resolve the acceleration.
    pub(crate) fn min_panels(&self) -> usize {
        match &self.profile {
            Profile::FromWell(resp) => (resp.well().omega() * self.duration / PI).ceil() as usize + 1,
            Profile::Perturbed { base, bump } => base.min_panels().max(2 * bump.max_mode() + 2),
            Profile::Reversed(inner) => inner.min_panels(),
            _ => 1,
        }
    }

    /// `n` uniformly spaced samples over `[0, T]`.
    pub fn samples(&self, n: usize) -> Vec<Kinematics> {
        let n = n.max(2);
        (0..n).map(|k| self.at(self.duration * k as f64 / (n - 1) as f64)).collect()
    }
}

/// Optimal cubic with cosine-ramped endpoint accelerations.
///
/// On `[0, τ]` the acceleration is `B(1 − cos(πt/τ))/2` with `B = q̈₀(τ)`,
/// between the ramps it is `c·q̈₀(t)`, and the second half mirrors the first
/// with opposite sign, so `∫q̈ = 0` by construction. The overall scale `c` is
/// fixed by `q(T) = L`.
#[derive(Debug, Clone, Copy)]
struct Ramp {
    length: f64,
    duration: f64,
    tau: f64,
    peak: f64,
    scale: f64,
    total: f64,
}

impl Ramp {
    fn new(length: f64, duration: f64, tau: f64) -> Self {
        let mut r = Self { length, duration, tau, peak: 0.0, scale: 1.0, total: 0.0 };
        r.peak = r.cubic(tau).2;
        r.total = 2.0 * r.unscaled(0.5 * duration).0;
        r.scale = if r.total != 0.0 { length / r.total } else { 1.0 };
        r
    }

    fn cubic(&self, t: f64) -> (f64, f64, f64, f64) {
        let (l, big_t) = (self.length, self.duration);
        let s = t / big_t;
        (
            l * (3.0 * s * s - 2.0 * s * s * s),
            6.0 * l / big_t * (s - s * s),
            6.0 * l / (big_t * big_t) * (1.0 - 2.0 * s),
            -12.0 * l / big_t.powi(3),
        )
    }

    /// Unscaled profile for `t ≤ T − τ`.
    fn unscaled(&self, t: f64) -> (f64, f64, f64, f64) {
        let (tau, b) = (self.tau, self.peak);
        let w = PI / tau;
        if t <= tau {
            let (sn, cs) = (w * t).sin_cos();
            (
                0.5 * b * (0.5 * t * t + (cs - 1.0) / (w * w)),
                0.5 * b * (t - sn / w),
                0.5 * b * (1.0 - cs),
                0.5 * b * w * sn,
            )
        } else {
            let x_tau = 0.5 * b * (0.5 * tau * tau - 2.0 / (w * w));
            let v_tau = 0.5 * b * tau;
            let c_tau = self.cubic(tau);
            let c = self.cubic(t);
            let dt = t - tau;
            (x_tau + v_tau * dt + c.0 - c_tau.0 - c_tau.1 * dt, v_tau + c.1 - c_tau.1, c.2, c.3)
        }
    }

    fn eval(&self, t: f64) -> (f64, f64, f64, f64) {
        let (x, v, a, j) = if t <= self.duration - self.tau {
            self.unscaled(t)
        } else {
            let m = self.unscaled(self.duration - t);
            (self.total - m.0, m.1, -m.2, m.3)
        };
        let c = self.scale;
        (c * x, c * v, c * a, c * j)
    }
}

#[derive(Debug)]
struct SampledPath {
    step: f64,
    position: Vec<f64>,
    velocity: Vec<f64>,
    acceleration: Vec<f64>,
}

impl SampledPath {
    fn eval(&self, t: f64) -> (f64, f64, f64, f64) {
        let n = self.position.len();
        let k = ((t / self.step).floor() as usize).min(n - 2);
        let h = self.step;
        let s = (t - k as f64 * h) / h;
        let hermite = |y: &[f64], dy: &[f64]| {
            let (s2, s3) = (s * s, s * s * s);
            (2.0 * s3 - 3.0 * s2 + 1.0) * y[k]
                + (s3 - 2.0 * s2 + s) * h * dy[k]
                + (-2.0 * s3 + 3.0 * s2) * y[k + 1]
                + (s3 - s2) * h * dy[k + 1]
        };
        let a = &self.acceleration;
        (
            hermite(&self.position, &self.velocity),
            hermite(&self.velocity, a),
            a[k] + s * (a[k + 1] - a[k]),
            (a[k + 1] - a[k]) / h,
        )
    }

    /// Exact integral of the squared piecewise-linear acceleration, using
    /// every `stride`-th sample.
    fn zeta(&self, stride: usize) -> f64 {
        let a = &self.acceleration;
        let h = self.step * stride as f64;
        let idx: Vec<usize> = (0..a.len()).step_by(stride).collect();
        idx.windows(2).map(|w| h * (a[w[0]] * a[w[0]] + a[w[0]] * a[w[1]] + a[w[1]] * a[w[1]]) / 3.0).sum()
    }
}

/// `δ(t) = sin²(πt/T) · Σ_k [a_k sin(kπt/T) + b_k cos(kπt/T)]`; `δ` and `δ̇`
/// vanish at both ends, so adding it keeps the transport boundary conditions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SmoothBump {
    /// `a_k` for `k = 1, 2, …`
    pub sine: Vec<f64>,
    /// `b_k` for `k = 0, 1, …`
    pub cosine: Vec<f64>,
}

impl SmoothBump {
    fn max_mode(&self) -> usize {
        self.sine.len().max(self.cosine.len()) + 2
    }

    /// `[δ, δ̇, δ̈, δ⃛]` at `t`.
    fn eval(&self, t: f64, duration: f64) -> [f64; 4] {
        let w = PI / duration;
        let u = w * t;
        let (s2, c2) = (2.0 * u).sin_cos();
        let g = [0.5 * (1.0 - c2), s2, 2.0 * c2, -4.0 * s2];
        let mut h = [0.0; 4];
        let mut add = |k: f64, amp: f64, sine: bool| {
            let (sn, cs) = (k * u).sin_cos();
            let d = if sine { [sn, k * cs, -k * k * sn, -k * k * k * cs] } else { [cs, -k * sn, -k * k * cs, k * k * k * sn] };
            for (hi, di) in h.iter_mut().zip(d) {
                *hi += amp * di;
            }
        };
        for (i, &a) in self.sine.iter().enumerate() {
            add((i + 1) as f64, a, true);
        }
        for (i, &b) in self.cosine.iter().enumerate() {
            add(i as f64, b, false);
        }
        // Leibniz rule in u, then d/dt = w d/du.
        let d0 = g[0] * h[0];
        let d1 = g[1] * h[0] + g[0] * h[1];
        let d2 = g[2] * h[0] + 2.0 * g[1] * h[1] + g[0] * h[2];
        let d3 = g[3] * h[0] + 3.0 * g[2] * h[1] + 3.0 * g[1] * h[2] + g[0] * h[3];
        [d0, w * d1, w * w * d2, w * w * w * d3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaResult {
    /// `∫₀ᵀ q̈² dt`, m²/s³.
    pub zeta: f64,
    /// `ζ·T³/L²`; absent when `L = 0`.
    pub normalized: Option<f64>,
    /// A-posteriori quadrature error, m²/s³.
    pub error_estimate: f64,
}

/// `ζ[q] = ∫₀ᵀ q̈(t)² dt`.
pub fn zeta(traj: &Trajectory, opts: &QuadratureOptions) -> Result<ZetaResult> {
    let (value, error) = match &traj.profile {
        Profile::Sampled(path) => {
            let fine = path.zeta(1);
            let err = if path.acceleration.len() >= 5 { (fine - path.zeta(2)).abs() / 3.0 } else { 0.0 };
            let tol = (opts.rel_tol * fine.abs()).max(opts.abs_tol);
            if err > tol {
                return Err(Error::NonConvergence { achieved: err, tolerance: tol });
            }
            (fine, err)
        }
        _ => {
            let est = quadrature::integrate(
                |t| traj.acceleration(t).powi(2),
                &traj.breakpoints(),
                traj.min_panels(),
                opts,
            )?;
            (est.value, est.error)
        }
    };
    let l = traj.length();
    let normalized = if l != 0.0 { Some(value * traj.duration().powi(3) / (l * l)) } else { None };
    Ok(ZetaResult { zeta: value, normalized, error_estimate: error })
}
