use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_span, Trajectory, TrajectoryKind};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Path of the potential minimum during transport.
#[derive(Debug, Clone)]
pub enum WellShape {
    /// `s₀ = q₀ + q̈₀/ω²` for the optimal cubic ion path.
    OptimalCubic,
    /// `s = L sin²(πt/2T)`.
    RoweSinSq,
    /// Well held at `level` during flight, then jumping to `L` at `T`.
    Constant { level: f64 },
    /// `s = q + q̈/ω²` for an arbitrary ion path.
    FromIon(Box<Trajectory>),
    /// Uniform samples on `[0, T]`, linearly interpolated.
    Sampled { values: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct WellProgram {
    shape: WellShape,
    omega: f64,
    length: f64,
    duration: f64,
}

impl WellProgram {
    pub fn new(shape: WellShape, omega: f64, length: f64, duration: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid(format!("trap frequency must be positive, got {omega}")));
        }
        check_span(length, duration)?;
        match &shape {
            WellShape::Constant { level } if !level.is_finite() => {
                return Err(Error::invalid("constant well level must be finite"));
            }
            WellShape::Sampled { values } if values.len() < 2 || values.iter().any(|v| !v.is_finite()) => {
                return Err(Error::invalid("sampled well needs at least two finite values"));
            }
            WellShape::FromIon(traj) if (traj.duration() - duration).abs() > 1e-12 * duration => {
                return Err(Error::invalid("ion path and well program durations differ"));
            }
            _ => {}
        }
        Ok(Self { shape, omega, length, duration })
    }

    pub fn optimal(omega: f64, length: f64, duration: f64) -> Result<Self> {
        Self::new(WellShape::OptimalCubic, omega, length, duration)
    }

    pub fn rowe(omega: f64, length: f64, duration: f64) -> Result<Self> {
        Self::new(WellShape::RoweSinSq, omega, length, duration)
    }

    pub fn constant(level: f64, omega: f64, length: f64, duration: f64) -> Result<Self> {
        Self::new(WellShape::Constant { level }, omega, length, duration)
    }

    pub fn shape(&self) -> &WellShape {
        &self.shape
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn duration(&self) -> f64 {
        self.duration
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

    /// Well centre while in flight, `t` clamped to `[0, T]` (one-sided limits at the ends).
    pub fn in_flight(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.duration);
        let w2 = self.omega * self.omega;
        match &self.shape {
            WellShape::OptimalCubic => {
                let c = self.cubic(t);
                c.0 + c.2 / w2
            }
            WellShape::RoweSinSq => self.length * (0.5 * PI * t / self.duration).sin().powi(2),
            WellShape::Constant { level } => *level,
            WellShape::FromIon(traj) => {
                let k = traj.at(t);
                k.position + k.acceleration / w2
            }
            WellShape::Sampled { values } => {
                let h = self.duration / (values.len() - 1) as f64;
                let k = ((t / h).floor() as usize).min(values.len() - 2);
                let s = (t - k as f64 * h) / h;
                values[k] + s * (values[k + 1] - values[k])
            }
        }
    }

    /// `ṡ` in flight.
    pub fn rate(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.duration);
        let w2 = self.omega * self.omega;
        match &self.shape {
            WellShape::OptimalCubic => {
                let c = self.cubic(t);
                c.1 + c.3 / w2
            }
            WellShape::RoweSinSq => 0.5 * PI * self.length / self.duration * (PI * t / self.duration).sin(),
            WellShape::Constant { .. } => 0.0,
            WellShape::FromIon(traj) => {
                let k = traj.at(t);
                k.velocity + k.jerk / w2
            }
            WellShape::Sampled { values } => {
                let h = self.duration / (values.len() - 1) as f64;
                let k = ((t / h).floor() as usize).min(values.len() - 2);
                (values[k + 1] - values[k]) / h
            }
        }
    }

    /// Full program including the constant extensions: `0` before the start, `L` after the end.
    pub fn position(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else if t > self.duration {
            self.length
        } else {
            self.in_flight(t)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            WellShape::FromIon(traj) => traj.breakpoints(),
            WellShape::Sampled { values } => {
                let n = values.len() - 1;
                (0..=n).map(|k| self.duration * k as f64 / n as f64).collect()
            }
            _ => vec![0.0, self.duration],
        }
    }
}

/// Discretisation of the convolution that turns a well program into an ion path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvolutionOptions {
    pub samples_per_period: f64,
    pub min_samples_per_period: f64,
    pub min_cells: usize,
    pub max_cells: usize,
    pub gl_order: usize,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        Self { samples_per_period: 64.0, min_samples_per_period: 40.0, min_cells: 64, max_cells: 1 << 22, gl_order: 10 }
    }
}

impl ConvolutionOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.samples_per_period >= self.min_samples_per_period) {
            return Err(Error::GridTooCoarse {
                samples_per_period: self.samples_per_period,
                required: self.min_samples_per_period,
            });
        }
        if self.gl_order < 2 || self.min_cells < 1 || self.max_cells < self.min_cells {
            return Err(Error::invalid("convolution options out of range"));
        }
        Ok(())
    }
}

/// Ion response to a well program, starting at rest in the ground state at `s = 0`.
///
/// Holds the cumulative kernel `K(t) = s(0⁺) + ∫₀ᵗ ṡ(t₁) e^{iωt₁} dt₁` on a cell
/// grid; with `E = e^{−iωt} K` the ion moves as `q = s − Re E`,
/// `q̇ = −ω Im E`, `q̈ = ω² Re E`.
#[derive(Debug)]
pub struct IonResponse {
    well: WellProgram,
    nodes: Vec<f64>,
    kernel: Vec<Complex64>,
    rule: GaussLegendre,
}

impl IonResponse {
    pub fn well(&self) -> &WellProgram {
        &self.well
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    fn piece(&self, a: f64, b: f64) -> Complex64 {
        let w = self.well.omega;
        if b <= a {
            return Complex64::new(0.0, 0.0);
        }
        if let WellShape::Sampled { .. } = self.well.shape {
            // ṡ is constant on each sample interval
            let rate = self.well.rate(0.5 * (a + b));
            let ea = Complex64::from_polar(1.0, w * a);
            let eb = Complex64::from_polar(1.0, w * b);
            return rate * (eb - ea) / Complex64::new(0.0, w);
        }
        self.rule.integrate_complex(a, b, |t| self.well.rate(t) * Complex64::from_polar(1.0, w * t))
    }

    /// `K(t)`, `t` clamped to `[0, T]`.
    pub fn kernel(&self, t: f64) -> Complex64 {
        let t = t.clamp(0.0, self.well.duration);
        let k = match self.nodes.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(self.nodes.len() - 2),
        };
        self.kernel[k] + self.piece(self.nodes[k], t)
    }

    /// `E(t) = e^{−iωt} K(t)`: the ion's lag behind the well and its velocity in one number.
    pub fn lag(&self, t: f64) -> Complex64 {
        let t = t.clamp(0.0, self.well.duration);
        Complex64::from_polar(1.0, -self.well.omega * t) * self.kernel(t)
    }

    pub(super) fn kinematics(&self, t: f64) -> (f64, f64, f64, f64) {
        let w = self.well.omega;
        let e = self.lag(t);
        (
            self.well.in_flight(t) - e.re,
            -w * e.im,
            w * w * e.re,
            w * w * w * e.im + w * w * self.well.rate(t),
        )
    }
}

/// Ion path driven by `well`, via the convolution of the well velocity with the
/// oscillator response.
pub fn ion_from_well(well: &WellProgram, opts: &ConvolutionOptions) -> Result<Trajectory> {
    Ok(Trajectory::from_response(Arc::new(response(well, opts)?)))
}

pub(crate) fn response(well: &WellProgram, opts: &ConvolutionOptions) -> Result<IonResponse> {
    opts.validate()?;
    let (w, big_t) = (well.omega, well.duration);
    let period = 2.0 * PI / w;
    if let WellShape::Sampled { values } = &well.shape {
        let per_period = period / (big_t / (values.len() - 1) as f64);
        if per_period < opts.min_samples_per_period {
            return Err(Error::GridTooCoarse { samples_per_period: per_period, required: opts.min_samples_per_period });
        }
    }
    let target = (big_t / period * opts.samples_per_period).ceil().max(opts.min_cells as f64);
    if target > opts.max_cells as f64 {
        return Err(Error::invalid(format!(
            "ωT = {:.3e} needs {target:.0} convolution cells, above the limit {}",
            w * big_t,
            opts.max_cells
        )));
    }
    let h_max = big_t / target;
    let mut nodes = vec![0.0];
    for seg in well.breakpoints().windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let n = ((b - a) / h_max).ceil().max(1.0) as usize;
        for k in 1..=n {
            nodes.push(if k == n { b } else { a + (b - a) * k as f64 / n as f64 });
        }
    }
    let mut resp = IonResponse {
        well: well.clone(),
        kernel: Vec::with_capacity(nodes.len()),
        nodes,
        rule: GaussLegendre::new(opts.gl_order),
    };
    let mut acc = Complex64::new(well.in_flight(0.0), 0.0);
    resp.kernel.push(acc);
    for i in 1..resp.nodes.len() {
        acc += resp.piece(resp.nodes[i - 1], resp.nodes[i]);
        resp.kernel.push(acc);
    }
    Ok(resp)
}

/// Well program that makes the ion follow `traj`: `s = q + q̈/ω²` in flight.
pub fn well_from_ion(traj: &Trajectory, omega: f64) -> Result<WellProgram> {
    let shape = match traj.kind() {
        TrajectoryKind::OptimalCubic => WellShape::OptimalCubic,
        _ => WellShape::FromIon(Box::new(traj.clone())),
    };
    WellProgram::new(shape, omega, traj.length(), traj.duration())
}
