//! Coherent-state dynamics of an ion in a moving harmonic well.

mod fock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{ATOMIC_MASS_UNIT, ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::trajectory::{self, ConvolutionOptions, Trajectory, WellProgram};

pub use fock::{fock_oracle, FockOptions, FockResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IonSpecies {
    pub name: String,
    /// kg
    pub mass: f64,
    /// C
    pub charge: f64,
}

impl IonSpecies {
    pub fn new(name: &str, mass: f64, charge: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) || !(charge > 0.0 && charge.is_finite()) {
            return Err(Error::invalid(format!("ion `{name}` needs positive mass and charge")));
        }
        Ok(Self { name: name.to_string(), mass, charge })
    }

    /// Singly charged ion of the given neutral atomic mass (u).
    pub fn singly_charged(name: &str, atomic_mass_u: f64) -> Result<Self> {
        Self::new(name, atomic_mass_u * ATOMIC_MASS_UNIT - ELECTRON_MASS, ELEMENTARY_CHARGE)
    }

    pub fn calcium40() -> Self {
        Self::singly_charged("40Ca+", 39.962_590_863).expect("valid constants")
    }

    pub fn beryllium9() -> Self {
        Self::singly_charged("9Be+", 9.012_183_065).expect("valid constants")
    }

    /// `√(mω/2ħ)`, 1/m.
    pub fn beta(&self, omega: f64) -> f64 {
        (self.mass * omega / (2.0 * HBAR)).sqrt()
    }

    /// Ground-state position spread `√(ħ/2mω)`, m.
    pub fn ground_state_width(&self, omega: f64) -> f64 {
        1.0 / (2.0 * self.beta(omega))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentMotionResult {
    pub times: Vec<f64>,
    /// Coherent amplitude relative to the trap origin.
    pub alpha: Vec<Complex64>,
    pub u: Vec<Complex64>,
    /// Overall phase, rad.
    pub phase: Vec<f64>,
    /// `|α(T) − βL|²`: motional quanta left relative to the final well centre.
    pub residual_quanta: f64,
    /// `√(mω/2ħ)`, 1/m.
    pub beta: f64,
}

/// Closed-form motion of an ion that starts in the ground state of the well
/// at the origin. Traces are sampled on a uniform grid of
/// `samples_per_period` points per trap period.
pub fn coherent_evolution(well: &WellProgram, species: &IonSpecies, opts: &ConvolutionOptions) -> Result<CoherentMotionResult> {
    let resp = trajectory::well::response(well, opts)?;
    let (w, big_t) = (well.omega(), well.duration());
    let beta = species.beta(w);
    let n = ((w * big_t / (2.0 * std::f64::consts::PI) * opts.samples_per_period).ceil() as usize).max(opts.min_cells) + 1;
    let times: Vec<f64> = (0..n).map(|k| big_t * k as f64 / (n - 1) as f64).collect();
    let s0 = well.in_flight(0.0);
    let u_at = |t: f64| -beta * (resp.kernel(t) - s0);
    let u_rate = |t: f64| -beta * well.rate(t) * Complex64::from_polar(1.0, w * t);
    let rule = GaussLegendre::new(opts.gl_order);
    let mut phase = Vec::with_capacity(n);
    let mut acc = 0.0;
    phase.push(0.0);
    for pair in times.windows(2) {
        acc += rule.integrate(pair[0], pair[1], |t| (u_at(t) * u_rate(t).conj()).im);
        phase.push(acc);
    }
    let alpha: Vec<Complex64> = times.iter().map(|&t| beta * (well.in_flight(t) - resp.lag(t))).collect();
    let u: Vec<Complex64> = times.iter().map(|&t| u_at(t)).collect();
    let residual_quanta = (alpha[n - 1] - beta * well.length()).norm_sqr();
    Ok(CoherentMotionResult { times, alpha, u, phase, residual_quanta, beta })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldProfile {
    pub times: Vec<f64>,
    /// Net field at the ion, V/m.
    pub xi: Vec<f64>,
    /// Largest `|ξ|` on the grid, V/m.
    pub peak: f64,
}

/// Field `ξ = (m/e) q̈` that must act on the ion to produce `traj`, on `n` uniform samples.
pub fn field_profile(traj: &Trajectory, species: &IonSpecies, n: usize) -> FieldProfile {
    let ratio = species.mass / species.charge;
    let (times, xi): (Vec<f64>, Vec<f64>) = traj.samples(n).into_iter().map(|k| (k.t, ratio * k.acceleration)).unzip();
    let peak = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    FieldProfile { times, xi, peak }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::ion_from_well;
    use approx::assert_relative_eq;

    #[test]
    fn species_presets() {
        let ca = IonSpecies::calcium40();
        assert_relative_eq!(ca.mass, 6.6359e-26, max_relative = 1e-4);
        assert_eq!(ca.charge, ELEMENTARY_CHARGE);
        assert!(IonSpecies::new("x", 0.0, 1.0).is_err());
        assert!(IonSpecies::new("x", 1.0, -1.0).is_err());
    }

    #[test]
    fn idle_well_gives_no_motion() {
        let well = WellProgram::constant(0.0, 1e6, 0.0, 1e-5).unwrap();
        let r = coherent_evolution(&well, &IonSpecies::calcium40(), &ConvolutionOptions::default()).unwrap();
        assert!(r.alpha.iter().all(|a| *a == Complex64::new(0.0, 0.0)));
        assert_eq!(*r.phase.last().unwrap(), 0.0);
        assert_eq!(r.residual_quanta, 0.0);
    }

    #[test]
    fn optimal_well_reproduces_cubic() {
        let ca = IonSpecies::calcium40();
        let (w, l, big_t) = (2.0 * std::f64::consts::PI * 2.9e6, 1e-4, 2e-6);
        let well = WellProgram::optimal(w, l, big_t).unwrap();
        let r = coherent_evolution(&well, &ca, &ConvolutionOptions::default()).unwrap();
        let q = Trajectory::optimal_cubic(l, big_t).unwrap();
        let worst = r.times.iter().zip(&r.alpha).map(|(&t, a)| (a.re / r.beta - q.position(t)).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6 * l, "{worst}");
        assert!(r.u[0].norm() == 0.0);
        assert!(r.residual_quanta < 1e-6);
    }

    #[test]
    fn alpha_tracks_velocity() {
        let ca = IonSpecies::calcium40();
        let w = 2.0 * std::f64::consts::PI * 1e6;
        let well = WellProgram::rowe(w, 1e-5, 3e-6).unwrap();
        let r = coherent_evolution(&well, &ca, &ConvolutionOptions::default()).unwrap();
        let q = ion_from_well(&well, &ConvolutionOptions::default()).unwrap();
        for (k, &t) in r.times.iter().enumerate().step_by(17) {
            assert_relative_eq!(r.alpha[k].im / r.beta * w, q.velocity(t), epsilon = 1e-9 * w * 1e-5);
        }
        assert!(r.residual_quanta >= 0.0);
    }

    #[test]
    fn field_of_cubic_peaks_at_ends() {
        let ca = IonSpecies::calcium40();
        let q = Trajectory::optimal_cubic(1e-4, 1e-8).unwrap();
        let f = field_profile(&q, &ca, 101);
        assert_relative_eq!(f.peak, ca.mass / ca.charge * 6.0 * 1e-4 / 1e-16, max_relative = 1e-12);
        assert_relative_eq!(f.peak, 2.485e6, max_relative = 1e-3);
        let f = field_profile(&Trajectory::quintic(1.0, 1.0).unwrap(), &IonSpecies::new("unit", 1.0, 1.0).unwrap(), 11);
        assert_eq!(f.xi[0], 0.0);
    }
}
