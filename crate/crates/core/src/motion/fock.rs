//! Brute-force check of the coherent-state solution: integrate the moving-well
//! Schrödinger equation in a truncated number basis.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{coherent_evolution, IonSpecies};
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::trajectory::{ConvolutionOptions, WellProgram};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FockOptions {
    pub dim: usize,
    /// Time step in seconds; `None` means `(2π/ω)/steps_per_period`.
    pub dt: Option<f64>,
    pub steps_per_period: f64,
    /// Largest population tolerated in the two highest basis states.
    pub leakage_limit: f64,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self { dim: 64, dt: None, steps_per_period: 200.0, leakage_limit: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockResult {
    pub dim: usize,
    pub steps: usize,
    /// s
    pub dt: f64,
    /// `|⟨α_pred(T)|Ψ(T)⟩|²`
    pub fidelity: f64,
    /// Largest population seen in the two highest (excited) basis states.
    pub leakage: f64,
    pub max_norm_drift: f64,
    pub predicted_alpha: Complex64,
    pub final_state: Vec<Complex64>,
    pub times: Vec<f64>,
    /// `⟨x̂⟩`, m.
    pub mean_position: Vec<f64>,
}

fn coherent_state(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(dim);
    let mut term = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        c.push(term);
        term *= alpha / ((n + 1) as f64).sqrt();
    }
    c
}

/// Dimensionless position `(a + a†)/√2` truncated to `dim` states.
fn position_operator(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| if i + 1 == j || j + 1 == i { (i.max(j) as f64).sqrt() / SQRT_2 } else { 0.0 })
}

struct Propagator {
    vectors: DMatrix<f64>,
    values: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl Propagator {
    fn new(dim: usize) -> Self {
        let eig = SymmetricEigen::new(position_operator(dim));
        Self { values: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors, scratch: vec![Complex64::default(); dim] }
    }

    /// `ψ ← exp(−i(n̂)τ) ψ`; the zero-point term is a global phase.
    fn free(&self, psi: &mut [Complex64], tau: f64) {
        for (n, c) in psi.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -(n as f64) * tau);
        }
    }

    /// `ψ ← exp(+i s X τ) ψ`.
    fn kick(&mut self, psi: &mut [Complex64], s: f64, tau: f64) {
        if s == 0.0 {
            return;
        }
        let v = &self.vectors;
        let dim = psi.len();
        for k in 0..dim {
            let mut acc = Complex64::default();
            for (i, c) in psi.iter().enumerate() {
                acc += v[(i, k)] * c;
            }
            self.scratch[k] = acc * Complex64::from_polar(1.0, s * self.values[k] * tau);
        }
        for (i, c) in psi.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for k in 0..dim {
                acc += v[(i, k)] * self.scratch[k];
            }
            *c = acc;
        }
    }
}

/// Integrates `iψ̇ = (n̂ − s(t) X) ψ` in scaled units (`ħ = m = ω = 1`),
/// starting from the ground state at the origin, and compares the result
/// with the closed-form coherent state.
pub fn fock_oracle(well: &WellProgram, species: &IonSpecies, opts: &FockOptions) -> Result<FockResult> {
    let dim = opts.dim;
    if dim < 2 || !(opts.leakage_limit > 0.0) || !(opts.steps_per_period > 0.0) {
        return Err(Error::invalid("Fock oracle needs dim >= 2 and positive limits"));
    }
    let (w, big_t) = (well.omega(), well.duration());
    let dt = opts.dt.unwrap_or(2.0 * PI / w / opts.steps_per_period);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }

    let closed = coherent_evolution(well, species, &ConvolutionOptions::default())?;
    let biggest = closed.alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let needed = biggest * biggest + 6.0 * biggest;
    if needed >= dim as f64 {
        return Err(Error::DimensionTooSmall { dim, required_dim: needed.floor() as usize + 1 });
    }
    let predicted_alpha = *closed.alpha.last().expect("non-empty trace");

    // scaled units
    let x0 = (HBAR / (species.mass * w)).sqrt();
    let steps = (big_t / dt).ceil().max(1.0) as usize;
    let h = w * big_t / steps as f64;
    let s_at = |tau: f64| well.in_flight(tau / w) / x0;

    let cbrt2 = 2f64.cbrt();
    let w1 = 1.0 / (2.0 - cbrt2);
    let w0 = -cbrt2 / (2.0 - cbrt2);
    let stages = [w1, w0, w1];

    let mut prop = Propagator::new(dim);
    let mut psi = vec![Complex64::default(); dim];
    psi[0] = Complex64::new(1.0, 0.0);
    let x_op = position_operator(dim);
    let mean_x = |psi: &[Complex64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..dim {
            for j in [i.wrapping_sub(1), i + 1] {
                if j < dim {
                    acc += (psi[i].conj() * x_op[(i, j)] * psi[j]).re;
                }
            }
        }
        acc * x0
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut mean_position = Vec::with_capacity(steps + 1);
    times.push(0.0);
    mean_position.push(0.0);
    let top = dim.saturating_sub(2).max(1);
    let (mut leakage, mut drift) = (0.0f64, 0.0f64);
    for step in 0..steps {
        let mut tau = step as f64 * h;
        for &c in &stages {
            let sub = c * h;
            prop.free(&mut psi, 0.5 * sub);
            prop.kick(&mut psi, s_at(tau + 0.5 * sub), sub);
            prop.free(&mut psi, 0.5 * sub);
            tau += sub;
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        drift = drift.max((norm.sqrt() - 1.0).abs());
        leakage = leakage.max(psi[top..].iter().map(|c| c.norm_sqr()).sum());
        times.push((step + 1) as f64 * h / w);
        mean_position.push(mean_x(&psi));
    }
    if leakage > opts.leakage_limit {
        return Err(Error::Truncation { leakage, limit: opts.leakage_limit, required_dim: 2 * dim });
    }
    let target = coherent_state(predicted_alpha, dim);
    let overlap: Complex64 = target.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
    Ok(FockResult {
        dim,
        steps,
        dt: h / w,
        fidelity: overlap.norm_sqr(),
        leakage,
        max_norm_drift: drift,
        predicted_alpha,
        final_state: psi,
        times,
        mean_position,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_ion() -> IonSpecies {
        // m = ħ so that scaled and SI units coincide at ω = 1
        IonSpecies::new("scaled", HBAR, 1.0).unwrap()
    }

    #[test]
    fn coherent_state_is_normalised() {
        let c = coherent_state(Complex64::new(1.2, -0.7), 60);
        let n: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        assert_relative_eq!(n, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn idle_well_stays_in_ground_state() {
        let well = WellProgram::constant(0.0, 1.0, 0.0, 5.0).unwrap();
        let r = fock_oracle(&well, &unit_ion(), &FockOptions { dim: 2, ..Default::default() }).unwrap();
        assert_relative_eq!(r.fidelity, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn sudden_jump_revives_after_one_period() {
        let l = 1.5;
        let well = WellProgram::constant(l, 1.0, l, 2.0 * PI).unwrap();
        let r = fock_oracle(&well, &unit_ion(), &FockOptions::default()).unwrap();
        assert!(r.predicted_alpha.norm() < 1e-10);
        assert!(r.fidelity > 1.0 - 1e-8, "{}", r.fidelity);
        assert!(r.max_norm_drift < 1e-10);
    }

    #[test]
    fn small_basis_refused() {
        let well = WellProgram::constant(5.0, 1.0, 5.0, PI).unwrap();
        assert!(matches!(
            fock_oracle(&well, &unit_ion(), &FockOptions { dim: 16, ..Default::default() }),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn leakage_refused() {
        let well = WellProgram::constant(2.0, 1.0, 2.0, PI).unwrap();
        // |α|max = 2√2: the pre-check passes at dim 26 but the tail is heavy
        assert!(matches!(
            fock_oracle(&well, &unit_ion(), &FockOptions { dim: 26, ..Default::default() }),
            Err(Error::Truncation { .. })
        ));
    }
}
