//! Stark phases, threshold transport times and decoherence amplitudes.

use num_complex::Complex64;
use serde::Serialize;

use crate::atomic::{couplings, susceptibility, transition_susceptibility, AtomicModel, StateDecomposition};
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::motion::IonSpecies;
use crate::quadrature::{integrate_oscillatory, QuadratureOptions};
use crate::trajectory::{zeta, Trajectory};

/// Default phase budget, rad.
pub const DEFAULT_BUDGET: f64 = std::f64::consts::PI / 100.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QubitDefinition {
    pub species: IonSpecies,
    pub model: AtomicModel,
    pub state_i: StateDecomposition,
    pub state_f: StateDecomposition,
    pub description: String,
}

impl QubitDefinition {
    pub fn new(
        species: IonSpecies,
        model: AtomicModel,
        state_i: StateDecomposition,
        state_f: StateDecomposition,
        description: &str,
    ) -> Result<Self> {
        for s in [&state_i, &state_f] {
            model.level(&s.level)?;
        }
        if state_i == state_f {
            return Err(Error::invalid("qubit states must differ"));
        }
        Ok(Self { species, model, state_i, state_f, description: description.to_string() })
    }

    /// Same qubit with both state offsets multiplied by `scale`.
    pub fn with_offsets_scaled(&self, scale: f64) -> Self {
        Self {
            state_i: self.state_i.with_offset(self.state_i.offset_hz * scale),
            state_f: self.state_f.with_offset(self.state_f.offset_hz * scale),
            ..self.clone()
        }
    }

    /// `χ_i − χ_f`, m²/J.
    pub fn delta_chi(&self) -> Result<f64> {
        Ok(susceptibility(&self.state_i, &self.model)?.chi - susceptibility(&self.state_f, &self.model)?.chi)
    }

    /// `12 m² Δχ / ħ`: the minimum phase is this times `L²/T³`.
    pub fn min_phase_coefficient(&self) -> Result<f64> {
        Ok(12.0 * self.species.mass.powi(2) * self.delta_chi()? / HBAR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DephasingResult {
    /// rad, signed
    pub phi: f64,
    /// m²/J
    pub delta_chi: f64,
    /// m²/s³
    pub zeta_used: f64,
}

/// Phase picked up by `|i⟩` relative to `|f⟩` for a given `ζ`.
pub fn dephasing_for_zeta(zeta_value: f64, qubit: &QubitDefinition) -> Result<DephasingResult> {
    let delta_chi = qubit.delta_chi()?;
    Ok(DephasingResult { phi: qubit.species.mass.powi(2) / HBAR * delta_chi * zeta_value, delta_chi, zeta_used: zeta_value })
}

pub fn dephasing(traj: &Trajectory, qubit: &QubitDefinition, opts: &QuadratureOptions) -> Result<DephasingResult> {
    dephasing_for_zeta(zeta(traj, opts)?.zeta, qubit)
}

/// Smallest phase reachable for a transport of `length` in `duration`.
pub fn min_phase(qubit: &QubitDefinition, length: f64, duration: f64) -> Result<f64> {
    if !(length >= 0.0) || !(duration > 0.0) {
        return Err(Error::invalid("min_phase needs L >= 0 and T > 0"));
    }
    Ok(qubit.min_phase_coefficient()? * length * length / duration.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "seconds", rename_all = "snake_case")]
pub enum ThresholdTime {
    Finite(f64),
    /// `Δχ = 0`: no transport time exceeds the budget.
    Unbounded,
}

impl ThresholdTime {
    pub fn seconds(self) -> Option<f64> {
        match self {
            ThresholdTime::Finite(t) => Some(t),
            ThresholdTime::Unbounded => None,
        }
    }
}

/// Shortest transport time whose minimum phase magnitude stays within `budget`.
pub fn threshold_time(qubit: &QubitDefinition, length: f64, budget: f64) -> Result<ThresholdTime> {
    if !(length > 0.0) || !(budget > 0.0) || !length.is_finite() || !budget.is_finite() {
        return Err(Error::invalid("threshold_time needs L > 0 and a positive budget"));
    }
    let coefficient = qubit.min_phase_coefficient()?.abs();
    if coefficient == 0.0 {
        return Ok(ThresholdTime::Unbounded);
    }
    Ok(ThresholdTime::Finite((coefficient * length * length / budget).cbrt()))
}

/// `∫₀ᵀ q̈ e^{iωt} dt`, by its endpoint (integration-by-parts) term and optionally in full.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccelerationTransform {
    /// `(−i/ω)(q̈(T)e^{iωT} − q̈(0))`, m/s.
    pub boundary: Complex64,
    pub full: Option<Complex64>,
}

pub fn acceleration_transform(traj: &Trajectory, omega: f64, full: Option<&QuadratureOptions>) -> Result<AccelerationTransform> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::invalid("transition frequency must be finite and non-zero"));
    }
    let big_t = traj.duration();
    let boundary = Complex64::new(0.0, -1.0 / omega)
        * (traj.acceleration(big_t) * Complex64::from_polar(1.0, omega * big_t) - traj.acceleration(0.0));
    let full = match full {
        Some(opts) => Some(integrate_oscillatory(|t| traj.acceleration(t), omega, &traj.breakpoints(), traj.min_panels(), opts)?.value),
        None => None,
    };
    Ok(AccelerationTransform { boundary, full })
}

/// First-order amplitude `−i (m/eħ) V_rn ∫ q̈ e^{iω_rn t} dt` with `V_rn` in C·m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstOrderAmplitude {
    pub boundary: Complex64,
    pub full: Option<Complex64>,
}

impl FirstOrderAmplitude {
    /// Full value when computed, else the endpoint estimate.
    pub fn best(&self) -> Complex64 {
        self.full.unwrap_or(self.boundary)
    }
}

pub fn first_order_amplitude(
    traj: &Trajectory,
    v_rn: Complex64,
    omega_rn: f64,
    species: &IonSpecies,
    full: Option<&QuadratureOptions>,
) -> Result<FirstOrderAmplitude> {
    let transform = acceleration_transform(traj, omega_rn, full)?;
    let prefactor = Complex64::new(0.0, -species.mass / (species.charge * HBAR)) * v_rn;
    Ok(FirstOrderAmplitude { boundary: prefactor * transform.boundary, full: transform.full.map(|f| prefactor * f) })
}

/// `(m²ζ/ħ²e²) |Σ_{r'} V_{rr'} V_{r'n} / ω_{r'n}|` for the transfer `source → target`.
/// For `target == source` this is the magnitude of that state's own Stark phase.
pub fn second_order_amplitude(
    zeta_value: f64,
    target: &StateDecomposition,
    source: &StateDecomposition,
    model: &AtomicModel,
    species: &IonSpecies,
) -> Result<f64> {
    Ok(species.mass.powi(2) * zeta_value / HBAR * transition_susceptibility(target, source, model)?.norm())
}

/// Error probability `φ²`, capped at one.
pub fn decoherence_error(phi: f64) -> f64 {
    (phi * phi).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Leakage {
    pub level: String,
    pub m_j: f64,
    pub m_nuclear: Option<f64>,
    /// rad/s
    pub omega_rn: f64,
    /// C·m
    pub v_rn: Complex64,
    pub amplitude: FirstOrderAmplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDecoherence {
    pub level: String,
    pub first_order: Vec<Leakage>,
    /// `√Σ|ε_r|²` over intermediate sublevels.
    pub first_order_rss: f64,
    pub second_order: f64,
    /// `first_order_rss / second_order`; absent when the second order vanishes.
    pub ratio: Option<f64>,
    /// Root-sum-square `|V_rn|`, C·m.
    pub coupling_rss: f64,
    /// `ħeT / (10|V|L)` exactly as the compact estimate is usually written; carries units of kg.
    pub compact_as_printed: Option<f64>,
    /// `ħeT / (10 m |V| L)`, dimensionless.
    pub compact_mass_corrected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceReport {
    pub states: Vec<StateDecoherence>,
    /// Largest per-state ratio.
    pub ratio: Option<f64>,
    pub phi: f64,
    /// `φ² + Σ|ε_r|²` over both states, capped at one.
    pub error_estimate: f64,
}

/// First- and second-order amplitudes for both qubit states along `traj`.
pub fn decoherence(traj: &Trajectory, qubit: &QubitDefinition, opts: &QuadratureOptions) -> Result<DecoherenceReport> {
    let zeta_value = zeta(traj, opts)?.zeta;
    let species = &qubit.species;
    let (length, big_t) = (traj.length(), traj.duration());
    let mut states = Vec::new();
    let mut leak_total = 0.0;
    for state in [&qubit.state_i, &qubit.state_f] {
        let mut first_order = Vec::new();
        for c in couplings(state, &qubit.model)? {
            let v_rn = -species.charge * c.z;
            let omega_rn = -c.gap / HBAR;
            let amplitude = first_order_amplitude(traj, v_rn, omega_rn, species, Some(opts))?;
            first_order.push(Leakage {
                level: c.level,
                m_j: c.m_j.value(),
                m_nuclear: c.m_nuclear.map(|m| m.value()),
                omega_rn,
                v_rn,
                amplitude,
            });
        }
        let first_sq: f64 = first_order.iter().map(|l| l.amplitude.best().norm_sqr()).sum();
        leak_total += first_sq;
        let second_order = second_order_amplitude(zeta_value, state, state, &qubit.model, species)?;
        let coupling_rss = first_order.iter().map(|l| l.v_rn.norm_sqr()).sum::<f64>().sqrt();
        let compact = |mass: f64| {
            (coupling_rss > 0.0 && length > 0.0).then(|| HBAR * species.charge * big_t / (10.0 * mass * coupling_rss * length))
        };
        states.push(StateDecoherence {
            level: state.level.clone(),
            first_order_rss: first_sq.sqrt(),
            ratio: (second_order > 0.0).then(|| first_sq.sqrt() / second_order),
            second_order,
            first_order,
            coupling_rss,
            compact_as_printed: compact(1.0),
            compact_mass_corrected: compact(species.mass),
        });
    }
    let phi = dephasing_for_zeta(zeta_value, qubit)?.phi;
    let ratio = if states.iter().all(|s| s.ratio.is_some()) {
        states.iter().filter_map(|s| s.ratio).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))))
    } else {
        None
    };
    Ok(DecoherenceReport { states, ratio, phi, error_estimate: (phi * phi + leak_total).min(1.0) })
}
