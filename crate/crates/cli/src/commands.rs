use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use shuttle_stark::atomic::susceptibility;
use shuttle_stark::motion::{field_profile, fock_oracle, IonSpecies};
use shuttle_stark::stark::{
    decoherence, decoherence_error, dephasing_for_zeta, min_phase, threshold_time, DecoherenceReport, QubitDefinition,
    ThresholdTime,
};
use shuttle_stark::trajectory::{
    ion_from_well, well_from_ion, zeta, ConvolutionOptions, Trajectory, TrajectoryKind, WellProgram,
};

use crate::config::{RunConfig, TrajKind, TrajectorySpec};
use crate::error::{invalid, CliResult};
use crate::report::{q, Column, Quantity, Report, Series, DIMENSIONLESS};

const FIELD_SAMPLES: usize = 2001;
const PHASE_COEFFICIENT_UNIT: &str = "rad*s^3/m^2";

pub fn trajectory(spec: &TrajectorySpec, conv: &ConvolutionOptions) -> CliResult<Trajectory> {
    let TrajectorySpec { kind, length, duration, tau, omega } = *spec;
    Ok(match kind {
        TrajKind::Cubic => Trajectory::optimal_cubic(length, duration)?,
        TrajKind::Quintic => Trajectory::quintic(length, duration)?,
        TrajKind::Ramped => {
            let tau = tau.ok_or_else(|| invalid("--traj ramped needs --tau"))?;
            Trajectory::ramped_cubic(length, duration, tau)?
        }
        TrajKind::Rowe => ion_from_well(&WellProgram::rowe(omega, length, duration)?, conv)?,
    })
}

fn well(spec: &TrajectorySpec, traj: &Trajectory) -> CliResult<WellProgram> {
    Ok(match spec.kind {
        TrajKind::Rowe => WellProgram::rowe(spec.omega, spec.length, spec.duration)?,
        _ => well_from_ion(traj, spec.omega)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaSection {
    pub zeta: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<Quantity>,
    pub error_estimate: Quantity,
}

#[derive(Debug, Clone, Serialize)]
pub struct StarkSection {
    pub chi_i: Quantity,
    pub chi_f: Quantity,
    pub delta_chi: Quantity,
    pub min_phase_coefficient: Quantity,
    pub phi: Quantity,
    pub phi_min: Quantity,
    pub phi_over_phi_min: Quantity,
    pub dephasing_error: Quantity,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdSection {
    /// Absent (`null`) when the two states have equal susceptibility.
    pub time: Option<Quantity>,
    pub unbounded: bool,
    pub delta_chi: Quantity,
    pub min_phase_coefficient: Quantity,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakageEntry {
    pub level: String,
    pub m_j: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_nuclear: Option<Quantity>,
    pub omega_rn: Quantity,
    pub coupling: Quantity,
    pub amplitude_boundary: Quantity,
    pub amplitude: Quantity,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateSection {
    pub level: String,
    pub first_order_rss: Quantity,
    pub second_order: Quantity,
    pub ratio: Option<Quantity>,
    pub coupling_rss: Quantity,
    pub compact_estimate_as_printed: Option<Quantity>,
    pub compact_estimate_mass_corrected: Option<Quantity>,
    pub first_order: Vec<LeakageEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoherenceSection {
    /// Largest first-to-second-order ratio over the two states.
    pub ratio: Option<Quantity>,
    pub error_estimate: Quantity,
    pub states: Vec<StateSection>,
    pub note: &'static str,
}

const COMPACT_NOTE: &str = "compact_estimate_as_printed = hbar*e*T/(10*|V|*L) carries units of kg; \
compact_estimate_mass_corrected divides by the ion mass and is the dimensionless ratio; \
ratio is computed from the amplitudes themselves";

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub fidelity: Quantity,
    pub leakage: Quantity,
    pub max_norm_drift: Quantity,
    pub dim: Quantity,
    pub steps: Quantity,
    pub dt: Quantity,
    pub predicted_alpha_abs: Quantity,
    pub residual_quanta: Quantity,
}

#[derive(Debug, Clone, Serialize)]
pub struct WellSection {
    pub omega: Quantity,
    /// Well position just after the start.
    pub initial_jump: Quantity,
    pub max_lead: Quantity,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TransportReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_field: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stark: Option<StarkSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoherence: Option<DecoherenceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wells: Option<Vec<WellSection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSection {
    pub variable: SweepVar,
    pub points: Quantity,
    pub log_spaced: bool,
}

fn zeta_section(traj: &Trajectory, c: &RunConfig) -> CliResult<ZetaSection> {
    let z = zeta(traj, &c.quadrature)?;
    Ok(ZetaSection {
        zeta: q(z.zeta, "m^2/s^3"),
        normalized: z.normalized.map(|v| q(v, DIMENSIONLESS)),
        closed_form: traj.closed_form_zeta().map(|v| q(v, "m^2/s^3")),
        error_estimate: q(z.error_estimate, "m^2/s^3"),
    })
}

fn peak_field(traj: &Trajectory, species: &IonSpecies) -> Quantity {
    q(field_profile(traj, species, FIELD_SAMPLES).peak, "V/m")
}

fn stark_section(zeta_value: f64, qubit: &QubitDefinition, spec: &TrajectorySpec) -> CliResult<StarkSection> {
    let d = dephasing_for_zeta(zeta_value, qubit)?;
    let phi_min = min_phase(qubit, spec.length, spec.duration)?;
    Ok(StarkSection {
        chi_i: q(susceptibility(&qubit.state_i, &qubit.model)?.chi, "m^2/J"),
        chi_f: q(susceptibility(&qubit.state_f, &qubit.model)?.chi, "m^2/J"),
        delta_chi: q(d.delta_chi, "m^2/J"),
        min_phase_coefficient: q(qubit.min_phase_coefficient()?, PHASE_COEFFICIENT_UNIT),
        phi: q(d.phi, "rad"),
        phi_min: q(phi_min, "rad"),
        phi_over_phi_min: q(d.phi / phi_min, DIMENSIONLESS),
        dephasing_error: q(decoherence_error(d.phi), DIMENSIONLESS),
    })
}

fn threshold_section(c: &RunConfig) -> CliResult<ThresholdSection> {
    let t = threshold_time(&c.qubit, c.trajectory.length, c.budget)?;
    Ok(ThresholdSection {
        time: t.seconds().map(|s| q(s, "s")),
        unbounded: t == ThresholdTime::Unbounded,
        delta_chi: q(c.qubit.delta_chi()?, "m^2/J"),
        min_phase_coefficient: q(c.qubit.min_phase_coefficient()?, PHASE_COEFFICIENT_UNIT),
    })
}

fn decoherence_section(r: &DecoherenceReport) -> DecoherenceSection {
    let states = r
        .states
        .iter()
        .map(|s| StateSection {
            level: s.level.clone(),
            first_order_rss: q(s.first_order_rss, DIMENSIONLESS),
            second_order: q(s.second_order, DIMENSIONLESS),
            ratio: s.ratio.map(|v| q(v, DIMENSIONLESS)),
            coupling_rss: q(s.coupling_rss, "C*m"),
            compact_estimate_as_printed: s.compact_as_printed.map(|v| q(v, "kg")),
            compact_estimate_mass_corrected: s.compact_mass_corrected.map(|v| q(v, DIMENSIONLESS)),
            first_order: s
                .first_order
                .iter()
                .map(|l| LeakageEntry {
                    level: l.level.clone(),
                    m_j: q(l.m_j, DIMENSIONLESS),
                    m_nuclear: l.m_nuclear.map(|m| q(m, DIMENSIONLESS)),
                    omega_rn: q(l.omega_rn, "rad/s"),
                    coupling: q(l.v_rn.norm(), "C*m"),
                    amplitude_boundary: q(l.amplitude.boundary.norm(), DIMENSIONLESS),
                    amplitude: q(l.amplitude.best().norm(), DIMENSIONLESS),
                })
                .collect(),
        })
        .collect();
    DecoherenceSection {
        ratio: r.ratio.map(|v| q(v, DIMENSIONLESS)),
        error_estimate: q(r.error_estimate, DIMENSIONLESS),
        states,
        note: COMPACT_NOTE,
    }
}

pub type Output = Report<TransportReport>;

pub fn cmd_zeta(c: &RunConfig) -> CliResult<Output> {
    let traj = trajectory(&c.trajectory, &c.convolution)?;
    let results = TransportReport {
        zeta: Some(zeta_section(&traj, c)?),
        peak_field: Some(peak_field(&traj, &c.qubit.species)),
        ..Default::default()
    };
    Ok(Report::new("zeta", c, results, None))
}

/// Ion path and well program of the optimal transport, one well column per trap frequency.
pub fn cmd_optimize(c: &RunConfig, omegas: &[f64], points: usize) -> CliResult<Output> {
    if c.trajectory.kind != TrajKind::Cubic {
        return Err(invalid("optimize designs the optimal cubic transport; use --traj cubic"));
    }
    if points < 2 {
        return Err(invalid("--points must be at least 2"));
    }
    let omegas = if omegas.is_empty() { vec![c.trajectory.omega] } else { omegas.to_vec() };
    let spec = &c.trajectory;
    let traj = Trajectory::optimal_cubic(spec.length, spec.duration)?;
    let times: Vec<f64> = (0..points).map(|k| spec.duration * k as f64 / (points - 1) as f64).collect();
    let mut columns = vec![
        Column::new("t", "s", times.clone()),
        Column::new("q0", "m", times.iter().map(|&t| traj.position(t)).collect()),
    ];
    let mut wells = Vec::new();
    for &omega in &omegas {
        let w = WellProgram::optimal(omega, spec.length, spec.duration)?;
        let s: Vec<f64> = times.iter().map(|&t| w.in_flight(t)).collect();
        let lead = s.iter().zip(&columns[1].values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        wells.push(WellSection { omega: q(omega, "rad/s"), initial_jump: q(w.in_flight(0.0), "m"), max_lead: q(lead, "m") });
        columns.push(Column::new(format!("s0(omega={omega:e})"), "m", s));
    }
    let results = TransportReport {
        zeta: Some(zeta_section(&traj, c)?),
        peak_field: Some(peak_field(&traj, &c.qubit.species)),
        wells: Some(wells),
        ..Default::default()
    };
    Ok(Report::new("optimize", c, results, Some(Series { columns })))
}

pub fn cmd_phase(c: &RunConfig) -> CliResult<Output> {
    let traj = trajectory(&c.trajectory, &c.convolution)?;
    let z = zeta_section(&traj, c)?;
    let results = TransportReport {
        stark: Some(stark_section(z.zeta.value, &c.qubit, &c.trajectory)?),
        zeta: Some(z),
        ..Default::default()
    };
    Ok(Report::new("phase", c, results, None))
}

pub fn cmd_threshold(c: &RunConfig) -> CliResult<Output> {
    let results = TransportReport { threshold: Some(threshold_section(c)?), ..Default::default() };
    Ok(Report::new("threshold", c, results, None))
}

pub fn cmd_decoherence(c: &RunConfig) -> CliResult<Output> {
    let traj = trajectory(&c.trajectory, &c.convolution)?;
    let z = zeta_section(&traj, c)?;
    let report = decoherence(&traj, &c.qubit, &c.quadrature)?;
    let results = TransportReport {
        stark: Some(stark_section(z.zeta.value, &c.qubit, &c.trajectory)?),
        zeta: Some(z),
        peak_field: Some(peak_field(&traj, &c.qubit.species)),
        decoherence: Some(decoherence_section(&report)),
        ..Default::default()
    };
    Ok(Report::new("decoherence", c, results, None))
}

/// Certifies the coherent-state solution with the Fock-basis integrator.
pub fn cmd_simulate(c: &RunConfig, dim: Option<usize>) -> CliResult<Output> {
    let traj = trajectory(&c.trajectory, &c.convolution)?;
    let well = well(&c.trajectory, &traj)?;
    let opts = shuttle_stark::motion::FockOptions { dim: dim.unwrap_or(c.fock.dim), ..c.fock };
    let species = &c.qubit.species;
    let r = fock_oracle(&well, species, &opts)?;
    let beta = species.beta(c.trajectory.omega);
    let path = match traj.kind() {
        TrajectoryKind::FromWellProgram => traj.clone(),
        _ => ion_from_well(&well, &c.convolution)?,
    };
    let results = TransportReport {
        oracle: Some(OracleSection {
            fidelity: q(r.fidelity, DIMENSIONLESS),
            leakage: q(r.leakage, DIMENSIONLESS),
            max_norm_drift: q(r.max_norm_drift, DIMENSIONLESS),
            dim: q(r.dim as f64, DIMENSIONLESS),
            steps: q(r.steps as f64, DIMENSIONLESS),
            dt: q(r.dt, "s"),
            predicted_alpha_abs: q(r.predicted_alpha.norm(), DIMENSIONLESS),
            residual_quanta: q((r.predicted_alpha - beta * c.trajectory.length).norm_sqr(), DIMENSIONLESS),
        }),
        ..Default::default()
    };
    let series = Series {
        columns: vec![
            Column::new("t", "s", r.times.clone()),
            Column::new("mean_position", "m", r.mean_position.clone()),
            Column::new("classical_position", "m", r.times.iter().map(|&t| path.position(t)).collect()),
        ],
    };
    Ok(Report::new("simulate", c, results, Some(series)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
pub enum SweepVar {
    #[value(name = "T")]
    #[serde(rename = "T")]
    Duration,
    #[value(name = "L")]
    #[serde(rename = "L")]
    Length,
    #[value(name = "omega")]
    #[serde(rename = "omega")]
    Omega,
    #[value(name = "tau")]
    #[serde(rename = "tau")]
    Tau,
}

impl SweepVar {
    fn unit(self) -> &'static str {
        match self {
            SweepVar::Duration | SweepVar::Tau => "s",
            SweepVar::Length => "m",
            SweepVar::Omega => "rad/s",
        }
    }

    fn name(self) -> &'static str {
        match self {
            SweepVar::Duration => "T",
            SweepVar::Length => "L",
            SweepVar::Omega => "omega",
            SweepVar::Tau => "tau",
        }
    }

    fn apply(self, spec: &TrajectorySpec, value: f64) -> TrajectorySpec {
        let mut s = *spec;
        match self {
            SweepVar::Duration => s.duration = value,
            SweepVar::Length => s.length = value,
            SweepVar::Omega => s.omega = value,
            SweepVar::Tau => s.tau = Some(value),
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepRange {
    pub variable: SweepVar,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub log: bool,
}

impl SweepRange {
    fn values(&self) -> CliResult<Vec<f64>> {
        if self.points < 2 || !self.from.is_finite() || !self.to.is_finite() {
            return Err(invalid("sweep needs --points >= 2 and finite --from/--to"));
        }
        if self.log && !(self.from > 0.0 && self.to > 0.0) {
            return Err(invalid("a logarithmic sweep needs positive --from and --to"));
        }
        let n = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| {
                let x = k as f64 / n;
                if self.log {
                    (self.from.ln() + x * (self.to.ln() - self.from.ln())).exp()
                } else {
                    self.from + x * (self.to - self.from)
                }
            })
            .collect())
    }
}

const SWEEP_COLUMNS: [(&str, &str); 8] = [
    ("zeta", "m^2/s^3"),
    ("zeta_normalized", DIMENSIONLESS),
    ("phi", "rad"),
    ("phi_min", "rad"),
    ("phi_over_phi_min", DIMENSIONLESS),
    ("dephasing_error", DIMENSIONLESS),
    ("peak_field", "V/m"),
    ("threshold_time", "s"),
];

fn sweep_point(c: &RunConfig, spec: &TrajectorySpec) -> CliResult<[f64; 8]> {
    let traj = trajectory(spec, &c.convolution)?;
    let z = zeta(&traj, &c.quadrature)?;
    let stark = stark_section(z.zeta, &c.qubit, spec)?;
    let threshold = threshold_time(&c.qubit, spec.length, c.budget)?.seconds().unwrap_or(f64::INFINITY);
    Ok([
        z.zeta,
        z.normalized.unwrap_or(f64::NAN),
        stark.phi.value,
        stark.phi_min.value,
        stark.phi_over_phi_min.value,
        stark.dephasing_error.value,
        peak_field(&traj, &c.qubit.species).value,
        threshold,
    ])
}

/// Every sweep scalar against the swept variable; points run in parallel and
/// rows keep sweep order.
pub fn cmd_sweep(c: &RunConfig, range: &SweepRange) -> CliResult<Output> {
    if range.variable == SweepVar::Tau && c.trajectory.kind != TrajKind::Ramped {
        return Err(invalid("sweeping tau needs --traj ramped"));
    }
    let values = range.values()?;
    let rows: Vec<[f64; 8]> =
        values.par_iter().map(|&v| sweep_point(c, &range.variable.apply(&c.trajectory, v))).collect::<CliResult<_>>()?;
    let mut columns = vec![Column::new(range.variable.name(), range.variable.unit(), values)];
    for (k, (name, unit)) in SWEEP_COLUMNS.iter().enumerate() {
        columns.push(Column::new(*name, unit, rows.iter().map(|r| r[k]).collect()));
    }
    let results = TransportReport {
        sweep: Some(SweepSection { variable: range.variable, points: q(range.points as f64, DIMENSIONLESS), log_spaced: range.log }),
        ..Default::default()
    };
    Ok(Report::new("sweep", c, results, Some(Series { columns })))
}
