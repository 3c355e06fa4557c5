//! Run configuration: built-in defaults, then the TOML file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use shuttle_stark::atomic::{AtomicModel, StateDecomposition};
use shuttle_stark::constants::{ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE};
use shuttle_stark::motion::{FockOptions, IonSpecies};
use shuttle_stark::presets::{QubitPreset, BE9_FIELD_TESLA};
use shuttle_stark::quadrature::QuadratureOptions;
use shuttle_stark::stark::{QubitDefinition, DEFAULT_BUDGET};
use shuttle_stark::trajectory::ConvolutionOptions;

use crate::error::{invalid, CliError, CliResult};

pub const DATA_DIR_ENV: &str = "STARK_DATA_DIR";
pub const DEFAULT_OMEGA: f64 = 2.0 * std::f64::consts::PI * 2.9e6;
pub const DEFAULT_LENGTH: f64 = 100e-6;
pub const DEFAULT_DURATION: f64 = 10e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TrajKind {
    #[default]
    Cubic,
    Quintic,
    Ramped,
    Rowe,
}

/// Values given on the command line; each one set here wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub qubit: Option<String>,
    pub length: Option<f64>,
    pub duration: Option<f64>,
    pub omega: Option<f64>,
    pub budget: Option<f64>,
    pub traj: Option<TrajKind>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    qubit: Option<QubitSpec>,
    species: Option<SpeciesSpec>,
    #[serde(default)]
    trajectory: TrajectoryFile,
    #[serde(default)]
    data: DataFile,
    field_tesla: Option<f64>,
    budget: Option<f64>,
    #[serde(default)]
    tolerances: TolerancesFile,
    #[serde(default)]
    output: OutputFile,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum QubitSpec {
    Preset(String),
    Inline(InlineQubit),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineQubit {
    state_i: StateDecomposition,
    state_f: StateDecomposition,
    description: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesSpec {
    name: String,
    /// Ion mass in u; the electron masses removed by ionisation are the caller's business.
    mass_u: f64,
    #[serde(default = "one")]
    charge_e: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryFile {
    kind: Option<TrajKind>,
    length: Option<f64>,
    duration: Option<f64>,
    tau: Option<f64>,
    omega: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataFile {
    levels: Option<PathBuf>,
    lines: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TolerancesFile {
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    samples_per_period: Option<f64>,
    fock_dim: Option<usize>,
    fock_steps_per_period: Option<f64>,
    leakage_limit: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputFile {
    format: Option<Format>,
    path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySpec {
    pub kind: TrajKind,
    pub length: f64,
    pub duration: f64,
    pub tau: Option<f64>,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataSource {
    pub role: &'static str,
    /// File path, or `bundled:<name>` for data compiled into the binary.
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Preset name, or `inline`.
    pub qubit_name: String,
    pub qubit: QubitDefinition,
    pub data: Vec<DataSource>,
    pub trajectory: TrajectorySpec,
    pub budget: f64,
    pub field_tesla: f64,
    pub quadrature: QuadratureOptions,
    pub convolution: ConvolutionOptions,
    pub fock: FockOptions,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

struct Tables {
    levels: String,
    lines: String,
    sources: Vec<DataSource>,
}

impl Tables {
    fn from_paths(levels: &Path, lines: &Path) -> CliResult<Self> {
        let (lv, ln) = (read_text(levels)?, read_text(lines)?);
        let sources = vec![
            DataSource { role: "levels", source: levels.display().to_string(), sha256: sha256_hex(lv.as_bytes()) },
            DataSource { role: "lines", source: lines.display().to_string(), sha256: sha256_hex(ln.as_bytes()) },
        ];
        Ok(Self { levels: lv, lines: ln, sources })
    }

    fn bundled(preset: QubitPreset) -> Self {
        let (names, (lv, ln)) = (preset.data_files(), preset.bundled_data());
        let sources = vec![
            DataSource { role: "levels", source: format!("bundled:{}", names.0), sha256: sha256_hex(lv.as_bytes()) },
            DataSource { role: "lines", source: format!("bundled:{}", names.1), sha256: sha256_hex(ln.as_bytes()) },
        ];
        Self { levels: lv.to_string(), lines: ln.to_string(), sources }
    }
}

impl RunConfig {
    /// Reads `config` (if any) and applies `flags` on top. `data_dir` is the
    /// value of [`DATA_DIR_ENV`].
    pub fn load(config: Option<&Path>, flags: &Overrides, data_dir: Option<PathBuf>) -> CliResult<Self> {
        let (file, base) = match config {
            Some(path) => {
                let text = read_text(path)?;
                let file: ConfigFile = toml::from_str(&text)
                    .map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })?;
                (file, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        Self::resolve(file, &base, flags, data_dir)
    }

    fn resolve(file: ConfigFile, base: &Path, flags: &Overrides, data_dir: Option<PathBuf>) -> CliResult<Self> {
        let field_tesla = file.field_tesla.unwrap_or(BE9_FIELD_TESLA);
        if !(field_tesla >= 0.0 && field_tesla.is_finite()) {
            return Err(invalid(format!("field_tesla must be finite and >= 0, got {field_tesla}")));
        }
        let explicit = match (&file.data.levels, &file.data.lines) {
            (Some(a), Some(b)) => Some((base.join(a), base.join(b))),
            (None, None) => None,
            _ => return Err(invalid("[data] needs both `levels` and `lines`")),
        };

        let species = match &file.species {
            Some(s) => Some(IonSpecies::new(&s.name, s.mass_u * ATOMIC_MASS_UNIT, s.charge_e * ELEMENTARY_CHARGE)?),
            None => None,
        };
        let qubit_spec = match &flags.qubit {
            Some(name) => QubitSpec::Preset(name.clone()),
            None => file.qubit.clone().unwrap_or(QubitSpec::Preset(QubitPreset::Ca40Sd.name().into())),
        };
        let (qubit_name, mut qubit, data) = match qubit_spec {
            QubitSpec::Preset(name) => {
                let preset: QubitPreset = name.parse()?;
                let tables = match (&explicit, &data_dir) {
                    (Some((lv, ln)), _) => Tables::from_paths(lv, ln)?,
                    (None, Some(dir)) => {
                        let (lv, ln) = preset.data_files();
                        Tables::from_paths(&dir.join(lv), &dir.join(ln))?
                    }
                    (None, None) => Tables::bundled(preset),
                };
                let model = AtomicModel::from_csv(&preset.species().name, &tables.levels, &tables.lines)?;
                (preset.name().to_string(), preset.qubit_with(model, field_tesla)?, tables.sources)
            }
            QubitSpec::Inline(inline) => {
                let (lv, ln) = explicit.ok_or_else(|| invalid("an inline qubit needs [data] levels and lines"))?;
                let species = species.clone().ok_or_else(|| invalid("an inline qubit needs a [species] table"))?;
                let tables = Tables::from_paths(&lv, &ln)?;
                let model = AtomicModel::from_csv(&species.name, &tables.levels, &tables.lines)?;
                let check = |s: &StateDecomposition| StateDecomposition::new(&s.level, s.components.clone(), s.offset_hz);
                let qubit = QubitDefinition::new(
                    species,
                    model,
                    check(&inline.state_i)?,
                    check(&inline.state_f)?,
                    inline.description.as_deref().unwrap_or("inline qubit"),
                )?;
                ("inline".to_string(), qubit, tables.sources)
            }
        };
        if let Some(s) = species {
            qubit.species = s;
        }

        let t = &file.trajectory;
        let trajectory = TrajectorySpec {
            kind: flags.traj.or(t.kind).unwrap_or_default(),
            length: flags.length.or(t.length).unwrap_or(DEFAULT_LENGTH),
            duration: positive("T", flags.duration.or(t.duration).unwrap_or(DEFAULT_DURATION))?,
            tau: flags.tau.or(t.tau),
            omega: positive("omega", flags.omega.or(t.omega).unwrap_or(DEFAULT_OMEGA))?,
        };
        if !(trajectory.length >= 0.0 && trajectory.length.is_finite()) {
            return Err(invalid(format!("L must be finite and >= 0, got {}", trajectory.length)));
        }
        if let Some(tau) = trajectory.tau {
            positive("tau", tau)?;
        }
        let budget = positive("budget", flags.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET))?;

        let tol = &file.tolerances;
        let defaults = QuadratureOptions::default();
        let quadrature = QuadratureOptions {
            rel_tol: positive("rel_tol", tol.rel_tol.unwrap_or(defaults.rel_tol))?,
            abs_tol: tol.abs_tol.unwrap_or(defaults.abs_tol),
            ..defaults
        };
        quadrature.validate()?;
        let convolution = ConvolutionOptions {
            samples_per_period: positive(
                "samples_per_period",
                tol.samples_per_period.unwrap_or(ConvolutionOptions::default().samples_per_period),
            )?,
            ..ConvolutionOptions::default()
        };
        convolution.validate()?;
        let fock = FockOptions {
            dim: tol.fock_dim.unwrap_or(FockOptions::default().dim),
            steps_per_period: positive(
                "fock_steps_per_period",
                tol.fock_steps_per_period.unwrap_or(FockOptions::default().steps_per_period),
            )?,
            leakage_limit: positive("leakage_limit", tol.leakage_limit.unwrap_or(FockOptions::default().leakage_limit))?,
            dt: None,
        };

        Ok(Self {
            qubit_name,
            qubit,
            data,
            trajectory,
            budget,
            field_tesla,
            quadrature,
            convolution,
            fock,
            format: flags.format.or(file.output.format).unwrap_or_default(),
            out: flags.out.clone().or(file.output.path.map(|p| base.join(p))),
        })
    }
}
