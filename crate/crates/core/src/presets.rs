//! Bundled Ca II / Be II data and the two standard transport qubits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::atomic::{hyperfine_state, AtomicModel, HalfInt, HyperfineParams, StateDecomposition};
use crate::error::{Error, Result};
use crate::motion::IonSpecies;
use crate::stark::QubitDefinition;

pub const CA_II_LEVELS: &str = include_str!("../data/ca_ii_levels.csv");
pub const CA_II_LINES: &str = include_str!("../data/ca_ii_lines.csv");
pub const BE_II_LEVELS: &str = include_str!("../data/be_ii_levels.csv");
pub const BE_II_LINES: &str = include_str!("../data/be_ii_lines.csv");

/// Field at which the Be⁺ hyperfine qubit is operated, T.
pub const BE9_FIELD_TESLA: f64 = 0.01194;

/// ⁹Be⁺ 2s ²S₁/₂ hyperfine constant, nuclear spin and moment.
pub fn be9_hyperfine_params(field_tesla: f64) -> HyperfineParams {
    let nuclear_spin = HalfInt::from_twice(3);
    HyperfineParams {
        nuclear_spin,
        a_hz: -625.008_837e6,
        g_j: 2.002_262_06,
        g_i: HyperfineParams::nuclear_g(-1.177_49, nuclear_spin),
        field_tesla,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitPreset {
    #[serde(rename = "ca40-sd")]
    Ca40Sd,
    #[serde(rename = "be9-hyperfine")]
    Be9Hyperfine,
}

impl QubitPreset {
    pub const ALL: [QubitPreset; 2] = [QubitPreset::Ca40Sd, QubitPreset::Be9Hyperfine];

    pub fn name(self) -> &'static str {
        match self {
            QubitPreset::Ca40Sd => "ca40-sd",
            QubitPreset::Be9Hyperfine => "be9-hyperfine",
        }
    }

    /// File names of the level and line tables this preset reads.
    pub fn data_files(self) -> (&'static str, &'static str) {
        match self {
            QubitPreset::Ca40Sd => ("ca_ii_levels.csv", "ca_ii_lines.csv"),
            QubitPreset::Be9Hyperfine => ("be_ii_levels.csv", "be_ii_lines.csv"),
        }
    }

    /// Bundled contents of [`Self::data_files`].
    pub fn bundled_data(self) -> (&'static str, &'static str) {
        match self {
            QubitPreset::Ca40Sd => (CA_II_LEVELS, CA_II_LINES),
            QubitPreset::Be9Hyperfine => (BE_II_LEVELS, BE_II_LINES),
        }
    }

    pub fn species(self) -> IonSpecies {
        match self {
            QubitPreset::Ca40Sd => IonSpecies::calcium40(),
            QubitPreset::Be9Hyperfine => IonSpecies::beryllium9(),
        }
    }

    pub fn bundled_model(self) -> AtomicModel {
        let (levels, lines) = self.bundled_data();
        let name = match self {
            QubitPreset::Ca40Sd => "Ca II",
            QubitPreset::Be9Hyperfine => "Be II",
        };
        AtomicModel::from_csv(name, levels, lines).expect("bundled data parses")
    }

    /// The preset qubit on `model`; the Be⁺ qubit is placed at `field_tesla`
    /// (ignored for Ca⁺).
    pub fn qubit_with(self, model: AtomicModel, field_tesla: f64) -> Result<QubitDefinition> {
        match self {
            QubitPreset::Ca40Sd => {
                let m = HalfInt::from_twice(-1);
                QubitDefinition::new(
                    self.species(),
                    model,
                    StateDecomposition::pure("4s2S1/2", m),
                    StateDecomposition::pure("3d2D5/2", m),
                    "40Ca+ optical qubit |S1/2, -1/2> / |D5/2, -1/2>",
                )
            }
            QubitPreset::Be9Hyperfine => {
                let level = model.level("2s2S1/2")?.clone();
                let params = be9_hyperfine_params(field_tesla);
                let i = hyperfine_state(&level, &params, HalfInt::from_int(2), HalfInt::ZERO)?;
                let f = hyperfine_state(&level, &params, HalfInt::ONE, HalfInt::ONE)?;
                QubitDefinition::new(
                    self.species(),
                    model,
                    i,
                    f,
                    &format!("9Be+ hyperfine qubit |F=2, mF=0> / |F=1, mF=1> at {field_tesla} T"),
                )
            }
        }
    }

    pub fn qubit(self) -> QubitDefinition {
        self.qubit_with(self.bundled_model(), BE9_FIELD_TESLA).expect("bundled preset is consistent")
    }
}

impl fmt::Display for QubitPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QubitPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QubitPreset::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown qubit preset `{s}` (expected ca40-sd or be9-hyperfine)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_calcium_levels() {
        let m = QubitPreset::Ca40Sd.bundled_model();
        for label in ["4s2S1/2", "3d2D5/2", "4p2P1/2", "4p2P3/2"] {
            assert!(m.level(label).is_ok(), "{label}");
        }
    }

    #[test]
    fn presets_round_trip_names() {
        for p in QubitPreset::ALL {
            assert_eq!(p.name().parse::<QubitPreset>().unwrap(), p);
        }
        assert!("ca43".parse::<QubitPreset>().is_err());
    }

    #[test]
    fn presets_build() {
        let ca = QubitPreset::Ca40Sd.qubit();
        assert!(ca.delta_chi().unwrap() < 0.0);
        let be = QubitPreset::Be9Hyperfine.qubit();
        assert!(be.delta_chi().unwrap().abs() > 0.0);
        assert!(be.with_offsets_scaled(0.0).delta_chi().unwrap().abs() < 1e-14);
    }
}
