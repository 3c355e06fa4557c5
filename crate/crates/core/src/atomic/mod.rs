//! Atomic structure data and static Stark susceptibilities.

mod angular;
mod hyperfine;
mod state;
mod susceptibility;
mod tables;

use serde::Serialize;

use crate::error::{Error, Result};

pub use angular::{clebsch_gordan, HalfInt};
pub use hyperfine::{hyperfine_state, HyperfineParams};
pub use state::{Component, Electronic, StateDecomposition, NORM_TOLERANCE};
pub use susceptibility::{
    couplings, dipole_z, matrix_element_sq_sum, reduced_matrix_sq, state_energy, susceptibility,
    transition_susceptibility, Coupling, LevelContribution, Susceptibility, DENOMINATOR_FLOOR_CM1,
};
pub use tables::{parse_levels, parse_lines, Level, LevelTable, Line, LineTable, MAX_ENERGY_CM1};

/// Levels and dipole lines of one ion species.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicModel {
    pub name: String,
    levels: LevelTable,
    lines: LineTable,
}

impl AtomicModel {
    /// Rejects lines whose ends are not in `levels`.
    pub fn new(name: &str, levels: LevelTable, lines: LineTable) -> Result<Self> {
        for line in lines.iter() {
            for label in [&line.upper, &line.lower] {
                if levels.get(label).is_none() {
                    return Err(Error::invalid(format!("line {}-{} refers to unknown level `{label}`", line.upper, line.lower)));
                }
            }
        }
        Ok(Self { name: name.to_string(), levels, lines })
    }

    pub fn from_csv(name: &str, levels: &str, lines: &str) -> Result<Self> {
        Self::new(name, parse_levels(levels)?, parse_lines(lines)?)
    }

    pub fn levels(&self) -> &LevelTable {
        &self.levels
    }

    pub fn lines(&self) -> &LineTable {
        &self.lines
    }

    pub fn level(&self, label: &str) -> Result<&Level> {
        self.levels.get(label).ok_or_else(|| Error::invalid(format!("unknown level `{label}` in model {}", self.name)))
    }

    /// Same model with every level energy shifted by `shift` joules.
    pub fn with_energy_shift(&self, shift: f64) -> Result<Self> {
        Self::new(&self.name, self.levels.shifted(shift)?, self.lines.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dangling_line_rejected() {
        let levels = parse_levels("label,configuration,term,J,energy_cm1\nS,4s,2S,1/2,0\n").unwrap();
        let lines = parse_lines("upper,lower,S_au\nP,S,1\n").unwrap();
        assert!(AtomicModel::new("x", levels, lines).is_err());
    }
}
