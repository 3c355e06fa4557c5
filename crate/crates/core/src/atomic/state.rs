use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::angular::{clebsch_gordan, HalfInt};
use super::tables::Level;
use crate::error::{Error, Result};

/// Electronic part of a basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case")]
pub enum Electronic {
    /// `|J, M_J⟩` of the level.
    Coupled { m_j: HalfInt },
    /// `|L, m_l⟩|S, m_s⟩`, recoupled to the level's `J`.
    Uncoupled { m_l: HalfInt, m_s: HalfInt },
}

/// One basis vector with its amplitude. The optional nuclear projection is a
/// spectator to the electric dipole operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub m_nuclear: Option<HalfInt>,
    pub electronic: Electronic,
    pub amplitude: Complex64,
}

impl Component {
    pub fn coupled(m_j: HalfInt, amplitude: f64) -> Self {
        Self { m_nuclear: None, electronic: Electronic::Coupled { m_j }, amplitude: amplitude.into() }
    }
}

/// A state `|i⟩ = Σ_r A_r |r⟩` inside one fine-structure level, with a small
/// energy offset from the level centroid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDecomposition {
    pub level: String,
    pub components: Vec<Component>,
    /// Offset from the level energy, Hz.
    pub offset_hz: f64,
}

/// Amplitudes in the `|m_I⟩|J M_J⟩` basis.
pub(crate) type CoupledAmplitudes = BTreeMap<(Option<HalfInt>, HalfInt), Complex64>;

pub const NORM_TOLERANCE: f64 = 1e-12;

impl StateDecomposition {
    pub fn new(level: &str, components: Vec<Component>, offset_hz: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid(format!("state in `{level}` has no components")));
        }
        if !offset_hz.is_finite() || components.iter().any(|c| !c.amplitude.re.is_finite() || !c.amplitude.im.is_finite()) {
            return Err(Error::invalid("state amplitudes and offset must be finite"));
        }
        let norm: f64 = components.iter().map(|c| c.amplitude.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state in `{level}` has norm² {norm}, expected 1")));
        }
        let nuclear = components[0].m_nuclear.is_some();
        if components.iter().any(|c| c.m_nuclear.is_some() != nuclear) {
            return Err(Error::invalid("either every component or none carries a nuclear projection"));
        }
        Ok(Self { level: level.to_string(), components, offset_hz })
    }

    /// `|J, M_J⟩`.
    pub fn pure(level: &str, m_j: HalfInt) -> Self {
        Self { level: level.to_string(), components: vec![Component::coupled(m_j, 1.0)], offset_hz: 0.0 }
    }

    pub fn with_offset(&self, offset_hz: f64) -> Self {
        Self { offset_hz, ..self.clone() }
    }

    /// Amplitudes projected onto `|m_I⟩|J M_J⟩` of `level`. Fails when a
    /// component is inconsistent with the level or leaks out of it.
    pub(crate) fn coupled_amplitudes(&self, level: &Level) -> Result<CoupledAmplitudes> {
        if level.label != self.level {
            return Err(Error::invalid(format!("state belongs to `{}`, not `{}`", self.level, level.label)));
        }
        let j = level.j;
        let mut out = CoupledAmplitudes::new();
        for c in &self.components {
            match c.electronic {
                Electronic::Coupled { m_j } => {
                    if m_j.twice().abs() > j.twice() || (j.twice() - m_j.twice()) % 2 != 0 {
                        return Err(Error::invalid(format!("M_J = {m_j} not allowed in `{}` (J = {j})", level.label)));
                    }
                    *out.entry((c.m_nuclear, m_j)).or_default() += c.amplitude;
                }
                Electronic::Uncoupled { m_l, m_s } => {
                    let (l, s) = level.orbital_and_spin().ok_or_else(|| {
                        Error::invalid(format!("level `{}` has no LS term to recouple m_l, m_s", level.label))
                    })?;
                    let m_j = m_l + m_s;
                    let cg = clebsch_gordan(l, m_l, s, m_s, j, m_j);
                    if cg != 0.0 {
                        *out.entry((c.m_nuclear, m_j)).or_default() += c.amplitude * cg;
                    }
                }
            }
        }
        let kept: f64 = out.values().map(|a| a.norm_sqr()).sum();
        if (kept - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "state has only {kept:.6} of its weight inside level `{}`",
                level.label
            )));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn norm_enforced() {
        assert!(StateDecomposition::new("S", vec![Component::coupled(h(1), 0.9)], 0.0).is_err());
        assert!(StateDecomposition::new("S", vec![], 0.0).is_err());
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert!(StateDecomposition::new("S", vec![Component::coupled(h(1), a), Component::coupled(h(-1), a)], 0.0).is_ok());
    }

    #[test]
    fn uncoupled_s_state_maps_to_j() {
        let level = Level::from_cm1("S", "2s", "2S", h(1), 0.0).unwrap();
        let st = StateDecomposition::new(
            "S",
            vec![Component {
                m_nuclear: Some(h(3)),
                electronic: Electronic::Uncoupled { m_l: h(0), m_s: h(-1) },
                amplitude: 1.0.into(),
            }],
            0.0,
        )
        .unwrap();
        let amps = st.coupled_amplitudes(&level).unwrap();
        assert_eq!(amps.len(), 1);
        assert!((amps[&(Some(h(3)), h(-1))] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn leakage_out_of_level_rejected() {
        // |m_l = 1, m_s = 1/2⟩ is pure J = 3/2
        let p_half = Level::from_cm1("P1", "2p", "2P*", h(1), 0.0).unwrap();
        let st = StateDecomposition::new(
            "P1",
            vec![Component { m_nuclear: None, electronic: Electronic::Uncoupled { m_l: h(2), m_s: h(1) }, amplitude: 1.0.into() }],
            0.0,
        )
        .unwrap();
        assert!(st.coupled_amplitudes(&p_half).is_err());
        assert!(StateDecomposition::pure("P1", h(3)).coupled_amplitudes(&p_half).is_err());
    }
}
