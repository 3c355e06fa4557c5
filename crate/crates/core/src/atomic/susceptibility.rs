use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::angular::{clebsch_gordan, HalfInt};
use super::state::StateDecomposition;
use super::AtomicModel;
use crate::constants::{hz_to_joule, joule_to_inverse_cm, BOHR_RADIUS};
use crate::error::{Error, Result};

/// Smallest energy denominator accepted, cm⁻¹.
pub const DENOMINATOR_FLOOR_CM1: f64 = 1e-3;

/// `|⟨k‖Q¹‖l⟩|²` in m² from a line strength in `e²a₀²` and the degeneracy
/// `g_k` of the level named `k`.
pub fn reduced_matrix_sq(strength_au: f64, g_k: usize) -> f64 {
    strength_au * BOHR_RADIUS * BOHR_RADIUS / g_k as f64
}

/// `⟨k, M| z |l, M⟩` in metres for a line of strength `strength_au`; the
/// reduced element is taken positive and the sign comes from the Clebsch–Gordan factor.
pub fn dipole_z(strength_au: f64, j_k: HalfInt, j_l: HalfInt, m: HalfInt) -> f64 {
    reduced_matrix_sq(strength_au, j_k.multiplicity()).sqrt() * clebsch_gordan(j_l, m, HalfInt::ONE, HalfInt::ZERO, j_k, m)
}

/// Dipole coupling of a state to one intermediate sublevel `|m_I⟩|J' M⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coupling {
    pub level: String,
    pub m_nuclear: Option<HalfInt>,
    pub m_j: HalfInt,
    /// `⟨r| z |state⟩`, m.
    pub z: Complex64,
    /// `E_state − E_r`, J.
    pub gap: f64,
}

/// State energy including its offset, J.
pub fn state_energy(state: &StateDecomposition, model: &AtomicModel) -> Result<f64> {
    let level = model.level(&state.level)?;
    Ok(level.energy() + hz_to_joule(state.offset_hz))
}

/// Every intermediate sublevel reachable from `state` through `z`, in a stable order.
pub fn couplings(state: &StateDecomposition, model: &AtomicModel) -> Result<Vec<Coupling>> {
    let level = model.level(&state.level)?;
    let amplitudes = state.coupled_amplitudes(level)?;
    let energy = state_energy(state, model)?;
    let mut out: BTreeMap<(String, Option<HalfInt>, HalfInt), Complex64> = BTreeMap::new();
    let mut gaps: BTreeMap<String, f64> = BTreeMap::new();
    for line in model.lines().iter() {
        let Some(other) = line.partner(&level.label) else { continue };
        let other = model.level(other)?;
        let gap = energy - other.energy();
        if joule_to_inverse_cm(gap).abs() < DENOMINATOR_FLOOR_CM1 {
            return Err(Error::DegenerateDenominator {
                state: level.label.clone(),
                other: other.label.clone(),
                gap_cm1: joule_to_inverse_cm(gap),
            });
        }
        gaps.insert(other.label.clone(), gap);
        for (&(m_nuclear, m_j), &c) in &amplitudes {
            let z = dipole_z(line.strength, level.j, other.j, m_j);
            if z != 0.0 {
                *out.entry((other.label.clone(), m_nuclear, m_j)).or_default() += c * z;
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|((label, m_nuclear, m_j), z)| Coupling { gap: gaps[&label], level: label, m_nuclear, m_j, z })
        .collect())
}

/// `Σ_{m∈l} |⟨m| z |state⟩|²` in m²; zero when no line joins the two levels.
pub fn matrix_element_sq_sum(state: &StateDecomposition, level: &str, model: &AtomicModel) -> Result<f64> {
    model.level(level)?;
    Ok(couplings(state, model)?.iter().filter(|c| c.level == level).map(|c| c.z.norm_sqr()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelContribution {
    pub level: String,
    /// `Σ_{m∈l} |⟨m|z|i⟩|²`, m².
    pub matrix_sq_sum: f64,
    /// `E_i − E_l`, cm⁻¹.
    pub gap_cm1: f64,
    /// m²/J.
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Susceptibility {
    /// `Σ_m |⟨m|z|i⟩|² / (E_i − E_m)`, m²/J.
    pub chi: f64,
    pub contributions: Vec<LevelContribution>,
}

/// Static second-order response of `state` to a uniform field along the quantisation axis.
pub fn susceptibility(state: &StateDecomposition, model: &AtomicModel) -> Result<Susceptibility> {
    let mut by_level: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for c in couplings(state, model)? {
        let e = by_level.entry(c.level).or_insert((0.0, c.gap));
        e.0 += c.z.norm_sqr();
    }
    let contributions: Vec<LevelContribution> = by_level
        .into_iter()
        .map(|(level, (sq, gap))| LevelContribution { level, matrix_sq_sum: sq, gap_cm1: joule_to_inverse_cm(gap), chi: sq / gap })
        .collect();
    Ok(Susceptibility { chi: contributions.iter().map(|c| c.chi).sum(), contributions })
}

/// `Σ_{r'} ⟨target|z|r'⟩⟨r'|z|source⟩ / (E_source − E_r')` in m²/J; equals
/// `χ` when `target == source`.
pub fn transition_susceptibility(target: &StateDecomposition, source: &StateDecomposition, model: &AtomicModel) -> Result<Complex64> {
    let from_target: BTreeMap<_, _> =
        couplings(target, model)?.into_iter().map(|c| ((c.level, c.m_nuclear, c.m_j), c.z)).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for c in couplings(source, model)? {
        if let Some(zt) = from_target.get(&(c.level.clone(), c.m_nuclear, c.m_j)) {
            sum += zt.conj() * c.z / c.gap;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::super::tables::{parse_levels, parse_lines};
    use super::*;
    use approx::assert_relative_eq;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn model(lines: &str) -> AtomicModel {
        let levels = parse_levels(
            "label,configuration,term,J,energy_cm1\nS,4s,2S,1/2,0\nP1,4p,2P*,1/2,25000\nP3,4p,2P*,3/2,25200\nD5,3d,2D,5/2,13700\n",
        )
        .unwrap();
        AtomicModel::new("test", levels, parse_lines(lines).unwrap()).unwrap()
    }

    #[test]
    fn reduced_element_arithmetic() {
        assert_eq!(reduced_matrix_sq(0.0, 3), 0.0);
        assert_relative_eq!(reduced_matrix_sq(1.0, 2), 1.40014e-21, max_relative = 1e-5);
    }

    #[test]
    fn no_lines_no_response() {
        let m = model("");
        let chi = susceptibility(&StateDecomposition::pure("S", h(-1)), &m).unwrap();
        assert_eq!(chi.chi, 0.0);
        assert!(chi.contributions.is_empty());
        assert_eq!(matrix_element_sq_sum(&StateDecomposition::pure("S", h(-1)), "P1", &m).unwrap(), 0.0);
    }

    #[test]
    fn only_same_projection_contributes() {
        let m = model("upper,lower,S_au\nP1,S,8\nP3,S,16\n");
        let cs = couplings(&StateDecomposition::pure("S", h(-1)), &m).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.m_j == h(-1)));
        assert!(cs.iter().all(|c| c.gap < 0.0));
    }

    #[test]
    fn closure_over_projections() {
        // Σ_M Σ_{m∈l} |⟨m|z|k M⟩|² = S a₀² / 3 for the q = 0 component
        let m = model("upper,lower,S_au\nP1,S,8\nP3,S,16\nP3,D5,12\n");
        for (level, j, other, s) in [("S", h(1), "P3", 16.0), ("S", h(1), "P1", 8.0), ("D5", h(5), "P3", 12.0), ("P3", h(3), "S", 16.0)] {
            let total: f64 = j
                .projections()
                .map(|mj| matrix_element_sq_sum(&StateDecomposition::pure(level, mj), other, &m).unwrap())
                .sum();
            assert_relative_eq!(total, s * BOHR_RADIUS * BOHR_RADIUS / 3.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn ground_state_is_negative() {
        let m = model("upper,lower,S_au\nP1,S,8\nP3,S,16\n");
        let chi = susceptibility(&StateDecomposition::pure("S", h(1)), &m).unwrap();
        assert!(chi.chi < 0.0);
        assert_relative_eq!(
            transition_susceptibility(&StateDecomposition::pure("S", h(1)), &StateDecomposition::pure("S", h(1)), &m).unwrap().re,
            chi.chi,
            max_relative = 1e-14
        );
        assert_eq!(
            transition_susceptibility(&StateDecomposition::pure("S", h(1)), &StateDecomposition::pure("S", h(-1)), &m).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn degenerate_denominator_names_levels() {
        let m = model("upper,lower,S_au\nP1,S,8\n");
        let st = StateDecomposition::pure("S", h(1)).with_offset(25000.0 * 2.99792458e10);
        match susceptibility(&st, &m) {
            Err(Error::DegenerateDenominator { state, other, .. }) => assert_eq!((state.as_str(), other.as_str()), ("S", "P1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_level_rejected() {
        let m = model("");
        assert!(susceptibility(&StateDecomposition::pure("X", h(1)), &m).is_err());
        assert!(matrix_element_sq_sum(&StateDecomposition::pure("S", h(1)), "X", &m).is_err());
    }
}
