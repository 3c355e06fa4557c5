use serde::{Deserialize, Serialize};

use super::angular::HalfInt;
use super::state::{Component, Electronic, StateDecomposition};
use super::tables::Level;
use crate::constants::{BOHR_MAGNETON, NUCLEAR_MAGNETON, PLANCK};
use crate::error::{Error, Result};

/// Ground-level hyperfine and Zeeman parameters for a `J = 1/2` level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperfineParams {
    pub nuclear_spin: HalfInt,
    /// Magnetic dipole constant `A`, Hz.
    pub a_hz: f64,
    pub g_j: f64,
    /// Nuclear g-factor with the sign convention `H_Z = μ_B B (g_J m_J + g_I m_I)`.
    pub g_i: f64,
    pub field_tesla: f64,
}

impl HyperfineParams {
    /// `g_I` from a nuclear moment in nuclear magnetons.
    pub fn nuclear_g(moment_nm: f64, nuclear_spin: HalfInt) -> f64 {
        -moment_nm * NUCLEAR_MAGNETON / (nuclear_spin.value() * BOHR_MAGNETON)
    }

    /// Same parameters at another magnetic field.
    pub fn with_field(&self, field_tesla: f64) -> Self {
        Self { field_tesla, ..*self }
    }
}

/// `|F, m_F⟩` of a `J = 1/2` level in a magnetic field, as a decomposition into
/// `|m_I⟩|m_J⟩` products with its energy relative to the level centroid.
///
/// `F` labels follow adiabatic continuation from zero field.
pub fn hyperfine_state(level: &Level, p: &HyperfineParams, f: HalfInt, m_f: HalfInt) -> Result<StateDecomposition> {
    if level.j != HalfInt::HALF {
        return Err(Error::invalid(format!("Breit-Rabi states need J = 1/2, level `{}` has J = {}", level.label, level.j)));
    }
    let i = p.nuclear_spin;
    if i.twice() < 1 || !p.a_hz.is_finite() || p.a_hz == 0.0 || !p.field_tesla.is_finite() {
        return Err(Error::invalid("hyperfine parameters need I >= 1/2, finite non-zero A and a finite field"));
    }
    let upper_f = i + HalfInt::HALF;
    let lower_f = i - HalfInt::HALF;
    if f != upper_f && f != lower_f {
        return Err(Error::invalid(format!("F = {f} impossible for I = {i}, J = 1/2")));
    }
    if m_f.twice().abs() > f.twice() || (f.twice() - m_f.twice()) % 2 != 0 {
        return Err(Error::invalid(format!("m_F = {m_f} impossible for F = {f}")));
    }
    let electronic = |m_j: HalfInt| match level.orbital_and_spin() {
        Some((l, _)) if l == HalfInt::ZERO => Electronic::Uncoupled { m_l: HalfInt::ZERO, m_s: m_j },
        _ => Electronic::Coupled { m_j },
    };
    let zeeman = BOHR_MAGNETON / PLANCK * p.field_tesla;
    let diag = |m_i: HalfInt, m_j: HalfInt| p.a_hz * m_i.value() * m_j.value() + zeeman * (p.g_j * m_j.value() + p.g_i * m_i.value());
    let half = HalfInt::HALF;
    if m_f.twice().abs() == upper_f.twice() {
        let m_j = if m_f.twice() > 0 { half } else { -half };
        let m_i = m_f - m_j;
        let comp = Component { m_nuclear: Some(m_i), electronic: electronic(m_j), amplitude: 1.0.into() };
        return StateDecomposition::new(&level.label, vec![comp], diag(m_i, m_j));
    }
    let (mi_a, mi_b) = (m_f - half, m_f + half);
    let h_aa = diag(mi_a, half);
    let h_bb = diag(mi_b, -half);
    let iv = i.value();
    let h_ab = 0.5 * p.a_hz * (iv * (iv + 1.0) - mi_a.value() * mi_b.value()).sqrt();
    let mean = 0.5 * (h_aa + h_bb);
    let radius = (0.25 * (h_aa - h_bb).powi(2) + h_ab * h_ab).sqrt();
    let take_upper = (f == upper_f) == (p.a_hz > 0.0);
    let energy = if take_upper { mean + radius } else { mean - radius };
    let (va, vb) = (h_ab, energy - h_aa);
    let norm = va.hypot(vb);
    let comps = vec![
        Component { m_nuclear: Some(mi_a), electronic: electronic(half), amplitude: (va / norm).into() },
        Component { m_nuclear: Some(mi_b), electronic: electronic(-half), amplitude: (vb / norm).into() },
    ];
    StateDecomposition::new(&level.label, comps, energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn be() -> (Level, HyperfineParams) {
        let level = Level::from_cm1("S", "2s", "2S", HalfInt::HALF, 0.0).unwrap();
        let i = HalfInt::from_twice(3);
        let p = HyperfineParams {
            nuclear_spin: i,
            a_hz: -625.008837e6,
            g_j: 2.00226206,
            g_i: HyperfineParams::nuclear_g(-1.17749, i),
            field_tesla: 0.0,
        };
        (level, p)
    }

    #[test]
    fn zero_field_energies() {
        let (level, p) = be();
        let f2 = hyperfine_state(&level, &p, HalfInt::from_int(2), HalfInt::ZERO).unwrap();
        let f1 = hyperfine_state(&level, &p, HalfInt::ONE, HalfInt::ZERO).unwrap();
        assert_relative_eq!(f2.offset_hz, p.a_hz * 0.75, max_relative = 1e-12);
        assert_relative_eq!(f1.offset_hz, -p.a_hz * 1.25, max_relative = 1e-12);
        // stretched state agrees with the 2x2 branch at zero field
        let s = hyperfine_state(&level, &p, HalfInt::from_int(2), HalfInt::from_int(2)).unwrap();
        assert_relative_eq!(s.offset_hz, p.a_hz * 0.75, max_relative = 1e-12);
    }

    #[test]
    fn nuclear_g_factor() {
        let (_, p) = be();
        assert_relative_eq!(p.g_i, 4.2753e-4, max_relative = 1e-4);
    }

    #[test]
    fn qubit_splitting_at_working_field() {
        let (level, p) = be();
        let p = p.with_field(0.01194);
        let a = hyperfine_state(&level, &p, HalfInt::from_int(2), HalfInt::ZERO).unwrap();
        let b = hyperfine_state(&level, &p, HalfInt::ONE, HalfInt::ONE).unwrap();
        assert!((a.offset_hz / 1e6 + 490.76).abs() < 0.05, "{}", a.offset_hz);
        assert!((b.offset_hz / 1e6 - 716.70).abs() < 0.05, "{}", b.offset_hz);
        let norm: f64 = a.components.iter().map(|c| c.amplitude.norm_sqr()).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigenvectors_are_orthogonal() {
        let (level, p) = be();
        let p = p.with_field(0.02);
        let a = hyperfine_state(&level, &p, HalfInt::from_int(2), HalfInt::ZERO).unwrap();
        let b = hyperfine_state(&level, &p, HalfInt::ONE, HalfInt::ZERO).unwrap();
        let overlap: f64 = a.components.iter().zip(&b.components).map(|(x, y)| (x.amplitude.conj() * y.amplitude).re).sum();
        assert!(overlap.abs() < 1e-14);
    }

    #[test]
    fn impossible_labels_rejected() {
        let (level, p) = be();
        assert!(hyperfine_state(&level, &p, HalfInt::from_int(3), HalfInt::ZERO).is_err());
        assert!(hyperfine_state(&level, &p, HalfInt::ONE, HalfInt::from_int(2)).is_err());
        let p_level = Level::from_cm1("P", "2p", "2P*", HalfInt::from_twice(3), 1.0).unwrap();
        assert!(hyperfine_state(&p_level, &p, HalfInt::ONE, HalfInt::ZERO).is_err());
    }
}
