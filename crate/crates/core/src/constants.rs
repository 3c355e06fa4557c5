//! CODATA 2018 constants, SI units.

pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const NUCLEAR_MAGNETON: f64 = 5.050_783_746_1e-27;

/// Energy of one wavenumber (cm⁻¹), in joules.
pub const INVERSE_CM: f64 = PLANCK * SPEED_OF_LIGHT * 100.0;

pub fn inverse_cm_to_joule(e: f64) -> f64 {
    e * INVERSE_CM
}

pub fn joule_to_inverse_cm(e: f64) -> f64 {
    e / INVERSE_CM
}

pub fn hz_to_joule(f: f64) -> f64 {
    f * PLANCK
}
