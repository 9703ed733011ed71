//! CGS-Gaussian physical constants. All frequencies in this crate are angular (rad/s).

/// Reduced Planck constant, erg·s.
pub const HBAR: f64 = 1.054_571_817e-27;
/// Speed of light, cm/s.
pub const C_LIGHT: f64 = 2.997_924_58e10;
/// Boltzmann constant, erg/K.
pub const K_B: f64 = 1.380_649e-16;
/// Atomic mass unit, g.
pub const AMU: f64 = 1.660_539_066_60e-24;
