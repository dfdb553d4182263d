//! CODATA 2018 constants in SI units.

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const HBAR: f64 = 1.054_571_817e-34;

pub const PI: f64 = core::f64::consts::PI;
pub const TWO_PI: f64 = 2.0 * PI;

/// Angular frequency of one terahertz of linear frequency, in rad/s.
pub const RAD_PER_S_PER_THZ: f64 = TWO_PI * 1.0e12;

/// Converts a linear frequency in THz to an angular frequency in rad/s.
#[inline]
pub fn thz_to_rad_per_s(thz: f64) -> f64 {
    thz * RAD_PER_S_PER_THZ
}

/// Inverse of [`thz_to_rad_per_s`].
#[inline]
pub fn rad_per_s_to_thz(omega: f64) -> f64 {
    omega / RAD_PER_S_PER_THZ
}
