//! Unit conventions.
//!
//! Internally every frequency is an angular frequency in rad/ns. Everything
//! that crosses an IO boundary is an ordinary frequency (Ω/2π, Δ/2π) in MHz.

use core::f64::consts::TAU;

/// Hardware sample period of the emulated backend, in ns.
pub const HARDWARE_DT_NS: f64 = 2.0 / 9.0;

/// 800 samples of [`HARDWARE_DT_NS`] (≈ 177.8 ns), the quadratic-family duration.
pub const QUADRATIC_DURATION_NS: f64 = 800.0 * HARDWARE_DT_NS;

/// 1600 samples of [`HARDWARE_DT_NS`] (≈ 355.6 ns), the power-law-family duration.
pub const POWER_LAW_DURATION_NS: f64 = 1600.0 * HARDWARE_DT_NS;

const RAD_PER_NS_PER_MHZ: f64 = TAU * 1e-3;

#[inline]
pub fn mhz_to_rad_per_ns(mhz: f64) -> f64 {
    mhz * RAD_PER_NS_PER_MHZ
}

#[inline]
pub fn rad_per_ns_to_mhz(rad_per_ns: f64) -> f64 {
    rad_per_ns / RAD_PER_NS_PER_MHZ
}

#[inline]
pub fn us_to_ns(us: f64) -> f64 {
    us * 1e3
}
