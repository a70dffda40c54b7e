//! Numerical core for power-superbroadening studies of a driven two-level system.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure numerics:
//! pulse envelope families, an exact piecewise-constant propagator for the
//! rotating-wave two-state Schrödinger equation, a Lindblad variant for
//! decoherence checks, adiabatic / superadiabatic frame diagnostics,
//! excitation landscapes and linewidth analysis. File formats, the CLI and the
//! parallel sweep driver live in the `superbroad` crate.
//!
//! Units: time in nanoseconds, Rabi frequency and detuning in rad/ns.
//! Helpers in [`units`] convert to and from ordinary frequencies in MHz.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dynamics;
mod error;
pub mod frames;
pub mod hardware;
pub mod landscape;
pub mod lindblad;
pub mod noise;
pub mod quadrature;
pub mod shapes;
pub mod units;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        broadening_factor, count_visible_fringes, detect_fringes, operational_linewidth,
        BroadeningRatio, Fringes, LineStatus, LinewidthReport, RatioBound,
    };
    pub use crate::dynamics::{
        propagate, propagate_schedule, rabi_closed_form, rosen_zener_closed_form, DriveSchedule,
        QubitState,
    };
    pub use crate::frames::{diagnose, midpoint_asymptotic, FrameDiagnostics};
    pub use crate::hardware::{DayRecord, HardwareProfile};
    pub use crate::landscape::{Axis, LandscapeGrid, LandscapeSpec, Slice};
    pub use crate::lindblad::{propagate_lindblad, Coherence, DensityMatrix};
    pub use crate::shapes::{Family, PulseShape};
    pub use crate::units::{mhz_to_rad_per_ns, rad_per_ns_to_mhz};
    pub use crate::{Error, Result};
}
