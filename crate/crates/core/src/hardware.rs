//! Device profile: sample clock, amplitude limits, calibration and the
//! day-by-day coherence record of one transmon.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dynamics::{propagate_schedule, DriveSchedule, QubitState};
use crate::lindblad::{propagate_lindblad, Coherence, DensityMatrix};
use crate::shapes::PulseShape;
use crate::units::{rad_per_ns_to_mhz, HARDWARE_DT_NS};
use crate::{Error, Result};

/// Tolerance on the amplitude limit, so a pulse designed exactly at the limit passes.
const AMPLITUDE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DayRecord {
    pub label: String,
    pub t1_us: f64,
    pub t2_us: f64,
    /// Symmetric readout assignment error.
    pub readout_error: f64,
}

impl DayRecord {
    pub fn new(label: &str, t1_us: f64, t2_us: f64, readout_error: f64) -> Self {
        DayRecord {
            label: label.to_string(),
            t1_us,
            t2_us,
            readout_error,
        }
    }

    pub fn coherence(&self) -> Result<Coherence> {
        Coherence::new(self.t1_us, self.t2_us)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HardwareProfile {
    pub name: String,
    /// Sample clock, ns.
    pub dt_ns: f64,
    /// Largest allowed drive amplitude in device units.
    pub max_amplitude: f64,
    /// Ω/2π in MHz produced by one device unit.
    pub amp_calibration_mhz: f64,
    pub max_duration_ns: f64,
    pub qubit_frequency_ghz: f64,
    pub anharmonicity_ghz: f64,
    pub days: Vec<DayRecord>,
}

impl HardwareProfile {
    /// Qubit 46 of a 127-qubit heavy-hex device, late November to early December.
    pub fn sherbrooke_q46() -> Self {
        HardwareProfile {
            name: "sherbrooke-q46".into(),
            dt_ns: HARDWARE_DT_NS,
            max_amplitude: 1.0,
            amp_calibration_mhz: 40.0,
            max_duration_ns: 10_000.0,
            qubit_frequency_ghz: 4.6741,
            anharmonicity_ghz: -0.3134,
            days: vec![
                DayRecord::new("27 Nov", 393.66, 596.88, 0.0066),
                DayRecord::new("29 Nov", 321.33, 697.45, 0.0076),
                DayRecord::new("1 Dec", 316.42, 492.27, 0.0058),
                DayRecord::new("3 Dec", 256.01, 287.59, 0.0205),
                DayRecord::new("5 Dec", 347.80, 468.87, 0.0158),
            ],
        }
    }

    /// Built-in profile by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "sherbrooke-q46" => Ok(Self::sherbrooke_q46()),
            other => Err(Error::InvalidProfile(format!("unknown preset '{other}'"))),
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["sherbrooke-q46"]
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt_ns", self.dt_ns),
            ("max_amplitude", self.max_amplitude),
            ("amp_calibration_mhz", self.amp_calibration_mhz),
            ("max_duration_ns", self.max_duration_ns),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidProfile(format!("{field} must be positive and finite, got {v}")));
            }
        }
        for day in &self.days {
            day.coherence()?;
            if !(0.0..0.5).contains(&day.readout_error) {
                return Err(Error::InvalidProfile(format!(
                    "readout error {} on {} outside [0, 0.5)",
                    day.readout_error, day.label
                )));
            }
        }
        Ok(())
    }

    pub fn day(&self, label: &str) -> Result<&DayRecord> {
        self.days
            .iter()
            .find(|d| d.label.eq_ignore_ascii_case(label))
            .ok_or_else(|| Error::UnknownDay(label.to_string()))
    }

    /// Device units for a Rabi frequency in rad/ns.
    pub fn device_amplitude(&self, omega: f64) -> f64 {
        rad_per_ns_to_mhz(omega) / self.amp_calibration_mhz
    }

    /// Samples `shape` on the device clock and checks duration and amplitude
    /// limits. Violations are errors; nothing is clipped.
    pub fn clamp_and_discretize(&self, shape: &PulseShape) -> Result<DriveSchedule> {
        self.validate()?;
        let duration = shape.duration();
        if duration > self.max_duration_ns {
            return Err(Error::DurationExceeded {
                duration,
                limit: self.max_duration_ns,
            });
        }
        let schedule = shape.sample(self.dt_ns)?;
        let worst = schedule
            .omega()
            .iter()
            .enumerate()
            .map(|(k, &w)| (k, self.device_amplitude(w).abs()))
            .fold((0, 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
        if worst.1 > self.max_amplitude * (1.0 + AMPLITUDE_SLACK) {
            return Err(Error::AmplitudeExceeded {
                amplitude: worst.1,
                t: (worst.0 as f64 + 0.5) * schedule.step(),
                limit: self.max_amplitude,
            });
        }
        Ok(schedule)
    }

    /// |P₂(open) − P₂(closed)| for `shape` at detuning `delta` (rad/ns), on the
    /// device clock with the coherence times recorded for `day`.
    pub fn decoherence_impact(&self, shape: &PulseShape, delta: f64, day: &str) -> Result<f64> {
        let coherence = self.day(day)?.coherence()?;
        self.decoherence_impact_with(shape, delta, coherence)
    }

    pub fn decoherence_impact_with(&self, shape: &PulseShape, delta: f64, coherence: Coherence) -> Result<f64> {
        let schedule = self.clamp_and_discretize(shape)?.with_constant_detuning(delta);
        let closed = propagate_schedule(&schedule, QubitState::ground())?;
        let open = propagate_lindblad(&schedule, coherence, DensityMatrix::ground())?;
        Ok((open.rho22 - closed.p2()).abs())
    }
}

/// Probability of reading "1" when the true excited population is `p2` and each
/// outcome flips with probability `eps`.
pub fn apply_readout_error(p2: f64, eps: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidArgument(format!("readout error {eps} outside [0, 0.5)")));
    }
    Ok(p2 * (1.0 - eps) + (1.0 - p2) * eps)
}

/// Intrinsic linewidth 1/(πT₂) in kHz for T₂ in µs.
pub fn t2_limited_linewidth_khz(t2_us: f64) -> f64 {
    1e3 / (PI * t2_us)
}
