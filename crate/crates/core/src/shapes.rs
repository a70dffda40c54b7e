//! Parametric drive envelopes.
//!
//! Every pulse lives on `[0, T]` with its centre at `T/2` and vanishes outside.
//! Each family is written as `Ω(t) = Ω₀ · f(t)` where `f` is the unit profile,
//! so pulse areas are linear in `Ω₀`:
//!
//! | family        | unit profile `f(t)`, `s = (t − T/2)/(T/2)`  | area / (Ω₀T)      |
//! |---------------|----------------------------------------------|-------------------|
//! | rectangular   | `1`                                          | `1`               |
//! | quadratic(β)  | `1 + β(s² − 1)`, requires `β ≤ 1`            | `1 − 2β/3`        |
//! | power-law(P)  | `s^{2P}`                                     | `1/(2P + 1)`      |
//! | gaussian(σ)   | `exp(−(t − T/2)²/2σ²)`, truncated            | quadrature        |
//! | sech(τ)       | `sech((t − T/2)/τ)`, truncated               | quadrature        |
//! | sampled       | linear interpolation of node values          | quadrature        |
//!
//! For the quadratic and power-law families `Ω₀` is the value at the pulse
//! edges; a β < 0 pulse therefore peaks at `Ω₀(1 − β)` mid-pulse.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dynamics::DriveSchedule;
use crate::quadrature;
use crate::{Error, Result};

/// Largest fraction of the untruncated area a Gaussian or sech pulse may lose
/// to truncation at the window edges.
pub const MAX_TRUNCATED_FRACTION: f64 = 1e-4;

const QUADRATURE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Rectangular,
    /// Parabola added to a rectangle; β ≤ 1 keeps the envelope non-negative.
    Quadratic { beta: f64 },
    /// `s^{2P}`: a mid-pulse pit between two horns.
    PowerLaw { p: u32 },
    /// Gaussian of standard deviation `sigma` (ns) centred in the window.
    Gaussian { sigma: f64 },
    /// Hyperbolic secant of width `tau` (ns) centred in the window.
    Sech { tau: f64 },
    /// Node values on a uniform grid spanning `[0, T]` (first node at 0, last at T),
    /// linearly interpolated and multiplied by Ω₀.
    Sampled { values: Vec<f64> },
}

impl Family {
    /// Compact descriptor used in file metadata and reports.
    pub fn id(&self) -> String {
        match self {
            Family::Rectangular => "rectangular".into(),
            Family::Quadratic { beta } => format!("quadratic(beta={beta})"),
            Family::PowerLaw { p } => format!("powerlaw(P={p})"),
            Family::Gaussian { sigma } => format!("gaussian(sigma={sigma}ns)"),
            Family::Sech { tau } => format!("sech(tau={tau}ns)"),
            Family::Sampled { values } => format!("sampled(n={})", values.len()),
        }
    }

    /// True when the envelope is non-zero at the window edges, so switching
    /// the pulse on and off is a discontinuity.
    pub fn has_edge_jump(&self) -> bool {
        match self {
            Family::Rectangular | Family::Quadratic { .. } | Family::PowerLaw { .. } => true,
            Family::Gaussian { .. } | Family::Sech { .. } => false,
            Family::Sampled { values } => {
                values.first().is_some_and(|v| *v != 0.0) || values.last().is_some_and(|v| *v != 0.0)
            }
        }
    }

    fn validate(&self, duration: f64) -> Result<()> {
        match self {
            Family::Rectangular | Family::PowerLaw { .. } => Ok(()),
            Family::Quadratic { beta } => {
                if !beta.is_finite() || *beta > 1.0 {
                    return Err(Error::InvalidShape(format!(
                        "quadratic beta must be finite and <= 1, got {beta}"
                    )));
                }
                Ok(())
            }
            Family::Gaussian { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidShape(format!("gaussian sigma must be > 0, got {sigma}")));
                }
                let lost = libm::erfc(duration / (2.0 * core::f64::consts::SQRT_2 * sigma));
                check_truncation("gaussian", lost)
            }
            Family::Sech { tau } => {
                if !(tau.is_finite() && *tau > 0.0) {
                    return Err(Error::InvalidShape(format!("sech tau must be > 0, got {tau}")));
                }
                // ∫ sech over ±T/2 = 2τ·gd(T/2τ), gd(x) = atan(sinh x)
                let kept = 2.0 / PI * (duration / (2.0 * tau)).sinh().atan();
                check_truncation("sech", 1.0 - kept)
            }
            Family::Sampled { values } => {
                if values.len() < 2 {
                    return Err(Error::InvalidShape("sampled envelope needs at least 2 nodes".into()));
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(Error::InvalidShape(format!(
                        "sampled envelope values must be finite and >= 0, got {v}"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn check_truncation(name: &str, lost: f64) -> Result<()> {
    if lost >= MAX_TRUNCATED_FRACTION {
        return Err(Error::InvalidShape(format!(
            "{name} truncation discards {lost:.3e} of the area (limit {MAX_TRUNCATED_FRACTION:e}); widen the window"
        )));
    }
    Ok(())
}

/// A validated drive envelope: family, edge/peak parameter Ω₀ (rad/ns) and duration T (ns).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    family: Family,
    omega0: f64,
    duration: f64,
}

impl PulseShape {
    pub fn new(family: Family, omega0: f64, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidShape(format!("duration must be > 0, got {duration} ns")));
        }
        if !(omega0.is_finite() && omega0 >= 0.0) {
            return Err(Error::InvalidShape(format!("omega0 must be finite and >= 0, got {omega0}")));
        }
        family.validate(duration)?;
        Ok(PulseShape {
            family,
            omega0,
            duration,
        })
    }

    pub fn rectangular(omega0: f64, duration: f64) -> Result<Self> {
        Self::new(Family::Rectangular, omega0, duration)
    }

    pub fn quadratic(beta: f64, omega0: f64, duration: f64) -> Result<Self> {
        Self::new(Family::Quadratic { beta }, omega0, duration)
    }

    pub fn power_law(p: u32, omega0: f64, duration: f64) -> Result<Self> {
        Self::new(Family::PowerLaw { p }, omega0, duration)
    }

    pub fn gaussian(sigma: f64, omega0: f64, duration: f64) -> Result<Self> {
        Self::new(Family::Gaussian { sigma }, omega0, duration)
    }

    pub fn sech(tau: f64, omega0: f64, duration: f64) -> Result<Self> {
        Self::new(Family::Sech { tau }, omega0, duration)
    }

    /// Builds the shape whose area equals `area` (radians).
    pub fn with_area(family: Family, duration: f64, area: f64) -> Result<Self> {
        let omega0 = amplitude_for_area(&family, duration, area)?;
        Self::new(family, omega0, duration)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn id(&self) -> String {
        self.family.id()
    }

    /// Same family and duration with a different Ω₀.
    pub fn with_amplitude(&self, omega0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 >= 0.0) {
            return Err(Error::InvalidShape(format!("omega0 must be finite and >= 0, got {omega0}")));
        }
        Ok(PulseShape {
            family: self.family.clone(),
            omega0,
            duration: self.duration,
        })
    }

    #[inline]
    fn reduced_time(&self, t: f64) -> f64 {
        let half = 0.5 * self.duration;
        (t - half) / half
    }

    /// Envelope divided by Ω₀; zero outside `[0, T]`.
    pub fn unit_envelope(&self, t: f64) -> f64 {
        if !(0.0..=self.duration).contains(&t) {
            return 0.0;
        }
        match &self.family {
            Family::Rectangular => 1.0,
            Family::Quadratic { beta } => {
                let s = self.reduced_time(t);
                1.0 + beta * (s * s - 1.0)
            }
            Family::PowerLaw { p } => self.reduced_time(t).powi(2 * *p as i32),
            Family::Gaussian { sigma } => {
                let u = (t - 0.5 * self.duration) / sigma;
                (-0.5 * u * u).exp()
            }
            Family::Sech { tau } => 1.0 / ((t - 0.5 * self.duration) / tau).cosh(),
            Family::Sampled { values } => {
                let last = values.len() - 1;
                let x = t / self.duration * last as f64;
                let k = (x.floor() as usize).min(last - 1);
                let frac = x - k as f64;
                values[k] + (values[k + 1] - values[k]) * frac
            }
        }
    }

    /// Ω(t) in rad/ns.
    #[inline]
    pub fn envelope(&self, t: f64) -> f64 {
        self.omega0 * self.unit_envelope(t)
    }

    /// First and second time derivatives (Ω̇, Ω̈) at an interior time `0 < t < T`.
    ///
    /// Analytic families use their closed forms. `Sampled` uses the five-point
    /// central stencil with spacing `h = min(node spacing, t/2, (T − t)/2)`.
    pub fn derivatives(&self, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0 && t < self.duration) {
            return Err(Error::EdgeDerivative { t });
        }
        let w = self.omega0;
        let half = 0.5 * self.duration;
        Ok(match &self.family {
            Family::Rectangular => (0.0, 0.0),
            Family::Quadratic { beta } => {
                let s = self.reduced_time(t);
                (2.0 * w * beta * s / half, 2.0 * w * beta / (half * half))
            }
            Family::PowerLaw { p } => {
                let n = 2 * *p as i32;
                let s = self.reduced_time(t);
                let first = if n >= 1 { w * n as f64 * s.powi(n - 1) / half } else { 0.0 };
                let second = if n >= 2 {
                    w * (n * (n - 1)) as f64 * s.powi(n - 2) / (half * half)
                } else {
                    0.0
                };
                (first, second)
            }
            Family::Gaussian { sigma } => {
                let u = (t - half) / sigma;
                let omega = self.envelope(t);
                (-omega * u / sigma, omega * (u * u - 1.0) / (sigma * sigma))
            }
            Family::Sech { tau } => {
                let v = (t - half) / tau;
                let omega = self.envelope(t);
                let th = v.tanh();
                (-omega * th / tau, omega * (2.0 * th * th - 1.0) / (tau * tau))
            }
            Family::Sampled { values } => {
                let spacing = self.duration / (values.len() - 1) as f64;
                let h = spacing.min(0.5 * t).min(0.5 * (self.duration - t));
                let f = |x: f64| self.envelope(x);
                let (m2, m1, c, p1, p2) = (f(t - 2.0 * h), f(t - h), f(t), f(t + h), f(t + 2.0 * h));
                (
                    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
                    (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h),
                )
            }
        })
    }

    /// ∫₀ᵀ Ω(t) dt in radians.
    pub fn area(&self) -> f64 {
        self.omega0 * unit_area(&self.family, self.duration)
    }

    /// Samples the envelope at the midpoints of `round(T/step)` slots of width
    /// `step`. The detuning channel is zero; attach one with
    /// [`DriveSchedule::with_constant_detuning`].
    pub fn sample(&self, step: f64) -> Result<DriveSchedule> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidArgument(format!("sample step must be > 0, got {step}")));
        }
        if step > self.duration {
            return Err(Error::InvalidArgument(format!(
                "sample step {step} ns exceeds the pulse duration {} ns",
                self.duration
            )));
        }
        let n = (self.duration / step).round() as usize;
        let omega = (0..n).map(|k| self.envelope((k as f64 + 0.5) * step)).collect();
        DriveSchedule::new(step, omega, alloc::vec![0.0; n])
    }
}

/// Area of the unit-amplitude profile (Ω₀ = 1).
pub fn unit_area(family: &Family, duration: f64) -> f64 {
    match family {
        Family::Rectangular => duration,
        Family::Quadratic { beta } => duration * (1.0 - 2.0 * beta / 3.0),
        Family::PowerLaw { p } => duration / (2 * *p + 1) as f64,
        Family::Gaussian { .. } | Family::Sech { .. } => {
            let unit = PulseShape {
                family: family.clone(),
                omega0: 1.0,
                duration,
            };
            // Split at the centre so both halves are monotone.
            let half = 0.5 * duration;
            quadrature::integrate(|t| unit.unit_envelope(t), 0.0, half, QUADRATURE_REL_TOL).value
                + quadrature::integrate(|t| unit.unit_envelope(t), half, duration, QUADRATURE_REL_TOL)
                    .value
        }
        Family::Sampled { values } => {
            // Integrate node-to-node so the interpolation kinks sit on panel edges.
            let unit = PulseShape {
                family: family.clone(),
                omega0: 1.0,
                duration,
            };
            let spacing = duration / (values.len() - 1) as f64;
            (0..values.len() - 1)
                .map(|k| {
                    let a = k as f64 * spacing;
                    let b = if k + 2 == values.len() { duration } else { a + spacing };
                    quadrature::integrate(|t| unit.unit_envelope(t), a, b, QUADRATURE_REL_TOL).value
                })
                .sum()
        }
    }
}

/// Ω₀ (rad/ns) that gives the family an area of `area` radians over `duration` ns.
pub fn amplitude_for_area(family: &Family, duration: f64, area: f64) -> Result<f64> {
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::InvalidArgument(format!("target area must be > 0, got {area}")));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidShape(format!("duration must be > 0, got {duration} ns")));
    }
    family.validate(duration)?;
    let unit = unit_area(family, duration);
    if unit.is_nan() || unit <= 0.0 {
        return Err(Error::DegenerateArea);
    }
    Ok(area / unit)
}
