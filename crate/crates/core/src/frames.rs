//! Adiabatic and second-order superadiabatic frame quantities.
//!
//! First order (adiabatic basis):
//! `ε₁ = √(Ω² + Δ²)`, `ϑ₁ = ½·atan2(Ω, Δ)`,
//! `ϑ̇₁ = (Ω̇Δ − ΩΔ̇) / (2(Ω² + Δ²))`.
//!
//! Second order, obtained by treating `(ε₁, 2ϑ̇₁)` as the new `(Δ, Ω)`:
//! `ε₂ = √(ε₁² + 4ϑ̇₁²)`, `ϑ̇₂ = (2ϑ̈₁ε₁ + 2ϑ̇₁ε̇₁) / (ε₁² + 4ϑ̇₁²)`.
//!
//! `atan2` extends the mixing angle to Δ ≤ 0; for Δ > 0, Ω ≥ 0 it lies in `[0, π/4]`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::shapes::PulseShape;
use crate::{Error, Result};

/// Adiabatic margin above which the midpoint coupling is curvature controlled.
pub const CURVATURE_MARGIN: f64 = 10.0;

/// |Ω(T/2)|/|Δ| at or above which the midpoint asymptotics are flagged.
pub const SMALL_OMEGA_RATIO: f64 = 0.1;

pub fn mixing_angle(omega: f64, delta: f64) -> f64 {
    0.5 * omega.atan2(delta)
}

/// Adiabatic splitting ε₁ = ε₊ − ε₋.
pub fn splitting(omega: f64, delta: f64) -> f64 {
    omega.hypot(delta)
}

/// Eigenvalues (ε₋, ε₊) = ∓½√(Ω² + Δ²) of the RWA Hamiltonian.
pub fn eigenvalues(omega: f64, delta: f64) -> (f64, f64) {
    let half = 0.5 * splitting(omega, delta);
    (-half, half)
}

/// ϑ̇₁; zero at the singular point Ω = Δ = 0.
pub fn nonadiabatic_coupling(omega: f64, omega_dot: f64, delta: f64, delta_dot: f64) -> f64 {
    let e = omega * omega + delta * delta;
    if e == 0.0 {
        return 0.0;
    }
    (omega_dot * delta - omega * delta_dot) / (2.0 * e)
}

/// (ε₂, ϑ̇₂) from the first-order quantities and their time derivatives.
pub fn superadiabatic_quantities(
    eps1: f64,
    eps1_dot: f64,
    theta1_dot: f64,
    theta1_ddot: f64,
) -> Result<(f64, f64)> {
    let denom = eps1 * eps1 + 4.0 * theta1_dot * theta1_dot;
    if denom == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let eps2 = denom.sqrt();
    let theta2_dot = (2.0 * theta1_ddot * eps1 + 2.0 * theta1_dot * eps1_dot) / denom;
    Ok((eps2, theta2_dot))
}

/// ϑ̇₂ for constant detuning written directly in the envelope derivatives:
/// `Δ(ε₁²Ω̈ − ΩΩ̇²) / (ε₁³(ε₁² + 4ϑ̇₁²))`.
pub fn theta2_dot_chirp_free(omega: f64, omega_dot: f64, omega_ddot: f64, delta: f64) -> Result<f64> {
    let eps1 = splitting(omega, delta);
    if eps1 == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let theta1_dot = delta * omega_dot / (2.0 * eps1 * eps1);
    Ok(delta * (eps1 * eps1 * omega_ddot - omega * omega_dot * omega_dot)
        / (eps1.powi(3) * (eps1 * eps1 + 4.0 * theta1_dot * theta1_dot)))
}

/// Adiabatic margin γ₁ = ε₁/|ϑ̇₁| (infinite where the coupling vanishes).
pub fn adiabatic_margin(eps1: f64, theta1_dot: f64) -> f64 {
    if theta1_dot == 0.0 {
        f64::INFINITY
    } else {
        eps1 / theta1_dot.abs()
    }
}

/// γ₁²/(γ₁² + 4), written to stay finite for γ₁ = ∞.
pub fn suppression_factor(gamma1: f64) -> f64 {
    1.0 / (1.0 + 4.0 / (gamma1 * gamma1))
}

/// All frame quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    pub eps1: f64,
    pub theta1: f64,
    pub theta1_dot: f64,
    pub eps2: f64,
    pub theta2_dot: f64,
    pub gamma1: f64,
    /// Ω = Δ = 0: the frame is singular and the couplings are reported as 0.
    pub degenerate: bool,
}

/// Frame quantities from the drive and its first two derivatives.
pub fn frame_point(
    omega: f64,
    omega_dot: f64,
    omega_ddot: f64,
    delta: f64,
    delta_dot: f64,
    delta_ddot: f64,
) -> FramePoint {
    let eps1 = splitting(omega, delta);
    if eps1 == 0.0 {
        return FramePoint {
            eps1: 0.0,
            theta1: mixing_angle(omega, delta),
            theta1_dot: 0.0,
            eps2: 0.0,
            theta2_dot: 0.0,
            gamma1: f64::INFINITY,
            degenerate: true,
        };
    }
    let e = eps1 * eps1;
    let n = omega_dot * delta - omega * delta_dot;
    let n_dot = omega_ddot * delta - omega * delta_ddot;
    let e_dot = 2.0 * (omega * omega_dot + delta * delta_dot);
    let theta1_dot = n / (2.0 * e);
    let theta1_ddot = (n_dot * e - n * e_dot) / (2.0 * e * e);
    let eps1_dot = e_dot / (2.0 * eps1);
    let (eps2, theta2_dot) = superadiabatic_quantities(eps1, eps1_dot, theta1_dot, theta1_ddot)
        .expect("eps1 > 0 keeps the denominator positive");
    FramePoint {
        eps1,
        theta1: mixing_angle(omega, delta),
        theta1_dot,
        eps2,
        theta2_dot,
        gamma1: adiabatic_margin(eps1, theta1_dot),
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// γ₁ > [`CURVATURE_MARGIN`]: ϑ̇₂ ≈ sgn(Δ)·Ω̈/Δ².
    CurvatureControlled,
    /// The 4ϑ̇₁² term suppresses ϑ̇₂ by γ₁²/(γ₁² + 4).
    SlopeSuppressed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointAsymptotic {
    pub theta2_dot: f64,
    pub regime: Regime,
    pub gamma1: f64,
    /// |Ω(T/2)|/|Δ|.
    pub omega_ratio: f64,
    /// Set when `omega_ratio ≥ SMALL_OMEGA_RATIO`, outside the asymptotic regime.
    pub outside_validity: bool,
}

/// Small-Ω midpoint approximation
/// `ϑ̇₂ ≈ sgn(Δ)·[Ω̈ − (Ω/Δ²)Ω̇²]/Δ² · γ₁²/(γ₁² + 4)` at `t = T/2`.
pub fn midpoint_asymptotic(shape: &PulseShape, delta: f64) -> Result<MidpointAsymptotic> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::AsymptoticUndefined);
    }
    let t = 0.5 * shape.duration();
    let omega = shape.envelope(t);
    let (omega_dot, omega_ddot) = shape.derivatives(t)?;
    let d2 = delta * delta;
    let eps1 = splitting(omega, delta);
    let gamma1 = adiabatic_margin(eps1, nonadiabatic_coupling(omega, omega_dot, delta, 0.0));
    let theta2_dot = delta.signum() * (omega_ddot - omega / d2 * omega_dot * omega_dot) / d2
        * suppression_factor(gamma1);
    let omega_ratio = omega.abs() / delta.abs();
    Ok(MidpointAsymptotic {
        theta2_dot,
        regime: if gamma1 > CURVATURE_MARGIN {
            Regime::CurvatureControlled
        } else {
            Regime::SlopeSuppressed
        },
        gamma1,
        omega_ratio,
        outside_validity: omega_ratio >= SMALL_OMEGA_RATIO,
    })
}

/// Exact ϑ̇₂ at the pulse midpoint for constant detuning.
pub fn midpoint_exact(shape: &PulseShape, delta: f64) -> Result<f64> {
    let t = 0.5 * shape.duration();
    let (d1, d2) = shape.derivatives(t)?;
    let p = frame_point(shape.envelope(t), d1, d2, delta, 0.0, 0.0);
    if p.degenerate {
        return Err(Error::DegeneratePoint);
    }
    Ok(p.theta2_dot)
}

/// Frame quantities tabulated on a uniform interior grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameDiagnostics {
    pub t: Vec<f64>,
    pub omega: Vec<f64>,
    pub eps_plus: Vec<f64>,
    pub eps_minus: Vec<f64>,
    pub eps1: Vec<f64>,
    pub theta1: Vec<f64>,
    pub theta1_dot: Vec<f64>,
    pub eps2: Vec<f64>,
    pub theta2_dot: Vec<f64>,
    pub gamma1: Vec<f64>,
    /// The envelope jumps at the window edges; the edge coupling spikes are not tabulated.
    pub edge_discontinuity: bool,
    /// Grid indices where Ω = Δ = 0.
    pub degenerate: Vec<usize>,
}

impl FrameDiagnostics {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn max_abs_theta2_dot(&self) -> f64 {
        self.theta2_dot.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_theta1_dot(&self) -> f64 {
        self.theta1_dot.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Minimum grid size accepted by [`diagnose`].
pub const MIN_DIAGNOSTIC_POINTS: usize = 16;

/// Tabulates the frame quantities at `t_k = (k + ½)·T/n`, `k = 0..n`, so the
/// (possibly discontinuous) window edges are never sampled.
pub fn diagnose(shape: &PulseShape, delta: f64, n_points: usize) -> Result<FrameDiagnostics> {
    if n_points < MIN_DIAGNOSTIC_POINTS {
        return Err(Error::InvalidArgument(alloc::format!(
            "diagnostics need at least {MIN_DIAGNOSTIC_POINTS} points, got {n_points}"
        )));
    }
    let dt = shape.duration() / n_points as f64;
    let mut out = FrameDiagnostics {
        edge_discontinuity: shape.family().has_edge_jump(),
        ..Default::default()
    };
    for k in 0..n_points {
        let t = (k as f64 + 0.5) * dt;
        let omega = shape.envelope(t);
        let (d1, d2) = shape.derivatives(t)?;
        let p = frame_point(omega, d1, d2, delta, 0.0, 0.0);
        let (em, ep) = eigenvalues(omega, delta);
        if p.degenerate {
            out.degenerate.push(k);
        }
        out.t.push(t);
        out.omega.push(omega);
        out.eps_plus.push(ep);
        out.eps_minus.push(em);
        out.eps1.push(p.eps1);
        out.theta1.push(p.theta1);
        out.theta1_dot.push(p.theta1_dot);
        out.eps2.push(p.eps2);
        out.theta2_dot.push(p.theta2_dot);
        out.gamma1.push(p.gamma1);
    }
    Ok(out)
}
