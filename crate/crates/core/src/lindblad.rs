//! Open-system variant: amplitude damping (rate 1/T1) and total coherence
//! decay (rate 1/T2) on top of the driven two-level Hamiltonian.
//!
//! Each sub-interval is integrated with Strang splitting
//! `D(h/2) · U(h) · D(h/2)`, where `U` is the exact unitary of the constant
//! Hamiltonian and `D` the exact solution of the dissipator alone. Both
//! factors are completely positive, so the density matrix stays physical.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use num_complex::Complex64;

use crate::dynamics::{DriveSchedule, QubitState, StepUnitary};
use crate::units::us_to_ns;
use crate::{Error, Result};

/// Relative excess of T2 over 2·T1 accepted as calibration noise. Beyond it the
/// pair is rejected as unphysical; within it the pure-dephasing rate is clamped
/// at zero.
pub const T2_EXCESS_TOLERANCE: f64 = 0.10;

/// Starting Strang sub-steps per schedule slot.
pub const LINDBLAD_SUBSTEPS: usize = 2;

/// Populations must move less than this when the step is halved.
pub const LINDBLAD_TOLERANCE: f64 = 1e-9;

const MAX_DOUBLINGS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub rho11: f64,
    pub rho22: f64,
    pub rho12: Complex64,
}

impl DensityMatrix {
    pub fn ground() -> Self {
        DensityMatrix {
            rho11: 1.0,
            rho22: 0.0,
            rho12: Complex64::new(0.0, 0.0),
        }
    }

    pub fn excited() -> Self {
        DensityMatrix {
            rho11: 0.0,
            rho22: 1.0,
            rho12: Complex64::new(0.0, 0.0),
        }
    }

    pub fn from_pure(state: &QubitState) -> Self {
        DensityMatrix {
            rho11: state.p1(),
            rho22: state.p2(),
            rho12: state.c1 * state.c2.conj(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22
    }

    /// Checks trace, population bounds and the coherence bound |ρ₁₂|² ≤ ρ₁₁ρ₂₂.
    pub fn is_physical(&self, tol: f64) -> bool {
        (self.trace() - 1.0).abs() <= tol
            && (-tol..=1.0 + tol).contains(&self.rho11)
            && (-tol..=1.0 + tol).contains(&self.rho22)
            && self.rho12.norm_sqr() <= self.rho11 * self.rho22 + tol
    }

    fn conjugate(&self, u: &StepUnitary) -> Self {
        // U = [[a, b], [c, ā]] with c = −b̄
        let (a, b) = (u.a, u.b);
        let c = -b.conj();
        let r11 = Complex64::new(self.rho11, 0.0);
        let r22 = Complex64::new(self.rho22, 0.0);
        let r12 = self.rho12;
        let r21 = r12.conj();
        let m11 = a * r11 + b * r21;
        let m12 = a * r12 + b * r22;
        let m21 = c * r11 + a.conj() * r21;
        let m22 = c * r12 + a.conj() * r22;
        DensityMatrix {
            rho11: (m11 * a.conj() + m12 * b.conj()).re,
            rho22: (m21 * c.conj() + m22 * a).re,
            rho12: m11 * c.conj() + m12 * a,
        }
    }
}

/// Relaxation times of the qubit, in microseconds. `f64::INFINITY` switches a
/// channel off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coherence {
    pub t1_us: f64,
    pub t2_us: f64,
}

impl Coherence {
    pub fn new(t1_us: f64, t2_us: f64) -> Result<Self> {
        let c = Coherence { t1_us, t2_us };
        c.validate()?;
        Ok(c)
    }

    /// No relaxation at all.
    pub fn closed() -> Self {
        Coherence {
            t1_us: f64::INFINITY,
            t2_us: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.t1_us > 0.0
            && self.t2_us > 0.0
            && self.t2_us <= 2.0 * self.t1_us * (1.0 + T2_EXCESS_TOLERANCE);
        if ok {
            Ok(())
        } else {
            Err(Error::Unphysical {
                t1_us: self.t1_us,
                t2_us: self.t2_us,
            })
        }
    }

    /// Amplitude-damping rate 1/T1 in 1/ns.
    pub fn decay_rate(&self) -> f64 {
        1.0 / us_to_ns(self.t1_us)
    }

    /// Pure-dephasing rate 1/T2 − 1/(2T1) in 1/ns, clamped at zero.
    pub fn dephasing_rate(&self) -> f64 {
        (1.0 / us_to_ns(self.t2_us) - 0.5 * self.decay_rate()).max(0.0)
    }

    /// Total coherence decay rate in 1/ns.
    pub fn coherence_rate(&self) -> f64 {
        0.5 * self.decay_rate() + self.dephasing_rate()
    }
}

fn dissipate(rho: &mut DensityMatrix, decay: f64, coherence: f64) {
    let kept = (-decay).exp();
    let moved = rho.rho22 * (1.0 - kept);
    rho.rho22 -= moved;
    rho.rho11 += moved;
    rho.rho12 *= (-coherence).exp();
}

/// Evolves `initial` through `schedule` with relaxation times `coherence`.
/// Sub-steps per slot are doubled from [`LINDBLAD_SUBSTEPS`] until halving the
/// step moves both populations by less than [`LINDBLAD_TOLERANCE`].
pub fn propagate_lindblad(
    schedule: &DriveSchedule,
    coherence: Coherence,
    initial: DensityMatrix,
) -> Result<DensityMatrix> {
    let mut substeps = LINDBLAD_SUBSTEPS;
    let mut coarse = propagate_lindblad_with(schedule, coherence, initial, substeps)?;
    for _ in 0..MAX_DOUBLINGS {
        substeps *= 2;
        let fine = propagate_lindblad_with(schedule, coherence, initial, substeps)?;
        let change = (fine.rho11 - coarse.rho11).abs().max((fine.rho22 - coarse.rho22).abs());
        if change < LINDBLAD_TOLERANCE {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::NotConverged { substeps })
}

pub fn propagate_lindblad_with(
    schedule: &DriveSchedule,
    coherence: Coherence,
    initial: DensityMatrix,
    substeps: usize,
) -> Result<DensityMatrix> {
    coherence.validate()?;
    if substeps == 0 {
        return Err(Error::InvalidArgument("substeps must be >= 1".into()));
    }
    if !initial.is_physical(1e-9) {
        return Err(Error::InvalidArgument(format!("initial density matrix is unphysical: {initial:?}")));
    }
    let h = schedule.step() / substeps as f64;
    let half_decay = 0.5 * h * coherence.decay_rate();
    let half_coherence = 0.5 * h * coherence.coherence_rate();
    let mut rho = initial;
    for (k, (&w, &d)) in schedule.omega().iter().zip(schedule.delta()).enumerate() {
        if !w.is_finite() || !d.is_finite() {
            return Err(Error::NonFinite {
                t: (k as f64 + 0.5) * schedule.step(),
            });
        }
        let u = StepUnitary::new(w, d, h);
        for _ in 0..substeps {
            dissipate(&mut rho, half_decay, half_coherence);
            rho = rho.conjugate(&u);
            dissipate(&mut rho, half_decay, half_coherence);
        }
    }
    if !rho.is_physical(1e-9) {
        return Err(Error::NormDrift {
            drift: (rho.trace() - 1.0).abs(),
        });
    }
    Ok(rho)
}
