//! Unitary propagation of the RWA two-state Schrödinger equation
//!
//! ```text
//! i ċ₁ = −½Δ c₁ + ½Ω c₂
//! i ċ₂ =  ½Ω c₁ + ½Δ c₂
//! ```
//!
//! Analytic envelopes are integrated with the fourth-order Magnus expansion:
//! on each sub-interval the envelope is sampled at the two Gauss–Legendre
//! nodes, and the exact exponential of the resulting constant su(2) generator
//! is applied, so the norm is preserved to rounding. Pre-sampled schedules are
//! piecewise constant and each slot is applied as one exact step.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::shapes::PulseShape;
use crate::units::HARDWARE_DT_NS;
use crate::{Error, Result};

/// Sub-intervals per hardware sample slot used by [`default_substeps`].
pub const SUBSTEPS_PER_SAMPLE: usize = 4;

/// Largest tolerated departure of |c₁|² + |c₂|² from 1 before a propagation
/// is reported as an integrator failure.
pub const NORM_FAILURE: f64 = 1e-6;

/// Probability amplitudes `(c₁, c₂)` of the ground and excited states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl QubitState {
    pub const fn ground() -> Self {
        QubitState {
            c1: Complex64::new(1.0, 0.0),
            c2: Complex64::new(0.0, 0.0),
        }
    }

    pub const fn excited() -> Self {
        QubitState {
            c1: Complex64::new(0.0, 0.0),
            c2: Complex64::new(1.0, 0.0),
        }
    }

    pub fn p1(&self) -> f64 {
        self.c1.norm_sqr()
    }

    /// Excited-state population |c₂|².
    pub fn p2(&self) -> f64 {
        self.c2.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.p1() + self.p2()
    }
}

/// Time-discretised drive: `omega[k]` and `delta[k]` (rad/ns) hold on slot
/// `[k·step, (k+1)·step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSchedule {
    step: f64,
    omega: Vec<f64>,
    delta: Vec<f64>,
}

impl DriveSchedule {
    pub fn new(step: f64, omega: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidArgument(format!("schedule step must be > 0, got {step}")));
        }
        if omega.len() != delta.len() {
            return Err(Error::InvalidArgument(format!(
                "omega has {} samples but delta has {}",
                omega.len(),
                delta.len()
            )));
        }
        if let Some(k) = omega.iter().position(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "omega[{k}] = {} is negative or NaN",
                omega[k]
            )));
        }
        Ok(DriveSchedule { step, omega, delta })
    }

    /// `n` identical samples.
    pub fn constant(step: f64, n: usize, omega: f64, delta: f64) -> Result<Self> {
        Self::new(step, alloc::vec![omega; n], alloc::vec![delta; n])
    }

    /// Replaces the detuning channel with a constant value.
    pub fn with_constant_detuning(mut self, delta: f64) -> Self {
        self.delta.iter_mut().for_each(|d| *d = delta);
        self
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.step * self.len() as f64
    }

    /// Splits the schedule at sample `at`.
    pub fn split_at(&self, at: usize) -> (DriveSchedule, DriveSchedule) {
        let (wa, wb) = self.omega.split_at(at);
        let (da, db) = self.delta.split_at(at);
        (
            DriveSchedule {
                step: self.step,
                omega: wa.to_vec(),
                delta: da.to_vec(),
            },
            DriveSchedule {
                step: self.step,
                omega: wb.to_vec(),
                delta: db.to_vec(),
            },
        )
    }
}

/// SU(2) element `[[a, b], [−b̄, ā]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct StepUnitary {
    pub a: Complex64,
    pub b: Complex64,
}

impl StepUnitary {
    /// `exp(−i(nx σx + ny σy + nz σz))`.
    #[inline]
    pub fn rotation(nx: f64, ny: f64, nz: f64) -> Self {
        let angle = (nx * nx + ny * ny + nz * nz).sqrt();
        if angle == 0.0 {
            return StepUnitary {
                a: Complex64::new(1.0, 0.0),
                b: Complex64::new(0.0, 0.0),
            };
        }
        let (sin, cos) = angle.sin_cos();
        let k = sin / angle;
        StepUnitary {
            a: Complex64::new(cos, -nz * k),
            b: Complex64::new(-ny * k, -nx * k),
        }
    }

    /// Exact propagator of `H = ½[[−Δ, Ω], [Ω, Δ]]` held for time `h`.
    #[inline]
    pub fn new(omega: f64, delta: f64, h: f64) -> Self {
        Self::rotation(0.5 * h * omega, 0.0, -0.5 * h * delta)
    }

    #[inline]
    pub fn apply(&self, s: QubitState) -> QubitState {
        QubitState {
            c1: self.a * s.c1 + self.b * s.c2,
            c2: -self.b.conj() * s.c1 + self.a.conj() * s.c2,
        }
    }
}

/// Gauss–Legendre node offsets within a unit sub-interval.
const GAUSS_LO: f64 = 0.5 - 0.288_675_134_594_812_9;
const GAUSS_HI: f64 = 0.5 + 0.288_675_134_594_812_9;

/// √3/24, weight of the commutator term.
const MAGNUS_COMMUTATOR: f64 = 0.072_168_783_648_703_22;

/// Sub-interval count used when the caller has no preference:
/// [`SUBSTEPS_PER_SAMPLE`] per hardware sample slot of the pulse.
pub fn default_substeps(duration: f64) -> usize {
    let slots = (duration / HARDWARE_DT_NS).round().max(1.0) as usize;
    SUBSTEPS_PER_SAMPLE * slots
}

/// Unit envelope at the two Gauss nodes of each of `substeps` equal
/// sub-intervals, interleaved.
pub(crate) fn unit_gauss_samples(shape: &PulseShape, substeps: usize) -> Vec<f64> {
    let h = shape.duration() / substeps as f64;
    (0..substeps)
        .flat_map(|k| {
            let t0 = k as f64 * h;
            [shape.unit_envelope(t0 + GAUSS_LO * h), shape.unit_envelope(t0 + GAUSS_HI * h)]
        })
        .collect()
}

/// Evolves `state` through `unit.len() / 2` sub-intervals of length `h` with
/// drive `omega0 · unit` and constant detuning `delta`. Each sub-interval is
/// one fourth-order Magnus step; the commutator of the two node Hamiltonians
/// adds a σy component proportional to `Δ·(Ω₂ − Ω₁)`.
pub(crate) fn evolve_scaled(
    unit: &[f64],
    omega0: f64,
    delta: f64,
    h: f64,
    mut state: QubitState,
) -> Result<QubitState> {
    let nz = -0.5 * h * delta;
    let ny_scale = MAGNUS_COMMUTATOR * h * h * delta * omega0;
    for (k, pair) in unit.chunks_exact(2).enumerate() {
        let (w1, w2) = (omega0 * pair[0], omega0 * pair[1]);
        if !(w1.is_finite() && w2.is_finite() && delta.is_finite()) {
            return Err(Error::NonFinite {
                t: (k as f64 + 0.5) * h,
            });
        }
        let nx = 0.25 * h * (w1 + w2);
        let ny = ny_scale * (pair[1] - pair[0]);
        state = StepUnitary::rotation(nx, ny, nz).apply(state);
    }
    Ok(state)
}

/// Piecewise-constant drive `omega0 · unit[k]` held for `h` per slot.
pub(crate) fn evolve_piecewise(
    unit: &[f64],
    omega0: f64,
    delta: f64,
    h: f64,
    mut state: QubitState,
) -> Result<QubitState> {
    for (k, &u) in unit.iter().enumerate() {
        let w = omega0 * u;
        if !(w.is_finite() && delta.is_finite()) {
            return Err(Error::NonFinite {
                t: (k as f64 + 0.5) * h,
            });
        }
        state = StepUnitary::new(w, delta, h).apply(state);
    }
    Ok(state)
}

pub(crate) fn check_norm(state: &QubitState, reference: &QubitState) -> Result<()> {
    let drift = (state.norm_sqr() - reference.norm_sqr()).abs();
    if drift.is_nan() || drift > NORM_FAILURE {
        return Err(Error::NormDrift { drift });
    }
    Ok(())
}

/// Final state after the pulse `shape` at constant detuning `delta` (rad/ns),
/// using `substeps` equal sub-intervals over `[0, T]`.
pub fn propagate(
    shape: &PulseShape,
    delta: f64,
    initial: QubitState,
    substeps: usize,
) -> Result<QubitState> {
    if substeps == 0 {
        return Err(Error::InvalidArgument("substeps must be >= 1".into()));
    }
    let unit = unit_gauss_samples(shape, substeps);
    let h = shape.duration() / substeps as f64;
    let out = evolve_scaled(&unit, shape.omega0(), delta, h, initial)?;
    check_norm(&out, &initial)?;
    Ok(out)
}

/// [`propagate`] with sub-interval doubling until successive excited-state
/// populations agree within `tol`. Starts from [`default_substeps`] and stops
/// after `max_doublings`; returns the finer result and its sub-interval count.
pub fn propagate_refined(
    shape: &PulseShape,
    delta: f64,
    initial: QubitState,
    tol: f64,
    max_doublings: u32,
) -> Result<(QubitState, usize)> {
    let mut n = default_substeps(shape.duration());
    let mut coarse = propagate(shape, delta, initial, n)?;
    for _ in 0..max_doublings {
        let fine = propagate(shape, delta, initial, 2 * n)?;
        n *= 2;
        if (fine.p2() - coarse.p2()).abs() < tol {
            return Ok((fine, n));
        }
        coarse = fine;
    }
    Ok((coarse, n))
}

/// One trajectory point: time at the end of a sample slot and the state there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: QubitState,
}

/// Propagates through a pre-sampled schedule; each slot is applied as one
/// exact constant-Hamiltonian step.
pub fn propagate_schedule(schedule: &DriveSchedule, initial: QubitState) -> Result<QubitState> {
    let mut state = initial;
    for (k, (&w, &d)) in schedule.omega.iter().zip(&schedule.delta).enumerate() {
        if !w.is_finite() || !d.is_finite() {
            return Err(Error::NonFinite {
                t: (k as f64 + 0.5) * schedule.step,
            });
        }
        state = StepUnitary::new(w, d, schedule.step).apply(state);
    }
    check_norm(&state, &initial)?;
    Ok(state)
}

/// [`propagate_schedule`] recording the state after every slot.
pub fn propagate_schedule_trajectory(
    schedule: &DriveSchedule,
    initial: QubitState,
) -> Result<Vec<TrajectoryPoint>> {
    let mut state = initial;
    let mut out = Vec::with_capacity(schedule.len() + 1);
    out.push(TrajectoryPoint { t: 0.0, state });
    for (k, (&w, &d)) in schedule.omega.iter().zip(&schedule.delta).enumerate() {
        let t = (k as f64 + 1.0) * schedule.step;
        if !w.is_finite() || !d.is_finite() {
            return Err(Error::NonFinite { t });
        }
        state = StepUnitary::new(w, d, schedule.step).apply(state);
        out.push(TrajectoryPoint { t, state });
    }
    check_norm(&state, &initial)?;
    Ok(out)
}

/// Rabi formula for a rectangular pulse of amplitude `omega0` and length `duration`:
/// `P₂ = Ω₀²/(Ω₀² + Δ²) · sin²(√(Ω₀² + Δ²)·T/2)`.
pub fn rabi_closed_form(omega0: f64, delta: f64, duration: f64) -> f64 {
    let eps2 = omega0 * omega0 + delta * delta;
    if eps2 == 0.0 {
        return 0.0;
    }
    let s = (0.5 * eps2.sqrt() * duration).sin();
    omega0 * omega0 / eps2 * s * s
}

/// Rosen–Zener transition probability for the untruncated `Ω₀ sech(t/τ)`:
/// `P₂ = sin²(πΩ₀τ/2) · sech²(πΔτ/2)`.
pub fn rosen_zener_closed_form(omega0: f64, tau: f64, delta: f64) -> f64 {
    use core::f64::consts::PI;
    let s = (0.5 * PI * omega0 * tau).sin();
    let sech = 1.0 / (0.5 * PI * delta * tau).cosh();
    s * s * sech * sech
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::Family;
    use crate::units::{mhz_to_rad_per_ns, QUADRATIC_DURATION_NS};
    use core::f64::consts::PI;

    const T: f64 = 177.8;

    #[test]
    fn resonant_pi_pulse_inverts() {
        let shape = PulseShape::rectangular(PI / T, T).unwrap();
        let out = propagate(&shape, 0.0, QubitState::ground(), 64).unwrap();
        assert!((out.p2() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detuned_rectangle_matches_rabi() {
        let omega0 = PI / T;
        let shape = PulseShape::rectangular(omega0, T).unwrap();
        let out = propagate(&shape, omega0, QubitState::ground(), 800).unwrap();
        // ½ sin²(√2 π/2)
        let expected = 0.5 * (2f64.sqrt() * PI / 2.0).sin().powi(2);
        assert!((expected - 0.3165).abs() < 1e-4);
        assert!((out.p2() - expected).abs() < 1e-12);
        assert!((rabi_closed_form(omega0, omega0, T) - expected).abs() < 1e-15);
    }

    #[test]
    fn rabi_closed_form_edge_cases() {
        assert!((rabi_closed_form(PI / T, 0.0, T) - 1.0).abs() < 1e-15);
        assert_eq!(rabi_closed_form(0.0, 0.3, T), 0.0);
        assert_eq!(rabi_closed_form(0.0, 0.0, T), 0.0);
    }

    #[test]
    fn rosen_zener_edge_cases() {
        assert!((rosen_zener_closed_form(1.0 / 7.0, 7.0, 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(rosen_zener_closed_form(0.0, 7.0, 0.2), 0.0);
    }

    #[test]
    fn zero_substeps_rejected() {
        let shape = PulseShape::rectangular(0.1, T).unwrap();
        assert!(propagate(&shape, 0.0, QubitState::ground(), 0).is_err());
    }

    #[test]
    fn zero_drive_only_rotates_phase() {
        let sched = DriveSchedule::constant(1.0, 50, 0.0, 0.37).unwrap();
        let start = QubitState {
            c1: Complex64::new(0.6, 0.0),
            c2: Complex64::new(0.0, 0.8),
        };
        let out = propagate_schedule(&sched, start).unwrap();
        assert!((out.p2() - 0.64).abs() < 1e-14);
        assert!((out.c2 - start.c2).norm() > 1e-3, "phase should have moved");
    }

    #[test]
    fn constant_schedule_equals_rectangle() {
        let omega0 = mhz_to_rad_per_ns(5.0);
        let delta = mhz_to_rad_per_ns(-3.0);
        let shape = PulseShape::rectangular(omega0, QUADRATIC_DURATION_NS).unwrap();
        let sched = shape.sample(HARDWARE_DT_NS).unwrap().with_constant_detuning(delta);
        assert_eq!(sched.len(), 800);
        let a = propagate_schedule(&sched, QubitState::ground()).unwrap();
        let b = propagate(&shape, delta, QubitState::ground(), default_substeps(shape.duration())).unwrap();
        assert!((a.p2() - b.p2()).abs() < 1e-8);
    }

    #[test]
    fn halves_compose() {
        let shape = PulseShape::power_law(3, mhz_to_rad_per_ns(20.0), 355.6).unwrap();
        let sched = shape
            .sample(HARDWARE_DT_NS)
            .unwrap()
            .with_constant_detuning(mhz_to_rad_per_ns(4.0));
        let whole = propagate_schedule(&sched, QubitState::ground()).unwrap();
        let (first, second) = sched.split_at(sched.len() / 2);
        let mid = propagate_schedule(&first, QubitState::ground()).unwrap();
        let joined = propagate_schedule(&second, mid).unwrap();
        assert!((whole.c1 - joined.c1).norm() < 1e-10);
        assert!((whole.c2 - joined.c2).norm() < 1e-10);
    }

    #[test]
    fn trajectory_ends_at_final_state() {
        let shape = PulseShape::quadratic(0.5, 0.05, 20.0).unwrap();
        let sched = shape.sample(0.5).unwrap().with_constant_detuning(0.02);
        let traj = propagate_schedule_trajectory(&sched, QubitState::ground()).unwrap();
        assert_eq!(traj.len(), sched.len() + 1);
        let fin = propagate_schedule(&sched, QubitState::ground()).unwrap();
        assert_eq!(traj.last().unwrap().state, fin);
        assert!((traj.last().unwrap().t - 20.0).abs() < 1e-12);
    }

    #[test]
    fn schedule_validation() {
        assert!(DriveSchedule::new(0.0, alloc::vec![1.0], alloc::vec![0.0]).is_err());
        assert!(DriveSchedule::new(1.0, alloc::vec![1.0], alloc::vec![]).is_err());
        assert!(DriveSchedule::new(1.0, alloc::vec![-1.0], alloc::vec![0.0]).is_err());
    }

    #[test]
    fn non_finite_drive_is_reported() {
        let sched = DriveSchedule::new(1.0, alloc::vec![0.1, f64::INFINITY], alloc::vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            propagate_schedule(&sched, QubitState::ground()),
            Err(Error::NonFinite { .. })
        ));
        let shape = PulseShape::rectangular(0.1, 10.0).unwrap();
        assert!(matches!(
            propagate(&shape, f64::NAN, QubitState::ground(), 10),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn magnus_step_is_fourth_order() {
        let shape = PulseShape::power_law(2, mhz_to_rad_per_ns(20.0), 200.0).unwrap();
        let delta = mhz_to_rad_per_ns(12.0);
        let p = |n| propagate(&shape, delta, QubitState::ground(), n).unwrap().p2();
        let (a, b, c) = (p(100), p(200), p(400));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn general_rotation_is_unitary() {
        let u = StepUnitary::rotation(0.3, -0.7, 1.1);
        assert!((u.a.norm_sqr() + u.b.norm_sqr() - 1.0).abs() < 1e-15);
        let s = u.apply(QubitState {
            c1: Complex64::new(0.6, 0.0),
            c2: Complex64::new(0.0, 0.8),
        });
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn refinement_converges() {
        let shape = PulseShape::new(Family::Quadratic { beta: 1.0 }, mhz_to_rad_per_ns(25.0), T).unwrap();
        let delta = mhz_to_rad_per_ns(30.0);
        let (state, n) = propagate_refined(&shape, delta, QubitState::ground(), 1e-11, 8).unwrap();
        let finer = propagate(&shape, delta, QubitState::ground(), 2 * n).unwrap();
        assert!((state.p2() - finer.p2()).abs() < 1e-11);
    }
}
