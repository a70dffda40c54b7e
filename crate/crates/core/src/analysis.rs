//! Linewidths, broadening ratios and fringe detection on detuning slices.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::landscape::Slice;
use crate::{Error, Result};

/// Visibility threshold, as a fraction of the slice maximum, that defines the
/// operational linewidth. A line is counted wherever the excitation stays
/// clearly visible on a landscape plot, which is well below half maximum.
pub const DEFAULT_THRESHOLD: f64 = 0.15;

/// Full width at half maximum.
pub const HALF_MAXIMUM: f64 = 0.5;

/// A minimum is a dark fringe when it falls below this fraction of the mean of
/// its two flanking maxima.
pub const FRINGE_CONTRAST: f64 = 0.5;

/// Coarsest detuning step, in MHz, on which fringes are resolved.
pub const MAX_FRINGE_STEP_MHZ: f64 = 0.5;

/// Slices whose maximum is at or below this are treated as showing no line.
const NO_LINE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LineStatus {
    Resolved,
    /// The slice is flat zero.
    NoLine,
    /// The line reaches the edge of the detuning range, so the width is a lower bound.
    Clipped,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinewidthReport {
    pub shape_id: String,
    /// Pulse area, rad.
    pub area: f64,
    pub amplitude_mhz: f64,
    /// Relative threshold used for the edges.
    pub threshold: f64,
    pub peak: f64,
    pub left_edge_mhz: f64,
    pub right_edge_mhz: f64,
    pub width_mhz: f64,
    /// Visible maxima between the edges.
    pub n_fringes: usize,
    /// Spacings between adjacent dark fringes, MHz; empty on coarse slices.
    pub fringe_spacings: Vec<f64>,
    pub status: LineStatus,
}

impl LinewidthReport {
    pub fn is_clipped(&self) -> bool {
        self.status == LineStatus::Clipped
    }
}

fn check_profile(detunings: &[f64], profile: &[f64]) -> Result<()> {
    if detunings.len() != profile.len() || detunings.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "slice needs matching axes with >= 3 points, got {} and {}",
            detunings.len(),
            profile.len()
        )));
    }
    if !detunings.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument("detunings must be strictly increasing".into()));
    }
    if profile.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("profile contains non-finite values".into()));
    }
    Ok(())
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("threshold {threshold} outside (0, 1)")))
    }
}

fn crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// Edges and width of `slice` at `threshold` times its maximum.
pub fn operational_linewidth(slice: &Slice, threshold: f64) -> Result<LinewidthReport> {
    let (x, y) = (&slice.detunings[..], &slice.p2[..]);
    check_profile(x, y)?;
    check_threshold(threshold)?;
    let peak = y.iter().copied().fold(0.0, f64::max);
    let mut report = LinewidthReport {
        shape_id: slice.shape_id.clone(),
        area: slice.area,
        amplitude_mhz: slice.amplitude_mhz,
        threshold,
        peak,
        left_edge_mhz: 0.0,
        right_edge_mhz: 0.0,
        width_mhz: 0.0,
        n_fringes: 0,
        fringe_spacings: Vec::new(),
        status: LineStatus::NoLine,
    };
    if peak <= NO_LINE_FLOOR {
        return Ok(report);
    }
    let level = threshold * peak;
    let n = y.len();
    // the slice has a point at or above the level, so both searches succeed
    let first = y.iter().position(|&v| v >= level).unwrap_or(0);
    let last = y.iter().rposition(|&v| v >= level).unwrap_or(n - 1);
    let mut clipped = false;
    report.left_edge_mhz = if first == 0 {
        clipped = true;
        x[0]
    } else {
        crossing(x[first - 1], y[first - 1], x[first], y[first], level)
    };
    report.right_edge_mhz = if last == n - 1 {
        clipped = true;
        x[n - 1]
    } else {
        crossing(x[last], y[last], x[last + 1], y[last + 1], level)
    };
    report.width_mhz = report.right_edge_mhz - report.left_edge_mhz;
    report.status = if clipped { LineStatus::Clipped } else { LineStatus::Resolved };
    report.n_fringes = count_maxima(x, y, level, report.left_edge_mhz, report.right_edge_mhz);
    if let Ok(f) = detect_fringes(slice) {
        report.fringe_spacings = f.spacings();
    }
    Ok(report)
}

/// Width at [`DEFAULT_THRESHOLD`].
pub fn linewidth(slice: &Slice) -> Result<LinewidthReport> {
    operational_linewidth(slice, DEFAULT_THRESHOLD)
}

fn count_maxima(x: &[f64], y: &[f64], level: f64, lo: f64, hi: f64) -> usize {
    let mut count = 0;
    let mut i = 1;
    while i + 1 < y.len() {
        if y[i] > y[i - 1] {
            // walk across a plateau before deciding
            let mut k = i;
            while k + 1 < y.len() && y[k + 1] == y[i] {
                k += 1;
            }
            if k + 1 < y.len() && y[k + 1] < y[i] && y[i] >= level && x[i] >= lo && x[k] <= hi {
                count += 1;
            }
            i = k + 1;
        } else {
            i += 1;
        }
    }
    count
}

/// Number of interior local maxima of `slice` rising to at least `threshold`
/// times its maximum.
pub fn count_visible_fringes(slice: &Slice, threshold: f64) -> Result<usize> {
    check_profile(&slice.detunings, &slice.p2)?;
    check_threshold(threshold)?;
    let peak = slice.p2.iter().copied().fold(0.0, f64::max);
    if peak <= NO_LINE_FLOOR {
        return Ok(0);
    }
    Ok(count_maxima(
        &slice.detunings,
        &slice.p2,
        threshold * peak,
        f64::NEG_INFINITY,
        f64::INFINITY,
    ))
}

/// Dark-fringe positions of a slice, MHz, refined by a parabola through the
/// three samples around each discrete minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Fringes {
    pub minima: Vec<f64>,
}

impl Fringes {
    pub fn spacings(&self) -> Vec<f64> {
        self.minima.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn mean_spacing(&self) -> Option<f64> {
        let s = self.spacings();
        (!s.is_empty()).then(|| s.iter().sum::<f64>() / s.len() as f64)
    }
}

pub fn detect_fringes(slice: &Slice) -> Result<Fringes> {
    let (x, y) = (&slice.detunings[..], &slice.p2[..]);
    check_profile(x, y)?;
    let step = x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if step > MAX_FRINGE_STEP_MHZ * (1.0 + 1e-9) {
        return Err(Error::CoarseSlice {
            step,
            limit: MAX_FRINGE_STEP_MHZ,
        });
    }
    let n = y.len();
    let candidates: Vec<usize> = (1..n - 1).filter(|&i| y[i] < y[i - 1] && y[i] <= y[i + 1]).collect();
    let mut minima = Vec::new();
    for (c, &i) in candidates.iter().enumerate() {
        let lo = if c == 0 { 0 } else { candidates[c - 1] };
        let hi = candidates.get(c + 1).copied().unwrap_or(n - 1);
        let left_max = y[lo..=i].iter().copied().fold(0.0, f64::max);
        let right_max = y[i..=hi].iter().copied().fold(0.0, f64::max);
        if y[i] >= FRINGE_CONTRAST * 0.5 * (left_max + right_max) {
            continue;
        }
        let curvature = y[i + 1] - 2.0 * y[i] + y[i - 1];
        let h = 0.5 * (x[i + 1] - x[i - 1]);
        let shift = if curvature > 0.0 {
            (0.5 * h * (y[i - 1] - y[i + 1]) / curvature).clamp(-0.5 * h, 0.5 * h)
        } else {
            0.0
        };
        minima.push(x[i] + shift);
    }
    Ok(Fringes { minima })
}

/// Whether a broadening ratio is exact or bounded by clipping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RatioBound {
    Exact,
    /// The numerator was clipped.
    LowerBound,
    /// The denominator was clipped.
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BroadeningRatio {
    pub value: f64,
    pub bound: RatioBound,
}

/// Width of `numerator` over width of `denominator`; both must be at the same area.
pub fn broadening_factor(numerator: &LinewidthReport, denominator: &LinewidthReport) -> Result<BroadeningRatio> {
    let scale = numerator.area.abs().max(denominator.area.abs()).max(1.0);
    if (numerator.area - denominator.area).abs() > 1e-9 * scale {
        return Err(Error::UndefinedRatio("reports are at different pulse areas"));
    }
    if denominator.width_mhz <= 0.0 {
        return Err(Error::UndefinedRatio("reference width is zero"));
    }
    let bound = match (numerator.is_clipped(), denominator.is_clipped()) {
        (true, true) => return Err(Error::UndefinedRatio("both widths are clipped")),
        (true, false) => RatioBound::LowerBound,
        (false, true) => RatioBound::UpperBound,
        (false, false) => RatioBound::Exact,
    };
    Ok(BroadeningRatio {
        value: numerator.width_mhz / denominator.width_mhz,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{rabi_closed_form, rosen_zener_closed_form};
    use crate::units::mhz_to_rad_per_ns;
    use alloc::vec;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn slice_from(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Slice {
        let detunings: Vec<f64> = (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect();
        let p2 = detunings.iter().map(|&d| f(d)).collect();
        Slice {
            shape_id: "test".into(),
            area: PI,
            amplitude_mhz: 1.0,
            detunings,
            p2,
        }
    }

    #[test]
    fn triangle_width_is_exact() {
        let s = slice_from(|d| (1.0 - d.abs() / 10.0).max(0.0), -20.0, 20.0, 81);
        let r = operational_linewidth(&s, 0.5).unwrap();
        assert!((r.width_mhz - 10.0).abs() < 1e-12);
        assert_eq!(r.status, LineStatus::Resolved);
        assert_eq!(r.n_fringes, 1);
        let r = operational_linewidth(&s, 0.2).unwrap();
        assert!((r.width_mhz - 16.0).abs() < 1e-12);
    }

    #[test]
    fn steep_rectangle_width() {
        // unit plateau on |Δ| ≤ 5 with one-sample ramps: half-max edges at ±5.05
        let s = slice_from(|d| ((5.1 - d.abs()) / 0.1).clamp(0.0, 1.0), -10.0, 10.0, 201);
        let r = operational_linewidth(&s, 0.5).unwrap();
        assert!((r.width_mhz - 10.1).abs() < 1e-9, "{}", r.width_mhz);
    }

    #[test]
    fn symmetric_slices_have_symmetric_edges_and_stable_width() {
        let t = 150.0;
        let w = 3.0 * PI / t;
        let coarse = slice_from(|d| rabi_closed_form(w, mhz_to_rad_per_ns(d), t), -40.0, 40.0, 161);
        let fine = slice_from(|d| rabi_closed_form(w, mhz_to_rad_per_ns(d), t), -40.0, 40.0, 321);
        let step = 0.5;
        for thr in [0.15, 0.5] {
            let a = operational_linewidth(&coarse, thr).unwrap();
            assert!((a.left_edge_mhz + a.right_edge_mhz).abs() < step);
            let b = operational_linewidth(&fine, thr).unwrap();
            assert!((a.width_mhz - b.width_mhz).abs() < step);
        }
    }

    #[test]
    fn single_peak_counts_once() {
        let t = 100.0;
        let s = slice_from(|d| rabi_closed_form(0.2 * PI / t, mhz_to_rad_per_ns(d), t), -5.0, 5.0, 101);
        assert_eq!(count_visible_fringes(&s, 0.5).unwrap(), 1);
        let monotone = slice_from(|d| d + 10.0, -5.0, 5.0, 101);
        assert!(detect_fringes(&monotone).unwrap().minima.is_empty());
    }

    #[test]
    fn flat_zero_has_no_line() {
        let s = slice_from(|_| 0.0, -5.0, 5.0, 11);
        let r = operational_linewidth(&s, 0.5).unwrap();
        assert_eq!(r.status, LineStatus::NoLine);
        assert_eq!(r.width_mhz, 0.0);
        assert_eq!(count_visible_fringes(&s, 0.1).unwrap(), 0);
    }

    #[test]
    fn wide_line_is_clipped() {
        let s = slice_from(|d| 1.0 - d.abs() / 100.0, -5.0, 5.0, 11);
        let r = operational_linewidth(&s, 0.5).unwrap();
        assert!(r.is_clipped());
        assert_eq!(r.width_mhz, 10.0);
    }

    #[test]
    fn rectangular_pi_pulse_fwhm() {
        // sinc² line of a rectangular π pulse, T = 100 ns: FWHM ≈ 7.99 MHz
        let t = 100.0;
        let w = PI / t;
        let s = slice_from(|d| rabi_closed_form(w, mhz_to_rad_per_ns(d), t), -40.0, 40.0, 8001);
        let r = operational_linewidth(&s, HALF_MAXIMUM).unwrap();
        let expected = 7.98685;
        assert!((r.width_mhz - expected).abs() < 0.01, "{} vs {expected}", r.width_mhz);
    }

    #[test]
    fn sech_fwhm_matches_closed_form() {
        let tau = 20.0;
        let w = 1.0 / tau; // area π
        let s = slice_from(|d| rosen_zener_closed_form(w, tau, mhz_to_rad_per_ns(d)), -40.0, 40.0, 16001);
        let r = operational_linewidth(&s, HALF_MAXIMUM).unwrap();
        // sech²(πΔτ/2) = 1/2 → Δ = 2 acosh(√2)/(πτ)
        let half = 2.0 * (2.0f64).sqrt().acosh() / (PI * tau);
        let expected = 2.0 * half * 1e3 / (2.0 * PI);
        assert!((r.width_mhz - expected).abs() / expected < 1e-3);
    }

    #[test]
    fn fringes_of_sinc_squared() {
        // zeros of the rectangular π-pulse line sit at Δ = ±(Ω₀)√(4k² − 1)
        let t = 100.0;
        let w = PI / t;
        let s = slice_from(|d| rabi_closed_form(w, mhz_to_rad_per_ns(d), t), -40.0, 40.0, 801);
        let f = detect_fringes(&s).unwrap();
        let omega_mhz = w * 1e3 / (2.0 * PI);
        let zero1 = omega_mhz * 3.0f64.sqrt();
        let zero2 = omega_mhz * 15.0f64.sqrt();
        assert!(f.minima.iter().any(|m| (m - zero1).abs() < 0.05), "{:?}", f.minima);
        assert!(f.minima.iter().any(|m| (m - zero2).abs() < 0.05));
        assert!(f.minima.iter().any(|m| (m + zero1).abs() < 0.05));
        let coarse = slice_from(|d| d.abs(), -40.0, 40.0, 81);
        assert!(matches!(detect_fringes(&coarse), Err(Error::CoarseSlice { .. })));
    }

    #[test]
    fn ratio_bounds() {
        let mk = |width: f64, status: LineStatus, area: f64| LinewidthReport {
            shape_id: String::new(),
            area,
            amplitude_mhz: 1.0,
            threshold: 0.5,
            peak: 1.0,
            left_edge_mhz: -width / 2.0,
            right_edge_mhz: width / 2.0,
            width_mhz: width,
            n_fringes: 1,
            fringe_spacings: vec![],
            status,
        };
        let a = mk(6.0, LineStatus::Resolved, PI);
        let b = mk(2.0, LineStatus::Resolved, PI);
        let r = broadening_factor(&a, &b).unwrap();
        assert_eq!((r.value, r.bound), (3.0, RatioBound::Exact));
        let r = broadening_factor(&mk(6.0, LineStatus::Clipped, PI), &b).unwrap();
        assert_eq!(r.bound, RatioBound::LowerBound);
        let r = broadening_factor(&a, &mk(2.0, LineStatus::Clipped, PI)).unwrap();
        assert_eq!(r.bound, RatioBound::UpperBound);
        assert!(broadening_factor(&mk(6.0, LineStatus::Clipped, PI), &mk(2.0, LineStatus::Clipped, PI)).is_err());
        assert!(broadening_factor(&a, &mk(0.0, LineStatus::NoLine, PI)).is_err());
        assert!(broadening_factor(&a, &mk(2.0, LineStatus::Resolved, 3.0 * PI)).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let mut s = slice_from(|d| d.abs(), -1.0, 1.0, 5);
        assert!(operational_linewidth(&s, 0.0).is_err());
        assert!(operational_linewidth(&s, 1.0).is_err());
        s.p2.pop();
        assert!(operational_linewidth(&s, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn width_nonnegative_and_monotone_in_threshold(
            centre in -5.0f64..5.0,
            sigma in 0.5f64..8.0,
            t1 in 0.05f64..0.95,
            t2 in 0.05f64..0.95,
        ) {
            let s = slice_from(|d| (-(d - centre).powi(2) / (2.0 * sigma * sigma)).exp(), -30.0, 30.0, 601);
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            let a = operational_linewidth(&s, lo).unwrap();
            let b = operational_linewidth(&s, hi).unwrap();
            prop_assert!(b.width_mhz >= 0.0);
            prop_assert!(a.width_mhz >= b.width_mhz - 1e-12);
        }
    }
}
