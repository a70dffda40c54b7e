//! Linewidth reports and broadening-factor tables.

use std::fmt::Write as _;

use serde::Serialize;
use superbroad_core::analysis::{broadening_factor, operational_linewidth, LineStatus, LinewidthReport, RatioBound};
use superbroad_core::landscape::{slice_at_area, Slice};
use superbroad_core::shapes::{Family, PulseShape};

use crate::exit::LabError;
use crate::shape_spec::area_label;

/// Detuning sampling of a fixed-area slice, MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceWindow {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

pub const DEFAULT_SLICE_STEP_MHZ: f64 = 0.05;

impl SliceWindow {
    /// The landscape range of the family: ±35 MHz for power laws, ±60 MHz otherwise.
    pub fn for_family(family: &Family) -> Self {
        let half = match family {
            Family::PowerLaw { .. } => 35.0,
            _ => 60.0,
        };
        SliceWindow {
            lo: -half,
            hi: half,
            step: DEFAULT_SLICE_STEP_MHZ,
        }
    }

    pub fn detunings(&self) -> Result<Vec<f64>, LabError> {
        if !(self.lo < self.hi && self.step > 0.0 && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(LabError::Usage(format!(
                "bad detuning window [{}, {}] step {}",
                self.lo, self.hi, self.step
            )));
        }
        let n = ((self.hi - self.lo) / self.step).round() as usize;
        Ok((0..=n).map(|j| self.lo + (self.hi - self.lo) * j as f64 / n as f64).collect())
    }
}

pub fn slice(template: &PulseShape, area: f64, window: SliceWindow) -> Result<Slice, LabError> {
    Ok(slice_at_area(template, area, &window.detunings()?)?)
}

pub fn linewidth(template: &PulseShape, area: f64, threshold: f64, window: SliceWindow) -> Result<LinewidthReport, LabError> {
    Ok(operational_linewidth(&slice(template, area, window)?, threshold)?)
}

fn status_word(s: LineStatus) -> &'static str {
    match s {
        LineStatus::Resolved => "resolved",
        LineStatus::NoLine => "no line",
        LineStatus::Clipped => "clipped (lower bound)",
    }
}

pub fn linewidth_table(r: &LinewidthReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "shape          {}", r.shape_id);
    let _ = writeln!(s, "area           {}", area_label(r.area));
    let _ = writeln!(s, "amplitude      {:.4} MHz", r.amplitude_mhz);
    let _ = writeln!(s, "threshold      {} of max (max P2 = {:.4})", r.threshold, r.peak);
    let _ = writeln!(s, "edges          {:.3} .. {:.3} MHz", r.left_edge_mhz, r.right_edge_mhz);
    let _ = writeln!(s, "width          {:.3} MHz", r.width_mhz);
    let _ = writeln!(s, "fringes        {}", r.n_fringes);
    let _ = writeln!(s, "status         {}", status_word(r.status));
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub shape_id: String,
    pub width_mhz: f64,
    pub status: LineStatus,
    pub n_fringes: usize,
    pub ratio: Option<f64>,
    pub bound: Option<RatioBound>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareTable {
    pub area: f64,
    pub threshold: f64,
    pub baseline: String,
    pub rows: Vec<CompareRow>,
}

impl CompareTable {
    pub fn any_bound(&self) -> bool {
        self.rows
            .iter()
            .any(|r| r.status == LineStatus::Clipped || matches!(r.bound, Some(b) if b != RatioBound::Exact))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "area {} | threshold {} of max | baseline {}",
            area_label(self.area),
            self.threshold,
            self.baseline
        );
        let _ = writeln!(s, "{:<24} {:>11} {:>8} {:>10}  note", "shape", "width MHz", "fringes", "ratio");
        for r in &self.rows {
            let ratio = match (r.ratio, r.bound) {
                (Some(v), Some(RatioBound::LowerBound)) => format!(">={v:.3}"),
                (Some(v), Some(RatioBound::UpperBound)) => format!("<={v:.3}"),
                (Some(v), _) => format!("{v:.3}"),
                (None, _) => "-".into(),
            };
            let _ = writeln!(
                s,
                "{:<24} {:>11.3} {:>8} {:>10}  {}",
                r.shape_id,
                r.width_mhz,
                r.n_fringes,
                ratio,
                status_word(r.status)
            );
        }
        s
    }
}

/// Widths of every member of `families` at `area`, each divided by the width of `baseline`.
pub fn compare(
    families: &[Family],
    baseline: &Family,
    duration: f64,
    area: f64,
    threshold: f64,
    window: SliceWindow,
) -> Result<CompareTable, LabError> {
    let base_shape = PulseShape::new(baseline.clone(), 0.0, duration)?;
    let base = linewidth(&base_shape, area, threshold, window)?;
    let rows = families
        .iter()
        .map(|f| {
            let shape = PulseShape::new(f.clone(), 0.0, duration)?;
            let r = if f == baseline {
                base.clone()
            } else {
                linewidth(&shape, area, threshold, window)?
            };
            let ratio = broadening_factor(&r, &base).ok();
            Ok(CompareRow {
                shape_id: r.shape_id.clone(),
                width_mhz: r.width_mhz,
                status: r.status,
                n_fringes: r.n_fringes,
                ratio: ratio.map(|x| x.value),
                bound: ratio.map(|x| x.bound),
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    Ok(CompareTable {
        area,
        threshold,
        baseline: base.shape_id,
        rows,
    })
}
