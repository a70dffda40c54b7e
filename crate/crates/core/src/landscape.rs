//! Excitation landscapes P₂(Δ, Ω₀) and fixed-area slices.
//!
//! A [`LandscapeSpec`] owns the pulse template and both axes; every cell is an
//! independent propagation from the ground state, so drivers can evaluate the
//! cells in any order (or in parallel) and gather them by index. The result
//! depends only on the cell coordinates, never on evaluation order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dynamics::{
    check_norm, default_substeps, evolve_piecewise, evolve_scaled, unit_gauss_samples, QubitState,
};
use crate::shapes::{amplitude_for_area, PulseShape};
use crate::units::{
    mhz_to_rad_per_ns, rad_per_ns_to_mhz, POWER_LAW_DURATION_NS, QUADRATIC_DURATION_NS,
};
use crate::{Error, Result};

/// Inclusive, uniformly spaced axis in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("axis needs at least 2 points, got {n}")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("axis range [{lo}, {hi}] must be finite and increasing")));
        }
        Ok(Axis { lo, hi, n })
    }

    /// `lo + span·j/(n − 1)`. The product is formed before the division so a
    /// refined axis reproduces the coarse coordinates bit for bit.
    pub fn value(&self, j: usize) -> f64 {
        self.lo + (self.hi - self.lo) * j as f64 / (self.n - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.value(j)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// Same range with every interval halved.
    pub fn refined(&self) -> Axis {
        Axis {
            n: 2 * self.n - 1,
            ..*self
        }
    }
}

/// How each cell is propagated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    /// Continuous envelope, fourth-order Magnus steps on `substeps` equal sub-intervals.
    Magnus { substeps: usize },
    /// Envelope sampled at slot midpoints of a device clock and held constant per slot.
    Clock { step: f64 },
}

/// Everything needed to compute a landscape.
#[derive(Debug, Clone)]
pub struct LandscapeSpec {
    template: PulseShape,
    detunings: Axis,
    amplitudes: Axis,
    integrator: Integrator,
    unit: Vec<f64>,
}

impl LandscapeSpec {
    /// `template` fixes family and duration; its Ω₀ is ignored. Amplitudes are
    /// Ω₀/2π and detunings Δ/2π, both in MHz.
    pub fn new(template: PulseShape, detunings: Axis, amplitudes: Axis) -> Result<Self> {
        let substeps = default_substeps(template.duration());
        Self::with_substeps(template, detunings, amplitudes, substeps)
    }

    pub fn with_substeps(
        template: PulseShape,
        detunings: Axis,
        amplitudes: Axis,
        substeps: usize,
    ) -> Result<Self> {
        Self::with_integrator(template, detunings, amplitudes, Integrator::Magnus { substeps })
    }

    pub fn with_integrator(
        template: PulseShape,
        detunings: Axis,
        amplitudes: Axis,
        integrator: Integrator,
    ) -> Result<Self> {
        if amplitudes.lo < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "amplitude axis must be non-negative, starts at {}",
                amplitudes.lo
            )));
        }
        let unit = match integrator {
            Integrator::Magnus { substeps } => {
                if substeps == 0 {
                    return Err(Error::InvalidArgument("substeps must be >= 1".into()));
                }
                unit_gauss_samples(&template, substeps)
            }
            Integrator::Clock { step } => template.with_amplitude(1.0)?.sample(step)?.omega().to_vec(),
        };
        Ok(LandscapeSpec {
            template,
            detunings,
            amplitudes,
            integrator,
            unit,
        })
    }

    /// Quadratic-family grid: T = 800 dt, Δ/2π ∈ [−60, 60] MHz × Ω₀/2π ∈ [0, 25] MHz, 241×101.
    pub fn quadratic_default(beta: f64) -> Result<Self> {
        Self::new(
            PulseShape::quadratic(beta, 0.0, QUADRATIC_DURATION_NS)?,
            Axis::new(-60.0, 60.0, 241)?,
            Axis::new(0.0, 25.0, 101)?,
        )
    }

    /// Power-law-family grid: T = 1600 dt, Δ/2π ∈ [−35, 35] MHz × Ω₀/2π ∈ [0, 40] MHz, 141×81.
    pub fn power_law_default(p: u32) -> Result<Self> {
        Self::new(
            PulseShape::power_law(p, 0.0, POWER_LAW_DURATION_NS)?,
            Axis::new(-35.0, 35.0, 141)?,
            Axis::new(0.0, 40.0, 81)?,
        )
    }

    pub fn template(&self) -> &PulseShape {
        &self.template
    }

    pub fn detunings(&self) -> &Axis {
        &self.detunings
    }

    pub fn amplitudes(&self) -> &Axis {
        &self.amplitudes
    }

    pub fn integrator(&self) -> Integrator {
        self.integrator
    }

    pub fn with_axes(&self, detunings: Axis, amplitudes: Axis) -> Result<Self> {
        Self::with_integrator(self.template.clone(), detunings, amplitudes, self.integrator)
    }

    /// Same template and axes, different integrator.
    pub fn with_integrator_of(&self, integrator: Integrator) -> Result<Self> {
        Self::with_integrator(self.template.clone(), self.detunings, self.amplitudes, integrator)
    }

    pub fn cell_count(&self) -> usize {
        self.detunings.n * self.amplitudes.n
    }

    /// Row-major position of cell `k`: (amplitude index, detuning index).
    pub fn cell_coords(&self, k: usize) -> (usize, usize) {
        (k / self.detunings.n, k % self.detunings.n)
    }

    /// P₂ for amplitude index `row` and detuning index `col`.
    pub fn cell(&self, row: usize, col: usize) -> Result<f64> {
        let omega0 = mhz_to_rad_per_ns(self.amplitudes.value(row));
        let delta = mhz_to_rad_per_ns(self.detunings.value(col));
        self.excitation(omega0, delta).map_err(|e| Error::Cell {
            row,
            col,
            source: alloc::boxed::Box::new(e),
        })
    }

    /// P₂ at arbitrary Ω₀ and Δ (rad/ns) with this spec's template and discretisation.
    pub fn excitation(&self, omega0: f64, delta: f64) -> Result<f64> {
        let ground = QubitState::ground();
        let out = match self.integrator {
            Integrator::Magnus { substeps } => {
                let h = self.template.duration() / substeps as f64;
                evolve_scaled(&self.unit, omega0, delta, h, ground)?
            }
            Integrator::Clock { step } => evolve_piecewise(&self.unit, omega0, delta, step, ground)?,
        };
        check_norm(&out, &ground)?;
        Ok(out.p2().min(1.0))
    }

    /// Serial sweep over all cells.
    pub fn sweep(&self) -> Result<LandscapeGrid> {
        let values = (0..self.cell_count())
            .map(|k| {
                let (i, j) = self.cell_coords(k);
                self.cell(i, j)
            })
            .collect::<Result<Vec<_>>>()?;
        self.assemble(values)
    }

    /// Wraps row-major cell values computed elsewhere.
    pub fn assemble(&self, p2: Vec<f64>) -> Result<LandscapeGrid> {
        LandscapeGrid::new(
            self.detunings.values(),
            self.amplitudes.values(),
            p2,
            self.template.id(),
            self.template.duration(),
        )
    }

    /// Fresh slice at the exact amplitude giving area `area`; errors when
    /// that amplitude is outside the spec's amplitude axis.
    pub fn slice_at_area(&self, area: f64) -> Result<Slice> {
        let omega0 = amplitude_for_area(self.template.family(), self.template.duration(), area)?;
        let mhz = rad_per_ns_to_mhz(omega0);
        if !(self.amplitudes.lo..=self.amplitudes.hi).contains(&mhz) {
            return Err(Error::AreaOutOfRange { area });
        }
        self.slice_at_amplitude(omega0, area, &self.detunings.values())
    }

    /// Detuning profile at Ω₀ (rad/ns) over `detunings` (MHz).
    pub fn slice_at_amplitude(&self, omega0: f64, area: f64, detunings: &[f64]) -> Result<Slice> {
        let p2 = detunings
            .iter()
            .map(|&d| self.excitation(omega0, mhz_to_rad_per_ns(d)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Slice {
            shape_id: self.template.id(),
            area,
            amplitude_mhz: rad_per_ns_to_mhz(omega0),
            detunings: detunings.to_vec(),
            p2,
        })
    }
}

/// Fixed-area detuning profile of `template`'s family over `detunings` (MHz).
pub fn slice_at_area(template: &PulseShape, area: f64, detunings: &[f64]) -> Result<Slice> {
    let omega0 = amplitude_for_area(template.family(), template.duration(), area)?;
    let axis = Axis::new(0.0, 1.0, 2)?;
    LandscapeSpec::new(template.clone(), axis, axis)?.slice_at_amplitude(omega0, area, detunings)
}

/// Final excited-state populations on a (Ω₀, Δ) grid, row-major by amplitude.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LandscapeGrid {
    /// Δ/2π axis, MHz.
    pub detunings: Vec<f64>,
    /// Ω₀/2π axis, MHz.
    pub amplitudes: Vec<f64>,
    pub p2: Vec<f64>,
    pub shape_id: String,
    /// Pulse duration, ns.
    pub duration: f64,
}

impl LandscapeGrid {
    pub fn new(
        detunings: Vec<f64>,
        amplitudes: Vec<f64>,
        p2: Vec<f64>,
        shape_id: String,
        duration: f64,
    ) -> Result<Self> {
        let grid = LandscapeGrid {
            detunings,
            amplitudes,
            p2,
            shape_id,
            duration,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let increasing = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.detunings) || !increasing(&self.amplitudes) {
            return Err(Error::InvalidArgument("grid axes must be strictly increasing with >= 2 points".into()));
        }
        if self.p2.len() != self.detunings.len() * self.amplitudes.len() {
            return Err(Error::InvalidArgument(format!(
                "grid body has {} cells, axes imply {}",
                self.p2.len(),
                self.detunings.len() * self.amplitudes.len()
            )));
        }
        if let Some(v) = self.p2.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("grid value {v} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn cols(&self) -> usize {
        self.detunings.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.p2[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.p2[row * self.cols()..(row + 1) * self.cols()]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows()).map(|i| self.get(i, col)).collect()
    }
}

/// Detuning profile at one amplitude.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Slice {
    pub shape_id: String,
    /// Pulse area, rad.
    pub area: f64,
    /// Ω₀/2π, MHz.
    pub amplitude_mhz: f64,
    /// Δ/2π, MHz.
    pub detunings: Vec<f64>,
    pub p2: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{propagate, propagate_schedule, rabi_closed_form};
    use crate::units::HARDWARE_DT_NS;
    use crate::shapes::Family;
    use core::f64::consts::PI;

    fn small_rect_spec() -> LandscapeSpec {
        LandscapeSpec::new(
            PulseShape::rectangular(0.0, QUADRATIC_DURATION_NS).unwrap(),
            Axis::new(-30.0, 30.0, 13).unwrap(),
            Axis::new(0.0, 20.0, 9).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn axis_refinement_shares_coordinates_exactly() {
        let a = Axis::new(-60.0, 60.0, 241).unwrap();
        let r = a.refined();
        for j in 0..a.n {
            assert_eq!(a.value(j).to_bits(), r.value(2 * j).to_bits());
        }
        assert!(Axis::new(1.0, 1.0, 5).is_err());
        assert!(Axis::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn rectangular_grid_matches_rabi_formula() {
        let spec = small_rect_spec();
        let grid = spec.sweep().unwrap();
        let t = QUADRATIC_DURATION_NS;
        for i in 0..grid.rows() {
            for j in 0..grid.cols() {
                let expected = rabi_closed_form(
                    mhz_to_rad_per_ns(grid.amplitudes[i]),
                    mhz_to_rad_per_ns(grid.detunings[j]),
                    t,
                );
                assert!((grid.get(i, j) - expected).abs() < 1e-8);
            }
        }
        // zero-amplitude row
        assert!(grid.row(0).iter().all(|&v| v == 0.0));
        // resonant column: sin²(Ω₀T/2)
        let centre = grid.cols() / 2;
        assert_eq!(grid.detunings[centre], 0.0);
        for (i, v) in grid.column(centre).iter().enumerate() {
            let w = mhz_to_rad_per_ns(grid.amplitudes[i]);
            assert!((v - (0.5 * w * t).sin().powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn cells_equal_direct_propagation_bitwise() {
        let spec = LandscapeSpec::quadratic_default(0.5).unwrap();
        let (i, j) = (37, 150);
        let omega0 = mhz_to_rad_per_ns(spec.amplitudes().value(i));
        let delta = mhz_to_rad_per_ns(spec.detunings().value(j));
        let shape = spec.template().with_amplitude(omega0).unwrap();
        let substeps = default_substeps(spec.template().duration());
        assert_eq!(spec.integrator(), Integrator::Magnus { substeps });
        let direct = propagate(&shape, delta, QubitState::ground(), substeps).unwrap();
        assert_eq!(spec.cell(i, j).unwrap().to_bits(), direct.p2().min(1.0).to_bits());
    }

    #[test]
    fn clock_cells_equal_schedule_propagation_bitwise() {
        let spec = LandscapeSpec::power_law_default(2)
            .unwrap()
            .with_integrator_of(Integrator::Clock { step: HARDWARE_DT_NS })
            .unwrap();
        let (i, j) = (60, 20);
        let omega0 = mhz_to_rad_per_ns(spec.amplitudes().value(i));
        let delta = mhz_to_rad_per_ns(spec.detunings().value(j));
        let sched = spec
            .template()
            .with_amplitude(omega0)
            .unwrap()
            .sample(HARDWARE_DT_NS)
            .unwrap()
            .with_constant_detuning(delta);
        let direct = propagate_schedule(&sched, QubitState::ground()).unwrap();
        assert_eq!(spec.cell(i, j).unwrap().to_bits(), direct.p2().min(1.0).to_bits());
        // and close to the continuous envelope
        let smooth = LandscapeSpec::power_law_default(2).unwrap().cell(i, j).unwrap();
        assert!((smooth - spec.cell(i, j).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn grid_is_mirror_symmetric() {
        let spec = LandscapeSpec::new(
            PulseShape::power_law(2, 0.0, POWER_LAW_DURATION_NS).unwrap(),
            Axis::new(-20.0, 20.0, 9).unwrap(),
            Axis::new(0.0, 30.0, 4).unwrap(),
        )
        .unwrap();
        let g = spec.sweep().unwrap();
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                assert!((g.get(i, j) - g.get(i, g.cols() - 1 - j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn refined_grid_reproduces_coarse_cells() {
        let coarse = small_rect_spec();
        let fine = coarse
            .with_axes(coarse.detunings().refined(), coarse.amplitudes().refined())
            .unwrap();
        let (gc, gf) = (coarse.sweep().unwrap(), fine.sweep().unwrap());
        for i in 0..gc.rows() {
            for j in 0..gc.cols() {
                assert_eq!(gc.get(i, j).to_bits(), gf.get(2 * i, 2 * j).to_bits());
            }
        }
    }

    #[test]
    fn slice_uses_exact_amplitude() {
        let spec = LandscapeSpec::power_law_default(3).unwrap();
        let slice = spec.slice_at_area(PI).unwrap();
        assert!((slice.amplitude_mhz - 7e3 / (2.0 * POWER_LAW_DURATION_NS)).abs() < 1e-9);
        assert!((slice.amplitude_mhz - 9.843).abs() < 2e-3);
        let rect = small_rect_spec();
        let s = rect.slice_at_area(PI).unwrap();
        let centre = s.detunings.iter().position(|&d| d == 0.0).unwrap();
        assert!((s.p2[centre] - 1.0).abs() < 1e-12);
        assert!(matches!(rect.slice_at_area(40.0 * PI), Err(Error::AreaOutOfRange { .. })));
    }

    #[test]
    fn free_slice_matches_spec_slice() {
        let template = PulseShape::new(Family::Quadratic { beta: 1.0 }, 0.0, QUADRATIC_DURATION_NS).unwrap();
        let d = [-10.0, 0.0, 4.5];
        let a = slice_at_area(&template, 3.0 * PI, &d).unwrap();
        let spec = LandscapeSpec::quadratic_default(1.0).unwrap();
        let b = spec
            .slice_at_amplitude(mhz_to_rad_per_ns(a.amplitude_mhz), 3.0 * PI, &d)
            .unwrap();
        assert_eq!(a.p2, b.p2);
    }

    #[test]
    fn grid_validation() {
        let ok = LandscapeGrid::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, 1.0], alloc::vec![0.0; 4], "x".into(), 1.0);
        assert!(ok.is_ok());
        let bad_dims = LandscapeGrid::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, 1.0], alloc::vec![0.0; 3], "x".into(), 1.0);
        assert!(bad_dims.is_err());
        let bad_axis = LandscapeGrid::new(alloc::vec![1.0, 0.0], alloc::vec![0.0, 1.0], alloc::vec![0.0; 4], "x".into(), 1.0);
        assert!(bad_axis.is_err());
        let bad_val = LandscapeGrid::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, 1.0], alloc::vec![0.0, 0.0, 1.5, 0.0], "x".into(), 1.0);
        assert!(bad_val.is_err());
    }
}
