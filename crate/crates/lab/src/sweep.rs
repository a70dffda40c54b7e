//! Parallel landscape sweeps.
//!
//! Cells are evaluated by a rayon pool and gathered by index, and each cell is
//! a pure function of its coordinates, so the grid is bit-identical for any
//! worker count.

use rayon::prelude::*;
use superbroad_core::landscape::{LandscapeGrid, LandscapeSpec};

use crate::exit::LabError;

/// Runs `spec` on `workers` threads (`0` means one per core).
pub fn sweep(spec: &LandscapeSpec, workers: usize) -> Result<LandscapeGrid, LabError> {
    if workers == 1 {
        return Ok(spec.sweep()?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| LabError::Usage(format!("cannot start {workers} workers: {e}")))?;
    let values = pool.install(|| {
        (0..spec.cell_count())
            .into_par_iter()
            .map(|k| {
                let (i, j) = spec.cell_coords(k);
                spec.cell(i, j)
            })
            .collect::<Result<Vec<f64>, _>>()
    })?;
    Ok(spec.assemble(values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use superbroad_core::landscape::Axis;
    use superbroad_core::shapes::PulseShape;
    use superbroad_core::units::QUADRATIC_DURATION_NS;

    #[test]
    fn worker_count_does_not_change_bits() {
        let spec = LandscapeSpec::new(
            PulseShape::quadratic(0.75, 0.0, QUADRATIC_DURATION_NS).unwrap(),
            Axis::new(-40.0, 40.0, 17).unwrap(),
            Axis::new(0.0, 20.0, 6).unwrap(),
        )
        .unwrap();
        let serial = sweep(&spec, 1).unwrap();
        for w in [2, 3, 8] {
            let par = sweep(&spec, w).unwrap();
            let same = serial.p2.iter().zip(&par.p2).all(|(a, b)| a.to_bits() == b.to_bits());
            assert!(same, "{w} workers differ");
        }
    }
}
