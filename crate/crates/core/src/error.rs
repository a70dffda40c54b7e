use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid pulse shape: {0}")]
    InvalidShape(String),

    #[error("edge derivative undefined at t = {t} ns (derivatives need 0 < t < T)")]
    EdgeDerivative { t: f64 },

    #[error("pulse family has zero area; no finite amplitude reaches the target")]
    DegenerateArea,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite drive value at t = {t} ns")]
    NonFinite { t: f64 },

    #[error("integrator failure: norm drifted by {drift:e}")]
    NormDrift { drift: f64 },

    #[error("step refinement did not converge at {substeps} sub-steps")]
    NotConverged { substeps: usize },

    #[error("unphysical relaxation times: T1 = {t1_us} us, T2 = {t2_us} us")]
    Unphysical { t1_us: f64, t2_us: f64 },

    #[error("degenerate frame point: splitting and coupling both vanish")]
    DegeneratePoint,

    #[error("midpoint asymptotics are undefined on resonance (delta = 0)")]
    AsymptoticUndefined,

    #[error("sweep cell (amplitude index {row}, detuning index {col}) failed: {source}")]
    Cell {
        row: usize,
        col: usize,
        source: Box<Error>,
    },

    #[error("target area {area} rad is outside the amplitude range of the grid")]
    AreaOutOfRange { area: f64 },

    #[error("broadening ratio undefined: {0}")]
    UndefinedRatio(&'static str),

    #[error("slice resolution {step} MHz is coarser than the {limit} MHz fringe limit")]
    CoarseSlice { step: f64, limit: f64 },

    #[error("pulse duration {duration} ns exceeds the hardware limit of {limit} ns")]
    DurationExceeded { duration: f64, limit: f64 },

    #[error("amplitude {amplitude} a.u. at t = {t} ns exceeds the hardware limit of {limit} a.u.")]
    AmplitudeExceeded { amplitude: f64, t: f64, limit: f64 },

    #[error("unknown calibration day {0:?}")]
    UnknownDay(String),

    #[error("invalid hardware profile: {0}")]
    InvalidProfile(String),
}
