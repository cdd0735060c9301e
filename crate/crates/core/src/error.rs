//! Error types shared by every pipeline stage.

use thiserror::Error;

/// Everything that can go wrong between raw samples and a recovered signal.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty signal")]
    EmptySignal,
    #[error("singular interpolation: fewer distinct sample nodes than coefficients")]
    SingularInterpolation,
    #[error("degree too small: fit residual {residual:.3e} exceeds tolerance")]
    DegreeTooSmall { residual: f64 },
    #[error("zero intensity: all fitted coefficients below tolerance")]
    ZeroIntensity,
    #[error("root finding failed to converge within {max_iter} iterations")]
    RootFindingFailed { max_iter: usize },
    #[error("untrimmed intensity: top autocorrelation coefficient vanishes")]
    UntrimmedIntensity,
    #[error("not an intensity: evaluation reaches {min_value:.3e}")]
    NotAnIntensity { min_value: f64 },
    #[error("root pairing failed: {0}")]
    RootPairing(&'static str),
    #[error("enumerated representative deviates from the target intensity by {err:.3e}")]
    EnumerationMismatch { err: f64 },
    #[error("support length {n} exceeds the enumeration cap {cap}")]
    SupportTooLarge { n: usize, cap: usize },
    #[error("polarization requires K >= 3, got {k}")]
    PolarizationOrder { k: usize },
    #[error("degenerate rotation pair: alpha1 - alpha2 = {delta:.6} is a multiple of pi")]
    DegenerateRotationPair { delta: f64 },
    #[error("channels do not form a usable interference family: {0}")]
    ChannelFamily(&'static str),
    #[error("mixed modulation set: channels disagree on mu")]
    MixedModulationSet,
    #[error("vanishing intensity at node omega = {omega:.6}")]
    VanishingIntensity { omega: f64 },
    #[error("inadmissible modulation: mu = {mu:.6} is within tolerance of 2*pi*p/q for some q <= {q_max}")]
    InadmissibleMu { mu: f64, q_max: usize },
    #[error("samples are not an exponential sum of the requested order (residual {residual:.3e})")]
    NotExponentialSum { residual: f64 },
    #[error("frequency-lattice mismatch: recovered frequency {nu:.6} has no integer index on the mu-lattice")]
    FrequencyLatticeMismatch { nu: f64 },
    #[error("Vandermonde near-singular for the given support")]
    VandermondeNearSingular,
    #[error(
        "degenerate sampling path: no start point keeps the path magnitudes above {threshold:.3e}"
    )]
    DegenerateSamplingPath { threshold: f64 },
    #[error("reference spectrum too sparse: {usable} usable nodes, need {needed}")]
    ReferenceSpectrumTooSparse { usable: usize, needed: usize },
    #[error("window too small: estimated support length {n} exceeds window {window}")]
    WindowTooSmall { n: usize, window: usize },
    #[error("hypothesis violated: shared zeros between the two intensities")]
    SharedZeros,
    #[error("inconsistent measurements: no candidate pair reproduces the interference channel")]
    InconsistentMeasurements,
    #[error("linear solve failed: {0}")]
    LinearSolve(&'static str),
    #[error("invalid measurement set: {0}")]
    InvalidMeasurement(&'static str),
    #[error("invalid signal record: {0}")]
    InvalidSignal(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Structurally invalid input (bad records, inconsistent channel sets).
    Malformed,
    /// A hypothesis of one of the recovery guarantees is violated.
    Admissibility,
    /// The data is structurally fine but the numerics gave up.
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            EmptySignal
            | MixedModulationSet
            | ChannelFamily(_)
            | InvalidMeasurement(_)
            | InvalidSignal(_) => ErrorClass::Malformed,
            InadmissibleMu { .. }
            | DegenerateRotationPair { .. }
            | SharedZeros
            | WindowTooSmall { .. }
            | SupportTooLarge { .. }
            | PolarizationOrder { .. } => ErrorClass::Admissibility,
            _ => ErrorClass::Numerical,
        }
    }
}
