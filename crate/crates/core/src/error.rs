//! Error types shared across the model and identification pipelines.

use thiserror::Error;

/// Errors raised by the geometry/motivation/steering/plant/scenario stack.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    /// Collision points are in contact; separation derivatives are undefined.
    #[error("collision points in contact (separation {0:.3e} m)")]
    Contact(f64),

    /// The slip-angle model is undefined near standstill.
    #[error("longitudinal speed {0:.3} m/s too low for the slip-angle model")]
    Standstill(f64),

    /// Steering momentarily cannot influence this collision pair.
    #[error("steering projection {0:.3e} below degeneracy threshold")]
    DegenerateProjection(f64),

    /// A scenario was requested with impossible geometry or parameters.
    #[error("infeasible scenario configuration: {0}")]
    Configuration(String),
}

/// Errors raised by driver parameter identification.
#[derive(Debug, Clone, Error)]
pub enum IdentError {
    #[error("trace has {0} rows; at least {1} required")]
    TooFewRows(usize, usize),

    #[error("only {0} unsaturated samples survive extraction; at least 3 required")]
    InsufficientData(usize),

    #[error("estimated sensitivity gain is zero; difficulty threshold is unobservable")]
    ZeroSensitivity,

    #[error("regressors are collinear (condition number {0:.3e})")]
    DegenerateData(f64),

    #[error("trace lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("trace is not uniformly sampled at the stated period (row {0})")]
    NonUniformSampling(usize),

    #[error("{0} of {1} rows lie off the scenario track; too few usable rows remain")]
    OffTrack(usize, usize),

    #[error(transparent)]
    Model(#[from] ModelError),
}
