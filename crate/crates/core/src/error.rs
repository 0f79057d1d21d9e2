use thiserror::Error;

/// Errors raised by the geometry, flow and functional routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("curvature sign {curvature} is incompatible with genus {genus}")]
    IncompatibleTopology { curvature: i32, genus: u32 },

    #[error("grid resolution {0} is below the minimum of 8")]
    ResolutionTooSmall(usize),

    #[error("grid kind {grid} cannot discretize a base with curvature sign {curvature}")]
    IncompatibleGrid { grid: &'static str, curvature: i32 },

    #[error("field has {got} samples but the grid has {expected} nodes")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mass {mass} does not exceed the critical mass {critical} for curvature sign {curvature}")]
    SubcriticalMass { curvature: i32, mass: f64, critical: f64 },

    #[error("horizon radius {radius} is degenerate for curvature sign {curvature} (3r^2 + k <= 0)")]
    DegenerateHorizon { curvature: i32, radius: f64 },

    #[error("surface gravity {0} is below the critical value sqrt(3)")]
    SubcriticalSurfaceGravity(f64),

    #[error("Heintze-Karcher denominator 3|dM| + 2 pi chi = {0} is not positive")]
    NonPositiveHkDenominator(f64),

    #[error("point at rho = {rho} is not in the exterior region (horizon at {horizon})")]
    BelowHorizon { rho: f64, horizon: f64 },

    #[error("evaluation radius {rho} is preasymptotic (needs at least {minimum})")]
    Preasymptotic { rho: f64, minimum: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("surface is not a constant graph")]
    NotASlice,

    #[error("mean curvature {value} fell to or below the floor {floor}")]
    MeanCurvatureFloor { value: f64, floor: f64 },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("radial alignment {value} is below the required floor {floor}")]
    NotStarShaped { value: f64, floor: f64 },

    #[error("{0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
