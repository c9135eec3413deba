use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into input errors (bad shapes, out-of-range parameters)
/// and numerical precondition failures (aliasing, conditioning, contours
/// passing through zeros). [`Error::is_numerical`] tells the two apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation at the origin of a series with negative exponents (n_min = {n_min})")]
    PoleAtOrigin { n_min: i32 },

    #[error("{samples} samples cannot resolve exponents in [{n_min}, {n_max}] without aliasing")]
    Aliasing {
        samples: usize,
        n_min: i32,
        n_max: i32,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("|t| = {t_abs} lies outside the base disc |t| < {bound}")]
    EmptyFiber { t_abs: f64, bound: f64 },

    #[error("zeta = 0 is not in any fiber annulus")]
    ZeroPoint,

    #[error("elements are based at different points")]
    BasePointMismatch,

    #[error("band [{lo}, {hi}] is not contained in the annulus ({r_inner}, {r_outer})")]
    BandOutsideAnnulus {
        lo: f64,
        hi: f64,
        r_inner: f64,
        r_outer: f64,
    },

    #[error("scale factor {scale:e} for coefficient ({m}, {n}) is too small to invert")]
    IllConditioned { m: usize, n: usize, scale: f64 },

    #[error("branch restriction is undefined for a section with pole order {pole_order}")]
    PolarBranch { pole_order: u32 },

    #[error("function nearly vanishes on the contour |zeta| = {radius} at angle {angle} (|g| = {modulus:e})")]
    ContourThroughZero {
        radius: f64,
        angle: f64,
        modulus: f64,
    },

    #[error("phase tracking did not resolve with {samples} samples")]
    PhaseUnresolved { samples: usize },

    #[error("branch restriction vanishes identically")]
    DegenerateBranch,

    #[error("density is singular at |zeta| = {radius} for |t| = {t_abs}")]
    SingularDensity { radius: f64, t_abs: f64 },

    #[error("gauge nearly vanishes at ({z}, {w})")]
    GaugeVanishes { z: String, w: String },

    #[error("malformed data: {0}")]
    Malformed(String),
}

impl Error {
    /// True for failures of numerical preconditions (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Aliasing { .. }
                | Error::IllConditioned { .. }
                | Error::ContourThroughZero { .. }
                | Error::PhaseUnresolved { .. }
                | Error::SingularDensity { .. }
                | Error::GaugeVanishes { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
