use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `λⁿ = λ` for some `n` within the requested order.
    #[error("small divisor λ^{n} - λ vanishes")]
    SmallDivisorZero { n: usize },

    #[error("all tail coefficients vanish; the radius of convergence is infinite")]
    DegenerateSequence,

    #[error("|z| = {modulus} is outside the disk of convergence (r = {radius})")]
    OutsideDisk { modulus: f64, radius: f64 },

    #[error("requested depth {requested} exceeds the {available} available partial quotients")]
    DepthExceeded { requested: usize, available: usize },

    #[error("continued fraction depth {0} cannot be reached in double precision")]
    PrecisionExhausted(usize),

    #[error("not applicable to a rational rotation number")]
    NotApplicable,

    #[error(
        "neither critical point matches the series radius r = {radius}: \
         |φ(1)| = {phi_one}, |φ(c)| = {phi_c}, tolerance {tolerance}"
    )]
    NoMatch {
        radius: f64,
        phi_one: f64,
        phi_c: f64,
        tolerance: f64,
    },

    #[error("ray {ray}: classification is not monotone along the ray")]
    RayAmbiguous { ray: usize },

    #[error("leading coefficient of the {q}-th iterate underflowed")]
    ZeroLeading { q: u64 },

    #[error("simultaneous root iteration did not converge (worst residual {worst_residual:e})")]
    NoConvergence {
        worst_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("{fraction:.3} of interior samples are masked (limit 0.01)")]
    MaskTooLarge { fraction: f64 },
}

impl Error {
    /// Failures that come from the numerics rather than from the request.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SmallDivisorZero { .. }
                | Error::DegenerateSequence
                | Error::NoMatch { .. }
                | Error::RayAmbiguous { .. }
                | Error::ZeroLeading { .. }
                | Error::NoConvergence { .. }
                | Error::MaskTooLarge { .. }
                | Error::PrecisionExhausted(_)
        )
    }
}
