use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x1}, {x2}) lies on the barrier")]
    Boundary { x1: f64, x2: f64 },

    #[error("{what}: argument {value} outside the supported domain")]
    Domain { what: &'static str, value: f64 },

    #[error("{what}: result exceeds the floating-point range")]
    Overflow { what: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("adaptive quadrature did not reach tolerance {tol:e} within depth {depth}")]
    ToleranceNotReached { tol: f64, depth: u32 },

    #[error("finite-difference stencil of step {h} around ({x1}, {x2}) leaves the domain")]
    StencilCrossesBarrier { x1: f64, x2: f64, h: f64 },

    #[error("no cutoff below {cap} satisfies tolerance {tol:e}")]
    TailBoundUnsatisfiable { tol: f64, cap: f64 },

    #[error("mesh-doubling estimate {estimate:e} exceeds 10 x tolerance {tol:e}")]
    NonConvergence { estimate: f64, tol: f64 },

    #[error("truncated operator tail bound {tail_bound:e} exceeds tolerance {tol:e}")]
    TruncationInsufficient { tail_bound: f64, tol: f64 },

    #[error("superoscillation coefficients for n = {n} reach {max_coefficient:e}")]
    CoefficientOverflow { n: usize, max_coefficient: f64 },

    #[error(
        "n = {n}: cancellation in the superoscillating sum loses {digits_lost:.1} of \
         {available:.1} available digits (max {max_loss:.1})"
    )]
    PrecisionWall {
        n: usize,
        digits_lost: f64,
        available: f64,
        max_loss: f64,
    },
}
