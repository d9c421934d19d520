use thiserror::Error;

/// Everything that can go wrong while building, evaluating or verifying a field.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quaternion has zero norm and no inverse")]
    ZeroQuaternion,
    #[error("point lies on the x0 axis (rho = {rho:e}); the axial direction is undefined")]
    OnAxis { rho: f64 },
    #[error("angle psi requires x3 > 0, got x3 = {x3}")]
    HalfSpaceViolation { x3: f64 },
    #[error("finite-difference step {step:e} is too large for the local scale {scale:e}")]
    StepTooLarge { step: f64, scale: f64 },
    #[error("logarithm evaluated on its branch cut at x0 = {x0}")]
    BranchCut { x0: f64 },
    #[error("pole at x0 = {x0}")]
    Pole { x0: f64 },
    #[error("{0} has no primitive in the registered function algebra")]
    Unsupported(String),
    #[error("Moebius coefficients violate ad - bc = 1 (got {det})")]
    NotUnimodular { det: f64 },
    #[error("function {name} is not radially holomorphic (residual {residual:e})")]
    NotHolomorphic { name: String, residual: f64 },
    #[error("argument {z} is outside the domain of {what}")]
    DomainError { what: &'static str, z: f64 },
    #[error("series for {what} did not converge within {terms} terms (tail bound {tail:e})")]
    ConvergenceFailure { what: &'static str, terms: usize, tail: f64 },
    #[error("integer Bessel order {nu} is not supported for the second kind")]
    IntegerOrderUnsupported { nu: f64 },
    #[error("partial sum limit {n} exceeds the factorial guard of {max}")]
    Overflow { n: usize, max: usize },
    #[error("Laplace abscissa violated: x0 = {x0} must exceed growth rate {s0}")]
    AbscissaViolation { x0: f64, s0: f64 },
    #[error("kernel grows like exp({rho} tau) but the original only asserts decay rate {decay:?}")]
    KernelGrowth { rho: f64, decay: Option<f64> },
    #[error("quadrature did not reach tolerance {tol:e} (last change {change:e})")]
    QuadratureFailure { tol: f64, change: f64 },
    #[error("invalid separable parameters: {0}")]
    InvalidParams(String),
    #[error("profile has no stream function")]
    NoStream,
    #[error("matrix is not symmetric (asymmetry {asym:e})")]
    NotSymmetric { asym: f64 },
    #[error("scan window is empty or lies below rho_min")]
    EmptyWindow,
    #[error("divergence scan requires alpha != 0")]
    AlphaZero,
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("flow left the meridian plane (axis drift {drift:e})")]
    AxisDrift { drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
