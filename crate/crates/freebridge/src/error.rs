//! Error type shared by every module.
//!
//! Numerical operations prefer returning a diagnostic error over silently
//! degrading: quadrature that cannot reach its tolerance reports the estimate
//! it got stuck at, the Newton solver reports its last iterate, and measure
//! constructors reject inputs that fail their integrability checks.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A quadrature routine could not reach the requested tolerance.
    #[error("quadrature for {context} did not converge: err_est {err_est:.3e} exceeds tol {tol:.3e}")]
    QuadratureNonConvergence {
        context: String,
        err_est: f64,
        tol: f64,
    },

    /// An integrand produced a non-finite value.
    #[error("integrand for {context} returned a non-finite value near x = {x:.6e}")]
    NonFiniteIntegrand { context: String, x: f64 },

    /// A kernel passed to the Levy integrator fails the O(x^2) near-zero contract.
    #[error("kernel `{kernel}` blows up near zero: |k({x:.3e})| / x^2 = {ratio:.3e}")]
    KernelBlowUp { kernel: String, x: f64, ratio: f64 },

    /// A kernel grows too fast at infinity for the requested measure.
    #[error("kernel `{kernel}` is not bounded at infinity: |k({x:.3e})| = {value:.3e}")]
    KernelUnbounded { kernel: String, x: f64, value: f64 },

    /// An integrand grew faster than polynomially where polynomial growth was required.
    #[error("integrand grows faster than polynomially: {0}")]
    NonPolynomialGrowth(String),

    /// A measure failed validation.
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// A scalar parameter was outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The damped Newton iteration did not converge.
    #[error("newton iteration stopped after {iterations} steps at {last} with residual {residual:.3e}")]
    SolverNonConvergence {
        iterations: usize,
        last: Complex64,
        residual: f64,
    },

    /// The free transform of this distribution is not invertible below t_min.
    #[error("t = {t} is below t_min = {t_min} for {kind}; the inverse of F is out of reach")]
    BelowTMin { t: f64, t_min: f64, kind: String },

    /// The log-moment condition required by the selfdecomposable maps fails.
    #[error("log-moment condition violated by {tail}: integral of log|x| over |x|>1 is {value:.3e}")]
    LogMomentViolation { tail: String, value: f64 },

    /// No closed-form characteristic function is registered for this density kind.
    #[error("no closed-form characteristic function for kind `{kind}`")]
    NoClosedFormCharFn { kind: String },

    /// Evaluation point sits too close to the support of a tabulated density.
    #[error("evaluation point {z} is within {distance:.3e} of the tabulated support (limit {limit:.3e})")]
    TooCloseToSupport {
        z: Complex64,
        distance: f64,
        limit: f64,
    },

    /// A time change supplied to the random-integral map is not monotone.
    #[error("time change is not monotone: derivative changes sign near s = {s:.6e}")]
    NonMonotoneTimeChange { s: f64 },

    /// The requested integral diverges for the supplied test function.
    #[error("integral diverges: {0}")]
    Divergent(String),

    /// A function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration or input-file problem in the command layer.
    #[error("config error: {0}")]
    Config(String),

    /// I/O failure in the command layer.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
