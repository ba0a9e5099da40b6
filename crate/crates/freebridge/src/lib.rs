//! Numerical bridge between the two infinite-divisibility worlds: classical
//! characteristic exponents computed from generating triplets, and their free
//! counterparts (Voiculescu transforms) computed along several independent
//! routes that must agree.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`]: quadrature (Gauss-Laguerre pairs, adaptive Gauss-Kronrod),
//!   special functions, damped complex Newton.
//! * [`measures`]: jump-measure descriptions, characteristic exponents, and
//!   the integration engine that evaluates transform kernels against them.
//! * [`nevanlinna`]: the integral-representation form of the transforms, its
//!   evaluation, and the bijection back to generating triplets.
//! * [`transforms`]: Cauchy/Voiculescu machinery: closed-form Cauchy
//!   transforms, functional inversion, the Laplace-transform route, and
//!   exponential-weight random integral maps.
//! * [`classes`]: distinguished subclasses (self-decomposable and
//!   s-self-decomposable laws, stable laws, compound Poisson) with closed-form
//!   kernels on both sides of the bridge.
//! * [`cli`]: the grid-evaluation / identity-check / inversion front end used
//!   by the `freebridge` binary, driven by JSON configs and emitting CSV or
//!   JSON reports.

pub mod classes;
pub mod cli;
pub mod error;
pub mod measures;
pub mod nevanlinna;
pub mod numerics;
pub mod transforms;

pub use error::{Error, Result};
