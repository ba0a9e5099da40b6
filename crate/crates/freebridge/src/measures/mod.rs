//! Infinitely divisible laws as generating triplets, plus the integration of
//! transform kernels against their jump measures.
//!
//! A law enters the crate either as an explicit [`LevyTriplet`] (shift,
//! Gaussian variance, jump measure) or as a [`ParametricLaw`] that knows its
//! own triplet. Everything downstream, characteristic exponents and all the
//! derived transforms, is an integral of some kernel against the triplet, so
//! this module also hosts the engine entry points [`integrate_levy`] and
//! [`integrate_finite`].

pub mod kernels;
pub mod pieces;
pub mod wire;

mod integrate;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::EULER_GAMMA;
use crate::numerics::{Quad, QuadraturePolicy};
use kernels::{CharKernel, FnKernel};

pub use integrate::{integrate_finite, integrate_levy};
pub use pieces::{Atom, FiniteMeasure, FinitePiece, LevyPiece};

/// Generating triplet (shift, Gaussian variance, jump measure) of an
/// infinitely divisible law. Serializes through the schema in [`wire`].
#[derive(Debug, Clone, Default)]
pub struct LevyTriplet {
    /// linear drift
    pub shift: f64,
    /// variance of the Gaussian component (not its standard deviation)
    pub gauss_var: f64,
    /// jump measure, as a sum of pieces
    pub jumps: Vec<LevyPiece>,
}

impl LevyTriplet {
    pub fn pure_shift(shift: f64) -> Self {
        LevyTriplet {
            shift,
            ..Default::default()
        }
    }

    pub fn gaussian(mean: f64, variance: f64) -> Self {
        LevyTriplet {
            shift: mean,
            gauss_var: variance,
            jumps: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.shift.is_finite() || !self.gauss_var.is_finite() || self.gauss_var < 0.0 {
            return Err(Error::InvalidMeasure(format!(
                "triplet with shift {} and Gaussian variance {}",
                self.shift, self.gauss_var
            )));
        }
        for p in &self.jumps {
            p.validate()?;
        }
        Ok(())
    }

    /// Triplet of the reflected law x -> -x.
    pub fn reflect(&self) -> Self {
        LevyTriplet {
            shift: -self.shift,
            gauss_var: self.gauss_var,
            jumps: self.jumps.iter().map(|p| p.reflect()).collect(),
        }
    }
}

/// Characteristic exponent log E e^{itX} of the law with the given triplet:
/// i t a - sigma^2 t^2 / 2 plus the compensated jump integral.
pub fn char_exponent(mu: &LevyTriplet, t: f64, policy: &QuadraturePolicy) -> Result<Quad> {
    mu.validate()?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("characteristic exponent at t = {t}")));
    }
    if t == 0.0 {
        return Ok(Quad::zero());
    }
    let mut q = if mu.jumps.is_empty() {
        Quad::zero()
    } else {
        integrate_levy(&CharKernel { t }, &mu.jumps, policy)?
    };
    q.value += Complex64::new(-0.5 * mu.gauss_var * t * t, mu.shift * t);
    Ok(q)
}

/// Total mass of a finite measure, by integrating the constant kernel.
pub fn total_mass(measure: &FiniteMeasure, policy: &QuadraturePolicy) -> Result<f64> {
    let one = FnKernel::bounded("unit", |_| Ok(Complex64::new(1.0, 0.0)));
    Ok(integrate_finite(&one, measure, policy)?.value.re)
}

/// Common laws with known generating triplets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ParametricLaw {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    StandardCauchy,
    Poisson {
        rate: f64,
        jump: f64,
    },
    CompoundPoisson {
        jumps: FiniteMeasure,
    },
    /// Strictly stable-type law of index p in (0, 2]; `beta` in [-1, 1] is the
    /// skewness, `c > 0` the scale. p = 2 degenerates to a Gaussian with
    /// variance 2c (the skewness is then irrelevant).
    Stable {
        p: f64,
        c: f64,
        beta: f64,
        shift: f64,
    },
    StandardExponential,
}

impl ParametricLaw {
    pub fn to_triplet(&self, policy: &QuadraturePolicy) -> Result<LevyTriplet> {
        match self {
            ParametricLaw::Gaussian { mean, variance } => {
                if !mean.is_finite() || !(*variance >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian mean={mean} variance={variance}"
                    )));
                }
                Ok(LevyTriplet::gaussian(*mean, *variance))
            }
            ParametricLaw::StandardCauchy => Ok(LevyTriplet {
                shift: 0.0,
                gauss_var: 0.0,
                jumps: vec![LevyPiece::SymmetricCauchy { scale: 1.0 }],
            }),
            ParametricLaw::Poisson { rate, jump } => {
                if !(*rate >= 0.0) || !jump.is_finite() || *jump == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "poisson rate={rate} jump={jump}"
                    )));
                }
                let shift = if jump.abs() <= 1.0 { rate * jump } else { 0.0 };
                Ok(LevyTriplet {
                    shift,
                    gauss_var: 0.0,
                    jumps: vec![LevyPiece::Finite(FiniteMeasure::atom(*jump, *rate))],
                })
            }
            ParametricLaw::CompoundPoisson { jumps } => {
                jumps.validate()?;
                let ball = FnKernel::bounded("x inside the unit ball", |x| {
                    Ok(Complex64::new(if x.abs() <= 1.0 { x } else { 0.0 }, 0.0))
                });
                let shift = integrate_finite(&ball, jumps, policy)?.value.re;
                Ok(LevyTriplet {
                    shift,
                    gauss_var: 0.0,
                    jumps: vec![LevyPiece::Finite(jumps.clone())],
                })
            }
            ParametricLaw::Stable { p, c, beta, shift } => {
                if !(*p > 0.0 && *p <= 2.0) || !(*c > 0.0) || !(beta.abs() <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "stable p={p} c={c} beta={beta}"
                    )));
                }
                if *p == 2.0 {
                    return Ok(LevyTriplet::gaussian(*shift, 2.0 * c));
                }
                // the ball compensator differs from the strictly stable
                // centering; the drift absorbs the difference
                let drift = if (p - 1.0).abs() <= 1e-9 {
                    shift - c * beta * (1.0 - EULER_GAMMA)
                } else {
                    shift + c * beta * p / (1.0 - p)
                };
                Ok(LevyTriplet {
                    shift: drift,
                    gauss_var: 0.0,
                    jumps: vec![LevyPiece::StableTails {
                        p: *p,
                        c: *c,
                        theta_plus: (1.0 + beta) / 2.0,
                        theta_minus: (1.0 - beta) / 2.0,
                    }],
                })
            }
            ParametricLaw::StandardExponential => Ok(LevyTriplet {
                shift: 1.0 - (-1.0f64).exp(),
                gauss_var: 0.0,
                jumps: vec![LevyPiece::ExpOverX { flipped: false }],
            }),
        }
    }
}
