//! The pair representation (b, rho) of an infinitely divisible law: a real
//! shift plus one finite measure on the line, the form the free-probability
//! side works with.
//!
//! The restricted transform of a pair is evaluated directly on the upper
//! imaginary axis ([`kernel_eval`]); [`pair_to_triplet`] and
//! [`triplet_to_pair`] convert losslessly between the pair and the classical
//! generating triplet, with the Gaussian variance stored as the pair
//! measure's atom at the origin; [`restricted_kernel_identity`] checks the
//! transported kernel against the exponential-mixture exponent of the same
//! law; [`invert_restricted`] recovers (b, total mass, and the Laplace
//! transform of the measure's characteristic function) from nothing but an
//! opaque evaluator of the transform.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::kernels::FnKernel;
use crate::measures::{integrate_finite, Atom, FiniteMeasure, FinitePiece, LevyPiece, LevyTriplet};
use crate::numerics::{Quad, QuadraturePolicy};
use crate::transforms::upsilon_char_exponent;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A real number and a finite measure; together they determine one infinitely
/// divisible law. An atom of `rho` at the origin carries the Gaussian
/// variance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NevanlinnaPair {
    pub b: f64,
    pub rho: FiniteMeasure,
}

impl NevanlinnaPair {
    pub fn new(b: f64, rho: FiniteMeasure) -> Self {
        NevanlinnaPair { b, rho }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.b.is_finite() {
            return Err(Error::InvalidMeasure(format!("pair shift b = {}", self.b)));
        }
        self.rho.validate()
    }
}

/// Evaluate the restricted transform of a pair at the point `it`, `t > 0`:
/// b + the integral of (1 + its)/(it - s) over rho. The value always lies in
/// the closed lower half-plane.
pub fn kernel_eval(pair: &NevanlinnaPair, t: f64, policy: &QuadraturePolicy) -> Result<Quad> {
    pair.validate()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "restricted transform is evaluated at it with t > 0, got t = {t}"
        )));
    }
    let it = c(0.0, t);
    let kernel = FnKernel::bounded("pair kernel", move |s| Ok((1.0 + it * s) / (it - s)));
    let q = integrate_finite(&kernel, &pair.rho, policy)?;
    Ok(Quad {
        value: q.value + pair.b,
        err_est: q.err_est,
    })
}

/// The shift transfer term between the two representations: the compensator
/// change s (1_{|s|<=1} - 1/(1+s^2)) integrated against the jump measure,
/// written here against rho, which folds in the (1+s^2)/s^2 reweighting and
/// leaves the bounded integrand s 1_{|s|<=1} - (1/s) 1_{|s|>1}. The closed
/// unit ball keeps atoms on the truncation boundary inside; the integrand is
/// continuous there either way.
fn shift_correction(rho: &FiniteMeasure, policy: &QuadraturePolicy) -> Result<f64> {
    let kernel = FnKernel::bounded("shift transfer", |s| {
        let v = if s.abs() <= 1.0 { s } else { -1.0 / s };
        Ok(c(v, 0.0))
    });
    Ok(integrate_finite(&kernel, rho, policy)?.value.re)
}

/// Unfold a pair into the classical generating triplet: the atom at 0 becomes
/// the Gaussian variance, the rest of rho is reweighted by (1+x^2)/x^2 into
/// the jump measure, and the drift picks up the truncation transfer term.
pub fn pair_to_triplet(pair: &NevanlinnaPair, policy: &QuadraturePolicy) -> Result<LevyTriplet> {
    pair.validate()?;
    let mut gauss_var = 0.0;
    let mut jump_atoms: Vec<Atom> = Vec::new();
    let mut jumps: Vec<LevyPiece> = Vec::new();
    for a in &pair.rho.atoms {
        if a.at == 0.0 {
            gauss_var += a.mass;
        } else if a.mass > 0.0 {
            jump_atoms.push(Atom {
                at: a.at,
                mass: a.mass * (1.0 + a.at * a.at) / (a.at * a.at),
            });
        }
    }
    if !jump_atoms.is_empty() {
        jumps.push(LevyPiece::Finite(FiniteMeasure {
            atoms: jump_atoms,
            pieces: Vec::new(),
        }));
    }
    for p in &pair.rho.pieces {
        jumps.push(p.unweight());
    }
    let shift = pair.b + shift_correction(&pair.rho, policy)?;
    let triplet = LevyTriplet {
        shift,
        gauss_var,
        jumps,
    };
    triplet.validate()?;
    Ok(triplet)
}

/// Fold a classical generating triplet into a pair; exact right inverse of
/// [`pair_to_triplet`]. Jump atoms and the symmetric Cauchy density reweight
/// in closed form, other densities are wrapped with the x^2/(1+x^2) weight.
pub fn triplet_to_pair(mu: &LevyTriplet, policy: &QuadraturePolicy) -> Result<NevanlinnaPair> {
    mu.validate()?;
    let mut atoms: Vec<Atom> = Vec::new();
    let mut pieces: Vec<FinitePiece> = Vec::new();
    if mu.gauss_var > 0.0 {
        atoms.push(Atom {
            at: 0.0,
            mass: mu.gauss_var,
        });
    }
    for piece in &mu.jumps {
        match piece {
            LevyPiece::Finite(fm) => {
                for a in &fm.atoms {
                    if a.at != 0.0 && a.mass > 0.0 {
                        atoms.push(Atom {
                            at: a.at,
                            mass: a.mass * a.at * a.at / (1.0 + a.at * a.at),
                        });
                    }
                }
                for p in &fm.pieces {
                    pieces.push(FinitePiece::WeightedLevy(Box::new(LevyPiece::Finite(
                        FiniteMeasure::from_pieces(vec![p.clone()]),
                    ))));
                }
            }
            other => pieces.push(other.weight()),
        }
    }
    let rho = FiniteMeasure { atoms, pieces };
    let b = mu.shift - shift_correction(&rho, policy)?;
    let pair = NevanlinnaPair { b, rho };
    pair.validate()?;
    Ok(pair)
}

/// Both sides of the transport identity at `t < 0`: the left side is
/// it * kernel(1/(it)) evaluated through [`kernel_eval`] (1/(it) lies back on
/// the upper imaginary axis), the right side is the exponential-mixture
/// exponent of the unfolded triplet. They agree for every valid pair.
pub fn restricted_kernel_identity(
    pair: &NevanlinnaPair,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<(Complex64, Complex64)> {
    if !(t < 0.0) {
        return Err(Error::Domain(format!(
            "transport identity is stated for t < 0, got t = {t}"
        )));
    }
    let lhs = c(0.0, t) * kernel_eval(pair, -1.0 / t, policy)?.value;
    let mu = pair_to_triplet(pair, policy)?;
    let rhs = upsilon_char_exponent(&mu, t, policy)?.value;
    Ok((lhs, rhs))
}

/// What the inversion recovers from an opaque transform evaluator: the shift,
/// the total mass of the measure, and pointwise values of the Laplace
/// transform of the measure's characteristic function.
pub struct RestrictedInversion<F> {
    k: F,
    b: f64,
    mass: f64,
}

impl<F> std::fmt::Debug for RestrictedInversion<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RestrictedInversion")
            .field("b", &self.b)
            .field("mass", &self.mass)
            .finish_non_exhaustive()
    }
}

/// One evaluated Laplace-transform sample of an inversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InversionSample {
    pub w: f64,
    /// real and imaginary part
    pub value: [f64; 2],
}

/// Serializable summary of an inversion run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InversionReport {
    pub b: f64,
    pub mass: f64,
    pub samples: Vec<InversionSample>,
}

/// Recover pair data from an opaque evaluator `t -> k(it)` of a restricted
/// transform, probing only the upper imaginary axis. The probe list must
/// contain t = 1: the value there splits exactly into shift (real part) and
/// total mass (negated imaginary part).
pub fn invert_restricted<F>(k: F, probe_points: &[f64]) -> Result<RestrictedInversion<F>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !probe_points.iter().any(|&p| (p - 1.0).abs() < 1e-12) {
        return Err(Error::Domain(
            "inversion probe points must include t = 1".into(),
        ));
    }
    let mut at_one = c(0.0, 0.0);
    for &p in probe_points {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("probe point t = {p} is not positive")));
        }
        let v = k(p)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteIntegrand {
                context: "transform evaluator".into(),
                x: p,
            });
        }
        if (p - 1.0).abs() < 1e-12 {
            at_one = v;
        }
    }
    Ok(RestrictedInversion {
        k,
        b: at_one.re,
        mass: -at_one.im,
    })
}

impl<F> RestrictedInversion<F>
where
    F: Fn(f64) -> Result<Complex64>,
{
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn total_mass(&self) -> f64 {
        self.mass
    }

    /// The Laplace transform of the characteristic function of the measure,
    /// at w > 0. The defining ratio has a removable singularity at w = 1,
    /// filled by averaging the two one-sided values at 1 +/- 1e-4; the
    /// evaluator's value below the axis is the reflection conj k(iw), which
    /// is where the integral formula lands for real pair data.
    pub fn laplace_phi_rho(&self, w: f64) -> Result<Complex64> {
        if !(w > 0.0) {
            return Err(Error::Domain(format!(
                "Laplace variable must be positive, got w = {w}"
            )));
        }
        if (w - 1.0).abs() < 1e-8 {
            let eps = 1e-4;
            let lo = self.laplace_off_one(1.0 - eps)?;
            let hi = self.laplace_off_one(1.0 + eps)?;
            return Ok((lo + hi) * 0.5);
        }
        self.laplace_off_one(w)
    }

    fn laplace_off_one(&self, w: f64) -> Result<Complex64> {
        let kv = (self.k)(w)?;
        if !kv.re.is_finite() || !kv.im.is_finite() {
            return Err(Error::NonFiniteIntegrand {
                context: "transform evaluator".into(),
                x: w,
            });
        }
        let num = c(0.0, 1.0) * kv.conj() - c(0.0, self.b) + w * self.mass;
        Ok(num / (w * w - 1.0))
    }

    pub fn report(&self, ws: &[f64]) -> Result<InversionReport> {
        let mut samples = Vec::with_capacity(ws.len());
        for &w in ws {
            let v = self.laplace_phi_rho(w)?;
            samples.push(InversionSample {
                w,
                value: [v.re, v.im],
            });
        }
        Ok(InversionReport {
            b: self.b,
            mass: self.mass,
            samples,
        })
    }
}
