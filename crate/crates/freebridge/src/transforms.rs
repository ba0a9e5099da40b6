//! Transform routes between a classical law and its free companion.
//!
//! Three independent ways to reach the same complex numbers live here:
//!
//! * the Cauchy transform of an explicitly parameterized spectral density,
//!   together with functional inversion of its reciprocal on the upper
//!   imaginary axis ([`cauchy_transform`], [`voiculescu_from_measure`]);
//! * the Laplace-transform bridge that turns a classical characteristic
//!   exponent into a Voiculescu transform by integrating it against
//!   `e^{-tv}` ([`laplace_bijection`]);
//! * the closed-form exponent of the exponential-mixture map, obtained by
//!   swapping the characteristic kernel for its resolvent-style counterpart
//!   ([`upsilon_char_exponent`]).
//!
//! The generic random-integral mixer ([`random_integral_log_char`]) covers
//! arbitrary monotone time changes and is the base for the class-specific
//! maps built on top of this module.

use std::rc::Rc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::kernels::UpsilonKernel;
use crate::measures::{char_exponent, integrate_levy, LevyTriplet};
use crate::numerics::special::{bessel_j1, e1_scaled_complex, gamma0};
use crate::numerics::{
    complex_newton, finite_quad_endpoints, finite_quad_segmented, laplace_quad,
    EndpointSingularities, Quad, QuadraturePolicy,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Point mass of a probability measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecAtom {
    pub x: f64,
    pub mass: f64,
}

/// Absolutely continuous component kinds with known Cauchy transforms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistPiece {
    /// Semicircular density of the given center and radius, mass 1.
    Semicircle { center: f64, radius: f64 },
    /// sqrt(x(4-x)) / (2 pi x) on [0, 4], mass 1.
    MarchenkoPastur,
    /// scale / (pi ((x-loc)^2 + scale^2)), mass 1.
    CauchyDensity { loc: f64, scale: f64 },
    /// Piecewise-linear density through (x, density) samples.
    Tabulated { points: Vec<(f64, f64)> },
}

/// A probability measure on the line given by atoms plus density pieces.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<SpecAtom>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<DistPiece>,
}

const MASS_TOL: f64 = 1e-3;

fn trapezoid_mass(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}

impl DistributionSpec {
    pub fn atom(x: f64, mass: f64) -> Self {
        DistributionSpec {
            atoms: vec![SpecAtom { x, mass }],
            pieces: Vec::new(),
        }
    }

    pub fn piece(piece: DistPiece) -> Self {
        DistributionSpec {
            atoms: Vec::new(),
            pieces: vec![piece],
        }
    }

    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass).sum();
        let pieces: f64 = self
            .pieces
            .iter()
            .map(|p| match p {
                DistPiece::Tabulated { points } => trapezoid_mass(points),
                _ => 1.0,
            })
            .sum();
        atoms + pieces
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() && self.pieces.is_empty() {
            return Err(Error::InvalidMeasure("empty distribution".into()));
        }
        for a in &self.atoms {
            if !a.x.is_finite() || !a.mass.is_finite() || a.mass <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom mass {} at {} must be finite and positive",
                    a.mass, a.x
                )));
            }
        }
        for p in &self.pieces {
            match p {
                DistPiece::Semicircle { center, radius } => {
                    if !center.is_finite() || !(*radius > 0.0) || !radius.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "semicircle(center={center}, radius={radius})"
                        )));
                    }
                }
                DistPiece::MarchenkoPastur => {}
                DistPiece::CauchyDensity { loc, scale } => {
                    if !loc.is_finite() || !(*scale > 0.0) || !scale.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "cauchy_density(loc={loc}, scale={scale})"
                        )));
                    }
                }
                DistPiece::Tabulated { points } => {
                    if points.len() < 2 {
                        return Err(Error::InvalidMeasure(
                            "tabulated density needs at least two samples".into(),
                        ));
                    }
                    for w in points.windows(2) {
                        if !(w[1].0 > w[0].0) {
                            return Err(Error::InvalidMeasure(format!(
                                "tabulated abscissae must increase: {} then {}",
                                w[0].0, w[1].0
                            )));
                        }
                    }
                    for &(x, y) in points {
                        if !x.is_finite() || !y.is_finite() || y < 0.0 {
                            return Err(Error::InvalidMeasure(format!(
                                "tabulated sample ({x}, {y}) must be finite with density >= 0"
                            )));
                        }
                    }
                }
            }
        }
        let mass = self.total_mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!(
                "total mass {mass} differs from 1 by more than {MASS_TOL}"
            )));
        }
        Ok(())
    }
}

/// Square root of z^2 - r^2 on the open upper half plane, continuous there:
/// the product of principal roots of z - r and z + r (each has its argument
/// in (0, pi), so the product never crosses the principal cut).
fn halfplane_sqrt(z: Complex64, r: f64) -> Complex64 {
    (z - r).sqrt() * (z + r).sqrt()
}

fn g_semicircle(center: f64, radius: f64, z: Complex64) -> Complex64 {
    // rationalized from 2(w - sqrt(w^2 - R^2))/R^2, which cancels at large |w|
    let w = z - center;
    2.0 / (w + halfplane_sqrt(w, radius))
}

fn g_marchenko_pastur(z: Complex64) -> Complex64 {
    // rationalized from (z - sqrt(z(z-4)))/(2z); 1 - 4/z stays in the upper
    // half plane when z does, keeping the principal root continuous
    let s = (c(1.0, 0.0) - 4.0 / z).sqrt();
    2.0 / (z * (c(1.0, 0.0) + s))
}

fn tabulated_support(points: &[(f64, f64)]) -> (f64, f64) {
    (points[0].0, points[points.len() - 1].0)
}

fn g_tabulated(points: &[(f64, f64)], z: Complex64, policy: &QuadraturePolicy) -> Result<Complex64> {
    let (lo, hi) = tabulated_support(points);
    let dist = if z.re >= lo && z.re <= hi {
        z.im.abs()
    } else {
        (z - c(lo, 0.0)).norm().min((z - c(hi, 0.0)).norm())
    };
    let limit = 1e-3 * (hi - lo).abs().max(1.0);
    if dist < limit {
        return Err(Error::TooCloseToSupport {
            z,
            distance: dist,
            limit,
        });
    }
    let density = |x: f64| -> f64 {
        match points.binary_search_by(|p| p.0.partial_cmp(&x).unwrap()) {
            Ok(i) => points[i].1,
            Err(0) => points[0].1,
            Err(i) if i >= points.len() => points[points.len() - 1].1,
            Err(i) => {
                let (x0, y0) = points[i - 1];
                let (x1, y1) = points[i];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    };
    let breaks: Vec<f64> = points.iter().map(|p| p.0).collect();
    let q = finite_quad_segmented(|x| Ok(density(x) / (z - x)), &breaks, policy)?;
    Ok(q.value)
}

/// Evaluation valid on the open upper half plane only (no reflection).
fn g_upper(nu: &DistributionSpec, z: Complex64, policy: &QuadraturePolicy) -> Result<Complex64> {
    let mut g = c(0.0, 0.0);
    for a in &nu.atoms {
        g += a.mass / (z - a.x);
    }
    for p in &nu.pieces {
        g += match p {
            DistPiece::Semicircle { center, radius } => g_semicircle(*center, *radius, z),
            DistPiece::MarchenkoPastur => g_marchenko_pastur(z),
            DistPiece::CauchyDensity { loc, scale } => 1.0 / (z - loc + c(0.0, *scale)),
            DistPiece::Tabulated { points } => g_tabulated(points, z, policy)?,
        };
    }
    Ok(g)
}

/// Cauchy transform G(z) = integral of 1/(z - x) against the measure.
///
/// Defined off the real axis; the lower half plane is reached through the
/// reflection G(conj z) = conj G(z) that every real measure satisfies.
pub fn cauchy_transform(
    nu: &DistributionSpec,
    z: Complex64,
    policy: &QuadraturePolicy,
) -> Result<Complex64> {
    nu.validate()?;
    if z.im == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!(
            "Cauchy transform needs Im z != 0, got z = {z}"
        )));
    }
    if z.im > 0.0 {
        g_upper(nu, z, policy)
    } else {
        Ok(g_upper(nu, z.conj(), policy)?.conj())
    }
}

/// (1/(it)) G(1/(it)) = integral of 1/(1 - itx): the characteristic function
/// of the original law multiplied by an independent standard exponential.
pub fn restricted_cauchy_as_char(
    nu: &DistributionSpec,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Complex64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("restricted transform at t = {t}")));
    }
    let z = 1.0 / c(0.0, t);
    Ok(cauchy_transform(nu, z, policy)? * z)
}

/// Closed-form characteristic function of the measure, where one exists.
pub fn char_fn(nu: &DistributionSpec, s: f64) -> Result<Complex64> {
    let mut phi = c(0.0, 0.0);
    for a in &nu.atoms {
        phi += a.mass * c(0.0, s * a.x).exp();
    }
    for p in &nu.pieces {
        phi += match p {
            DistPiece::Semicircle { center, radius } => {
                let rs = radius * s.abs();
                let radial = if rs < 1e-8 {
                    1.0 - rs * rs / 8.0
                } else {
                    2.0 * bessel_j1(rs) / rs
                };
                radial * c(0.0, s * center).exp()
            }
            DistPiece::CauchyDensity { loc, scale } => c(-scale * s.abs(), s * loc).exp(),
            DistPiece::MarchenkoPastur => {
                return Err(Error::NoClosedFormCharFn {
                    kind: "marchenko_pastur".into(),
                })
            }
            DistPiece::Tabulated { .. } => {
                return Err(Error::NoClosedFormCharFn {
                    kind: "tabulated".into(),
                })
            }
        };
    }
    Ok(phi)
}

/// Both sides of the Laplace/Cauchy duality at t > 0:
/// lhs = integral of phi(s) e^{-ts} over s > 0, rhs = conj(i G(it)).
pub fn laplace_char_identity(
    nu: &DistributionSpec,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<(Complex64, Complex64)> {
    nu.validate()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "Laplace/Cauchy comparison needs t > 0, got {t}"
        )));
    }
    let lhs = laplace_quad(|s| char_fn(nu, s), t, policy)?.value;
    let g = cauchy_transform(nu, c(0.0, t), policy)?;
    let rhs = (c(0.0, 1.0) * g).conj();
    Ok((lhs, rhs))
}

/// Log-characteristic function of the exponential mixture of the law:
/// ita - sigma^2 t^2 plus the integral of 1/(1-itx) - 1 - itx 1_{|x|<=1}.
pub fn upsilon_char_exponent(
    mu: &LevyTriplet,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    mu.validate()?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("exponent at t = {t}")));
    }
    if t == 0.0 {
        return Ok(Quad::zero());
    }
    let mut q = if mu.jumps.is_empty() {
        Quad::zero()
    } else {
        integrate_levy(&UpsilonKernel { t }, &mu.jumps, policy)?
    };
    q.value += c(-mu.gauss_var * t * t, mu.shift * t);
    Ok(q)
}

/// Voiculescu transform of the free companion, evaluated at it for t > 0:
/// i t^2 times the Laplace transform of v -> char_exponent(mu, -v).
pub fn laplace_bijection(mu: &LevyTriplet, t: f64, policy: &QuadraturePolicy) -> Result<Quad> {
    mu.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "Laplace-route transform needs t > 0, got {t}"
        )));
    }
    let q = laplace_quad(|v| char_exponent(mu, -v, policy).map(|r| r.value), t, policy)?;
    Ok(q.scale(c(0.0, t * t)))
}

/// The Laplace route re-parameterized to the negative real axis:
/// for t < 0, it V(1/(it)) equals [`upsilon_char_exponent`] at t.
pub fn upsilon_via_laplace(mu: &LevyTriplet, t: f64, policy: &QuadraturePolicy) -> Result<Quad> {
    if !(t < 0.0) {
        return Err(Error::Domain(format!(
            "re-parameterized Laplace route needs t < 0, got {t}"
        )));
    }
    let v = laplace_bijection(mu, -1.0 / t, policy)?;
    Ok(v.scale(c(0.0, t)))
}

/// Smallest t for which the reciprocal-transform root find is guaranteed.
pub fn t_min(nu: &DistributionSpec) -> f64 {
    nu.pieces
        .iter()
        .map(|p| match p {
            DistPiece::MarchenkoPastur => 0.1,
            _ => 0.0,
        })
        .fold(0.0, f64::max)
}

fn dominant_kind(nu: &DistributionSpec) -> String {
    match nu.pieces.first() {
        Some(DistPiece::Semicircle { .. }) => "semicircle".into(),
        Some(DistPiece::MarchenkoPastur) => "marchenko_pastur".into(),
        Some(DistPiece::CauchyDensity { .. }) => "cauchy_density".into(),
        Some(DistPiece::Tabulated { .. }) => "tabulated".into(),
        None => "atoms".into(),
    }
}

/// Continuation of G down the imaginary axis (y may be <= 0), piece kinds
/// permitting. Atoms continue everywhere off their pole; the Cauchy density
/// continues until its lower pole; a centered semicircle stays a closed real
/// formula on the whole axis. Other kinds only exist for y > 0.
fn g_axis(nu: &DistributionSpec, y: f64, policy: &QuadraturePolicy) -> Result<Complex64> {
    if y > 0.0 {
        return g_upper(nu, c(0.0, y), policy);
    }
    let mut g = c(0.0, 0.0);
    for a in &nu.atoms {
        g += a.mass / (c(0.0, y) - a.x);
    }
    for p in &nu.pieces {
        g += match p {
            DistPiece::Semicircle { center, radius } if *center == 0.0 => {
                let hyp = (y * y + radius * radius).sqrt();
                if y >= 0.0 {
                    c(0.0, -2.0 / (y + hyp))
                } else {
                    c(0.0, 2.0 * (y - hyp) / (radius * radius))
                }
            }
            DistPiece::CauchyDensity { loc, scale } if y + scale > 1e-12 => {
                1.0 / (c(-loc, y + scale))
            }
            _ => {
                return Err(Error::Domain(format!(
                    "no analytic continuation to iy with y = {y} for this density kind"
                )))
            }
        };
    }
    Ok(g)
}

/// F^{-1}(it) - it where F = 1/G, for t > 0 above the kind's threshold.
///
/// The root is located in two stages: a scan of F(iy) - it along the
/// imaginary axis (where F is a closed continuous formula for the supported
/// kinds), then either an on-axis contraction when the residual already
/// points at an axis root, or a damped complex Newton polish in the upper
/// half plane when the root carries a real part.
pub fn voiculescu_from_measure(
    nu: &DistributionSpec,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Complex64> {
    nu.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "transform inversion needs t > 0, got {t}"
        )));
    }
    let floor = t_min(nu);
    if t < floor {
        return Err(Error::BelowTMin {
            t,
            t_min: floor,
            kind: dominant_kind(nu),
        });
    }
    let target = c(0.0, t);
    let merit = |y: f64| -> Option<f64> {
        let g = g_axis(nu, y, policy).ok()?;
        if g.norm() < 1e-300 {
            return None;
        }
        Some((1.0 / g - target).norm())
    };

    let lo = -(1.0 / t) - 8.0;
    let hi = t + 1.0 / t + 8.0;
    let n = 1200;
    let mut best_y = t + 1.0 / t;
    let mut best_m = f64::INFINITY;
    for k in 0..=n {
        let y = lo + (hi - lo) * k as f64 / n as f64;
        if let Some(m) = merit(y) {
            if m < best_m {
                best_m = m;
                best_y = y;
            }
        }
    }
    // local contraction of the scan minimum (golden section)
    let step = (hi - lo) / n as f64;
    let (mut a, mut b) = (best_y - step, best_y + step);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut m1, mut m2) = (merit(x1), merit(x2));
    for _ in 0..160 {
        match (m1, m2) {
            (Some(v1), Some(v2)) if v1 < v2 => {
                b = x2;
                x2 = x1;
                m2 = m1;
                x1 = b - phi * (b - a);
                m1 = merit(x1);
            }
            (Some(_), Some(_)) => {
                a = x1;
                x1 = x2;
                m1 = m2;
                x2 = a + phi * (b - a);
                m2 = merit(x2);
            }
            _ => break,
        }
    }
    let y_star = 0.5 * (a + b);
    let m_star = merit(y_star).unwrap_or(f64::INFINITY);
    let residual_tol = 1e-12 * t.max(1.0);
    if m_star <= residual_tol.max(1e-11 * t.max(1.0)) {
        return Ok(c(0.0, y_star) - target);
    }
    // off-axis root: polish in the open upper half plane
    let z0 = if y_star > 1e-6 {
        c(0.0, y_star)
    } else {
        c(0.0, t + 1.0 / t)
    };
    let root = complex_newton(
        |z| {
            if z.im <= 0.0 {
                return Err(Error::Domain(format!(
                    "iterate {z} left the upper half plane"
                )));
            }
            let g = g_upper(nu, z, policy)?;
            Ok(1.0 / g - target)
        },
        z0,
        residual_tol,
    )?;
    Ok(root - target)
}

/// Monotone time changes used by the random-integral maps, with enough
/// structure for exact weights |r'| under the integral sign.
#[derive(Clone)]
pub enum TimeChange {
    /// s
    Identity,
    /// e^{-s}
    ExpDecay,
    /// 1 - e^{-s}
    OneMinusExpDecay,
    /// e^{-v} - v Gamma(0, v), decreasing from 1 to 0 with -r' = Gamma(0, v)
    UpsilonTail,
    /// Gamma(0, w), decreasing with -r' = e^{-w}/w
    Gamma0Tail,
    /// Arbitrary map with its |derivative| supplied by the caller.
    Custom {
        name: String,
        f: Rc<dyn Fn(f64) -> Result<f64>>,
        weight: Rc<dyn Fn(f64) -> Result<f64>>,
    },
}

impl std::fmt::Debug for TimeChange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

impl TimeChange {
    pub fn label(&self) -> String {
        match self {
            TimeChange::Identity => "s".into(),
            TimeChange::ExpDecay => "exp(-s)".into(),
            TimeChange::OneMinusExpDecay => "1 - exp(-s)".into(),
            TimeChange::UpsilonTail => "exp(-v) - v Gamma(0, v)".into(),
            TimeChange::Gamma0Tail => "Gamma(0, w)".into(),
            TimeChange::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        match self {
            TimeChange::Identity => Ok(s),
            TimeChange::ExpDecay => Ok((-s).exp()),
            TimeChange::OneMinusExpDecay => Ok(-(-s).exp_m1()),
            TimeChange::UpsilonTail => Ok((-s).exp() - s * gamma0(s)?),
            TimeChange::Gamma0Tail => gamma0(s),
            TimeChange::Custom { f, .. } => f(s),
        }
    }

    /// |r'(s)| when used as the mixing measure.
    pub fn weight(&self, s: f64) -> Result<f64> {
        match self {
            TimeChange::Identity => Ok(1.0),
            TimeChange::ExpDecay | TimeChange::OneMinusExpDecay => Ok((-s).exp()),
            TimeChange::UpsilonTail => gamma0(s),
            TimeChange::Gamma0Tail => Ok((-s).exp() / s),
            TimeChange::Custom { weight, .. } => weight(s),
        }
    }

    /// e^{s} |r'(s)|, stable where the plain weight underflows.
    fn weight_scaled(&self, s: f64) -> Result<f64> {
        match self {
            TimeChange::ExpDecay | TimeChange::OneMinusExpDecay => Ok(1.0),
            TimeChange::UpsilonTail => Ok(e1_scaled_complex(c(s, 0.0))?.re),
            TimeChange::Gamma0Tail => Ok(1.0 / s),
            _ => Ok(s.exp() * self.weight(s)?),
        }
    }

    fn is_identity(&self) -> bool {
        matches!(self, TimeChange::Identity)
    }

    fn is_exp_decay(&self) -> bool {
        matches!(self, TimeChange::ExpDecay)
    }
}

/// The data of a random-integral map: integrand h, monotone time change r
/// with its declared direction, over the interval (a, b].
#[derive(Debug, Clone)]
pub struct IntegrandSpec {
    pub h: TimeChange,
    pub r: TimeChange,
    pub decreasing: bool,
    pub interval: (f64, f64),
}

impl IntegrandSpec {
    pub fn new(h: TimeChange, r: TimeChange, decreasing: bool, interval: (f64, f64)) -> Self {
        IntegrandSpec {
            h,
            r,
            decreasing,
            interval,
        }
    }

    /// Sampled monotonicity check of r in its declared direction.
    fn check_monotone(&self) -> Result<()> {
        let (a, b) = self.interval;
        let lo = if a <= 0.0 { 1e-6 } else { a };
        let hi = if b.is_finite() { b } else { lo + 24.0 };
        let n = 16;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=n {
            let s = lo + (hi - lo) * k as f64 / n as f64;
            let v = self.r.eval(s)?;
            if let Some((sp, vp)) = prev {
                let rising = v - vp;
                let bad = if self.decreasing {
                    rising > 1e-12 * vp.abs().max(1.0)
                } else {
                    rising < -1e-12 * vp.abs().max(1.0)
                };
                if bad {
                    let _ = sp;
                    return Err(Error::NonMonotoneTimeChange { s });
                }
            }
            prev = Some((s, v));
        }
        Ok(())
    }
}

/// Log-characteristic function of the random-integral image of the law:
/// the integral of char_exponent(mu, h(s) t) against |dr(s)| over (a, b].
pub fn random_integral_log_char(
    spec: &IntegrandSpec,
    mu: &LevyTriplet,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    mu.validate()?;
    spec.check_monotone()?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("random integral at t = {t}")));
    }
    if t == 0.0 {
        return Ok(Quad::zero());
    }
    let (a, b) = spec.interval;
    if !(b > a) {
        return Err(Error::Domain(format!("empty interval ({a}, {b}]")));
    }
    let psi = |s: f64| -> Result<Complex64> {
        char_exponent(mu, spec.h.eval(s)? * t, policy).map(|q| q.value)
    };

    if b.is_finite() {
        let q = finite_quad_segmented(|s| Ok(psi(s)? * spec.r.weight(s)?), &[a, b], policy)?;
        return Ok(q);
    }
    if a != 0.0 {
        return Err(Error::Domain(format!(
            "unbounded intervals must start at 0, got ({a}, inf]"
        )));
    }
    if spec.h.is_exp_decay() && spec.r.is_identity() {
        // x = e^{-s} turns the flat-weight mixture into an integral on (0, 1]
        // of char_exponent(mu, xt)/x, bounded or integrably singular at 0
        let q = finite_quad_endpoints(
            |x| Ok(char_exponent(mu, x * t, policy)?.value / x),
            0.0,
            1.0,
            EndpointSingularities {
                left: true,
                right: false,
            },
            policy,
        )?;
        return Ok(q);
    }
    // remaining supported weights all decay like e^{-s} (up to an integrable
    // factor), so fold e^{s} into the integrand and Laplace-transform it
    laplace_quad(|s| Ok(psi(s)? * spec.r.weight_scaled(s)?), 1.0, policy)
}

/// Which of the three computation routes produced a grid of values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformRoute {
    Laplace,
    Kernel,
    CauchyInversion,
}

impl TransformRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransformRoute::Laplace => "laplace",
            TransformRoute::Kernel => "kernel",
            TransformRoute::CauchyInversion => "cauchy_inversion",
        }
    }
}

/// Values of a transform along a positive grid, tagged with their route.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformGrid {
    pub route: TransformRoute,
    pub tolerance: f64,
    pub t_points: Vec<f64>,
    /// (re, im) per grid point.
    pub values: Vec<[f64; 2]>,
}

impl TransformGrid {
    pub fn validate(&self) -> Result<()> {
        if self.t_points.len() != self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} abscissae but {} values",
                self.t_points.len(),
                self.values.len()
            )));
        }
        for w in self.t_points.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "grid points must strictly increase: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for (&t, v) in self.t_points.iter().zip(&self.values) {
            if !(t > 0.0) || !v[0].is_finite() || !v[1].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "grid entry t = {t}, value = ({}, {}) out of range",
                    v[0], v[1]
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{FiniteMeasure, ParametricLaw};
    use proptest::prelude::*;

    fn policy() -> QuadraturePolicy {
        QuadraturePolicy::default()
    }

    fn semicircle(center: f64, radius: f64) -> DistributionSpec {
        DistributionSpec::piece(DistPiece::Semicircle { center, radius })
    }

    fn wigner() -> DistributionSpec {
        semicircle(0.0, 2.0)
    }

    fn free_cauchy() -> DistributionSpec {
        DistributionSpec::piece(DistPiece::CauchyDensity {
            loc: 0.0,
            scale: 1.0,
        })
    }

    fn free_poisson() -> DistributionSpec {
        DistributionSpec::piece(DistPiece::MarchenkoPastur)
    }

    fn tabulated_semicircle(n: usize) -> DistributionSpec {
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|k| {
                let x = -2.0 + 4.0 * k as f64 / n as f64;
                (x, (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI))
            })
            .collect();
        DistributionSpec::piece(DistPiece::Tabulated { points: pts })
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn cauchy_transform_of_point_mass() {
        let g = cauchy_transform(&DistributionSpec::atom(0.0, 1.0), c(0.0, 1.0), &policy()).unwrap();
        assert!((g - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn semicircle_transform_closed_form() {
        let g = cauchy_transform(&wigner(), c(0.0, 1.0), &policy()).unwrap();
        let expect = c(0.0, (1.0 - 5f64.sqrt()) / 2.0);
        assert!((g - expect).norm() < 1e-14, "got {g}");
    }

    #[test]
    fn semicircle_transform_matches_tabulated_quadrature() {
        let nu = wigner();
        let tab = tabulated_semicircle(4000);
        for z in [c(0.0, 1.0), c(2.0, 2.0), c(-1.0, 0.5)] {
            let g = cauchy_transform(&nu, z, &policy()).unwrap();
            let gq = cauchy_transform(&tab, z, &policy()).unwrap();
            assert!((g - gq).norm() < 2e-3, "z = {z}: {g} vs {gq}");
        }
    }

    #[test]
    fn cauchy_density_transform_on_the_axis() {
        let nu = free_cauchy();
        for t in [0.5, 2.0] {
            let g = cauchy_transform(&nu, c(0.0, t), &policy()).unwrap();
            let expect = 1.0 / c(0.0, t + 1.0);
            assert!((g - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn lower_half_plane_reflects() {
        for nu in [wigner(), free_poisson()] {
            let z = c(0.7, 1.3);
            let g = cauchy_transform(&nu, z, &policy()).unwrap();
            let gc = cauchy_transform(&nu, z.conj(), &policy()).unwrap();
            assert!((g.conj() - gc).norm() < 1e-15);
        }
    }

    #[test]
    fn transform_normalization_at_infinity() {
        // it G(it) -> 1; the gap decays like first-moment / t
        for nu in [wigner(), free_cauchy(), free_poisson()] {
            let gap = |t: f64| {
                let g = cauchy_transform(&nu, c(0.0, t), &policy()).unwrap();
                (c(0.0, t) * g - 1.0).norm()
            };
            let g3 = gap(1e3);
            let g4 = gap(1e4);
            assert!(g3 < 3e-3, "gap at 1e3 is {g3}");
            assert!(g4 < 1.2 * g3 / 10.0 + 1e-12, "no decay: {g3} then {g4}");
        }
    }

    #[test]
    fn restricted_transform_of_atoms() {
        let p = policy();
        for t in [-1.0, 0.3, 2.0] {
            let v = restricted_cauchy_as_char(&DistributionSpec::atom(0.0, 1.0), t, &p).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 1e-14);
            let v1 = restricted_cauchy_as_char(&DistributionSpec::atom(1.0, 1.0), t, &p).unwrap();
            assert!((v1 - 1.0 / c(1.0, -t)).norm() < 1e-14);
        }
    }

    #[test]
    fn restricted_transform_semicircle_conjugate_pair() {
        let p = policy();
        let plus = restricted_cauchy_as_char(&wigner(), 1.0, &p).unwrap();
        let minus = restricted_cauchy_as_char(&wigner(), -1.0, &p).unwrap();
        assert!((plus - minus.conj()).norm() < 1e-14);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((plus - c(golden, 0.0)).norm() < 1e-14, "got {plus}");
    }

    #[test]
    fn restricted_transform_tends_to_one() {
        let v = restricted_cauchy_as_char(&wigner(), 1e-6, &policy()).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn laplace_char_identity_point_masses() {
        let p = policy();
        let (l, r) = laplace_char_identity(&DistributionSpec::atom(0.0, 1.0), 2.0, &p).unwrap();
        assert!(close(l, c(0.5, 0.0), 1e-10) && close(r, c(0.5, 0.0), 1e-14));
        let (l, r) = laplace_char_identity(&DistributionSpec::atom(1.0, 1.0), 1.0, &p).unwrap();
        assert!(close(l, c(0.5, 0.5), 1e-10) && close(r, c(0.5, 0.5), 1e-14));
    }

    #[test]
    fn laplace_char_identity_cauchy_and_semicircle() {
        let p = policy();
        let (l, r) = laplace_char_identity(&free_cauchy(), 1.0, &p).unwrap();
        assert!(close(l, c(0.5, 0.0), 1e-10) && close(r, c(0.5, 0.0), 1e-14));
        let (l, r) = laplace_char_identity(&wigner(), 1.0, &p).unwrap();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((l - r).norm() < 1e-8, "lhs {l} vs rhs {r}");
        assert!(close(r, c(golden, 0.0), 1e-12));
    }

    #[test]
    fn laplace_char_identity_rejects_kinds_without_char_fn() {
        match laplace_char_identity(&free_poisson(), 1.0, &policy()) {
            Err(Error::NoClosedFormCharFn { kind }) => assert_eq!(kind, "marchenko_pastur"),
            other => panic!("expected missing-char-fn error, got {other:?}"),
        }
    }

    #[test]
    fn upsilon_exponent_gaussian_and_atom() {
        let p = policy();
        let g = upsilon_char_exponent(&LevyTriplet::gaussian(0.0, 1.0), 1.0, &p).unwrap();
        assert!((g.value - c(-1.0, 0.0)).norm() < 1e-14);
        let mu = LevyTriplet {
            shift: 1.0,
            gauss_var: 0.0,
            jumps: vec![crate::measures::LevyPiece::Finite(FiniteMeasure::atom(1.0, 1.0))],
        };
        let v = upsilon_char_exponent(&mu, 1.0, &p).unwrap();
        assert!((v.value - c(-0.5, 0.5)).norm() < 1e-14, "got {}", v.value);
    }

    #[test]
    fn upsilon_exponent_fixes_the_cauchy_law() {
        let p = policy();
        let mu = ParametricLaw::StandardCauchy.to_triplet(&p).unwrap();
        for t in [-1.5, 0.7, 3.0] {
            let v = upsilon_char_exponent(&mu, t, &p).unwrap();
            assert!(
                (v.value - c(-t.abs(), 0.0)).norm() < 1e-8 * t.abs().max(1.0),
                "t = {t}: {}",
                v.value
            );
        }
    }

    #[test]
    fn laplace_route_on_the_three_named_laws() {
        let p = policy();
        let gauss = ParametricLaw::Gaussian {
            mean: 0.0,
            variance: 1.0,
        }
        .to_triplet(&p)
        .unwrap();
        for t in [0.7, 2.0] {
            let v = laplace_bijection(&gauss, t, &p).unwrap();
            assert!((v.value - c(0.0, -1.0 / t)).norm() < 1e-8, "t = {t}: {}", v.value);
        }
        let cauchy = ParametricLaw::StandardCauchy.to_triplet(&p).unwrap();
        for t in [1.0, 3.0] {
            let v = laplace_bijection(&cauchy, t, &p).unwrap();
            assert!((v.value - c(0.0, -1.0)).norm() < 1e-8, "t = {t}: {}", v.value);
        }
        let poisson = ParametricLaw::Poisson {
            rate: 1.0,
            jump: 1.0,
        }
        .to_triplet(&p)
        .unwrap();
        let v1 = laplace_bijection(&poisson, 1.0, &p).unwrap();
        assert!((v1.value - c(0.5, -0.5)).norm() < 1e-8, "got {}", v1.value);
        let v2 = laplace_bijection(&poisson, 2.0, &p).unwrap();
        assert!((v2.value - c(0.8, -0.4)).norm() < 1e-8, "got {}", v2.value);
    }

    #[test]
    fn laplace_route_reparameterized_matches_kernel_route() {
        let p = policy();
        let laws = [
            ParametricLaw::Gaussian {
                mean: 1.0,
                variance: 2.0,
            },
            ParametricLaw::StandardCauchy,
            ParametricLaw::Poisson {
                rate: 1.0,
                jump: 1.0,
            },
            ParametricLaw::Stable {
                p: 0.5,
                c: 1.0,
                beta: 1.0,
                shift: 0.0,
            },
        ];
        for law in laws {
            let mu = law.to_triplet(&p).unwrap();
            for t in [-0.5, -2.0] {
                let lhs = upsilon_via_laplace(&mu, t, &p).unwrap().value;
                let rhs = upsilon_char_exponent(&mu, t, &p).unwrap().value;
                assert!(
                    (lhs - rhs).norm() < 1e-6 * rhs.norm().max(1.0),
                    "{law:?} at t = {t}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn inversion_route_semicircle() {
        let p = policy();
        let v = voiculescu_from_measure(&wigner(), 2.0, &p).unwrap();
        assert!((v - c(0.0, -0.5)).norm() < 1e-9, "got {v}");
        // root below the real axis, reached along the imaginary axis
        let v = voiculescu_from_measure(&wigner(), 0.5, &p).unwrap();
        assert!((v - c(0.0, -2.0)).norm() < 1e-9, "got {v}");
    }

    #[test]
    fn inversion_route_cauchy() {
        let p = policy();
        for t in [0.4, 1.0, 2.0] {
            let v = voiculescu_from_measure(&free_cauchy(), t, &p).unwrap();
            assert!((v - c(0.0, -1.0)).norm() < 1e-9, "t = {t}: {v}");
        }
    }

    #[test]
    fn inversion_route_marchenko_pastur() {
        let p = policy();
        let v = voiculescu_from_measure(&free_poisson(), 2.0, &p).unwrap();
        assert!((v - c(0.8, -0.4)).norm() < 1e-6, "got {v}");
        match voiculescu_from_measure(&free_poisson(), 0.05, &p) {
            Err(Error::BelowTMin { t_min, .. }) => assert!((t_min - 0.1).abs() < 1e-12),
            other => panic!("expected threshold error, got {other:?}"),
        }
    }

    #[test]
    fn route_equivalence_on_matched_pairs() {
        let p = policy();
        let pairs: [(ParametricLaw, DistributionSpec); 3] = [
            (
                ParametricLaw::Gaussian {
                    mean: 0.0,
                    variance: 1.0,
                },
                wigner(),
            ),
            (ParametricLaw::StandardCauchy, free_cauchy()),
            (
                ParametricLaw::Poisson {
                    rate: 1.0,
                    jump: 1.0,
                },
                free_poisson(),
            ),
        ];
        for (law, nu) in pairs {
            let mu = law.to_triplet(&p).unwrap();
            for t in [0.5, 1.0, 2.0, 5.0] {
                let a = laplace_bijection(&mu, t, &p).unwrap().value;
                let b = voiculescu_from_measure(&nu, t, &p).unwrap();
                assert!(
                    (a - b).norm() < 1e-6 * b.norm().max(1.0),
                    "{law:?} at t = {t}: laplace {a} vs inversion {b}"
                );
            }
        }
    }

    #[test]
    fn dilation_scales_the_transform() {
        let p = policy();
        let t = 1.5;
        let base = voiculescu_from_measure(&wigner(), t, &p).unwrap();
        for c_ in [0.5, 2.0] {
            let scaled = voiculescu_from_measure(&semicircle(0.0, 2.0 * c_), c_ * t, &p).unwrap();
            assert!(
                (scaled - c_ * base).norm() < 1e-9,
                "c = {c_}: {scaled} vs {}",
                c_ * base
            );
        }
    }

    #[test]
    fn tabulated_evaluation_near_support_is_rejected() {
        let tab = tabulated_semicircle(4000);
        match cauchy_transform(&tab, c(0.0, 1e-4), &policy()) {
            Err(Error::TooCloseToSupport { .. }) => {}
            other => panic!("expected closeness error, got {other:?}"),
        }
    }

    #[test]
    fn random_integral_gaussian_mixtures() {
        let p = policy();
        let gauss = LevyTriplet::gaussian(0.0, 1.0);
        for t in [1.0, 2.5] {
            let poissonized = IntegrandSpec::new(
                TimeChange::Identity,
                TimeChange::OneMinusExpDecay,
                false,
                (0.0, f64::INFINITY),
            );
            let v = random_integral_log_char(&poissonized, &gauss, t, &p).unwrap();
            assert!((v.value - c(-t * t, 0.0)).norm() < 1e-8 * t * t, "t = {t}: {}", v.value);
        }
        let unit = IntegrandSpec::new(TimeChange::Identity, TimeChange::Identity, false, (0.0, 1.0));
        let v = random_integral_log_char(&unit, &gauss, 3.0, &p).unwrap();
        assert!((v.value - c(-1.5, 0.0)).norm() < 1e-9, "got {}", v.value);
        let urbanik = IntegrandSpec::new(
            TimeChange::ExpDecay,
            TimeChange::Identity,
            false,
            (0.0, f64::INFINITY),
        );
        let v = random_integral_log_char(&urbanik, &gauss, 2.0, &p).unwrap();
        assert!((v.value - c(-1.0, 0.0)).norm() < 1e-9, "got {}", v.value);
    }

    #[test]
    fn random_integral_rejects_non_monotone_claims() {
        let wobble = TimeChange::Custom {
            name: "sin".into(),
            f: Rc::new(|s| Ok(s.sin())),
            weight: Rc::new(|s| Ok(s.cos().abs())),
        };
        let spec = IntegrandSpec::new(TimeChange::Identity, wobble, false, (0.0, 20.0));
        match random_integral_log_char(&spec, &LevyTriplet::gaussian(0.0, 1.0), 1.0, &policy()) {
            Err(Error::NonMonotoneTimeChange { .. }) => {}
            other => panic!("expected monotonicity error, got {other:?}"),
        }
        let misdeclared =
            IntegrandSpec::new(TimeChange::Identity, TimeChange::Identity, true, (0.0, 1.0));
        match random_integral_log_char(&misdeclared, &LevyTriplet::gaussian(0.0, 1.0), 1.0, &policy())
        {
            Err(Error::NonMonotoneTimeChange { .. }) => {}
            other => panic!("expected monotonicity error, got {other:?}"),
        }
    }

    #[test]
    fn grid_validation() {
        let mut grid = TransformGrid {
            route: TransformRoute::Laplace,
            tolerance: 1e-6,
            t_points: vec![0.5, 1.0, 2.0],
            values: vec![[0.0, -2.0], [0.0, -1.0], [0.0, -0.5]],
        };
        grid.validate().unwrap();
        grid.t_points[2] = 0.75;
        assert!(grid.validate().is_err());
        grid.t_points[2] = 2.0;
        grid.values.pop();
        assert!(grid.validate().is_err());
    }

    #[test]
    fn grid_and_spec_serde_roundtrip() {
        let grid = TransformGrid {
            route: TransformRoute::CauchyInversion,
            tolerance: 1e-8,
            t_points: vec![1.0, 2.0],
            values: vec![[0.1, -0.9], [0.2, -0.4]],
        };
        let text = serde_json::to_string(&grid).unwrap();
        assert!(text.contains("cauchy_inversion"));
        let back: TransformGrid = serde_json::from_str(&text).unwrap();
        assert_eq!(back.t_points, grid.t_points);

        let nu = free_poisson();
        let text = serde_json::to_string(&nu).unwrap();
        assert_eq!(text, r#"{"pieces":[{"kind":"marchenko_pastur"}]}"#);
        let back: DistributionSpec = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        let mixed: DistributionSpec = serde_json::from_str(
            r#"{"atoms":[{"x":0.0,"mass":0.5},{"x":1.0,"mass":0.5}]}"#,
        )
        .unwrap();
        mixed.validate().unwrap();
        assert!((restricted_cauchy_as_char(&mixed, 1.0, &policy()).unwrap()
            - (c(0.5, 0.0) + 0.5 / c(1.0, -1.0)))
        .norm()
            < 1e-14);
    }

    #[test]
    fn spec_validation_rejects_bad_inputs() {
        assert!(DistributionSpec::default().validate().is_err());
        assert!(DistributionSpec::atom(0.0, -1.0).validate().is_err());
        assert!(DistributionSpec::piece(DistPiece::Semicircle {
            center: 0.0,
            radius: -2.0
        })
        .validate()
        .is_err());
        assert!(DistributionSpec::atom(0.0, 0.7).validate().is_err());
        let bad_tab = DistributionSpec::piece(DistPiece::Tabulated {
            points: vec![(0.0, 1.0), (0.0, 1.0)],
        });
        assert!(bad_tab.validate().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn transform_has_negative_imaginary_part_upstairs(
            re in -3.0f64..3.0,
            im in 0.05f64..4.0,
            which in 0usize..3,
        ) {
            let nu = match which {
                0 => wigner(),
                1 => free_cauchy(),
                _ => free_poisson(),
            };
            let g = cauchy_transform(&nu, c(re, im), &policy()).unwrap();
            prop_assert!(g.im < 0.0, "G({re}, {im}) = {g}");
        }

        #[test]
        fn laplace_route_is_additive_in_the_triplet(
            a1 in -1.0f64..1.0,
            v1 in 0.1f64..2.0,
            a2 in -1.0f64..1.0,
            rate in 0.2f64..1.5,
        ) {
            let p = policy();
            let mu1 = LevyTriplet { shift: a1, gauss_var: v1, jumps: vec![] };
            let mu2 = LevyTriplet {
                shift: a2 + rate,
                gauss_var: 0.0,
                jumps: vec![crate::measures::LevyPiece::Finite(FiniteMeasure::atom(1.0, rate))],
            };
            let sum = LevyTriplet {
                shift: mu1.shift + mu2.shift,
                gauss_var: mu1.gauss_var + mu2.gauss_var,
                jumps: mu2.jumps.clone(),
            };
            let t = 1.0;
            let lhs = laplace_bijection(&sum, t, &p).unwrap().value;
            let rhs = laplace_bijection(&mu1, t, &p).unwrap().value
                + laplace_bijection(&mu2, t, &p).unwrap().value;
            prop_assert!((lhs - rhs).norm() < 1e-8 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
    }
}
