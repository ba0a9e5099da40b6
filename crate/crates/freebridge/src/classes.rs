//! Distinguished subclasses of the infinitely divisible laws and their free
//! companions: shrink-limit laws (class U), selfdecomposable laws (class L),
//! stable laws, and compound Poisson laws.
//!
//! For each class there are two independent evaluations of the free
//! transform: a closed-form kernel integrated against the jump measure
//! ([`free_sselfdec_kernel`], [`free_selfdec_kernel`], [`free_stable_v`],
//! [`free_compound_poisson_v`]) and the Laplace bridge applied to the class's
//! classical log-characteristic function ([`laplace_route`] over
//! [`sselfdec_log_char`], [`selfdec_log_char`],
//! [`classical_stable_log_char`]). The check operations
//! ([`exp_poisson_identity`], [`pushforward_check`],
//! [`composition_identity_check`]) pit the two sides of a law-level identity
//! against each other and report both.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::kernels::{
    FnKernel, FreeSDKernel, FreeSSKernel, SSelfdecKernel, SelfdecKernel,
};
use crate::measures::{
    integrate_finite, integrate_levy, FiniteMeasure, LevyPiece, LevyTriplet, ParametricLaw,
};
use crate::nevanlinna::{kernel_eval, NevanlinnaPair};
use crate::numerics::special::{e1_scaled_complex, gamma0, gamma_fn, EULER_GAMMA};
use crate::numerics::{finite_quad, laplace_quad, Quad, QuadraturePolicy};
use crate::transforms::{random_integral_log_char, IntegrandSpec, TimeChange};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest numerically accepted value of the log tail moment
/// int_{|x|>1} log|x| M(dx); beyond it the law is treated as outside the
/// domain of the selfdecomposable mapping.
const LOG_MOMENT_CAP: f64 = 1e8;

/// Gamma(0, x) = int_x^inf e^{-s}/s ds for x > 0.
pub fn incomplete_gamma0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "incomplete gamma needs x > 0, got {x}"
        )));
    }
    gamma0(x)
}

/// The shrink-map time change r_u(v) = e^{-v} - v Gamma(0, v), decreasing
/// from 1 at the origin to 0 at infinity with -r_u' = Gamma(0, v).
pub fn time_change_u(v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("time change needs v > 0, got {v}")));
    }
    Ok((-v).exp() - v * gamma0(v)?)
}

/// Parameters of a non-Gaussian stable law: index p in (0, 2) (p = 1 is its
/// own formula branch), scale c > 0, skewness beta in [-1, 1], shift.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StableParams {
    pub p: f64,
    pub c: f64,
    pub beta: f64,
    pub shift: f64,
}

impl StableParams {
    pub fn new(p: f64, c: f64, beta: f64, shift: f64) -> Result<Self> {
        let params = StableParams { p, c, beta, shift };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "stable index p = {} outside (0, 2); the Gaussian end is a separate law",
                self.p
            )));
        }
        if !(self.c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stable scale c = {} must be positive",
                self.c
            )));
        }
        if !(self.beta >= -1.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "stable skewness beta = {} outside [-1, 1]",
                self.beta
            )));
        }
        if !self.shift.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "stable shift {} not finite",
                self.shift
            )));
        }
        Ok(())
    }

    fn is_unit_index(&self) -> bool {
        (self.p - 1.0).abs() <= 1e-9
    }
}

/// int_{|x|>1} log|x| M(dx); pure power tails in closed form, everything
/// else through the integration engine at reduced accuracy (the gate only
/// needs the order of magnitude).
fn log_tail_moment(mu: &LevyTriplet, policy: &QuadraturePolicy) -> Result<f64> {
    let mut total = 0.0;
    let mut engine_pieces: Vec<LevyPiece> = Vec::new();
    for piece in &mu.jumps {
        match piece {
            LevyPiece::StableTails {
                p,
                c,
                theta_plus,
                theta_minus,
            } => {
                total += c * (theta_plus + theta_minus) / p;
            }
            other => engine_pieces.push(other.clone()),
        }
    }
    if !engine_pieces.is_empty() {
        let kernel = FnKernel {
            label: "log tail moment".into(),
            f: Box::new(|x: f64| {
                Ok(c(if x.abs() > 1.0 { x.abs().ln() } else { 0.0 }, 0.0))
            }),
            zero_order: 2.0,
            freq: 0.0,
        };
        let mut loose = policy.clone();
        loose.target_rel_tol = 1e-4;
        total += integrate_levy(&kernel, &engine_pieces, &loose)?.value.re;
    }
    Ok(total)
}

fn log_moment_check(mu: &LevyTriplet, policy: &QuadraturePolicy) -> Result<()> {
    let value = log_tail_moment(mu, policy)?;
    if !(value <= LOG_MOMENT_CAP) {
        return Err(Error::LogMomentViolation {
            tail: "jump measure beyond the unit ball".into(),
            value,
        });
    }
    Ok(())
}

/// Log-characteristic function of the shrink-limit image of mu:
/// (i/2) a w - sigma^2 w^2 / 6 + the class kernel integrated over the jumps.
pub fn sselfdec_log_char(mu: &LevyTriplet, w: f64, policy: &QuadraturePolicy) -> Result<Quad> {
    mu.validate()?;
    let base = c(
        -mu.gauss_var * w * w / 6.0,
        0.5 * mu.shift * w,
    );
    let q = integrate_levy(&SSelfdecKernel { w }, &mu.jumps, policy)?;
    Ok(Quad {
        value: base + q.value,
        err_est: q.err_est,
    })
}

/// Free transform of the shrink-limit image at z = it:
/// a/2 + sigma^2/(3 it) + the matched resolvent-log kernel over the jumps.
pub fn free_sselfdec_kernel(mu: &LevyTriplet, t: f64, policy: &QuadraturePolicy) -> Result<Quad> {
    mu.validate()?;
    let kernel = FreeSSKernel::new(t)?;
    let base = c(0.5 * mu.shift, -mu.gauss_var / (3.0 * t));
    let q = integrate_levy(&kernel, &mu.jumps, policy)?;
    Ok(Quad {
        value: base + q.value,
        err_est: q.err_est,
    })
}

/// Log-characteristic function of the selfdecomposable image of mu:
/// i a w - sigma^2 w^2 / 4 + the class kernel over the jumps. Requires the
/// log tail moment of the jump measure to be finite.
pub fn selfdec_log_char(mu: &LevyTriplet, w: f64, policy: &QuadraturePolicy) -> Result<Quad> {
    mu.validate()?;
    log_moment_check(mu, policy)?;
    let base = c(-mu.gauss_var * w * w / 4.0, mu.shift * w);
    let q = integrate_levy(&SelfdecKernel { w }, &mu.jumps, policy)?;
    Ok(Quad {
        value: base + q.value,
        err_est: q.err_est,
    })
}

/// Free transform of the selfdecomposable image at z = it:
/// a + sigma^2/(2 it) + the matched log kernel over the jumps.
pub fn free_selfdec_kernel(mu: &LevyTriplet, t: f64, policy: &QuadraturePolicy) -> Result<Quad> {
    mu.validate()?;
    log_moment_check(mu, policy)?;
    let kernel = FreeSDKernel::new(t)?;
    let base = c(mu.shift, -mu.gauss_var / (2.0 * t));
    let q = integrate_levy(&kernel, &mu.jumps, policy)?;
    Ok(Quad {
        value: base + q.value,
        err_est: q.err_est,
    })
}

/// Log-characteristic function of the classical stable law in closed form.
pub fn classical_stable_log_char(params: &StableParams, t: f64) -> Result<Complex64> {
    params.validate()?;
    if t == 0.0 {
        return Ok(c(0.0, 0.0));
    }
    let drift = c(0.0, params.shift * t);
    let at = t.abs();
    if params.is_unit_index() {
        let skew = params.beta * std::f64::consts::FRAC_2_PI * t.signum() * at.ln();
        return Ok(drift
            - params.c * std::f64::consts::FRAC_PI_2 * at * c(1.0, skew));
    }
    let p = params.p;
    let k = gamma_fn(1.0 - p)? * (std::f64::consts::FRAC_PI_2 * p).cos();
    let skew = -params.beta * t.signum() * (std::f64::consts::FRAC_PI_2 * p).tan();
    Ok(drift - params.c * k * at.powf(p) * c(1.0, skew))
}

/// Free transform of the stable law at z = it, t > 0, in closed form; the
/// two-sided prefactor collapses to t^{1-p} on the principal branch.
pub fn free_stable_v(params: &StableParams, t: f64) -> Result<Complex64> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "free stable transform needs t > 0, got {t}"
        )));
    }
    let shift = c(params.shift, 0.0);
    if params.is_unit_index() {
        let log_it = c(t.ln(), std::f64::consts::FRAC_PI_2);
        let bracket = 2.0 * params.beta * log_it
            - c(0.0, std::f64::consts::PI * (1.0 + params.beta));
        return Ok(shift - params.c * params.beta * (1.0 - EULER_GAMMA)
            + 0.5 * params.c * bracket);
    }
    let p = params.p;
    let k = gamma_fn(1.0 - p)? * (std::f64::consts::FRAC_PI_2 * p).cos();
    let gain = gamma_fn(p + 1.0)?;
    let dir = c(0.0, 1.0) - params.beta * (std::f64::consts::FRAC_PI_2 * p).tan();
    Ok(shift - params.c * k * gain * t.powf(1.0 - p) * dir)
}

/// Free transform of the compound Poisson law with jump law m at z = it:
/// it times the integral of x/(it - x) over m.
pub fn free_compound_poisson_v(
    m: &FiniteMeasure,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "free compound Poisson transform needs t > 0, got {t}"
        )));
    }
    let it = c(0.0, t);
    let kernel = FnKernel::bounded("compound poisson resolvent", move |x| {
        Ok(it * x / (it - x))
    });
    integrate_finite(&kernel, m, policy)
}

/// The general free infinitely divisible transform in its rational form at
/// z = it: b + c^2/z + the pair kernel of (b = 0, m) plus nothing else; the
/// measure enters through the same (1 + zx)/(z - x) integrand as the pair
/// representation.
pub fn free_id_nevanlinna_form(
    b: f64,
    c_gauss: f64,
    m: &FiniteMeasure,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    let pair = NevanlinnaPair::new(b, m.clone());
    let q = kernel_eval(&pair, t, policy)?;
    Ok(Quad {
        value: q.value + c_gauss * c_gauss / c(0.0, t),
        err_est: q.err_est,
    })
}

/// The Laplace bridge applied to an arbitrary log-characteristic function:
/// i t^2 int_0^inf f(-v) e^{-tv} dv, the route every closed-form kernel in
/// this module is checked against.
pub fn laplace_route(
    mut log_char: impl FnMut(f64) -> Result<Complex64>,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "Laplace route needs t > 0, got {t}"
        )));
    }
    let q = laplace_quad(|v| log_char(-v), t, policy)?;
    Ok(q.scale(c(0.0, t * t)))
}

/// Both sides of the Poisson/exponential bridge: the e^{-w}/w-weighted
/// random integral of the unit Poisson law against -log(1 - it), the
/// exponential law's log-characteristic function.
pub fn exp_poisson_identity(t: f64, policy: &QuadraturePolicy) -> Result<(Complex64, Complex64)> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!(
            "the bridge identity is stated for finite t != 0, got {t}"
        )));
    }
    let mu = ParametricLaw::Poisson {
        rate: 1.0,
        jump: 1.0,
    }
    .to_triplet(policy)?;
    let spec = IntegrandSpec::new(
        TimeChange::Identity,
        TimeChange::Gamma0Tail,
        true,
        (0.0, f64::INFINITY),
    );
    let lhs = random_integral_log_char(&spec, &mu, t, policy)?.value;
    let rhs = -(c(1.0, 0.0) - c(0.0, t)).ln();
    Ok((lhs, rhs))
}

/// Bounded test functions the pushforward identities are probed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeFn {
    One,
    Linear,
    ExpNeg,
    Sine,
}

impl ProbeFn {
    pub fn eval(&self, w: f64) -> f64 {
        match self {
            ProbeFn::One => 1.0,
            ProbeFn::Linear => w,
            ProbeFn::ExpNeg => (-w).exp(),
            ProbeFn::Sine => w.sin(),
        }
    }

    fn at_zero(&self) -> f64 {
        match self {
            ProbeFn::One | ProbeFn::ExpNeg => 1.0,
            ProbeFn::Linear | ProbeFn::Sine => 0.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProbeFn::One => "1",
            ProbeFn::Linear => "w",
            ProbeFn::ExpNeg => "exp(-w)",
            ProbeFn::Sine => "sin(w)",
        }
    }
}

/// Which product-law factorization to test: the uniform-times-exponential
/// product whose law has density Gamma(0, w), or the shrinking exponential
/// product whose law has density e^{-w}/w.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushforwardMap {
    Gamma0,
    ExpOverX,
}

/// Both sides of a pushforward identity: the double integral over the
/// product factors on the left, the single integral against the pushforward
/// density on the right.
pub fn pushforward_check(
    map: PushforwardMap,
    f: ProbeFn,
    policy: &QuadraturePolicy,
) -> Result<(f64, f64)> {
    match map {
        PushforwardMap::Gamma0 => {
            let lhs = laplace_quad(
                |v| finite_quad(|u| Ok(c(f.eval(u * v), 0.0)), 0.0, 1.0, policy).map(|q| q.value),
                1.0,
                policy,
            )?;
            let rhs = laplace_quad(
                |w| Ok(c(f.eval(w) * e1_scaled_complex(c(w, 0.0))?.re, 0.0)),
                1.0,
                policy,
            )?;
            Ok((lhs.value.re, rhs.value.re))
        }
        PushforwardMap::ExpOverX => {
            if f.at_zero() != 0.0 {
                return Err(Error::Divergent(format!(
                    "pushforward integrand f = {} has f(0) != 0; both sides diverge \
                     against the e^(-w)/w density",
                    f.label()
                )));
            }
            let lhs = laplace_quad(
                |s| {
                    let shrink = (-s).exp();
                    let inner =
                        laplace_quad(|u| Ok(c(f.eval(u * shrink), 0.0)), 1.0, policy)?;
                    Ok(inner.value * s.exp())
                },
                1.0,
                policy,
            )?;
            let rhs = laplace_quad(|w| Ok(c(f.eval(w) / w, 0.0)), 1.0, policy)?;
            Ok((lhs.value.re, rhs.value.re))
        }
    }
}

/// Which class mapping a composition identity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdClass {
    SSelfdec,
    Selfdec,
}

/// Both sides of the composed-mapping identity: applying the
/// classical-to-free exponential mixer after the class mapping on the left,
/// the single time-changed random integral of the original law on the right
/// (weight Gamma(0, v) for the shrink class, e^{-w}/w for the
/// selfdecomposable class).
pub fn composition_identity_check(
    which: IdClass,
    mu: &LevyTriplet,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<(Complex64, Complex64)> {
    mu.validate()?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("composition check at t = {t}")));
    }
    let lhs = match which {
        IdClass::SSelfdec => laplace_quad(
            |s| sselfdec_log_char(mu, s * t, policy).map(|q| q.value),
            1.0,
            policy,
        )?,
        IdClass::Selfdec => laplace_quad(
            |s| selfdec_log_char(mu, s * t, policy).map(|q| q.value),
            1.0,
            policy,
        )?,
    };
    let r = match which {
        IdClass::SSelfdec => TimeChange::UpsilonTail,
        IdClass::Selfdec => TimeChange::Gamma0Tail,
    };
    let spec = IntegrandSpec::new(TimeChange::Identity, r, true, (0.0, f64::INFINITY));
    let rhs = random_integral_log_char(&spec, mu, t, policy)?;
    Ok((lhs.value, rhs.value))
}

/// Serializable outcome of one two-sided identity evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub inputs: String,
    pub t: f64,
    /// real and imaginary part of each side
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn from_sides(
        identity: impl Into<String>,
        inputs: impl Into<String>,
        t: f64,
        lhs: Complex64,
        rhs: Complex64,
        tol: f64,
    ) -> Self {
        let abs_err = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel_err = if scale > 0.0 { abs_err / scale } else { 0.0 };
        IdentityReport {
            identity: identity.into(),
            inputs: inputs.into(),
            t,
            lhs: [lhs.re, lhs.im],
            rhs: [rhs.re, rhs.im],
            abs_err,
            rel_err,
            pass: abs_err <= tol * scale.max(1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Atom;
    use crate::transforms::laplace_bijection;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn policy() -> QuadraturePolicy {
        QuadraturePolicy::default()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn gaussian() -> LevyTriplet {
        LevyTriplet {
            shift: 0.0,
            gauss_var: 1.0,
            jumps: vec![],
        }
    }

    fn unit_atom() -> LevyTriplet {
        LevyTriplet {
            shift: 0.0,
            gauss_var: 0.0,
            jumps: vec![LevyPiece::Finite(FiniteMeasure::atom(1.0, 1.0))],
        }
    }

    fn one_sided_stable() -> LevyTriplet {
        ParametricLaw::Stable {
            p: 0.5,
            c: 1.0,
            beta: 1.0,
            shift: 0.0,
        }
        .to_triplet(&policy())
        .unwrap()
    }

    #[test]
    fn incomplete_gamma_values() {
        assert!((incomplete_gamma0(1.0).unwrap() - 0.21938393439552027).abs() < 1e-13);
        assert!((incomplete_gamma0(1e-6).unwrap() - 13.23829589306249).abs() < 1e-10);
        let x = 30.0f64;
        let lead = (-x).exp() / x;
        let exact = incomplete_gamma0(x).unwrap();
        assert!((exact - lead).abs() < 0.05 * lead);
        // strictly decreasing
        let mut prev = incomplete_gamma0(0.1).unwrap();
        for x in [0.5, 1.0, 2.0, 5.0] {
            let v = incomplete_gamma0(x).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        assert!(matches!(incomplete_gamma0(0.0), Err(Error::Domain(_))));
        assert!(matches!(incomplete_gamma0(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn shrink_time_change_values() {
        assert!((time_change_u(1.0).unwrap() - 0.14849550677592205).abs() < 1e-13);
        assert!((time_change_u(1e-8).unwrap() - 1.0).abs() < 1e-6);
        // -r' = Gamma(0, v) by central differences
        for v in [0.5, 1.0, 2.0] {
            let h = 1e-6;
            let slope =
                (time_change_u(v + h).unwrap() - time_change_u(v - h).unwrap()) / (2.0 * h);
            assert!((slope + incomplete_gamma0(v).unwrap()).abs() < 1e-8, "v = {v}");
        }
        let mut prev = time_change_u(1e-3).unwrap();
        for v in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let r = time_change_u(v).unwrap();
            assert!(r < prev && r > 0.0);
            prev = r;
        }
        assert!(matches!(time_change_u(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn shrink_class_log_char_examples() {
        let p = policy();
        for w in [1.0, 2.0, -0.7] {
            let v = sselfdec_log_char(&gaussian(), w, &p).unwrap().value;
            assert!(close(v, c(-w * w / 6.0, 0.0), 1e-13), "w = {w}: {v}");
        }
        let shift_only = LevyTriplet::pure_shift(2.0);
        let v = sselfdec_log_char(&shift_only, 1.0, &p).unwrap().value;
        assert!(close(v, c(0.0, 1.0), 1e-14));
        let v = sselfdec_log_char(&unit_atom(), 1.0, &p).unwrap().value;
        assert!(close(
            v,
            c(-0.15852901519210349, -0.04030230586813972),
            1e-13
        ));
    }

    #[test]
    fn free_shrink_kernel_examples() {
        let p = policy();
        for t in [0.5, 2.0] {
            let v = free_sselfdec_kernel(&gaussian(), t, &p).unwrap().value;
            assert!(close(v, c(0.0, -1.0 / (3.0 * t)), 1e-13), "t = {t}: {v}");
        }
        let v = free_sselfdec_kernel(&LevyTriplet::pure_shift(1.0), 3.0, &p)
            .unwrap()
            .value;
        assert!(close(v, c(0.5, 0.0), 1e-14));
        let v = free_sselfdec_kernel(&unit_atom(), 1.0, &p).unwrap().value;
        assert!(close(
            v,
            c(-0.15342640972002735, -0.21460183660255169),
            1e-13
        ));
    }

    #[test]
    fn selfdec_log_char_examples() {
        let p = policy();
        for w in [1.0, 2.0] {
            let v = selfdec_log_char(&gaussian(), w, &p).unwrap().value;
            assert!(close(v, c(-w * w / 4.0, 0.0), 1e-13), "w = {w}: {v}");
        }
        let v = selfdec_log_char(&LevyTriplet::pure_shift(1.5), 2.0, &p)
            .unwrap()
            .value;
        assert!(close(v, c(0.0, 3.0), 1e-14));
        let v = selfdec_log_char(&unit_atom(), 1.0, &p).unwrap().value;
        assert!(close(
            v,
            c(-0.23981174200056473, -0.05391692963281699),
            1e-13
        ));
    }

    #[test]
    fn free_selfdec_kernel_examples() {
        let p = policy();
        for t in [0.5, 2.0] {
            let v = free_selfdec_kernel(&gaussian(), t, &p).unwrap().value;
            assert!(close(v, c(0.0, -1.0 / (2.0 * t)), 1e-13), "t = {t}: {v}");
        }
        let v = free_selfdec_kernel(&LevyTriplet::pure_shift(0.7), 2.0, &p)
            .unwrap()
            .value;
        assert!(close(v, c(0.7, 0.0), 1e-14));
        let v = free_selfdec_kernel(&unit_atom(), 1.0, &p).unwrap().value;
        assert!(close(
            v,
            c(-0.21460183660255169, -0.34657359027997265),
            1e-13
        ));
    }

    /// agreement-test policy: the comparison tolerance is 1e-6, so the
    /// quadrature does not need to chase 1e-10
    fn loose_policy() -> QuadraturePolicy {
        let mut p = QuadraturePolicy::default();
        p.target_rel_tol = 1e-8;
        p
    }

    #[test]
    fn shrink_kernel_matches_laplace_route() {
        let p = loose_policy();
        for (name, mu) in [
            ("gaussian", gaussian()),
            ("unit atom", unit_atom()),
            ("stable", one_sided_stable()),
        ] {
            for t in [0.5, 1.0, 2.0, 5.0] {
                let direct = free_sselfdec_kernel(&mu, t, &p).unwrap().value;
                let bridged = laplace_route(
                    |w| sselfdec_log_char(&mu, w, &p).map(|q| q.value),
                    t,
                    &p,
                )
                .unwrap()
                .value;
                let tol = 1e-6 * direct.norm().max(1.0);
                assert!(
                    close(direct, bridged, tol),
                    "{name}, t = {t}: {direct} vs {bridged}"
                );
            }
        }
    }

    #[test]
    fn selfdec_kernel_matches_laplace_route() {
        let p = loose_policy();
        for (name, mu) in [
            ("gaussian", gaussian()),
            ("unit atom", unit_atom()),
            ("stable", one_sided_stable()),
        ] {
            for t in [0.5, 1.0, 2.0, 5.0] {
                let direct = free_selfdec_kernel(&mu, t, &p).unwrap().value;
                let bridged = laplace_route(
                    |w| selfdec_log_char(&mu, w, &p).map(|q| q.value),
                    t,
                    &p,
                )
                .unwrap()
                .value;
                let tol = 1e-6 * direct.norm().max(1.0);
                assert!(
                    close(direct, bridged, tol),
                    "{name}, t = {t}: {direct} vs {bridged}"
                );
            }
        }
    }

    #[test]
    fn classical_stable_closed_values() {
        let flat = StableParams::new(0.5, 1.0, 0.0, 0.0).unwrap();
        let v = classical_stable_log_char(&flat, 1.0).unwrap();
        assert!(close(v, c(-1.25331413731550025, 0.0), 1e-13), "{v}");

        let unit = StableParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let v = classical_stable_log_char(&unit, 1.0).unwrap();
        assert!(close(v, c(-FRAC_PI_2, 0.0), 1e-14), "{v}");

        let skewed = StableParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let v = classical_stable_log_char(&skewed, 2.0).unwrap();
        assert!(close(v, c(-PI, -2.0 * 2f64.ln()), 1e-13), "{v}");

        assert_eq!(
            classical_stable_log_char(&flat, 0.0).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn classical_stable_matches_triplet_exponent() {
        let p = policy();
        let cases = [
            StableParams::new(0.5, 1.0, 0.7, 0.3).unwrap(),
            StableParams::new(1.5, 2.0, -0.4, 0.0).unwrap(),
            StableParams::new(1.0, 1.0, 0.5, 0.2).unwrap(),
        ];
        for params in cases {
            let law = ParametricLaw::Stable {
                p: params.p,
                c: params.c,
                beta: params.beta,
                shift: params.shift,
            };
            let mu = law.to_triplet(&p).unwrap();
            for t in [1.0, -2.0] {
                let closed = classical_stable_log_char(&params, t).unwrap();
                let integrated = crate::measures::char_exponent(&mu, t, &p).unwrap().value;
                let tol = 1e-6 * closed.norm().max(1.0);
                assert!(
                    close(closed, integrated, tol),
                    "p = {}, t = {t}: {closed} vs {integrated}",
                    params.p
                );
            }
        }
    }

    #[test]
    fn free_stable_closed_values() {
        let flat = StableParams::new(0.5, 1.0, 0.0, 0.0).unwrap();
        let v = free_stable_v(&flat, 1.0).unwrap();
        assert!(close(v, c(0.0, -1.11072073453959156), 1e-13), "{v}");

        let unit = StableParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let v = free_stable_v(&unit, 1.0).unwrap();
        assert!(close(v, c(0.0, -FRAC_PI_2), 1e-14), "{v}");

        let skewed = StableParams::new(1.0, 1.0, 0.5, 0.0).unwrap();
        let v = free_stable_v(&skewed, 1.0).unwrap();
        assert!(
            close(v, c(-0.21139216754923357, -1.57079632679489662), 1e-13),
            "{v}"
        );

        let shifted = StableParams::new(1.5, 2.0, 0.7, 5.0).unwrap();
        let centered = StableParams::new(1.5, 2.0, 0.7, 0.0).unwrap();
        let diff = free_stable_v(&shifted, 2.0).unwrap() - free_stable_v(&centered, 2.0).unwrap();
        assert!(close(diff, c(5.0, 0.0), 1e-13));
    }

    #[test]
    fn free_stable_matches_laplace_route() {
        let p = policy();
        let mut grid: Vec<StableParams> = Vec::new();
        for p_idx in [0.5, 1.5] {
            for beta in [-1.0, 0.0, 0.7] {
                grid.push(StableParams::new(p_idx, 1.0, beta, 0.0).unwrap());
            }
        }
        for beta in [0.0, 0.5] {
            grid.push(StableParams::new(1.0, 1.0, beta, 0.0).unwrap());
        }
        for params in grid {
            for t in [0.5, 1.0, 2.0] {
                let closed = free_stable_v(&params, t).unwrap();
                let bridged = laplace_route(
                    |v| classical_stable_log_char(&params, v),
                    t,
                    &p,
                )
                .unwrap()
                .value;
                let tol = 1e-6 * closed.norm().max(1.0);
                assert!(
                    close(closed, bridged, tol),
                    "p = {}, beta = {}, t = {t}: {closed} vs {bridged}",
                    params.p,
                    params.beta
                );
            }
        }
    }

    #[test]
    fn two_sided_prefactor_collapses_on_principal_branch() {
        for p in [0.5, 1.5] {
            for t in [0.7, 3.0] {
                let grouped = c(0.0, 1.0).powc(c(p - 1.0, 0.0))
                    * c(0.0, t).powc(c(1.0 - p, 0.0));
                let collapsed = t.powf(1.0 - p);
                assert!(
                    close(grouped, c(collapsed, 0.0), 1e-14 * collapsed.max(1.0)),
                    "p = {p}, t = {t}: {grouped}"
                );
            }
        }
    }

    #[test]
    fn compound_poisson_closed_values() {
        let p = policy();
        let unit = FiniteMeasure::atom(1.0, 1.0);
        for t in [1.0, 2.0] {
            let it = c(0.0, t);
            let v = free_compound_poisson_v(&unit, t, &p).unwrap().value;
            assert!(close(v, it / (it - 1.0), 1e-14), "t = {t}");
        }
        let empty = FiniteMeasure::from_pieces(vec![]);
        assert!(free_compound_poisson_v(&empty, 1.0, &p)
            .unwrap()
            .value
            .norm()
            < 1e-15);
        let pm = FiniteMeasure {
            atoms: vec![Atom { at: 1.0, mass: 1.0 }, Atom { at: -1.0, mass: 1.0 }],
            pieces: vec![],
        };
        let v = free_compound_poisson_v(&pm, 1.0, &p).unwrap().value;
        assert!(close(v, c(0.0, -1.0), 1e-14), "{v}");
    }

    #[test]
    fn compound_poisson_matches_laplace_route() {
        let p = policy();
        let jump_laws = [
            FiniteMeasure::atom(1.0, 1.0),
            FiniteMeasure {
                atoms: vec![Atom { at: 1.0, mass: 1.0 }, Atom { at: -1.0, mass: 1.0 }],
                pieces: vec![],
            },
            FiniteMeasure::from_pieces(vec![crate::measures::FinitePiece::Uniform {
                lo: 0.0,
                hi: 1.0,
                mass: 1.0,
            }]),
        ];
        for m in jump_laws {
            let ball_mean = integrate_finite(
                &FnKernel::bounded("truncated mean", |x| {
                    Ok(c(if x.abs() <= 1.0 { x } else { 0.0 }, 0.0))
                }),
                &m,
                &p,
            )
            .unwrap()
            .value
            .re;
            let mu = LevyTriplet {
                shift: ball_mean,
                gauss_var: 0.0,
                jumps: vec![LevyPiece::Finite(m.clone())],
            };
            for t in [0.5, 1.0, 2.0, 5.0] {
                let direct = free_compound_poisson_v(&m, t, &p).unwrap().value;
                let bridged = laplace_bijection(&mu, t, &p).unwrap().value;
                let tol = 1e-6 * direct.norm().max(1.0);
                assert!(
                    close(direct, bridged, tol),
                    "t = {t}: {direct} vs {bridged}"
                );
            }
        }
    }

    #[test]
    fn rational_form_examples() {
        let p = policy();
        let empty = FiniteMeasure::from_pieces(vec![]);
        let v = free_id_nevanlinna_form(0.0, 1.0, &empty, 1.0, &p).unwrap().value;
        assert!(close(v, c(0.0, -1.0), 1e-14), "{v}");

        let unit = FiniteMeasure::atom(1.0, 1.0);
        let v = free_id_nevanlinna_form(0.0, 0.0, &unit, 1.0, &p).unwrap().value;
        assert!(close(v, c(0.0, -1.0), 1e-14), "{v}");

        // dropping the plain resolvent term recovers the compound Poisson
        // transform
        let pm = FiniteMeasure {
            atoms: vec![Atom { at: 1.0, mass: 1.0 }, Atom { at: -1.0, mass: 1.0 }],
            pieces: vec![],
        };
        let t = 1.0;
        let it = c(0.0, t);
        let full = free_id_nevanlinna_form(0.0, 0.0, &pm, t, &p).unwrap().value;
        let resolvent = integrate_finite(
            &FnKernel::bounded("resolvent", move |x| Ok((it - x).inv())),
            &pm,
            &p,
        )
        .unwrap()
        .value;
        let cp = free_compound_poisson_v(&pm, t, &p).unwrap().value;
        assert!(close(full - resolvent, cp, 1e-13));
    }

    #[test]
    fn poisson_exponential_bridge() {
        let p = policy();
        for t in [0.5, -0.5, 1.0, -1.0, 3.0, -3.0] {
            let (lhs, rhs) = exp_poisson_identity(t, &p).unwrap();
            let tol = 1e-6 * rhs.norm().max(1.0);
            assert!(close(lhs, rhs, tol), "t = {t}: {lhs} vs {rhs}");
        }
        let (_, rhs) = exp_poisson_identity(1.0, &p).unwrap();
        assert!(close(
            rhs,
            c(-0.34657359027997265, 0.78539816339744831),
            1e-15
        ));
        // hermitian symmetry
        let (pos, _) = exp_poisson_identity(1.0, &p).unwrap();
        let (neg, _) = exp_poisson_identity(-1.0, &p).unwrap();
        assert!(close(pos, neg.conj(), 1e-8));
        // vanishes with t
        let (small, _) = exp_poisson_identity(1e-3, &p).unwrap();
        assert!(small.norm() < 2e-3);
        assert!(matches!(
            exp_poisson_identity(0.0, &p),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn uniform_product_pushforward() {
        let p = policy();
        let expected = [
            (ProbeFn::One, 1.0),
            (ProbeFn::Linear, 0.5),
            (ProbeFn::ExpNeg, 2f64.ln()),
            (ProbeFn::Sine, 0.5 * 2f64.ln()),
        ];
        for (f, target) in expected {
            let (lhs, rhs) = pushforward_check(PushforwardMap::Gamma0, f, &p).unwrap();
            assert!((lhs - rhs).abs() < 1e-6, "{f:?}: {lhs} vs {rhs}");
            assert!((lhs - target).abs() < 1e-6, "{f:?}: {lhs} vs {target}");
        }
        // unit mass comes out on the nose
        let (lhs, rhs) = pushforward_check(PushforwardMap::Gamma0, ProbeFn::One, &p).unwrap();
        assert!((lhs - 1.0).abs() < 1e-9 && (rhs - 1.0).abs() < 1e-9);
    }

    #[test]
    fn shrinking_product_pushforward() {
        let p = policy();
        let (lhs, rhs) = pushforward_check(PushforwardMap::ExpOverX, ProbeFn::Linear, &p).unwrap();
        assert!((lhs - 1.0).abs() < 1e-6 && (rhs - 1.0).abs() < 1e-6, "{lhs} {rhs}");
        let (lhs, rhs) = pushforward_check(PushforwardMap::ExpOverX, ProbeFn::Sine, &p).unwrap();
        assert!((lhs - PI / 4.0).abs() < 1e-6, "{lhs}");
        assert!((rhs - PI / 4.0).abs() < 1e-6, "{rhs}");
        for f in [ProbeFn::One, ProbeFn::ExpNeg] {
            assert!(matches!(
                pushforward_check(PushforwardMap::ExpOverX, f, &p),
                Err(Error::Divergent(_))
            ));
        }
    }

    #[test]
    fn composed_mappings_collapse_to_single_time_change() {
        let p = policy();
        let (lhs, rhs) = composition_identity_check(IdClass::SSelfdec, &gaussian(), 1.0, &p).unwrap();
        assert!(close(lhs, c(-1.0 / 3.0, 0.0), 1e-8), "{lhs}");
        assert!(close(lhs, rhs, 1e-6), "{lhs} vs {rhs}");

        let (lhs, rhs) = composition_identity_check(IdClass::Selfdec, &gaussian(), 1.0, &p).unwrap();
        assert!(close(lhs, c(-0.5, 0.0), 1e-8), "{lhs}");
        assert!(close(lhs, rhs, 1e-6), "{lhs} vs {rhs}");

        let shift_only = LevyTriplet::pure_shift(2.0);
        for which in [IdClass::SSelfdec, IdClass::Selfdec] {
            let (lhs, rhs) = composition_identity_check(which, &shift_only, 0.7, &p).unwrap();
            assert!(close(lhs, rhs, 1e-9), "{which:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn log_moment_gate() {
        let p = policy();
        let heavy = ParametricLaw::Stable {
            p: 1e-9,
            c: 1.0,
            beta: 1.0,
            shift: 0.0,
        }
        .to_triplet(&p)
        .unwrap();
        assert!(matches!(
            selfdec_log_char(&heavy, 1.0, &p),
            Err(Error::LogMomentViolation { .. })
        ));
        assert!(matches!(
            free_selfdec_kernel(&heavy, 1.0, &p),
            Err(Error::LogMomentViolation { .. })
        ));
        // the moderate tail passes
        assert!(selfdec_log_char(&one_sided_stable(), 1.0, &p).is_ok());
    }

    #[test]
    fn gaussian_terms_scale_linearly_in_variance() {
        let p = policy();
        let scaled = LevyTriplet {
            shift: 0.0,
            gauss_var: 3.0,
            jumps: vec![],
        };
        let pairs = [
            (
                sselfdec_log_char(&gaussian(), 1.3, &p).unwrap().value,
                sselfdec_log_char(&scaled, 1.3, &p).unwrap().value,
            ),
            (
                free_sselfdec_kernel(&gaussian(), 0.8, &p).unwrap().value,
                free_sselfdec_kernel(&scaled, 0.8, &p).unwrap().value,
            ),
            (
                selfdec_log_char(&gaussian(), 2.0, &p).unwrap().value,
                selfdec_log_char(&scaled, 2.0, &p).unwrap().value,
            ),
            (
                free_selfdec_kernel(&gaussian(), 1.5, &p).unwrap().value,
                free_selfdec_kernel(&scaled, 1.5, &p).unwrap().value,
            ),
        ];
        for (one, three) in pairs {
            assert!(close(three, 3.0 * one, 1e-12), "{one} vs {three}");
        }
    }

    #[test]
    fn euler_constant_from_laplace_quad() {
        let q = laplace_quad(|v| Ok(c(v * v.ln(), 0.0)), 1.0, &policy()).unwrap();
        assert!((q.value.re - (1.0 - EULER_GAMMA)).abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn stable_params_validation() {
        assert!(StableParams::new(2.0, 1.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(2.5, 1.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(0.5, 0.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(0.5, 1.0, 1.5, 0.0).is_err());
        assert!(StableParams::new(1.0, 1.0, -1.0, 0.3).is_ok());
        assert!(StableParams::new(1.999, 0.1, 1.0, 0.0).is_ok());
    }

    #[test]
    fn identity_report_round_trips() {
        let report = IdentityReport::from_sides(
            "bridge",
            "poisson(1,1)",
            1.0,
            c(1.0, 2.0),
            c(1.0, 2.0 + 1e-9),
            1e-6,
        );
        assert!(report.pass);
        assert!(report.abs_err < 2e-9);
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(v["identity"], "bridge");
        assert_eq!(v["t"], 1.0);
        let back: IdentityReport = serde_json::from_value(v).unwrap();
        assert!(back.pass);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn classical_stable_is_hermitian(
            p in 0.1f64..1.9,
            beta in -1.0f64..1.0,
            t in 0.05f64..10.0,
        ) {
            let params = StableParams::new(p, 1.0, beta, 0.4).unwrap();
            let pos = classical_stable_log_char(&params, t).unwrap();
            let neg = classical_stable_log_char(&params, -t).unwrap();
            prop_assert!((pos - neg.conj()).norm() <= 1e-10 * pos.norm().max(1.0));
        }

        #[test]
        fn free_stable_shift_is_additive(
            p in 0.1f64..1.9,
            beta in -1.0f64..1.0,
            shift in -4.0f64..4.0,
            t in 0.1f64..5.0,
        ) {
            let moved = StableParams::new(p, 1.0, beta, shift).unwrap();
            let centered = StableParams::new(p, 1.0, beta, 0.0).unwrap();
            let diff = free_stable_v(&moved, t).unwrap() - free_stable_v(&centered, t).unwrap();
            prop_assert!((diff - shift).norm() <= 1e-10 * shift.abs().max(1.0));
        }
    }
}
