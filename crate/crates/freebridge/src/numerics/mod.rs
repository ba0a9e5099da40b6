//! Quadrature and root-finding infrastructure.
//!
//! Three entry points carry the rest of the crate:
//!
//! * [`laplace_quad`]: integrals of `f(v) e^{-t v}` over (0, inf), by paired
//!   Gauss-Laguerre rules with a truncated adaptive fallback for integrands the
//!   fixed rules cannot resolve (mild endpoint singularities, oscillation).
//! * [`finite_quad`]: integrals over finite intervals by globally adaptive
//!   Gauss-Kronrod, with optional square-root endpoint substitutions.
//! * [`complex_newton`]: damped Newton iteration for holomorphic functions,
//!   with a residual trace for convergence diagnostics.
//!
//! All routines return a value together with an error estimate and refuse to
//! hand back numbers whose estimated error exceeds the acceptance threshold.

pub mod adaptive;
pub mod gauss;
pub mod special;

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use adaptive::{gk21_adaptive, gk21_adaptive_segmented, simpson_adaptive, AdaptOpts};

/// A quadrature result: value plus an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: Complex64,
    pub err_est: f64,
}

impl Quad {
    pub fn zero() -> Self {
        Quad {
            value: Complex64::new(0.0, 0.0),
            err_est: 0.0,
        }
    }
    pub fn add(self, other: Quad) -> Quad {
        Quad {
            value: self.value + other.value,
            err_est: self.err_est + other.err_est,
        }
    }
    pub fn scale(self, c: Complex64) -> Quad {
        Quad {
            value: self.value * c,
            err_est: self.err_est * c.norm(),
        }
    }
}

/// Tuning knobs shared by all quadrature consumers.
#[derive(Debug, Clone)]
pub struct QuadraturePolicy {
    /// Relative accuracy the fixed-rule paths aim for.
    pub target_rel_tol: f64,
    /// Subinterval budget for adaptive refinement.
    pub max_refinements: usize,
    /// Low/high Gauss-Laguerre orders compared for the error estimate.
    pub laguerre_orders: (usize, usize),
    /// Phase cycles per interval above which oscillatory integrands are
    /// pre-split into sub-period chunks.
    pub oscillation_threshold: f64,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        QuadraturePolicy {
            target_rel_tol: 1e-10,
            max_refinements: 2000,
            laguerre_orders: (64, 96),
            oscillation_threshold: 6.0,
        }
    }
}

impl QuadraturePolicy {
    /// Error level above which results are rejected instead of returned.
    pub fn acceptance_rel_tol(&self) -> f64 {
        (self.target_rel_tol * 100.0).max(1e-8)
    }

    pub fn adapt_opts(&self) -> AdaptOpts {
        AdaptOpts {
            rel_tol: self.target_rel_tol,
            abs_floor: 1e-300,
            max_intervals: self.max_refinements,
        }
    }
}

/// Integral of `f(v) e^{-t v}` over v in (0, inf) for t > 0.
///
/// `f` must be continuous on (0, inf) with at worst polynomial growth (checked
/// by sampling) and at worst an integrable power singularity at 0. Exact for
/// polynomial `f` up to degree 2n-1 of the rules in use.
///
/// Rejects results whose error estimate exceeds the policy's acceptance
/// threshold relative to the result itself; use [`laplace_quad_core`] when the
/// natural scale of the answer is known to the caller instead.
pub fn laplace_quad(
    f: impl FnMut(f64) -> Result<Complex64>,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    let q = laplace_quad_core(f, t, policy)?;
    let scale = q.value.norm().max(1e-300);
    if q.err_est > policy.acceptance_rel_tol() * scale {
        return Err(Error::QuadratureNonConvergence {
            context: format!("laplace_quad at t = {t}"),
            err_est: q.err_est,
            tol: policy.acceptance_rel_tol() * scale,
        });
    }
    Ok(q)
}

/// [`laplace_quad`] without the final acceptance gate: always returns the
/// value and its honest error estimate (hard failures still propagate).
pub fn laplace_quad_core(
    mut f: impl FnMut(f64) -> Result<Complex64>,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("laplace_quad requires t > 0, got {t}")));
    }
    let check = |v: Complex64, x: f64| -> Result<Complex64> {
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand {
                context: "laplace transform integrand".into(),
                x,
            })
        }
    };
    // growth precondition: polynomials have a constant log-log slope, while
    // exponentials double it from one octave to the next
    let ell = 40.0 / t;
    let mag = |x: f64, f: &mut dyn FnMut(f64) -> Result<Complex64>| -> Result<f64> {
        let a = check(f(x)?, x)?.norm();
        let b = check(f(1.07 * x)?, 1.07 * x)?.norm();
        Ok(a.max(b) + 1e-300)
    };
    let m1 = mag(ell, &mut f)?;
    let m2 = mag(2.0 * ell, &mut f)?;
    let m4 = mag(4.0 * ell, &mut f)?;
    let s1 = (m2 / m1).log2();
    let s2 = (m4 / m2).log2();
    if s2 > 1.6 * s1.max(0.0) + 4.0 {
        return Err(Error::NonPolynomialGrowth(format!(
            "integrand grows faster than polynomially near v = {ell:.3e}: octave slopes {s1:.1} then {s2:.1}"
        )));
    }
    let (n_lo, n_hi) = policy.laguerre_orders;
    let gl_pass = |n: usize, f: &mut dyn FnMut(f64) -> Result<Complex64>| -> Result<Complex64> {
        let nodes = gauss::laguerre_cached(n);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, w) in nodes.iter() {
            let v = x / t;
            acc += w * check(f(v)?, v)?;
        }
        Ok(acc / t)
    };
    let v_lo = gl_pass(n_lo, &mut f)?;
    let v_hi = gl_pass(n_hi, &mut f)?;
    let err = (v_lo - v_hi).norm();
    let scale = v_hi.norm().max(1e-300);
    if err <= policy.target_rel_tol * scale {
        return Ok(Quad {
            value: v_hi,
            err_est: err,
        });
    }
    // fallback: truncated adaptive integration with a square-root substitution
    // near zero to absorb integrable singularities
    let cut = 40.0 / t;
    // the square-root zone only has to absorb the origin singularity; capping
    // it keeps the sliver bound below conditioned when t is very small
    let s0 = (1.0 / t).min(0.25 * cut).min(1.0);
    let rel = policy.target_rel_tol * 0.1;
    let floor = policy.target_rel_tol * scale * 0.01;
    let eps_u = 1e-9_f64;
    let near = simpson_adaptive(
        |u| {
            let v = s0 * u * u;
            Ok(2.0 * s0 * u * check(f(v)?, v)? * (-t * v).exp())
        },
        eps_u,
        1.0,
        rel,
        floor,
    )?;
    // neglected sliver below eps_u, bounded by the integrand value there
    let sliver = {
        let v = s0 * eps_u * eps_u;
        2.0 * s0 * eps_u * f(v)?.norm() * eps_u
    };
    // decade segmentation keeps slowly decaying integrands resolvable when
    // cut is many orders of magnitude past s0
    let mut far = Quad::zero();
    let mut seg_lo = s0;
    while seg_lo < cut {
        let seg_hi = (10.0 * seg_lo).min(cut);
        let q = simpson_adaptive(
            |v| Ok(check(f(v)?, v)? * (-t * v).exp()),
            seg_lo,
            seg_hi,
            rel,
            floor,
        )?;
        far = far.add(q);
        seg_lo = seg_hi;
    }
    let tail = 2.0 * f(cut)?.norm() * (-t * cut).exp() / t;
    let value = near.value + far.value;
    let err_est = near.err_est + far.err_est + sliver + tail;
    Ok(Quad { value, err_est })
}

/// Endpoint behavior declaration for [`finite_quad_endpoints`].
#[derive(Debug, Clone, Copy, Default)]
pub struct EndpointSingularities {
    /// Integrable power blowup (up to x^{-1/2}) at the left endpoint.
    pub left: bool,
    /// Same at the right endpoint.
    pub right: bool,
}

/// Integral of a complex integrand over [a, b] by adaptive Gauss-Kronrod.
pub fn finite_quad(
    f: impl FnMut(f64) -> Result<Complex64>,
    a: f64,
    b: f64,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    finite_quad_segmented(f, &[a, b], policy)
}

/// Like [`finite_quad`] but with interior breakpoints supplied by the caller
/// (used to pre-split oscillations and known kinks).
pub fn finite_quad_segmented(
    f: impl FnMut(f64) -> Result<Complex64>,
    breaks: &[f64],
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    let q = gk21_adaptive_segmented(f, breaks, &policy.adapt_opts())?;
    accept(q, policy, || format!("finite_quad on [{}, {}]", breaks[0], breaks[breaks.len() - 1]))
}

/// Finite-interval quadrature with declared integrable endpoint singularities;
/// each declared end is handled by the substitution x = end +/- w u^2, which
/// turns an x^{-1/2} blowup into a bounded integrand.
pub fn finite_quad_endpoints(
    mut f: impl FnMut(f64) -> Result<Complex64>,
    a: f64,
    b: f64,
    sing: EndpointSingularities,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    finite_quad_endpoints_dyn(&mut f, a, b, sing, policy)
}

fn finite_quad_endpoints_dyn(
    f: &mut dyn FnMut(f64) -> Result<Complex64>,
    a: f64,
    b: f64,
    sing: EndpointSingularities,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    if !(b > a) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    match (sing.left, sing.right) {
        (false, false) => finite_quad(f, a, b, policy),
        (true, false) => {
            let w = b - a;
            let q = gk21_adaptive(
                |u| Ok(2.0 * w * u * f(a + w * u * u)?),
                0.0,
                1.0,
                &policy.adapt_opts(),
            )?;
            accept(q, policy, || format!("finite_quad left-singular on [{a}, {b}]"))
        }
        (false, true) => {
            let w = b - a;
            let q = gk21_adaptive(
                |u| Ok(2.0 * w * u * f(b - w * u * u)?),
                0.0,
                1.0,
                &policy.adapt_opts(),
            )?;
            accept(q, policy, || format!("finite_quad right-singular on [{a}, {b}]"))
        }
        (true, true) => {
            let m = 0.5 * (a + b);
            let left = finite_quad_endpoints_dyn(
                f,
                a,
                m,
                EndpointSingularities {
                    left: true,
                    right: false,
                },
                policy,
            )?;
            let right = finite_quad_endpoints_dyn(
                f,
                m,
                b,
                EndpointSingularities {
                    left: false,
                    right: true,
                },
                policy,
            )?;
            Ok(left.add(right))
        }
    }
}

fn accept(q: Quad, policy: &QuadraturePolicy, context: impl Fn() -> String) -> Result<Quad> {
    let scale = q.value.norm().max(1e-300);
    if q.err_est > policy.acceptance_rel_tol() * scale && q.err_est > 1e-14 {
        return Err(Error::QuadratureNonConvergence {
            context: context(),
            err_est: q.err_est,
            tol: policy.acceptance_rel_tol() * scale,
        });
    }
    Ok(q)
}

/// Damped Newton iteration on a holomorphic function, derivative by central
/// difference. Returns the root; see [`complex_newton_traced`] for the
/// residual history.
pub fn complex_newton(
    g: impl FnMut(Complex64) -> Result<Complex64>,
    z0: Complex64,
    residual_tol: f64,
) -> Result<Complex64> {
    complex_newton_traced(g, z0, residual_tol).map(|(z, _)| z)
}

/// Newton iteration returning `(root, residual_trace)`. The trace is strictly
/// decreasing by construction: candidate steps are halved until the residual
/// shrinks, and failure to shrink within the damping budget is an error.
pub fn complex_newton_traced(
    mut g: impl FnMut(Complex64) -> Result<Complex64>,
    z0: Complex64,
    residual_tol: f64,
) -> Result<(Complex64, Vec<f64>)> {
    const MAX_IT: usize = 50;
    const MAX_HALVINGS: usize = 30;
    let mut z = z0;
    let mut trace = Vec::new();
    let mut gz = g(z)?;
    for _ in 0..MAX_IT {
        let r = gz.norm();
        trace.push(r);
        if r <= residual_tol {
            return Ok((z, trace));
        }
        let h = 1e-6 * z.norm().max(1.0);
        let gp = (g(z + h)? - g(z - h)?) / (2.0 * h);
        if gp.norm() < 1e-300 {
            return Err(Error::SolverNonConvergence {
                iterations: trace.len(),
                last: z,
                residual: r,
            });
        }
        let mut step = -gz / gp;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand = z + step;
            let gc = g(cand)?;
            if gc.norm() < r {
                z = cand;
                gz = gc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::SolverNonConvergence {
                iterations: trace.len(),
                last: z,
                residual: r,
            });
        }
    }
    Err(Error::SolverNonConvergence {
        iterations: MAX_IT,
        last: z,
        residual: gz.norm(),
    })
}
