//! The integration engine: pairs a [`LevyKernel`] with measure pieces and
//! produces one complex number with an honest error estimate.
//!
//! Strategy per piece and side (u = |x| coordinate):
//!   * contract checks first: a piece with infinite mass near the origin
//!     requires a kernel vanishing to second order there, and that is sampled
//!     rather than trusted;
//!   * a power endpoint u^{-q_int} with q_int in (0,1) is flattened by the
//!     substitution u = x1 v^m before Gauss-Kronrod sees it;
//!   * bounded spans are split at the unit-ball kink and into sub-period
//!     chunks when the kernel oscillates;
//!   * power tails go through u = R w^{-1/beta}, beta = q - 1, which maps
//!     [R, inf) onto (0, 1] and turns a pure power density into a constant;
//!     oscillatory kernels are first decomposed and each analytic oscillatory
//!     term is rotated onto a vertical contour where e^{i omega u} decays;
//!   * exponential tails become Laplace integrals with the density's
//!     exponential factor pulled out analytically.
//!
//! Sub-quadratures run unguarded; the engine applies a single acceptance test
//! against the accumulated magnitude so that cancellation between pieces does
//! not flag spurious failures.

use num_complex::Complex64;

use super::kernels::{KernelTail, LevyKernel, OscTerm};
use super::pieces::{Atom, FiniteMeasure, LevyPiece, PieceView, Side, TailInfo};
use crate::error::{Error, Result};
use crate::numerics::{gk21_adaptive_segmented, laplace_quad_core, Quad, QuadraturePolicy};

/// Running totals; `resabs` is the sum of sub-integral magnitudes, the scale
/// against which the final error estimate is judged.
#[derive(Default)]
struct Acc {
    value: Complex64,
    err: f64,
    resabs: f64,
}

impl Acc {
    fn add_exact(&mut self, v: Complex64) {
        self.value += v;
        self.resabs += v.norm();
    }
    fn add(&mut self, q: Quad) {
        self.value += q.value;
        self.err += q.err_est;
        self.resabs += q.value.norm();
    }
}

/// Integrate a kernel against a jump measure given as a list of pieces.
pub fn integrate_levy(
    kernel: &dyn LevyKernel,
    jumps: &[LevyPiece],
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    let mut atoms: Vec<Atom> = Vec::new();
    let mut views: Vec<PieceView> = Vec::new();
    for piece in jumps {
        piece.validate()?;
        match piece {
            LevyPiece::Finite(m) => {
                atoms.extend(m.atoms.iter().copied());
                views.extend(m.pieces.iter().map(|p| p.view()));
            }
            other => views.push(other.view()),
        }
    }
    integrate_views(kernel, &atoms, &views, policy)
}

/// Integrate a kernel against a finite measure.
pub fn integrate_finite(
    kernel: &dyn LevyKernel,
    measure: &FiniteMeasure,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    measure.validate()?;
    let views: Vec<PieceView> = measure.pieces.iter().map(|p| p.view()).collect();
    integrate_views(kernel, &measure.atoms, &views, policy)
}

fn integrate_views(
    kernel: &dyn LevyKernel,
    atoms: &[Atom],
    views: &[PieceView],
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    let mut acc = Acc::default();
    for a in atoms {
        if a.mass == 0.0 {
            continue;
        }
        acc.add_exact(kernel.eval(a.at)? * a.mass);
    }
    for view in views {
        if view.infinite_mass {
            if kernel.zero_order() < 2.0 {
                return Err(Error::InvalidMeasure(format!(
                    "kernel `{}` does not vanish to second order at 0, cannot \
                     integrate it against {}",
                    kernel.name(),
                    view.name
                )));
            }
            origin_blowup_check(kernel, view)?;
        }
        for side in Side::BOTH {
            integrate_view_side(kernel, view, side, policy, &mut acc)?;
        }
    }
    let tol = policy.acceptance_rel_tol() * acc.resabs.max(1e-300);
    if acc.err > tol {
        return Err(Error::QuadratureNonConvergence {
            context: format!("kernel `{}` against measure", kernel.name()),
            err_est: acc.err,
            tol,
        });
    }
    Ok(Quad {
        value: acc.value,
        err_est: acc.err,
    })
}

/// Sample |K(x)| / x^2 on shrinking grids on both active sides; a ratio that
/// grows by more than a factor 30 per decade means the kernel violates its
/// declared vanishing order (e.g. a sign error turning cancellation at the
/// origin into an O(1) residue).
fn origin_blowup_check(kernel: &dyn LevyKernel, view: &PieceView) -> Result<()> {
    for side in Side::BOTH {
        let s = side.sign();
        let active = match side {
            Side::Plus => view.support.1 > 0.0,
            Side::Minus => view.support.0 < 0.0,
        };
        if !active {
            continue;
        }
        let mut prev: Option<f64> = None;
        for &u in &[1e-4, 1e-5, 1e-6] {
            let v = kernel.eval(s * u)?;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteIntegrand {
                    context: format!("kernel `{}`", kernel.name()),
                    x: s * u,
                });
            }
            let ratio = v.norm() / (u * u);
            if let Some(p) = prev {
                if v.norm() > 1e-13 && ratio > 30.0 * p.max(1e-300) {
                    return Err(Error::KernelBlowUp {
                        kernel: kernel.name(),
                        x: s * u,
                        ratio,
                    });
                }
            }
            prev = Some(ratio);
        }
    }
    Ok(())
}

fn integrate_view_side(
    kernel: &dyn LevyKernel,
    view: &PieceView,
    side: Side,
    policy: &QuadraturePolicy,
    acc: &mut Acc,
) -> Result<()> {
    let s = side.sign();
    let (lo, hi) = view.support;
    let (u_lo, u_hi) = match side {
        Side::Plus => (lo.max(0.0), hi),
        Side::Minus => ((-hi).max(0.0), -lo),
    };
    if !(u_hi > u_lo) {
        return Ok(());
    }
    let context = format!(
        "{} ({} side)",
        view.name,
        if s > 0.0 { "right" } else { "left" }
    );
    let density = &view.density;
    let mut f = |u: f64| -> Result<Complex64> {
        let d = density(s * u);
        if !d.is_finite() {
            return Err(Error::NonFiniteIntegrand {
                context: context.clone(),
                x: s * u,
            });
        }
        Ok(kernel.eval(s * u)? * d)
    };
    let opts = policy.adapt_opts();

    let tail_info = if u_hi.is_finite() {
        TailInfo::None
    } else {
        (view.tail)(side)
    };
    let r_cut = match &tail_info {
        TailInfo::None => {
            if !u_hi.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "{context} has unbounded support but no tail description"
                )));
            }
            u_hi
        }
        TailInfo::Power { q, min_radius, .. } => {
            if !(*q > 1.0) {
                return Err(Error::InvalidMeasure(format!(
                    "{context} has a power tail u^-{q} with infinite mass"
                )));
            }
            min_radius.max(1.0).max(u_lo)
        }
        TailInfo::ExpDecay { rate, .. } => {
            if !(*rate > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "{context} declares a non-decaying exponential tail"
                )));
            }
            1.0f64.max(u_lo)
        }
    };

    // Near-origin power endpoint: flatten u^{-q_int} by u = x1 v^m, which
    // makes the substituted integrand vanish like v^{m(1 - q_int) - 1}.
    let q_int = view.q_zero - kernel.zero_order();
    let mut start = u_lo;
    if u_lo == 0.0 && q_int > 0.0 {
        if q_int >= 1.0 {
            return Err(Error::InvalidMeasure(format!(
                "{} diverges like u^-{:.2} at the origin against kernel `{}`",
                view.name,
                view.q_zero,
                kernel.name()
            )));
        }
        let x1 = r_cut.min(1.0);
        let m = (1.0 / (1.0 - q_int)).ceil() as i32 + 1;
        let mf = f64::from(m);
        let v_breaks: Vec<f64> = osc_breaks(0.0, x1, kernel.freq(), policy)
            .into_iter()
            .map(|u| (u / x1).powf(1.0 / mf))
            .collect();
        let sub = |v: f64| -> Result<Complex64> {
            if v == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let u = x1 * v.powi(m);
            let jac = x1 * mf * v.powi(m - 1);
            Ok(f(u)? * jac)
        };
        acc.add(gk21_adaptive_segmented(sub, &v_breaks, &opts)?);
        start = x1;
    }

    // Bounded span up to the tail radius, split at the unit-ball kink and
    // into sub-period chunks where the kernel oscillates.
    if r_cut > start {
        let mut marks = vec![start];
        if 1.0 > start && 1.0 < r_cut {
            marks.push(1.0);
        }
        marks.push(r_cut);
        let mut breaks: Vec<f64> = Vec::new();
        for w in marks.windows(2) {
            let seg = osc_breaks(w[0], w[1], kernel.freq(), policy);
            if breaks.is_empty() {
                breaks.extend(seg);
            } else {
                breaks.extend(seg.into_iter().skip(1));
            }
        }
        acc.add(gk21_adaptive_segmented(&mut f, &breaks, &opts)?);
    }

    match tail_info {
        TailInfo::None => {}
        TailInfo::Power { q, cont, .. } => match kernel.tail(side) {
            KernelTail::Direct => {
                let kf = |u: f64| kernel.eval(s * u);
                acc.add(power_tail(kf, |u| density(s * u), q, r_cut, &context, policy)?);
            }
            KernelTail::Split { osc, rest } => {
                for term in &osc {
                    acc.add(rotated_osc_tail(term, cont.as_ref(), r_cut, &context, policy)?);
                }
                let kf = |u: f64| rest(u);
                acc.add(power_tail(kf, |u| density(s * u), q, r_cut, &context, policy)?);
            }
        },
        TailInfo::ExpDecay { rate, factor } => {
            let g = |y: f64| -> Result<Complex64> {
                let u = r_cut + y;
                let fac = factor(u);
                if !fac.is_finite() {
                    return Err(Error::NonFiniteIntegrand {
                        context: context.clone(),
                        x: s * u,
                    });
                }
                Ok(kernel.eval(s * u)? * fac)
            };
            let q = laplace_quad_core(g, rate, policy)?;
            let damp = (-rate * r_cut).exp();
            acc.add(Quad {
                value: q.value * damp,
                err_est: q.err_est * damp,
            });
        }
    }
    Ok(())
}

/// Breakpoints subdividing [a, b] into at most one chunk per half period of
/// an oscillation with angular frequency `freq`.
fn osc_breaks(a: f64, b: f64, freq: f64, policy: &QuadraturePolicy) -> Vec<f64> {
    let len = b - a;
    let cycles = freq.abs() * len;
    if !(cycles > policy.oscillation_threshold) {
        return vec![a, b];
    }
    let n = ((cycles / std::f64::consts::PI).ceil() as usize).clamp(2, 1024);
    (0..=n).map(|k| a + len * k as f64 / n as f64).collect()
}

/// integral over [R, inf) of kf(u) density(u) du for a density with power
/// tail factor(u) u^{-q}: substituting u = R w^{-1/beta}, beta = q - 1, and
/// then w = v^2 gives (R^{1-q}/beta) integral over (0,1] of
/// kf(u(v^2)) factor(u(v^2)) 2v dv with a bounded integrand (the extra square
/// root absorbs logarithmic kernel growth at the endpoint).
fn power_tail(
    mut kf: impl FnMut(f64) -> Result<Complex64>,
    density: impl Fn(f64) -> f64,
    q: f64,
    r: f64,
    context: &str,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    let beta = q - 1.0;
    let pref = r.powf(1.0 - q) / beta;
    let integrand = |v: f64| -> Result<Complex64> {
        if v == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w = v * v;
        let u = r * w.powf(-1.0 / beta);
        let factor = density(u) * u.powf(q);
        if !factor.is_finite() {
            return Err(Error::NonFiniteIntegrand {
                context: context.to_string(),
                x: u,
            });
        }
        Ok(kf(u)? * factor * 2.0 * v)
    };
    let quad = gk21_adaptive_segmented(integrand, &[0.0, 1.0], &policy.adapt_opts())?;
    Ok(quad.scale(pref.into()))
}

/// integral over [R, inf) of amp(u) e^{i omega u} cont(u) du, rotated onto
/// the vertical contour z = R + i sgn(omega) y where the oscillation decays:
/// i sgn(omega) e^{i omega R} integral over y of amp(z) cont(z) e^{-|omega| y} dy.
/// Valid because amp and cont are analytic and decaying on the closing
/// quarter-circle for Re z >= R.
fn rotated_osc_tail(
    term: &OscTerm,
    cont: &dyn Fn(Complex64) -> Complex64,
    r: f64,
    context: &str,
    policy: &QuadraturePolicy,
) -> Result<Quad> {
    let omega = term.omega;
    debug_assert!(omega != 0.0, "oscillatory tail term with zero frequency");
    let sgn = omega.signum();
    let g = |y: f64| -> Result<Complex64> {
        let z = Complex64::new(r, sgn * y);
        let c = cont(z);
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::NonFiniteIntegrand {
                context: context.to_string(),
                x: y,
            });
        }
        Ok((term.amp)(z)? * c)
    };
    let quad = laplace_quad_core(g, omega.abs(), policy)?;
    let phase = Complex64::new(0.0, sgn) * Complex64::new(0.0, omega * r).exp();
    Ok(Quad {
        value: quad.value * phase,
        err_est: quad.err_est,
    })
}
