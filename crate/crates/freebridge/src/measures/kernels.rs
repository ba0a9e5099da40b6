//! Pointwise kernels integrated against jump measures, with the structure the
//! integration engine needs: stable evaluation near the origin (series
//! branches), oscillation frequency, and a tail decomposition into analytic
//! oscillatory terms plus a slowly varying remainder.
//!
//! Kernels that enter characteristic exponents vanish to second order at the
//! origin; that contract is what makes them integrable against jump densities
//! growing like x^{-2}, and the engine enforces it by sampling.

use num_complex::Complex64;

use super::pieces::Side;
use crate::error::{Error, Result};
use crate::numerics::special::{e1_scaled_complex, osc_exp_integral};

type CFn = Box<dyn Fn(f64) -> Result<Complex64>>;
type AmpFn = Box<dyn Fn(Complex64) -> Result<Complex64>>;

/// One oscillatory tail term amp(u) e^{i omega u} with analytic amplitude.
pub struct OscTerm {
    pub omega: f64,
    pub amp: AmpFn,
}

/// Kernel behavior for u >= tail radius on a fixed side.
pub enum KernelTail {
    /// evaluate directly: settles to a constant or grows at most like log u
    Direct,
    /// K(side u) = sum_j amp_j(u) e^{i omega_j u} + rest(u)
    Split { osc: Vec<OscTerm>, rest: CFn },
}

pub trait LevyKernel {
    fn name(&self) -> String;
    /// Stable evaluation at any real x != 0 (and at 0 for bounded kernels).
    fn eval(&self, x: f64) -> Result<Complex64>;
    /// Order of vanishing at the origin: 2 for jump-measure kernels, 0 for
    /// kernels only used against finite measures.
    fn zero_order(&self) -> f64;
    /// Dominant oscillation frequency (0 for non-oscillatory kernels).
    fn freq(&self) -> f64 {
        0.0
    }
    /// Tail decomposition, valid for u >= 1.
    fn tail(&self, side: Side) -> KernelTail {
        let _ = side;
        KernelTail::Direct
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// e^{i theta} - 1 without cancellation: (-2 sin^2(theta/2), sin theta).
pub(crate) fn cis_m1(theta: f64) -> Complex64 {
    let s = (0.5 * theta).sin();
    c(-2.0 * s * s, theta.sin())
}

/// sin(theta) - theta, series below 0.5 where the direct form cancels.
fn sin_m_arg(theta: f64) -> f64 {
    if theta.abs() > 0.5 {
        theta.sin() - theta
    } else {
        // -theta^3/3! + theta^5/5! - ...
        let t2 = theta * theta;
        let mut term = -theta * t2 / 6.0;
        let mut sum = term;
        for k in 2..=12u32 {
            let n = 2 * k + 1;
            term *= -t2 / ((n - 1) as f64 * n as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-280) {
                break;
            }
        }
        sum
    }
}

/// Kernel of the classical characteristic exponent:
/// e^{itx} - 1 - itx 1_{|x| <= 1}.
pub struct CharKernel {
    pub t: f64,
}

impl LevyKernel for CharKernel {
    fn name(&self) -> String {
        format!("char_exponent(t={})", self.t)
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        let theta = self.t * x;
        if x.abs() <= 1.0 {
            if theta.abs() <= 0.5 {
                // sum_{k>=2} (i theta)^k / k!
                let it = c(0.0, theta);
                let mut term = it * it * 0.5;
                let mut sum = term;
                for k in 3..=24 {
                    term *= it / k as f64;
                    sum += term;
                    if term.norm() < 1e-18 * sum.norm().max(1e-280) {
                        break;
                    }
                }
                Ok(sum)
            } else {
                let s = (0.5 * theta).sin();
                Ok(c(-2.0 * s * s, sin_m_arg(theta)))
            }
        } else {
            Ok(cis_m1(theta))
        }
    }

    fn zero_order(&self) -> f64 {
        2.0
    }

    fn freq(&self) -> f64 {
        self.t.abs()
    }

    fn tail(&self, side: Side) -> KernelTail {
        if self.t == 0.0 {
            return KernelTail::Direct;
        }
        let omega = self.t * side.sign();
        KernelTail::Split {
            osc: vec![OscTerm {
                omega,
                amp: Box::new(|_| Ok(c(1.0, 0.0))),
            }],
            rest: Box::new(|_| Ok(c(-1.0, 0.0))),
        }
    }
}

/// Kernel of the Laplace-dual exponent:
/// 1/(1 - itx) - 1 - itx 1_{|x| <= 1}, evaluated through the exact
/// rearrangements (itx)^2/(1 - itx) inside the ball and itx/(1 - itx) outside.
pub struct UpsilonKernel {
    pub t: f64,
}

impl LevyKernel for UpsilonKernel {
    fn name(&self) -> String {
        format!("upsilon(t={})", self.t)
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        let q = c(0.0, self.t * x);
        let denom = c(1.0, 0.0) - q;
        if x.abs() <= 1.0 {
            Ok(q * q / denom)
        } else {
            Ok(q / denom)
        }
    }

    fn zero_order(&self) -> f64 {
        2.0
    }
}

/// Kernel of the s-self-decomposable log-characteristic function:
/// (e^{iwx} - 1)/(iwx) - 1 - (i/2) w x 1_{|x| <= 1}.
pub struct SSelfdecKernel {
    pub w: f64,
}

impl LevyKernel for SSelfdecKernel {
    fn name(&self) -> String {
        format!("s_selfdec(w={})", self.w)
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        let theta = self.w * x;
        let q = c(0.0, theta);
        let inside = x.abs() <= 1.0;
        if theta.abs() <= 0.5 {
            // (e^q - 1)/q - 1 = sum_{k>=1} q^k/(k+1)!
            let mut sum = c(0.0, 0.0);
            let mut term = c(1.0, 0.0);
            let mut fact = 1.0;
            for k in 1..=24u32 {
                term *= q;
                fact *= (k + 1) as f64;
                let contrib = term / fact;
                sum += contrib;
                if contrib.norm() < 1e-18 * sum.norm().max(1e-280) {
                    break;
                }
            }
            if inside {
                Ok(sum - q * 0.5)
            } else {
                Ok(sum)
            }
        } else {
            let base = cis_m1(theta) / q - 1.0;
            if inside {
                Ok(base - q * 0.5)
            } else {
                Ok(base)
            }
        }
    }

    fn zero_order(&self) -> f64 {
        2.0
    }

    fn freq(&self) -> f64 {
        self.w.abs()
    }

    fn tail(&self, side: Side) -> KernelTail {
        if self.w == 0.0 {
            return KernelTail::Direct;
        }
        let omega = self.w * side.sign();
        KernelTail::Split {
            osc: vec![OscTerm {
                omega,
                amp: Box::new(move |z| Ok((c(0.0, omega) * z).inv())),
            }],
            rest: Box::new(move |u| Ok(-(c(0.0, omega) * u).inv() - 1.0)),
        }
    }
}

/// Kernel of the self-decomposable log-characteristic function:
/// E(wx) - iwx 1_{|x| <= 1}, where E(c) integrates (e^{iu}-1)/u from 0 to c.
pub struct SelfdecKernel {
    pub w: f64,
}

impl LevyKernel for SelfdecKernel {
    fn name(&self) -> String {
        format!("selfdec(w={})", self.w)
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        let arg = self.w * x;
        let inside = x.abs() <= 1.0;
        if inside && arg.abs() <= 0.5 {
            // E(c) - ic = sum_{k>=2} (ic)^k/(k k!)
            let ic = c(0.0, arg);
            let mut term = ic;
            let mut sum = c(0.0, 0.0);
            let mut kfact = 1.0;
            for k in 2..=24u32 {
                term *= ic;
                kfact *= k as f64;
                let contrib = term / (k as f64 * kfact);
                sum += contrib;
                if contrib.norm() < 1e-18 * sum.norm().max(1e-280) {
                    break;
                }
            }
            Ok(sum)
        } else {
            let e = osc_exp_integral(arg)?;
            if inside {
                Ok(e - c(0.0, arg))
            } else {
                Ok(e)
            }
        }
    }

    fn zero_order(&self) -> f64 {
        2.0
    }

    fn freq(&self) -> f64 {
        self.w.abs()
    }

    fn tail(&self, side: Side) -> KernelTail {
        if self.w == 0.0 {
            return KernelTail::Direct;
        }
        let omega = self.w * side.sign();
        let half_pi = std::f64::consts::FRAC_PI_2;
        let aw = self.w.abs();
        KernelTail::Split {
            osc: vec![OscTerm {
                omega,
                amp: Box::new(move |z| Ok(-e1_scaled_complex(c(0.0, -omega) * z)?)),
            }],
            rest: Box::new(move |u| {
                Ok(c(
                    -crate::numerics::special::EULER_GAMMA - (aw * u).ln(),
                    half_pi * omega.signum(),
                ))
            }),
        }
    }
}

/// Kernel of the free s-self-decomposable transform at z = it (t > 0):
/// -(it)^2 [Log(it - x) - Log(it)]/x - it - (x/2) 1_{|x| <= 1}.
pub struct FreeSSKernel {
    t: f64,
    tau: Complex64,
    /// flips the sign of the log term; only the negative (default) sign
    /// vanishes to second order at the origin
    positive_log_sign: bool,
}

impl FreeSSKernel {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "free transform kernels need t > 0, got {t}"
            )));
        }
        Ok(FreeSSKernel {
            t,
            tau: c(0.0, t),
            positive_log_sign: false,
        })
    }

    /// The variant with the opposite sign on the log term. It fails the
    /// second-order vanishing contract (it tends to -2it at the origin), which
    /// the engine's blowup check demonstrates.
    pub fn with_positive_log_sign(t: f64) -> Result<Self> {
        let mut k = FreeSSKernel::new(t)?;
        k.positive_log_sign = true;
        Ok(k)
    }
}

impl LevyKernel for FreeSSKernel {
    fn name(&self) -> String {
        format!(
            "free_s_selfdec(t={}{})",
            self.t,
            if self.positive_log_sign { ", flipped-sign" } else { "" }
        )
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        let tau = self.tau;
        let inside = x.abs() <= 1.0;
        if self.positive_log_sign {
            // direct form only; no cancellation since the value is O(1) at 0
            let logdiff = (tau - x).ln() - tau.ln();
            let mut v = tau * tau * logdiff / x - tau;
            if inside {
                v -= 0.5 * x;
            }
            return Ok(v);
        }
        if inside && x.abs() <= 0.5 * self.t {
            // sum_{k>=3} x^{k-1} tau^{2-k} / k, term ratio x/tau
            let r = x / tau;
            let mut term = x * x / tau;
            let mut sum = term / 3.0;
            for k in 4..=80u32 {
                term *= r;
                let contrib = term / k as f64;
                sum += contrib;
                if contrib.norm() < 1e-18 * sum.norm().max(1e-280) {
                    break;
                }
            }
            Ok(sum)
        } else {
            let logdiff = (tau - x).ln() - tau.ln();
            let mut v = -tau * tau * logdiff / x - tau;
            if inside {
                v -= 0.5 * x;
            }
            Ok(v)
        }
    }

    fn zero_order(&self) -> f64 {
        2.0
    }
}

/// Kernel of the free self-decomposable transform at z = it (t > 0):
/// it Log(it/(it - x)) - x 1_{|x| <= 1}.
pub struct FreeSDKernel {
    t: f64,
    tau: Complex64,
}

impl FreeSDKernel {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "free transform kernels need t > 0, got {t}"
            )));
        }
        Ok(FreeSDKernel { t, tau: c(0.0, t) })
    }
}

impl LevyKernel for FreeSDKernel {
    fn name(&self) -> String {
        format!("free_selfdec(t={})", self.t)
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        let tau = self.tau;
        let inside = x.abs() <= 1.0;
        if inside && x.abs() <= 0.5 * self.t {
            // sum_{k>=2} x^k tau^{1-k} / k
            let r = x / tau;
            let mut term = x * r; // x^2 / tau
            let mut sum = term * 0.5;
            for k in 3..=80u32 {
                term *= r;
                let contrib = term / k as f64;
                sum += contrib;
                if contrib.norm() < 1e-18 * sum.norm().max(1e-280) {
                    break;
                }
            }
            Ok(sum)
        } else {
            let v = tau * (tau.ln() - (tau - x).ln());
            if inside {
                Ok(v - x)
            } else {
                Ok(v)
            }
        }
    }

    fn zero_order(&self) -> f64 {
        2.0
    }
}

/// A kernel built from a closure; bounded kernels for finite-measure work.
pub struct FnKernel {
    pub label: String,
    pub f: CFn,
    pub zero_order: f64,
    pub freq: f64,
}

impl FnKernel {
    pub fn bounded(label: impl Into<String>, f: impl Fn(f64) -> Result<Complex64> + 'static) -> Self {
        FnKernel {
            label: label.into(),
            f: Box::new(f),
            zero_order: 0.0,
            freq: 0.0,
        }
    }
}

impl LevyKernel for FnKernel {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn eval(&self, x: f64) -> Result<Complex64> {
        (self.f)(x)
    }
    fn zero_order(&self) -> f64 {
        self.zero_order
    }
    fn freq(&self) -> f64 {
        self.freq
    }
}
