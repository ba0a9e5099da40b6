//! Measure building blocks.
//!
//! Two families: [`LevyPiece`] describes jump-measure components (possibly
//! infinite total mass near the origin), [`FinitePiece`] describes components
//! of finite measures. The weight x^2/(1+x^2) and its inverse map one family
//! into the other exactly, which the `Weighted*` wrappers preserve without
//! loss: weighting twice cancels structurally.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];
}

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub at: f64,
    pub mass: f64,
}

/// A finite measure: atoms plus absolutely continuous pieces.
#[derive(Debug, Clone, Default)]
pub struct FiniteMeasure {
    pub atoms: Vec<Atom>,
    pub pieces: Vec<FinitePiece>,
}

impl FiniteMeasure {
    pub fn atom(at: f64, mass: f64) -> Self {
        FiniteMeasure {
            atoms: vec![Atom { at, mass }],
            pieces: Vec::new(),
        }
    }

    pub fn from_pieces(pieces: Vec<FinitePiece>) -> Self {
        FiniteMeasure {
            atoms: Vec::new(),
            pieces,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !a.at.is_finite() || !a.mass.is_finite() || a.mass < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom with location {} and mass {}",
                    a.at, a.mass
                )));
            }
        }
        for p in &self.pieces {
            p.validate()?;
        }
        Ok(())
    }

    pub fn reflect(&self) -> Self {
        FiniteMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { at: -a.at, mass: a.mass })
                .collect(),
            pieces: self.pieces.iter().map(|p| p.reflect()).collect(),
        }
    }
}

/// Absolutely continuous component of a finite measure.
#[derive(Debug, Clone)]
pub enum FinitePiece {
    /// mass * scale / (pi ((x - loc)^2 + scale^2)) dx on the whole line
    CauchyDensity { loc: f64, scale: f64, mass: f64 },
    /// constant density mass/(hi - lo) on [lo, hi]
    Uniform { lo: f64, hi: f64, mass: f64 },
    /// piecewise-linear density through (x, density) points, zero outside
    Tabulated { points: Vec<(f64, f64)> },
    /// x^2/(1+x^2) times a jump-measure density
    WeightedLevy(Box<LevyPiece>),
}

impl FinitePiece {
    pub fn validate(&self) -> Result<()> {
        match self {
            FinitePiece::CauchyDensity { loc, scale, mass } => {
                if !loc.is_finite() || !(*scale > 0.0) || !(*mass >= 0.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "cauchy density loc={loc} scale={scale} mass={mass}"
                    )));
                }
            }
            FinitePiece::Uniform { lo, hi, mass } => {
                if !(hi > lo) || !(*mass >= 0.0) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidMeasure(format!(
                        "uniform density on [{lo}, {hi}] mass={mass}"
                    )));
                }
            }
            FinitePiece::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidMeasure(
                        "tabulated density needs at least two points".into(),
                    ));
                }
                for w in points.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::InvalidMeasure(format!(
                            "tabulated abscissae not increasing at {}",
                            w[1].0
                        )));
                    }
                }
                if points.iter().any(|&(x, d)| !x.is_finite() || !(d >= 0.0)) {
                    return Err(Error::InvalidMeasure(
                        "tabulated density has invalid entries".into(),
                    ));
                }
            }
            FinitePiece::WeightedLevy(inner) => inner.validate()?,
        }
        Ok(())
    }

    pub fn reflect(&self) -> Self {
        match self {
            FinitePiece::CauchyDensity { loc, scale, mass } => FinitePiece::CauchyDensity {
                loc: -loc,
                scale: *scale,
                mass: *mass,
            },
            FinitePiece::Uniform { lo, hi, mass } => FinitePiece::Uniform {
                lo: -hi,
                hi: -lo,
                mass: *mass,
            },
            FinitePiece::Tabulated { points } => {
                let mut pts: Vec<(f64, f64)> = points.iter().map(|&(x, d)| (-x, d)).collect();
                pts.reverse();
                FinitePiece::Tabulated { points: pts }
            }
            FinitePiece::WeightedLevy(inner) => FinitePiece::WeightedLevy(Box::new(inner.reflect())),
        }
    }

    /// Multiply by (1+x^2)/x^2, producing a jump-measure piece. Weighting a
    /// piece that is itself a weighted jump measure unwraps it exactly.
    pub fn unweight(&self) -> LevyPiece {
        match self {
            FinitePiece::WeightedLevy(inner) => (**inner).clone(),
            other => LevyPiece::WeightedFinite(Box::new(other.clone())),
        }
    }
}

/// Absolutely continuous component of a jump measure.
#[derive(Debug, Clone)]
pub enum LevyPiece {
    /// density scale/(pi x^2) on both half-lines
    SymmetricCauchy { scale: f64 },
    /// density c p theta_plus / x^{1+p} for x > 0, c p theta_minus / |x|^{1+p} for x < 0
    StableTails {
        p: f64,
        c: f64,
        theta_plus: f64,
        theta_minus: f64,
    },
    /// density e^{-x}/x on (0, inf); on (-inf, 0) mirrored when flipped
    ExpOverX { flipped: bool },
    /// a finite measure used as a jump measure (away from the origin)
    Finite(FiniteMeasure),
    /// (1+x^2)/x^2 times a finite-measure density
    WeightedFinite(Box<FinitePiece>),
}

impl LevyPiece {
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyPiece::SymmetricCauchy { scale } => {
                if !(*scale > 0.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "symmetric cauchy jump density with scale {scale}"
                    )));
                }
            }
            LevyPiece::StableTails {
                p,
                c,
                theta_plus,
                theta_minus,
            } => {
                if !(*p > 0.0 && *p < 2.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "stable tail index p = {p} outside (0, 2)"
                    )));
                }
                if !(*c > 0.0) || !(*theta_plus >= 0.0) || !(*theta_minus >= 0.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "stable tail weights c={c} theta+={theta_plus} theta-={theta_minus}"
                    )));
                }
                if *theta_plus == 0.0 && *theta_minus == 0.0 {
                    return Err(Error::InvalidMeasure("stable tails with zero weight".into()));
                }
            }
            LevyPiece::ExpOverX { .. } => {}
            LevyPiece::Finite(m) => {
                m.validate()?;
                if m.atoms.iter().any(|a| a.at == 0.0 && a.mass > 0.0) {
                    return Err(Error::InvalidMeasure(
                        "jump measure cannot carry an atom at the origin".into(),
                    ));
                }
            }
            LevyPiece::WeightedFinite(inner) => inner.validate()?,
        }
        Ok(())
    }

    pub fn reflect(&self) -> Self {
        match self {
            LevyPiece::SymmetricCauchy { scale } => LevyPiece::SymmetricCauchy { scale: *scale },
            LevyPiece::StableTails {
                p,
                c,
                theta_plus,
                theta_minus,
            } => LevyPiece::StableTails {
                p: *p,
                c: *c,
                theta_plus: *theta_minus,
                theta_minus: *theta_plus,
            },
            LevyPiece::ExpOverX { flipped } => LevyPiece::ExpOverX { flipped: !flipped },
            LevyPiece::Finite(m) => LevyPiece::Finite(m.reflect()),
            LevyPiece::WeightedFinite(inner) => {
                LevyPiece::WeightedFinite(Box::new(inner.reflect()))
            }
        }
    }

    /// Multiply by x^2/(1+x^2), producing a finite-measure piece. Exact
    /// inverse of [`FinitePiece::unweight`]; a symmetric Cauchy jump density
    /// weights to the standard Cauchy probability density in closed form.
    pub fn weight(&self) -> FinitePiece {
        match self {
            LevyPiece::WeightedFinite(inner) => (**inner).clone(),
            LevyPiece::SymmetricCauchy { scale } => FinitePiece::CauchyDensity {
                loc: 0.0,
                scale: 1.0,
                mass: *scale,
            },
            other => FinitePiece::WeightedLevy(Box::new(other.clone())),
        }
    }
}

/// How a density behaves toward +/- infinity on one side, in the coordinate
/// u = |x| > 0.
pub(crate) enum TailInfo {
    /// compactly supported
    None,
    /// density(side u) = factor(u) u^{-q} with factor settling to a constant;
    /// `cont` is the analytic continuation of u -> density(side u) to the
    /// right quadrants, pole-free for Re z >= min_radius
    Power {
        q: f64,
        min_radius: f64,
        cont: Box<dyn Fn(Complex64) -> Complex64>,
    },
    /// density(side u) = factor(u) e^{-rate u}; the factor is supplied
    /// separately because the product over/underflows where the pieces don't
    ExpDecay {
        rate: f64,
        factor: Box<dyn Fn(f64) -> f64>,
    },
}

/// Everything the integration engine needs to know about one density piece.
pub(crate) struct PieceView {
    pub name: String,
    /// density at signed x (zero off the support)
    pub density: Box<dyn Fn(f64) -> f64>,
    /// density ~ |x|^{-q_zero} near the origin (0 when bounded)
    pub q_zero: f64,
    /// true when the total mass near the origin is infinite
    pub infinite_mass: bool,
    /// signed support bounds (may be infinite)
    pub support: (f64, f64),
    pub tail: Box<dyn Fn(Side) -> TailInfo>,
}

fn cauchy_pdf(loc: f64, scale: f64, mass: f64, x: f64) -> f64 {
    mass * scale / (std::f64::consts::PI * ((x - loc) * (x - loc) + scale * scale))
}

fn tabulated_density(points: &[(f64, f64)], x: f64) -> f64 {
    let n = points.len();
    if x < points[0].0 || x > points[n - 1].0 {
        return 0.0;
    }
    let idx = points.partition_point(|&(px, _)| px <= x);
    if idx == 0 {
        return points[0].1;
    }
    if idx >= n {
        return points[n - 1].1;
    }
    let (x0, d0) = points[idx - 1];
    let (x1, d1) = points[idx];
    d0 + (d1 - d0) * (x - x0) / (x1 - x0)
}

/// x^2/(1+x^2) for real x.
pub(crate) fn levy_weight(x: f64) -> f64 {
    let x2 = x * x;
    x2 / (1.0 + x2)
}

impl FinitePiece {
    pub(crate) fn view(&self) -> PieceView {
        match self {
            FinitePiece::CauchyDensity { loc, scale, mass } => {
                let (l, s, m) = (*loc, *scale, *mass);
                PieceView {
                    name: format!("cauchy_density(loc={l}, scale={s})"),
                    density: Box::new(move |x| cauchy_pdf(l, s, m, x)),
                    q_zero: 0.0,
                    infinite_mass: false,
                    support: (f64::NEG_INFINITY, f64::INFINITY),
                    tail: Box::new(move |side| TailInfo::Power {
                        q: 2.0,
                        min_radius: l.abs() + s + 1.0,
                        cont: Box::new(move |z| {
                            let sh = z * side.sign() - l;
                            m * s / (std::f64::consts::PI * (sh * sh + s * s))
                        }),
                    }),
                }
            }
            FinitePiece::Uniform { lo, hi, mass } => {
                let (a, b, d) = (*lo, *hi, *mass / (*hi - *lo));
                PieceView {
                    name: format!("uniform([{a}, {b}])"),
                    density: Box::new(move |x| if x >= a && x <= b { d } else { 0.0 }),
                    q_zero: 0.0,
                    infinite_mass: false,
                    support: (a, b),
                    tail: Box::new(|_| TailInfo::None),
                }
            }
            FinitePiece::Tabulated { points } => {
                let pts = points.clone();
                let lo = pts[0].0;
                let hi = pts[pts.len() - 1].0;
                PieceView {
                    name: format!("tabulated([{lo}, {hi}])"),
                    density: Box::new(move |x| tabulated_density(&pts, x)),
                    q_zero: 0.0,
                    infinite_mass: false,
                    support: (lo, hi),
                    tail: Box::new(|_| TailInfo::None),
                }
            }
            FinitePiece::WeightedLevy(inner) => {
                let iv = inner.view();
                let idens = iv.density;
                let name = format!("weighted({})", iv.name);
                let itail = iv.tail;
                PieceView {
                    name,
                    density: Box::new(move |x| levy_weight(x) * idens(x)),
                    q_zero: (iv.q_zero - 2.0).max(0.0),
                    infinite_mass: false,
                    support: iv.support,
                    tail: Box::new(move |side| match itail(side) {
                        TailInfo::None => TailInfo::None,
                        TailInfo::Power { q, min_radius, cont } => TailInfo::Power {
                            q,
                            min_radius: min_radius.max(1.0),
                            cont: Box::new(move |z| {
                                let z2 = z * z;
                                z2 / (1.0 + z2) * cont(z)
                            }),
                        },
                        TailInfo::ExpDecay { rate, factor } => TailInfo::ExpDecay {
                            rate,
                            factor: Box::new(move |u| u * u / (1.0 + u * u) * factor(u)),
                        },
                    }),
                }
            }
        }
    }
}

impl LevyPiece {
    pub(crate) fn view(&self) -> PieceView {
        match self {
            LevyPiece::SymmetricCauchy { scale } => {
                let s = *scale;
                PieceView {
                    name: format!("symmetric_cauchy(scale={s})"),
                    density: Box::new(move |x| s / (std::f64::consts::PI * x * x)),
                    q_zero: 2.0,
                    infinite_mass: true,
                    support: (f64::NEG_INFINITY, f64::INFINITY),
                    tail: Box::new(move |_| TailInfo::Power {
                        q: 2.0,
                        min_radius: 1.0,
                        cont: Box::new(move |z| s / (std::f64::consts::PI * z * z)),
                    }),
                }
            }
            LevyPiece::StableTails {
                p,
                c,
                theta_plus,
                theta_minus,
            } => {
                let (p, c, tp, tm) = (*p, *c, *theta_plus, *theta_minus);
                let coef = move |side: f64| c * p * if side > 0.0 { tp } else { tm };
                let support = (
                    if tm > 0.0 { f64::NEG_INFINITY } else { 0.0 },
                    if tp > 0.0 { f64::INFINITY } else { 0.0 },
                );
                PieceView {
                    name: format!("stable_tails(p={p})"),
                    density: Box::new(move |x| coef(x) * x.abs().powf(-1.0 - p)),
                    q_zero: 1.0 + p,
                    infinite_mass: true,
                    support,
                    tail: Box::new(move |side| TailInfo::Power {
                        q: 1.0 + p,
                        min_radius: 1.0,
                        cont: Box::new(move |z| coef(side.sign()) * z.powc((-1.0 - p).into())),
                    }),
                }
            }
            LevyPiece::ExpOverX { flipped } => {
                let fl = *flipped;
                let support = if fl {
                    (f64::NEG_INFINITY, 0.0)
                } else {
                    (0.0, f64::INFINITY)
                };
                PieceView {
                    name: format!("exp_over_x(flipped={fl})"),
                    density: Box::new(move |x| {
                        let u = if fl { -x } else { x };
                        if u > 0.0 {
                            (-u).exp() / u
                        } else {
                            0.0
                        }
                    }),
                    q_zero: 1.0,
                    infinite_mass: true,
                    support,
                    tail: Box::new(|_| TailInfo::ExpDecay {
                        rate: 1.0,
                        factor: Box::new(|u| 1.0 / u),
                    }),
                }
            }
            // top-level finite measures are expanded by the engine; the
            // singleton wrapper produced by the pair conversions views as its
            // one density piece
            LevyPiece::Finite(m) if m.atoms.is_empty() && m.pieces.len() == 1 => {
                m.pieces[0].view()
            }
            LevyPiece::Finite(_) => unreachable!("finite measures are expanded by the engine"),
            LevyPiece::WeightedFinite(inner) => {
                let iv = inner.view();
                let idens = iv.density;
                let name = format!("unweighted({})", iv.name);
                let itail = iv.tail;
                PieceView {
                    name,
                    // (1+x^2)/x^2 blows up like x^{-2} at the origin
                    density: Box::new(move |x| idens(x) / levy_weight(x)),
                    q_zero: iv.q_zero + 2.0,
                    infinite_mass: true,
                    support: iv.support,
                    tail: Box::new(move |side| match itail(side) {
                        TailInfo::None => TailInfo::None,
                        TailInfo::Power { q, min_radius, cont } => TailInfo::Power {
                            q,
                            min_radius: min_radius.max(1.0),
                            cont: Box::new(move |z| {
                                let z2 = z * z;
                                (1.0 + z2) / z2 * cont(z)
                            }),
                        },
                        TailInfo::ExpDecay { rate, factor } => TailInfo::ExpDecay {
                            rate,
                            factor: Box::new(move |u| (1.0 + u * u) / (u * u) * factor(u)),
                        },
                    }),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_roundtrips_exactly() {
        let p = LevyPiece::StableTails {
            p: 0.5,
            c: 1.0,
            theta_plus: 1.0,
            theta_minus: 0.0,
        };
        match p.weight().unweight() {
            LevyPiece::StableTails { p, .. } => assert_eq!(p, 0.5),
            other => panic!("expected stable tails back, got {other:?}"),
        }
        let f = FinitePiece::Uniform {
            lo: 0.0,
            hi: 1.0,
            mass: 1.0,
        };
        match f.unweight().weight() {
            FinitePiece::Uniform { hi, .. } => assert_eq!(hi, 1.0),
            other => panic!("expected uniform back, got {other:?}"),
        }
    }

    #[test]
    fn symmetric_cauchy_weights_to_cauchy_density() {
        let p = LevyPiece::SymmetricCauchy { scale: 2.0 };
        match p.weight() {
            FinitePiece::CauchyDensity { loc, scale, mass } => {
                assert_eq!((loc, scale, mass), (0.0, 1.0, 2.0));
            }
            other => panic!("expected closed-form cauchy density, got {other:?}"),
        }
    }

    #[test]
    fn reflect_involutive() {
        let p = LevyPiece::StableTails {
            p: 1.5,
            c: 2.0,
            theta_plus: 0.75,
            theta_minus: 0.25,
        };
        match p.reflect() {
            LevyPiece::StableTails {
                theta_plus,
                theta_minus,
                ..
            } => assert_eq!((theta_plus, theta_minus), (0.25, 0.75)),
            other => panic!("unexpected {other:?}"),
        }
        let e = LevyPiece::ExpOverX { flipped: false };
        let back = e.reflect().reflect();
        match back {
            LevyPiece::ExpOverX { flipped } => assert!(!flipped),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tabulated_interpolation() {
        let t = FinitePiece::Tabulated {
            points: vec![(0.0, 0.0), (1.0, 2.0), (3.0, 0.0)],
        };
        let v = t.view();
        assert_eq!((v.density)(0.5), 1.0);
        assert_eq!((v.density)(2.0), 1.0);
        assert_eq!((v.density)(5.0), 0.0);
        assert_eq!((v.density)(-1.0), 0.0);
    }

    #[test]
    fn validation_catches_bad_inputs() {
        assert!(LevyPiece::StableTails {
            p: 2.0,
            c: 1.0,
            theta_plus: 1.0,
            theta_minus: 0.0
        }
        .validate()
        .is_err());
        assert!(FinitePiece::Uniform {
            lo: 1.0,
            hi: 0.0,
            mass: 1.0
        }
        .validate()
        .is_err());
        assert!(LevyPiece::Finite(FiniteMeasure::atom(0.0, 1.0)).validate().is_err());
        assert!(LevyPiece::Finite(FiniteMeasure::atom(1.0, 1.0)).validate().is_ok());
    }

}
