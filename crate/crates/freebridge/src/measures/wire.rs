//! On-disk JSON schema for triplets and finite measures, kept separate from
//! the in-memory types so the file format stays flat and stable:
//!
//! ```json
//! {"a": 0.0, "sigma2": 1.0,
//!  "M": {"atoms": [{"x": 1.0, "mass": 0.5}],
//!        "pieces": [{"kind": "stable_tail", "p": 0.5, "c": 1.0, "theta": 1.0}]}}
//! ```
//!
//! Jump-measure piece kinds: `cauchy_tail`, `stable_tail`, `exp_over_x`,
//! `tabulated`. Finite measures (`rho` in pair files, compound-Poisson jump
//! laws) use `cauchy_density`, `uniform`, `tabulated` and the `weighted_*`
//! forms of the jump kinds. A kind used in the wrong context is a clean error,
//! not a silent reinterpretation.

use serde::{Deserialize, Serialize};

use super::pieces::{Atom, FiniteMeasure, FinitePiece, LevyPiece};
use super::LevyTriplet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripletJson {
    pub a: f64,
    #[serde(default)]
    pub sigma2: f64,
    #[serde(default, rename = "M", skip_serializing_if = "MeasureJson::is_empty")]
    pub m: MeasureJson,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MeasureJson {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<PieceJson>,
}

impl MeasureJson {
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AtomJson {
    pub x: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceJson {
    /// scale/(pi x^2) dx; jump measure of the symmetric Cauchy law
    CauchyTail { scale: f64 },
    /// c p theta x^{-p-1} dx on x > 0 plus c p (1-theta) |x|^{-p-1} dx on x < 0
    StableTail { p: f64, c: f64, theta: f64 },
    /// e^{-x}/x dx on x > 0 (reflected onto x < 0 when flipped)
    ExpOverX {
        #[serde(default)]
        flipped: bool,
    },
    /// piecewise-linear density through (x, density) grid points
    Tabulated { points: Vec<(f64, f64)> },
    /// finite-measure kinds
    CauchyDensity { loc: f64, scale: f64, mass: f64 },
    Uniform { lo: f64, hi: f64, mass: f64 },
    /// x^2/(1+x^2) times the matching jump-measure kind
    WeightedStableTail { p: f64, c: f64, theta: f64 },
    WeightedExpOverX {
        #[serde(default)]
        flipped: bool,
    },
}

fn stable_from_wire(p: f64, c: f64, theta: f64) -> LevyPiece {
    LevyPiece::StableTails {
        p,
        c,
        theta_plus: theta,
        theta_minus: 1.0 - theta,
    }
}

fn stable_to_wire(p: f64, c: f64, theta_plus: f64, theta_minus: f64) -> PieceJson {
    let sum = theta_plus + theta_minus;
    PieceJson::StableTail {
        p,
        c: c * sum,
        theta: theta_plus / sum,
    }
}

pub fn triplet_from_json(j: &TripletJson) -> Result<LevyTriplet> {
    let mut jumps: Vec<LevyPiece> = Vec::new();
    let mut finite = FiniteMeasure::default();
    for a in &j.m.atoms {
        finite.atoms.push(Atom {
            at: a.x,
            mass: a.mass,
        });
    }
    for p in &j.m.pieces {
        match p {
            PieceJson::CauchyTail { scale } => {
                jumps.push(LevyPiece::SymmetricCauchy { scale: *scale })
            }
            PieceJson::StableTail { p, c, theta } => {
                jumps.push(stable_from_wire(*p, *c, *theta))
            }
            PieceJson::ExpOverX { flipped } => {
                jumps.push(LevyPiece::ExpOverX { flipped: *flipped })
            }
            PieceJson::Tabulated { points } => {
                let first = points.first().map(|q| q.0).unwrap_or(0.0);
                let last = points.last().map(|q| q.0).unwrap_or(0.0);
                if first <= 0.0 && last >= 0.0 {
                    return Err(Error::InvalidMeasure(format!(
                        "tabulated jump density on [{first}, {last}] must exclude 0"
                    )));
                }
                finite.pieces.push(FinitePiece::Tabulated {
                    points: points.clone(),
                });
            }
            PieceJson::CauchyDensity { loc, scale, mass } => {
                finite.pieces.push(FinitePiece::CauchyDensity {
                    loc: *loc,
                    scale: *scale,
                    mass: *mass,
                })
            }
            PieceJson::Uniform { lo, hi, mass } => finite.pieces.push(FinitePiece::Uniform {
                lo: *lo,
                hi: *hi,
                mass: *mass,
            }),
            PieceJson::WeightedStableTail { .. } | PieceJson::WeightedExpOverX { .. } => {
                return Err(Error::Config(
                    "weighted pieces describe finite measures, not jump measures".into(),
                ))
            }
        }
    }
    if !finite.is_empty() {
        jumps.push(LevyPiece::Finite(finite));
    }
    Ok(LevyTriplet {
        shift: j.a,
        gauss_var: j.sigma2,
        jumps,
    })
}

pub fn triplet_to_json(t: &LevyTriplet) -> Result<TripletJson> {
    let mut m = MeasureJson::default();
    for piece in &t.jumps {
        match piece {
            LevyPiece::SymmetricCauchy { scale } => {
                m.pieces.push(PieceJson::CauchyTail { scale: *scale })
            }
            LevyPiece::StableTails {
                p,
                c,
                theta_plus,
                theta_minus,
            } => m
                .pieces
                .push(stable_to_wire(*p, *c, *theta_plus, *theta_minus)),
            LevyPiece::ExpOverX { flipped } => {
                m.pieces.push(PieceJson::ExpOverX { flipped: *flipped })
            }
            LevyPiece::Finite(fm) => {
                for a in &fm.atoms {
                    m.atoms.push(AtomJson {
                        x: a.at,
                        mass: a.mass,
                    });
                }
                for fp in &fm.pieces {
                    m.pieces.push(finite_piece_to_json(fp)?);
                }
            }
            LevyPiece::WeightedFinite(_) => {
                return Err(Error::Config(
                    "a jump measure obtained by unweighting a finite piece has no \
                     file representation"
                        .into(),
                ))
            }
        }
    }
    Ok(TripletJson {
        a: t.shift,
        sigma2: t.gauss_var,
        m,
    })
}

fn finite_piece_to_json(fp: &FinitePiece) -> Result<PieceJson> {
    Ok(match fp {
        FinitePiece::CauchyDensity { loc, scale, mass } => PieceJson::CauchyDensity {
            loc: *loc,
            scale: *scale,
            mass: *mass,
        },
        FinitePiece::Uniform { lo, hi, mass } => PieceJson::Uniform {
            lo: *lo,
            hi: *hi,
            mass: *mass,
        },
        FinitePiece::Tabulated { points } => PieceJson::Tabulated {
            points: points.clone(),
        },
        FinitePiece::WeightedLevy(inner) => match inner.as_ref() {
            LevyPiece::StableTails {
                p,
                c,
                theta_plus,
                theta_minus,
            } => {
                let sum = theta_plus + theta_minus;
                PieceJson::WeightedStableTail {
                    p: *p,
                    c: c * sum,
                    theta: theta_plus / sum,
                }
            }
            LevyPiece::ExpOverX { flipped } => PieceJson::WeightedExpOverX { flipped: *flipped },
            other => {
                return Err(Error::Config(format!(
                    "weighted piece {other:?} has no file representation"
                )))
            }
        },
    })
}

pub fn finite_from_json(j: &MeasureJson) -> Result<FiniteMeasure> {
    let mut out = FiniteMeasure::default();
    for a in &j.atoms {
        out.atoms.push(Atom {
            at: a.x,
            mass: a.mass,
        });
    }
    for p in &j.pieces {
        match p {
            PieceJson::CauchyDensity { loc, scale, mass } => {
                out.pieces.push(FinitePiece::CauchyDensity {
                    loc: *loc,
                    scale: *scale,
                    mass: *mass,
                })
            }
            PieceJson::Uniform { lo, hi, mass } => out.pieces.push(FinitePiece::Uniform {
                lo: *lo,
                hi: *hi,
                mass: *mass,
            }),
            PieceJson::Tabulated { points } => out.pieces.push(FinitePiece::Tabulated {
                points: points.clone(),
            }),
            PieceJson::WeightedStableTail { p, c, theta } => out
                .pieces
                .push(FinitePiece::WeightedLevy(Box::new(stable_from_wire(
                    *p, *c, *theta,
                )))),
            PieceJson::WeightedExpOverX { flipped } => {
                out.pieces
                    .push(FinitePiece::WeightedLevy(Box::new(LevyPiece::ExpOverX {
                        flipped: *flipped,
                    })))
            }
            PieceJson::CauchyTail { .. }
            | PieceJson::StableTail { .. }
            | PieceJson::ExpOverX { .. } => {
                return Err(Error::Config(format!(
                    "piece {p:?} has infinite mass and cannot enter a finite measure"
                )))
            }
        }
    }
    Ok(out)
}

pub fn finite_to_json(m: &FiniteMeasure) -> Result<MeasureJson> {
    let mut out = MeasureJson::default();
    for a in &m.atoms {
        out.atoms.push(AtomJson {
            x: a.at,
            mass: a.mass,
        });
    }
    for p in &m.pieces {
        out.pieces.push(match p {
            FinitePiece::WeightedLevy(inner) => match inner.as_ref() {
                LevyPiece::SymmetricCauchy { scale } => {
                    // closed-form weighting: the wire stays in finite kinds
                    PieceJson::CauchyDensity {
                        loc: 0.0,
                        scale: 1.0,
                        mass: *scale,
                    }
                }
                _ => finite_piece_to_json(p)?,
            },
            other => finite_piece_to_json(other)?,
        });
    }
    Ok(out)
}

impl Serialize for LevyTriplet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        triplet_to_json(self)
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LevyTriplet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TripletJson::deserialize(d)?;
        triplet_from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for FiniteMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        finite_to_json(self)
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MeasureJson::deserialize(d)?;
        finite_from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplet_roundtrip_through_schema() {
        let text = r#"{
            "a": 0.25, "sigma2": 1.5,
            "M": {
                "atoms": [{"x": 1.0, "mass": 0.5}],
                "pieces": [
                    {"kind": "cauchy_tail", "scale": 2.0},
                    {"kind": "stable_tail", "p": 0.5, "c": 1.0, "theta": 1.0},
                    {"kind": "exp_over_x"}
                ]
            }
        }"#;
        let t: LevyTriplet = serde_json::from_str(text).unwrap();
        assert_eq!(t.shift, 0.25);
        assert_eq!(t.gauss_var, 1.5);
        assert_eq!(t.jumps.len(), 4); // three densities plus the atom bundle
        t.validate().unwrap();

        let back = serde_json::to_string(&t).unwrap();
        let t2: LevyTriplet = serde_json::from_str(&back).unwrap();
        assert_eq!(t2.jumps.len(), 4);
        assert!(back.contains("\"kind\":\"stable_tail\""));
        assert!(back.contains("\"theta\":1.0"));
    }

    #[test]
    fn gaussian_triplet_omits_empty_measure() {
        let t = LevyTriplet::gaussian(0.0, 1.0);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"a":0.0,"sigma2":1.0}"#);
    }

    #[test]
    fn finite_measure_roundtrip() {
        let text = r#"{
            "atoms": [{"x": 0.0, "mass": 2.0}],
            "pieces": [
                {"kind": "cauchy_density", "loc": 0.0, "scale": 1.0, "mass": 1.0},
                {"kind": "weighted_stable_tail", "p": 1.5, "c": 0.5, "theta": 0.5},
                {"kind": "uniform", "lo": 1.0, "hi": 2.0, "mass": 0.3}
            ]
        }"#;
        let m: FiniteMeasure = serde_json::from_str(text).unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert_eq!(m.pieces.len(), 3);
        let back = serde_json::to_string(&m).unwrap();
        let m2: FiniteMeasure = serde_json::from_str(&back).unwrap();
        assert_eq!(m2.pieces.len(), 3);
    }

    #[test]
    fn wrong_context_kinds_are_rejected() {
        let levy_in_finite = r#"{"pieces": [{"kind": "cauchy_tail", "scale": 1.0}]}"#;
        assert!(serde_json::from_str::<FiniteMeasure>(levy_in_finite).is_err());

        let weighted_in_levy =
            r#"{"a": 0.0, "M": {"pieces": [{"kind": "weighted_exp_over_x"}]}}"#;
        assert!(serde_json::from_str::<LevyTriplet>(weighted_in_levy).is_err());

        let zero_spanning_grid = r#"{"a": 0.0, "M": {"pieces": [
            {"kind": "tabulated", "points": [[-1.0, 0.1], [1.0, 0.1]]}
        ]}}"#;
        assert!(serde_json::from_str::<LevyTriplet>(zero_spanning_grid).is_err());
    }

    #[test]
    fn parametric_law_schema() {
        let law: super::super::ParametricLaw =
            serde_json::from_str(r#"{"family": "stable", "p": 0.5, "c": 1.0, "beta": 1.0, "shift": 0.0}"#)
                .unwrap();
        match law {
            super::super::ParametricLaw::Stable { p, .. } => assert_eq!(p, 0.5),
            other => panic!("unexpected {other:?}"),
        }
        let cp: super::super::ParametricLaw = serde_json::from_str(
            r#"{"family": "compound_poisson",
                "jumps": {"pieces": [{"kind": "cauchy_density", "loc": 0.0, "scale": 1.0, "mass": 1.0}]}}"#,
        )
        .unwrap();
        match cp {
            super::super::ParametricLaw::CompoundPoisson { jumps } => {
                assert_eq!(jumps.pieces.len(), 1)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
