//! Batch front end: evaluate transforms over grids, run identity suites, and
//! emit machine-readable reports.
//!
//! Three commands, exposed both as library functions and through the
//! `freebridge` binary:
//!
//! * [`cmd_eval`] writes a grid of one transform. Transform tokens:
//!   `char-exponent`, `upsilon`, `voiculescu-laplace`,
//!   `voiculescu-kernel:{u,l,stable,cpoisson}`, `voiculescu-measure`,
//!   `cauchy`, `nevanlinna-kernel`. CSV columns are fixed as
//!   `t,re,im,route,err_est,status`; a failed point is recorded in-row and
//!   the run continues.
//! * [`cmd_check`] runs a named identity suite and reports both sides per
//!   probe. Identity tokens: `eq12`, `eq16`, `eq17-routes`, `eq27`,
//!   `prop1-routes`, `prop2-routes`, `prop3-routes`, `prop4-routes`,
//!   `cor1`, `cor2`, `dilation`, `inversion-roundtrip`. The process exit
//!   status is 0 iff every check passed.
//! * [`cmd_invert`] recovers the shift and total mass behind a restricted
//!   kernel and samples the recovered Laplace transform on a w grid.
//!
//! Inputs come either from `--input` (a JSON file whose expected schema
//! follows the transform: a triplet `{"a", "sigma2", "M"}` or a
//! `{"family": ...}` law for the classical transforms, a `{"b", "rho"}`
//! pair for the kernel commands, a distribution spec for the measure
//! commands, `{"p","c","beta","shift"}` for the stable kernel, a finite
//! measure for the compound-Poisson kernel) or from `--law` with a built-in
//! alias: `wigner`, `free-cauchy`, `free-poisson`, `marchenko-pastur`
//! (classical partners N(0,1), standard Cauchy, Poisson(1,1)).
//!
//! Tolerance resolution order: `--tol` flag, then the config file, then the
//! `FREEBRIDGE_TOL` environment variable, then 1e-6. A JSON config file
//! mirroring the flags can be supplied with `--config`; explicit flags win
//! over it field by field. Grid points are evaluated with bounded
//! parallelism (`--workers`, default all cores); output order and formatting
//! are independent of the worker count.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::{
    classical_stable_log_char, exp_poisson_identity, free_compound_poisson_v,
    free_selfdec_kernel, free_sselfdec_kernel, free_stable_v, laplace_route, pushforward_check,
    selfdec_log_char, sselfdec_log_char, IdClass, IdentityReport, ProbeFn, PushforwardMap,
    StableParams,
};
use crate::error::{Error, Result};
use crate::measures::kernels::FnKernel;
use crate::measures::{
    char_exponent, integrate_finite, total_mass, Atom, FiniteMeasure, FinitePiece, LevyPiece,
    LevyTriplet, ParametricLaw,
};
use crate::nevanlinna::{
    invert_restricted, kernel_eval, restricted_kernel_identity, InversionReport, NevanlinnaPair,
};
use crate::numerics::QuadraturePolicy;
use crate::transforms::{
    cauchy_transform, laplace_bijection, laplace_char_identity, upsilon_char_exponent,
    voiculescu_from_measure, DistPiece, DistributionSpec, TransformRoute,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const DEFAULT_TOL: f64 = 1e-6;
pub const TOL_ENV_VAR: &str = "FREEBRIDGE_TOL";

/// One run's worth of settings; every field optional so a config file can
/// carry any subset and command-line flags override per field.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub input: Option<PathBuf>,
    pub law: Option<String>,
    pub transform: Option<String>,
    pub identity: Option<String>,
    pub t_start: Option<f64>,
    pub t_stop: Option<f64>,
    pub t_count: Option<usize>,
    pub t_spacing: Option<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub workers: Option<usize>,
    /// relative tolerance handed to the quadrature engine (not the
    /// pass/fail tolerance); config-file only
    pub quad_rel_tol: Option<f64>,
}

impl RunConfig {
    /// Field-by-field override: `self` (the flags) wins wherever it is set.
    pub fn merged_over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            command: self.command.or(base.command),
            input: self.input.or(base.input),
            law: self.law.or(base.law),
            transform: self.transform.or(base.transform),
            identity: self.identity.or(base.identity),
            t_start: self.t_start.or(base.t_start),
            t_stop: self.t_stop.or(base.t_stop),
            t_count: self.t_count.or(base.t_count),
            t_spacing: self.t_spacing.or(base.t_spacing),
            tol: self.tol.or(base.tol),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            workers: self.workers.or(base.workers),
            quad_rel_tol: self.quad_rel_tol.or(base.quad_rel_tol),
        }
    }

    fn has_grid_flags(&self) -> bool {
        self.t_start.is_some()
            || self.t_stop.is_some()
            || self.t_count.is_some()
            || self.t_spacing.is_some()
    }
}

pub fn load_config_file(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Tolerance precedence: explicit setting, then the environment variable,
/// then the library default.
pub fn resolve_tol_with(level: Option<f64>, env_value: Option<&str>) -> Result<f64> {
    if let Some(t) = level {
        if !(t > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {t}")));
        }
        return Ok(t);
    }
    if let Some(raw) = env_value {
        let t: f64 = raw
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{TOL_ENV_VAR} = {raw:?} is not a number")))?;
        if !(t > 0.0) {
            return Err(Error::Config(format!(
                "{TOL_ENV_VAR} = {raw:?} must be positive"
            )));
        }
        return Ok(t);
    }
    Ok(DEFAULT_TOL)
}

pub fn resolve_tol(config: &RunConfig) -> Result<f64> {
    let env = std::env::var(TOL_ENV_VAR).ok();
    resolve_tol_with(config.tol, env.as_deref())
}

fn resolve_policy(config: &RunConfig) -> Result<QuadraturePolicy> {
    let mut policy = QuadraturePolicy::default();
    if let Some(q) = config.quad_rel_tol {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Config(format!(
                "quad_rel_tol must lie in (0, 1), got {q}"
            )));
        }
        policy.target_rel_tol = q;
    }
    Ok(policy)
}

/// Engine accuracy for the route-agreement suites: the pass tolerance is
/// 1e-6, so 1e-8 integration is accurate and much cheaper than the library
/// default; an explicit quad_rel_tol still wins.
fn resolve_loose_policy(config: &RunConfig) -> Result<QuadraturePolicy> {
    let mut policy = resolve_policy(config)?;
    if config.quad_rel_tol.is_none() {
        policy.target_rel_tol = 1e-8;
    }
    Ok(policy)
}

fn resolve_workers(config: &RunConfig) -> usize {
    config.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

fn build_pool(config: &RunConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_workers(config))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Evaluation grid from the t flags; `positive` additionally demands every
/// point be strictly positive (all transform grids are).
pub fn build_grid(config: &RunConfig, defaults: (f64, f64, usize), positive: bool) -> Result<Vec<f64>> {
    let start = config.t_start.unwrap_or(defaults.0);
    let stop = config.t_stop.unwrap_or(defaults.1);
    let count = config.t_count.unwrap_or(defaults.2);
    let spacing = config.t_spacing.as_deref().unwrap_or("linear");
    if count < 1 {
        return Err(Error::Config("grid count must be at least 1".into()));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(Error::Config(format!(
            "grid endpoints must be finite, got {start} and {stop}"
        )));
    }
    if count > 1 && !(stop > start) {
        return Err(Error::Config(format!(
            "grid needs stop > start, got {start} and {stop}"
        )));
    }
    let grid: Vec<f64> = match spacing {
        "linear" => (0..count)
            .map(|i| {
                if count == 1 {
                    start
                } else {
                    start + (stop - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
        "log" => {
            if !(start > 0.0) || !(stop > 0.0) {
                return Err(Error::Config(format!(
                    "log spacing needs positive endpoints, got {start} and {stop}"
                )));
            }
            let (la, lb) = (start.ln(), stop.ln());
            (0..count)
                .map(|i| {
                    if count == 1 {
                        start
                    } else {
                        (la + (lb - la) * i as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
        other => {
            return Err(Error::Config(format!(
                "unknown spacing {other:?}; use linear or log"
            )))
        }
    };
    if positive && grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Config(format!(
            "transform grids must be strictly positive; got start {start}"
        )));
    }
    Ok(grid)
}

fn grid_override(config: &RunConfig, positive: bool) -> Result<Option<Vec<f64>>> {
    if config.has_grid_flags() {
        Ok(Some(build_grid(config, (0.5, 5.0, 10), positive)?))
    } else {
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// named laws

/// A built-in law alias carrying whichever faces it has: the classical
/// generating triplet, the free-side spectral measure, the kernel pair, and
/// special-purpose parameter forms.
pub struct NamedLaw {
    pub label: &'static str,
    pub classical: Option<LevyTriplet>,
    pub spectral: Option<DistributionSpec>,
    pub pair: Option<NevanlinnaPair>,
    pub stable: Option<StableParams>,
    pub jump_law: Option<FiniteMeasure>,
}

pub fn named_law(name: &str, policy: &QuadraturePolicy) -> Result<NamedLaw> {
    let key = name.trim().to_ascii_lowercase();
    match key.as_str() {
        "wigner" | "gaussian" => Ok(NamedLaw {
            label: "wigner",
            classical: Some(LevyTriplet::gaussian(0.0, 1.0)),
            spectral: Some(DistributionSpec::piece(DistPiece::Semicircle {
                center: 0.0,
                radius: 2.0,
            })),
            pair: Some(NevanlinnaPair::new(0.0, FiniteMeasure::atom(0.0, 1.0))),
            stable: None,
            jump_law: None,
        }),
        "free-cauchy" | "cauchy" => Ok(NamedLaw {
            label: "free-cauchy",
            classical: Some(ParametricLaw::StandardCauchy.to_triplet(policy)?),
            spectral: Some(DistributionSpec::piece(DistPiece::CauchyDensity {
                loc: 0.0,
                scale: 1.0,
            })),
            pair: Some(NevanlinnaPair::new(
                0.0,
                FiniteMeasure::from_pieces(vec![FinitePiece::CauchyDensity {
                    loc: 0.0,
                    scale: 1.0,
                    mass: 1.0,
                }]),
            )),
            stable: None,
            jump_law: None,
        }),
        "free-poisson" | "marchenko-pastur" | "poisson" => Ok(NamedLaw {
            label: "free-poisson",
            classical: Some(
                ParametricLaw::Poisson {
                    rate: 1.0,
                    jump: 1.0,
                }
                .to_triplet(policy)?,
            ),
            spectral: Some(DistributionSpec::piece(DistPiece::MarchenkoPastur)),
            pair: Some(NevanlinnaPair::new(0.5, FiniteMeasure::atom(1.0, 0.5))),
            stable: None,
            jump_law: Some(FiniteMeasure::atom(1.0, 1.0)),
        }),
        "unit-atom" | "atom" => Ok(NamedLaw {
            label: "unit-atom",
            classical: Some(LevyTriplet {
                shift: 0.0,
                gauss_var: 0.0,
                jumps: vec![LevyPiece::Finite(FiniteMeasure::atom(1.0, 1.0))],
            }),
            spectral: None,
            pair: None,
            stable: None,
            jump_law: Some(FiniteMeasure::atom(1.0, 1.0)),
        }),
        "stable" => {
            let params = StableParams::new(0.5, 1.0, 1.0, 0.0)?;
            Ok(NamedLaw {
                label: "stable",
                classical: Some(
                    ParametricLaw::Stable {
                        p: params.p,
                        c: params.c,
                        beta: params.beta,
                        shift: params.shift,
                    }
                    .to_triplet(policy)?,
                ),
                spectral: None,
                pair: None,
                stable: Some(params),
                jump_law: None,
            })
        }
        other => Err(Error::Config(format!(
            "unknown law {other:?}; built-ins: wigner, free-cauchy, free-poisson, \
             marchenko-pastur, unit-atom, stable"
        ))),
    }
}

// ---------------------------------------------------------------------------
// eval

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    CharExponent,
    Upsilon,
    VoicLaplace,
    VoicKernelU,
    VoicKernelL,
    VoicKernelStable,
    VoicKernelCPoisson,
    VoicMeasure,
    Cauchy,
    NevKernel,
}

pub fn parse_transform(token: &str) -> Result<TargetKind> {
    match token.trim() {
        "char-exponent" => Ok(TargetKind::CharExponent),
        "upsilon" => Ok(TargetKind::Upsilon),
        "voiculescu-laplace" => Ok(TargetKind::VoicLaplace),
        "voiculescu-kernel:u" => Ok(TargetKind::VoicKernelU),
        "voiculescu-kernel:l" => Ok(TargetKind::VoicKernelL),
        "voiculescu-kernel:stable" => Ok(TargetKind::VoicKernelStable),
        "voiculescu-kernel:cpoisson" => Ok(TargetKind::VoicKernelCPoisson),
        "voiculescu-measure" => Ok(TargetKind::VoicMeasure),
        "cauchy" => Ok(TargetKind::Cauchy),
        "nevanlinna-kernel" => Ok(TargetKind::NevKernel),
        other => Err(Error::Config(format!(
            "unknown transform {other:?}; tokens: char-exponent, upsilon, \
             voiculescu-laplace, voiculescu-kernel:{{u,l,stable,cpoisson}}, \
             voiculescu-measure, cauchy, nevanlinna-kernel"
        ))),
    }
}

impl TargetKind {
    pub fn route(self) -> TransformRoute {
        match self {
            TargetKind::VoicLaplace => TransformRoute::Laplace,
            TargetKind::VoicMeasure => TransformRoute::CauchyInversion,
            _ => TransformRoute::Kernel,
        }
    }
}

enum LoadedInput {
    Triplet(LevyTriplet),
    Stable(StableParams),
    Finite(FiniteMeasure),
    Dist(DistributionSpec),
    Pair(NevanlinnaPair),
}

impl LoadedInput {
    fn label(&self) -> String {
        match self {
            LoadedInput::Triplet(_) => "triplet".into(),
            LoadedInput::Stable(p) => format!("stable(p={}, beta={})", p.p, p.beta),
            LoadedInput::Finite(_) => "finite measure".into(),
            LoadedInput::Dist(_) => "distribution".into(),
            LoadedInput::Pair(p) => format!("pair(b={})", p.b),
        }
    }
}

fn parse_file<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Config(format!("{} ({what}): {e}", path.display()))
    })
}

/// A triplet file is either the flat `{"a", "sigma2", "M"}` form or a
/// `{"family": ...}` parametric law.
fn parse_triplet_file(path: &Path, policy: &QuadraturePolicy) -> Result<LevyTriplet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if value.get("family").is_some() {
        let law: ParametricLaw = serde_json::from_value(value)
            .map_err(|e| Error::Config(format!("{} (law): {e}", path.display())))?;
        law.to_triplet(policy)
    } else {
        serde_json::from_value(value)
            .map_err(|e| Error::Config(format!("{} (triplet): {e}", path.display())))
    }
}

fn need_source(kind: &str) -> Error {
    Error::Config(format!("this transform needs --input or --law ({kind})"))
}

fn load_input(kind: TargetKind, config: &RunConfig, policy: &QuadraturePolicy) -> Result<LoadedInput> {
    let from_law = |want: &str| -> Result<NamedLaw> {
        match &config.law {
            Some(name) => named_law(name, policy),
            None => Err(need_source(want)),
        }
    };
    match kind {
        TargetKind::CharExponent
        | TargetKind::Upsilon
        | TargetKind::VoicLaplace
        | TargetKind::VoicKernelU
        | TargetKind::VoicKernelL => {
            if let Some(path) = &config.input {
                return Ok(LoadedInput::Triplet(parse_triplet_file(path, policy)?));
            }
            let law = from_law("a triplet")?;
            law.classical
                .map(LoadedInput::Triplet)
                .ok_or_else(|| Error::Config(format!("law {} has no classical triplet", law.label)))
        }
        TargetKind::VoicKernelStable => {
            if let Some(path) = &config.input {
                let params: StableParams = parse_file(path, "stable parameters")?;
                params.validate()?;
                return Ok(LoadedInput::Stable(params));
            }
            let law = from_law("stable parameters")?;
            law.stable
                .map(LoadedInput::Stable)
                .ok_or_else(|| Error::Config(format!("law {} has no stable parameters", law.label)))
        }
        TargetKind::VoicKernelCPoisson => {
            if let Some(path) = &config.input {
                return Ok(LoadedInput::Finite(parse_file(path, "finite measure")?));
            }
            let law = from_law("a jump law")?;
            law.jump_law
                .map(LoadedInput::Finite)
                .ok_or_else(|| Error::Config(format!("law {} has no jump law", law.label)))
        }
        TargetKind::VoicMeasure | TargetKind::Cauchy => {
            if let Some(path) = &config.input {
                let nu: DistributionSpec = parse_file(path, "distribution")?;
                nu.validate()?;
                return Ok(LoadedInput::Dist(nu));
            }
            let law = from_law("a distribution")?;
            law.spectral
                .map(LoadedInput::Dist)
                .ok_or_else(|| Error::Config(format!("law {} has no spectral form", law.label)))
        }
        TargetKind::NevKernel => {
            if let Some(path) = &config.input {
                let pair: NevanlinnaPair = parse_file(path, "pair")?;
                pair.validate()?;
                return Ok(LoadedInput::Pair(pair));
            }
            let law = from_law("a pair")?;
            law.pair
                .map(LoadedInput::Pair)
                .ok_or_else(|| Error::Config(format!("law {} has no pair form", law.label)))
        }
    }
}

fn eval_point(
    kind: TargetKind,
    input: &LoadedInput,
    t: f64,
    policy: &QuadraturePolicy,
) -> Result<(Complex64, f64)> {
    match (kind, input) {
        (TargetKind::CharExponent, LoadedInput::Triplet(mu)) => {
            char_exponent(mu, t, policy).map(|q| (q.value, q.err_est))
        }
        (TargetKind::Upsilon, LoadedInput::Triplet(mu)) => {
            upsilon_char_exponent(mu, t, policy).map(|q| (q.value, q.err_est))
        }
        (TargetKind::VoicLaplace, LoadedInput::Triplet(mu)) => {
            laplace_bijection(mu, t, policy).map(|q| (q.value, q.err_est))
        }
        (TargetKind::VoicKernelU, LoadedInput::Triplet(mu)) => {
            free_sselfdec_kernel(mu, t, policy).map(|q| (q.value, q.err_est))
        }
        (TargetKind::VoicKernelL, LoadedInput::Triplet(mu)) => {
            free_selfdec_kernel(mu, t, policy).map(|q| (q.value, q.err_est))
        }
        (TargetKind::VoicKernelStable, LoadedInput::Stable(params)) => {
            free_stable_v(params, t).map(|v| (v, 0.0))
        }
        (TargetKind::VoicKernelCPoisson, LoadedInput::Finite(m)) => {
            free_compound_poisson_v(m, t, policy).map(|q| (q.value, q.err_est))
        }
        (TargetKind::VoicMeasure, LoadedInput::Dist(nu)) => {
            voiculescu_from_measure(nu, t, policy).map(|v| (v, 0.0))
        }
        (TargetKind::Cauchy, LoadedInput::Dist(nu)) => {
            cauchy_transform(nu, c(0.0, t), policy).map(|v| (v, 0.0))
        }
        (TargetKind::NevKernel, LoadedInput::Pair(pair)) => {
            kernel_eval(pair, t, policy).map(|q| (q.value, q.err_est))
        }
        _ => Err(Error::Config("input does not match the transform".into())),
    }
}

fn sanitize_status(text: &str) -> String {
    text.replace(['\n', '\r'], " ").replace(',', ";")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRow {
    pub t: f64,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub err_est: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub transform: String,
    pub route: String,
    pub source: String,
    pub tolerance: f64,
    pub rows: Vec<EvalRow>,
}

pub fn cmd_eval(config: &RunConfig) -> Result<EvalReport> {
    let transform = config
        .transform
        .as_deref()
        .ok_or_else(|| Error::Config("eval needs --transform".into()))?;
    let kind = parse_transform(transform)?;
    let policy = resolve_policy(config)?;
    let tol = resolve_tol(config)?;
    let input = load_input(kind, config, &policy)?;
    let grid = build_grid(config, (0.5, 5.0, 10), true)?;
    let pool = build_pool(config)?;
    let rows: Vec<EvalRow> = pool.install(|| {
        grid.par_iter()
            .map(|&t| match eval_point(kind, &input, t, &policy) {
                Ok((v, err)) => EvalRow {
                    t,
                    re: Some(v.re),
                    im: Some(v.im),
                    err_est: Some(err),
                    status: "ok".into(),
                },
                Err(e) => EvalRow {
                    t,
                    re: None,
                    im: None,
                    err_est: None,
                    status: sanitize_status(&e.to_string()),
                },
            })
            .collect()
    });
    let source = match (&config.input, &config.law) {
        (Some(path), _) => path.display().to_string(),
        (None, Some(law)) => format!("law:{law}"),
        _ => input.label(),
    };
    Ok(EvalReport {
        transform: transform.to_string(),
        route: kind.route().as_str().to_string(),
        source,
        tolerance: tol,
        rows,
    })
}

fn fmt_float(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => "nan".into(),
    }
}

pub fn eval_to_csv(report: &EvalReport) -> String {
    let mut out = String::from("t,re,im,route,err_est,status\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_float(Some(row.t)),
            fmt_float(row.re),
            fmt_float(row.im),
            report.route,
            fmt_float(row.err_est),
            row.status
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// check

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub identity: String,
    pub tolerance: f64,
    pub total: usize,
    pub passed: usize,
    pub all_pass: bool,
    pub reports: Vec<IdentityReport>,
}

pub const IDENTITY_TOKENS: [&str; 12] = [
    "eq12",
    "eq16",
    "eq17-routes",
    "eq27",
    "prop1-routes",
    "prop2-routes",
    "prop3-routes",
    "prop4-routes",
    "cor1",
    "cor2",
    "dilation",
    "inversion-roundtrip",
];

/// Evaluation-error marker: both sides zeroed, the error text appended to
/// `inputs`, and the error fields set to -1 so reports stay plain JSON
/// numbers.
fn error_report(identity: &str, inputs: String, t: f64, e: &Error) -> IdentityReport {
    IdentityReport {
        identity: identity.into(),
        inputs: format!("{inputs}; error: {e}"),
        t,
        lhs: [0.0; 2],
        rhs: [0.0; 2],
        abs_err: -1.0,
        rel_err: -1.0,
        pass: false,
    }
}

/// Canonical corpus label for a `--law` filter value.
fn law_filter(config: &RunConfig) -> Result<Option<&'static str>> {
    let name = match &config.law {
        Some(n) => n.trim().to_ascii_lowercase(),
        None => return Ok(None),
    };
    let canon = match name.as_str() {
        "wigner" | "gaussian" => "gaussian",
        "free-cauchy" | "cauchy" => "cauchy",
        "free-poisson" | "marchenko-pastur" | "poisson" => "poisson",
        "unit-atom" | "atom" => "unit atom",
        "stable" => "stable",
        other => {
            return Err(Error::Config(format!(
                "unknown law filter {other:?} for check"
            )))
        }
    };
    Ok(Some(canon))
}

fn filter_corpus<T>(corpus: Vec<(&'static str, T)>, filter: Option<&str>, identity: &str) -> Result<Vec<(&'static str, T)>> {
    let Some(want) = filter else {
        return Ok(corpus);
    };
    let kept: Vec<(&'static str, T)> = corpus
        .into_iter()
        .filter(|(label, _)| *label == want)
        .collect();
    if kept.is_empty() {
        return Err(Error::Config(format!(
            "law {want:?} is not part of the {identity} corpus"
        )));
    }
    Ok(kept)
}

fn classical_corpus(policy: &QuadraturePolicy) -> Result<Vec<(&'static str, LevyTriplet)>> {
    Ok(vec![
        ("gaussian", LevyTriplet::gaussian(0.0, 1.0)),
        ("unit atom", LevyTriplet {
            shift: 0.0,
            gauss_var: 0.0,
            jumps: vec![LevyPiece::Finite(FiniteMeasure::atom(1.0, 1.0))],
        }),
        ("stable", ParametricLaw::Stable {
            p: 0.5,
            c: 1.0,
            beta: 1.0,
            shift: 0.0,
        }
        .to_triplet(policy)?),
    ])
}

fn report_cells<T, F>(pool: &rayon::ThreadPool, cells: Vec<T>, f: F) -> Vec<IdentityReport>
where
    T: Send + Sync,
    F: Fn(&T) -> IdentityReport + Send + Sync,
{
    pool.install(|| cells.par_iter().map(&f).collect())
}

fn run_eq12(
    grid: &[f64],
    tol: f64,
    policy: &QuadraturePolicy,
    filter: Option<&str>,
) -> Result<Vec<IdentityReport>> {
    let corpus = filter_corpus(
        vec![
            (
                "gaussian",
                DistributionSpec::piece(DistPiece::Semicircle {
                    center: 0.0,
                    radius: 2.0,
                }),
            ),
            (
                "cauchy",
                DistributionSpec::piece(DistPiece::CauchyDensity {
                    loc: 0.0,
                    scale: 1.0,
                }),
            ),
            ("unit atom", DistributionSpec::atom(1.0, 1.0)),
        ],
        filter,
        "eq12",
    )?;
    let mut reports = Vec::new();
    for (label, nu) in &corpus {
        for &t in grid {
            reports.push(match laplace_char_identity(nu, t, policy) {
                Ok((lhs, rhs)) => {
                    IdentityReport::from_sides("eq12", label.to_string(), t, lhs, rhs, tol)
                }
                Err(e) => error_report("eq12", label.to_string(), t, &e),
            });
        }
    }
    Ok(reports)
}

fn run_eq16(grid: &[f64], tol: f64, policy: &QuadraturePolicy) -> Result<Vec<IdentityReport>> {
    let pairs: Vec<(&'static str, NevanlinnaPair)> = vec![
        ("wigner pair", NevanlinnaPair::new(0.0, FiniteMeasure::atom(0.0, 1.0))),
        ("free-poisson pair", NevanlinnaPair::new(0.5, FiniteMeasure::atom(1.0, 0.5))),
        (
            "free-cauchy pair",
            NevanlinnaPair::new(
                0.0,
                FiniteMeasure::from_pieces(vec![FinitePiece::CauchyDensity {
                    loc: 0.0,
                    scale: 1.0,
                    mass: 1.0,
                }]),
            ),
        ),
        (
            "atom pair",
            NevanlinnaPair::new(
                -0.3,
                FiniteMeasure {
                    atoms: vec![Atom { at: -2.0, mass: 0.4 }, Atom { at: 0.7, mass: 0.3 }],
                    pieces: vec![],
                },
            ),
        ),
    ];
    let mut reports = Vec::new();
    for (label, pair) in &pairs {
        for &t in grid {
            let t = -t.abs();
            reports.push(match restricted_kernel_identity(pair, t, policy) {
                Ok((lhs, rhs)) => {
                    IdentityReport::from_sides("eq16", label.to_string(), t, lhs, rhs, tol)
                }
                Err(e) => error_report("eq16", label.to_string(), t, &e),
            });
        }
    }
    Ok(reports)
}

fn run_eq17(
    grid: &[f64],
    tol: f64,
    policy: &QuadraturePolicy,
    pool: &rayon::ThreadPool,
    filter: Option<&str>,
) -> Result<Vec<IdentityReport>> {
    let matched: Vec<(&'static str, LevyTriplet, DistributionSpec)> = vec![
        (
            "gaussian",
            LevyTriplet::gaussian(0.0, 1.0),
            DistributionSpec::piece(DistPiece::Semicircle {
                center: 0.0,
                radius: 2.0,
            }),
        ),
        (
            "cauchy",
            ParametricLaw::StandardCauchy.to_triplet(policy)?,
            DistributionSpec::piece(DistPiece::CauchyDensity {
                loc: 0.0,
                scale: 1.0,
            }),
        ),
        (
            "poisson",
            ParametricLaw::Poisson {
                rate: 1.0,
                jump: 1.0,
            }
            .to_triplet(policy)?,
            DistributionSpec::piece(DistPiece::MarchenkoPastur),
        ),
    ];
    let corpus = filter_corpus(
        matched.into_iter().map(|(l, mu, nu)| (l, (mu, nu))).collect(),
        filter,
        "eq17-routes",
    )?;
    let mut cells = Vec::new();
    for (label, (mu, nu)) in corpus {
        for &t in grid {
            cells.push((label, mu.clone(), nu.clone(), t));
        }
    }
    Ok(report_cells(pool, cells, |(label, mu, nu, t)| {
        let lhs = match laplace_bijection(mu, *t, policy) {
            Ok(q) => q.value,
            Err(e) => return error_report("eq17-routes", label.to_string(), *t, &e),
        };
        match voiculescu_from_measure(nu, *t, policy) {
            Ok(rhs) => IdentityReport::from_sides("eq17-routes", label.to_string(), *t, lhs, rhs, tol),
            Err(e) => error_report("eq17-routes", label.to_string(), *t, &e),
        }
    }))
}

fn run_eq27(grid: &[f64], tol: f64, policy: &QuadraturePolicy) -> Result<Vec<IdentityReport>> {
    let mut reports = Vec::new();
    for &t in grid {
        for sign in [1.0, -1.0] {
            let t = sign * t;
            reports.push(match exp_poisson_identity(t, policy) {
                Ok((lhs, rhs)) => {
                    IdentityReport::from_sides("eq27", "poisson(1,1)".to_string(), t, lhs, rhs, tol)
                }
                Err(e) => error_report("eq27", "poisson(1,1)".to_string(), t, &e),
            });
        }
    }
    Ok(reports)
}

fn run_class_routes(
    which: IdClass,
    identity: &'static str,
    grid: &[f64],
    tol: f64,
    policy: &QuadraturePolicy,
    pool: &rayon::ThreadPool,
    filter: Option<&str>,
) -> Result<Vec<IdentityReport>> {
    let corpus = filter_corpus(classical_corpus(policy)?, filter, identity)?;
    let mut cells = Vec::new();
    for (label, mu) in corpus {
        for &t in grid {
            cells.push((label, mu.clone(), t));
        }
    }
    Ok(report_cells(pool, cells, |(label, mu, t)| {
        let direct = match which {
            IdClass::SSelfdec => free_sselfdec_kernel(mu, *t, policy),
            IdClass::Selfdec => free_selfdec_kernel(mu, *t, policy),
        };
        let direct = match direct {
            Ok(q) => q.value,
            Err(e) => return error_report(identity, label.to_string(), *t, &e),
        };
        let bridged = laplace_route(
            |w| match which {
                IdClass::SSelfdec => sselfdec_log_char(mu, w, policy).map(|q| q.value),
                IdClass::Selfdec => selfdec_log_char(mu, w, policy).map(|q| q.value),
            },
            *t,
            policy,
        );
        match bridged {
            Ok(q) => IdentityReport::from_sides(identity, label.to_string(), *t, direct, q.value, tol),
            Err(e) => error_report(identity, label.to_string(), *t, &e),
        }
    }))
}

fn run_prop3(
    grid: &[f64],
    tol: f64,
    policy: &QuadraturePolicy,
    pool: &rayon::ThreadPool,
) -> Result<Vec<IdentityReport>> {
    let mut params = Vec::new();
    for p in [0.5, 1.5] {
        for beta in [-1.0, 0.0, 0.7] {
            params.push(StableParams::new(p, 1.0, beta, 0.0)?);
        }
    }
    for beta in [0.0, 0.5] {
        params.push(StableParams::new(1.0, 1.0, beta, 0.0)?);
    }
    let mut cells = Vec::new();
    for ps in params {
        for &t in grid {
            cells.push((ps, t));
        }
    }
    Ok(report_cells(pool, cells, |(ps, t)| {
        let label = format!("stable(p={}, beta={})", ps.p, ps.beta);
        let direct = match free_stable_v(ps, *t) {
            Ok(v) => v,
            Err(e) => return error_report("prop3-routes", label, *t, &e),
        };
        match laplace_route(|v| classical_stable_log_char(ps, v), *t, policy) {
            Ok(q) => IdentityReport::from_sides("prop3-routes", label, *t, direct, q.value, tol),
            Err(e) => error_report("prop3-routes", label, *t, &e),
        }
    }))
}

fn run_prop4(
    grid: &[f64],
    tol: f64,
    policy: &QuadraturePolicy,
    pool: &rayon::ThreadPool,
) -> Result<Vec<IdentityReport>> {
    let jump_laws: Vec<(&'static str, FiniteMeasure)> = vec![
        ("delta(1)", FiniteMeasure::atom(1.0, 1.0)),
        (
            "delta(1) + delta(-1)",
            FiniteMeasure {
                atoms: vec![Atom { at: 1.0, mass: 1.0 }, Atom { at: -1.0, mass: 1.0 }],
                pieces: vec![],
            },
        ),
        (
            "uniform[0,1]",
            FiniteMeasure::from_pieces(vec![FinitePiece::Uniform {
                lo: 0.0,
                hi: 1.0,
                mass: 1.0,
            }]),
        ),
    ];
    let mut cells = Vec::new();
    for (label, m) in jump_laws {
        let ball_mean = integrate_finite(
            &FnKernel::bounded("truncated mean", |x| {
                Ok(c(if x.abs() <= 1.0 { x } else { 0.0 }, 0.0))
            }),
            &m,
            policy,
        )?
        .value
        .re;
        let mu = LevyTriplet {
            shift: ball_mean,
            gauss_var: 0.0,
            jumps: vec![LevyPiece::Finite(m.clone())],
        };
        for &t in grid {
            cells.push((label, m.clone(), mu.clone(), t));
        }
    }
    Ok(report_cells(pool, cells, |(label, m, mu, t)| {
        let direct = match free_compound_poisson_v(m, *t, policy) {
            Ok(q) => q.value,
            Err(e) => return error_report("prop4-routes", label.to_string(), *t, &e),
        };
        match laplace_bijection(mu, *t, policy) {
            Ok(q) => {
                IdentityReport::from_sides("prop4-routes", label.to_string(), *t, direct, q.value, tol)
            }
            Err(e) => error_report("prop4-routes", label.to_string(), *t, &e),
        }
    }))
}

fn run_pushforward(
    map: PushforwardMap,
    identity: &'static str,
    tol: f64,
    policy: &QuadraturePolicy,
) -> Vec<IdentityReport> {
    let probes = [ProbeFn::One, ProbeFn::Linear, ProbeFn::ExpNeg, ProbeFn::Sine];
    probes
        .iter()
        .map(|f| {
            let label = format!("f = {}", f.label());
            match pushforward_check(map, *f, policy) {
                Ok((lhs, rhs)) => IdentityReport::from_sides(
                    identity,
                    label,
                    0.0,
                    c(lhs, 0.0),
                    c(rhs, 0.0),
                    tol,
                ),
                Err(Error::Divergent(_)) => IdentityReport {
                    identity: identity.into(),
                    inputs: format!("{label}: rejected (divergent)"),
                    t: 0.0,
                    lhs: [0.0; 2],
                    rhs: [0.0; 2],
                    abs_err: 0.0,
                    rel_err: 0.0,
                    pass: true,
                },
                Err(e) => error_report(identity, label, 0.0, &e),
            }
        })
        .collect()
}

fn run_dilation(grid: &[f64], tol: f64, policy: &QuadraturePolicy) -> Vec<IdentityReport> {
    let mut reports = Vec::new();
    for &t in grid {
        let base = match voiculescu_from_measure(
            &DistributionSpec::piece(DistPiece::Semicircle {
                center: 0.0,
                radius: 2.0,
            }),
            t,
            policy,
        ) {
            Ok(v) => v,
            Err(e) => {
                reports.push(error_report("dilation", "semicircle".into(), t, &e));
                continue;
            }
        };
        for scale in [0.5, 2.0] {
            let label = format!("semicircle, scale = {scale}");
            let scaled = voiculescu_from_measure(
                &DistributionSpec::piece(DistPiece::Semicircle {
                    center: 0.0,
                    radius: 2.0 * scale,
                }),
                scale * t,
                policy,
            );
            reports.push(match scaled {
                Ok(v) => IdentityReport::from_sides("dilation", label, t, v, scale * base, tol),
                Err(e) => error_report("dilation", label, t, &e),
            });
        }
    }
    reports
}

fn run_inversion_roundtrip(
    tol: f64,
    policy: &QuadraturePolicy,
) -> Result<Vec<IdentityReport>> {
    let pairs: Vec<(&'static str, NevanlinnaPair)> = vec![
        ("wigner pair", NevanlinnaPair::new(0.0, FiniteMeasure::atom(0.0, 1.0))),
        ("atom pair", NevanlinnaPair::new(0.4, FiniteMeasure::atom(1.3, 0.7))),
        (
            "free-cauchy pair",
            NevanlinnaPair::new(
                0.0,
                FiniteMeasure::from_pieces(vec![FinitePiece::CauchyDensity {
                    loc: 0.0,
                    scale: 1.0,
                    mass: 1.0,
                }]),
            ),
        ),
    ];
    let probes = [0.5, 1.0, 2.0, 3.0];
    let mut reports = Vec::new();
    for (label, pair) in &pairs {
        let inv = invert_restricted(
            |t| kernel_eval(pair, t, policy).map(|q| q.value),
            &probes,
        )?;
        let mass = total_mass(&pair.rho, policy)?;
        reports.push(IdentityReport::from_sides(
            "inversion-roundtrip",
            format!("{label}: b + i mass"),
            1.0,
            c(inv.b(), inv.total_mass()),
            c(pair.b, mass),
            tol,
        ));
        for w in [0.5, 2.0, 3.0] {
            let recovered = match inv.laplace_phi_rho(w) {
                Ok(v) => v,
                Err(e) => {
                    reports.push(error_report(
                        "inversion-roundtrip",
                        format!("{label}: laplace at w = {w}"),
                        w,
                        &e,
                    ));
                    continue;
                }
            };
            let direct = integrate_finite(
                &FnKernel::bounded("laplace of the char fn", move |x| {
                    Ok(1.0 / c(w, -x))
                }),
                &pair.rho,
                policy,
            )?
            .value;
            reports.push(IdentityReport::from_sides(
                "inversion-roundtrip",
                format!("{label}: laplace at w = {w}"),
                w,
                recovered,
                direct,
                tol,
            ));
        }
    }
    Ok(reports)
}

pub fn cmd_check(config: &RunConfig) -> Result<CheckReport> {
    let identity = config
        .identity
        .as_deref()
        .ok_or_else(|| Error::Config("check needs --identity".into()))?
        .trim()
        .to_string();
    let tol = resolve_tol(config)?;
    let policy = resolve_policy(config)?;
    let loose = resolve_loose_policy(config)?;
    let pool = build_pool(config)?;
    let filter = law_filter(config)?;
    let user_grid = grid_override(config, true)?;
    let grid = user_grid.unwrap_or_else(|| vec![0.5, 1.0, 2.0, 5.0]);

    let reports = match identity.as_str() {
        "eq12" => run_eq12(&grid, tol, &policy, filter)?,
        "eq16" => run_eq16(&grid, tol, &policy)?,
        "eq17-routes" => run_eq17(&grid, tol, &policy, &pool, filter)?,
        "eq27" => run_eq27(&grid, tol, &policy)?,
        "prop1-routes" => run_class_routes(
            IdClass::SSelfdec,
            "prop1-routes",
            &grid,
            tol,
            &loose,
            &pool,
            filter,
        )?,
        "prop2-routes" => run_class_routes(
            IdClass::Selfdec,
            "prop2-routes",
            &grid,
            tol,
            &loose,
            &pool,
            filter,
        )?,
        "prop3-routes" => run_prop3(&grid, tol, &policy, &pool)?,
        "prop4-routes" => run_prop4(&grid, tol, &policy, &pool)?,
        "cor1" => run_pushforward(PushforwardMap::Gamma0, "cor1", tol, &policy),
        "cor2" => run_pushforward(PushforwardMap::ExpOverX, "cor2", tol, &policy),
        "dilation" => run_dilation(&grid, tol, &policy),
        "inversion-roundtrip" => run_inversion_roundtrip(tol, &policy)?,
        other => {
            return Err(Error::Config(format!(
                "unknown identity {other:?}; tokens: {}",
                IDENTITY_TOKENS.join(", ")
            )))
        }
    };
    let passed = reports.iter().filter(|r| r.pass).count();
    Ok(CheckReport {
        identity,
        tolerance: tol,
        total: reports.len(),
        passed,
        all_pass: passed == reports.len(),
        reports,
    })
}

pub fn check_to_csv(report: &CheckReport) -> String {
    let mut out = String::from("identity,inputs,t,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,pass\n");
    for r in &report.reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.identity,
            sanitize_status(&r.inputs),
            fmt_float(Some(r.t)),
            fmt_float(Some(r.lhs[0])),
            fmt_float(Some(r.lhs[1])),
            fmt_float(Some(r.rhs[0])),
            fmt_float(Some(r.rhs[1])),
            fmt_float(Some(r.abs_err)),
            fmt_float(Some(r.rel_err)),
            r.pass
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// invert

pub fn cmd_invert(config: &RunConfig) -> Result<InversionReport> {
    let policy = resolve_policy(config)?;
    let pair = if let Some(path) = &config.input {
        let pair: NevanlinnaPair = parse_file(path, "pair")?;
        pair.validate()?;
        pair
    } else if let Some(name) = &config.law {
        named_law(name, &policy)?
            .pair
            .ok_or_else(|| Error::Config(format!("law {name:?} has no pair form to invert")))?
    } else {
        return Err(Error::Config("invert needs --input or --law".into()));
    };
    let grid = build_grid(config, (0.5, 3.0, 6), true)?;
    let mut probes = grid.clone();
    if !probes.iter().any(|&w| (w - 1.0).abs() <= 1e-12) {
        probes.push(1.0);
    }
    let inv = invert_restricted(
        |t| kernel_eval(&pair, t, &policy).map(|q| q.value),
        &probes,
    )?;
    inv.report(&grid)
}

pub fn invert_to_csv(report: &InversionReport) -> String {
    let mut out = String::from("t,re,im,route,err_est,status\n");
    for s in &report.samples {
        out.push_str(&format!(
            "{},{},{},cauchy_inversion,{},ok\n",
            fmt_float(Some(s.w)),
            fmt_float(Some(s.value[0])),
            fmt_float(Some(s.value[1])),
            fmt_float(Some(0.0)),
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// binary entry

#[derive(Parser)]
#[command(
    name = "freebridge",
    version,
    about = "Evaluate classical/free transforms over grids, check identities, invert kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one transform over a t grid
    Eval(CommonArgs),
    /// Run a named identity suite and report both sides
    Check(CommonArgs),
    /// Recover shift, mass, and Laplace samples from a restricted kernel
    Invert(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON input file; schema follows the transform
    #[arg(long)]
    input: Option<PathBuf>,
    /// built-in law alias (wigner, free-cauchy, free-poisson, marchenko-pastur)
    #[arg(long)]
    law: Option<String>,
    /// transform token for eval
    #[arg(long)]
    transform: Option<String>,
    /// identity token for check
    #[arg(long)]
    identity: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    t_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_stop: Option<f64>,
    #[arg(long)]
    t_count: Option<usize>,
    /// linear or log
    #[arg(long)]
    t_spacing: Option<String>,
    /// pass/fail tolerance (default: FREEBRIDGE_TOL or 1e-6)
    #[arg(long)]
    tol: Option<f64>,
    /// output path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// JSON config file mirroring the flags; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn into_config(self, command: &str) -> Result<RunConfig> {
        let flags = RunConfig {
            command: Some(command.to_string()),
            input: self.input,
            law: self.law,
            transform: self.transform,
            identity: self.identity,
            t_start: self.t_start,
            t_stop: self.t_stop,
            t_count: self.t_count,
            t_spacing: self.t_spacing,
            tol: self.tol,
            out: self.out,
            format: self.format,
            workers: self.workers,
            quad_rel_tol: None,
        };
        match self.config {
            Some(path) => Ok(flags.merged_over(load_config_file(&path)?)),
            None => Ok(flags),
        }
    }
}

fn pick_format(config: &RunConfig, default: &str) -> Result<String> {
    let f = config.format.as_deref().unwrap_or(default).to_ascii_lowercase();
    match f.as_str() {
        "csv" | "json" => Ok(f),
        other => Err(Error::Config(format!("unknown format {other:?}; use csv or json"))),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Config(format!("serialization: {e}")))
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Eval(args) => {
            let config = args.into_config("eval")?;
            let report = cmd_eval(&config)?;
            let format = pick_format(&config, "csv")?;
            let text = if format == "csv" {
                eval_to_csv(&report)
            } else {
                to_json(&report)?
            };
            emit(&text, config.out.as_ref())?;
            let failed = report.rows.iter().filter(|r| r.status != "ok").count();
            eprintln!(
                "eval {}: {} points, {} failed",
                report.transform,
                report.rows.len(),
                failed
            );
            Ok(0)
        }
        Command::Check(args) => {
            let config = args.into_config("check")?;
            let report = cmd_check(&config)?;
            let format = pick_format(&config, "json")?;
            let text = if format == "csv" {
                check_to_csv(&report)
            } else {
                to_json(&report)?
            };
            emit(&text, config.out.as_ref())?;
            eprintln!(
                "check {}: {}/{} passed at tol {:e}",
                report.identity, report.passed, report.total, report.tolerance
            );
            Ok(if report.all_pass { 0 } else { 1 })
        }
        Command::Invert(args) => {
            let config = args.into_config("invert")?;
            let report = cmd_invert(&config)?;
            let format = pick_format(&config, "json")?;
            let text = if format == "csv" {
                invert_to_csv(&report)
            } else {
                to_json(&report)?
            };
            emit(&text, config.out.as_ref())?;
            eprintln!(
                "invert: b = {:.12}, mass = {:.12}, {} samples",
                report.b,
                report.mass,
                report.samples.len()
            );
            Ok(0)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::InvalidParameter(_) => 2,
        _ => 1,
    }
}

/// Parse the process arguments, run the selected command, and return the
/// process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
