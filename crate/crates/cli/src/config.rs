//! JSON run configuration.
//!
//! Every field is checked before any work starts; all violations are
//! reported together.

use std::fmt;
use std::path::PathBuf;

use andloc::linalg::{Matrix, SymmetricMatrix};
use andloc::model::{DisorderSpec, EnergyInterval, ModelParams, DEFAULT_RHO};
use andloc::spectrum::Boundary;
use serde::Deserialize;

/// Collected configuration violations.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for v in &self.0 {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "V")]
    v: Option<Vec<Vec<f64>>>,
    c: Option<Vec<f64>>,
    ell: Option<f64>,
    rho: Option<f64>,
    disorder: Option<RawDisorder>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    certify: Option<RawCertify>,
    critical: Option<RawCritical>,
    lyapunov: Option<RawLyapunov>,
    ids: Option<RawIds>,
    localize: Option<RawLocalize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDisorder {
    atoms: Vec<(f64, f64)>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    lo: f64,
    hi: f64,
    points: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCertify {
    grid: Option<RawGrid>,
    tol: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCritical {
    range: Option<RawGrid>,
    step: Option<f64>,
    tol: Option<f64>,
    refine_iters: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawLyapunov {
    grid: Option<RawGrid>,
    n_steps: Option<usize>,
    n_replicas: Option<usize>,
    burn_in: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawIds {
    grid: Option<RawGrid>,
    #[serde(rename = "L")]
    l: Option<usize>,
    h: Option<f64>,
    n_samples: Option<usize>,
    boundary: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawLocalize {
    window: Option<RawGrid>,
    #[serde(rename = "L")]
    l: Option<usize>,
    h: Option<f64>,
    n_samples: Option<usize>,
    boundary: Option<String>,
}

/// Energy grid: `points` equispaced values on `[lo, hi]` (inclusive).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn energies(&self) -> Vec<f64> {
        EnergyInterval::new(self.lo, self.hi).grid(self.points)
    }
}

#[derive(Clone, Debug)]
pub struct CertifyConfig {
    /// Defaults to 21 points on the energy interval.
    pub grid: Option<GridSpec>,
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub struct CriticalConfig {
    /// Defaults to the energy interval.
    pub range: Option<(f64, f64)>,
    /// Defaults to 1/200 of the range.
    pub step: Option<f64>,
    pub tol: f64,
    pub refine_iters: usize,
}

#[derive(Clone, Debug)]
pub struct LyapunovConfig {
    /// Defaults to 11 points on the energy interval.
    pub grid: Option<GridSpec>,
    pub n_steps: usize,
    pub n_replicas: usize,
    pub burn_in: usize,
}

#[derive(Clone, Debug)]
pub struct IdsConfig {
    /// Defaults to 41 points on the energy interval.
    pub grid: Option<GridSpec>,
    pub l: usize,
    pub h: f64,
    pub n_samples: usize,
    pub boundary: Boundary,
}

#[derive(Clone, Debug)]
pub struct LocalizeConfig {
    /// Defaults to the middle tenth of the energy interval.
    pub window: Option<(f64, f64)>,
    pub l: usize,
    pub h: f64,
    pub n_samples: usize,
    pub boundary: Boundary,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: ModelParams<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub certify: CertifyConfig,
    pub critical: CriticalConfig,
    pub lyapunov: LyapunovConfig,
    pub ids: IdsConfig,
    pub localize: LocalizeConfig,
}

fn check_grid(name: &str, g: RawGrid, default_points: usize, errs: &mut Vec<String>) -> GridSpec {
    if !(g.lo <= g.hi) {
        errs.push(format!("{name}: lo = {} exceeds hi = {}", g.lo, g.hi));
    }
    let points = g.points.unwrap_or(default_points);
    if points == 0 {
        errs.push(format!("{name}: points must be at least 1"));
    }
    GridSpec { lo: g.lo, hi: g.hi, points }
}

fn parse_boundary(name: &str, b: Option<String>, errs: &mut Vec<String>) -> Boundary {
    match b {
        None => Boundary::Dirichlet,
        Some(s) => s.parse().unwrap_or_else(|e| {
            errs.push(format!("{name}: {e}"));
            Boundary::Dirichlet
        }),
    }
}

fn positive(name: &str, v: f64, errs: &mut Vec<String>) {
    if !(v > 0.0) || !v.is_finite() {
        errs.push(format!("{name} = {v} must be positive"));
    }
}

fn nonzero(name: &str, v: usize, errs: &mut Vec<String>) {
    if v == 0 {
        errs.push(format!("{name} must be at least 1"));
    }
}

/// Model parameters from the document, or the violations found.
fn parse_model(raw: &RawConfig, errs: &mut Vec<String>) -> Option<ModelParams<f64>> {
    let before = errs.len();
    let n = raw.n.unwrap_or_else(|| {
        errs.push("missing field N".into());
        0
    });
    if raw.n == Some(0) {
        errs.push("N must be at least 1".into());
    }
    let v = match &raw.v {
        None => {
            errs.push("missing field V (N x N array)".into());
            None
        }
        Some(rows) if rows.len() != n || rows.iter().any(|r| r.len() != n) => {
            errs.push(format!("V must be a {n} x {n} array"));
            None
        }
        Some(rows) => match Matrix::from_rows(rows).and_then(SymmetricMatrix::new) {
            Ok(s) => Some(s),
            Err(e) => {
                errs.push(format!("V: {e}"));
                None
            }
        },
    };
    let c = match &raw.c {
        None => {
            errs.push("missing field c".into());
            None
        }
        Some(c) => {
            if c.len() != n {
                errs.push(format!("c has length {} but N = {n}", c.len()));
            }
            for (i, &ci) in c.iter().enumerate() {
                if ci == 0.0 {
                    errs.push(format!("c[{i}] = 0; the couplings c_i must be non-zero real numbers"));
                }
            }
            Some(c.clone())
        }
    };
    let ell = raw.ell.unwrap_or_else(|| {
        errs.push("missing field ell".into());
        f64::NAN
    });
    if raw.ell.is_some() {
        positive("ell", ell, errs);
    }
    let rho = raw.rho.unwrap_or(DEFAULT_RHO);
    if !(rho > 0.0 && rho <= 1.0) {
        errs.push(format!("rho = {rho} must lie in (0, 1]"));
    }
    let disorder = match &raw.disorder {
        None => {
            errs.push("missing field disorder".into());
            None
        }
        Some(d) => {
            let has = |x: f64| d.atoms.iter().any(|&(v, p)| v == x && p > 0.0);
            if !(has(0.0) && has(1.0)) {
                errs.push("disorder atoms must include the values 0 and 1 with positive weight ({0,1} ⊂ supp ν)".into());
            }
            match DisorderSpec::new(d.atoms.clone()) {
                Ok(s) => Some(s),
                Err(e) => {
                    errs.push(format!("disorder: {e}"));
                    None
                }
            }
        }
    };
    if errs.len() > before {
        return None;
    }
    match ModelParams::new(v?, c?, ell, rho, disorder?) {
        Ok(p) => Some(p),
        Err(e) => {
            errs.push(e.to_string());
            None
        }
    }
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError(vec![format!("malformed JSON: {e}")]))?;
    let mut errs = Vec::new();
    let params = parse_model(&raw, &mut errs);

    let grid = |name: &str, given: Option<RawGrid>, points: usize, errs: &mut Vec<String>| -> Option<GridSpec> {
        given.map(|g| check_grid(name, g, points, errs))
    };
    let ell = params.as_ref().map_or(1.0, |p| p.ell());

    let rc = raw.certify.unwrap_or_default();
    let certify = CertifyConfig {
        grid: grid("certify.grid", rc.grid, 21, &mut errs),
        tol: rc.tol.unwrap_or(andloc::furstenberg::DEFAULT_CLOSURE_TOL),
    };
    positive("certify.tol", certify.tol, &mut errs);

    let rcr = raw.critical.unwrap_or_default();
    let range = rcr.range.map(|g| {
        let g = check_grid("critical.range", g, 1, &mut errs);
        (g.lo, g.hi)
    });
    let critical = CriticalConfig {
        range,
        step: rcr.step,
        tol: rcr.tol.unwrap_or(andloc::furstenberg::DEFAULT_CLOSURE_TOL),
        refine_iters: rcr.refine_iters.unwrap_or(40),
    };
    if let Some(step) = critical.step {
        positive("critical.step", step, &mut errs);
    }
    positive("critical.tol", critical.tol, &mut errs);

    let rl = raw.lyapunov.unwrap_or_default();
    let lyapunov = LyapunovConfig {
        grid: grid("lyapunov.grid", rl.grid, 11, &mut errs),
        n_steps: rl.n_steps.unwrap_or(20_000),
        n_replicas: rl.n_replicas.unwrap_or(8),
        burn_in: rl.burn_in.unwrap_or(100),
    };
    nonzero("lyapunov.n_steps", lyapunov.n_steps, &mut errs);
    nonzero("lyapunov.n_replicas", lyapunov.n_replicas, &mut errs);

    let ri = raw.ids.unwrap_or_default();
    let ids = IdsConfig {
        grid: grid("ids.grid", ri.grid, 41, &mut errs),
        l: ri.l.unwrap_or(50),
        h: ri.h.unwrap_or(ell / 8.0),
        n_samples: ri.n_samples.unwrap_or(4),
        boundary: parse_boundary("ids.boundary", ri.boundary, &mut errs),
    };
    nonzero("ids.L", ids.l, &mut errs);
    positive("ids.h", ids.h, &mut errs);
    nonzero("ids.n_samples", ids.n_samples, &mut errs);

    let rloc = raw.localize.unwrap_or_default();
    let window = rloc.window.map(|g| {
        let g = check_grid("localize.window", g, 1, &mut errs);
        (g.lo, g.hi)
    });
    let localize = LocalizeConfig {
        window,
        l: rloc.l.unwrap_or(100),
        h: rloc.h.unwrap_or(ell / 8.0),
        n_samples: rloc.n_samples.unwrap_or(1),
        boundary: parse_boundary("localize.boundary", rloc.boundary, &mut errs),
    };
    nonzero("localize.L", localize.l, &mut errs);
    positive("localize.h", localize.h, &mut errs);
    nonzero("localize.n_samples", localize.n_samples, &mut errs);

    match params {
        Some(params) if errs.is_empty() => Ok(RunConfig {
            params,
            seed: raw.seed.unwrap_or(0),
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            certify,
            critical,
            lyapunov,
            ids,
            localize,
        }),
        _ => Err(ConfigError(errs)),
    }
}
