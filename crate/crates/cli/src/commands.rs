use std::path::Path;

use andloc::furstenberg::{density_certificate, scan_critical_energies_in, CriticalEnergySet, DensityCertificate};
use andloc::lyapunov::{lyapunov_spectrum, EstimatorConfig, LyapunovSpectrum};
use andloc::model::{EnergyInterval, ModelParams, SpectralBounds};
use andloc::seed::{stream, task_rng};
use andloc::spectrum::{eigen_decay, estimate_ids, ids_modulus, DecayReport, FiniteRestriction, IdsCurve};
use rayon::prelude::*;

use crate::config::{GridSpec, RunConfig};
use crate::output::{header, num, write_csv};
use crate::CliError;

fn interval_of(params: &ModelParams<f64>, what: &str) -> Result<(f64, f64), CliError> {
    params.energy_interval()?.bounds().ok_or_else(|| {
        CliError::Config(format!(
            "the energy interval is empty (ell = {} is not below ell_C); give {what} explicitly",
            params.ell()
        ))
    })
}

fn grid_or_interval(params: &ModelParams<f64>, grid: Option<GridSpec>, points: usize, what: &str) -> Result<Vec<f64>, CliError> {
    match grid {
        Some(g) => Ok(g.energies()),
        None => {
            let (lo, hi) = interval_of(params, what)?;
            Ok(GridSpec { lo, hi, points }.energies())
        }
    }
}

pub struct IntervalOutcome {
    pub bounds: SpectralBounds<f64>,
    pub interval: EnergyInterval<f64>,
}

pub fn interval(cfg: &RunConfig, out: &Path) -> Result<IntervalOutcome, CliError> {
    let p = &cfg.params;
    let bounds = p.spectral_bounds()?;
    let interval = p.energy_interval_from(&bounds);
    println!("lambda_min = {}", bounds.lambda_min);
    println!("lambda_max = {}", bounds.lambda_max);
    println!("delta = {}", bounds.delta);
    println!("ell_C = {}", bounds.ell_c);
    println!("ell = {}", p.ell());
    println!("rho = {}", p.rho());
    let (lo, hi) = match interval.bounds() {
        Some((lo, hi)) => {
            println!("I = [{lo}, {hi}]");
            (num(lo), num(hi))
        }
        None => {
            println!("I = empty (ell >= ell_C)");
            (String::new(), String::new())
        }
    };
    let row = vec![num(bounds.lambda_min), num(bounds.lambda_max), num(bounds.delta), num(bounds.ell_c), num(p.ell()), num(p.rho()), lo, hi];
    write_csv(out, "interval.csv", &header(&["lambda_min", "lambda_max", "delta", "ell_C", "ell", "rho", "I_lo", "I_hi"]), &[row])?;
    Ok(IntervalOutcome { bounds, interval })
}

pub fn certify(cfg: &RunConfig, out: &Path) -> Result<Vec<DensityCertificate<f64>>, CliError> {
    let grid = grid_or_interval(&cfg.params, cfg.certify.grid, 21, "certify.grid")?;
    let certs: Vec<_> = grid
        .par_iter()
        .map(|&e| density_certificate(&cfg.params, e, cfg.certify.tol))
        .collect::<andloc::Result<_>>()?;
    let rows: Vec<Vec<String>> = certs
        .iter()
        .map(|c| {
            vec![num(c.energy), c.norm_condition.to_string(), c.closure_dim.to_string(), c.target_dim.to_string(), c.certified.to_string()]
        })
        .collect();
    write_csv(out, "certify.csv", &header(&["E", "norm_ok", "closure_dim", "target_dim", "certified"]), &rows)?;
    let n_cert = certs.iter().filter(|c| c.certified).count();
    println!("certified {n_cert} of {} energies (conditional on rho = {})", certs.len(), cfg.params.rho());
    Ok(certs)
}

pub fn critical(cfg: &RunConfig, out: &Path) -> Result<CriticalEnergySet<f64>, CliError> {
    let (lo, hi) = match cfg.critical.range {
        Some(r) => r,
        None => interval_of(&cfg.params, "critical.range")?,
    };
    let step = cfg.critical.step.unwrap_or(((hi - lo) / 200.0).max(f64::EPSILON));
    let set = scan_critical_energies_in(&cfg.params, EnergyInterval::new(lo, hi), step, cfg.critical.tol, cfg.critical.refine_iters)?;
    let rows: Vec<Vec<String>> = set
        .brackets
        .iter()
        .map(|b| {
            vec![num(b.lo), num(b.hi), num(b.mid), b.dim_reached.to_string(), set.target_dim.to_string(), num(set.tolerance)]
        })
        .collect();
    write_csv(out, "critical.csv", &header(&["E_lo", "E_hi", "E_mid", "dim_reached", "target_dim", "tol"]), &rows)?;
    if set.non_generic_flag {
        println!("closure deficient at all {} grid points: V is not generic", set.grid_points);
    } else {
        println!("{} critical bracket(s) over {} grid points", set.brackets.len(), set.grid_points);
    }
    Ok(set)
}

pub fn lyapunov(cfg: &RunConfig, out: &Path) -> Result<Vec<LyapunovSpectrum<f64>>, CliError> {
    let grid = grid_or_interval(&cfg.params, cfg.lyapunov.grid, 11, "lyapunov.grid")?;
    let est = EstimatorConfig {
        n_steps: cfg.lyapunov.n_steps,
        n_replicas: cfg.lyapunov.n_replicas,
        burn_in: cfg.lyapunov.burn_in,
        master_seed: cfg.seed,
    };
    let spectra: Vec<_> = grid.iter().map(|&e| lyapunov_spectrum(&cfg.params, e, &est)).collect::<andloc::Result<_>>()?;
    let m = 2 * cfg.params.n();
    let mut cols = vec!["E".to_string()];
    cols.extend((1..=m).map(|i| format!("gamma_{i}")));
    cols.extend((1..=m).map(|i| format!("stderr_{i}")));
    cols.extend(["n_steps", "n_replicas", "seed"].map(String::from));
    let rows: Vec<Vec<String>> = spectra
        .iter()
        .map(|s| {
            let mut r = vec![num(s.energy)];
            r.extend(s.gammas.iter().map(|&g| num(g)));
            r.extend(s.stderrs.iter().map(|&g| num(g)));
            r.extend([est.n_steps.to_string(), est.n_replicas.to_string(), cfg.seed.to_string()]);
            r
        })
        .collect();
    write_csv(out, "lyapunov.csv", &cols, &rows)?;
    let separated = spectra.iter().filter(|s| s.is_separated()).count();
    println!("{separated} of {} spectra separated at 3 standard errors", spectra.len());
    Ok(spectra)
}

pub fn ids(cfg: &RunConfig, out: &Path) -> Result<IdsCurve<f64>, CliError> {
    let c = &cfg.ids;
    let grid = grid_or_interval(&cfg.params, c.grid, 41, "ids.grid")?;
    let curve = estimate_ids(&cfg.params, &grid, c.l, c.h, c.n_samples, cfg.seed, c.boundary)?;
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|k| {
            vec![
                num(curve.energies[k]),
                num(curve.values[k]),
                num(curve.stderrs[k]),
                c.l.to_string(),
                num(c.h),
                c.n_samples.to_string(),
                c.boundary.as_str().to_string(),
            ]
        })
        .collect();
    write_csv(out, "ids.csv", &header(&["E", "N_hat", "stderr", "L", "h", "n_samples", "boundary"]), &rows)?;
    if let (Some(&lo), Some(&hi)) = (grid.first(), grid.last()) {
        if lo < hi {
            let table = ids_modulus(&curve, &EnergyInterval::new(lo, hi))?;
            let rows: Vec<Vec<String>> = table.iter().map(|&(s, inc)| vec![num(s), num(inc)]).collect();
            write_csv(out, "ids_modulus.csv", &header(&["spacing", "max_increment"]), &rows)?;
        }
    }
    println!("IDS estimated at {} energies from {} sample(s)", grid.len(), c.n_samples);
    Ok(curve)
}

pub struct LocalizeOutcome {
    pub window: (f64, f64),
    pub reports: Vec<DecayReport<f64>>,
}

impl LocalizeOutcome {
    pub fn median_rate(&self) -> Option<f64> {
        let mut r: Vec<f64> = self.reports.iter().map(|d| d.fitted_rate).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        match r.len() {
            0 => None,
            n if n % 2 == 1 => Some(r[n / 2]),
            n => Some(0.5 * (r[n / 2 - 1] + r[n / 2])),
        }
    }

    pub fn positive_fraction(&self) -> f64 {
        if self.reports.is_empty() {
            return 0.0;
        }
        self.reports.iter().filter(|d| d.fitted_rate > 0.0).count() as f64 / self.reports.len() as f64
    }
}

pub fn localize(cfg: &RunConfig, out: &Path) -> Result<LocalizeOutcome, CliError> {
    let c = &cfg.localize;
    let window = match c.window {
        Some(w) => w,
        None => {
            let (lo, hi) = interval_of(&cfg.params, "localize.window")?;
            let (mid, half) = (0.5 * (lo + hi), 0.05 * (hi - lo));
            (mid - half, mid + half)
        }
    };
    let per_sample: Vec<Vec<DecayReport<f64>>> = (0..c.n_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = task_rng(cfg.seed, stream::LOCALIZE, s as u64);
            let r = FiniteRestriction::sample(&cfg.params, c.l, c.boundary, c.h, &mut rng)?;
            eigen_decay(&cfg.params, &r, &EnergyInterval::new(window.0, window.1))
        })
        .collect::<andloc::Result<_>>()?;
    let reports: Vec<_> = per_sample.into_iter().flatten().collect();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|d| vec![num(d.eigenvalue), num(d.localization_center), num(d.fitted_rate), num(d.fit_residual), c.l.to_string(), num(c.h)])
        .collect();
    write_csv(out, "decay.csv", &header(&["eigenvalue", "center", "fitted_rate", "residual", "L", "h"]), &rows)?;
    let outcome = LocalizeOutcome { window, reports };
    match outcome.median_rate() {
        Some(m) => println!(
            "{} state(s) in [{}, {}]; median fitted rate {m}; {:.1}% positive",
            outcome.reports.len(),
            window.0,
            window.1,
            100.0 * outcome.positive_fraction()
        ),
        None => println!("no eigenvalues in [{}, {}]", window.0, window.1),
    }
    Ok(outcome)
}

pub struct ReportOutcome {
    pub critical: CriticalEnergySet<f64>,
}

/// Runs every subcommand, then cross-references certificates, Lyapunov gaps
/// and decay rates on the Lyapunov grid.
pub fn report(cfg: &RunConfig, out: &Path) -> Result<ReportOutcome, CliError> {
    let iv = interval(cfg, out)?;
    let _ = certify(cfg, out)?;
    let crit = critical(cfg, out)?;
    let spectra = lyapunov(cfg, out)?;
    let _ = ids(cfg, out)?;
    let loc = localize(cfg, out)?;

    let margin = cfg.critical.step.unwrap_or_else(|| iv.interval.length() / 200.0);
    let n = cfg.params.n();
    let rows: Vec<Vec<String>> = spectra
        .par_iter()
        .map(|s| {
            let cert = density_certificate(&cfg.params, s.energy, cfg.certify.tol)?;
            Ok(vec![
                num(s.energy),
                cert.certified.to_string(),
                crit.near_critical(s.energy, margin).to_string(),
                num(s.gammas[0]),
                num(s.gammas[n - 1]),
                num(s.min_gap()),
                s.is_separated().to_string(),
            ])
        })
        .collect::<andloc::Result<_>>()?;
    write_csv(out, "summary.csv", &header(&["E", "certified", "near_critical", "gamma_1", "gamma_N", "min_gap", "separated"]), &rows)?;

    let mut text = String::new();
    text.push_str(&format!("N = {n}, ell = {}, rho = {}, seed = {}\n", cfg.params.ell(), cfg.params.rho(), cfg.seed));
    match iv.interval.bounds() {
        Some((lo, hi)) => text.push_str(&format!("energy interval: [{lo}, {hi}]\n")),
        None => text.push_str("energy interval: empty\n"),
    }
    text.push_str(&format!(
        "critical brackets: {}{}\n",
        crit.brackets.len(),
        if crit.non_generic_flag { " (non-generic: deficient everywhere)" } else { "" }
    ));
    let certified = rows.iter().filter(|r| r[1] == "true").count();
    let separated = rows.iter().filter(|r| r[6] == "true").count();
    text.push_str(&format!("Lyapunov grid: {} energies, {certified} certified, {separated} separated\n", rows.len()));
    let center = 0.5 * (loc.window.0 + loc.window.1);
    let nearest = spectra.iter().min_by(|a, b| (a.energy - center).abs().total_cmp(&(b.energy - center).abs()));
    match (loc.median_rate(), nearest) {
        (Some(m), Some(s)) => text.push_str(&format!(
            "decay window [{}, {}]: {} states, median rate {m} per unit length, {:.1}% positive; gamma_N/ell at E = {} is {}\n",
            loc.window.0,
            loc.window.1,
            loc.reports.len(),
            100.0 * loc.positive_fraction(),
            s.energy,
            s.gammas[n - 1] / cfg.params.ell()
        )),
        _ => text.push_str(&format!("decay window [{}, {}]: no states\n", loc.window.0, loc.window.1)),
    }
    crate::output::write_atomic(out, "summary.txt", text.as_bytes())?;
    print!("{text}");
    Ok(ReportOutcome { critical: crit })
}
