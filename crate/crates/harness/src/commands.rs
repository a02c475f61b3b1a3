//! The work behind each subcommand, kept free of argument parsing.

use std::collections::HashMap;
use std::path::PathBuf;

use tabkit_core::evaluate::{
    log_log_slope, rate_slope, run_cells, summarize, Method, ReplicateFailure, ReplicateSummary, ResultRecord,
    SlopeFit,
};
use tabkit_core::knn::KnnRegressor;
use tabkit_core::model::{Origin, ProblemParams};
use tabkit_core::quantities::{
    ambiguity_bound_bandlike, ambiguity_bound_logistic, ambiguity_level_mc, signal_transfer_bound,
    signal_transfer_risk_mc, source_excess_risk_mc,
};
use tabkit_core::classifiers::PlugInRule;
use tabkit_core::rng::{derive_seed, stream};
use tabkit_core::scenarios::{sample, ScenarioKind, ScenarioSpec, DEFAULT_AMP_Q};

use crate::config::ExperimentConfig;
use crate::report::{plot_script, render_svg, write_detail_csv, write_summary_csv, write_text, OutputPaths};
use crate::HarnessError;

/// Records in canonical order plus their summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub records: Vec<ResultRecord>,
    pub summary: Vec<ReplicateSummary>,
    pub failures: Vec<ReplicateFailure>,
}

/// Runs every cell of `cfg`; records are sorted by cell, method, replicate.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let cells = cfg.cells()?;
    let out = run_cells(&cells, cfg.reps, cfg.seed).map_err(|e| HarnessError::Config(e.to_string()))?;
    let cell_of: HashMap<(Option<u64>, u64), usize> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| ((c.scenario.gamma().map(f64::to_bits), c.scenario.grid_param().1.to_bits()), i))
        .collect();
    let method_pos = |m: Method| cfg.methods.iter().position(|x| *x == m).unwrap_or(usize::MAX);
    let mut records = out.records;
    records.sort_by_key(|r| {
        (
            cell_of[&(r.gamma.map(f64::to_bits), r.param_value.to_bits())],
            method_pos(r.method),
            r.replicate,
        )
    });
    Ok(ExperimentOutcome {
        summary: summarize(&records),
        records,
        failures: out.failures,
    })
}

/// Writes the detail CSV, summary CSV, plot script and SVG chart.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &ExperimentOutcome) -> Result<OutputPaths, HarnessError> {
    let paths = OutputPaths::new(&cfg.out);
    write_detail_csv(&paths.detail, &outcome.records)?;
    write_summary_csv(&paths.summary, &outcome.summary)?;
    write_text(&paths.script, &plot_script(&paths.summary, cfg.metric))?;
    write_text(&paths.svg, &render_svg(&outcome.summary, cfg.metric))?;
    Ok(paths)
}

/// Runs a sweep, writes its files and reports replicate failures as a fit error.
pub fn cmd_figure(cfg: &ExperimentConfig) -> Result<(ExperimentOutcome, OutputPaths), HarnessError> {
    let outcome = run_experiment(cfg)?;
    let paths = write_outputs(cfg, &outcome)?;
    if let Some(f) = outcome.failures.first() {
        return Err(HarnessError::Fit(format!(
            "{} replicate(s) failed; first: cell {} replicate {}: {}",
            outcome.failures.len(),
            f.cell,
            f.replicate,
            f.message
        )));
    }
    Ok((outcome, paths))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateOptions {
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub n_mc: usize,
    pub seed: u64,
    pub gamma: f64,
    pub delta: f64,
    pub method: Method,
    /// Fit these risks directly instead of simulating.
    pub risks: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            n_grid: vec![250, 500, 1000, 2000, 4000, 8000],
            reps: 50,
            n_mc: 100_000,
            seed: 2024,
            gamma: 1.0,
            delta: 0.0,
            method: Method::PKnn,
            risks: None,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateOutcome {
    pub n_grid: Vec<usize>,
    pub mean_risk: Vec<f64>,
    pub fit: SlopeFit,
    /// `-beta (1 + alpha) / (2 gamma beta + d)` with `alpha = beta = 1`, `d = 2`.
    pub theory: f64,
}

pub fn cmd_rate_check(opts: &RateOptions) -> Result<RateOutcome, HarnessError> {
    let gamma = if opts.method == Method::QKnn { 1.0 } else { opts.gamma };
    let theory = -2.0 / (2.0 * gamma + 2.0);
    let (mean_risk, fit) = match &opts.risks {
        Some(r) => {
            let ns: Vec<f64> = opts.n_grid.iter().map(|&n| n as f64).collect();
            let fit = log_log_slope(&ns, r).map_err(|e| HarnessError::Config(e.to_string()))?;
            (r.clone(), fit)
        }
        None => {
            if opts.n_grid.len() < 3 {
                return Err(HarnessError::Config("rate check needs at least three grid points".into()));
            }
            let sc = ScenarioSpec::band_like(opts.gamma, opts.delta).map_err(|e| HarnessError::Config(e.to_string()))?;
            let params = ProblemParams {
                gamma: opts.gamma,
                ..ProblemParams::default()
            };
            let rep = rate_slope(&sc, opts.method, &params, &opts.n_grid, opts.reps, opts.n_mc, opts.seed)
                .map_err(|e| HarnessError::Fit(e.to_string()))?;
            (rep.mean_risk, rep.fit)
        }
    };
    if let Some(path) = &opts.out {
        let mut text = String::from("n,mean_excess_risk\n");
        for (n, r) in opts.n_grid.iter().zip(&mean_risk) {
            text.push_str(&format!("{n},{r}\n"));
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(e.to_string()))?;
        }
        write_text(path, &text)?;
    }
    Ok(RateOutcome {
        n_grid: opts.n_grid.clone(),
        mean_risk,
        fit,
        theory,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundOptions {
    pub z_grid: Vec<f64>,
    pub band_deltas: Vec<f64>,
    pub band_gammas: Vec<f64>,
    pub logistic_deltas: Vec<f64>,
    pub d: usize,
    pub s: usize,
    pub n_mc: usize,
    pub seed: u64,
    /// Replicates of the signal-transfer check; zero skips it.
    pub str_reps: usize,
    pub str_deltas: Vec<f64>,
    pub n_p: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            z_grid: (0..=25).map(|i| i as f64 / 50.0).collect(),
            band_deltas: vec![0.0, 0.1, 0.3],
            band_gammas: vec![0.5, 1.0],
            logistic_deltas: vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25],
            d: 200,
            s: 10,
            n_mc: 100_000,
            seed: 2024,
            str_reps: 5,
            str_deltas: vec![0.0, 0.2],
            n_p: 1000,
        }
    }
}

/// One checked inequality `lhs <= rhs + 3 se`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub family: &'static str,
    pub gamma: f64,
    pub delta: f64,
    /// `z` for ambiguity rows, the replicate index for signal-transfer rows.
    pub z: f64,
    pub lhs: f64,
    pub se: f64,
    pub rhs: f64,
}

impl BoundRow {
    pub fn passes(&self) -> bool {
        self.lhs <= self.rhs + 3.0 * self.se
    }
}

fn fit_err(e: tabkit_core::Error) -> HarnessError {
    HarnessError::Fit(e.to_string())
}

/// Band-like ambiguity levels against their closed form. The MC level uses
/// `C_gamma / 2`, which is the constant the closed form controls.
pub fn band_ambiguity_rows(opts: &BoundOptions) -> Result<Vec<BoundRow>, HarnessError> {
    let mut rows = Vec::new();
    for (gi, &gamma) in opts.band_gammas.iter().enumerate() {
        for (di, &delta) in opts.band_deltas.iter().enumerate() {
            let sc = ScenarioSpec::band_like(gamma, delta).map_err(fit_err)?;
            let (alpha, c_alpha) = sc.sine_margin_constants().expect("sine scenario");
            let c_gamma = sc.band_constant().expect("band-like scenario");
            let params = ProblemParams::new(alpha, c_alpha, gamma, c_gamma, 1.0, 2).map_err(fit_err)?;
            for (zi, &z) in opts.z_grid.iter().enumerate() {
                let seed = derive_seed(opts.seed, (gi * 1000 + di * 100 + zi) as u64, stream::RISK);
                let lhs = ambiguity_level_mc(&sc, z, gamma, c_gamma / 2.0, opts.n_mc, seed).map_err(fit_err)?;
                rows.push(BoundRow {
                    family: "band",
                    gamma,
                    delta,
                    z,
                    lhs: lhs.estimate,
                    se: lhs.std_error,
                    rhs: ambiguity_bound_bandlike(z, delta, &params).map_err(fit_err)?,
                });
            }
        }
    }
    Ok(rows)
}

/// Logistic-pair ambiguity levels with the measured angle, `m = 1 ∧ |beta_P|/|beta_Q|`,
/// `L = |beta_Q|` and `U = |beta_P|`.
pub fn logistic_ambiguity_rows(opts: &BoundOptions) -> Result<Vec<BoundRow>, HarnessError> {
    let mut rows = Vec::new();
    for (di, &delta) in opts.logistic_deltas.iter().enumerate() {
        let sc = ScenarioSpec::logistic_rotation(opts.d, opts.s, delta).map_err(fit_err)?;
        let c = sc.coefficients().expect("logistic scenario");
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (l, u) = (norm(&c.beta_q), norm(&c.beta_p));
        let m = (u / l).min(1.0);
        let angle = c.angle().map_err(fit_err)?;
        for (zi, &z) in opts.z_grid.iter().enumerate() {
            let seed = derive_seed(opts.seed, (50_000 + di * 100 + zi) as u64, stream::RISK);
            let lhs = ambiguity_level_mc(&sc, z, 1.0, m / std::f64::consts::PI, opts.n_mc, seed).map_err(fit_err)?;
            rows.push(BoundRow {
                family: "logistic",
                gamma: 1.0,
                delta: angle,
                z,
                lhs: lhs.estimate,
                se: lhs.std_error,
                rhs: ambiguity_bound_logistic(z, angle, m, l, u).map_err(fit_err)?,
            });
        }
    }
    Ok(rows)
}

/// Signal transfer risk of P-only K-NN fits against the bound in terms of
/// their source excess risk (`gamma = 1`, `M = 1`).
pub fn signal_transfer_rows(opts: &BoundOptions) -> Result<Vec<BoundRow>, HarnessError> {
    let mut rows = Vec::new();
    for (di, &delta) in opts.str_deltas.iter().enumerate() {
        let sc = ScenarioSpec::new(ScenarioKind::BandLike {
            gamma: 1.0,
            delta,
            amp_q: DEFAULT_AMP_Q,
            gain: 2.0,
        })
        .map_err(fit_err)?;
        let (alpha, c_alpha) = sc.sine_margin_constants().expect("sine scenario");
        let c_gamma = sc.band_constant().expect("band-like scenario");
        let params = ProblemParams::new(alpha, c_alpha, 1.0, c_gamma, 1.0, 2).map_err(fit_err)?;
        for rep in 0..opts.str_reps {
            let seed = derive_seed(derive_seed(opts.seed, di as u64, 0), rep as u64, 0);
            let dp = sample(&sc, Origin::Source, opts.n_p, derive_seed(seed, 0, stream::SOURCE_TRAIN)).map_err(fit_err)?;
            let k = tabkit_core::knn::select_k_source(opts.n_p, 1.0, 1.0, 2, 1.0);
            let rule = PlugInRule(KnnRegressor::fit(&dp, k).map_err(fit_err)?);
            let xi = signal_transfer_risk_mc(&rule, &sc, 1.0, c_gamma, opts.n_mc, derive_seed(seed, 0, stream::RISK))
                .map_err(fit_err)?;
            let eps = source_excess_risk_mc(&rule, &sc, opts.n_mc, derive_seed(seed, 1, stream::RISK)).map_err(fit_err)?;
            let rhs = signal_transfer_bound(eps.estimate, 1.0, &params).map_err(fit_err)?;
            // the bound is linear in eps when gamma = 1
            let slope = if eps.estimate > 0.0 { rhs / eps.estimate } else { 0.0 };
            rows.push(BoundRow {
                family: "signal_transfer",
                gamma: 1.0,
                delta,
                z: rep as f64,
                lhs: xi.estimate,
                se: (xi.std_error.powi(2) + (slope * eps.std_error).powi(2)).sqrt(),
                rhs,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_verify_bounds(opts: &BoundOptions) -> Result<Vec<BoundRow>, HarnessError> {
    let mut rows = band_ambiguity_rows(opts)?;
    rows.extend(logistic_ambiguity_rows(opts)?);
    if opts.str_reps > 0 {
        rows.extend(signal_transfer_rows(opts)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_rate_inputs() {
        let opts = RateOptions {
            n_grid: vec![100, 200, 400, 800],
            risks: Some(vec![0.8, 0.4, 0.2, 0.1]),
            ..RateOptions::default()
        };
        let r = cmd_rate_check(&opts).unwrap();
        assert!((r.fit.slope + 1.0).abs() < 1e-12);
        assert_eq!(r.theory, -0.5);
        let flat = RateOptions {
            risks: Some(vec![0.3; 4]),
            ..opts.clone()
        };
        assert!(cmd_rate_check(&flat).unwrap().fit.slope.abs() < 1e-12);
        let short = RateOptions {
            n_grid: vec![100, 200],
            risks: None,
            ..opts
        };
        assert!(matches!(cmd_rate_check(&short), Err(HarnessError::Config(_))));
    }

    #[test]
    fn zero_z_and_perfect_source_rows_are_zero() {
        let opts = BoundOptions {
            z_grid: vec![0.0, 0.1],
            band_deltas: vec![0.0],
            band_gammas: vec![1.0],
            n_mc: 2000,
            ..BoundOptions::default()
        };
        let rows = band_ambiguity_rows(&opts).unwrap();
        assert!(rows.iter().all(|r| r.lhs == 0.0 && r.passes()));
    }
}
