//! Metrics, replicate runs over experiment cells, summaries and log-log rate
//! fits.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::classifiers::{
    default_k_grid, fit_lasso, fit_pooled_knn_cv, tab_combine, weighted_scheme, KnnOverrides, LambdaSelection,
    LassoTabOptions,
};
use crate::error::{domain, Error, Result};
use crate::knn::{select_k_source, select_k_target, select_tau_nonparam, KnnRegressor};
use crate::logistic::{select_tau_logistic, DesignMatrix};
use crate::model::{plug_in, DecisionRule, Label, LabeledSample, Origin, ProblemParams, Scenario};
use crate::quantities::{bayes_agreement_mc, excess_risk_mc, McEstimate};
use crate::rng::{derive_seed, stream};
use crate::scalar::sigmoid;
use crate::scenarios::{sample, ScenarioKind, ScenarioSpec};

/// Fraction of `test` points with `rule(x) = y`.
pub fn accuracy<R: DecisionRule<f64> + ?Sized>(rule: &R, test: &LabeledSample<f64>) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Empty("test sample"));
    }
    let hits = test
        .points()
        .zip(test.labels())
        .filter(|(x, &y)| rule.predict(x) == y)
        .count();
    Ok(hits as f64 / test.len() as f64)
}

/// MC fraction of `X ~ Q_X` with `rule(X) = f*_Q(X)`.
pub fn bayes_agreement<R, S>(rule: &R, scenario: &S, n: usize, seed: u64) -> Result<McEstimate>
where
    R: DecisionRule<f64> + ?Sized,
    S: Scenario + ?Sized,
{
    bayes_agreement_mc(rule, scenario, n, seed)
}

/// Methods that can appear in an experiment cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    QKnn,
    PKnn,
    TabKnn,
    PooledKnn,
    WeightedKnn,
    QLasso,
    PLasso,
    TabLasso,
    PooledLasso,
}

impl Method {
    pub const KNN: [Method; 5] = [
        Method::QKnn,
        Method::PKnn,
        Method::TabKnn,
        Method::PooledKnn,
        Method::WeightedKnn,
    ];
    pub const LASSO: [Method; 4] = [Method::QLasso, Method::PLasso, Method::TabLasso, Method::PooledLasso];

    pub fn name(self) -> &'static str {
        match self {
            Method::QKnn => "q_knn",
            Method::PKnn => "p_knn",
            Method::TabKnn => "tab_knn",
            Method::PooledKnn => "pooled_knn",
            Method::WeightedKnn => "weighted_knn",
            Method::QLasso => "q_lasso",
            Method::PLasso => "p_lasso",
            Method::TabLasso => "tab_lasso",
            Method::PooledLasso => "pooled_lasso",
        }
    }

    pub fn is_knn(self) -> bool {
        Self::KNN.contains(&self)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::KNN
            .iter()
            .chain(Self::LASSO.iter())
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Settings of the K-NN family of methods.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnSettings {
    /// Smoothness and transfer exponents driving `k_Q`, `k_P` and the weights.
    pub params: ProblemParams<f64>,
    pub overrides: KnnOverrides<f64>,
    pub pooled_folds: usize,
    /// Candidate `k` for pooled CV; `None` uses [`default_k_grid`].
    pub pooled_grid: Option<Vec<usize>>,
}

impl Default for KnnSettings {
    fn default() -> Self {
        Self {
            params: ProblemParams::default(),
            overrides: KnnOverrides::default(),
            pooled_folds: 5,
            pooled_grid: None,
        }
    }
}

/// One grid point of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentCell {
    pub scenario: ScenarioSpec,
    pub methods: Vec<Method>,
    pub n_q: usize,
    pub n_p: usize,
    pub n_test: usize,
    pub knn: KnnSettings,
    pub lasso: LassoTabOptions<f64>,
}

impl ExperimentCell {
    pub fn new(scenario: ScenarioSpec, methods: Vec<Method>, n_q: usize, n_p: usize, n_test: usize) -> Self {
        let mut knn = KnnSettings::default();
        if let Some(gamma) = scenario.gamma() {
            knn.params.gamma = gamma;
            knn.params.d = scenario.dim();
        }
        Self {
            scenario,
            methods,
            n_q,
            n_p,
            n_test,
            knn,
            lasso: LassoTabOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.n_q == 0 || self.n_p == 0 || self.n_test == 0 {
            return Err(Error::Config("sample sizes must be positive".into()));
        }
        let logistic = self.scenario.is_logistic();
        if let Some(m) = self.methods.iter().find(|m| m.is_knn() == logistic) {
            return Err(Error::Config(format!(
                "method {m} does not apply to the {} scenario",
                self.scenario.id()
            )));
        }
        self.knn.params.validate()
    }

    fn sparsity(&self) -> Option<usize> {
        match self.scenario.kind() {
            ScenarioKind::LogisticRotation { s, .. } => Some(*s),
            _ => None,
        }
    }
}

/// One (scenario, method, replicate) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub scenario: &'static str,
    pub param_name: &'static str,
    pub param_value: f64,
    pub gamma: Option<f64>,
    pub method: Method,
    pub replicate: usize,
    pub seed: u64,
    pub n_q: usize,
    pub n_p: usize,
    pub k_q: Option<usize>,
    pub k_p: Option<usize>,
    pub tau: Option<f64>,
    pub lambda_q: Option<f64>,
    pub lambda_p: Option<f64>,
    pub d: usize,
    pub s: Option<usize>,
    pub accuracy: f64,
    pub bayes_agreement: f64,
    pub excess_risk: f64,
}

/// Seed of replicate `i`; every stream of the replicate derives from it.
pub fn replicate_seed(base_seed: u64, replicate: usize) -> u64 {
    derive_seed(base_seed, replicate as u64, 0)
}

/// Evaluation data of a replicate: labeled target test sample and the Bayes
/// quantities at its covariates.
struct TestData {
    sample: LabeledSample<f64>,
    eta: Vec<f64>,
    bayes: Vec<Label>,
}

impl TestData {
    fn metrics(&self, preds: &[Label]) -> (f64, f64, f64) {
        let n = preds.len() as f64;
        let mut hits = 0usize;
        let mut agree = 0usize;
        let mut excess = 0.0;
        for (((&p, &y), &b), &eta) in preds.iter().zip(self.sample.labels()).zip(&self.bayes).zip(&self.eta) {
            hits += usize::from(p == y);
            if p == b {
                agree += 1;
            } else {
                excess += 2.0 * (eta - 0.5).abs();
            }
        }
        (hits as f64 / n, agree as f64 / n, excess / n)
    }
}

/// Fits every method of `cell` on freshly drawn data for one replicate.
pub fn run_replicate(cell: &ExperimentCell, replicate: usize, base_seed: u64) -> Result<Vec<ResultRecord>> {
    cell.validate()?;
    let seed = replicate_seed(base_seed, replicate);
    let sc = &cell.scenario;
    let dq = sample(sc, Origin::Target, cell.n_q, derive_seed(seed, 0, stream::TARGET_TRAIN))?;
    let dp = sample(sc, Origin::Source, cell.n_p, derive_seed(seed, 0, stream::SOURCE_TRAIN))?;
    let test = sample(sc, Origin::Target, cell.n_test, derive_seed(seed, 0, stream::TEST))?;
    let eta: Vec<f64> = test.points().map(|x| sc.eta_q(x)).collect();
    let bayes = eta.iter().map(|&e| plug_in(e)).collect();
    let data = TestData {
        sample: test,
        eta,
        bayes,
    };

    let (param_name, param_value) = sc.grid_param();
    let template = ResultRecord {
        scenario: sc.id(),
        param_name,
        param_value,
        gamma: sc.gamma(),
        method: cell.methods[0],
        replicate,
        seed,
        n_q: cell.n_q,
        n_p: cell.n_p,
        k_q: None,
        k_p: None,
        tau: None,
        lambda_q: None,
        lambda_p: None,
        d: sc.dim(),
        s: cell.sparsity(),
        accuracy: 0.0,
        bayes_agreement: 0.0,
        excess_risk: 0.0,
    };
    let mut predictions: Vec<(ResultRecord, Vec<Label>)> = Vec::with_capacity(cell.methods.len());
    if sc.is_logistic() {
        lasso_predictions(cell, &dq, &dp, &data, seed, &template, &mut predictions)?;
    } else {
        knn_predictions(cell, &dq, &dp, &data, seed, &template, &mut predictions)?;
    }
    Ok(predictions
        .into_iter()
        .map(|(mut rec, preds)| {
            let (acc, agree, excess) = data.metrics(&preds);
            rec.accuracy = acc;
            rec.bayes_agreement = agree;
            rec.excess_risk = excess;
            rec
        })
        .collect())
}

fn knn_predictions(
    cell: &ExperimentCell,
    dq: &LabeledSample<f64>,
    dp: &LabeledSample<f64>,
    data: &TestData,
    seed: u64,
    template: &ResultRecord,
    out: &mut Vec<(ResultRecord, Vec<Label>)>,
) -> Result<()> {
    let s = &cell.knn;
    let o = &s.overrides;
    let k_q = o
        .k_q
        .unwrap_or_else(|| select_k_target(dq.len(), s.params.beta, s.params.d, o.c_q));
    let k_p = o
        .k_p
        .unwrap_or_else(|| select_k_source(dp.len(), s.params.gamma, s.params.beta, s.params.d, o.c_p));
    let tau = o
        .tau
        .unwrap_or_else(|| select_tau_nonparam(dq.len(), dp.len(), k_q, o.c_tau));
    let needs = |ms: &[Method]| cell.methods.iter().any(|m| ms.contains(m));
    let coords = data.sample.coords();
    let eq = if needs(&[Method::QKnn, Method::TabKnn, Method::WeightedKnn]) {
        KnnRegressor::fit(dq, k_q)?.estimate_batch(coords)?
    } else {
        Vec::new()
    };
    let ep = if needs(&[Method::PKnn, Method::TabKnn, Method::WeightedKnn]) {
        KnnRegressor::fit(dp, k_p)?.estimate_batch(coords)?
    } else {
        Vec::new()
    };
    let (w_q, w_p) = weighted_scheme(dq.len(), dp.len(), s.params.beta, s.params.gamma, s.params.d);

    for &m in &cell.methods {
        let mut rec = ResultRecord {
            method: m,
            ..template.clone()
        };
        let preds: Vec<Label> = match m {
            Method::QKnn => {
                rec.k_q = Some(k_q);
                eq.iter().map(|&e| plug_in(e)).collect()
            }
            Method::PKnn => {
                rec.k_p = Some(k_p);
                ep.iter().map(|&e| plug_in(e)).collect()
            }
            Method::TabKnn => {
                rec.k_q = Some(k_q);
                rec.k_p = Some(k_p);
                rec.tau = Some(tau);
                eq.iter()
                    .zip(&ep)
                    .map(|(&a, &b)| tab_combine(a, plug_in(a), tau, plug_in(b)))
                    .collect()
            }
            Method::WeightedKnn => {
                rec.k_q = Some(k_q);
                rec.k_p = Some(k_p);
                eq.iter().zip(&ep).map(|(&a, &b)| plug_in(w_q * a + w_p * b)).collect()
            }
            Method::PooledKnn => {
                let grid = s
                    .pooled_grid
                    .clone()
                    .unwrap_or_else(|| default_k_grid(dq.len() + dp.len()));
                let fit = fit_pooled_knn_cv(dq, dp, s.pooled_folds, &grid, derive_seed(seed, 0, stream::CV))?;
                rec.k_q = Some(fit.k);
                fit.regressor.estimate_batch(coords)?.into_iter().map(plug_in).collect()
            }
            other => return Err(domain(format!("{other} is not a K-NN method"))),
        };
        out.push((rec, preds));
    }
    Ok(())
}

fn with_seed(sel: LambdaSelection, seed: u64) -> LambdaSelection {
    match sel {
        LambdaSelection::CrossValidated { folds, grid_len, .. } => {
            LambdaSelection::CrossValidated { folds, grid_len, seed }
        }
        other => other,
    }
}

fn lasso_predictions(
    cell: &ExperimentCell,
    dq: &LabeledSample<f64>,
    dp: &LabeledSample<f64>,
    data: &TestData,
    seed: u64,
    template: &ResultRecord,
    out: &mut Vec<(ResultRecord, Vec<Label>)>,
) -> Result<()> {
    let opts = &cell.lasso;
    let needs = |ms: &[Method]| cell.methods.iter().any(|m| ms.contains(m));
    let xs = DesignMatrix::from_sample(&data.sample)?;
    let fit_margins = |sample: &LabeledSample<f64>, stream_index: u64| -> Result<(f64, Vec<f64>)> {
        let sel = with_seed(opts.selection, derive_seed(seed, stream_index, stream::CV));
        let fit = fit_lasso(sample, sel, &opts.fit)?;
        Ok((fit.lambda, xs.margins(&fit.fit.coefficients)))
    };
    let q = if needs(&[Method::QLasso, Method::TabLasso]) {
        Some(fit_margins(dq, 0)?)
    } else {
        None
    };
    let p = if needs(&[Method::PLasso, Method::TabLasso]) {
        Some(fit_margins(dp, 1)?)
    } else {
        None
    };
    let s = cell.sparsity().unwrap_or(1);
    let tau = opts
        .tau
        .unwrap_or_else(|| select_tau_logistic(dq.len(), dp.len(), s, dq.dim(), opts.c_tau));
    let sign = |m: &f64| Label::from(*m >= 0.0);

    for &m in &cell.methods {
        let mut rec = ResultRecord {
            method: m,
            ..template.clone()
        };
        let preds: Vec<Label> = match m {
            Method::QLasso => {
                let (l, mq) = q.as_ref().expect("target fit present");
                rec.lambda_q = Some(*l);
                mq.iter().map(sign).collect()
            }
            Method::PLasso => {
                let (l, mp) = p.as_ref().expect("source fit present");
                rec.lambda_p = Some(*l);
                mp.iter().map(sign).collect()
            }
            Method::TabLasso => {
                let (lq, mq) = q.as_ref().expect("target fit present");
                let (lp, mp) = p.as_ref().expect("source fit present");
                rec.lambda_q = Some(*lq);
                rec.lambda_p = Some(*lp);
                rec.tau = Some(tau);
                mq.iter()
                    .zip(mp)
                    .map(|(a, b)| tab_combine(sigmoid(*a), sign(a), tau, sign(b)))
                    .collect()
            }
            Method::PooledLasso => {
                let (l, mm) = fit_margins(&dq.concat(dp)?, 2)?;
                rec.lambda_q = Some(l);
                mm.iter().map(sign).collect()
            }
            other => return Err(domain(format!("{other} is not a lasso method"))),
        };
        out.push((rec, preds));
    }
    Ok(())
}

/// A replicate that failed to fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateFailure {
    pub cell: usize,
    pub replicate: usize,
    pub seed: u64,
    pub message: String,
}

/// Records of every successful replicate plus the failures.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<ReplicateFailure>,
}

/// Runs `reps` replicates of one cell in parallel.
pub fn run_replicates(cell: &ExperimentCell, reps: usize, base_seed: u64) -> Result<RunOutput> {
    run_cells(std::slice::from_ref(cell), reps, base_seed)
}

/// Runs every `(cell, replicate)` pair in parallel. Records come back ordered
/// by cell, then replicate, then the cell's method order, independent of
/// scheduling.
pub fn run_cells(cells: &[ExperimentCell], reps: usize, base_seed: u64) -> Result<RunOutput> {
    if reps == 0 {
        return Err(domain("reps must be >= 1"));
    }
    for c in cells {
        c.validate()?;
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..reps).map(move |r| (c, r)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(c, r)| (c, r, run_replicate(&cells[c], r, base_seed)))
        .collect();
    let mut out = RunOutput::default();
    for (cell, replicate, res) in results {
        match res {
            Ok(recs) => out.records.extend(recs),
            Err(e) => out.failures.push(ReplicateFailure {
                cell,
                replicate,
                seed: replicate_seed(base_seed, replicate),
                message: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// Mean, sample standard deviation and standard error of a metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("values"));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            sd,
            se: sd / n.sqrt(),
        })
    }
}

/// Aggregate of the records of one (scenario, parameter, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary {
    pub scenario: &'static str,
    pub param_name: &'static str,
    pub param_value: f64,
    pub gamma: Option<f64>,
    pub method: Method,
    pub count: usize,
    pub accuracy: Moments,
    pub bayes_agreement: Moments,
    pub excess_risk: Moments,
}

/// Groups records by (scenario, gamma, grid parameter, method), keeping the
/// order of first appearance.
pub fn summarize(records: &[ResultRecord]) -> Vec<ReplicateSummary> {
    type Key = (&'static str, Option<u64>, &'static str, u64, Method);
    let key = |r: &ResultRecord| -> Key {
        (
            r.scenario,
            r.gamma.map(f64::to_bits),
            r.param_name,
            r.param_value.to_bits(),
            r.method,
        )
    };
    let mut order: Vec<Key> = Vec::new();
    let mut groups: std::collections::HashMap<Key, Vec<&ResultRecord>> = Default::default();
    for r in records {
        let k = key(r);
        groups
            .entry(k)
            .or_insert_with(|| {
                order.push(k);
                Vec::new()
            })
            .push(r);
    }
    order
        .iter()
        .map(|k| {
            let g = &groups[k];
            let col = |f: fn(&ResultRecord) -> f64| {
                let v: Vec<f64> = g.iter().map(|r| f(r)).collect();
                Moments::of(&v).expect("groups are nonempty")
            };
            ReplicateSummary {
                scenario: g[0].scenario,
                param_name: g[0].param_name,
                param_value: g[0].param_value,
                gamma: g[0].gamma,
                method: g[0].method,
                count: g.len(),
                accuracy: col(|r| r.accuracy),
                bayes_agreement: col(|r| r.bayes_agreement),
                excess_risk: col(|r| r.excess_risk),
            }
        })
        .collect()
}

/// Least-squares fit of `ln(risk)` on `ln(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero with three points on a line.
    pub se: f64,
}

pub fn log_log_slope(ns: &[f64], risks: &[f64]) -> Result<SlopeFit> {
    if ns.len() != risks.len() {
        return Err(Error::Dimension {
            expected: ns.len(),
            got: risks.len(),
        });
    }
    if ns.len() < 3 {
        return Err(domain("need at least three grid points"));
    }
    if ns.iter().chain(risks).any(|v| !(*v > 0.0)) {
        return Err(domain("grid values and mean risks must be positive"));
    }
    let x: Vec<f64> = ns.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = risks.iter().map(|v| v.ln()).collect();
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(domain("grid values must not all coincide"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        intercept,
        se: (rss / (m - 2.0) / sxx).sqrt(),
    })
}

/// Mean excess risk per grid point and the fitted slope.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub n_grid: Vec<usize>,
    pub mean_risk: Vec<f64>,
    pub fit: SlopeFit,
}

/// Excess risk of a single-sample K-NN plug-in (`q_knn` varies `n_Q`,
/// `p_knn` varies `n_P`) with rate-driven `k`, measured by
/// [`excess_risk_mc`] with `n_mc` points, fitted on a log-log scale.
pub fn rate_slope(
    scenario: &ScenarioSpec,
    method: Method,
    params: &ProblemParams<f64>,
    n_grid: &[usize],
    reps: usize,
    n_mc: usize,
    base_seed: u64,
) -> Result<RateReport> {
    if n_grid.len() < 3 {
        return Err(domain("need at least three grid points"));
    }
    if reps == 0 {
        return Err(domain("reps must be >= 1"));
    }
    let origin = match method {
        Method::QKnn => Origin::Target,
        Method::PKnn => Origin::Source,
        other => return Err(Error::Config(format!("rate checks support q_knn and p_knn, not {other}"))),
    };
    let jobs: Vec<(usize, usize)> = (0..n_grid.len()).flat_map(|g| (0..reps).map(move |r| (g, r))).collect();
    let risks: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(g, r)| {
            let n = n_grid[g];
            let seed = derive_seed(derive_seed(base_seed, g as u64, 0), r as u64, 0);
            let train = sample(scenario, origin, n, derive_seed(seed, 0, stream::SOURCE_TRAIN))?;
            let k = match origin {
                Origin::Target => select_k_target(n, params.beta, params.d, 1.0),
                Origin::Source => select_k_source(n, params.gamma, params.beta, params.d, 1.0),
            };
            let rule = crate::classifiers::PlugInRule(KnnRegressor::fit(&train, k)?);
            Ok(excess_risk_mc(&rule, scenario, n_mc, derive_seed(seed, 0, stream::RISK))?.estimate)
        })
        .collect();
    let mut mean_risk = vec![0.0; n_grid.len()];
    for ((g, _), r) in jobs.iter().zip(risks) {
        mean_risk[*g] += r? / reps as f64;
    }
    let ns: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let fit = log_log_slope(&ns, &mean_risk)?;
    Ok(RateReport {
        n_grid: n_grid.to_vec(),
        mean_risk,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConstantRule;

    #[test]
    fn accuracy_of_constant_rule() {
        let s = LabeledSample::from_flat(1, vec![0.0, 1.0, 2.0, 3.0], vec![0, 1, 0, 1], Origin::Target).unwrap();
        assert_eq!(accuracy(&ConstantRule(1), &s).unwrap(), 0.5);
        assert!(accuracy(&ConstantRule(1), &LabeledSample::empty(1, Origin::Target)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::KNN.iter().chain(Method::LASSO.iter()) {
            assert_eq!(m.name().parse::<Method>().unwrap(), *m);
        }
        assert!("svm".parse::<Method>().is_err());
    }

    #[test]
    fn slope_examples() {
        let ns = [10.0, 100.0, 1000.0, 10000.0];
        let inv: Vec<f64> = ns.iter().map(|n| 3.0 / n).collect();
        let f = log_log_slope(&ns, &inv).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12 && f.se < 1e-12);
        let flat = log_log_slope(&ns, &[0.2; 4]).unwrap();
        assert!(flat.slope.abs() < 1e-12);
        assert!(log_log_slope(&ns[..2], &inv[..2]).is_err());
        assert!(log_log_slope(&ns, &[0.1, 0.0, 0.1, 0.1]).is_err());
    }

    #[test]
    fn moments_single_value() {
        let m = Moments::of(&[0.7]).unwrap();
        assert_eq!((m.mean, m.sd, m.se), (0.7, 0.0, 0.0));
        let m = Moments::of(&[1.0, 3.0]).unwrap();
        assert_eq!(m.mean, 2.0);
        assert!((m.sd - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cell_rejects_incompatible_methods() {
        let sc = ScenarioSpec::band_like(1.0, 0.0).unwrap();
        let cell = ExperimentCell::new(sc, vec![Method::QLasso], 50, 50, 100);
        assert!(matches!(cell.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn small_knn_run_is_deterministic() {
        let sc = ScenarioSpec::band_like(1.0, 0.3).unwrap();
        let cell = ExperimentCell::new(sc, Method::KNN.to_vec(), 60, 120, 500);
        let a = run_replicates(&cell, 2, 11).unwrap();
        let b = run_replicates(&cell, 2, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.failures.is_empty());
        assert_eq!(a.records.len(), 10);
        let summary = summarize(&a.records);
        assert_eq!(summary.len(), 5);
        assert!(summary.iter().all(|s| s.count == 2));
        for r in &a.records {
            assert!((0.0..=1.0).contains(&r.accuracy) && (0.0..=1.0).contains(&r.bayes_agreement));
            assert!(r.excess_risk >= 0.0);
        }
        let single = summarize(&run_replicates(&cell, 1, 11).unwrap().records);
        let first = &a.records[0];
        assert_eq!(single[0].accuracy.mean, first.accuracy);
    }
}
