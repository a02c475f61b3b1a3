//! The transfer-around-boundary (TAB) combiner and the baseline classifiers:
//! target-only, source-only, pooled and weighted K-NN, and lasso-logistic
//! counterparts.

use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::error::{domain, Error, Result};
use crate::knn::{select_k_source, select_k_target, select_tau_nonparam, KnnRegressor, NeighborIndex, Neighbor};
use crate::logistic::{
    cv_lambda_1se, fit_logistic_lasso, fit_path, lambda_grid, select_lambda_theory, select_tau_logistic, DesignMatrix,
    FitOptions, LogisticLassoFit,
};
use crate::model::{plug_in, DecisionRule, Label, LabeledSample, ProblemParams};
use crate::rng::rng_from_seed;
use crate::scalar::{sigmoid, Scalar};

/// An estimate of a regression function together with its plug-in label.
pub trait RegressionEstimate<T>: Send + Sync {
    fn estimate(&self, x: &[T]) -> T;

    /// Estimate and the plug-in label `1{estimate >= 1/2}`.
    fn estimate_with_label(&self, x: &[T]) -> (T, Label)
    where
        T: Scalar,
    {
        let e = self.estimate(x);
        (e, plug_in(e))
    }
}

impl<T: Scalar> RegressionEstimate<T> for KnnRegressor<T> {
    /// Panics if `x` has the wrong dimension.
    fn estimate(&self, x: &[T]) -> T {
        KnnRegressor::estimate(self, x).expect("query dimension matches the index")
    }
}

/// Logistic model `sigma(b'x)`; its plug-in label is `1{b'x >= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLogit<T> {
    pub coefficients: Vec<T>,
}

impl<T: Scalar> LinearLogit<T> {
    pub fn margin(&self, x: &[T]) -> T {
        self.coefficients.iter().zip(x).map(|(&b, &v)| b * v).sum()
    }
}

impl<T: Scalar> RegressionEstimate<T> for LinearLogit<T> {
    fn estimate(&self, x: &[T]) -> T {
        sigmoid(self.margin(x))
    }

    fn estimate_with_label(&self, x: &[T]) -> (T, Label) {
        let m = self.margin(x);
        (sigmoid(m), Label::from(m >= T::zero()))
    }
}

/// Plug-in classifier of a regression estimate.
#[derive(Debug, Clone)]
pub struct PlugInRule<E>(pub E);

impl<T: Scalar, E: RegressionEstimate<T>> DecisionRule<T> for PlugInRule<E> {
    fn predict(&self, x: &[T]) -> Label {
        self.0.estimate_with_label(x).1
    }
}

/// TAB decision: the target plug-in label when `|eta_hat_q - 1/2| >= tau`,
/// the source label otherwise.
#[inline]
pub fn tab_predict<T: Scalar>(eta_hat_q: T, tau: T, source_label: Label) -> Label {
    tab_combine(eta_hat_q, plug_in(eta_hat_q), tau, source_label)
}

#[inline]
pub(crate) fn tab_combine<T: Scalar>(eta_hat_q: T, target_label: Label, tau: T, source_label: Label) -> Label {
    if (eta_hat_q - T::half()).abs() >= tau {
        target_label
    } else {
        source_label
    }
}

/// Target regression estimate, threshold and source rule combined by the TAB rule.
#[derive(Clone)]
pub struct TabClassifier<T> {
    target: Arc<dyn RegressionEstimate<T>>,
    tau: T,
    source: Arc<dyn DecisionRule<T>>,
}

impl<T: Scalar> TabClassifier<T> {
    pub fn new(target: Arc<dyn RegressionEstimate<T>>, tau: T, source: Arc<dyn DecisionRule<T>>) -> Result<Self> {
        if !(tau >= T::zero()) {
            return Err(domain("tau must be >= 0"));
        }
        Ok(Self { target, tau, source })
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// Whether `x` is deferred to the source rule.
    pub fn defers_to_source(&self, x: &[T]) -> bool {
        (self.target.estimate(x) - T::half()).abs() < self.tau
    }
}

impl<T: Scalar> DecisionRule<T> for TabClassifier<T> {
    fn predict(&self, x: &[T]) -> Label {
        let (e, target_label) = self.target.estimate_with_label(x);
        if (e - T::half()).abs() >= self.tau {
            target_label
        } else {
            self.source.predict(x)
        }
    }
}

/// Weights `(w_q, w_p)` with `w_q + w_p = 1` and
/// `w_p / w_q = (n_Q + n_P^((2 beta + d)/(2 gamma beta + d)))^((gamma - 1) beta / (2 beta + d))`.
pub fn weighted_scheme<T: Scalar>(n_q: usize, n_p: usize, beta: T, gamma: T, d: usize) -> (T, T) {
    let one = T::one();
    let two = one + one;
    let d = T::of(d as f64);
    let inner = T::of(n_q as f64) + T::of(n_p as f64).powf((two * beta + d) / (two * gamma * beta + d));
    let ratio = inner.powf((gamma - one) * beta / (two * beta + d));
    // the larger weight is computed directly so that the complement is exact
    if ratio <= one {
        let w_q = one / (one + ratio);
        (w_q, one - w_q)
    } else {
        let w_p = ratio / (one + ratio);
        (one - w_p, w_p)
    }
}

/// `1{w_q eta_hat_Q(x) + w_p eta_hat_P(x) >= 1/2}`.
#[derive(Debug, Clone)]
pub struct WeightedKnnClassifier<T> {
    pub target: KnnRegressor<T>,
    pub source: KnnRegressor<T>,
    pub w_q: T,
    pub w_p: T,
}

impl<T: Scalar> WeightedKnnClassifier<T> {
    pub fn new(target: KnnRegressor<T>, source: KnnRegressor<T>, w_q: T, w_p: T) -> Result<Self> {
        if !(w_q >= T::zero() && w_p >= T::zero()) || w_q + w_p != T::one() {
            return Err(domain("weights must be nonnegative and sum to one"));
        }
        Ok(Self {
            target,
            source,
            w_q,
            w_p,
        })
    }

    #[inline]
    pub fn combine(&self, eta_q: T, eta_p: T) -> Label {
        plug_in(self.w_q * eta_q + self.w_p * eta_p)
    }
}

impl<T: Scalar> DecisionRule<T> for WeightedKnnClassifier<T> {
    fn predict(&self, x: &[T]) -> Label {
        let eq = RegressionEstimate::estimate(&self.target, x);
        let ep = RegressionEstimate::estimate(&self.source, x);
        self.combine(eq, ep)
    }
}

/// Optional replacements for the rate-driven K-NN parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnOverrides<T> {
    pub k_q: Option<usize>,
    pub k_p: Option<usize>,
    pub tau: Option<T>,
    pub c_q: f64,
    pub c_p: f64,
    pub c_tau: f64,
}

impl<T> Default for KnnOverrides<T> {
    fn default() -> Self {
        Self {
            k_q: None,
            k_p: None,
            tau: None,
            c_q: 1.0,
            c_p: 1.0,
            c_tau: 1.0,
        }
    }
}

/// Fitted TAB K-NN classifier and the parameters it used.
#[derive(Clone)]
pub struct TabKnnFit<T> {
    pub rule: TabClassifier<T>,
    pub target: KnnRegressor<T>,
    pub source: KnnRegressor<T>,
    pub k_q: usize,
    pub k_p: usize,
    pub tau: T,
}

fn resolve_ks<T: Scalar>(
    n_q: usize,
    n_p: usize,
    params: &ProblemParams<T>,
    overrides: &KnnOverrides<T>,
) -> (usize, usize) {
    let beta = params.beta.to_f64_lossy();
    let gamma = params.gamma.to_f64_lossy();
    let k_q = overrides
        .k_q
        .unwrap_or_else(|| select_k_target(n_q, beta, params.d, overrides.c_q));
    let k_p = overrides
        .k_p
        .unwrap_or_else(|| select_k_source(n_p, gamma, beta, params.d, overrides.c_p));
    (k_q, k_p)
}

fn check_nonempty<T: Scalar>(dq: &LabeledSample<T>, dp: &LabeledSample<T>) -> Result<()> {
    if dq.is_empty() {
        return Err(Error::Empty("target sample"));
    }
    if dp.is_empty() {
        return Err(Error::Empty("source sample"));
    }
    Ok(())
}

/// TAB K-NN: target estimate `eta_hat_Q` with `k_Q` neighbours, source rule
/// `1{eta_hat_P >= 1/2}` with `k_P` neighbours.
pub fn fit_tab_knn<T: Scalar>(
    dq: &LabeledSample<T>,
    dp: &LabeledSample<T>,
    params: &ProblemParams<T>,
    overrides: &KnnOverrides<T>,
) -> Result<TabKnnFit<T>> {
    check_nonempty(dq, dp)?;
    let (k_q, k_p) = resolve_ks(dq.len(), dp.len(), params, overrides);
    let target = KnnRegressor::fit(dq, k_q)?;
    let source = KnnRegressor::fit(dp, k_p)?;
    let tau = overrides
        .tau
        .unwrap_or_else(|| T::of(select_tau_nonparam(dq.len(), dp.len(), k_q, overrides.c_tau)));
    let rule = TabClassifier::new(
        Arc::new(target.clone()),
        tau,
        Arc::new(PlugInRule(source.clone())),
    )?;
    Ok(TabKnnFit {
        rule,
        target,
        source,
        k_q,
        k_p,
        tau,
    })
}

/// Weighted K-NN with the rate-optimal weights.
pub fn fit_weighted_knn<T: Scalar>(
    dq: &LabeledSample<T>,
    dp: &LabeledSample<T>,
    params: &ProblemParams<T>,
    overrides: &KnnOverrides<T>,
) -> Result<WeightedKnnClassifier<T>> {
    check_nonempty(dq, dp)?;
    let (k_q, k_p) = resolve_ks(dq.len(), dp.len(), params, overrides);
    let (w_q, w_p) = weighted_scheme(dq.len(), dp.len(), params.beta, params.gamma, params.d);
    WeightedKnnClassifier::new(KnnRegressor::fit(dq, k_q)?, KnnRegressor::fit(dp, k_p)?, w_q, w_p)
}

/// Default pooled-CV grid: up to 15 geometrically spaced odd values in `[1, 2 sqrt(n)]`.
pub fn default_k_grid(n: usize) -> Vec<usize> {
    let top = (2.0 * (n as f64).sqrt()).max(1.0);
    let mut grid: Vec<usize> = (0..15)
        .map(|i| {
            let v = top.powf(i as f64 / 14.0);
            let odd = 2.0 * ((v - 1.0) / 2.0).round() + 1.0;
            (odd as usize).max(1)
        })
        .filter(|&k| k as f64 <= top.max(1.0))
        .collect();
    grid.dedup();
    grid
}

/// Pooled K-NN with `k` chosen by cross-validated misclassification.
#[derive(Debug, Clone)]
pub struct PooledKnnFit<T> {
    pub regressor: KnnRegressor<T>,
    pub k: usize,
    /// `(k, mean CV misclassification)` for every admissible grid value.
    pub cv_errors: Vec<(usize, f64)>,
}

impl<T: Scalar> DecisionRule<T> for PooledKnnFit<T> {
    fn predict(&self, x: &[T]) -> Label {
        plug_in(RegressionEstimate::estimate(&self.regressor, x))
    }
}

/// K-NN on `dq ++ dp`; ties in CV error go to the smaller `k`.
pub fn fit_pooled_knn_cv<T: Scalar>(
    dq: &LabeledSample<T>,
    dp: &LabeledSample<T>,
    folds: usize,
    k_grid: &[usize],
    seed: u64,
) -> Result<PooledKnnFit<T>> {
    if k_grid.is_empty() {
        return Err(Error::Empty("k grid"));
    }
    let pooled = dq.concat(dp)?;
    let n = pooled.len();
    if folds < 2 || n < folds {
        return Err(domain(format!("cannot run {folds}-fold CV on {n} points")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let min_train = n - n.div_ceil(folds);
    let mut grid: Vec<usize> = k_grid.iter().copied().filter(|&k| k >= 1 && k <= min_train).collect();
    grid.sort_unstable();
    grid.dedup();
    let k_max = *grid.last().ok_or_else(|| domain("no grid value fits the CV training size"))?;

    let mut err_sum = vec![0.0; grid.len()];
    let mut nbrs: Vec<Neighbor<T>> = Vec::new();
    for f in 0..folds {
        let (valid, train): (Vec<usize>, Vec<usize>) = order.iter().enumerate().fold(
            (Vec::new(), Vec::new()),
            |(mut v, mut t), (pos, &i)| {
                if pos % folds == f {
                    v.push(i)
                } else {
                    t.push(i)
                }
                (v, t)
            },
        );
        let train_sample = pooled.subset(&train);
        let index = NeighborIndex::from_flat(train_sample.dim(), train_sample.coords())?;
        let labels = train_sample.labels();
        let mut wrong = vec![0usize; grid.len()];
        for &i in &valid {
            index.k_nearest_into(pooled.point(i), k_max, &mut nbrs)?;
            let y = pooled.labels()[i];
            let mut hits = 0usize;
            let mut gi = 0;
            for (rank, nb) in nbrs.iter().enumerate() {
                hits += usize::from(labels[nb.index]);
                while gi < grid.len() && grid[gi] == rank + 1 {
                    let pred = Label::from(2 * hits >= grid[gi]);
                    wrong[gi] += usize::from(pred != y);
                    gi += 1;
                }
            }
        }
        for (acc, w) in err_sum.iter_mut().zip(&wrong) {
            *acc += *w as f64 / valid.len() as f64;
        }
    }
    let cv_errors: Vec<(usize, f64)> = grid
        .iter()
        .zip(&err_sum)
        .map(|(&k, &e)| (k, e / folds as f64))
        .collect();
    let (k, _) = cv_errors
        .iter()
        .copied()
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(PooledKnnFit {
        regressor: KnnRegressor::fit(&pooled, k)?,
        k,
        cv_errors,
    })
}

/// How lasso penalties are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSelection {
    /// K-fold CV with the one-standard-error rule on a geometric grid.
    CrossValidated { folds: usize, grid_len: usize, seed: u64 },
    /// `lambda = c sqrt(ln d / n)`.
    Theory { c: f64 },
    Fixed(f64),
}

impl Default for LambdaSelection {
    fn default() -> Self {
        LambdaSelection::CrossValidated {
            folds: 5,
            grid_len: 30,
            seed: 0,
        }
    }
}

/// A lasso-logistic fit on one sample with its selected penalty.
#[derive(Debug, Clone)]
pub struct LassoFit<T> {
    pub fit: LogisticLassoFit<T>,
    pub lambda: T,
}

impl<T: Scalar> LassoFit<T> {
    pub fn model(&self) -> LinearLogit<T> {
        LinearLogit {
            coefficients: self.fit.coefficients.clone(),
        }
    }

    /// `x -> 1{b'x >= 0}`.
    pub fn rule(&self) -> PlugInRule<LinearLogit<T>> {
        PlugInRule(self.model())
    }
}

/// Fits a lasso-logistic model to one sample.
pub fn fit_lasso<T: Scalar>(
    sample: &LabeledSample<T>,
    selection: LambdaSelection,
    opts: &FitOptions<T>,
) -> Result<LassoFit<T>> {
    if sample.is_empty() {
        return Err(Error::Empty("lasso training sample"));
    }
    let xs = DesignMatrix::from_sample(sample)?;
    let ys = sample.labels();
    match selection {
        LambdaSelection::CrossValidated { folds, grid_len, seed } => {
            let grid = lambda_grid(&xs, ys, grid_len)?;
            let sel = cv_lambda_1se(&xs, ys, folds, &grid, seed, opts)?;
            // walk the path down to the chosen value for warm starts
            let mut path = fit_path(&xs, ys, &grid.values[..=sel.index], opts)?;
            let fit = path.pop().expect("path is nonempty");
            Ok(LassoFit { lambda: sel.lambda, fit })
        }
        LambdaSelection::Theory { c } => {
            let lambda = T::of(select_lambda_theory(sample.len(), sample.dim(), c));
            Ok(LassoFit {
                fit: fit_logistic_lasso(&xs, ys, lambda, opts)?,
                lambda,
            })
        }
        LambdaSelection::Fixed(l) => {
            let lambda = T::of(l);
            Ok(LassoFit {
                fit: fit_logistic_lasso(&xs, ys, lambda, opts)?,
                lambda,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoTabOptions<T> {
    pub selection: LambdaSelection,
    pub tau: Option<T>,
    pub c_tau: f64,
    pub fit: FitOptions<T>,
}

impl<T: Scalar> Default for LassoTabOptions<T> {
    fn default() -> Self {
        Self {
            selection: LambdaSelection::default(),
            tau: None,
            c_tau: 1.0,
            fit: FitOptions::default(),
        }
    }
}

/// Fitted TAB lasso classifier.
#[derive(Clone)]
pub struct TabLassoFit<T> {
    pub rule: TabClassifier<T>,
    pub target: LassoFit<T>,
    pub source: LassoFit<T>,
    pub tau: T,
}

fn source_selection(sel: LambdaSelection) -> LambdaSelection {
    match sel {
        LambdaSelection::CrossValidated { folds, grid_len, seed } => LambdaSelection::CrossValidated {
            folds,
            grid_len,
            seed: seed.wrapping_add(0x9E37_79B9),
        },
        other => other,
    }
}

/// TAB lasso: target estimate `sigma(b_Q'x)`, source rule `1{b_P'x >= 0}`.
pub fn fit_tab_logistic<T: Scalar>(
    dq: &LabeledSample<T>,
    dp: &LabeledSample<T>,
    s: usize,
    opts: &LassoTabOptions<T>,
) -> Result<TabLassoFit<T>> {
    check_nonempty(dq, dp)?;
    let target = fit_lasso(dq, opts.selection, &opts.fit)?;
    let source = fit_lasso(dp, source_selection(opts.selection), &opts.fit)?;
    tab_from_lasso_fits(target, source, dq.len(), dp.len(), s, dq.dim(), opts)
}

/// Assembles the TAB lasso rule from two existing fits.
pub fn tab_from_lasso_fits<T: Scalar>(
    target: LassoFit<T>,
    source: LassoFit<T>,
    n_q: usize,
    n_p: usize,
    s: usize,
    d: usize,
    opts: &LassoTabOptions<T>,
) -> Result<TabLassoFit<T>> {
    let tau = opts
        .tau
        .unwrap_or_else(|| T::of(select_tau_logistic(n_q, n_p, s, d, opts.c_tau)));
    let rule = TabClassifier::new(Arc::new(target.model()), tau, Arc::new(source.rule()))?;
    Ok(TabLassoFit {
        rule,
        target,
        source,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstantRule, Origin};

    #[test]
    fn tab_predict_examples() {
        assert_eq!(tab_predict(0.9, 0.05, 0), 1);
        assert_eq!(tab_predict(0.52, 0.05, 0), 0);
        assert_eq!(tab_predict(0.45, 0.10, 1), 1);
        // boundary goes to the target branch
        assert_eq!(tab_predict(0.25, 0.25, 1), 0);
    }

    #[test]
    fn weighted_scheme_examples() {
        assert_eq!(weighted_scheme(200, 1000, 1.0, 1.0, 2), (0.5, 0.5));
        let (wq, wp) = weighted_scheme(200, 1000, 1.0, 0.5, 2);
        assert_eq!(wq + wp, 1.0);
        assert!((wp / wq - 10200f64.powf(-0.125)).abs() < 1e-12);
        assert!((wq - 0.7602).abs() < 1e-4 && (wp - 0.2398).abs() < 1e-4);
        let (_, far) = weighted_scheme(200, 100_000_000, 1.0, 0.5, 2);
        assert!(far < 0.06);
        let (wq, wp) = weighted_scheme(200, 1000, 1.0, 2.0, 2);
        assert!(wp > wq);
        assert_eq!(wq + wp, 1.0);
    }

    fn grid_sample(labels: impl Fn(usize) -> Label, origin: Origin) -> LabeledSample<f64> {
        let mut coords = Vec::new();
        let mut ys = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                coords.push(i as f64 / 10.0 + 0.013 * j as f64);
                coords.push(j as f64 / 10.0 + 0.007 * i as f64);
                ys.push(labels(i * 10 + j));
            }
        }
        LabeledSample::from_flat(2, coords, ys, origin).unwrap()
    }

    #[test]
    fn weighted_with_zero_source_weight_is_target_plug_in() {
        let dq = grid_sample(|i| Label::from(i % 3 == 0), Origin::Target);
        let dp = grid_sample(|i| Label::from(i % 2 == 0), Origin::Source);
        let q = KnnRegressor::fit(&dq, 5).unwrap();
        let p = KnnRegressor::fit(&dp, 7).unwrap();
        let w = WeightedKnnClassifier::new(q.clone(), p.clone(), 1.0, 0.0).unwrap();
        let same = WeightedKnnClassifier::new(q.clone(), q.clone(), 0.3, 0.7).unwrap();
        let plug = PlugInRule(q);
        for i in 0..50 {
            let x = [i as f64 / 50.0, (i * 7 % 50) as f64 / 50.0];
            assert_eq!(w.predict(&x), plug.predict(&x));
            assert_eq!(same.predict(&x), plug.predict(&x));
        }
        assert!(WeightedKnnClassifier::new(KnnRegressor::fit(&dq, 3).unwrap(), p, 0.7, 0.7).is_err());
    }

    #[test]
    fn tab_knn_degenerates() {
        let dq = grid_sample(|i| Label::from(i % 3 == 0), Origin::Target);
        let dp = grid_sample(|i| Label::from(i % 2 == 0), Origin::Source);
        let params = ProblemParams::default();
        let zero = fit_tab_knn(&dq, &dp, &params, &KnnOverrides { tau: Some(0.0), ..Default::default() }).unwrap();
        let big = fit_tab_knn(&dq, &dp, &params, &KnnOverrides { tau: Some(0.6), ..Default::default() }).unwrap();
        let q_rule = PlugInRule(zero.target.clone());
        let p_rule = PlugInRule(big.source.clone());
        for i in 0..200 {
            let x = [(i % 20) as f64 / 20.0, (i / 20) as f64 / 10.0];
            assert_eq!(zero.rule.predict(&x), q_rule.predict(&x));
            assert_eq!(big.rule.predict(&x), p_rule.predict(&x));
        }
        assert_eq!(zero.k_q, 10);
        assert_eq!(zero.k_p, 10);
    }

    #[test]
    fn tab_knn_rejects_oversized_k() {
        let dq = grid_sample(|_| 1, Origin::Target);
        let dp = grid_sample(|_| 0, Origin::Source);
        let o = KnnOverrides {
            k_q: Some(101),
            ..Default::default()
        };
        assert!(matches!(
            fit_tab_knn(&dq, &dp, &ProblemParams::default(), &o),
            Err(Error::TooFewPoints { .. })
        ));
        let empty = LabeledSample::empty(2, Origin::Source);
        assert!(fit_tab_knn(&dq, &empty, &ProblemParams::default(), &KnnOverrides::default()).is_err());
    }

    #[test]
    fn pooled_cv_edge_cases() {
        let dq = grid_sample(|i| Label::from(i % 4 == 0), Origin::Target);
        let empty = LabeledSample::empty(2, Origin::Source);
        let fit = fit_pooled_knn_cv(&dq, &empty, 5, &[7], 3).unwrap();
        assert_eq!(fit.k, 7);
        let plain = PlugInRule(KnnRegressor::fit(&dq, 7).unwrap());
        for i in 0..40 {
            let x = [i as f64 / 40.0, 0.5];
            assert_eq!(fit.predict(&x), plain.predict(&x));
        }
        assert!(fit_pooled_knn_cv(&dq, &empty, 5, &[], 3).is_err());
        let multi = fit_pooled_knn_cv(&dq, &empty, 5, &[1, 3, 5, 9, 15], 3).unwrap();
        let best = multi.cv_errors.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        let first = multi.cv_errors.iter().find(|e| e.1 == best).unwrap();
        assert_eq!(multi.k, first.0);
    }

    #[test]
    fn default_grid_is_odd_and_bounded() {
        let g = default_k_grid(1200);
        assert!(g.len() >= 10 && g.len() <= 15);
        assert_eq!(g[0], 1);
        assert!(g.iter().all(|k| k % 2 == 1 && (*k as f64) <= 2.0 * 1200f64.sqrt()));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn linear_logit_label_uses_margin_sign() {
        let m = LinearLogit {
            coefficients: vec![0.0, 0.0],
        };
        assert_eq!(m.estimate_with_label(&[1.0, -2.0]), (0.5, 1));
        let tab = TabClassifier::new(Arc::new(m), 0.0, Arc::new(ConstantRule(0))).unwrap();
        assert_eq!(tab.predict(&[3.0, 3.0]), 1);
        assert!(TabClassifier::<f64>::new(
            Arc::new(LinearLogit { coefficients: vec![1.0] }),
            -0.1,
            Arc::new(ConstantRule(0))
        )
        .is_err());
    }
}
