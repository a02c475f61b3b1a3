//! L1-penalised logistic regression without intercept,
//!
//! `min_b (1/n) sum_i [ln(1 + exp(x_i' b)) - y_i x_i' b] + lambda ||b||_1`,
//!
//! solved by proximal gradient descent (soft-thresholding) with Barzilai–Borwein
//! trial steps and a backtracking line search on the quadratic upper model, so
//! the objective never increases between iterations. Convergence is certified
//! by the KKT residual of the returned iterate.

use rand::seq::SliceRandom;

use crate::error::{domain, Error, Result};
use crate::model::{Label, LabeledSample};
use crate::rng::rng_from_seed;
use crate::scalar::{sigmoid, softplus, Scalar};

/// Dense `n × d` design matrix kept in both row- and column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix<T> {
    n: usize,
    d: usize,
    rows: Vec<T>,
    cols: Vec<T>,
}

impl<T: Scalar> DesignMatrix<T> {
    pub fn from_row_major(n: usize, d: usize, rows: Vec<T>) -> Result<Self> {
        if rows.len() != n * d {
            return Err(Error::Dimension {
                expected: n * d,
                got: rows.len(),
            });
        }
        if d == 0 {
            return Err(domain("design must have at least one column"));
        }
        let mut cols = vec![T::zero(); n * d];
        for i in 0..n {
            for j in 0..d {
                cols[j * n + i] = rows[i * d + j];
            }
        }
        Ok(Self { n, d, rows, cols })
    }

    pub fn from_sample(sample: &LabeledSample<T>) -> Result<Self> {
        Self::from_row_major(sample.len(), sample.dim(), sample.coords().to_vec())
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.rows[i * self.d..(i + 1) * self.d]
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut rows = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            rows.extend_from_slice(self.row(i));
        }
        Self::from_row_major(idx.len(), self.d, rows).expect("consistent shape")
    }

    /// `X b`, skipping zero coefficients.
    pub fn margins(&self, beta: &[T]) -> Vec<T> {
        let mut m = vec![T::zero(); self.n];
        for (j, &b) in beta.iter().enumerate() {
            if b != T::zero() {
                for (mi, &x) in m.iter_mut().zip(self.col(j)) {
                    *mi += b * x;
                }
            }
        }
        m
    }

    /// `X' r`.
    pub fn transpose_times(&self, r: &[T]) -> Vec<T> {
        (0..self.d)
            .map(|j| self.col(j).iter().zip(r).map(|(&x, &ri)| x * ri).sum())
            .collect()
    }
}

fn check_shapes<T: Scalar>(beta: &[T], xs: &DesignMatrix<T>, ys: &[Label]) -> Result<()> {
    if beta.len() != xs.ncols() {
        return Err(Error::Dimension {
            expected: xs.ncols(),
            got: beta.len(),
        });
    }
    if ys.len() != xs.nrows() {
        return Err(Error::Dimension {
            expected: xs.nrows(),
            got: ys.len(),
        });
    }
    if xs.nrows() == 0 {
        return Err(Error::Empty("design rows"));
    }
    Ok(())
}

fn loss_from_margins<T: Scalar>(m: &[T], ys: &[Label]) -> T {
    let n = T::of(m.len() as f64);
    let total: T = m
        .iter()
        .zip(ys)
        .map(|(&t, &y)| if y == 1 { softplus(t) - t } else { softplus(t) })
        .sum();
    total / n
}

fn gradient_from_margins<T: Scalar>(xs: &DesignMatrix<T>, m: &[T], ys: &[Label]) -> Vec<T> {
    let n = T::of(m.len() as f64);
    let r: Vec<T> = m
        .iter()
        .zip(ys)
        .map(|(&t, &y)| (sigmoid(t) - T::of(f64::from(y))) / n)
        .collect();
    xs.transpose_times(&r)
}

fn l1<T: Scalar>(beta: &[T]) -> T {
    beta.iter().map(|b| b.abs()).sum()
}

/// Smooth part `(1/n) sum_i [ln(1 + e^{x_i'b}) - y_i x_i'b]`.
pub fn loss<T: Scalar>(beta: &[T], xs: &DesignMatrix<T>, ys: &[Label]) -> Result<T> {
    check_shapes(beta, xs, ys)?;
    Ok(loss_from_margins(&xs.margins(beta), ys))
}

/// Penalised objective.
pub fn objective<T: Scalar>(beta: &[T], xs: &DesignMatrix<T>, ys: &[Label], lambda: T) -> Result<T> {
    Ok(loss(beta, xs, ys)? + lambda * l1(beta))
}

/// Gradient of the smooth part, `(1/n) sum_i (sigma(x_i'b) - y_i) x_i`.
pub fn loss_gradient<T: Scalar>(beta: &[T], xs: &DesignMatrix<T>, ys: &[Label]) -> Result<Vec<T>> {
    check_shapes(beta, xs, ys)?;
    Ok(gradient_from_margins(xs, &xs.margins(beta), ys))
}

/// Largest violation of the lasso optimality conditions given the smooth gradient.
pub fn kkt_residual<T: Scalar>(beta: &[T], grad: &[T], lambda: T) -> T {
    beta.iter()
        .zip(grad)
        .map(|(&b, &g)| {
            if b == T::zero() {
                (g.abs() - lambda).max(T::zero())
            } else {
                (g + lambda * b.signum()).abs()
            }
        })
        .fold(T::zero(), T::max)
}

/// Recomputes the KKT residual of `beta` from scratch.
pub fn verify_kkt<T: Scalar>(beta: &[T], xs: &DesignMatrix<T>, ys: &[Label], lambda: T) -> Result<T> {
    let g = loss_gradient(beta, xs, ys)?;
    Ok(kkt_residual(beta, &g, lambda))
}

#[inline]
fn soft_threshold<T: Scalar>(v: T, thr: T) -> T {
    if v > thr {
        v - thr
    } else if v < -thr {
        v + thr
    } else {
        T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions<T> {
    /// Target KKT residual.
    pub tol: T,
    pub max_iter: usize,
    /// Keep the objective value of every iterate.
    pub record_trace: bool,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::of(1e-6),
            max_iter: 100_000,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticLassoFit<T> {
    pub coefficients: Vec<T>,
    pub lambda: T,
    pub iterations: usize,
    pub objective: T,
    pub kkt_residual: T,
    pub converged: bool,
    /// Objective per iterate (starting point first) when requested.
    pub trace: Option<Vec<T>>,
}

impl<T: Scalar> LogisticLassoFit<T> {
    pub fn margin(&self, x: &[T]) -> T {
        self.coefficients.iter().zip(x).map(|(&b, &v)| b * v).sum()
    }

    pub fn probability(&self, x: &[T]) -> T {
        sigmoid(self.margin(x))
    }

    pub fn nonzeros(&self) -> usize {
        self.coefficients.iter().filter(|b| **b != T::zero()).count()
    }
}

/// Fits from the zero vector.
pub fn fit_logistic_lasso<T: Scalar>(
    xs: &DesignMatrix<T>,
    ys: &[Label],
    lambda: T,
    opts: &FitOptions<T>,
) -> Result<LogisticLassoFit<T>> {
    fit_logistic_lasso_from(xs, ys, lambda, opts, &vec![T::zero(); xs.ncols()])
}

/// Fits starting from `start` (warm start).
pub fn fit_logistic_lasso_from<T: Scalar>(
    xs: &DesignMatrix<T>,
    ys: &[Label],
    lambda: T,
    opts: &FitOptions<T>,
    start: &[T],
) -> Result<LogisticLassoFit<T>> {
    check_shapes(start, xs, ys)?;
    if ys.iter().any(|&y| y > 1) {
        return Err(domain("labels must be 0 or 1"));
    }
    if !(lambda >= T::zero()) || !(opts.tol > T::zero()) || opts.max_iter == 0 {
        return Err(domain("need lambda >= 0, tol > 0 and max_iter >= 1"));
    }
    let n = T::of(xs.nrows() as f64);
    let slack = T::of(16.0) * T::epsilon();

    let mut beta = start.to_vec();
    let mut margins = xs.margins(&beta);
    let mut f = loss_from_margins(&margins, ys);
    let mut grad = gradient_from_margins(xs, &margins, ys);
    let mut obj = f + lambda * l1(&beta);
    let mut trace = opts.record_trace.then(|| vec![obj]);

    // 1 / (||X||_F^2 / (4n)) bounds the inverse Lipschitz constant from below
    let frob: T = xs.rows.iter().map(|&v| v * v).sum();
    let mut step = if frob > T::zero() {
        T::of(4.0) * n / frob
    } else {
        T::one()
    };
    let (step_min, step_max) = (T::of(1e-12), T::of(1e12));

    let mut kkt = kkt_residual(&beta, &grad, lambda);
    let mut iterations = 0;
    let mut trial = vec![T::zero(); beta.len()];
    while kkt > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let (new_margins, new_f) = loop {
            for ((t, &b), &g) in trial.iter_mut().zip(&beta).zip(&grad) {
                *t = soft_threshold(b - step * g, step * lambda);
            }
            let m = xs.margins(&trial);
            let fm = loss_from_margins(&m, ys);
            let mut lin = T::zero();
            let mut sq = T::zero();
            for ((&t, &b), &g) in trial.iter().zip(&beta).zip(&grad) {
                let dlt = t - b;
                lin += g * dlt;
                sq += dlt * dlt;
            }
            let model = f + lin + sq / (step + step);
            if fm <= model + slack * f.abs().max(T::one()) || step <= step_min {
                break (m, fm);
            }
            step = step * T::half();
        };
        let new_grad = gradient_from_margins(xs, &new_margins, ys);

        // Barzilai–Borwein trial step for the next iteration
        let mut ss = T::zero();
        let mut sy = T::zero();
        for i in 0..beta.len() {
            let s = trial[i] - beta[i];
            ss += s * s;
            sy += s * (new_grad[i] - grad[i]);
        }
        step = if sy > T::zero() && ss > T::zero() {
            (ss / sy).max(step_min).min(step_max)
        } else {
            (step + step).min(step_max)
        };

        std::mem::swap(&mut beta, &mut trial);
        margins = new_margins;
        f = new_f;
        grad = new_grad;
        obj = f + lambda * l1(&beta);
        if let Some(tr) = trace.as_mut() {
            tr.push(obj);
        }
        kkt = kkt_residual(&beta, &grad, lambda);
        if ss == T::zero() && step <= step_min {
            break;
        }
    }
    let _ = margins;
    Ok(LogisticLassoFit {
        coefficients: beta,
        lambda,
        iterations,
        objective: obj,
        kkt_residual: kkt,
        converged: kkt <= opts.tol,
        trace,
    })
}

/// Decreasing penalty grid, optionally carrying cross-validation errors.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPath<T> {
    pub values: Vec<T>,
    pub cv_mean: Option<Vec<T>>,
    pub cv_se: Option<Vec<T>>,
}

impl<T: Scalar> LambdaPath<T> {
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("lambda grid"));
        }
        if values.windows(2).any(|w| !(w[0] > w[1])) || values.iter().any(|v| !(*v >= T::zero())) {
            return Err(domain("lambda grid must be nonnegative and strictly decreasing"));
        }
        Ok(Self {
            values,
            cv_mean: None,
            cv_se: None,
        })
    }
}

/// `||grad loss(0)||_inf`, the smallest penalty with an all-zero solution.
pub fn lambda_max<T: Scalar>(xs: &DesignMatrix<T>, ys: &[Label]) -> Result<T> {
    let g = loss_gradient(&vec![T::zero(); xs.ncols()], xs, ys)?;
    Ok(g.iter().fold(T::zero(), |a, v| a.max(v.abs())))
}

/// Geometric grid of `count` values from `lambda_max` down to `1e-3 lambda_max`.
pub fn lambda_grid<T: Scalar>(xs: &DesignMatrix<T>, ys: &[Label], count: usize) -> Result<LambdaPath<T>> {
    if count < 2 {
        return Err(domain("lambda grid needs at least two values"));
    }
    let top = lambda_max(xs, ys)?;
    if !(top > T::zero()) {
        return Err(domain("degenerate design: gradient at zero vanishes"));
    }
    let ratio = T::of(1e-3);
    let last = T::of((count - 1) as f64);
    let values = (0..count)
        .map(|i| {
            if i == 0 {
                top
            } else {
                top * ratio.powf(T::of(i as f64) / last)
            }
        })
        .collect();
    LambdaPath::from_values(values)
}

/// Fits every value of `grid` in order, warm-starting each from the previous.
pub fn fit_path<T: Scalar>(
    xs: &DesignMatrix<T>,
    ys: &[Label],
    grid: &[T],
    opts: &FitOptions<T>,
) -> Result<Vec<LogisticLassoFit<T>>> {
    let mut start = vec![T::zero(); xs.ncols()];
    let mut fits = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let fit = fit_logistic_lasso_from(xs, ys, lambda, opts, &start)?;
        start.clone_from(&fit.coefficients);
        fits.push(fit);
    }
    Ok(fits)
}

/// Outcome of cross-validated penalty selection.
#[derive(Debug, Clone, PartialEq)]
pub struct CvSelection<T> {
    pub lambda: T,
    pub index: usize,
    /// The grid with per-value mean validation error and its standard error.
    pub path: LambdaPath<T>,
}

/// K-fold cross-validation with the one-standard-error rule.
///
/// Validation error is the mean squared difference between `sigma(x'b)` and
/// the label. Returns the largest penalty whose mean error is within one
/// standard error of the minimum.
pub fn cv_lambda_1se<T: Scalar>(
    xs: &DesignMatrix<T>,
    ys: &[Label],
    folds: usize,
    grid: &LambdaPath<T>,
    seed: u64,
    opts: &FitOptions<T>,
) -> Result<CvSelection<T>> {
    let n = xs.nrows();
    if folds < 2 {
        return Err(domain("need at least two folds"));
    }
    if n < folds {
        return Err(domain(format!("{n} rows cannot be split into {folds} folds")));
    }
    if ys.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: ys.len(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));

    let g = grid.values.len();
    let mut fold_err = vec![vec![T::zero(); folds]; g];
    for f in 0..folds {
        let (valid, train): (Vec<usize>, Vec<usize>) = order
            .iter()
            .enumerate()
            .map(|(pos, &i)| (pos % folds == f, i))
            .fold((Vec::new(), Vec::new()), |(mut v, mut t), (is_valid, i)| {
                if is_valid {
                    v.push(i);
                } else {
                    t.push(i);
                }
                (v, t)
            });
        let xt = xs.select_rows(&train);
        let yt: Vec<Label> = train.iter().map(|&i| ys[i]).collect();
        let fits = fit_path(&xt, &yt, &grid.values, opts)?;
        for (li, fit) in fits.iter().enumerate() {
            let se: T = valid
                .iter()
                .map(|&i| {
                    let r = fit.probability(xs.row(i)) - T::of(f64::from(ys[i]));
                    r * r
                })
                .sum();
            fold_err[li][f] = se / T::of(valid.len() as f64);
        }
    }

    let k = T::of(folds as f64);
    let mut means = Vec::with_capacity(g);
    let mut ses = Vec::with_capacity(g);
    for errs in &fold_err {
        let mean = errs.iter().copied().sum::<T>() / k;
        let var = errs.iter().map(|&e| (e - mean) * (e - mean)).sum::<T>() / (k - T::one());
        means.push(mean);
        ses.push((var / k).sqrt());
    }
    let mut best = 0;
    for i in 1..g {
        if means[i] < means[best] {
            best = i;
        }
    }
    let threshold = means[best] + ses[best];
    // grid is decreasing: the first index within the threshold is the largest lambda
    let index = (0..g).find(|&i| means[i] <= threshold).unwrap_or(best);
    Ok(CvSelection {
        lambda: grid.values[index],
        index,
        path: LambdaPath {
            values: grid.values.clone(),
            cv_mean: Some(means),
            cv_se: Some(ses),
        },
    })
}

/// `lambda = c sqrt(ln d / n)`; zero when `d = 1`.
pub fn select_lambda_theory(n: usize, d: usize, c: f64) -> f64 {
    c * ((d as f64).ln() / n as f64).sqrt()
}

/// `tau = c_tau sqrt(s ln d / n_Q) ln(max(n_Q, n_P))`.
pub fn select_tau_logistic(n_q: usize, n_p: usize, s: usize, d: usize, c_tau: f64) -> f64 {
    c_tau * (s as f64 * (d as f64).ln() / n_q as f64).sqrt() * (n_q.max(n_p) as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;
    use rand_distr::StandardNormal;

    fn design(rows: &[&[f64]]) -> DesignMatrix<f64> {
        let d = rows[0].len();
        DesignMatrix::from_row_major(rows.len(), d, rows.concat()).unwrap()
    }

    fn random_instance(n: usize, d: usize, seed: u64) -> (DesignMatrix<f64>, Vec<Label>) {
        let mut rng = rng_from_seed(seed);
        let rows: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
        let xs = DesignMatrix::from_row_major(n, d, rows).unwrap();
        let beta: Vec<f64> = (0..d).map(|j| if j < 3 { 1.0 } else { 0.0 }).collect();
        let ys = (0..n)
            .map(|i| {
                let m: f64 = xs.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum();
                Label::from(rng.random::<f64>() < sigmoid(m))
            })
            .collect();
        (xs, ys)
    }

    #[test]
    fn objective_at_zero_is_ln2() {
        let (xs, ys) = random_instance(30, 4, 1);
        let v = objective(&[0.0; 4], &xs, &ys, 3.7).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn separable_single_sample_limit() {
        let xs = design(&[&[1.0]]);
        for t in [0.0, 2.0, 10.0, 40.0] {
            let v = objective(&[t], &xs, &[1], 0.0).unwrap();
            assert!((v - ((1.0 + f64::exp(t)).ln() - t)).abs() < 1e-12);
        }
        assert!(objective(&[40.0], &xs, &[1], 0.0).unwrap() < 1e-15);
    }

    #[test]
    fn penalty_adds_exactly() {
        let (xs, ys) = random_instance(20, 3, 2);
        let b = [0.5, -1.25, 0.0];
        let a = objective(&b, &xs, &ys, 0.0).unwrap();
        let c = objective(&b, &xs, &ys, 0.2).unwrap();
        assert!((c - a - 0.2 * 1.75).abs() < 1e-15);
    }

    #[test]
    fn shape_errors() {
        let (xs, ys) = random_instance(10, 3, 3);
        assert!(matches!(objective(&[0.0; 2], &xs, &ys, 0.1), Err(Error::Dimension { .. })));
        assert!(matches!(loss_gradient(&[0.0; 3], &xs, &ys[..5]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn gradient_at_zero() {
        let xs = design(&[&[1.0], &[-1.0], &[1.0], &[-1.0]]);
        assert_eq!(loss_gradient(&[0.0], &xs, &[1, 0, 0, 1]).unwrap(), vec![0.0]);
        let (xs, ys) = random_instance(25, 3, 4);
        let g = loss_gradient(&[0.0; 3], &xs, &ys).unwrap();
        for (j, gj) in g.iter().enumerate() {
            let expect: f64 = (0..25).map(|i| (0.5 - f64::from(ys[i])) * xs.row(i)[j]).sum::<f64>() / 25.0;
            assert!((gj - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_solution_above_lambda_max() {
        let xs = design(&[&[1.0], &[-1.0]]);
        let fit = fit_logistic_lasso(&xs, &[1, 0], 0.6, &FitOptions::default()).unwrap();
        assert_eq!(fit.coefficients, vec![0.0]);
        assert!(fit.converged);

        let (xs, ys) = random_instance(60, 8, 5);
        let top = lambda_max(&xs, &ys).unwrap();
        let fit = fit_logistic_lasso(&xs, &ys, top, &FitOptions::default()).unwrap();
        assert!(fit.coefficients.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn fit_is_certified_and_monotone() {
        let (xs, ys) = random_instance(100, 20, 6);
        let lam = 0.1 * lambda_max(&xs, &ys).unwrap();
        let opts = FitOptions {
            record_trace: true,
            ..FitOptions::default()
        };
        let fit = fit_logistic_lasso(&xs, &ys, lam, &opts).unwrap();
        assert!(fit.converged);
        assert!(fit.kkt_residual <= 1e-6);
        assert!(verify_kkt(&fit.coefficients, &xs, &ys, lam).unwrap() <= 1e-6);
        let tr = fit.trace.unwrap();
        for w in tr.windows(2) {
            assert!(w[1] <= w[0] + 1e-13, "objective increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn separable_data_without_penalty_is_flagged() {
        let xs = design(&[&[1.0], &[-1.0], &[2.0], &[-2.0]]);
        let opts = FitOptions {
            max_iter: 5,
            tol: 1e-300,
            ..FitOptions::default()
        };
        let fit = fit_logistic_lasso(&xs, &[1, 0, 1, 0], 0.0, &opts).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 5);
        assert!(fit.coefficients[0] > 0.0);
    }

    #[test]
    fn grid_shape() {
        let (xs, ys) = random_instance(40, 5, 7);
        let top = lambda_max(&xs, &ys).unwrap();
        let two = lambda_grid(&xs, &ys, 2).unwrap();
        assert_eq!(two.values[0], top);
        assert!((two.values[1] - 1e-3 * top).abs() < 1e-15 * top.max(1.0));
        let five = lambda_grid(&xs, &ys, 5).unwrap();
        let r0 = five.values[1] / five.values[0];
        for w in five.values.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-12);
        }
        assert!(lambda_grid(&xs, &ys, 1).is_err());
        let zero = DesignMatrix::from_row_major(3, 2, vec![0.0; 6]).unwrap();
        assert!(lambda_grid(&zero, &[0, 1, 1], 4).is_err());
    }

    #[test]
    fn one_se_rule_edge_cases() {
        let (xs, ys) = random_instance(50, 4, 8);
        let single = LambdaPath::from_values(vec![0.05]).unwrap();
        let sel = cv_lambda_1se(&xs, &ys, 5, &single, 1, &FitOptions::default()).unwrap();
        assert_eq!(sel.lambda, 0.05);
        // every value above lambda_max yields beta = 0 and hence identical errors
        let top = lambda_max(&xs, &ys).unwrap();
        let flat = LambdaPath::from_values(vec![4.0 * top + 1.0, 3.0 * top + 1.0, 2.0 * top + 1.0]).unwrap();
        let sel = cv_lambda_1se(&xs, &ys, 5, &flat, 1, &FitOptions::default()).unwrap();
        assert_eq!(sel.index, 0);
        assert!(cv_lambda_1se(&xs, &ys, 1, &flat, 1, &FitOptions::default()).is_err());
    }

    #[test]
    fn theory_choices() {
        assert!((select_lambda_theory(100, 3, 1.0) - (3f64.ln() / 100.0).sqrt()).abs() < 1e-15);
        let a = select_lambda_theory(100, 50, 1.0);
        let b = select_lambda_theory(400, 50, 1.0);
        assert!((a / b - 2.0).abs() < 1e-12);
        assert_eq!(select_lambda_theory(80, 1, 2.0), 0.0);
        let t1 = select_tau_logistic(200, 500, 1, 200, 1.0);
        let t4 = select_tau_logistic(200, 500, 4, 200, 1.0);
        assert!((t4 / t1 - 2.0).abs() < 1e-12);
        let v = select_tau_logistic(200, 500, 10, 200, 1.0);
        assert!((v - (10.0 * 200f64.ln() / 200.0).sqrt() * 500f64.ln()).abs() < 1e-12);
    }
}
