//! Shared domain types: points, labeled samples, regression surfaces,
//! problem constants, decision rules and the scenario contract.

use std::fmt;
use std::sync::Arc;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Binary class label, always `0` or `1`.
pub type Label = u8;

/// Which distribution a sample was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Target,
    Source,
}

/// A covariate vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T>(Vec<T>);

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("point coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(domain("point coordinates must be finite"));
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl<T> AsRef<[T]> for Point<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

/// A finite set of `(point, label)` pairs stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample<T> {
    dim: usize,
    coords: Vec<T>,
    labels: Vec<Label>,
    origin: Origin,
}

impl<T: Scalar> LabeledSample<T> {
    /// Builds a sample from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<T>, labels: Vec<Label>, origin: Origin) -> Result<Self> {
        if dim == 0 {
            return Err(domain("dimension must be positive"));
        }
        if coords.len() != dim * labels.len() {
            return Err(Error::Dimension {
                expected: dim * labels.len(),
                got: coords.len(),
            });
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(domain("labels must be 0 or 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(domain("coordinates must be finite"));
        }
        Ok(Self {
            dim,
            coords,
            labels,
            origin,
        })
    }

    pub fn from_points(points: &[Point<T>], labels: Vec<Label>, origin: Origin) -> Result<Self> {
        let dim = points.first().map(Point::dim).ok_or(Error::Empty("points"))?;
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            if p.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Self::from_flat(dim, coords, labels, origin)
    }

    /// An empty sample of the given dimension.
    pub fn empty(dim: usize, origin: Origin) -> Self {
        Self {
            dim,
            coords: Vec::new(),
            labels: Vec::new(),
            origin,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Rows selected by `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(idx.len() * self.dim);
        let mut labels = Vec::with_capacity(idx.len());
        for &i in idx {
            coords.extend_from_slice(self.point(i));
            labels.push(self.labels[i]);
        }
        Self {
            dim: self.dim,
            coords,
            labels,
            origin: self.origin,
        }
    }

    /// Concatenation `self ++ other`; keeps the origin of `self`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim && !other.is_empty() {
            return Err(Error::Dimension {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(Self {
            dim: self.dim,
            coords,
            labels,
            origin: self.origin,
        })
    }
}

/// A regression function `x -> P(Y = 1 | X = x)`; outputs are clipped to `[0, 1]`.
#[derive(Clone)]
pub struct RegressionSurface {
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl RegressionSurface {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(v: f64) -> Self {
        Self::new(move |_| v)
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        if v.is_nan() {
            v
        } else {
            v.clamp(0.0, 1.0)
        }
    }
}

impl fmt::Debug for RegressionSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RegressionSurface(..)")
    }
}

/// Margin, transfer and smoothness constants of a `(Q, P)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams<T> {
    /// Margin exponent.
    pub alpha: T,
    pub c_alpha: T,
    /// Transfer exponent.
    pub gamma: T,
    pub c_gamma: T,
    /// Hölder smoothness of the target regression function.
    pub beta: T,
    pub d: usize,
}

impl<T: Scalar> ProblemParams<T> {
    pub fn new(alpha: T, c_alpha: T, gamma: T, c_gamma: T, beta: T, d: usize) -> Result<Self> {
        let p = Self {
            alpha,
            c_alpha,
            gamma,
            c_gamma,
            beta,
            d,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero()) {
            return Err(domain("alpha must be >= 0"));
        }
        if !(self.c_alpha > T::zero() && self.gamma > T::zero() && self.c_gamma > T::zero()) {
            return Err(domain("c_alpha, gamma and c_gamma must be > 0"));
        }
        if !(self.beta > T::zero() && self.beta <= T::one()) {
            return Err(domain("beta must lie in (0, 1]"));
        }
        if self.d == 0 {
            return Err(domain("d must be positive"));
        }
        Ok(())
    }
}

impl Default for ProblemParams<f64> {
    /// Constants of the two-dimensional sine design: `alpha = beta = 1`, `d = 2`.
    fn default() -> Self {
        Self {
            alpha: 1.0,
            c_alpha: 1.0,
            gamma: 1.0,
            c_gamma: 1.0,
            beta: 1.0,
            d: 2,
        }
    }
}

/// A deterministic classifier `x -> {0, 1}`.
pub trait DecisionRule<T>: Send + Sync {
    fn predict(&self, x: &[T]) -> Label;

    fn predict_batch(&self, xs: &[T], dim: usize) -> Vec<Label> {
        xs.chunks_exact(dim).map(|x| self.predict(x)).collect()
    }
}

impl<T, R: DecisionRule<T> + ?Sized> DecisionRule<T> for Arc<R> {
    fn predict(&self, x: &[T]) -> Label {
        (**self).predict(x)
    }

    fn predict_batch(&self, xs: &[T], dim: usize) -> Vec<Label> {
        (**self).predict_batch(xs, dim)
    }
}

impl<T, R: DecisionRule<T> + ?Sized> DecisionRule<T> for &R {
    fn predict(&self, x: &[T]) -> Label {
        (**self).predict(x)
    }
}

/// Rule predicting the same label everywhere.
#[derive(Debug, Clone, Copy)]
pub struct ConstantRule(pub Label);

impl<T> DecisionRule<T> for ConstantRule {
    fn predict(&self, _x: &[T]) -> Label {
        self.0
    }
}

/// Rule backed by a closure.
pub struct FnRule<F>(pub F);

impl<T, F: Fn(&[T]) -> Label + Send + Sync> DecisionRule<T> for FnRule<F> {
    fn predict(&self, x: &[T]) -> Label {
        (self.0)(x)
    }
}

/// Plug-in indicator `1{eta >= 1/2}`.
#[inline]
pub fn plug_in<T: Scalar>(eta: T) -> Label {
    Label::from(eta >= T::half())
}

/// Law of the covariates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovariateLaw {
    /// Uniform on `[0, 1]^d`.
    UniformCube,
    /// Standard normal `N(0, I_d)`.
    StandardNormal,
}

impl CovariateLaw {
    pub fn sample_into(&self, rng: &mut Rng, out: &mut [f64]) {
        match self {
            CovariateLaw::UniformCube => out.iter_mut().for_each(|v| *v = rng.random::<f64>()),
            CovariateLaw::StandardNormal => {
                out.iter_mut().for_each(|v| *v = rng.sample(StandardNormal))
            }
        }
    }
}

/// An analytically known `(Q, P)` pair.
pub trait Scenario: Send + Sync {
    fn dim(&self) -> usize;
    /// Target regression function, in `[0, 1]`.
    fn eta_q(&self, x: &[f64]) -> f64;
    /// Source regression function, in `[0, 1]`.
    fn eta_p(&self, x: &[f64]) -> f64;
    fn covariate_law(&self, origin: Origin) -> CovariateLaw;

    fn eta(&self, origin: Origin, x: &[f64]) -> f64 {
        match origin {
            Origin::Target => self.eta_q(x),
            Origin::Source => self.eta_p(x),
        }
    }

    fn sample_covariate(&self, origin: Origin, rng: &mut Rng, out: &mut [f64]) {
        self.covariate_law(origin).sample_into(rng, out)
    }
}

impl<S: Scenario + ?Sized> Scenario for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eta_q(&self, x: &[f64]) -> f64 {
        (**self).eta_q(x)
    }
    fn eta_p(&self, x: &[f64]) -> f64 {
        (**self).eta_p(x)
    }
    fn covariate_law(&self, origin: Origin) -> CovariateLaw {
        (**self).covariate_law(origin)
    }
}

/// Scenario assembled from two surfaces and a shared covariate law.
#[derive(Debug, Clone)]
pub struct CustomScenario {
    pub dim: usize,
    pub eta_q: RegressionSurface,
    pub eta_p: RegressionSurface,
    pub law: CovariateLaw,
}

impl Scenario for CustomScenario {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eta_q(&self, x: &[f64]) -> f64 {
        self.eta_q.eval(x)
    }
    fn eta_p(&self, x: &[f64]) -> f64 {
        self.eta_p.eval(x)
    }
    fn covariate_law(&self, _origin: Origin) -> CovariateLaw {
        self.law
    }
}

/// Bayes classifier of the target, `x -> 1{eta_Q(x) >= 1/2}`.
pub struct BayesRule<'a, S: ?Sized> {
    scenario: &'a S,
    origin: Origin,
}

impl<S: Scenario + ?Sized> DecisionRule<f64> for BayesRule<'_, S> {
    fn predict(&self, x: &[f64]) -> Label {
        plug_in(self.scenario.eta(self.origin, x))
    }
}

pub fn bayes_rule<S: Scenario + ?Sized>(scenario: &S) -> BayesRule<'_, S> {
    BayesRule {
        scenario,
        origin: Origin::Target,
    }
}

/// Bayes classifier of the source, `x -> 1{eta_P(x) >= 1/2}`.
pub fn source_bayes_rule<S: Scenario + ?Sized>(scenario: &S) -> BayesRule<'_, S> {
    BayesRule {
        scenario,
        origin: Origin::Source,
    }
}
