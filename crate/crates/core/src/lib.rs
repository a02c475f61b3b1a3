//! Transfer-around-boundary classification: K-NN and lasso-logistic
//! classifiers that combine a small target sample with a larger source
//! sample, the analytic scenarios used to study them, and the Monte-Carlo
//! quantities that characterise source reliability.
//!
//! The numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod classifiers;
pub mod error;
pub mod evaluate;
pub mod knn;
pub mod logistic;
pub mod model;
pub mod quantities;
pub mod rng;
pub mod scalar;
pub mod scenarios;

pub use error::{Error, Result};
pub use model::{DecisionRule, Label, Origin, Scenario};
pub use scalar::Scalar;

pub type NeighborIndex = knn::NeighborIndex<f64>;
pub type KnnRegressor = knn::KnnRegressor<f64>;
pub type LabeledSample = model::LabeledSample<f64>;
pub type ProblemParams = model::ProblemParams<f64>;
pub type DesignMatrix = logistic::DesignMatrix<f64>;
pub type LogisticLassoFit = logistic::LogisticLassoFit<f64>;
pub type TabClassifier = classifiers::TabClassifier<f64>;

pub type NeighborIndexF32 = knn::NeighborIndex<f32>;
pub type KnnRegressorF32 = knn::KnnRegressor<f32>;
pub type LabeledSampleF32 = model::LabeledSample<f32>;
pub type DesignMatrixF32 = logistic::DesignMatrix<f32>;
