//! The learning problems whose risks are U-statistics: within-cluster
//! point scatter, Mahalanobis metric learning with the hinge loss,
//! multipartite ranking (pairwise and VUS criteria), ERM over finite kernel
//! classes, and stochastic gradient descent with incomplete gradient
//! estimates.

pub mod cluster;
pub mod erm;
pub mod metric;
pub mod ranking;
pub mod sgd;
pub mod vus;

pub use cluster::{clustering_kernel, ClusteringKernel, Partition};
pub use erm::{erm_finite_class, ErmEstimator, ErmSelection};
pub use metric::{
    metric_hinge_gradient, metric_hinge_kernel, project_psd, MetricHingeKernel,
    MetricHingeObjective, MetricModel,
};
pub use ranking::{
    excess_kernel, ranking_kernel, FeatureRule, RankingKernel, RankingRule, ReverseRule,
    ThresholdRule,
};
pub use sgd::{sgd, GradientMode, Parameter, ProjectionPolicy, SgdConfig, SgdObjective};
pub use vus::{vus_kernel, VusKernel};
