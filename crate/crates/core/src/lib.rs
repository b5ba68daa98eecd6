//! Single-neuron batch normalization: costs and gradients, a worked example on
//! which BN moves the optimum away from a perfect initialization, and a
//! randomized search for further instances.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batchnorm;
pub mod counterexample;
pub mod error;
pub mod falsifier;
pub mod linalg;
pub mod nn;
pub mod objective;

pub use batchnorm::{batch_stats, bn_network_forward, bn_transform, BNParams, BatchStats};
pub use counterexample::{run_full_verification, CounterexampleReport, Stage, Verdict};
pub use error::{Error, Result};
pub use falsifier::{
    check_inequality, check_lemma_on_instance, nearest_optimum, random_instance, search, solve_bn_optima,
    InstanceSpec, LemmaOutcome, SearchConfig, SearchSummary, TargetModel, Violation,
};
pub use linalg::Matrix;
pub use nn::{ActivationKind, Dataset, Layer, Network, Neuron};
pub use objective::{
    bn_cost, bn_cost_gradient, finite_diff_gradient, least_squares_fit, standard_cost, standard_cost_gradient,
    BnObjective, Gradient, Weights,
};
