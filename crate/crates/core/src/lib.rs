//! Covariate partitioning around an exposure/outcome pair from conditional
//! independence tests, with the graph kernel, testers, simulators and
//! benchmark harness it needs.
//!
//! Samples, testers and estimators are generic over [`Scalar`] (`f32` or
//! `f64`); graphs and the discovery algorithm are scalar-free.

pub mod citest;
pub mod data;
pub mod eval;
pub mod experiment;
pub mod graph;
pub mod ldp;
pub mod synth;
mod scalar;

pub use scalar::Scalar;

pub type Dataset64 = data::Dataset<f64>;
pub type Dataset32 = data::Dataset<f32>;
pub type FisherZ64 = citest::FisherZ<f64>;
pub type FisherZ32 = citest::FisherZ<f32>;
