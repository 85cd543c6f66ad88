//! Exponential random graph models for undirected brain networks.

pub mod error;
pub mod estimation;
pub mod gof;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod netmetrics;
pub mod sampler;
pub mod selection;
pub mod terms;

pub use error::{Error, ErrorClass, Result};
pub use graph::{Graph, NodeAttributes, SharedPartnerDistributions};
pub use terms::{evaluate_statistics, change_statistics, validate_model, ModelEvaluator, ModelSpec, Term};
