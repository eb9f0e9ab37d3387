//! Toolkit for compositional-generalization benchmarks in semantic parsing.
//!
//! The crate covers the whole data path of an experiment without touching
//! any model: SCAN generation and interpretation ([`scan`]), traditional
//! holdout splits ([`splits`]), atom/compound divergence and maximum
//! compound divergence split search ([`dbca`]), reversible grouped SPARQL
//! representations ([`sparql`]), dataset and prediction files
//! ([`dataset`]), and exact-match scoring with report rendering ([`eval`]).
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise. Results are
//! identical in both modes.

pub mod dataset;
pub mod dbca;
pub mod eval;
pub mod par;
pub mod scan;
pub mod sparql;
pub mod splits;

pub use dataset::{Example, PredictionRecord};
pub use par::Parallelism;

/// Crate-wide error, wrapping the per-module error types.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Scan(#[from] scan::ParseError),
    #[error(transparent)]
    Split(#[from] splits::SplitError),
    #[error(transparent)]
    Dbca(#[from] dbca::DbcaError),
    #[error(transparent)]
    Sparql(#[from] sparql::SparqlError),
    #[error(transparent)]
    Dataset(#[from] dataset::DatasetError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
