//! Mutation-based fault localisation with ahead-of-time mutation analysis.
//!
//! A [`KillMatrix`] records which tests kill which mutants of a reference
//! version. Once a failure is observed on a later version, the matrix alone
//! is enough to rank methods by suspiciousness, either with the counting
//! models in [`bayes`] or with the classifiers in [`classifier`].
//!
//! Kill cells use 1 = killed, i.e. the test fails on the mutant.

pub mod bayes;
pub mod classifier;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod ranking;
pub mod sampling;
pub mod toy;

pub use bayes::{localize, ModelFamily, ModelSpec, RankerConfig, Scope};
pub use error::{Error, Result};
pub use matrix::{FailureObservation, KillMatrix, MethodId, MutantRecord, MutationOperator, TestId};
pub use ranking::{rank, Ranking, ScoreMap};
