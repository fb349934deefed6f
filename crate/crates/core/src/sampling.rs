//! Mutant sampling to cut the cost of building a kill matrix.
//!
//! Randomness comes from ChaCha8 seeded with the plan's `u64` seed, so the
//! same seed selects the same mutants on every platform.

use std::collections::HashMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{KillMatrix, MethodId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplePlan {
    Uniform { rate: f64, seed: u64 },
    Stratified { n_per_method: usize, seed: u64 },
}

impl SamplePlan {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SamplePlan::Uniform { rate, .. } if !(rate > 0.0 && rate <= 1.0) => Err(
                Error::InvalidConfig(format!("sampling rate must be in (0, 1], got {rate}")),
            ),
            SamplePlan::Stratified { n_per_method: 0, .. } => Err(Error::InvalidConfig(
                "mutants per method must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, matrix: &KillMatrix) -> Result<KillMatrix> {
        match *self {
            SamplePlan::Uniform { rate, seed } => sample_uniform(matrix, rate, seed),
            SamplePlan::Stratified { n_per_method, seed } => {
                sample_stratified(matrix, n_per_method, seed)
            }
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            SamplePlan::Uniform { rate, .. } => SamplePlan::Uniform { rate, seed },
            SamplePlan::Stratified { n_per_method, .. } => {
                SamplePlan::Stratified { n_per_method, seed }
            }
        }
    }
}

/// Number of mutants kept by uniform sampling: `rate * n` rounded half up,
/// but never fewer than one.
pub fn uniform_sample_size(n: usize, rate: f64) -> usize {
    ((rate * n as f64 + 0.5).floor() as usize).clamp(1, n.max(1))
}

/// Keeps a uniformly random subset of mutants, preserving their relative order.
pub fn sample_uniform(matrix: &KillMatrix, rate: f64, seed: u64) -> Result<KillMatrix> {
    SamplePlan::Uniform { rate, seed }.validate()?;
    let n = matrix.num_mutants();
    if n == 0 {
        return Err(Error::InvalidConfig("cannot sample an empty matrix".into()));
    }
    let k = uniform_sample_size(n, rate);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = index::sample(&mut rng, n, k).into_vec();
    keep.sort_unstable();
    Ok(matrix.select_mutants(&keep))
}

/// Keeps at most `n_per_method` random mutants from each method.
pub fn sample_stratified(matrix: &KillMatrix, n_per_method: usize, seed: u64) -> Result<KillMatrix> {
    SamplePlan::Stratified { n_per_method, seed }.validate()?;
    let mut strata: HashMap<&MethodId, Vec<usize>> = HashMap::new();
    for (i, m) in matrix.mutants().iter().enumerate() {
        strata.entry(&m.method).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = Vec::with_capacity(matrix.num_mutants());
    // methods() gives a stable stratum order so the RNG stream is consumed deterministically
    for method in matrix.methods() {
        let members = &strata[&method];
        if members.len() <= n_per_method {
            keep.extend_from_slice(members);
        } else {
            keep.extend(
                index::sample(&mut rng, members.len(), n_per_method)
                    .into_iter()
                    .map(|j| members[j]),
            );
        }
    }
    keep.sort_unstable();
    Ok(matrix.select_mutants(&keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_matrix;

    #[test]
    fn full_rate_is_identity() {
        let m = example_matrix();
        assert_eq!(sample_uniform(&m, 1.0, 7).unwrap(), m);
    }

    #[test]
    fn half_of_seven_rounds_up() {
        assert_eq!(sample_uniform(&example_matrix(), 0.5, 1).unwrap().num_mutants(), 4);
        assert_eq!(uniform_sample_size(7, 0.5), 4);
        assert_eq!(uniform_sample_size(10, 0.01), 1);
        assert_eq!(uniform_sample_size(10, 0.25), 3);
    }

    #[test]
    fn invalid_rates() {
        let m = example_matrix();
        for rate in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                sample_uniform(&m, rate, 0),
                Err(Error::InvalidConfig(_))
            ));
        }
        assert!(matches!(
            sample_stratified(&m, 0, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn stratified_caps_each_method() {
        let m = example_matrix();
        assert_eq!(sample_stratified(&m, 5, 3).unwrap(), m);
        let s = sample_stratified(&m, 2, 3).unwrap();
        assert_eq!(s.num_mutants(), 4);
        assert_eq!(s.mutants_of("getType").len(), 2);
        assert_eq!(s.mutants_of("resolveType").len(), 2);
    }

    #[test]
    fn single_mutant_stratum_is_kept() {
        let m = example_matrix().select_mutants(&[0]);
        assert_eq!(sample_stratified(&m, 1, 0).unwrap(), m);
    }

    #[test]
    fn rows_are_copied_verbatim_in_order() {
        let m = example_matrix();
        let s = sample_uniform(&m, 0.5, 11).unwrap();
        let mut last = None;
        for (rec, row) in s.rows() {
            let i = m.mutant_index(&rec.id).unwrap();
            assert_eq!(row, m.row(i));
            assert!(last.is_none_or(|l| l < i));
            last = Some(i);
        }
    }
}
