//! Localisation accuracy metrics: acc@n, wasted effort and average precision.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::matrix::MethodId;
use crate::ranking::Ranking;

/// A fault and the methods that must change to fix it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub id: String,
    pub faulty_methods: BTreeSet<MethodId>,
}

impl FaultSpec {
    pub fn new<I, S>(id: impl Into<String>, methods: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<MethodId>,
    {
        let faulty_methods: BTreeSet<MethodId> = methods.into_iter().map(Into::into).collect();
        assert!(!faulty_methods.is_empty(), "a fault needs at least one method");
        Self {
            id: id.into(),
            faulty_methods,
        }
    }
}

/// Best (numerically lowest) rank among the faulty methods, or `None` when
/// none of them is ranked.
pub fn best_rank(ranking: &Ranking, fault: &FaultSpec) -> Option<usize> {
    fault
        .faulty_methods
        .iter()
        .filter_map(|m| ranking.rank_of(m.as_str()))
        .min()
}

pub fn acc_at_n(best_ranks: &[Option<usize>], n: usize) -> usize {
    best_ranks
        .iter()
        .filter(|r| r.is_some_and(|r| r <= n))
        .count()
}

/// Methods inspected before reaching the first faulty one. An unretrieved
/// fault costs the whole ranking.
pub fn wef(ranking: &Ranking, fault: &FaultSpec) -> usize {
    best_rank(ranking, fault).map_or(ranking.len(), |r| r - 1)
}

/// `(1/|R|) Σ_i i / r_i` over the faulty methods' ranks in ascending order;
/// unretrieved methods contribute zero.
pub fn average_precision(ranking: &Ranking, fault: &FaultSpec) -> f64 {
    let mut ranks: Vec<usize> = fault
        .faulty_methods
        .iter()
        .filter_map(|m| ranking.rank_of(m.as_str()))
        .collect();
    ranks.sort_unstable();
    average_precision_from_ranks(&ranks, fault.faulty_methods.len())
}

pub fn average_precision_from_ranks(sorted_ranks: &[usize], relevant: usize) -> f64 {
    if relevant == 0 {
        return 0.0;
    }
    let sum: f64 = sorted_ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| (i + 1) as f64 / r as f64)
        .sum();
    sum / relevant as f64
}

pub fn mean_average_precision(aps: &[f64]) -> f64 {
    if aps.is_empty() {
        0.0
    } else {
        aps.iter().sum::<f64>() / aps.len() as f64
    }
}
