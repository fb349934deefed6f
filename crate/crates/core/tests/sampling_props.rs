mod common;

use std::collections::BTreeSet;

use common::{arb_case, build};
use mbfl_core::io;
use mbfl_core::sampling::{sample_stratified, sample_uniform, uniform_sample_size, SamplePlan};
use mbfl_core::KillMatrix;
use proptest::prelude::*;

/// Positions of the sampled mutants in the source matrix, checking rows match.
fn positions(src: &KillMatrix, sampled: &KillMatrix) -> Vec<usize> {
    sampled
        .mutants()
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let j = src.mutant_index(&rec.id).expect("sampled mutant comes from the source");
            assert_eq!(&src.mutants()[j], rec);
            assert_eq!(src.row(j), sampled.row(i));
            j
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn uniform_sample_is_an_ordered_subset((m, _) in arb_case(6, 30, 5), rate in 0.01f64..=1.0, seed in any::<u64>()) {
        let s = sample_uniform(&m, rate, seed).unwrap();
        let pos = positions(&m, &s);
        prop_assert!(pos.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(s.num_mutants(), uniform_sample_size(m.num_mutants(), rate));
        prop_assert_eq!(s.tests(), m.tests());
        let again = sample_uniform(&m, rate, seed).unwrap();
        prop_assert_eq!(io::to_csv_bytes(&s).unwrap(), io::to_csv_bytes(&again).unwrap());
    }

    #[test]
    fn stratified_keeps_min_of_n_and_stratum((m, _) in arb_case(6, 30, 5), n in 1usize..8, seed in any::<u64>()) {
        let s = sample_stratified(&m, n, seed).unwrap();
        positions(&m, &s);
        for e in m.methods() {
            let want = m.mutants_of(e.as_str()).len().min(n);
            prop_assert_eq!(s.mutants_of(e.as_str()).len(), want);
        }
        prop_assert_eq!(s, sample_stratified(&m, n, seed).unwrap());
    }

    #[test]
    fn identities((m, _) in arb_case(6, 30, 5), seed in any::<u64>()) {
        prop_assert_eq!(&sample_uniform(&m, 1.0, seed).unwrap(), &m);
        prop_assert_eq!(&sample_stratified(&m, m.num_mutants(), seed).unwrap(), &m);
    }
}

#[test]
fn sample_size_rounds_half_up_with_floor_one() {
    assert_eq!(uniform_sample_size(10, 0.25), 3);
    assert_eq!(uniform_sample_size(10, 0.24), 2);
    assert_eq!(uniform_sample_size(7, 0.01), 1);
    assert_eq!(uniform_sample_size(7, 1.0), 7);
}

#[test]
fn different_seeds_give_different_samples() {
    let rows: Vec<(usize, Vec<bool>)> = (0..30).map(|i| (i % 3, vec![i % 2 == 0, i % 5 == 0])).collect();
    let m = build(2, &rows);
    let sets: BTreeSet<Vec<String>> = (0..20)
        .map(|seed| {
            sample_uniform(&m, 0.5, seed)
                .unwrap()
                .mutants()
                .iter()
                .map(|r| r.id.clone())
                .collect()
        })
        .collect();
    assert!(sets.len() >= 2);
}

#[test]
fn invalid_plans_are_rejected() {
    let m = mbfl_core::fixtures::example_matrix();
    for rate in [0.0, -0.1, 1.5, f64::NAN] {
        assert!(sample_uniform(&m, rate, 0).is_err(), "{rate}");
    }
    assert!(sample_stratified(&m, 0, 0).is_err());
    assert!(SamplePlan::Uniform { rate: 2.0, seed: 0 }.validate().is_err());
}

#[test]
fn example_stratified_examples() {
    let m = mbfl_core::fixtures::example_matrix();
    assert_eq!(sample_stratified(&m, 5, 1).unwrap(), m);
    let s = sample_stratified(&m, 2, 1).unwrap();
    assert_eq!(s.num_mutants(), 4);
    assert_eq!(s.mutants_of("getType").len(), 2);
    assert_eq!(s.mutants_of("resolveType").len(), 2);
}
