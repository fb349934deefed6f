#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mbfl_core::{
    FailureObservation, KillMatrix, ModelFamily, MutantRecord, MutationOperator, Scope, TestId,
};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn build(n_tests: usize, rows: &[(usize, Vec<bool>)]) -> KillMatrix {
    let tests = (0..n_tests).map(|j| TestId::new(format!("t{}", j + 1))).collect();
    let mutants = rows
        .iter()
        .enumerate()
        .map(|(i, (e, _))| {
            MutantRecord::new(format!("m{}", i + 1), format!("e{e}"), MutationOperator::Aor, "")
        })
        .collect();
    KillMatrix::new(tests, mutants, rows.iter().map(|(_, r)| r.clone()).collect()).unwrap()
}

/// Matrix with up to `max_tests` tests, `max_mutants` mutants and
/// `max_methods` methods, plus an observation over a subset of its tests.
pub fn random_case(
    rng: &mut ChaCha8Rng,
    max_tests: usize,
    max_mutants: usize,
    max_methods: usize,
) -> (KillMatrix, FailureObservation) {
    let n_tests = rng.gen_range(1..=max_tests);
    let n_mutants = rng.gen_range(1..=max_mutants);
    let n_methods = rng.gen_range(1..=max_methods);
    let density: f64 = rng.gen_range(0.1..0.9);
    let rows: Vec<(usize, Vec<bool>)> = (0..n_mutants)
        .map(|_| {
            let e = rng.gen_range(0..n_methods);
            (e, (0..n_tests).map(|_| rng.gen_bool(density)).collect())
        })
        .collect();
    let matrix = build(n_tests, &rows);

    let mut failing = BTreeSet::new();
    let mut passing = BTreeSet::new();
    let forced = rng.gen_range(0..n_tests);
    for (j, t) in matrix.tests().iter().enumerate() {
        match rng.gen_range(0..3) {
            _ if j == forced => {
                failing.insert(t.clone());
            }
            0 => {
                failing.insert(t.clone());
            }
            1 => {
                passing.insert(t.clone());
            }
            _ => {}
        }
    }
    (
        matrix,
        FailureObservation {
            failing,
            passing: Some(passing),
        },
    )
}

prop_compose! {
    pub fn arb_case(max_tests: usize, max_mutants: usize, max_methods: usize)
        (seed in any::<u64>()) -> (KillMatrix, FailureObservation)
    {
        use rand::SeedableRng;
        random_case(&mut ChaCha8Rng::seed_from_u64(seed), max_tests, max_mutants, max_methods)
    }
}

pub fn kill_set(matrix: &KillMatrix, i: usize) -> BTreeSet<String> {
    matrix
        .tests()
        .iter()
        .zip(matrix.row(i))
        .filter(|(_, &k)| k)
        .map(|(t, _)| t.as_str().to_owned())
        .collect()
}

fn names(set: &BTreeSet<TestId>) -> BTreeSet<String> {
    set.iter().map(|t| t.as_str().to_owned()).collect()
}

/// Scores written directly from the set definitions: X_e is the mutants of
/// e, K_m the tests killing m, T_f the failing and T_p the passing tests.
pub fn oracle(
    matrix: &KillMatrix,
    obs: &FailureObservation,
    family: ModelFamily,
    scope: Scope,
    eps: f64,
) -> BTreeMap<String, f64> {
    let tf = names(&obs.failing);
    let tp = obs.passing.as_ref().map(names).unwrap_or_default();
    let universe: BTreeSet<String> = tf.union(&tp).cloned().collect();

    let mut out = BTreeMap::new();
    for e in matrix.methods() {
        let xe: Vec<BTreeSet<String>> = (0..matrix.num_mutants())
            .filter(|&i| matrix.mutants()[i].method == e)
            .map(|i| kill_set(matrix, i))
            .collect();
        let score = match (family, scope) {
            (ModelFamily::ExactMatch, Scope::Failing) => {
                let restricted = |k: &BTreeSet<String>| -> BTreeSet<String> {
                    k.intersection(&tf).cloned().collect()
                };
                xe.iter().filter(|k| restricted(k) == tf).count() as f64
            }
            (ModelFamily::ExactMatch, Scope::FailingPassing) => xe
                .iter()
                .filter(|k| k.intersection(&universe).cloned().collect::<BTreeSet<_>>() == tf)
                .count() as f64,
            (ModelFamily::PartialMultiplicative, Scope::Failing) => tf
                .iter()
                .map(|t| xe.iter().filter(|k| k.contains(t)).count() as f64 + eps)
                .product(),
            (ModelFamily::PartialAdditive, Scope::Failing) => tf
                .iter()
                .map(|t| xe.iter().filter(|k| k.contains(t)).count() as f64)
                .sum(),
            (ModelFamily::PartialMultiplicative, Scope::FailingPassing) => universe
                .iter()
                .map(|t| {
                    xe.iter().filter(|k| tf.contains(t) == k.contains(t)).count() as f64 + eps
                })
                .product(),
            (ModelFamily::PartialAdditive, Scope::FailingPassing) => universe
                .iter()
                .map(|t| xe.iter().filter(|k| tf.contains(t) == k.contains(t)).count() as f64)
                .sum(),
        };
        out.insert(e.as_str().to_owned(), score);
    }
    out
}

/// Max tie-break rank of every method: the number of methods scoring at
/// least as high.
pub fn oracle_ranks(scores: &BTreeMap<String, f64>) -> BTreeMap<String, usize> {
    scores
        .iter()
        .map(|(m, s)| (m.clone(), scores.values().filter(|&&o| o >= *s).count()))
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

use mbfl_core::classifier::{Activation, ClassifierKind, ClassifierModel, Dataset, TrainConfig};
use mbfl_core::MethodId;

/// Small random classification instance with real-valued features and
/// random parameters. MLP parameters are redrawn until no hidden
/// pre-activation sits near the ReLU kink.
pub fn gradient_instance(
    seed: u64,
    kind: ClassifierKind,
    activation: Activation,
) -> (ClassifierModel, Dataset) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(1..=6);
    let c = rng.gen_range(2..=4);
    let h = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=8);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let labels = (0..n).map(|_| rng.gen_range(0..c)).collect();
    let data = Dataset::new(
        rows,
        labels,
        (0..c).map(|i| MethodId::new(format!("e{i}"))).collect(),
        (0..d).map(|j| TestId::new(format!("t{j}"))).collect(),
    )
    .unwrap();
    let cfg = TrainConfig {
        hidden_size: h,
        seed,
        activation,
        ..TrainConfig::default()
    };
    let mut model = ClassifierModel::initialise(kind, &data, &cfg).unwrap();
    loop {
        for p in model.params_mut() {
            *p = rng.gen_range(-1.0..1.0);
        }
        if kind == ClassifierKind::Lr || !near_kink(&model, &data, d, h) {
            break;
        }
    }
    (model, data)
}

fn near_kink(model: &ClassifierModel, data: &Dataset, d: usize, h: usize) -> bool {
    let (w1, rest) = model.params().split_at(d * h);
    let b1 = &rest[..h];
    data.rows().any(|x| {
        (0..h).any(|j| {
            let z = b1[j] + (0..d).map(|i| x[i] * w1[i * h + j]).sum::<f64>();
            z.abs() < 1e-3
        })
    })
}

/// Largest relative discrepancy between the analytic gradient and central
/// differences with step 1e-4: |a - n| / max(|a|, |n|, 1e-4) per component.
pub fn gradient_error(model: &ClassifierModel, data: &Dataset) -> f64 {
    let (_, analytic) = model.loss_and_gradient(data).unwrap();
    let step = 1e-4;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (k, &a) in analytic.iter().enumerate() {
        let orig = probe.params()[k];
        probe.params_mut()[k] = orig + step;
        let up = probe.loss(data).unwrap();
        probe.params_mut()[k] = orig - step;
        let down = probe.loss(data).unwrap();
        probe.params_mut()[k] = orig;
        let numeric = (up - down) / (2.0 * step);
        worst = worst.max((a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-4));
    }
    worst
}
