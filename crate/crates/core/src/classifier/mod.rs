//! Classifiers that map an observed 0-1 test-result vector to a probability
//! distribution over methods.
//!
//! Training data comes straight from a kill matrix: one row per mutant,
//! features are its kill cells (1 = the test fails) and the label is the
//! mutant's method. Both model kinds minimise mean softmax cross-entropy
//! with full-batch Adam.

mod adam;
mod lr;
mod mlp;

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use adam::Adam;
pub use mlp::Activation;

use crate::bayes::Scope;
use crate::error::{Error, Result};
use crate::matrix::{FailureObservation, KillMatrix, MethodId, TestId};
use crate::ranking::ScoreMap;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    method_index: Vec<MethodId>,
    test_index: Vec<TestId>,
}

impl Dataset {
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        method_index: Vec<MethodId>,
        test_index: Vec<TestId>,
    ) -> Result<Self> {
        if rows.is_empty() || test_index.is_empty() || method_index.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() != labels.len() {
            return Err(Error::Shape {
                expected: rows.len(),
                actual: labels.len(),
            });
        }
        let n_features = test_index.len();
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for row in &rows {
            if row.len() != n_features {
                return Err(Error::Shape {
                    expected: n_features,
                    actual: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= method_index.len()) {
            return Err(Error::InvalidConfig(format!(
                "label {bad} out of range for {} classes",
                method_index.len()
            )));
        }
        Ok(Self {
            features,
            n_features,
            labels,
            method_index,
            test_index,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.method_index.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.n_features)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn method_index(&self) -> &[MethodId] {
        &self.method_index
    }

    pub fn test_index(&self) -> &[TestId] {
        &self.test_index
    }
}

/// One training row per mutant: its kill row as features, its method as label.
pub fn build_dataset(matrix: &KillMatrix) -> Result<Dataset> {
    if matrix.num_mutants() == 0 || matrix.num_tests() == 0 {
        return Err(Error::EmptyDataset);
    }
    let methods = matrix.methods();
    let rows = matrix
        .rows()
        .map(|(_, row)| row.iter().map(|&k| if k { 1.0 } else { 0.0 }).collect())
        .collect();
    let labels = matrix
        .mutants()
        .iter()
        .map(|m| methods.iter().position(|x| *x == m.method).expect("derived method"))
        .collect();
    Dataset::new(rows, labels, methods, matrix.tests().to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden_size: usize,
    pub max_iter: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    #[serde(default)]
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_size: 50,
            max_iter: 50,
            learning_rate: 0.01,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
            activation: Activation::Relu,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, kind: ClassifierKind) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if kind == ClassifierKind::Mlp && self.hidden_size == 0 {
            return bad("hidden_size must be at least 1");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam betas must lie in [0, 1)");
        }
        if self.adam_eps.is_nan() || self.adam_eps <= 0.0 {
            return bad("adam_eps must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "LR")]
    Lr,
    #[serde(rename = "MLP")]
    Mlp,
}

impl std::str::FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(ClassifierKind::Lr),
            "mlp" => Ok(ClassifierKind::Mlp),
            _ => Err(format!("unknown classifier `{s}` (expected lr or mlp)")),
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassifierKind::Lr => "LR",
            ClassifierKind::Mlp => "MLP",
        })
    }
}

/// A trained (or freshly initialised) classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    kind: ClassifierKind,
    n_features: usize,
    n_hidden: usize,
    n_classes: usize,
    params: Vec<f64>,
    test_index: Vec<TestId>,
    method_index: Vec<MethodId>,
    config: TrainConfig,
    loss_curve: Vec<f64>,
}

impl ClassifierModel {
    /// Untrained model for `data`: LR weights start at zero, MLP weights are
    /// drawn from the seeded uniform scheme.
    pub fn initialise(kind: ClassifierKind, data: &Dataset, config: &TrainConfig) -> Result<Self> {
        config.validate(kind)?;
        let (n_features, n_classes) = (data.n_features(), data.n_classes());
        let (n_hidden, params) = match kind {
            ClassifierKind::Lr => (0, vec![0.0; lr::n_params(n_features, n_classes)]),
            ClassifierKind::Mlp => {
                let shape = mlp::Shape {
                    features: n_features,
                    hidden: config.hidden_size,
                    classes: n_classes,
                };
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                (config.hidden_size, mlp::init_params(shape, &mut rng))
            }
        };
        Ok(Self {
            kind,
            n_features,
            n_hidden,
            n_classes,
            params,
            test_index: data.test_index().to_vec(),
            method_index: data.method_index().to_vec(),
            config: *config,
            loss_curve: Vec::new(),
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn test_index(&self) -> &[TestId] {
        &self.test_index
    }

    pub fn method_index(&self) -> &[MethodId] {
        &self.method_index
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    /// Training loss before the first update and after every update.
    pub fn loss_curve(&self) -> &[f64] {
        &self.loss_curve
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.loss_curve.last().copied()
    }

    fn mlp_shape(&self) -> mlp::Shape {
        mlp::Shape {
            features: self.n_features,
            hidden: self.n_hidden,
            classes: self.n_classes,
        }
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        if data.n_features() != self.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                actual: data.n_features(),
            });
        }
        if data.n_classes() != self.n_classes {
            return Err(Error::Shape {
                expected: self.n_classes,
                actual: data.n_classes(),
            });
        }
        Ok(())
    }

    /// Mean cross-entropy over `data` and its gradient w.r.t. [`Self::params`].
    pub fn loss_and_gradient(&self, data: &Dataset) -> Result<(f64, Vec<f64>)> {
        self.check_data(data)?;
        Ok(self.loss_and_gradient_at(&self.params, data))
    }

    fn loss_and_gradient_at(&self, params: &[f64], data: &Dataset) -> (f64, Vec<f64>) {
        match self.kind {
            ClassifierKind::Lr => lr::loss_and_gradient(params, self.n_features, self.n_classes, data),
            ClassifierKind::Mlp => {
                mlp::loss_and_gradient(params, self.mlp_shape(), self.config.activation, data)
            }
        }
    }

    pub fn loss(&self, data: &Dataset) -> Result<f64> {
        Ok(self.loss_and_gradient(data)?.0)
    }

    /// Runs `max_iter` full-batch Adam updates.
    pub fn fit(&mut self, data: &Dataset) -> Result<()> {
        self.check_data(data)?;
        let cfg = self.config;
        let mut opt = Adam::new(
            self.params.len(),
            cfg.learning_rate,
            cfg.adam_beta1,
            cfg.adam_beta2,
            cfg.adam_eps,
        );
        let mut params = std::mem::take(&mut self.params);
        let mut curve = Vec::with_capacity(cfg.max_iter + 1);
        for _ in 0..cfg.max_iter {
            let (loss, grad) = self.loss_and_gradient_at(&params, data);
            curve.push(loss);
            opt.step(&mut params, &grad);
        }
        curve.push(self.loss_and_gradient_at(&params, data).0);
        self.params = params;
        self.loss_curve = curve;
        Ok(())
    }

    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        let mut out = vec![0.0; self.n_classes];
        match self.kind {
            ClassifierKind::Lr => lr::logits(&self.params, self.n_features, self.n_classes, x, &mut out),
            ClassifierKind::Mlp => {
                mlp::logits(&self.params, self.mlp_shape(), self.config.activation, x, &mut out)
            }
        }
        Ok(out)
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut p = self.logits(x)?;
        softmax_in_place(&mut p);
        Ok(p)
    }

    /// Index of the most probable class for each training row.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let mut correct = 0usize;
        for (x, &y) in data.rows().zip(data.labels()) {
            let p = self.predict_proba(x)?;
            if argmax(&p) == y {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len() as f64)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::format(e.line() as u64, e.to_string()))?;
        file.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
        .0
}

pub(crate) fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

pub fn train(kind: ClassifierKind, data: &Dataset, config: &TrainConfig) -> Result<ClassifierModel> {
    let mut model = ClassifierModel::initialise(kind, data, config)?;
    model.fit(data)?;
    Ok(model)
}

pub fn train_lr(data: &Dataset, config: &TrainConfig) -> Result<ClassifierModel> {
    train(ClassifierKind::Lr, data, config)
}

pub fn train_mlp(data: &Dataset, config: &TrainConfig) -> Result<ClassifierModel> {
    train(ClassifierKind::Mlp, data, config)
}

/// Class probabilities keyed by method.
pub fn predict_scores(model: &ClassifierModel, vector: &[f64]) -> Result<ScoreMap> {
    let p = model.predict_proba(vector)?;
    Ok(model.method_index.iter().cloned().zip(p).collect())
}

/// Encodes an observation over `test_index`: 1 where the test failed, 0
/// where it passed.
///
/// Under [`Scope::Failing`] the model must have been trained on a matrix
/// restricted to exactly the failing tests, so every entry is 1.
pub fn build_query_vector(
    obs: &FailureObservation,
    test_index: &[TestId],
    scope: Scope,
) -> Result<Vec<f64>> {
    obs.validate()?;
    match scope {
        Scope::Failing => {
            let index: std::collections::BTreeSet<&TestId> = test_index.iter().collect();
            let failing: std::collections::BTreeSet<&TestId> = obs.failing.iter().collect();
            if index != failing || index.len() != test_index.len() {
                return Err(Error::InvalidObservation(
                    "F-scope models must be trained on exactly the failing tests".into(),
                ));
            }
            Ok(vec![1.0; test_index.len()])
        }
        Scope::FailingPassing => {
            let passing = obs.passing.as_ref().ok_or_else(|| {
                Error::InvalidObservation("F+P scope requires a passing set".into())
            })?;
            for t in obs.failing.iter().chain(passing) {
                if !test_index.contains(t) {
                    return Err(Error::InvalidObservation(format!(
                        "observed test `{t}` is unknown to the model"
                    )));
                }
            }
            test_index
                .iter()
                .map(|t| {
                    if obs.failing.contains(t) {
                        Ok(1.0)
                    } else if passing.contains(t) {
                        Ok(0.0)
                    } else {
                        Err(Error::InvalidObservation(format!(
                            "test `{t}` is neither failing nor passing"
                        )))
                    }
                })
                .collect()
        }
    }
}

/// Trains on the kill matrix as seen by `scope` and scores the observation.
/// F scope restricts the matrix to the failing tests first.
pub fn localize_with_classifier(
    matrix: &KillMatrix,
    obs: &FailureObservation,
    kind: ClassifierKind,
    scope: Scope,
    config: &TrainConfig,
) -> Result<(ClassifierModel, ScoreMap)> {
    obs.validate()?;
    let training = match scope {
        Scope::Failing => {
            let cols: Vec<&str> = obs.failing.iter().map(TestId::as_str).collect();
            matrix.restrict(&cols).map_err(|e| match e {
                Error::NotFound(what) => {
                    Error::InvalidObservation(format!("{what} is not a matrix column"))
                }
                other => other,
            })?
        }
        Scope::FailingPassing => matrix.clone(),
    };
    let data = build_dataset(&training)?;
    let model = train(kind, &data, config)?;
    let query = build_query_vector(obs, model.test_index(), scope)?;
    let scores = predict_scores(&model, &query)?;
    Ok((model, scores))
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    kind: ClassifierKind,
    shapes: Shapes,
    weights: Weights,
    test_index: Vec<TestId>,
    method_index: Vec<MethodId>,
    train_config: TrainConfig,
    final_loss: Option<f64>,
    loss_curve: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Shapes {
    features: usize,
    hidden: usize,
    classes: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Weights {
    Mlp {
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: Vec<f64>,
    },
    Lr {
        w: Vec<f64>,
        b: Vec<f64>,
    },
}

impl From<&ClassifierModel> for ModelFile {
    fn from(m: &ClassifierModel) -> Self {
        let weights = match m.kind {
            ClassifierKind::Lr => {
                let (w, b) = m.params.split_at(m.n_classes * m.n_features);
                Weights::Lr {
                    w: w.to_vec(),
                    b: b.to_vec(),
                }
            }
            ClassifierKind::Mlp => {
                let (w1, b1, w2, b2) = m.mlp_shape().split(&m.params);
                Weights::Mlp {
                    w1: w1.to_vec(),
                    b1: b1.to_vec(),
                    w2: w2.to_vec(),
                    b2: b2.to_vec(),
                }
            }
        };
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            kind: m.kind,
            shapes: Shapes {
                features: m.n_features,
                hidden: m.n_hidden,
                classes: m.n_classes,
            },
            weights,
            test_index: m.test_index.clone(),
            method_index: m.method_index.clone(),
            train_config: m.config,
            final_loss: m.final_loss(),
            loss_curve: m.loss_curve.clone(),
        }
    }
}

impl TryFrom<ModelFile> for ClassifierModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported model format version {}",
                f.format_version
            )));
        }
        let Shapes {
            features,
            hidden,
            classes,
        } = f.shapes;
        if f.test_index.len() != features || f.method_index.len() != classes {
            return Err(Error::InvalidConfig(
                "model indices disagree with declared shapes".into(),
            ));
        }
        let params = match (f.kind, f.weights) {
            (ClassifierKind::Lr, Weights::Lr { w, b }) => {
                if w.len() != classes * features || b.len() != classes {
                    return Err(Error::InvalidConfig("LR weight shapes are inconsistent".into()));
                }
                [w, b].concat()
            }
            (ClassifierKind::Mlp, Weights::Mlp { w1, b1, w2, b2 }) => {
                if w1.len() != features * hidden
                    || b1.len() != hidden
                    || w2.len() != hidden * classes
                    || b2.len() != classes
                {
                    return Err(Error::InvalidConfig("MLP weight shapes are inconsistent".into()));
                }
                [w1, b1, w2, b2].concat()
            }
            _ => return Err(Error::InvalidConfig("weights do not match model kind".into())),
        };
        Ok(ClassifierModel {
            kind: f.kind,
            n_features: features,
            n_hidden: if f.kind == ClassifierKind::Lr { 0 } else { hidden },
            n_classes: classes,
            params,
            test_index: f.test_index,
            method_index: f.method_index,
            config: f.train_config,
            loss_curve: f.loss_curve,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_matrix;

    fn toy(rows: &[(&[f64], usize)], copies: usize, classes: &[&str]) -> Dataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..copies {
            for (r, l) in rows {
                x.push(r.to_vec());
                y.push(*l);
            }
        }
        let d = rows[0].0.len();
        Dataset::new(
            x,
            y,
            classes.iter().map(|c| MethodId::new(*c)).collect(),
            (0..d).map(|i| TestId::new(format!("t{i}"))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn dataset_from_example() {
        let d = build_dataset(&example_matrix()).unwrap();
        assert_eq!((d.len(), d.n_features()), (7, 4));
        assert_eq!(d.row(0), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(d.labels(), [0, 0, 0, 0, 1, 1, 1]);
        assert_eq!(d.method_index()[0].as_str(), "getType");
        assert_eq!(d.row(2), d.row(3));
        let empty = example_matrix().select_mutants(&[]);
        assert!(matches!(build_dataset(&empty), Err(Error::EmptyDataset)));
    }

    #[test]
    fn lr_separates_linear_toy() {
        let d = toy(&[(&[1.0, 0.0], 0), (&[0.0, 1.0], 1)], 10, &["A", "B"]);
        let m = train_lr(&d, &TrainConfig::default()).unwrap();
        assert_eq!(m.accuracy(&d).unwrap(), 1.0);
    }

    #[test]
    fn single_class_is_certain() {
        let d = toy(&[(&[1.0, 0.0], 0), (&[0.0, 1.0], 0)], 3, &["A"]);
        let m = train_lr(&d, &TrainConfig::default()).unwrap();
        let p = predict_scores(&m, &[1.0, 1.0]).unwrap();
        assert!(p["A"] >= 0.99);
    }

    #[test]
    fn mlp_learns_xor() {
        let d = toy(
            &[
                (&[0.0, 0.0], 0),
                (&[1.0, 1.0], 0),
                (&[0.0, 1.0], 1),
                (&[1.0, 0.0], 1),
            ],
            25,
            &["A", "B"],
        );
        let cfg = TrainConfig {
            hidden_size: 8,
            max_iter: 500,
            ..TrainConfig::default()
        };
        let m = train_mlp(&d, &cfg).unwrap();
        assert_eq!(m.accuracy(&d).unwrap(), 1.0);
    }

    #[test]
    fn training_reduces_loss_on_example() {
        let d = build_dataset(&example_matrix()).unwrap();
        for kind in [ClassifierKind::Lr, ClassifierKind::Mlp] {
            let m = train(kind, &d, &TrainConfig::default()).unwrap();
            let curve = m.loss_curve();
            assert_eq!(curve.len(), 51);
            assert!(curve[50] < curve[0], "{kind}: {} !< {}", curve[50], curve[0]);
        }
    }

    #[test]
    fn zero_hidden_units_rejected() {
        let d = build_dataset(&example_matrix()).unwrap();
        let cfg = TrainConfig {
            hidden_size: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(train_mlp(&d, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn lr_prefers_get_type_for_its_majority_row() {
        let d = build_dataset(&example_matrix()).unwrap();
        let m = train_lr(&d, &TrainConfig::default()).unwrap();
        let s = predict_scores(&m, &[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(s["getType"] > s["resolveType"], "{s:?}");
        assert!((s.values().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(matches!(
            predict_scores(&m, &[0.0, 1.0]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn query_vectors() {
        let idx: Vec<TestId> = ["t1", "t2", "t3", "t4"].map(TestId::from).to_vec();
        let obs = FailureObservation::new(["t1", "t4"], Some(["t2", "t3"])).unwrap();
        assert_eq!(
            build_query_vector(&obs, &idx, Scope::FailingPassing).unwrap(),
            [1.0, 0.0, 0.0, 1.0]
        );
        let f_idx: Vec<TestId> = ["t1", "t4"].map(TestId::from).to_vec();
        assert_eq!(build_query_vector(&obs, &f_idx, Scope::Failing).unwrap(), [1.0, 1.0]);
        let partial = FailureObservation::new(["t1", "t4"], Some(["t2"])).unwrap();
        assert!(matches!(
            build_query_vector(&partial, &idx, Scope::FailingPassing),
            Err(Error::InvalidObservation(_))
        ));
        assert!(matches!(
            build_query_vector(&obs, &idx, Scope::Failing),
            Err(Error::InvalidObservation(_))
        ));
    }

    #[test]
    fn model_file_round_trip() {
        let d = build_dataset(&example_matrix()).unwrap();
        for kind in [ClassifierKind::Lr, ClassifierKind::Mlp] {
            let m = train(kind, &d, &TrainConfig::default()).unwrap();
            let json = m.to_json();
            let back = ClassifierModel::from_json(&json).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.to_json(), json);
            let q = [1.0, 0.0, 0.0, 1.0];
            assert_eq!(predict_scores(&back, &q).unwrap(), predict_scores(&m, &q).unwrap());
        }
    }

    #[test]
    fn f_scope_classifier_pipeline() {
        let obs = FailureObservation::failing_only(["t1", "t4"]).unwrap();
        let (model, scores) = localize_with_classifier(
            &example_matrix(),
            &obs,
            ClassifierKind::Lr,
            Scope::Failing,
            &TrainConfig::default(),
        )
        .unwrap();
        assert_eq!(model.test_index().len(), 2);
        assert!((scores.values().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
