//! Counting-based suspiciousness models over a kill matrix.
//!
//! Every model compares the observed failure symptom against each mutant's
//! kill row and aggregates per method:
//!
//! | family | F scope (failing columns only)        | FP scope (failing + passing columns)       |
//! |--------|----------------------------------------|--------------------------------------------|
//! | EM     | mutants killed by every failing test   | mutants whose kill set equals the failing set |
//! | PM*    | ∏ over failing tests of (killers + ε)  | ∏ over all tests of (agreeing mutants + ε) |
//! | PM+    | Σ over failing tests of killers        | Σ over all tests of agreeing mutants       |
//!
//! A mutant *agrees* with the symptom on test `t` when it is killed by `t`
//! exactly when `t` failed.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{FailureObservation, KillMatrix, MethodId};
use crate::ranking::{rank, Ranking, ScoreMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelFamily {
    #[serde(rename = "EM")]
    ExactMatch,
    #[serde(rename = "PM*")]
    PartialMultiplicative,
    #[serde(rename = "PM+")]
    PartialAdditive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scope {
    /// Failing tests only.
    #[serde(rename = "F")]
    Failing,
    /// Failing and passing tests.
    #[serde(rename = "FP")]
    FailingPassing,
}

impl FromStr for ModelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "em" => Ok(ModelFamily::ExactMatch),
            "pm*" | "pmstar" | "pm-star" => Ok(ModelFamily::PartialMultiplicative),
            "pm+" | "pmplus" | "pm-plus" => Ok(ModelFamily::PartialAdditive),
            _ => Err(format!("unknown model family `{s}` (expected em, pm*, pm+)")),
        }
    }
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f" => Ok(Scope::Failing),
            "fp" | "f+p" => Ok(Scope::FailingPassing),
            _ => Err(format!("unknown scope `{s}` (expected f or fp)")),
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelFamily::ExactMatch => "EM",
            ModelFamily::PartialMultiplicative => "PM*",
            ModelFamily::PartialAdditive => "PM+",
        })
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Failing => "F",
            Scope::FailingPassing => "F+P",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub scope: Scope,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 6] = [
        ModelSpec::new(ModelFamily::ExactMatch, Scope::Failing),
        ModelSpec::new(ModelFamily::ExactMatch, Scope::FailingPassing),
        ModelSpec::new(ModelFamily::PartialMultiplicative, Scope::Failing),
        ModelSpec::new(ModelFamily::PartialAdditive, Scope::Failing),
        ModelSpec::new(ModelFamily::PartialMultiplicative, Scope::FailingPassing),
        ModelSpec::new(ModelFamily::PartialAdditive, Scope::FailingPassing),
    ];

    pub const fn new(family: ModelFamily, scope: Scope) -> Self {
        Self { family, scope }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.scope)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankerConfig {
    pub epsilon: f64,
}

impl Default for RankerConfig {
    fn default() -> Self {
        Self { epsilon: 0.001 }
    }
}

impl RankerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon > 0.0 && self.epsilon.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )))
        }
    }
}

/// Per-method agreement counts between mutant kill rows and the symptom.
struct Tally {
    /// Column indices of the considered tests, in matrix order.
    columns: Vec<usize>,
    /// Expected kill value per considered column (`true` = the test failed).
    expected: Vec<bool>,
    per_method: HashMap<MethodId, MethodTally>,
}

#[derive(Default)]
struct MethodTally {
    /// Mutants agreeing with the symptom on every considered column.
    exact: u64,
    /// Per considered column, mutants agreeing on that column.
    agree: Vec<u64>,
}

impl Tally {
    fn new(matrix: &KillMatrix, obs: &FailureObservation, scope: Scope) -> Result<Self> {
        obs.validate()?;
        let mut columns = Vec::new();
        for t in &obs.failing {
            columns.push(matrix.test_index(t.as_str()).ok_or_else(|| {
                Error::InvalidObservation(format!("failing test `{t}` is not a matrix column"))
            })?);
        }
        if scope == Scope::FailingPassing {
            let passing = obs.passing.as_ref().ok_or_else(|| {
                Error::InvalidObservation("F+P scope requires a passing set".into())
            })?;
            for t in passing {
                columns.push(matrix.test_index(t.as_str()).ok_or_else(|| {
                    Error::InvalidObservation(format!(
                        "passing test `{t}` is not a matrix column"
                    ))
                })?);
            }
        }
        columns.sort_unstable();
        let expected: Vec<bool> = columns
            .iter()
            .map(|&c| obs.is_failing(matrix.tests()[c].as_str()))
            .collect();

        let mut per_method: HashMap<MethodId, MethodTally> = HashMap::new();
        for (mutant, row) in matrix.rows() {
            let entry = per_method
                .entry(mutant.method.clone())
                .or_insert_with(|| MethodTally {
                    exact: 0,
                    agree: vec![0; columns.len()],
                });
            let mut all = true;
            for (k, (&c, &want)) in columns.iter().zip(&expected).enumerate() {
                if row[c] == want {
                    entry.agree[k] += 1;
                } else {
                    all = false;
                }
            }
            if all {
                entry.exact += 1;
            }
        }
        Ok(Self {
            columns,
            expected,
            per_method,
        })
    }

    fn score(&self, method: &MethodId, family: ModelFamily, epsilon: f64) -> f64 {
        let empty;
        let tally = match self.per_method.get(method) {
            Some(t) => t,
            None => {
                empty = MethodTally {
                    exact: 0,
                    agree: vec![0; self.columns.len()],
                };
                &empty
            }
        };
        match family {
            ModelFamily::ExactMatch => tally.exact as f64,
            ModelFamily::PartialAdditive => tally.agree.iter().sum::<u64>() as f64,
            ModelFamily::PartialMultiplicative => tally
                .agree
                .iter()
                .map(|&n| n as f64 + epsilon)
                .product(),
        }
    }
}

/// Scores every method of `universe`. Methods without mutants in `matrix`
/// get the score of an empty mutant set.
pub fn score_over(
    matrix: &KillMatrix,
    obs: &FailureObservation,
    spec: ModelSpec,
    config: &RankerConfig,
    universe: &[MethodId],
) -> Result<ScoreMap> {
    config.validate()?;
    let tally = Tally::new(matrix, obs, spec.scope)?;
    debug_assert_eq!(tally.columns.len(), tally.expected.len());
    Ok(universe
        .iter()
        .map(|m| (m.clone(), tally.score(m, spec.family, config.epsilon)))
        .collect())
}

pub fn score(
    matrix: &KillMatrix,
    obs: &FailureObservation,
    spec: ModelSpec,
    config: &RankerConfig,
) -> Result<ScoreMap> {
    score_over(matrix, obs, spec, config, &matrix.methods())
}

/// Exact-match model: number of mutants per method whose kill pattern
/// reproduces the symptom.
pub fn score_em(matrix: &KillMatrix, obs: &FailureObservation, scope: Scope) -> Result<ScoreMap> {
    score(
        matrix,
        obs,
        ModelSpec::new(ModelFamily::ExactMatch, scope),
        &RankerConfig::default(),
    )
}

pub fn score_pm_star(
    matrix: &KillMatrix,
    obs: &FailureObservation,
    scope: Scope,
    config: &RankerConfig,
) -> Result<ScoreMap> {
    score(
        matrix,
        obs,
        ModelSpec::new(ModelFamily::PartialMultiplicative, scope),
        config,
    )
}

pub fn score_pm_plus(
    matrix: &KillMatrix,
    obs: &FailureObservation,
    scope: Scope,
) -> Result<ScoreMap> {
    score(
        matrix,
        obs,
        ModelSpec::new(ModelFamily::PartialAdditive, scope),
        &RankerConfig::default(),
    )
}

pub fn localize(
    matrix: &KillMatrix,
    obs: &FailureObservation,
    spec: ModelSpec,
    config: &RankerConfig,
) -> Result<Ranking> {
    Ok(rank(&score(matrix, obs, spec, config)?))
}
