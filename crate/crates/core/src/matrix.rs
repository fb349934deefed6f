//! Kill matrices: which tests detect which mutants, and where each mutant lives.
//!
//! A cell is `true` when the test fails on the mutant (the mutant is killed).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! name_newtype {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                Self(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

name_newtype!(TestId);
name_newtype!(MethodId);

/// Mutation operator that produced a mutant. `Imported` marks mutants read
/// from external tools whose operator is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MutationOperator {
    #[serde(rename = "AOR")]
    Aor,
    #[serde(rename = "ROR")]
    Ror,
    #[serde(rename = "LOR")]
    Lor,
    #[serde(rename = "SOR")]
    Sor,
    #[serde(rename = "COR")]
    Cor,
    #[serde(rename = "ORU")]
    Oru,
    #[serde(rename = "LVR")]
    Lvr,
    #[serde(rename = "STD")]
    Std,
    #[serde(rename = "imported")]
    Imported,
}

impl MutationOperator {
    /// The eight syntactic operators, in canonical order.
    pub const ALL: [MutationOperator; 8] = [
        MutationOperator::Aor,
        MutationOperator::Ror,
        MutationOperator::Lor,
        MutationOperator::Sor,
        MutationOperator::Cor,
        MutationOperator::Oru,
        MutationOperator::Lvr,
        MutationOperator::Std,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            MutationOperator::Aor => "AOR",
            MutationOperator::Ror => "ROR",
            MutationOperator::Lor => "LOR",
            MutationOperator::Sor => "SOR",
            MutationOperator::Cor => "COR",
            MutationOperator::Oru => "ORU",
            MutationOperator::Lvr => "LVR",
            MutationOperator::Std => "STD",
            MutationOperator::Imported => "imported",
        }
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MutationOperator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "imported" {
            return Ok(MutationOperator::Imported);
        }
        MutationOperator::ALL
            .into_iter()
            .find(|op| op.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown mutation operator `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub id: String,
    pub method: MethodId,
    pub operator: MutationOperator,
    pub description: String,
}

impl MutantRecord {
    pub fn new(
        id: impl Into<String>,
        method: impl Into<MethodId>,
        operator: MutationOperator,
        description: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            method: method.into(),
            operator,
            description: description.into(),
        }
    }
}

/// Immutable mutants × tests kill grid.
#[derive(Debug, Clone)]
pub struct KillMatrix {
    tests: Vec<TestId>,
    mutants: Vec<MutantRecord>,
    kills: Vec<bool>,
    test_pos: HashMap<TestId, usize>,
    mutant_pos: HashMap<String, usize>,
}

impl PartialEq for KillMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.tests == other.tests && self.mutants == other.mutants && self.kills == other.kills
    }
}

impl Eq for KillMatrix {}

impl KillMatrix {
    /// Builds a matrix from per-mutant kill rows. Each row must have one
    /// entry per test.
    pub fn new(
        tests: Vec<TestId>,
        mutants: Vec<MutantRecord>,
        rows: Vec<Vec<bool>>,
    ) -> Result<Self> {
        if rows.len() != mutants.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} kill rows for {} mutants",
                rows.len(),
                mutants.len()
            )));
        }
        let mut kills = Vec::with_capacity(tests.len() * mutants.len());
        for (row, mutant) in rows.iter().zip(&mutants) {
            if row.len() != tests.len() {
                return Err(Error::InvalidMatrix(format!(
                    "mutant `{}` has {} kill cells, expected {}",
                    mutant.id,
                    row.len(),
                    tests.len()
                )));
            }
            kills.extend_from_slice(row);
        }
        Self::from_flat(tests, mutants, kills)
    }

    pub(crate) fn from_flat(
        tests: Vec<TestId>,
        mutants: Vec<MutantRecord>,
        kills: Vec<bool>,
    ) -> Result<Self> {
        debug_assert_eq!(kills.len(), tests.len() * mutants.len());
        let mut test_pos = HashMap::with_capacity(tests.len());
        for (i, t) in tests.iter().enumerate() {
            if t.as_str().is_empty() {
                return Err(Error::InvalidMatrix("empty test name".into()));
            }
            if test_pos.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidMatrix(format!("duplicate test `{t}`")));
            }
        }
        let mut mutant_pos = HashMap::with_capacity(mutants.len());
        for (i, m) in mutants.iter().enumerate() {
            if m.id.is_empty() {
                return Err(Error::InvalidMatrix("empty mutant id".into()));
            }
            if m.method.as_str().is_empty() {
                return Err(Error::InvalidMatrix(format!(
                    "mutant `{}` has an empty method name",
                    m.id
                )));
            }
            if mutant_pos.insert(m.id.clone(), i).is_some() {
                return Err(Error::InvalidMatrix(format!("duplicate mutant `{}`", m.id)));
            }
        }
        Ok(Self {
            tests,
            mutants,
            kills,
            test_pos,
            mutant_pos,
        })
    }

    pub fn tests(&self) -> &[TestId] {
        &self.tests
    }

    pub fn mutants(&self) -> &[MutantRecord] {
        &self.mutants
    }

    pub fn num_tests(&self) -> usize {
        self.tests.len()
    }

    pub fn num_mutants(&self) -> usize {
        self.mutants.len()
    }

    /// Kill row of the mutant at `index`, one cell per test column.
    pub fn row(&self, index: usize) -> &[bool] {
        let n = self.tests.len();
        &self.kills[index * n..(index + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&MutantRecord, &[bool])> {
        self.mutants
            .iter()
            .enumerate()
            .map(move |(i, m)| (m, self.row(i)))
    }

    pub fn test_index(&self, test: &str) -> Option<usize> {
        self.test_pos.get(test).copied()
    }

    pub fn mutant_index(&self, id: &str) -> Option<usize> {
        self.mutant_pos.get(id).copied()
    }

    /// Distinct methods carrying at least one mutant, in order of first appearance.
    pub fn methods(&self) -> Vec<MethodId> {
        let mut seen = HashSet::new();
        self.mutants
            .iter()
            .filter(|m| seen.insert(&m.method))
            .map(|m| m.method.clone())
            .collect()
    }

    /// Tests that kill the given mutant.
    pub fn kill_set(&self, mutant_id: &str) -> Result<BTreeSet<TestId>> {
        let idx = self
            .mutant_index(mutant_id)
            .ok_or_else(|| Error::NotFound(format!("mutant `{mutant_id}`")))?;
        Ok(self
            .row(idx)
            .iter()
            .zip(&self.tests)
            .filter(|(killed, _)| **killed)
            .map(|(_, t)| t.clone())
            .collect())
    }

    /// Mutants located on `method`, in matrix order. Unknown methods yield
    /// an empty list.
    pub fn mutants_of(&self, method: &str) -> Vec<&MutantRecord> {
        self.mutants
            .iter()
            .filter(|m| m.method.as_str() == method)
            .collect()
    }

    /// Fraction of the method's mutants killed by `test`.
    pub fn fail_given_mutated(&self, method: &str, test: &str) -> Result<f64> {
        let col = self
            .test_index(test)
            .ok_or_else(|| Error::NotFound(format!("test `{test}`")))?;
        let mut total = 0usize;
        let mut killed = 0usize;
        for (i, m) in self.mutants.iter().enumerate() {
            if m.method.as_str() == method {
                total += 1;
                if self.row(i)[col] {
                    killed += 1;
                }
            }
        }
        if total == 0 {
            return Err(Error::EmptyStratum(method.to_owned()));
        }
        Ok(killed as f64 / total as f64)
    }

    /// Same mutants, columns reduced and reordered to `tests`.
    pub fn restrict<S: AsRef<str>>(&self, tests: &[S]) -> Result<KillMatrix> {
        let cols = tests
            .iter()
            .map(|t| {
                let t = t.as_ref();
                self.test_index(t)
                    .ok_or_else(|| Error::NotFound(format!("test `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut kills = Vec::with_capacity(cols.len() * self.mutants.len());
        for i in 0..self.mutants.len() {
            let row = self.row(i);
            kills.extend(cols.iter().map(|&c| row[c]));
        }
        let tests = cols.iter().map(|&c| self.tests[c].clone()).collect();
        KillMatrix::from_flat(tests, self.mutants.clone(), kills)
    }

    /// Keeps only the mutants at `indices` (in the given order), copying rows verbatim.
    pub fn select_mutants(&self, indices: &[usize]) -> KillMatrix {
        let mut kills = Vec::with_capacity(indices.len() * self.tests.len());
        let mut mutants = Vec::with_capacity(indices.len());
        for &i in indices {
            kills.extend_from_slice(self.row(i));
            mutants.push(self.mutants[i].clone());
        }
        KillMatrix::from_flat(self.tests.clone(), mutants, kills)
            .expect("subset of a valid matrix is valid")
    }

    /// The matrix without the mutant at `index`.
    pub fn without_mutant(&self, index: usize) -> KillMatrix {
        let keep: Vec<usize> = (0..self.mutants.len()).filter(|&i| i != index).collect();
        self.select_mutants(&keep)
    }
}

/// Observed test outcomes on a faulty version: failing tests and, optionally,
/// passing tests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureObservation {
    pub failing: BTreeSet<TestId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passing: Option<BTreeSet<TestId>>,
}

impl FailureObservation {
    pub fn new<I, J, S, T>(failing: I, passing: Option<J>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<TestId>,
        T: Into<TestId>,
    {
        let obs = Self {
            failing: failing.into_iter().map(Into::into).collect(),
            passing: passing.map(|p| p.into_iter().map(Into::into).collect()),
        };
        obs.validate()?;
        Ok(obs)
    }

    /// Failing-only observation.
    pub fn failing_only<I, S>(failing: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<TestId>,
    {
        Self::new(failing, None::<Vec<TestId>>)
    }

    pub fn validate(&self) -> Result<()> {
        if self.failing.is_empty() {
            return Err(Error::InvalidObservation("failing set is empty".into()));
        }
        if let Some(passing) = &self.passing {
            if let Some(t) = self.failing.intersection(passing).next() {
                return Err(Error::InvalidObservation(format!(
                    "test `{t}` is both failing and passing"
                )));
            }
        }
        Ok(())
    }

    pub fn is_failing(&self, test: &str) -> bool {
        self.failing.contains(test)
    }
}
