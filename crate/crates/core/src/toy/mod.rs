//! A small imperative language used to produce kill matrices end to end:
//! parse a program and its tests, enumerate mutants, run every test on every
//! mutant and record which ones fail.
//!
//! Programs live in `.toy` files and tests in `.toytest` files; the grammar
//! is documented in [`parser`].

pub mod ast;
pub mod interp;
mod lexer;
pub mod mutate;
pub mod parser;

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

pub use ast::{Program, Stmt};
pub use interp::{run_test, RunOutcome, DEFAULT_STEP_LIMIT};
pub use mutate::{generate_mutants, MutantInstance};
pub use parser::{parse, parse_tests};

use crate::matrix::{KillMatrix, MutantRecord, MutationOperator, TestId};
use lexer::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub name: String,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Error)]
pub enum LangError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("unresolved name `{name}` at {line}:{col}")]
    UnresolvedName { line: usize, col: usize, name: String },

    #[error("test `{test}` does not pass on the original program ({outcome})")]
    PreconditionFailed { test: String, outcome: RunOutcome },

    #[error("internal error: {0}")]
    Internal(String),
}

impl LangError {
    fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        LangError::Syntax {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    fn unresolved(pos: Pos, name: &str) -> Self {
        LangError::UnresolvedName {
            line: pos.line,
            col: pos.col,
            name: name.to_owned(),
        }
    }

    pub fn is_domain(&self) -> bool {
        matches!(self, LangError::PreconditionFailed { .. })
    }
}

/// Runs every test on every mutant. A cell is `true` when the test does not
/// pass on the mutant (FAIL, ERROR or TIMEOUT).
///
/// Every test must pass on `program` itself. `jobs > 1` spreads mutants over
/// a thread pool; the result does not depend on it.
pub fn build_kill_matrix(
    program: &Program,
    tests: &[TestCase],
    mutants: &[MutantInstance],
    step_limit: u64,
    jobs: usize,
) -> crate::Result<KillMatrix> {
    if step_limit == 0 {
        return Err(crate::Error::InvalidConfig("step limit must be at least 1".into()));
    }
    for t in tests {
        let outcome = run_test(program, t, step_limit);
        if outcome != RunOutcome::Pass {
            return Err(LangError::PreconditionFailed {
                test: t.name.clone(),
                outcome,
            }
            .into());
        }
    }

    let row_of = |m: &MutantInstance| -> Result<Vec<bool>, LangError> {
        let mutated = m.apply(program)?;
        Ok(tests
            .iter()
            .map(|t| run_test(&mutated, t, step_limit) != RunOutcome::Pass)
            .collect())
    };
    let rows: Vec<Vec<bool>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| crate::Error::InvalidConfig(e.to_string()))?;
        pool.install(|| mutants.par_iter().map(row_of).collect::<Result<_, _>>())?
    } else {
        mutants.iter().map(row_of).collect::<Result<_, _>>()?
    };

    let records = mutants
        .iter()
        .enumerate()
        .map(|(i, m)| {
            MutantRecord::new(format!("m{}", i + 1), m.method.clone(), m.operator, m.description())
        })
        .collect();
    let test_ids = tests.iter().map(|t| TestId::new(t.name.clone())).collect();
    KillMatrix::new(test_ids, records, rows)
}

/// Parses sources, generates mutants for `ops` and builds the kill matrix.
pub fn analyze(
    program_src: &str,
    tests_src: &str,
    ops: &BTreeSet<MutationOperator>,
    step_limit: u64,
    jobs: usize,
) -> crate::Result<KillMatrix> {
    let program = parse(program_src)?;
    let tests = parse_tests(tests_src, &program)?;
    let mutants = generate_mutants(&program, ops);
    build_kill_matrix(&program, &tests, &mutants, step_limit, jobs)
}
