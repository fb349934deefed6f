//! Planted-fault evaluation: every killed mutant in turn plays the real
//! fault. Its kill row is the observed symptom and the localiser only sees
//! the remaining mutants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{score_over, ModelSpec, RankerConfig};
use crate::error::{Error, Result};
use crate::matrix::{FailureObservation, KillMatrix, MethodId};
use crate::metrics::{acc_at_n, average_precision, best_rank, mean_average_precision, wef, FaultSpec};
use crate::ranking::rank;
use crate::sampling::SamplePlan;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Worker threads; 0 or 1 runs sequentially.
    pub jobs: usize,
    /// Reduce the reference matrix before localising.
    pub sample: Option<SamplePlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultOutcome {
    pub fault_id: String,
    pub method: MethodId,
    pub best_rank: Option<usize>,
    pub wef: usize,
    pub average_precision: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccSummary {
    #[serde(rename = "acc@1")]
    pub at1: usize,
    #[serde(rename = "acc@3")]
    pub at3: usize,
    #[serde(rename = "acc@5")]
    pub at5: usize,
    #[serde(rename = "acc@10")]
    pub at10: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WefSummary {
    pub median: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub faults: Vec<FaultOutcome>,
    /// Mutants skipped because no test kills them.
    pub skipped: usize,
    pub acc: AccSummary,
    pub wef: WefSummary,
    pub map: f64,
}

impl EvalReport {
    pub fn from_outcomes(model: String, faults: Vec<FaultOutcome>, skipped: usize) -> Self {
        let ranks: Vec<Option<usize>> = faults.iter().map(|f| f.best_rank).collect();
        let acc = AccSummary {
            at1: acc_at_n(&ranks, 1),
            at3: acc_at_n(&ranks, 3),
            at5: acc_at_n(&ranks, 5),
            at10: acc_at_n(&ranks, 10),
        };
        let wefs: Vec<f64> = faults.iter().map(|f| f.wef as f64).collect();
        let aps: Vec<f64> = faults.iter().map(|f| f.average_precision).collect();
        Self {
            model,
            skipped,
            acc,
            wef: summarize(&wefs),
            map: mean_average_precision(&aps),
            faults,
        }
    }

    pub fn num_faults(&self) -> usize {
        self.faults.len()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// Aligned summary table: acc@1/3/5/10, wef median/mean/std, MAP.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<10} {:>6} {:>6} {:>6} {:>6} {:>6} | {:>8} {:>8} {:>8} | {:>6}\n",
            "model", "faults", "acc@1", "acc@3", "acc@5", "acc@10", "wef_med", "wef_mean", "wef_std", "MAP"
        );
        out.push_str(&format!(
            "{:<10} {:>6} {:>6} {:>6} {:>6} {:>6} | {:>8.1} {:>8.2} {:>8.2} | {:>6.3}\n",
            self.model,
            self.num_faults(),
            self.acc.at1,
            self.acc.at3,
            self.acc.at5,
            self.acc.at10,
            self.wef.median,
            self.wef.mean,
            self.wef.std,
            self.map
        ));
        out
    }
}

fn summarize(values: &[f64]) -> WefSummary {
    if values.is_empty() {
        return WefSummary {
            median: 0.0,
            mean: 0.0,
            std: 0.0,
        };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    WefSummary {
        median,
        mean,
        std: var.sqrt(),
    }
}

/// Observation produced by the mutant at `index`: its killers fail, every
/// other test passes.
pub fn planted_observation(matrix: &KillMatrix, index: usize) -> Option<FailureObservation> {
    let row = matrix.row(index);
    let (failing, passing): (Vec<_>, Vec<_>) = matrix
        .tests()
        .iter()
        .zip(row)
        .partition(|(_, &killed)| killed);
    if failing.is_empty() {
        return None;
    }
    Some(FailureObservation {
        failing: failing.into_iter().map(|(t, _)| t.clone()).collect(),
        passing: Some(passing.into_iter().map(|(t, _)| t.clone()).collect()),
    })
}

pub fn planted_fault_eval(
    matrix: &KillMatrix,
    spec: ModelSpec,
    config: &RankerConfig,
    options: &EvalOptions,
) -> Result<EvalReport> {
    config.validate()?;
    if matrix.num_mutants() < 2 {
        return Err(Error::NothingToEvaluate(
            "planted-fault evaluation needs at least two mutants".into(),
        ));
    }
    let reference = match &options.sample {
        Some(plan) => plan.apply(matrix)?,
        None => matrix.clone(),
    };
    let universe = matrix.methods();

    let planted: Vec<(usize, FailureObservation)> = (0..matrix.num_mutants())
        .filter_map(|i| planted_observation(matrix, i).map(|obs| (i, obs)))
        .collect();
    let skipped = matrix.num_mutants() - planted.len();
    if planted.is_empty() {
        return Err(Error::NothingToEvaluate("no mutant is killed by any test".into()));
    }

    let evaluate_one = |(i, obs): &(usize, FailureObservation)| -> Result<FaultOutcome> {
        let mutant = &matrix.mutants()[*i];
        let held_out = match reference.mutant_index(&mutant.id) {
            Some(j) => reference.without_mutant(j),
            None => reference.clone(),
        };
        let scores = score_over(&held_out, obs, spec, config, &universe)?;
        let ranking = rank(&scores);
        let fault = FaultSpec::new(mutant.id.clone(), [mutant.method.clone()]);
        Ok(FaultOutcome {
            fault_id: mutant.id.clone(),
            method: mutant.method.clone(),
            best_rank: best_rank(&ranking, &fault),
            wef: wef(&ranking, &fault),
            average_precision: average_precision(&ranking, &fault),
        })
    };

    let outcomes: Vec<FaultOutcome> = if options.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| planted.par_iter().map(evaluate_one).collect::<Result<_>>())?
    } else {
        planted.iter().map(evaluate_one).collect::<Result<_>>()?
    };

    Ok(EvalReport::from_outcomes(spec.to_string(), outcomes, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{ModelFamily, Scope};
    use crate::fixtures::example_matrix;

    const PM_PLUS_F: ModelSpec = ModelSpec::new(ModelFamily::PartialAdditive, Scope::Failing);

    #[test]
    fn example_harness() {
        let report =
            planted_fault_eval(&example_matrix(), PM_PLUS_F, &RankerConfig::default(), &EvalOptions::default())
                .unwrap();
        assert_eq!(report.num_faults(), 7);
        assert_eq!(report.skipped, 0);
        let m1 = &report.faults[0];
        assert_eq!(m1.fault_id, "m1");
        assert_eq!(m1.best_rank, Some(1));
        assert_eq!(m1.wef, 0);
        let a = report.acc;
        assert!(a.at1 <= a.at3 && a.at3 <= a.at5 && a.at5 <= a.at10 && a.at10 <= 7);
        assert!((0.0..=1.0).contains(&report.map));
    }

    #[test]
    fn needs_two_mutants() {
        let m = example_matrix().select_mutants(&[0]);
        assert!(matches!(
            planted_fault_eval(&m, PM_PLUS_F, &RankerConfig::default(), &EvalOptions::default()),
            Err(Error::NothingToEvaluate(_))
        ));
    }

    #[test]
    fn unkilled_mutants_are_skipped() {
        let base = example_matrix();
        let mut rows: Vec<Vec<bool>> = base.rows().map(|(_, r)| r.to_vec()).collect();
        rows[2] = vec![false; 4];
        let m = KillMatrix::new(base.tests().to_vec(), base.mutants().to_vec(), rows).unwrap();
        let report =
            planted_fault_eval(&m, PM_PLUS_F, &RankerConfig::default(), &EvalOptions::default())
                .unwrap();
        assert_eq!(report.num_faults(), 6);
        assert_eq!(report.skipped, 1);

        let dead = KillMatrix::new(
            base.tests().to_vec(),
            base.mutants().to_vec(),
            vec![vec![false; 4]; 7],
        )
        .unwrap();
        assert!(matches!(
            planted_fault_eval(&dead, PM_PLUS_F, &RankerConfig::default(), &EvalOptions::default()),
            Err(Error::NothingToEvaluate(_))
        ));
    }

    #[test]
    fn parallel_matches_sequential() {
        let m = example_matrix();
        let cfg = RankerConfig::default();
        for spec in ModelSpec::ALL {
            let seq = planted_fault_eval(&m, spec, &cfg, &EvalOptions::default()).unwrap();
            let par = planted_fault_eval(
                &m,
                spec,
                &cfg,
                &EvalOptions {
                    jobs: 4,
                    sample: None,
                },
            )
            .unwrap();
            assert_eq!(seq, par);
        }
    }

    #[test]
    fn wef_summary_stats() {
        let s = summarize(&[0.0, 1.0, 2.0, 5.0]);
        assert_eq!(s.median, 1.5);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 3.5f64.sqrt()).abs() < 1e-12);
    }
}
