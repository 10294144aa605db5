//! Alignment scoring and the diagnostic quantities used in repair studies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llm::{Answer, LlmVerdict};
use crate::model::{Alignment, OntologyDoc};
use crate::textprep::ReservedWordSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub alignment_size: usize,
    pub reference_size: usize,
}

impl EvalReport {
    /// Builds a report from raw counts; zero denominators give 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EvalReport {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
            alignment_size: tp + fp,
            reference_size: tp + fn_,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Compares cells by `(entity1, entity2)`; confidence is ignored.
pub fn evaluate(alignment: &Alignment, reference: &Alignment) -> EvalReport {
    let tp = alignment
        .cells()
        .filter(|c| reference.contains_pair(&c.entity1, &c.entity2))
        .count();
    EvalReport::from_counts(tp, alignment.len() - tp, reference.len() - tp)
}

/// Whether adding `delta_tp` true and `delta_fp` false positives raises the
/// precision `tp / (tp + fp)`. Compared exactly in integer arithmetic.
pub fn improvement_condition(delta_tp: u64, delta_fp: u64, tp: u64, fp: u64) -> bool {
    let (new_tp, new_total) = ((tp + delta_tp) as u128, (tp + delta_tp + fp + delta_fp) as u128);
    let (old_tp, old_total) = (tp as u128, (tp + fp) as u128);
    if new_total == 0 || old_total == 0 {
        return false;
    }
    new_tp * old_total > old_tp * new_total
}

/// Fraction of verdicts equal to `expected`. Unparseable answers never count.
pub fn discovery_rate(verdicts: &[LlmVerdict], expected: Answer) -> Result<f64> {
    if verdicts.is_empty() {
        return Err(Error::EmptyInput("verdicts"));
    }
    let hits = verdicts.iter().filter(|v| v.answer == expected).count();
    Ok(hits as f64 / verdicts.len() as f64)
}

/// Reserved words per 100 entities of the two ontologies.
pub fn reserved_density(
    reserved: &ReservedWordSet,
    source: &OntologyDoc,
    target: &OntologyDoc,
) -> Result<f64> {
    let entities = source.len() + target.len();
    if entities == 0 {
        return Err(Error::EmptyInput("ontologies"));
    }
    Ok(100.0 * reserved.len() as f64 / entities as f64)
}
