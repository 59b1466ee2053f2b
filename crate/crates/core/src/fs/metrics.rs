use std::collections::BTreeMap;

use super::BenchError;
use crate::inference::MarginalTable;
use crate::logic::GroundAtom;

/// Average precision over `(score, label)` pairs.
///
/// Pairs are ranked by descending score and tied scores form one threshold
/// block, so the result does not depend on input order.
pub fn average_precision(pairs: &[(f64, bool)]) -> Result<f64, BenchError> {
    let positives = pairs.iter().filter(|(_, l)| *l).count();
    if positives == 0 {
        return Err(BenchError::NoPositives);
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut tp, mut seen, mut ap) = (0usize, 0usize, 0.0);
    let mut i = 0;
    while i < sorted.len() {
        let score = sorted[i].0;
        let mut block_tp = 0;
        while i < sorted.len() && sorted[i].0 == score {
            block_tp += sorted[i].1 as usize;
            seen += 1;
            i += 1;
        }
        if block_tp > 0 {
            tp += block_tp;
            let precision = tp as f64 / seen as f64;
            ap += precision * block_tp as f64 / positives as f64;
        }
    }
    Ok(ap)
}

/// Area under the precision-recall curve of `scores` against `labels`.
pub fn pr_auc(
    scores: &MarginalTable,
    labels: &BTreeMap<GroundAtom, bool>,
) -> Result<f64, BenchError> {
    let pairs = labels
        .iter()
        .map(|(atom, &label)| {
            scores
                .get(atom)
                .map(|s| (s, label))
                .ok_or_else(|| BenchError::MissingScore(atom.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    average_precision(&pairs)
}
