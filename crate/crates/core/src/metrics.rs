//! Binary classification metrics for imbalanced data.
//!
//! With a ~10% positive class, raw accuracy is a weak signal: predicting
//! "not a pulsar" for everything already scores around 0.9. The report
//! therefore carries precision, recall, F1, and the Matthews correlation
//! coefficient (MCC) alongside accuracy; MCC stays near zero for such
//! degenerate predictors and only rewards balanced performance on both
//! classes.
//!
//! All metrics are returned at full precision. Rounding (three decimals in
//! the result tables) happens at the presentation layer only.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("label vectors differ in length: {actual} actual vs {predicted} predicted")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("label {value} at position {index} is not binary")]
    NonBinaryLabel { value: u8, index: usize },
    #[error("confusion counts are all zero")]
    EmptyConfusion,
}

/// The four cells of a binary confusion matrix, with class 1 ("pulsar")
/// as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl ConfusionCounts {
    pub fn new(
        true_positives: u64,
        false_positives: u64,
        false_negatives: u64,
        true_negatives: u64,
    ) -> Self {
        Self {
            true_positives,
            false_positives,
            false_negatives,
            true_negatives,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.false_negatives + self.true_negatives
    }
}

/// All five reported metrics, at full floating-point precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mcc: f64,
}

/// Tallies the confusion matrix of a prediction vector against the truth.
///
/// Both vectors must have the same length and contain only 0/1 labels.
/// Empty inputs produce all-zero counts (which [`report`] then rejects).
pub fn confusion(actual: &[u8], predicted: &[u8]) -> Result<ConfusionCounts, MetricsError> {
    if actual.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    check_binary(actual)?;
    check_binary(predicted)?;
    let mut counts = ConfusionCounts::new(0, 0, 0, 0);
    for (&truth, &guess) in actual.iter().zip(predicted) {
        match (truth, guess) {
            (1, 1) => counts.true_positives += 1,
            (0, 1) => counts.false_positives += 1,
            (1, 0) => counts.false_negatives += 1,
            _ => counts.true_negatives += 1,
        }
    }
    Ok(counts)
}

/// Computes the five-metric report from confusion counts.
///
/// Degenerate denominators are defined away rather than erroring: precision,
/// recall, and F1 fall back to 0.0 when their denominator is zero, and MCC
/// is 0.0 whenever any of its four marginals is zero (an uninformative
/// predictor, not an undefined one). Only an entirely empty confusion matrix
/// is an error.
pub fn report(counts: &ConfusionCounts) -> Result<MetricsReport, MetricsError> {
    let total = counts.total();
    if total == 0 {
        return Err(MetricsError::EmptyConfusion);
    }
    let tp = counts.true_positives as f64;
    let fp = counts.false_positives as f64;
    let fn_ = counts.false_negatives as f64;
    let tn = counts.true_negatives as f64;

    let accuracy = (tp + tn) / total as f64;
    let precision = ratio_or_zero(tp, tp + fp);
    let recall = ratio_or_zero(tp, tp + fn_);
    let f1 = ratio_or_zero(2.0 * precision * recall, precision + recall);

    let marginals = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    let mcc = if marginals.contains(&0.0) {
        0.0
    } else {
        (tp * tn - fp * fn_) / marginals.iter().product::<f64>().sqrt()
    };

    Ok(MetricsReport {
        accuracy,
        precision,
        recall,
        f1,
        mcc,
    })
}

fn ratio_or_zero(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

fn check_binary(labels: &[u8]) -> Result<(), MetricsError> {
    match labels.iter().position(|&value| value > 1) {
        Some(index) => Err(MetricsError::NonBinaryLabel {
            value: labels[index],
            index,
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Rounds to three decimals as an integer count of thousandths, so
    /// rounded values compare exactly.
    fn milli(x: f64) -> i64 {
        (x * 1000.0).round() as i64
    }

    fn milli_report(counts: &ConfusionCounts) -> [i64; 5] {
        let r = report(counts).unwrap();
        [
            milli(r.accuracy),
            milli(r.precision),
            milli(r.recall),
            milli(r.f1),
            milli(r.mcc),
        ]
    }

    #[test]
    fn survey_scale_confusion_rounds_to_expected_report() {
        // Confusion (10, 11, 0, 179) on a 200-sample test set; the expected
        // five-tuple was cross-checked by the exhaustive inversion below.
        assert_eq!(
            milli_report(&ConfusionCounts::new(10, 11, 0, 179)),
            [945, 476, 1000, 645, 670]
        );
        assert_eq!(
            milli_report(&ConfusionCounts::new(3, 5, 1, 111)),
            [950, 375, 750, 500, 509]
        );
    }

    /// Searches every integer confusion matrix with `total <= max_total`
    /// whose rounded five-metric report matches `target` (in thousandths).
    fn invert_rounded_report(target: [i64; 5], max_total: u64) -> Vec<ConfusionCounts> {
        let mut matches = Vec::new();
        for total in 1..=max_total {
            for tp in 0..=total {
                for fp in 0..=(total - tp) {
                    let precision = if tp + fp == 0 {
                        0.0
                    } else {
                        tp as f64 / (tp + fp) as f64
                    };
                    if milli(precision) != target[1] {
                        continue;
                    }
                    for fn_ in 0..=(total - tp - fp) {
                        let counts =
                            ConfusionCounts::new(tp, fp, fn_, total - tp - fp - fn_);
                        if milli_report(&counts) == target {
                            matches.push(counts);
                        }
                    }
                }
            }
        }
        matches
    }

    #[test]
    fn rounded_reports_invert_to_the_frozen_counts() {
        let matches = invert_rounded_report([945, 476, 1000, 645, 670], 400);
        let expected = ConfusionCounts::new(10, 11, 0, 179);
        assert!(matches.contains(&expected));
        let at_total: Vec<_> = matches.iter().filter(|c| c.total() == 200).collect();
        assert_eq!(at_total, vec![&expected]);

        let matches = invert_rounded_report([950, 375, 750, 500, 509], 400);
        let expected = ConfusionCounts::new(3, 5, 1, 111);
        assert!(matches.contains(&expected));
        let at_total: Vec<_> = matches.iter().filter(|c| c.total() == 120).collect();
        assert_eq!(at_total, vec![&expected]);
    }

    #[test]
    fn confusion_tallies_by_cell() {
        let actual = [1, 1, 0, 0, 1, 0];
        let predicted = [1, 0, 1, 0, 1, 0];
        let counts = confusion(&actual, &predicted).unwrap();
        assert_eq!(counts, ConfusionCounts::new(2, 1, 1, 2));
    }

    #[test]
    fn confusion_rejects_bad_inputs() {
        assert_eq!(
            confusion(&[1, 0], &[1]).unwrap_err(),
            MetricsError::LengthMismatch {
                actual: 2,
                predicted: 1
            }
        );
        assert!(matches!(
            confusion(&[2, 0], &[1, 0]).unwrap_err(),
            MetricsError::NonBinaryLabel { value: 2, .. }
        ));
    }

    #[test]
    fn empty_confusion_is_an_error() {
        assert_eq!(
            report(&ConfusionCounts::new(0, 0, 0, 0)).unwrap_err(),
            MetricsError::EmptyConfusion
        );
    }

    #[test]
    fn zero_denominators_fall_back_to_zero() {
        // No positive predictions: precision undefined -> 0; here recall is
        // also 0, so F1's denominator vanishes too.
        let r = report(&ConfusionCounts::new(0, 0, 5, 95)).unwrap();
        assert_eq!(r.precision, 0.0);
        assert_eq!(r.recall, 0.0);
        assert_eq!(r.f1, 0.0);
        assert_eq!(r.mcc, 0.0);

        // All predictions positive on an all-positive truth: tn + fp = 0.
        let r = report(&ConfusionCounts::new(10, 0, 0, 0)).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.mcc, 0.0);
    }

    #[test]
    fn perfect_and_inverted_predictors_hit_the_mcc_extremes() {
        let r = report(&ConfusionCounts::new(10, 0, 0, 90)).unwrap();
        assert_eq!(r.mcc, 1.0);
        let r = report(&ConfusionCounts::new(0, 90, 10, 0)).unwrap();
        assert_eq!(r.mcc, -1.0);
    }

    #[test]
    fn all_small_confusions_stay_in_range() {
        // Exhaustive over every confusion matrix with total <= 50.
        for total in 1..=50u64 {
            for tp in 0..=total {
                for fp in 0..=(total - tp) {
                    for fn_ in 0..=(total - tp - fp) {
                        let counts = ConfusionCounts::new(tp, fp, fn_, total - tp - fp - fn_);
                        let r = report(&counts).unwrap();
                        for value in [r.accuracy, r.precision, r.recall, r.f1] {
                            assert!((0.0..=1.0).contains(&value), "{value} from {counts:?}");
                        }
                        assert!((-1.0..=1.0).contains(&r.mcc), "{} from {counts:?}", r.mcc);
                    }
                }
            }
        }
    }

    #[test]
    fn swapping_predictions_negates_mcc() {
        // Flipping every predicted label exchanges tp<->fn and tn<->fp.
        for total in 1..=30u64 {
            for tp in 0..=total {
                for fp in 0..=(total - tp) {
                    for fn_ in 0..=(total - tp - fp) {
                        let counts = ConfusionCounts::new(tp, fp, fn_, total - tp - fp - fn_);
                        let flipped = ConfusionCounts::new(
                            counts.false_negatives,
                            counts.true_negatives,
                            counts.true_positives,
                            counts.false_positives,
                        );
                        let original = report(&counts).unwrap().mcc;
                        let negated = report(&flipped).unwrap().mcc;
                        assert!(
                            (original + negated).abs() < 1e-12,
                            "mcc {original} vs flipped {negated} for {counts:?}"
                        );
                    }
                }
            }
        }
    }

    proptest! {
        /// The tallying loop agrees with four independent recounts.
        #[test]
        fn confusion_matches_naive_recount(pairs in proptest::collection::vec((0u8..2, 0u8..2), 1..1000)) {
            let actual: Vec<u8> = pairs.iter().map(|p| p.0).collect();
            let predicted: Vec<u8> = pairs.iter().map(|p| p.1).collect();
            let counts = confusion(&actual, &predicted).unwrap();
            let recount = |t: u8, g: u8| pairs.iter().filter(|p| **p == (t, g)).count() as u64;
            prop_assert_eq!(counts.true_positives, recount(1, 1));
            prop_assert_eq!(counts.false_positives, recount(0, 1));
            prop_assert_eq!(counts.false_negatives, recount(1, 0));
            prop_assert_eq!(counts.true_negatives, recount(0, 0));
            prop_assert_eq!(counts.total(), pairs.len() as u64);
        }
    }
}
