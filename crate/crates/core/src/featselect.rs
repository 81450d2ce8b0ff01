//! Filter-style feature ranking for the classifier's input selection.
//!
//! Two univariate scores are supported, matching the two selection methods
//! exposed by the experiment harness:
//!
//! * [`SelectionMethod::Fs1`] ranks features by their one-way ANOVA F-score
//!   against the class labels.
//! * [`SelectionMethod::Fs2`] ranks by the absolute Pearson correlation
//!   between feature and label.
//!
//! Both rankings sort descending; ties keep the original column order. For
//! binary labels the two scores are monotonically related
//! (`F = (N-2) r² / (1-r²)`), so on identical inputs the two methods
//! produce the same ordering; they are kept separate because the harness
//! treats them as distinct configuration axes.

use ndarray::ArrayView2;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SelectionError {
    #[error("input slices have different lengths ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least two samples, got {actual}")]
    TooFewSamples { actual: usize },
    #[error("an input has zero variance, so correlation is undefined")]
    ZeroVariance,
    #[error("column {column} has zero variance, so correlation is undefined")]
    ZeroVarianceColumn { column: usize },
    #[error("labels must contain at least two classes")]
    SingleClass,
    #[error("{names} feature name(s) for {columns} data column(s)")]
    NameCountMismatch { names: usize, columns: usize },
}

/// Which univariate score orders the features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMethod {
    /// ANOVA F-score between feature and class.
    Fs1,
    /// Absolute Pearson correlation between feature and class.
    Fs2,
}

impl std::fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Fs1 => "FS1",
            Self::Fs2 => "FS2",
        })
    }
}

impl std::str::FromStr for SelectionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fs1" => Ok(Self::Fs1),
            "fs2" => Ok(Self::Fs2),
            other => Err(format!(
                "unknown selection method {other:?}; expected fs1 or fs2"
            )),
        }
    }
}

/// One feature's position in a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub name: String,
    /// Column index in the dataset the ranking was computed from.
    pub index: usize,
    pub score: f64,
}

/// Features ordered best first under a [`SelectionMethod`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub method: SelectionMethod,
    pub features: Vec<RankedFeature>,
}

impl FeatureRanking {
    /// Names of the `k` best features, best first.
    pub fn top_names(&self, k: usize) -> Vec<String> {
        self.features
            .iter()
            .take(k)
            .map(|f| f.name.clone())
            .collect()
    }
}

/// Pearson correlation coefficient between two equally long slices.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, SelectionError> {
    if x.len() != y.len() {
        return Err(SelectionError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(SelectionError::TooFewSamples { actual: x.len() });
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let da = a - mean_x;
        let db = b - mean_y;
        cov += da * db;
        var_x += da * da;
        var_y += db * db;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(SelectionError::ZeroVariance);
    }
    Ok(cov / (var_x * var_y).sqrt())
}

/// Pairwise Pearson correlations between all data columns; symmetric with a
/// unit diagonal.
pub fn correlation_matrix(data: ArrayView2<'_, f64>) -> Result<ndarray::Array2<f64>, SelectionError> {
    let m = data.ncols();
    let mut out = ndarray::Array2::zeros((m, m));
    let columns: Vec<Vec<f64>> = (0..m).map(|j| data.column(j).to_vec()).collect();
    for i in 0..m {
        out[(i, i)] = 1.0;
        for j in i + 1..m {
            let r = pearson(&columns[i], &columns[j]).map_err(|err| match err {
                SelectionError::ZeroVariance => SelectionError::ZeroVarianceColumn {
                    column: if columns[i].iter().all(|&v| v == columns[i][0]) {
                        i
                    } else {
                        j
                    },
                },
                other => other,
            })?;
            out[(i, j)] = r;
            out[(j, i)] = r;
        }
    }
    Ok(out)
}

/// Pearson correlation of each data column with the class label.
pub fn class_correlations(
    data: ArrayView2<'_, f64>,
    labels: &[u8],
) -> Result<Vec<f64>, SelectionError> {
    let label_values: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
    (0..data.ncols())
        .map(|j| {
            pearson(&data.column(j).to_vec(), &label_values).map_err(|err| match err {
                SelectionError::ZeroVariance => SelectionError::ZeroVarianceColumn { column: j },
                other => other,
            })
        })
        .collect()
}

/// One-way ANOVA F-score of each data column against the class labels.
///
/// With sums of squares between and within the label groups,
/// `F = (between / (K-1)) / (within / (N-K))`. A column whose group means
/// coincide scores `0`, even when it is constant overall; a column that
/// separates the groups with no within-group spread scores `+∞`, which
/// sorts ahead of every finite score.
pub fn anova_f_scores(
    data: ArrayView2<'_, f64>,
    labels: &[u8],
) -> Result<Vec<f64>, SelectionError> {
    let n = data.nrows();
    if labels.len() != n {
        return Err(SelectionError::LengthMismatch {
            x: n,
            y: labels.len(),
        });
    }
    let mut classes: Vec<u8> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(SelectionError::SingleClass);
    }
    if n <= classes.len() {
        return Err(SelectionError::TooFewSamples { actual: n });
    }
    let k = classes.len() as f64;
    let groups: Vec<Vec<usize>> = classes
        .iter()
        .map(|&c| {
            labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == c)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let scores = (0..data.ncols())
        .map(|j| {
            let column = data.column(j);
            let grand_mean = column.sum() / n as f64;
            let mut between = 0.0;
            let mut within = 0.0;
            for rows in &groups {
                let group_mean = rows.iter().map(|&i| column[i]).sum::<f64>() / rows.len() as f64;
                between += rows.len() as f64 * (group_mean - grand_mean).powi(2);
                within += rows.iter().map(|&i| (column[i] - group_mean).powi(2)).sum::<f64>();
            }
            if between == 0.0 {
                0.0
            } else if within == 0.0 {
                f64::INFINITY
            } else {
                (between / (k - 1.0)) / (within / (n as f64 - k))
            }
        })
        .collect();
    Ok(scores)
}

/// Ranks all data columns under the given method, best first; equal scores
/// keep their original column order.
pub fn rank(
    data: ArrayView2<'_, f64>,
    labels: &[u8],
    names: &[String],
    method: SelectionMethod,
) -> Result<FeatureRanking, SelectionError> {
    if names.len() != data.ncols() {
        return Err(SelectionError::NameCountMismatch {
            names: names.len(),
            columns: data.ncols(),
        });
    }
    if labels.len() != data.nrows() {
        return Err(SelectionError::LengthMismatch {
            x: data.nrows(),
            y: labels.len(),
        });
    }
    let scores = match method {
        SelectionMethod::Fs1 => anova_f_scores(data, labels)?,
        SelectionMethod::Fs2 => class_correlations(data, labels)?
            .into_iter()
            .map(f64::abs)
            .collect(),
    };
    let mut features: Vec<RankedFeature> = scores
        .into_iter()
        .enumerate()
        .map(|(index, score)| RankedFeature {
            name: names[index].clone(),
            index,
            score,
        })
        .collect();
    features.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(FeatureRanking { method, features })
}
