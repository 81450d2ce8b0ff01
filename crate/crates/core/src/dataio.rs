//! Dataset loading, scaling, splitting, and summary statistics.
//!
//! The on-disk format is the published pulsar-survey CSV: nine
//! comma-separated values per row, eight continuous features followed by a
//! binary class label (1 for pulsar). A header row is detected
//! automatically, and headerless files take the canonical feature names in
//! [`HTRU2_FEATURE_NAMES`]. The first four features summarize the folded
//! integrated pulse profile and the last four the dispersion-measure
//! signal-to-noise curve; each group is mean, standard deviation, excess
//! kurtosis, and skewness, in that order.

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::Path;
use thiserror::Error;

/// Canonical feature names, in file column order.
pub const HTRU2_FEATURE_NAMES: [&str; 8] = [
    "Prof-mu",
    "Prof-sigma",
    "Prof-k",
    "Prof-s",
    "DM-mu",
    "DM-sigma",
    "DM-k",
    "DM-s",
];

/// Where the canonical survey file is published.
pub const HTRU2_SOURCE_URL: &str = "https://archive.ics.uci.edu/dataset/372/htru2";

/// Rows in the canonical survey file.
pub const HTRU2_ROWS: usize = 17_898;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("could not open {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("csv read error: {0}")]
    Read(#[from] csv::Error),
    #[error("write error for {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("line {line}: expected 9 comma-separated values, found {found}")]
    FieldCount { line: u64, found: usize },
    #[error("line {line}: could not parse {field:?} as a number")]
    BadNumber { line: u64, field: String },
    #[error("line {line}: class label must be 0 or 1, found {field:?}")]
    BadLabel { line: u64, field: String },
    #[error("dataset has no rows")]
    Empty,
    #[error("{labels} label(s) for {rows} data row(s)")]
    LabelCountMismatch { labels: usize, rows: usize },
    #[error("{names} feature name(s) for {columns} data column(s)")]
    NameCountMismatch { names: usize, columns: usize },
    #[error("unknown feature name {name:?}")]
    UnknownFeature { name: String },
    #[error("scaler was fitted on {fitted} column(s), data has {actual}")]
    ColumnMismatch { fitted: usize, actual: usize },
    #[error("split needs {requested} row(s) but the dataset has {available}")]
    SplitTooLarge { requested: usize, available: usize },
    #[error("split sizes must be positive")]
    EmptySplit,
    #[error("canonical dataset check failed: {reason}")]
    NotCanonical { reason: String },
}

/// A feature matrix with one binary label and one name per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self, DataError> {
        if labels.len() != features.nrows() {
            return Err(DataError::LabelCountMismatch {
                labels: labels.len(),
                rows: features.nrows(),
            });
        }
        if feature_names.len() != features.ncols() {
            return Err(DataError::NameCountMismatch {
                names: feature_names.len(),
                columns: features.ncols(),
            });
        }
        Ok(Self {
            features,
            labels,
            feature_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// The named columns, in the order given. Selecting can both subset and
    /// reorder, which is how a feature ranking is applied.
    pub fn select_columns(&self, names: &[String]) -> Result<Self, DataError> {
        let indices = names
            .iter()
            .map(|name| {
                self.column_index(name).ok_or_else(|| DataError::UnknownFeature {
                    name: name.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            features: self.features.select(Axis(1), &indices),
            labels: self.labels.clone(),
            feature_names: names.to_vec(),
        })
    }

    /// The given rows, in the order given. Panics if a row index is out of
    /// range, like indexing.
    pub fn take_rows(&self, rows: &[usize]) -> Self {
        Self {
            features: self.features.select(Axis(0), rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Fraction of rows labeled 1.
    pub fn positive_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        let positives = self.labels.iter().filter(|&&l| l == 1).count();
        positives as f64 / self.labels.len() as f64
    }
}

fn parse_field(field: &str, line: u64) -> Result<f64, DataError> {
    field.trim().parse().map_err(|_| DataError::BadNumber {
        line,
        field: field.to_string(),
    })
}

fn parse_label(field: &str, line: u64) -> Result<u8, DataError> {
    match field.trim().parse::<f64>() {
        Ok(v) if v == 0.0 => Ok(0),
        Ok(v) if v == 1.0 => Ok(1),
        _ => Err(DataError::BadLabel {
            line,
            field: field.to_string(),
        }),
    }
}

/// Loads a nine-column survey CSV. A first row whose fields do not all
/// parse as numbers is taken to be a header and supplies the feature names;
/// otherwise the canonical names are used.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| DataError::Open {
            path: path.display().to_string(),
            source,
        })?;

    let mut rows: Vec<[f64; 8]> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    let mut names: Option<Vec<String>> = None;
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if first {
            first = false;
            let is_header = record.iter().any(|field| field.parse::<f64>().is_err());
            if is_header {
                if record.len() != 9 {
                    return Err(DataError::FieldCount {
                        line,
                        found: record.len(),
                    });
                }
                names = Some(record.iter().take(8).map(str::to_string).collect());
                continue;
            }
        }
        if record.len() != 9 {
            return Err(DataError::FieldCount {
                line,
                found: record.len(),
            });
        }
        let mut row = [0.0; 8];
        for (slot, field) in row.iter_mut().zip(record.iter()) {
            *slot = parse_field(field, line)?;
        }
        rows.push(row);
        labels.push(parse_label(&record[8], line)?);
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    let features =
        Array2::from_shape_vec((rows.len(), 8), rows.into_iter().flatten().collect())
            .expect("row-major flattening preserves the shape");
    let feature_names =
        names.unwrap_or_else(|| HTRU2_FEATURE_NAMES.iter().map(|&n| n.to_string()).collect());
    Dataset::new(features, labels, feature_names)
}

/// Writes a dataset back out in the nine-column format, with a header row.
/// Values use the shortest representation that parses back to the same
/// float, so a write/load round trip is exact.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let wrap = |source| DataError::Write {
        path: path.display().to_string(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(wrap)?;
    let mut header: Vec<String> = dataset.feature_names.clone();
    header.push("class".to_string());
    writer.write_record(&header).map_err(wrap)?;
    for (row, label) in dataset.features.outer_iter().zip(&dataset.labels) {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(label.to_string());
        writer.write_record(&record).map_err(wrap)?;
    }
    writer.flush().map_err(|source| DataError::Write {
        path: path.display().to_string(),
        source: csv::Error::from(source),
    })?;
    Ok(())
}

/// Per-column min–max parameters mapping a fitted range onto `[0, π]`.
///
/// Values outside the fitted range are clamped before mapping, and a column
/// that was constant during fitting maps to `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(data: ArrayView2<'_, f64>) -> Result<Self, DataError> {
        if data.nrows() == 0 {
            return Err(DataError::Empty);
        }
        let mut mins = Vec::with_capacity(data.ncols());
        let mut maxs = Vec::with_capacity(data.ncols());
        for column in data.columns() {
            mins.push(column.iter().copied().fold(f64::INFINITY, f64::min));
            maxs.push(column.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
        Ok(Self { mins, maxs })
    }

    pub fn transform(&self, data: ArrayView2<'_, f64>) -> Result<Array2<f64>, DataError> {
        if data.ncols() != self.mins.len() {
            return Err(DataError::ColumnMismatch {
                fitted: self.mins.len(),
                actual: data.ncols(),
            });
        }
        let mut out = data.to_owned();
        for (j, mut column) in out.columns_mut().into_iter().enumerate() {
            let (min, max) = (self.mins[j], self.maxs[j]);
            let range = max - min;
            for value in column.iter_mut() {
                *value = if range == 0.0 {
                    0.0
                } else {
                    (value.clamp(min, max) - min) / range * PI
                };
            }
        }
        Ok(out)
    }
}

/// A train/test partition of a dataset.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
}

/// Draws disjoint train and test subsets by shuffling the row indices once
/// with a seeded generator and taking the first `train_size` rows, then the
/// next `test_size`. When `test_size` is `None` it defaults to two thirds
/// of `train_size`, rounded to nearest.
pub fn split(
    dataset: &Dataset,
    train_size: usize,
    test_size: Option<usize>,
    seed: u64,
) -> Result<Split, DataError> {
    let test_size = test_size.unwrap_or_else(|| default_test_size(train_size));
    if train_size == 0 || test_size == 0 {
        return Err(DataError::EmptySplit);
    }
    let requested = train_size + test_size;
    if requested > dataset.n_samples() {
        return Err(DataError::SplitTooLarge {
            requested,
            available: dataset.n_samples(),
        });
    }
    let mut indices: Vec<usize> = (0..dataset.n_samples()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    Ok(Split {
        train: dataset.take_rows(&indices[..train_size]),
        test: dataset.take_rows(&indices[train_size..requested]),
    })
}

fn default_test_size(train_size: usize) -> usize {
    (2.0 * train_size as f64 / 3.0).round() as usize
}

/// Five-number box-plot summary with Tukey whiskers.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    /// Smallest value at or above `q1 - 1.5 IQR`.
    pub whisker_low: f64,
    /// Largest value at or below `q3 + 1.5 IQR`.
    pub whisker_high: f64,
    /// Values strictly outside the whisker fences.
    pub outlier_count: usize,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let below = pos.floor() as usize;
    let frac = pos - below as f64;
    if frac == 0.0 {
        sorted[below]
    } else {
        sorted[below] + frac * (sorted[below + 1] - sorted[below])
    }
}

/// Box-plot statistics of a value list, with quartiles by linear
/// interpolation over the sorted values.
pub fn boxplot_stats(values: &[f64]) -> Result<BoxStats, DataError> {
    if values.is_empty() {
        return Err(DataError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let low_fence = q1 - 1.5 * iqr;
    let high_fence = q3 + 1.5 * iqr;
    let whisker_low = sorted
        .iter()
        .copied()
        .find(|&v| v >= low_fence)
        .unwrap_or(q1);
    let whisker_high = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= high_fence)
        .unwrap_or(q3);
    let outlier_count = sorted
        .iter()
        .filter(|&&v| v < low_fence || v > high_fence)
        .count();
    Ok(BoxStats {
        q1,
        median,
        q3,
        whisker_low,
        whisker_high,
        outlier_count,
    })
}

/// Checks that a dataset has the canonical survey shape: 17,898 rows of 8
/// features.
pub fn verify_canonical(dataset: &Dataset) -> Result<(), DataError> {
    if dataset.n_samples() != HTRU2_ROWS {
        return Err(DataError::NotCanonical {
            reason: format!(
                "expected {HTRU2_ROWS} rows, found {}",
                dataset.n_samples()
            ),
        });
    }
    if dataset.n_features() != 8 {
        return Err(DataError::NotCanonical {
            reason: format!("expected 8 feature columns, found {}", dataset.n_features()),
        });
    }
    Ok(())
}
