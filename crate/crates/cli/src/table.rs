//! Result presentation: fixed-column metric tables in markdown or CSV.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::config::{ansatz_label, feature_map_label};
use crate::runner::ResultRow;

/// The column headers, in output order.
pub const COLUMNS: [&str; 11] = [
    "Features",
    "Data size",
    "Feature selection",
    "Feature Map",
    "Ansatz",
    "Entanglement",
    "Accuracy",
    "Precision",
    "Recall",
    "F1-score",
    "MCC",
];

/// Output encodings for result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Markdown,
    Csv,
}

impl fmt::Display for TableFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableFormat::Markdown => "markdown",
            TableFormat::Csv => "csv",
        })
    }
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text.trim().to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "csv" => Ok(TableFormat::Csv),
            other => Err(format!("unknown table format {other:?}")),
        }
    }
}

/// Rendering failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("no rows to render")]
    Empty,
    #[error("failed to encode csv: {0}")]
    Csv(String),
}

/// Orders rows the way the results are presented: best accuracy first,
/// ties broken by MCC, further ties kept in input order.
pub fn sort_for_presentation(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        b.accuracy
            .total_cmp(&a.accuracy)
            .then(b.mcc.total_cmp(&a.mcc))
    });
}

/// Renders rows as a table with the [`COLUMNS`] headers, metrics at three
/// decimals.
pub fn emit_table(rows: &[ResultRow], format: TableFormat) -> Result<String, TableError> {
    if rows.is_empty() {
        return Err(TableError::Empty);
    }
    let cells: Vec<[String; 11]> = rows.iter().map(row_cells).collect();
    match format {
        TableFormat::Markdown => Ok(render_markdown(&cells)),
        TableFormat::Csv => render_csv(&cells),
    }
}

fn row_cells(row: &ResultRow) -> [String; 11] {
    [
        row.config.k_features.to_string(),
        row.config.train_size.to_string(),
        row.config.selection.to_string(),
        feature_map_label(&row.config.feature_map),
        ansatz_label(&row.config.ansatz),
        row.config.entanglement.to_string(),
        format!("{:.3}", row.accuracy),
        format!("{:.3}", row.precision),
        format!("{:.3}", row.recall),
        format!("{:.3}", row.f1),
        format!("{:.3}", row.mcc),
    ]
}

fn render_markdown(rows: &[[String; 11]]) -> String {
    let mut out = String::new();
    out.push_str("| ");
    out.push_str(&COLUMNS.join(" | "));
    out.push_str(" |\n|");
    out.push_str(&" --- |".repeat(COLUMNS.len()));
    out.push('\n');
    for row in rows {
        out.push_str("| ");
        out.push_str(&row.join(" | "));
        out.push_str(" |\n");
    }
    out
}

fn render_csv(rows: &[[String; 11]]) -> Result<String, TableError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let encode = |err: csv::Error| TableError::Csv(err.to_string());
    writer.write_record(COLUMNS).map_err(encode)?;
    for row in rows {
        writer.write_record(row).map_err(encode)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|err| TableError::Csv(err.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
