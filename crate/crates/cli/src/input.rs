//! Study-table CSV reader.

use std::io::Read;

use leastdiff::{parse_alpha, GroupSummary, StudyRecord};

use crate::error::{CliError, CliResult};

/// Required header, in order.
pub const STUDY_COLUMNS: [&str; 12] = [
    "id",
    "label_control",
    "xbar",
    "sx",
    "m",
    "label_experiment",
    "ybar",
    "sy",
    "n",
    "units",
    "alpha",
    "source",
];

/// Reads study rows. Lines starting with `#` are comments. Errors name the
/// line, the data row and the column.
pub fn read_studies<R: Read>(reader: R) -> CliResult<Vec<StudyRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv.headers().map_err(|e| CliError::Input(format!("header: {e}")))?.clone();
    if header.is_empty() {
        return Err(CliError::Input("empty input: no header".into()));
    }
    if header.iter().ne(STUDY_COLUMNS) {
        return Err(CliError::Input(format!(
            "header must be `{}`, found `{}`",
            STUDY_COLUMNS.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut studies = Vec::new();
    for (index, record) in csv.records().enumerate() {
        let row = index + 1;
        let record = record.map_err(|e| CliError::Input(format!("row {row}: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        let at = |column: &str, reason: String| {
            CliError::Input(format!("line {line} (row {row}), column {column}: {reason}"))
        };
        let field = |column: &str| record.get(column_index(column)).unwrap_or("");
        let number = |column: &str| -> CliResult<f64> {
            let text = field(column);
            let value: f64 = text.parse().map_err(|_| at(column, format!("{text:?} is not a number")))?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(at(column, format!("{text:?} is not finite")))
            }
        };
        let count = |column: &str| -> CliResult<usize> {
            let text = field(column);
            text.parse().map_err(|_| at(column, format!("{text:?} is not a nonnegative integer")))
        };
        let group = |mean: &str, sd: &str, size: &str| -> CliResult<GroupSummary> {
            let (mean_v, sd_v, size_v) = (number(mean)?, number(sd)?, count(size)?);
            if sd_v < 0.0 {
                return Err(at(sd, format!("{sd_v} is negative")));
            }
            if size_v < 2 {
                return Err(at(size, format!("{size_v} < 2 observations")));
            }
            GroupSummary::new(mean_v, sd_v, size_v).map_err(|e| at(mean, e.to_string()))
        };
        let control = group("xbar", "sx", "m")?;
        let experiment = group("ybar", "sy", "n")?;
        let alpha_dm = parse_alpha(field("alpha")).map_err(|e| at("alpha", e.to_string()))?;
        let id = field("id");
        if id.is_empty() {
            return Err(at("id", "empty id".into()));
        }
        studies.push(StudyRecord {
            id: id.to_string(),
            control,
            experiment,
            alpha_dm,
            units: field("units").to_string(),
            label_control: field("label_control").to_string(),
            label_experiment: field("label_experiment").to_string(),
            source_id: field("source").to_string(),
        });
    }
    if studies.is_empty() {
        return Err(CliError::Input("empty input: no study rows".into()));
    }
    Ok(studies)
}

fn column_index(name: &str) -> usize {
    STUDY_COLUMNS.iter().position(|c| *c == name).expect("known column")
}
