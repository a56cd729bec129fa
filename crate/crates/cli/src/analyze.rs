//! Candidate statistics for every row of a study table.

use std::io::Write;

use leastdiff::stream::{open_unit, substream, substream_seed, Purpose};
use leastdiff::{
    candidate_suite, sample_study, test_practical_significance, NullRegion, Scale, Significance, StudyRecord,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::format::{g6, g6_opt};

/// Settings of one analysis run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub scale: Scale,
    pub region: NullRegion,
    pub draws: usize,
    pub seed: u64,
}

/// Row outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// Relative statistics were withheld because the control mean may be nonpositive.
    NonpositiveControl,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::NonpositiveControl => "nonpositive_control",
        }
    }
}

/// One analyzed study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub id: String,
    pub label_control: String,
    pub label_experiment: String,
    pub units: String,
    pub source: String,
    pub alpha_dm: f64,
    pub xbar_dm: f64,
    pub r_xbar_dm: Option<f64>,
    pub s_dm: f64,
    pub rs_dm: Option<f64>,
    pub bf: Option<f64>,
    pub p_n: f64,
    pub p_e: Option<f64>,
    pub p_sg: Option<f64>,
    pub cohen_d: Option<f64>,
    pub delta_m: f64,
    pub r_delta_m: Option<f64>,
    pub delta_l: f64,
    pub r_delta_l: Option<f64>,
    pub rnd: f64,
    pub raw_lo: f64,
    pub raw_hi: f64,
    pub rel_lo: Option<f64>,
    pub rel_hi: Option<f64>,
    pub designation: Option<Significance>,
    pub practically_significant: bool,
    pub status: RowStatus,
}

/// Complete analysis, as serialized to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub options: AnalyzeOptions,
    pub rows: Vec<AnalysisRow>,
}

impl AnalysisReport {
    /// Ids of rows whose relative statistics were withheld.
    pub fn nonpositive_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| r.status == RowStatus::NonpositiveControl)
            .map(|r| r.id.clone())
            .collect()
    }
}

pub const ANALYSIS_COLUMNS: [&str; 27] = [
    "id",
    "label_control",
    "label_experiment",
    "units",
    "source",
    "alpha_dm",
    "xbar_dm",
    "r_xbar_dm",
    "s_dm",
    "rs_dm",
    "bf",
    "p_n",
    "p_e",
    "p_sg",
    "cohen_d",
    "delta_m",
    "r_delta_m",
    "delta_l",
    "r_delta_l",
    "rnd",
    "raw_lo",
    "raw_hi",
    "rel_lo",
    "rel_hi",
    "designation",
    "practically_significant",
    "status",
];

impl AnalysisRow {
    /// CSV fields in `ANALYSIS_COLUMNS` order.
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.id.clone(),
            self.label_control.clone(),
            self.label_experiment.clone(),
            self.units.clone(),
            self.source.clone(),
            g6(self.alpha_dm),
            g6(self.xbar_dm),
            g6_opt(self.r_xbar_dm),
            g6(self.s_dm),
            g6_opt(self.rs_dm),
            g6_opt(self.bf),
            g6(self.p_n),
            g6_opt(self.p_e),
            g6_opt(self.p_sg),
            g6_opt(self.cohen_d),
            g6(self.delta_m),
            g6_opt(self.r_delta_m),
            g6(self.delta_l),
            g6_opt(self.r_delta_l),
            g6(self.rnd),
            g6(self.raw_lo),
            g6(self.raw_hi),
            g6_opt(self.rel_lo),
            g6_opt(self.rel_hi),
            self.designation.map(|d| d.name().to_string()).unwrap_or_default(),
            self.practically_significant.to_string(),
            self.status.name().to_string(),
        ]
    }
}

/// Analyzes one row. `index` is the row's 0-based position, which keys its
/// random streams so results do not depend on scheduling.
pub fn analyze_row(study: &StudyRecord, index: usize, options: &AnalyzeOptions) -> CliResult<AnalysisRow> {
    let seed = substream_seed(options.seed, Purpose::Posterior, index as u64, 0);
    let rnd = open_unit(&mut substream(options.seed, Purpose::Rnd, index as u64, 0));
    let draws = sample_study(study, options.draws, seed)?;
    let stats = candidate_suite(study, &options.region, &draws, rnd)?;
    let (tested, status) = match options.scale {
        Scale::Raw => (Some(stats.delta_l), RowStatus::Ok),
        Scale::Relative => match stats.r_delta_l {
            Some(v) => (Some(v), RowStatus::Ok),
            None => (None, RowStatus::NonpositiveControl),
        },
    };
    let designation = tested.map(|v| test_practical_significance(v, &options.region));
    Ok(AnalysisRow {
        id: study.id.clone(),
        label_control: study.label_control.clone(),
        label_experiment: study.label_experiment.clone(),
        units: study.units.clone(),
        source: study.source_id.clone(),
        alpha_dm: study.alpha_dm,
        xbar_dm: stats.xbar_dm,
        r_xbar_dm: stats.r_xbar_dm,
        s_dm: stats.s_dm,
        rs_dm: stats.rs_dm,
        bf: stats.bf,
        p_n: stats.p_n,
        p_e: stats.p_e,
        p_sg: stats.p_sg,
        cohen_d: stats.cohen_d,
        delta_m: stats.delta_m,
        r_delta_m: stats.r_delta_m,
        delta_l: stats.delta_l,
        r_delta_l: stats.r_delta_l,
        rnd: stats.rnd,
        raw_lo: stats.bounds_raw.lo,
        raw_hi: stats.bounds_raw.hi,
        rel_lo: stats.bounds_rel.map(|b| b.lo),
        rel_hi: stats.bounds_rel.map(|b| b.hi),
        designation,
        practically_significant: designation == Some(Significance::PracticallySignificant),
        status,
    })
}

/// Analyzes every row in parallel on the current rayon pool, preserving order.
pub fn analyze(studies: &[StudyRecord], options: &AnalyzeOptions) -> CliResult<AnalysisReport> {
    if options.region.scale != options.scale {
        return Err(CliError::Input(format!(
            "null region is on the {} scale but the analysis is {}",
            options.region.scale, options.scale
        )));
    }
    let rows = studies
        .par_iter()
        .enumerate()
        .map(|(i, s)| analyze_row(s, i, options).map_err(|e| CliError::Other(format!("row {}: {e}", i + 1))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(AnalysisReport { options: *options, rows })
}

pub fn write_csv<W: Write>(report: &AnalysisReport, out: W) -> CliResult<()> {
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Other(e.to_string());
    writer.write_record(ANALYSIS_COLUMNS).map_err(io)?;
    for row in &report.rows {
        writer.write_record(row.csv_fields()).map_err(io)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(report: &AnalysisReport, mut out: W) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut out, report).map_err(|e| CliError::Other(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}
