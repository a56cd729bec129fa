//! TOML study specifications for the simulation commands.

use std::io::Write;

use leastdiff::riskbench::{
    comparison_study, default_null_region, default_series_base, generate_series, spearman_study,
    ComparisonSettings, CorrelationSettings, DESK_DRAWS, DESK_SAMPLES, FULL_PAIRS, FULL_SAMPLES,
};
use leastdiff::{
    Candidate, CorrelationReport, Measure, NullRegion, PopulationConfig, Regime, RiskReport, Scale, StudyDesign,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::format::g6;

/// Samples per configuration of a full-scale correlation study.
pub const FULL_SERIES_SAMPLES: usize = 1000;
pub const DEFAULT_STEPS: usize = 5;
pub const DEFAULT_BOOTSTRAP: usize = 1000;

/// Overrides given on the command line.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub full_scale: bool,
    pub seed: Option<u64>,
    pub draws: Option<usize>,
}

/// Comparison-error study description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskSpec {
    pub scale: Scale,
    pub regime: Regime,
    /// A measure name of the scale, or `simultaneous`.
    pub measure: String,
    pub pairs: Option<usize>,
    pub samples: Option<usize>,
    pub draws: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub oracle: bool,
    pub candidates: Option<Vec<String>>,
    pub neg_threshold: Option<f64>,
    pub pos_threshold: Option<f64>,
    pub max_attempts: Option<usize>,
    pub max_regenerations: Option<usize>,
}

/// Correlation study description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelateSpec {
    pub scale: Scale,
    pub regime: Regime,
    /// Measures to vary, one series each; defaults to every measure of the scale.
    pub measures: Option<Vec<String>>,
    pub steps: Option<usize>,
    pub samples: Option<usize>,
    pub draws: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub bootstrap: Option<usize>,
    pub candidates: Option<Vec<String>>,
    pub neg_threshold: Option<f64>,
    pub pos_threshold: Option<f64>,
    /// Starting configuration of every series.
    pub base: Option<PopulationConfig>,
}

fn yes() -> bool {
    true
}

pub fn parse_spec<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<T> {
    toml::from_str(text).map_err(|e| CliError::Input(format!("study spec: {e}")))
}

fn measure(name: &str, scale: Scale) -> CliResult<Measure> {
    Measure::from_name(name)
        .filter(|m| Measure::for_scale(scale).contains(m))
        .ok_or_else(|| CliError::Input(format!("unknown {scale} measure {name:?}")))
}

fn candidates(names: &Option<Vec<String>>) -> CliResult<Vec<Candidate>> {
    match names {
        None => Ok(Candidate::ALL.to_vec()),
        Some(list) if list.is_empty() => Err(CliError::Input("candidate list is empty".into())),
        Some(list) => list
            .iter()
            .map(|n| Candidate::from_name(n).ok_or_else(|| CliError::Input(format!("unknown candidate {n:?}"))))
            .collect(),
    }
}

/// Null region from optional thresholds; a single threshold is mirrored.
pub fn null_region(scale: Scale, neg: Option<f64>, pos: Option<f64>) -> CliResult<NullRegion> {
    let region = match (neg, pos) {
        (None, None) => return Ok(default_null_region(scale)),
        (Some(n), None) => NullRegion::new(n, -n, scale),
        (None, Some(p)) => NullRegion::new(-p, p, scale),
        (Some(n), Some(p)) => NullRegion::new(n, p, scale),
    };
    region.map_err(|e| CliError::Input(e.to_string()))
}

impl RiskSpec {
    pub fn settings(&self, overrides: &Overrides) -> CliResult<ComparisonSettings> {
        let design = if self.measure == "simultaneous" {
            StudyDesign::Simultaneous
        } else {
            StudyDesign::Individual(measure(&self.measure, self.scale)?)
        };
        let mut settings = ComparisonSettings::desk(self.scale, self.regime, design, self.seed);
        if overrides.full_scale {
            settings.pairs = FULL_PAIRS;
            settings.samples = FULL_SAMPLES;
        }
        settings.pairs = self.pairs.filter(|_| !overrides.full_scale).unwrap_or(settings.pairs);
        settings.samples = self.samples.filter(|_| !overrides.full_scale).unwrap_or(settings.samples);
        settings.draws = overrides.draws.or(self.draws).unwrap_or(DESK_DRAWS);
        settings.seed = overrides.seed.unwrap_or(self.seed);
        settings.oracle = self.oracle;
        settings.candidates = candidates(&self.candidates)?;
        settings.null_region = null_region(self.scale, self.neg_threshold, self.pos_threshold)?;
        if let Some(a) = self.max_attempts {
            settings.max_attempts = a;
        }
        if let Some(r) = self.max_regenerations {
            settings.max_regenerations = r;
        }
        settings.validate()?;
        Ok(settings)
    }
}

impl CorrelateSpec {
    pub fn settings(&self, overrides: &Overrides) -> CliResult<CorrelationSettings> {
        let samples = if overrides.full_scale {
            FULL_SERIES_SAMPLES
        } else {
            self.samples.unwrap_or(DESK_SAMPLES)
        };
        Ok(CorrelationSettings {
            samples,
            draws: overrides.draws.or(self.draws).unwrap_or(DESK_DRAWS),
            seed: overrides.seed.unwrap_or(self.seed),
            bootstrap: self.bootstrap.unwrap_or(DEFAULT_BOOTSTRAP),
            null_region: null_region(self.scale, self.neg_threshold, self.pos_threshold)?,
            candidates: candidates(&self.candidates)?,
        })
    }

    pub fn measures(&self) -> CliResult<Vec<Measure>> {
        match &self.measures {
            None => Ok(Measure::for_scale(self.scale).to_vec()),
            Some(list) if list.is_empty() => Err(CliError::Input("measure list is empty".into())),
            Some(list) => list.iter().map(|n| measure(n, self.scale)).collect(),
        }
    }
}

pub fn run_risk(spec: &RiskSpec, overrides: &Overrides) -> CliResult<RiskReport> {
    Ok(comparison_study(&spec.settings(overrides)?)?)
}

pub fn run_correlate(spec: &CorrelateSpec, overrides: &Overrides) -> CliResult<CorrelationReport> {
    let settings = spec.settings(overrides)?;
    let base = spec.base.unwrap_or_else(|| default_series_base(spec.regime));
    let steps = spec.steps.unwrap_or(DEFAULT_STEPS);
    let mut rows = Vec::new();
    for m in spec.measures()? {
        let series = generate_series(m, steps, &base)?;
        rows.extend(spearman_study(&series, &settings)?.rows);
    }
    Ok(CorrelationReport { rows })
}

pub fn write_risk_csv<W: Write>(report: &RiskReport, out: W) -> CliResult<()> {
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Other(e.to_string());
    writer
        .write_record(["candidate", "measure", "mean_error", "p_value", "significant", "n_trials"])
        .map_err(io)?;
    for r in &report.rows {
        writer
            .write_record([
                r.candidate.clone(),
                r.measure.name().to_string(),
                g6(r.mean_error),
                g6(r.p_value),
                r.significant.to_string(),
                r.n_trials.to_string(),
            ])
            .map_err(io)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_correlation_csv<W: Write>(report: &CorrelationReport, out: W) -> CliResult<()> {
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Other(e.to_string());
    writer
        .write_record(["candidate", "measure", "rho", "ci_lo", "ci_hi", "significant"])
        .map_err(io)?;
    for r in &report.rows {
        writer
            .write_record([
                r.candidate.name().to_string(),
                r.measure.name().to_string(),
                g6(r.rho),
                g6(r.ci_lo),
                g6(r.ci_hi),
                r.significant.to_string(),
            ])
            .map_err(io)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use leastdiff::riskbench::DESK_PAIRS;

    #[test]
    fn risk_spec_defaults_and_overrides() {
        let spec: RiskSpec = parse_spec("scale = \"raw\"\nregime = \"positive\"\nmeasure = \"mu_dm\"\nseed = 3\n").unwrap();
        let s = spec.settings(&Overrides::default()).unwrap();
        assert_eq!((s.pairs, s.samples, s.draws, s.seed), (DESK_PAIRS, DESK_SAMPLES, DESK_DRAWS, 3));
        assert_eq!(s.design, StudyDesign::Individual(Measure::MuDm));
        let full = spec
            .settings(&Overrides { full_scale: true, seed: Some(9), draws: Some(5000) })
            .unwrap();
        assert_eq!((full.pairs, full.samples, full.draws, full.seed), (FULL_PAIRS, FULL_SAMPLES, 5000, 9));
    }

    #[test]
    fn risk_spec_rejects_foreign_measure() {
        let spec: RiskSpec = parse_spec("scale = \"relative\"\nregime = \"negative\"\nmeasure = \"mu_dm\"\n").unwrap();
        assert!(matches!(spec.settings(&Overrides::default()), Err(CliError::Input(_))));
        assert!(parse_spec::<RiskSpec>("scale = \"raw\"\n").is_err());
    }

    #[test]
    fn single_threshold_is_mirrored() {
        let r = null_region(Scale::Relative, Some(-0.25), None).unwrap();
        assert_eq!((r.neg_threshold, r.pos_threshold), (-0.25, 0.25));
        assert!(null_region(Scale::Raw, Some(1.0), None).is_err());
    }
}
