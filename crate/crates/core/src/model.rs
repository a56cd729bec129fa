//! Domain types shared by every module, with their construction-time checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scale on which a difference in means is summarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Measurement units, `mu_y - mu_x`.
    Raw,
    /// Fraction of the control mean, `(mu_y - mu_x) / mu_x`.
    Relative,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Raw => "raw",
            Scale::Relative => "relative",
        })
    }
}

/// Sign regime of a set of results. Positive and negative effects are never
/// ranked against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Positive,
    Negative,
}

impl Regime {
    pub fn sign(self) -> f64 {
        match self {
            Regime::Positive => 1.0,
            Regime::Negative => -1.0,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Positive => "positive",
            Regime::Negative => "negative",
        })
    }
}

/// Sample mean, standard deviation and size of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub mean: f64,
    pub sd: f64,
    pub size: usize,
}

impl GroupSummary {
    pub fn new(mean: f64, sd: f64, size: usize) -> Result<Self> {
        if !mean.is_finite() {
            return Err(invalid("mean", format!("{mean} is not finite")));
        }
        if !(sd.is_finite() && sd >= 0.0) {
            return Err(invalid("sd", format!("{sd} must be finite and >= 0")));
        }
        if size < 2 {
            return Err(invalid("size", format!("{size} < 2")));
        }
        Ok(Self { mean, sd, size })
    }

    /// Degrees of freedom of the marginal t posterior, `size - 1`.
    pub fn df(&self) -> usize {
        self.size - 1
    }

    /// Standard error of the mean, `sd / sqrt(size)`.
    pub fn sem(&self) -> f64 {
        self.sd / (self.size as f64).sqrt()
    }
}

/// One two-sample study: both group summaries plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub id: String,
    pub control: GroupSummary,
    pub experiment: GroupSummary,
    /// Posterior tail mass per side.
    pub alpha_dm: f64,
    pub units: String,
    pub label_control: String,
    pub label_experiment: String,
    pub source_id: String,
}

impl StudyRecord {
    /// A record with empty labels, mostly useful in tests and simulations.
    pub fn bare(control: GroupSummary, experiment: GroupSummary, alpha_dm: f64) -> Result<Self> {
        check_alpha(alpha_dm)?;
        Ok(Self {
            id: String::new(),
            control,
            experiment,
            alpha_dm,
            units: String::new(),
            label_control: String::new(),
            label_experiment: String::new(),
            source_id: String::new(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        GroupSummary::new(self.control.mean, self.control.sd, self.control.size)?;
        GroupSummary::new(self.experiment.mean, self.experiment.sd, self.experiment.size)?;
        check_alpha(self.alpha_dm)
    }

    /// Relative analyses assume a positive control mean.
    pub fn validate_relative(&self) -> Result<()> {
        self.validate()?;
        if self.control.mean <= 0.0 {
            return Err(invalid(
                "control.mean",
                format!("{} must be > 0 for relative analysis", self.control.mean),
            ));
        }
        Ok(())
    }
}

/// Raw observations of the control (`x`) and experiment (`y`) groups.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSamples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl RawSamples {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let samples = Self { x, y };
        samples.check()?;
        Ok(samples)
    }

    fn check(&self) -> Result<()> {
        if self.x.len() < 2 {
            return Err(Error::SequenceTooShort { name: "x", len: self.x.len() });
        }
        if self.y.len() < 2 {
            return Err(Error::SequenceTooShort { name: "y", len: self.y.len() });
        }
        Ok(())
    }
}

/// Sample mean and unbiased standard deviation of a sequence.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Summarizes both groups with their mean and `n - 1` standard deviation.
pub fn summarize(samples: &RawSamples) -> Result<(GroupSummary, GroupSummary)> {
    samples.check()?;
    let (mx, sx) = mean_sd(&samples.x);
    let (my, sy) = mean_sd(&samples.y);
    Ok((
        GroupSummary::new(mx, sx, samples.x.len())?,
        GroupSummary::new(my, sy, samples.y.len())?,
    ))
}

/// Parses a tail mass written as `<decimal>` or `<decimal>/<positive integer>`,
/// the way Bonferroni-divided levels are usually tabulated (`0.05/6`).
pub fn parse_alpha(text: &str) -> Result<f64> {
    let trimmed = text.trim();
    let fail = |reason: &str| Error::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (trimmed, None),
    };
    if num.is_empty()
        || !num.chars().all(|c| c.is_ascii_digit() || c == '.')
        || num.chars().filter(|&c| c == '.').count() > 1
        || num == "."
    {
        return Err(fail("numerator must be a plain decimal"));
    }
    let numerator: f64 = num.parse().map_err(|_| fail("numerator must be a plain decimal"))?;
    let value = match den {
        None => numerator,
        Some(d) => {
            if d.is_empty() || !d.chars().all(|c| c.is_ascii_digit()) {
                return Err(fail("denominator must be a positive integer"));
            }
            let denominator: u64 = d.parse().map_err(|_| fail("denominator too large"))?;
            if denominator == 0 {
                return Err(fail("denominator must be a positive integer"));
            }
            numerator / denominator as f64
        }
    };
    check_alpha(value)?;
    Ok(value)
}

pub(crate) fn check_alpha(value: f64) -> Result<()> {
    if value > 0.0 && value < 0.5 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange { value })
    }
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidInput { field, reason: reason.into() }
}

/// Lower and upper credible bounds of a scalar posterior, `tail_mass` in each tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleBounds {
    pub lo: f64,
    pub hi: f64,
    pub tail_mass: f64,
    pub scale: Scale,
}

impl CredibleBounds {
    pub fn new(lo: f64, hi: f64, tail_mass: f64, scale: Scale) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(invalid("bounds", format!("[{lo}, {hi}] is not an interval")));
        }
        check_alpha(tail_mass)?;
        Ok(Self { lo, hi, tail_mass, scale })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Effect strength of one study on both scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectStrengthResult {
    pub delta_l: f64,
    pub r_delta_l: Option<f64>,
    pub delta_m: f64,
    pub r_delta_m: Option<f64>,
    pub bounds_raw: CredibleBounds,
    pub bounds_rel: Option<CredibleBounds>,
    /// Difference in sample means, `ybar - xbar`.
    pub sign_ref_raw: f64,
    /// Relative difference in sample means, `(ybar - xbar) / xbar`.
    pub sign_ref_rel: f64,
}

/// Null region `[neg_threshold, pos_threshold]` of effect sizes deemed not meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullRegion {
    pub neg_threshold: f64,
    pub pos_threshold: f64,
    pub scale: Scale,
}

impl NullRegion {
    /// Thresholds must straddle zero strictly; a point null is not testable.
    pub fn new(neg_threshold: f64, pos_threshold: f64, scale: Scale) -> Result<Self> {
        if !(neg_threshold.is_finite() && pos_threshold.is_finite()) {
            return Err(invalid("null region", "thresholds must be finite"));
        }
        if !(neg_threshold < 0.0 && 0.0 < pos_threshold) {
            return Err(invalid(
                "null region",
                format!("need neg < 0 < pos, got [{neg_threshold}, {pos_threshold}]"),
            ));
        }
        Ok(Self { neg_threshold, pos_threshold, scale })
    }

    pub fn symmetric(half_width: f64, scale: Scale) -> Result<Self> {
        Self::new(-half_width, half_width, scale)
    }

    pub fn width(&self) -> f64 {
        self.pos_threshold - self.neg_threshold
    }

    pub fn contains(&self, value: f64) -> bool {
        self.neg_threshold <= value && value <= self.pos_threshold
    }

    /// Expresses the region in raw units. Relative thresholds are fractions of
    /// the control sample mean, which must be positive.
    pub fn to_raw(&self, control_mean: f64) -> Result<NullRegion> {
        match self.scale {
            Scale::Raw => Ok(*self),
            Scale::Relative => {
                if control_mean <= 0.0 || !control_mean.is_finite() {
                    return Err(invalid(
                        "control.mean",
                        format!("{control_mean} must be > 0 to scale a relative null region"),
                    ));
                }
                NullRegion::new(
                    self.neg_threshold * control_mean,
                    self.pos_threshold * control_mean,
                    Scale::Raw,
                )
            }
        }
    }
}

/// Every candidate statistic compared in the benchmarks, one value per row of
/// the candidate table. Absent values mean the statistic is undefined for the
/// study (zero is a legitimate value and never stands in for "missing").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateStatistics {
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
    pub bounds_raw: CredibleBounds,
    pub bounds_rel: Option<CredibleBounds>,
}

/// Candidate statistics ranked by the benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Candidate {
    XbarDm,
    RXbarDm,
    SDm,
    RsDm,
    Bf,
    PN,
    PE,
    PSg,
    Cd,
    DeltaM,
    RDeltaM,
    DeltaL,
    RDeltaL,
    Rnd,
}

impl Candidate {
    pub const ALL: [Candidate; 14] = [
        Candidate::XbarDm,
        Candidate::RXbarDm,
        Candidate::SDm,
        Candidate::RsDm,
        Candidate::Bf,
        Candidate::PN,
        Candidate::PE,
        Candidate::PSg,
        Candidate::Cd,
        Candidate::DeltaM,
        Candidate::RDeltaM,
        Candidate::DeltaL,
        Candidate::RDeltaL,
        Candidate::Rnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Candidate::XbarDm => "xbar_dm",
            Candidate::RXbarDm => "r_xbar_dm",
            Candidate::SDm => "s_dm",
            Candidate::RsDm => "rs_dm",
            Candidate::Bf => "bf",
            Candidate::PN => "p_n",
            Candidate::PE => "p_e",
            Candidate::PSg => "p_sg",
            Candidate::Cd => "cohen_d",
            Candidate::DeltaM => "delta_m",
            Candidate::RDeltaM => "r_delta_m",
            Candidate::DeltaL => "delta_l",
            Candidate::RDeltaL => "r_delta_l",
            Candidate::Rnd => "rnd",
        }
    }

    pub fn from_name(name: &str) -> Option<Candidate> {
        Candidate::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Value of this candidate in a computed suite, if defined.
    pub fn value(self, stats: &CandidateStatistics) -> Option<f64> {
        match self {
            Candidate::XbarDm => Some(stats.xbar_dm),
            Candidate::RXbarDm => stats.r_xbar_dm,
            Candidate::SDm => Some(stats.s_dm),
            Candidate::RsDm => stats.rs_dm,
            Candidate::Bf => stats.bf,
            Candidate::PN => Some(stats.p_n),
            Candidate::PE => stats.p_e,
            Candidate::PSg => stats.p_sg,
            Candidate::Cd => stats.cohen_d,
            Candidate::DeltaM => Some(stats.delta_m),
            Candidate::RDeltaM => stats.r_delta_m,
            Candidate::DeltaL => Some(stats.delta_l),
            Candidate::RDeltaL => stats.r_delta_l,
            Candidate::Rnd => Some(stats.rnd),
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ground-truth population parameters of one simulated experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub m: usize,
    pub n: usize,
    pub alpha_dm: f64,
}

impl PopulationConfig {
    pub fn new(
        mu_x: f64,
        mu_y: f64,
        sigma_x: f64,
        sigma_y: f64,
        m: usize,
        n: usize,
        alpha_dm: f64,
    ) -> Result<Self> {
        let config = Self { mu_x, mu_y, sigma_x, sigma_y, m, n, alpha_dm };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu_x.is_finite() && self.mu_y.is_finite()) {
            return Err(invalid("population mean", "must be finite"));
        }
        // Zero spread is accepted so degenerate populations can be simulated.
        for (name, s) in [("sigma_x", self.sigma_x), ("sigma_y", self.sigma_y)] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(invalid(name, format!("{s} must be finite and >= 0")));
            }
        }
        if self.m < 2 || self.n < 2 {
            return Err(invalid("group size", format!("m={}, n={} (need >= 2)", self.m, self.n)));
        }
        check_alpha(self.alpha_dm)
    }

    pub fn mu_dm(&self) -> f64 {
        self.mu_y - self.mu_x
    }

    pub fn sigma_d(&self) -> f64 {
        (self.sigma_x * self.sigma_x + self.sigma_y * self.sigma_y).sqrt()
    }

    pub fn df_d(&self) -> usize {
        self.m + self.n - 2
    }

    pub fn r_mu_dm(&self) -> f64 {
        self.mu_dm() / self.mu_x
    }

    pub fn sigma_dm(&self) -> f64 {
        (self.sigma_x * self.sigma_x / self.m as f64 + self.sigma_y * self.sigma_y / self.n as f64)
            .sqrt()
    }

    pub fn r_sigma_dm(&self) -> f64 {
        self.sigma_dm() / self.mu_x
    }

    pub fn r_sigma_d(&self) -> f64 {
        self.sigma_d() / self.mu_x
    }
}

/// Ground-truth measures of effect strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    MuDm,
    SigmaD,
    DfD,
    AlphaDm,
    RMuDm,
    RSigmaD,
}

impl Measure {
    pub const RAW: [Measure; 4] = [Measure::MuDm, Measure::SigmaD, Measure::DfD, Measure::AlphaDm];
    pub const RELATIVE: [Measure; 4] =
        [Measure::RMuDm, Measure::RSigmaD, Measure::DfD, Measure::AlphaDm];

    pub fn for_scale(scale: Scale) -> [Measure; 4] {
        match scale {
            Scale::Raw => Measure::RAW,
            Scale::Relative => Measure::RELATIVE,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::MuDm => "mu_dm",
            Measure::SigmaD => "sigma_d",
            Measure::DfD => "df_d",
            Measure::AlphaDm => "alpha_dm",
            Measure::RMuDm => "r_mu_dm",
            Measure::RSigmaD => "r_sigma_d",
        }
    }

    pub fn from_name(name: &str) -> Option<Measure> {
        [
            Measure::MuDm,
            Measure::SigmaD,
            Measure::DfD,
            Measure::AlphaDm,
            Measure::RMuDm,
            Measure::RSigmaD,
        ]
        .into_iter()
        .find(|m| m.name() == name)
    }

    /// Value of the measure for a configuration; magnitudes for the location measures.
    pub fn value(self, config: &PopulationConfig) -> f64 {
        match self {
            Measure::MuDm => config.mu_dm().abs(),
            Measure::SigmaD => config.sigma_d(),
            Measure::DfD => config.df_d() as f64,
            Measure::AlphaDm => config.alpha_dm,
            Measure::RMuDm => config.r_mu_dm().abs(),
            Measure::RSigmaD => config.r_sigma_d(),
        }
    }

    /// Whether larger values of the measure mean higher effect strength.
    pub fn larger_is_stronger(self) -> bool {
        !matches!(self, Measure::SigmaD | Measure::RSigmaD)
    }

    /// Whether `a` has strictly higher effect strength than `b` under this measure.
    pub fn stronger(self, a: &PopulationConfig, b: &PopulationConfig) -> bool {
        let (va, vb) = (self.value(a), self.value(b));
        if self.larger_is_stronger() {
            va > vb
        } else {
            va < vb
        }
    }

    pub fn designate(self, exp1: &PopulationConfig, exp2: &PopulationConfig) -> Designation {
        if self.stronger(exp1, exp2) {
            Designation::Exp1Stronger
        } else {
            Designation::Exp2Stronger
        }
    }

    pub fn is_relative(self) -> bool {
        matches!(self, Measure::RMuDm | Measure::RSigmaD)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ground-truth designation for a pair of experiments. Ties designate
/// experiment 2, since experiment 1 is then not the stronger one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Designation {
    Exp1Stronger,
    Exp2Stronger,
}

/// How the measures of a comparison study vary between the two experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StudyDesign {
    /// One measure varies (fair coin winner); the others are held equal.
    Individual(Measure),
    /// Every measure of the scale varies independently.
    Simultaneous,
}

/// Two population configurations compared for effect strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPair {
    pub exp1: PopulationConfig,
    pub exp2: PopulationConfig,
    pub design: StudyDesign,
    pub ground_truth: BTreeMap<Measure, Designation>,
}

impl ComparisonPair {
    pub fn new(exp1: PopulationConfig, exp2: PopulationConfig, design: StudyDesign, scale: Scale) -> Self {
        let ground_truth = Measure::for_scale(scale)
            .into_iter()
            .map(|m| (m, m.designate(&exp1, &exp2)))
            .collect();
        Self { exp1, exp2, design, ground_truth }
    }

    pub fn truth(&self, measure: Measure) -> Designation {
        self.ground_truth
            .get(&measure)
            .copied()
            .unwrap_or_else(|| measure.designate(&self.exp1, &self.exp2))
    }
}

/// One cell of a comparison-error report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    /// Candidate name, or `oracle` for the harness check.
    pub candidate: String,
    /// Ground-truth measure the predictions are scored against.
    pub measure: Measure,
    pub mean_error: f64,
    /// Two-sided exact binomial p-value against an error rate of 0.5.
    pub p_value: f64,
    pub significant: bool,
    pub n_trials: usize,
}

/// Comparison-error rates of every candidate against one or more ground truths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub scale: Scale,
    pub regime: Regime,
    pub design: StudyDesign,
    pub rows: Vec<RiskRow>,
    /// Trials dropped because a sample fell outside the regime's sign.
    pub mixed_sign_trials: usize,
    /// Pair-set regenerations needed to pass the decorrelation checks.
    pub regenerations: usize,
    /// Two-sample KS statistic between the two experiments' expected t-ratios.
    pub t_ratio_ks: f64,
}

impl RiskReport {
    pub fn row(&self, candidate: &str, measure: Measure) -> Option<&RiskRow> {
        self.rows.iter().find(|r| r.candidate == candidate && r.measure == measure)
    }
}

/// Spearman correlation of one candidate's mean with one measure series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub candidate: Candidate,
    pub measure: Measure,
    pub rho: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationReport {
    pub fn row(&self, candidate: Candidate, measure: Measure) -> Option<&CorrelationRow> {
        self.rows.iter().find(|r| r.candidate == candidate && r.measure == measure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn summarize_constant_sequence() {
        let s = RawSamples::new(vec![1.0; 4], vec![1.0, 1.0]).unwrap();
        let (x, _) = summarize(&s).unwrap();
        assert_eq!(x.mean, 1.0);
        assert_eq!(x.sd, 0.0);
        assert_eq!(x.size, 4);
    }

    #[test]
    fn summarize_hand_values() {
        let s = RawSamples::new(vec![0.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let (x, y) = summarize(&s).unwrap();
        assert_eq!(x.mean, 1.0);
        assert_relative_eq!(x.sd, 2f64.sqrt(), max_relative = 1e-15);
        assert_eq!(y.mean, 2.0);
        assert_eq!(y.sd, 1.0);
    }

    #[test]
    fn summarize_rejects_short_sequences() {
        assert_eq!(
            RawSamples::new(vec![1.0], vec![1.0, 2.0]),
            Err(Error::SequenceTooShort { name: "x", len: 1 })
        );
        assert!(matches!(
            RawSamples::new(vec![1.0, 2.0], vec![]),
            Err(Error::SequenceTooShort { name: "y", len: 0 })
        ));
    }

    #[test]
    fn alpha_plain_and_fraction() {
        assert_eq!(parse_alpha("0.05").unwrap(), 0.05);
        assert_eq!(parse_alpha("0.05/6").unwrap(), 0.05 / 6.0);
        assert_eq!(parse_alpha(" 0.05 / 21 ").unwrap(), 0.05 / 21.0);
        assert_relative_eq!(parse_alpha("0.05/6").unwrap(), 0.008333333333, max_relative = 1e-9);
    }

    #[test]
    fn alpha_errors() {
        assert!(matches!(parse_alpha("0.6"), Err(Error::AlphaOutOfRange { .. })));
        assert!(matches!(parse_alpha("0.5"), Err(Error::AlphaOutOfRange { .. })));
        assert!(matches!(parse_alpha("0"), Err(Error::AlphaOutOfRange { .. })));
        for bad in ["", "abc", "0.05/", "0.05/0", "0.05/2.5", "-0.05", "1e-2", "0.0.5", ".", "/6"] {
            assert!(matches!(parse_alpha(bad), Err(Error::Parse { .. })), "{bad:?}");
        }
    }

    #[test]
    fn null_region_rejects_point_null() {
        assert!(NullRegion::new(0.0, 1.0, Scale::Raw).is_err());
        assert!(NullRegion::new(-1.0, 0.0, Scale::Raw).is_err());
        assert!(NullRegion::new(1.0, -1.0, Scale::Raw).is_err());
        let r = NullRegion::new(-0.2, 0.25, Scale::Relative).unwrap();
        let raw = r.to_raw(200.0).unwrap();
        assert_eq!((raw.neg_threshold, raw.pos_threshold), (-40.0, 50.0));
        assert!(r.to_raw(-1.0).is_err());
    }

    #[test]
    fn derived_measures_recompute() {
        let c = PopulationConfig::new(10.0, 14.0, 3.0, 4.0, 9, 16, 0.05).unwrap();
        assert_eq!(c.mu_dm(), 4.0);
        assert_eq!(c.sigma_d(), 5.0);
        assert_eq!(c.df_d(), 23);
        assert_eq!(c.r_mu_dm(), 0.4);
        assert_relative_eq!(c.sigma_dm(), (1.0f64 + 1.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(c.r_sigma_dm(), 2f64.sqrt() / 10.0, max_relative = 1e-15);
        assert_eq!(c.r_sigma_d(), 0.5);
    }

    #[test]
    fn measure_orientation() {
        let a = PopulationConfig::new(10.0, 14.0, 3.0, 4.0, 9, 16, 0.05).unwrap();
        let mut b = a;
        b.sigma_y = 5.0;
        assert!(Measure::SigmaD.stronger(&a, &b));
        assert!(!Measure::SigmaD.stronger(&b, &a));
        assert_eq!(Measure::DfD.designate(&a, &a), Designation::Exp2Stronger);
        let mut c = a;
        c.alpha_dm = 0.01;
        assert!(Measure::AlphaDm.stronger(&a, &c));
        c.mu_y = 2.0;
        assert!(Measure::MuDm.stronger(&c, &a));
    }

    #[test]
    fn candidate_names_round_trip() {
        for c in Candidate::ALL {
            assert_eq!(Candidate::from_name(c.name()), Some(c));
        }
        for m in Measure::RAW.into_iter().chain(Measure::RELATIVE) {
            assert_eq!(Measure::from_name(m.name()), Some(m));
        }
    }
}
