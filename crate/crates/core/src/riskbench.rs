//! Simulation benchmarks of the candidate statistics.
//!
//! Two campaigns are supported. Correlation studies walk a series of
//! population configurations toward higher effect strength along one measure
//! and report the Spearman correlation of each candidate's mean with the
//! step. Comparison studies draw pairs of experiments with known ground-truth
//! designations and score how often each candidate picks the stronger one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{Error, Result};
use crate::model::{
    Candidate, CandidateStatistics, ComparisonPair, CorrelationReport, CorrelationRow, Designation,
    Measure, NullRegion, PopulationConfig, RawSamples, Regime, RiskReport, RiskRow,
    Scale, StudyDesign, StudyRecord,
};
use crate::posterior::sample_posterior;
use crate::statistics::{candidate_suite, decide_stronger, sign, welch_test};
use crate::stream::{open_unit, substream, substream_seed, Purpose};
use crate::tdist::t_upper_quantile;

/// Pairs per comparison study at desk scale.
pub const DESK_PAIRS: usize = 200;
/// Samples per configuration at desk scale.
pub const DESK_SAMPLES: usize = 50;
/// Posterior draws per sample statistic at desk scale.
pub const DESK_DRAWS: usize = 2000;
pub const FULL_PAIRS: usize = 1000;
pub const FULL_SAMPLES: usize = 100;

/// Name of the harness candidate that reads the ground truth directly.
pub const ORACLE: &str = "oracle";

/// Group-size range of simulated experiments.
pub const MIN_GROUP: usize = 6;
pub const MAX_GROUP: usize = 40;
/// Minimum difference in total size between experiments whose degrees of
/// freedom differ. Smaller gaps leave df_D with too little influence on the
/// statistics to resolve next to the other measures.
pub const DF_GAP: usize = 30;

/// Per-group size increment between steps of a df_D series.
const SERIES_DF_STEP: usize = 3;

/// Tail masses are drawn from `0.05 / k` for `k` in `1..=ALPHA_STEPS`.
const ALPHA_STEPS: u64 = 10;

// ---------------------------------------------------------------------------
// Samples and t-ratios

/// Normal samples of both groups of `config`. Each group reads its own
/// stream seeded from `rng`, so growing one group leaves the other unchanged.
pub fn draw_sample<R: Rng + ?Sized>(config: &PopulationConfig, rng: &mut R) -> RawSamples {
    let group = |seed: u64, size: usize, mu: f64, sigma: f64| -> Vec<f64> {
        let mut stream = ChaCha8Rng::seed_from_u64(seed);
        (0..size)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut stream);
                mu + sigma * z
            })
            .collect()
    };
    let (seed_x, seed_y) = (rng.next_u64(), rng.next_u64());
    let x = group(seed_x, config.m, config.mu_x, config.sigma_x);
    let y = group(seed_y, config.n, config.mu_y, config.sigma_y);
    RawSamples { x, y }
}

/// Critical t value at upper-tail probability `alpha_dm` with `m + n - 1`
/// degrees of freedom.
pub fn t_critical(config: &PopulationConfig) -> f64 {
    t_upper_quantile(config.alpha_dm, (config.m + config.n - 1) as f64).abs()
}

/// Welch t statistic of a sample divided by the configuration's critical value.
pub fn t_ratio(samples: &RawSamples, config: &PopulationConfig) -> Result<f64> {
    let (x, y) = crate::model::summarize(samples)?;
    Ok(welch_test(&x, &y).t / t_critical(config))
}

/// Mean t-ratio over the samples `0..n_samples` drawn from the sample
/// substreams of `index`.
pub fn expected_t_ratio(config: &PopulationConfig, seed: u64, index: u64, n_samples: usize) -> Result<f64> {
    let crit = t_critical(config);
    let mut total = 0.0;
    for s in 0..n_samples {
        let samples = draw_sample(config, &mut substream(seed, Purpose::Sample, index, s as u64));
        let (x, y) = crate::model::summarize(&samples)?;
        total += welch_test(&x, &y).t / crit;
    }
    Ok(total / n_samples as f64)
}

// ---------------------------------------------------------------------------
// Binomial and KS helpers

/// Exact two-sided binomial p-value of `successes` out of `trials` against
/// probability one half.
pub fn binomial_test_half(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let tail = successes.min(trials - successes);
    if 2 * tail == trials {
        return 1.0;
    }
    let dist = Binomial::new(0.5, trials as u64).expect("valid binomial");
    (2.0 * dist.cdf(tail as u64)).min(1.0)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let z = a[i].min(b[j]);
        while i < a.len() && a[i] <= z {
            i += 1;
        }
        while j < b.len() && b[j] <= z {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

// ---------------------------------------------------------------------------
// Correlation studies

/// Population configurations stepping one measure toward higher effect strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub measure: Measure,
    pub configs: Vec<PopulationConfig>,
    /// Other measures that unavoidably move along with `measure`.
    pub coupled: Vec<Measure>,
}

/// Multiplicative step applied to location and spread measures.
const SERIES_FACTOR: f64 = 1.25;

/// Builds a series of `steps` configurations varying `measure` from `base`.
pub fn generate_series(measure: Measure, steps: usize, base: &PopulationConfig) -> Result<Series> {
    base.validate()?;
    if steps < 5 {
        return Err(Error::InfeasibleSeries(format!("{steps} steps, need at least 5")));
    }
    if measure.is_relative() && base.mu_x <= 0.0 {
        return Err(Error::InfeasibleSeries("relative measures need mu_x > 0".into()));
    }
    let infeasible = |why: &str| Err(Error::InfeasibleSeries(format!("{measure}: {why}")));
    let mut configs = Vec::with_capacity(steps);
    let coupled = match measure {
        Measure::MuDm | Measure::RMuDm => {
            if base.mu_dm() == 0.0 {
                return infeasible("base difference in means is zero");
            }
            let top = base.r_mu_dm() * SERIES_FACTOR.powi(steps as i32 - 1);
            if measure == Measure::RMuDm && top <= -1.0 {
                return infeasible("relative difference would reach -100%");
            }
            for i in 0..steps {
                let mut c = *base;
                c.mu_y = base.mu_x + base.mu_dm() * SERIES_FACTOR.powi(i as i32);
                configs.push(c);
            }
            vec![if measure == Measure::MuDm { Measure::RMuDm } else { Measure::MuDm }]
        }
        Measure::SigmaD | Measure::RSigmaD => {
            if base.sigma_d() == 0.0 {
                return infeasible("base spread is zero");
            }
            for i in 0..steps {
                let mut c = *base;
                let f = SERIES_FACTOR.powi(-(i as i32));
                c.sigma_x *= f;
                c.sigma_y *= f;
                configs.push(c);
            }
            vec![if measure == Measure::SigmaD { Measure::RSigmaD } else { Measure::SigmaD }]
        }
        Measure::DfD => {
            for i in 0..steps {
                let mut c = *base;
                c.m += SERIES_DF_STEP * i;
                c.n += SERIES_DF_STEP * i;
                configs.push(c);
            }
            Vec::new()
        }
        Measure::AlphaDm => {
            for i in 0..steps {
                let mut c = *base;
                c.alpha_dm = 0.05 / (steps - i) as f64;
                configs.push(c);
            }
            Vec::new()
        }
    };
    if configs.windows(2).any(|w| !measure.stronger(&w[1], &w[0])) {
        return infeasible("series does not increase in effect strength");
    }
    Ok(Series { measure, configs, coupled })
}

/// Settings shared by the configurations of a correlation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSettings {
    pub samples: usize,
    pub draws: usize,
    pub seed: u64,
    pub bootstrap: usize,
    pub null_region: NullRegion,
    pub candidates: Vec<Candidate>,
}

/// Spearman rank correlation with average ranks for ties. Zero when either
/// sequence is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end - 1) as f64 / 2.0 + 1.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Candidate values per configuration and sample; `None` where undefined.
type ValueGrid = Vec<Vec<Vec<Option<f64>>>>;

/// Spearman correlation of each candidate's mean with the step index of a
/// series, with paired-bootstrap percentile intervals at the
/// Bonferroni-adjusted level.
///
/// Every configuration reuses the same sample and posterior substreams so
/// that differences along the series come from the configurations alone.
pub fn spearman_study(series: &Series, settings: &CorrelationSettings) -> Result<CorrelationReport> {
    if series.configs.len() < 5 {
        return Err(Error::InfeasibleSeries(format!("{} configurations, need at least 5", series.configs.len())));
    }
    if settings.samples < 2 {
        return Err(Error::InvalidInput { field: "samples", reason: "need at least 2".into() });
    }
    let cands = &settings.candidates;
    let steps = series.configs.len();
    // grid[c][i][s]
    let per_config: Vec<Vec<Vec<Option<f64>>>> = series
        .configs
        .par_iter()
        .enumerate()
        .map(|(i, config)| {
            (0..settings.samples)
                .map(|s| {
                    let stats = series_statistics(config, i, s, settings)?;
                    Ok(cands.iter().map(|c| c.value(&stats)).collect())
                })
                .collect::<Result<Vec<Vec<Option<f64>>>>>()
        })
        .collect::<Result<_>>()?;
    let grid: ValueGrid = (0..cands.len())
        .map(|c| {
            (0..steps)
                .map(|i| (0..settings.samples).map(|s| per_config[i][s][c]).collect())
                .collect()
        })
        .collect();

    let index: Vec<f64> = (0..steps).map(|i| i as f64).collect();
    let all: Vec<usize> = (0..settings.samples).collect();
    let level = 0.05 / cands.len() as f64;
    let mut rng = substream(settings.seed, Purpose::Bootstrap, measure_code(series.measure), 0);
    let resamples: Vec<Vec<usize>> = (0..settings.bootstrap)
        .map(|_| {
            (0..settings.samples)
                .map(|_| (rng.next_u64() % settings.samples as u64) as usize)
                .collect()
        })
        .collect();

    let rows = cands
        .iter()
        .enumerate()
        .map(|(c, &candidate)| {
            let rho = match config_means(&grid[c], &all) {
                Some(means) => spearman(&means, &index),
                None => 0.0,
            };
            let mut boot: Vec<f64> = resamples
                .iter()
                .map(|pick| config_means(&grid[c], pick).map_or(0.0, |m| spearman(&m, &index)))
                .collect();
            boot.sort_by(f64::total_cmp);
            let (ci_lo, ci_hi) = if boot.is_empty() {
                (rho, rho)
            } else {
                (percentile(&boot, level / 2.0), percentile(&boot, 1.0 - level / 2.0))
            };
            let significant = !boot.is_empty() && (ci_lo > 0.0 || ci_hi < 0.0);
            CorrelationRow { candidate, measure: series.measure, rho, ci_lo, ci_hi, significant }
        })
        .collect();
    Ok(CorrelationReport { rows })
}

fn measure_code(measure: Measure) -> u64 {
    measure as u64
}

/// Mean of each configuration over the chosen samples, skipping undefined
/// values; `None` if some configuration has no defined value.
fn config_means(values: &[Vec<Option<f64>>], pick: &[usize]) -> Option<Vec<f64>> {
    values
        .iter()
        .map(|per_sample| {
            let (sum, count) = pick
                .iter()
                .filter_map(|&s| per_sample[s])
                .fold((0.0, 0usize), |(sum, n), v| (sum + v, n + 1));
            (count > 0).then(|| sum / count as f64)
        })
        .collect()
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let j = h.floor() as usize;
    if j + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[j] + (h - j as f64) * (sorted[j + 1] - sorted[j])
}

fn series_statistics(
    config: &PopulationConfig,
    step: usize,
    sample: usize,
    settings: &CorrelationSettings,
) -> Result<CandidateStatistics> {
    let seed = settings.seed;
    let samples = draw_sample(config, &mut substream(seed, Purpose::SeriesSample, 0, sample as u64));
    let post_seed = substream_seed(seed, Purpose::SeriesPosterior, 0, sample as u64);
    let rnd = open_unit(&mut substream(seed, Purpose::Rnd, step as u64, sample as u64));
    sample_statistics(&samples, config.alpha_dm, &settings.null_region, settings.draws, post_seed, rnd)
}

/// Candidate statistics of one simulated sample.
fn sample_statistics(
    samples: &RawSamples,
    alpha_dm: f64,
    region: &NullRegion,
    draws: usize,
    posterior_seed: u64,
    rnd: f64,
) -> Result<CandidateStatistics> {
    let (x, y) = crate::model::summarize(samples)?;
    let study = StudyRecord::bare(x, y, alpha_dm)?;
    let posterior = sample_posterior(&study.control, &study.experiment, draws, posterior_seed)?;
    candidate_suite(&study, region, &posterior, rnd)
}

/// A base configuration suited to correlation studies on the given regime.
pub fn default_series_base(regime: Regime) -> PopulationConfig {
    PopulationConfig {
        mu_x: 100.0,
        mu_y: 100.0 + regime.sign() * 25.0,
        sigma_x: 15.0,
        sigma_y: 15.0,
        m: 10,
        n: 10,
        alpha_dm: 0.05 / 4.0,
    }
}

// ---------------------------------------------------------------------------
// Comparison studies

/// Full description of a comparison-error study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSettings {
    pub scale: Scale,
    pub regime: Regime,
    pub design: StudyDesign,
    pub pairs: usize,
    pub samples: usize,
    pub draws: usize,
    pub seed: u64,
    pub null_region: NullRegion,
    pub candidates: Vec<Candidate>,
    /// Add the ground-truth oracle as a harness check.
    pub oracle: bool,
    /// Parameter draws allowed per pair before the regime is declared infeasible.
    pub max_attempts: usize,
    /// Pair-set regenerations allowed to pass the decorrelation checks.
    pub max_regenerations: usize,
}

impl ComparisonSettings {
    /// Desk-scale settings with the default null region of the scale.
    pub fn desk(scale: Scale, regime: Regime, design: StudyDesign, seed: u64) -> Self {
        Self {
            scale,
            regime,
            design,
            pairs: DESK_PAIRS,
            samples: DESK_SAMPLES,
            draws: DESK_DRAWS,
            seed,
            null_region: default_null_region(scale),
            candidates: Candidate::ALL.to_vec(),
            oracle: true,
            max_attempts: 2000,
            max_regenerations: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs < 50 {
            return Err(Error::InvalidInput { field: "pairs", reason: format!("{} < 50", self.pairs) });
        }
        if self.samples < 1 {
            return Err(Error::InvalidInput { field: "samples", reason: "need at least 1".into() });
        }
        if let StudyDesign::Individual(m) = self.design {
            if !Measure::for_scale(self.scale).contains(&m) {
                return Err(Error::InvalidInput {
                    field: "design",
                    reason: format!("{m} is not a {} measure", self.scale),
                });
            }
        }
        Ok(())
    }

    fn measures(&self) -> Vec<Measure> {
        match self.design {
            StudyDesign::Individual(m) => vec![m],
            StudyDesign::Simultaneous => Measure::for_scale(self.scale).to_vec(),
        }
    }
}

/// Null region used when a study spec names none: +-20% on the relative
/// scale, +-5 units on the raw scale.
pub fn default_null_region(scale: Scale) -> NullRegion {
    match scale {
        Scale::Raw => NullRegion { neg_threshold: -5.0, pos_threshold: 5.0, scale },
        Scale::Relative => NullRegion { neg_threshold: -0.2, pos_threshold: 0.2, scale },
    }
}

/// Generated pairs with their generation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSet {
    pub pairs: Vec<ComparisonPair>,
    /// Expected t-ratio of each experiment, over the samples the study uses.
    pub t_ratios: Vec<[f64; 2]>,
    pub regenerations: usize,
}

/// Parameters of one experiment in units of its control mean.
#[derive(Debug, Clone, Copy)]
struct Draw {
    mu_x: f64,
    r_mu: f64,
    r_sigma: f64,
    m: usize,
    n: usize,
    alpha_k: u64,
}

impl Draw {
    fn config(&self, theta: f64, regime: Regime) -> PopulationConfig {
        let sigma_d = self.r_sigma * self.mu_x;
        PopulationConfig {
            mu_x: self.mu_x,
            mu_y: self.mu_x * (1.0 + regime.sign() * self.r_mu),
            sigma_x: sigma_d * theta.cos(),
            sigma_y: sigma_d * theta.sin(),
            m: self.m,
            n: self.n,
            alpha_dm: 0.05 / self.alpha_k as f64,
        }
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * open_unit(rng)
}

fn uniform_int<R: Rng + ?Sized>(rng: &mut R, lo: u64, hi: u64) -> u64 {
    lo + rng.next_u64() % (hi - lo + 1)
}

fn fresh_draw<R: Rng + ?Sized>(rng: &mut R) -> Draw {
    Draw {
        mu_x: uniform(rng, 1.0, 100.0),
        r_mu: uniform(rng, 0.05, 0.8),
        r_sigma: uniform(rng, 0.05, 1.0),
        m: uniform_int(rng, MIN_GROUP as u64, MAX_GROUP as u64) as usize,
        n: uniform_int(rng, MIN_GROUP as u64, MAX_GROUP as u64) as usize,
        alpha_k: uniform_int(rng, 1, ALPHA_STEPS),
    }
}

/// Replaces the value of `measure` in `d` with a fresh, different one.
fn redraw_measure<R: Rng + ?Sized>(d: &Draw, measure: Measure, rng: &mut R) -> Draw {
    let mut out = *d;
    loop {
        let fresh = fresh_draw(rng);
        match measure {
            Measure::MuDm | Measure::RMuDm => out.r_mu = fresh.r_mu,
            Measure::SigmaD | Measure::RSigmaD => out.r_sigma = fresh.r_sigma,
            Measure::DfD => {
                out.m = fresh.m;
                out.n = fresh.n;
            }
            Measure::AlphaDm => out.alpha_k = fresh.alpha_k,
        }
        let differs = match measure {
            Measure::MuDm | Measure::RMuDm => out.r_mu != d.r_mu,
            Measure::SigmaD | Measure::RSigmaD => out.r_sigma != d.r_sigma,
            Measure::DfD => (out.m + out.n).abs_diff(d.m + d.n) >= DF_GAP,
            Measure::AlphaDm => out.alpha_k != d.alpha_k,
        };
        if differs {
            return out;
        }
    }
}

/// Whether a configuration suits the study: expected t-ratio beyond +-1 in the
/// regime's direction and, for relative studies, a control mean far enough
/// from zero that its posterior rarely reaches it even at the smallest group
/// size. The relative bound ignores the actual size so that it does not couple
/// the size of a group with its spread.
fn admissible(
    config: &PopulationConfig,
    settings: &ComparisonSettings,
    pair: usize,
    exp: usize,
) -> Result<Option<f64>> {
    if settings.scale == Scale::Relative {
        let z = config.mu_x * (MIN_GROUP as f64).sqrt() / config.sigma_x;
        if z < 8.0 {
            return Ok(None);
        }
    }
    let ratio = expected_t_ratio(config, settings.seed, sample_index(pair, exp), settings.samples)?;
    Ok((ratio * settings.regime.sign() > 1.0).then_some(ratio))
}

fn sample_index(pair: usize, exp: usize) -> u64 {
    2 * pair as u64 + exp as u64
}

/// Draws one pair whose stronger experiment under each varying measure is set
/// by the fixed `coins`; parameter values are redrawn until both experiments
/// pass the regime filter.
fn draw_pair(
    settings: &ComparisonSettings,
    round_seed: u64,
    pair: usize,
    coins: &[(Measure, bool)],
) -> Result<(ComparisonPair, [f64; 2])> {
    let theta_lo = std::f64::consts::PI / 8.0;
    for attempt in 0..settings.max_attempts {
        let mut rng = substream(round_seed, Purpose::PairParams, pair as u64, attempt as u64 + 1);
        let theta = uniform(&mut rng, theta_lo, 3.0 * theta_lo);
        let base = fresh_draw(&mut rng);
        let (mut d1, mut d2) = (base, base);
        if settings.design == StudyDesign::Simultaneous && settings.scale == Scale::Relative {
            d2.mu_x = uniform(&mut rng, 1.0, 100.0);
        }
        for &(measure, exp1_stronger) in coins {
            let other = redraw_measure(&base, measure, &mut rng);
            let (mut a, mut b) = (d1, d2);
            copy_measure(&mut a, &base, measure);
            copy_measure(&mut b, &other, measure);
            let first_stronger =
                measure.stronger(&a.config(theta, settings.regime), &b.config(theta, settings.regime));
            if first_stronger == exp1_stronger {
                (d1, d2) = (a, b);
            } else {
                copy_measure(&mut a, &other, measure);
                copy_measure(&mut b, &base, measure);
                (d1, d2) = (a, b);
            }
        }
        let c1 = d1.config(theta, settings.regime);
        let c2 = d2.config(theta, settings.regime);
        let Some(r1) = admissible(&c1, settings, pair, 0)? else { continue };
        let Some(r2) = admissible(&c2, settings, pair, 1)? else { continue };
        return Ok((ComparisonPair::new(c1, c2, settings.design, settings.scale), [r1, r2]));
    }
    Err(Error::RegimeInfeasible {
        attempts: settings.max_attempts,
        reason: format!(
            "pair {pair}: no parameter draw reached an expected t-ratio beyond {} in the {} regime",
            settings.regime.sign(),
            settings.regime
        ),
    })
}

fn copy_measure(dst: &mut Draw, src: &Draw, measure: Measure) {
    match measure {
        Measure::MuDm | Measure::RMuDm => dst.r_mu = src.r_mu,
        Measure::SigmaD | Measure::RSigmaD => dst.r_sigma = src.r_sigma,
        Measure::DfD => {
            dst.m = src.m;
            dst.n = src.n;
        }
        Measure::AlphaDm => dst.alpha_k = src.alpha_k,
    }
}

/// Draws the pairs of a comparison study.
///
/// Under the individual design only the independent measure differs between
/// the two experiments and a fair coin picks the stronger one; the remaining
/// measures are equal, which designates experiment 2 by convention. Under the
/// simultaneous design every measure of the scale gets its own coin. The
/// designations are then checked with exact binomial tests against one half
/// (and, across measures, for agreement rates of one half), Bonferroni
/// corrected; a failing set is regenerated.
pub fn generate_comparison_pairs(settings: &ComparisonSettings) -> Result<PairSet> {
    settings.validate()?;
    let measures = settings.measures();
    for regenerations in 0..=settings.max_regenerations {
        let round_seed = substream_seed(settings.seed, Purpose::PairParams, u64::MAX, regenerations as u64);
        let drawn: Vec<(ComparisonPair, [f64; 2])> = (0..settings.pairs)
            .into_par_iter()
            .map(|j| {
                let mut coin_rng = substream(round_seed, Purpose::PairParams, j as u64, 0);
                let coins: Vec<(Measure, bool)> =
                    measures.iter().map(|&m| (m, coin_rng.next_u64() >> 63 == 1)).collect();
                draw_pair(settings, round_seed, j, &coins)
            })
            .collect::<Result<_>>()?;
        let (pairs, t_ratios): (Vec<_>, Vec<_>) = drawn.into_iter().unzip();
        if decorrelated(&pairs, settings.scale, &measures) {
            return Ok(PairSet { pairs, t_ratios, regenerations });
        }
    }
    Err(Error::RegimeInfeasible {
        attempts: settings.max_regenerations + 1,
        reason: "pair sets kept failing the decorrelation checks".into(),
    })
}

/// Binomial checks on the designations of a pair set: each varying measure
/// picks experiment 1 about half the time, and each varying measure agrees
/// with every other measure of the scale about half the time.
pub fn decorrelated(pairs: &[ComparisonPair], scale: Scale, varying: &[Measure]) -> bool {
    let all = Measure::for_scale(scale);
    let mut p_values = Vec::new();
    for &m in varying {
        let exp1 = pairs.iter().filter(|p| p.truth(m) == Designation::Exp1Stronger).count();
        p_values.push(binomial_test_half(exp1, pairs.len()));
    }
    for (i, &a) in varying.iter().enumerate() {
        for &b in all.iter().filter(|b| !varying[..=i].contains(b)) {
            let shared = pairs.iter().filter(|p| p.truth(a) == p.truth(b)).count();
            p_values.push(binomial_test_half(shared, pairs.len()));
        }
    }
    let threshold = 0.05 / p_values.len() as f64;
    p_values.iter().all(|&p| p > threshold)
}

/// Loss tallies of one candidate against one measure.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    losses: usize,
    trials: usize,
}

/// Scores every candidate on every pair and sample of a study.
pub fn run_comparison_study(settings: &ComparisonSettings, set: &PairSet) -> Result<RiskReport> {
    settings.validate()?;
    if set.pairs.is_empty() {
        return Err(Error::InvalidInput { field: "pairs", reason: "no pairs".into() });
    }
    let measures = settings.measures();
    let mut names: Vec<String> = settings.candidates.iter().map(|c| c.name().to_string()).collect();
    if settings.oracle {
        names.push(ORACLE.to_string());
    }
    let width = names.len() * measures.len();

    let per_pair: Vec<(Vec<Tally>, usize)> = set
        .pairs
        .par_iter()
        .enumerate()
        .map(|(j, pair)| score_pair(settings, &measures, j, pair))
        .collect::<Result<_>>()?;

    let mut totals = vec![Tally::default(); width];
    let mut mixed = 0;
    for (tallies, mixed_here) in &per_pair {
        for (t, add) in totals.iter_mut().zip(tallies) {
            t.losses += add.losses;
            t.trials += add.trials;
        }
        mixed += mixed_here;
    }

    let threshold = 0.05 / names.len() as f64;
    let mut rows = Vec::with_capacity(width);
    for (ci, name) in names.iter().enumerate() {
        for (mi, &measure) in measures.iter().enumerate() {
            let t = totals[ci * measures.len() + mi];
            let p_value = binomial_test_half(t.losses, t.trials);
            rows.push(RiskRow {
                candidate: name.clone(),
                measure,
                mean_error: if t.trials == 0 { f64::NAN } else { t.losses as f64 / t.trials as f64 },
                p_value,
                significant: t.trials > 0 && p_value < threshold,
                n_trials: t.trials,
            });
        }
    }

    let (r1, r2): (Vec<f64>, Vec<f64>) = set.t_ratios.iter().map(|r| (r[0], r[1])).unzip();
    Ok(RiskReport {
        scale: settings.scale,
        regime: settings.regime,
        design: settings.design,
        rows,
        mixed_sign_trials: mixed,
        regenerations: set.regenerations,
        t_ratio_ks: ks_statistic(&r1, &r2),
    })
}

fn score_pair(
    settings: &ComparisonSettings,
    measures: &[Measure],
    j: usize,
    pair: &ComparisonPair,
) -> Result<(Vec<Tally>, usize)> {
    let n_cands = settings.candidates.len() + usize::from(settings.oracle);
    let mut tallies = vec![Tally::default(); n_cands * measures.len()];
    let mut mixed = 0;
    let truths: Vec<Designation> = measures.iter().map(|&m| pair.truth(m)).collect();
    for s in 0..settings.samples {
        let mut stats = Vec::with_capacity(2);
        for (e, config) in [&pair.exp1, &pair.exp2].into_iter().enumerate() {
            let index = sample_index(j, e);
            let samples = draw_sample(config, &mut substream(settings.seed, Purpose::Sample, index, s as u64));
            let post_seed = substream_seed(settings.seed, Purpose::Posterior, index, s as u64);
            let rnd = open_unit(&mut substream(settings.seed, Purpose::Rnd, index, s as u64));
            stats.push(sample_statistics(&samples, config.alpha_dm, &settings.null_region, settings.draws, post_seed, rnd)?);
        }
        let (s1, s2) = (&stats[0], &stats[1]);
        let regime = settings.regime.sign();
        if sign(s1.xbar_dm) != regime || sign(s2.xbar_dm) != regime {
            mixed += 1;
            continue;
        }
        for (ci, &candidate) in settings.candidates.iter().enumerate() {
            let prediction = match decide_stronger(s1, s2, candidate, settings.regime) {
                Ok(p) => p,
                Err(Error::StatisticUnavailable(_)) => continue,
                Err(e) => return Err(e),
            };
            for (mi, truth) in truths.iter().enumerate() {
                let t = &mut tallies[ci * measures.len() + mi];
                t.trials += 1;
                t.losses += usize::from(prediction != (*truth == Designation::Exp1Stronger));
            }
        }
        if settings.oracle {
            let ci = settings.candidates.len();
            for mi in 0..measures.len() {
                // The oracle predicts the ground truth itself, so it never loses.
                tallies[ci * measures.len() + mi].trials += 1;
            }
        }
    }
    Ok((tallies, mixed))
}

/// Generates the pairs and scores them.
pub fn comparison_study(settings: &ComparisonSettings) -> Result<RiskReport> {
    let set = generate_comparison_pairs(settings)?;
    run_comparison_study(settings, &set)
}
