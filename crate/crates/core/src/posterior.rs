//! Monte Carlo draws from the marginal posteriors of the two group means,
//! empirical CDFs and credible bounds.
//!
//! Under the noninformative prior each mean has a location-scale Student-t
//! posterior, `mu_x ~ xbar + (s_x / sqrt(m)) * t_{m-1}` and likewise for
//! `mu_y`. Draws are laid out on a randomized rank-1 lattice: the pair
//! `(u1, u2)` of each draw is uniform on the unit square, the two coordinates
//! are independent, and the point set stratifies both margins, which keeps
//! the quantile estimates stable across seeds at moderate `k`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{check_alpha, CredibleBounds, GroupSummary, Scale, StudyRecord};
use crate::stream::open_unit;
use crate::tdist::IntegerT;

/// Default number of posterior draws.
pub const DEFAULT_DRAWS: usize = 10_000;
/// Smallest accepted number of posterior draws.
pub const MIN_DRAWS: usize = 1000;
/// Largest tolerated fraction of nonpositive control-mean draws before
/// relative statistics are withheld.
pub const NONPOSITIVE_TOLERANCE: f64 = 1e-3;

/// Paired posterior draws of the two group means.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub mu_x: Vec<f64>,
    pub mu_y: Vec<f64>,
    /// `mu_y[i] - mu_x[i]`.
    pub diff: Vec<f64>,
    /// `diff[i] / mu_x[i]`, withheld when too many control draws are nonpositive.
    rel_diff: Option<Vec<f64>>,
    pub k: usize,
    pub seed: u64,
    /// Control sd was zero, so every `mu_x` draw equals the sample mean.
    pub degenerate_control: bool,
    /// Experiment sd was zero.
    pub degenerate_experiment: bool,
    /// Fraction of `mu_x` draws that are `<= 0`.
    pub nonpositive_fraction: f64,
}

impl PosteriorDraws {
    /// Relative-difference draws, or `NonpositiveControl` when they were withheld.
    pub fn rel_diff(&self) -> Result<&[f64]> {
        self.rel_diff.as_deref().ok_or(Error::NonpositiveControl {
            fraction: self.nonpositive_fraction,
            tolerance: NONPOSITIVE_TOLERANCE,
        })
    }

    pub fn has_rel_diff(&self) -> bool {
        self.rel_diff.is_some()
    }

    /// Some control draws are nonpositive, though few enough to keep relative statistics.
    pub fn nonpositive_warning(&self) -> bool {
        self.nonpositive_fraction > 0.0 && self.rel_diff.is_some()
    }

    /// Draws on the requested scale.
    pub fn on_scale(&self, scale: Scale) -> Result<&[f64]> {
        match scale {
            Scale::Raw => Ok(&self.diff),
            Scale::Relative => self.rel_diff(),
        }
    }
}

/// Draws `k` samples from the posteriors of both group means.
///
/// The result depends only on the summaries, `k` and `seed`.
pub fn sample_posterior(
    control: &GroupSummary,
    experiment: &GroupSummary,
    k: usize,
    seed: u64,
) -> Result<PosteriorDraws> {
    if k < MIN_DRAWS {
        return Err(Error::InvalidInput {
            field: "draws",
            reason: format!("{k} < {MIN_DRAWS}"),
        });
    }
    for g in [control, experiment] {
        GroupSummary::new(g.mean, g.sd, g.size)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift_x = open_unit(&mut rng);
    let shift_y = open_unit(&mut rng);
    let offset = (rand::Rng::next_u64(&mut rng) % k as u64) as usize;
    let step = lattice_generator(k);

    let std_x = standard_grid(control, k, shift_x);
    let std_y = standard_grid(experiment, k, shift_y);
    let (sem_x, sem_y) = (control.sem(), experiment.sem());

    let mu_x: Vec<f64> = match &std_x {
        Some(q) => q.iter().map(|&t| control.mean + sem_x * t).collect(),
        None => vec![control.mean; k],
    };
    let mut mu_y = vec![experiment.mean; k];
    if let Some(q) = &std_y {
        // Row i of the lattice pairs x-stratum i with y-stratum (i*g + b) mod k.
        let mut r = offset;
        for slot in mu_y.iter_mut() {
            *slot = experiment.mean + sem_y * q[r];
            r += step;
            if r >= k {
                r -= k;
            }
        }
    }

    let diff: Vec<f64> = mu_y.iter().zip(&mu_x).map(|(y, x)| y - x).collect();
    let nonpositive = mu_x.iter().filter(|&&x| x <= 0.0).count();
    let nonpositive_fraction = nonpositive as f64 / k as f64;
    let rel_diff = (nonpositive_fraction <= NONPOSITIVE_TOLERANCE)
        .then(|| diff.iter().zip(&mu_x).map(|(d, x)| d / x).collect());

    Ok(PosteriorDraws {
        mu_x,
        mu_y,
        diff,
        rel_diff,
        k,
        seed,
        degenerate_control: std_x.is_none(),
        degenerate_experiment: std_y.is_none(),
        nonpositive_fraction,
    })
}

/// Posterior draws for a study record.
pub fn sample_study(study: &StudyRecord, k: usize, seed: u64) -> Result<PosteriorDraws> {
    sample_posterior(&study.control, &study.experiment, k, seed)
}

/// Standard-t quantiles on the shifted grid, or `None` for a zero-scale group.
fn standard_grid(group: &GroupSummary, k: usize, shift: f64) -> Option<Vec<f64>> {
    (group.sd > 0.0).then(|| IntegerT::new(group.df()).grid_quantiles(k, shift))
}

/// Generator of the Fibonacci-like rank-1 lattice with `k` points: the
/// integer nearest `k / phi` that is coprime to `k`.
fn lattice_generator(k: usize) -> usize {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut g = ((k as f64 / phi).round() as usize).max(1);
    while gcd(g, k) != 1 {
        g += 1;
    }
    g
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Fraction of draws `<= z`.
pub fn ecdf(draws: &[f64], z: f64) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let count = draws.iter().filter(|&&d| d <= z).count();
    Ok(count as f64 / draws.len() as f64)
}

/// Fewest draws that resolve `tail_mass` in each tail.
pub fn required_draws(tail_mass: f64) -> usize {
    (2.0 / tail_mass).ceil() as usize
}

/// Lower and upper credible bounds at `tail_mass` and `1 - tail_mass`.
pub fn credible_bounds(draws: &[f64], tail_mass: f64, scale: Scale) -> Result<CredibleBounds> {
    SortedDraws::new(draws)?.bounds(tail_mass, scale)
}

/// A sorted copy of a draw sequence supporting repeated ECDF and quantile queries.
#[derive(Debug, Clone)]
pub struct SortedDraws {
    sorted: Vec<f64>,
}

impl SortedDraws {
    pub fn new(draws: &[f64]) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::EmptyDraws);
        }
        if draws.iter().any(|d| d.is_nan()) {
            return Err(Error::InvalidInput { field: "draws", reason: "NaN draw".into() });
        }
        let mut sorted = draws.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.sorted
    }

    /// Number of draws `<= z`.
    pub fn count_le(&self, z: f64) -> usize {
        self.sorted.partition_point(|&d| d <= z)
    }

    pub fn ecdf(&self, z: f64) -> f64 {
        self.count_le(z) as f64 / self.sorted.len() as f64
    }

    /// Quantile by linear interpolation between order statistics at
    /// 0-based position `p * (len - 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let s = &self.sorted;
        let h = p * (s.len() - 1) as f64;
        let j = h.floor() as usize;
        if j + 1 >= s.len() {
            return s[s.len() - 1];
        }
        let frac = h - j as f64;
        if frac == 0.0 {
            s[j]
        } else {
            s[j] + frac * (s[j + 1] - s[j])
        }
    }

    pub fn bounds(&self, tail_mass: f64, scale: Scale) -> Result<CredibleBounds> {
        check_alpha(tail_mass)?;
        let required = required_draws(tail_mass);
        if self.len() < required {
            return Err(Error::InsufficientDraws { len: self.len(), tail_mass, required });
        }
        let lo = self.quantile(tail_mass);
        let hi = self.quantile(1.0 - tail_mass).max(lo);
        CredibleBounds::new(lo, hi, tail_mass, scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(mean: f64, sd: f64, size: usize) -> GroupSummary {
        GroupSummary::new(mean, sd, size).unwrap()
    }

    #[test]
    fn zero_scale_is_a_point_mass() {
        let d = sample_posterior(&group(5.0, 0.0, 4), &group(7.0, 1.0, 4), 2000, 1).unwrap();
        assert!(d.mu_x.iter().all(|&x| x == 5.0));
        assert!(d.degenerate_control);
        assert!(!d.degenerate_experiment);
    }

    #[test]
    fn diff_is_exact_and_replays() {
        let a = sample_posterior(&group(10.0, 2.0, 5), &group(12.0, 3.0, 7), 1000, 42).unwrap();
        let b = sample_posterior(&group(10.0, 2.0, 5), &group(12.0, 3.0, 7), 1000, 42).unwrap();
        assert_eq!(a, b);
        for i in 0..a.k {
            assert_eq!(a.diff[i], a.mu_y[i] - a.mu_x[i]);
        }
        let c = sample_posterior(&group(10.0, 2.0, 5), &group(12.0, 3.0, 7), 1000, 43).unwrap();
        assert_ne!(a.diff, c.diff);
    }

    #[test]
    fn rejects_too_few_draws() {
        assert!(sample_posterior(&group(1.0, 1.0, 3), &group(1.0, 1.0, 3), 999, 0).is_err());
    }

    #[test]
    fn withholds_relative_draws_near_zero_control() {
        let d = sample_posterior(&group(0.5, 3.0, 4), &group(1.0, 1.0, 4), 2000, 3).unwrap();
        assert!(d.nonpositive_fraction > NONPOSITIVE_TOLERANCE);
        assert!(matches!(d.rel_diff(), Err(Error::NonpositiveControl { .. })));

        let ok = sample_posterior(&group(100.0, 1.0, 10), &group(90.0, 1.0, 10), 2000, 3).unwrap();
        assert!(!ok.nonpositive_warning());
        let rel = ok.rel_diff().unwrap();
        for i in 0..ok.k {
            assert!((rel[i] * ok.mu_x[i] - ok.diff[i]).abs() <= 1e-12 * ok.diff[i].abs().max(1.0));
        }
    }

    #[test]
    fn lattice_generator_is_coprime() {
        for k in [1000, 1024, 2000, 10_000, 100_000, 1001] {
            let g = lattice_generator(k);
            assert_eq!(gcd(g, k), 1, "k={k}");
        }
    }

    #[test]
    fn ecdf_examples() {
        assert_eq!(ecdf(&[1.0, 2.0, 3.0, 4.0], 2.0).unwrap(), 0.5);
        assert_eq!(ecdf(&[1.0, 2.0], 0.0).unwrap(), 0.0);
        assert_eq!(ecdf(&[1.0, 2.0], 2.0).unwrap(), 1.0);
        assert_eq!(ecdf(&[], 0.0), Err(Error::EmptyDraws));
    }

    #[test]
    fn bounds_on_integer_ladder() {
        let draws: Vec<f64> = (1..=10_000).map(f64::from).collect();
        let b = credible_bounds(&draws, 0.05, Scale::Raw).unwrap();
        assert!((b.lo - 500.95).abs() < 1e-9);
        assert!((b.hi - 9500.05).abs() < 1e-9);
    }

    #[test]
    fn bounds_need_enough_draws() {
        let draws = vec![0.0; 39];
        assert!(matches!(
            credible_bounds(&draws, 0.05, Scale::Raw),
            Err(Error::InsufficientDraws { required: 40, .. })
        ));
        assert!(credible_bounds(&vec![3.0; 40], 0.05, Scale::Raw).is_ok());
    }
}
