//! Effect-strength statistics and the rival candidate statistics they are
//! benchmarked against.

use crate::error::{Error, Result};
use crate::model::{
    Candidate, CandidateStatistics, CredibleBounds, EffectStrengthResult, GroupSummary, NullRegion,
    Regime, Scale, StudyRecord,
};
use crate::posterior::{PosteriorDraws, SortedDraws};
use crate::tdist::{t_cdf, t_sf};

/// Sign with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Least difference: the bound nearest zero, signed by `sign_ref`, or zero
/// when the bounds straddle or touch zero.
pub fn least_difference(bounds: &CredibleBounds, sign_ref: f64) -> f64 {
    let same_sign = sign(bounds.lo) == sign(bounds.hi) && bounds.lo != 0.0;
    if !same_sign {
        return 0.0;
    }
    sign(sign_ref) * bounds.lo.abs().min(bounds.hi.abs())
}

/// Brute-force least difference: the grid point of smallest magnitude on a
/// uniform grid of `grid + 1` points spanning the bounds.
pub fn least_difference_scan(bounds: &CredibleBounds, grid: usize) -> f64 {
    let grid = grid.max(1);
    let step = bounds.width() / grid as f64;
    let mut best = bounds.lo;
    for j in 0..=grid {
        let z = if j == grid { bounds.hi } else { bounds.lo + step * j as f64 };
        if z.abs() < best.abs() {
            best = z;
        }
    }
    best
}

/// Most difference: the smallest radius `c` whose symmetric interval
/// `[-c, c]` holds at least `1 - alpha_dm` of the draws, signed by `sign_ref`.
pub fn most_difference(draws: &[f64], alpha_dm: f64, sign_ref: f64) -> Result<f64> {
    crate::model::check_alpha(alpha_dm)?;
    let sorted = SortedDraws::new(draws)?;
    Ok(sign(sign_ref) * coverage_radius(&sorted, alpha_dm))
}

/// Radius found by bisection on the symmetric coverage, then snapped to the
/// order statistic of `|draw|` it converged to.
pub(crate) fn coverage_radius(sorted: &SortedDraws, alpha_dm: f64) -> f64 {
    let s = sorted.as_slice();
    let k = s.len() as f64;
    let inside = |c: f64| {
        // #{|d| <= c}
        let upper = s.partition_point(|&d| d <= c);
        let lower = s.partition_point(|&d| d < -c);
        (upper - lower) as f64
    };
    let target = 1.0 - alpha_dm;
    let max_abs = s[0].abs().max(s[s.len() - 1].abs());
    if inside(0.0) / k >= target {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, max_abs);
    let tol = 1e-12 * max_abs;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) / k >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Largest |d| not exceeding hi.
    let mut snapped: f64 = 0.0;
    let above = s.partition_point(|&d| d <= hi);
    if above > 0 && s[above - 1] >= -hi {
        snapped = snapped.max(s[above - 1].abs());
    }
    let below = s.partition_point(|&d| d < -hi);
    if below < s.len() && s[below] <= hi {
        snapped = snapped.max(s[below].abs());
    }
    snapped
}

/// Least and most difference of a study on both scales.
pub fn effect_strength(study: &StudyRecord, draws: &PosteriorDraws) -> Result<EffectStrengthResult> {
    let alpha = study.alpha_dm;
    let sign_ref_raw = study.experiment.mean - study.control.mean;
    let sign_ref_rel = sign_ref_raw / study.control.mean;

    let raw = SortedDraws::new(&draws.diff)?;
    let bounds_raw = raw.bounds(alpha, Scale::Raw)?;
    let delta_l = least_difference(&bounds_raw, sign_ref_raw);
    let delta_m = sign(sign_ref_raw) * coverage_radius(&raw, alpha);

    let (bounds_rel, r_delta_l, r_delta_m) = match relative_draws(study, draws) {
        Some(rel) => {
            let rel = SortedDraws::new(rel)?;
            let b = rel.bounds(alpha, Scale::Relative)?;
            (
                Some(b),
                Some(least_difference(&b, sign_ref_rel)),
                Some(sign(sign_ref_rel) * coverage_radius(&rel, alpha)),
            )
        }
        None => (None, None, None),
    };

    Ok(EffectStrengthResult {
        delta_l,
        r_delta_l,
        delta_m,
        r_delta_m,
        bounds_raw,
        bounds_rel,
        sign_ref_raw,
        sign_ref_rel,
    })
}

/// Relative draws when the study supports a relative analysis.
fn relative_draws<'a>(study: &StudyRecord, draws: &'a PosteriorDraws) -> Option<&'a [f64]> {
    if study.control.mean > 0.0 {
        draws.rel_diff().ok()
    } else {
        None
    }
}

/// Welch two-sample t test of the experiment mean against the control mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
    /// Both groups had zero spread; the p-value is set by convention.
    pub zero_variance: bool,
}

fn welch_df(control: &GroupSummary, experiment: &GroupSummary) -> f64 {
    let vx = control.sd * control.sd / control.size as f64;
    let vy = experiment.sd * experiment.sd / experiment.size as f64;
    let num = (vx + vy) * (vx + vy);
    let den = vx * vx / control.df() as f64 + vy * vy / experiment.df() as f64;
    num / den
}

/// Standard error of the difference in means, `sqrt(s_x^2/m + s_y^2/n)`.
pub fn standard_error(control: &GroupSummary, experiment: &GroupSummary) -> f64 {
    (control.sd * control.sd / control.size as f64
        + experiment.sd * experiment.sd / experiment.size as f64)
        .sqrt()
}

pub fn welch_test(control: &GroupSummary, experiment: &GroupSummary) -> WelchTest {
    let diff = experiment.mean - control.mean;
    let se = standard_error(control, experiment);
    if se == 0.0 {
        let p = if diff == 0.0 { 1.0 } else { 0.0 };
        let t = if diff == 0.0 { 0.0 } else { sign(diff) * f64::INFINITY };
        return WelchTest { t, df: f64::NAN, p, zero_variance: true };
    }
    let t = diff / se;
    let df = welch_df(control, experiment);
    let p = (2.0 * t_sf(t.abs(), df)).min(1.0);
    WelchTest { t, df, p, zero_variance: false }
}

/// Two-sided Welch p-value.
pub fn welch_p(control: &GroupSummary, experiment: &GroupSummary) -> f64 {
    welch_test(control, experiment).p
}

/// Two one-sided tests of equivalence within raw margins; the larger of the
/// two one-sided p-values.
pub fn tost_p(control: &GroupSummary, experiment: &GroupSummary, margins: &NullRegion) -> Result<f64> {
    expect_scale(margins.scale, Scale::Raw)?;
    let diff = experiment.mean - control.mean;
    let se = standard_error(control, experiment);
    if se == 0.0 {
        // Point mass at diff: each one-sided test rejects exactly when diff is strictly inside.
        let one_sided = |z: f64| -> f64 { if z > 0.0 { 0.0 } else if z == 0.0 { 0.5 } else { 1.0 } };
        return Ok(one_sided(diff - margins.neg_threshold).max(one_sided(margins.pos_threshold - diff)));
    }
    let df = welch_df(control, experiment);
    let p_lower = t_sf((diff - margins.neg_threshold) / se, df);
    let p_upper = t_cdf((diff - margins.pos_threshold) / se, df);
    Ok(p_lower.max(p_upper))
}

/// Second-generation p-value of an interval against a null region.
pub fn sgpv(interval: &CredibleBounds, region: &NullRegion) -> Result<f64> {
    expect_scale(region.scale, interval.scale)?;
    let width = interval.width();
    if width == 0.0 {
        return Ok(if region.contains(interval.lo) { 1.0 } else { 0.0 });
    }
    let overlap = (interval.hi.min(region.pos_threshold) - interval.lo.max(region.neg_threshold)).max(0.0);
    let p = overlap / width * (width / (2.0 * region.width())).max(1.0);
    Ok(p.clamp(0.0, 1.0))
}

/// Posterior odds of lying outside versus inside the null region, with one
/// pseudo-count added to each side.
pub fn bayes_factor(draws: &PosteriorDraws, region: &NullRegion) -> Result<f64> {
    let values = draws.on_scale(region.scale)?;
    let inside = values.iter().filter(|&&d| region.contains(d)).count();
    Ok(smoothed_odds(values.len() - inside, inside))
}

fn smoothed_odds(outside: usize, inside: usize) -> f64 {
    (outside as f64 + 1.0) / (inside as f64 + 1.0)
}

fn bayes_factor_sorted(sorted: &SortedDraws, region: &NullRegion) -> f64 {
    let s = sorted.as_slice();
    let inside = s.partition_point(|&d| d <= region.pos_threshold)
        - s.partition_point(|&d| d < region.neg_threshold);
    smoothed_odds(s.len() - inside, inside)
}

/// Cohen's d with the pooled standard deviation.
pub fn cohens_d(control: &GroupSummary, experiment: &GroupSummary) -> Result<f64> {
    let (m, n) = (control.size as f64, experiment.size as f64);
    let pooled = ((m - 1.0) * control.sd * control.sd + (n - 1.0) * experiment.sd * experiment.sd)
        / (m + n - 2.0);
    if !(pooled > 0.0) {
        return Err(Error::ZeroPooledVariance);
    }
    Ok((experiment.mean - control.mean) / pooled.sqrt())
}

fn expect_scale(actual: Scale, expected: Scale) -> Result<()> {
    if actual == expected {
        Ok(())
    } else {
        Err(Error::ScaleMismatch { expected, actual })
    }
}

/// Every candidate statistic for one study.
///
/// `region` fixes the scale of the interval-based statistics: a relative
/// region compares `p_sg` and `bf` on the relative draws and converts to raw
/// units (via the control sample mean) for `p_e`. `rnd` is the uniform draw
/// of the random-guess candidate.
pub fn candidate_suite(
    study: &StudyRecord,
    region: &NullRegion,
    draws: &PosteriorDraws,
    rnd: f64,
) -> Result<CandidateStatistics> {
    let (c, e) = (&study.control, &study.experiment);
    let xbar_dm = e.mean - c.mean;
    let s_dm = standard_error(c, e);
    let relative_ok = c.mean > 0.0;
    let r_xbar_dm = relative_ok.then(|| xbar_dm / c.mean);
    let rs_dm = relative_ok.then(|| s_dm / c.mean);

    let raw = SortedDraws::new(&draws.diff)?;
    let bounds_raw = raw.bounds(study.alpha_dm, Scale::Raw)?;
    let delta_l = least_difference(&bounds_raw, xbar_dm);
    let delta_m = sign(xbar_dm) * coverage_radius(&raw, study.alpha_dm);

    let rel = match relative_draws(study, draws) {
        Some(values) => Some(SortedDraws::new(values)?),
        None => None,
    };
    let bounds_rel = match &rel {
        Some(r) => Some(r.bounds(study.alpha_dm, Scale::Relative)?),
        None => None,
    };
    let r_delta_l = bounds_rel.as_ref().zip(r_xbar_dm).map(|(b, s)| least_difference(b, s));
    let r_delta_m = rel
        .as_ref()
        .zip(r_xbar_dm)
        .map(|(r, s)| sign(s) * coverage_radius(r, study.alpha_dm));

    let (p_e, p_sg, bf) = match region.scale {
        Scale::Raw => (
            Some(tost_p(c, e, region)?),
            Some(sgpv(&bounds_raw, region)?),
            Some(bayes_factor_sorted(&raw, region)),
        ),
        Scale::Relative => {
            let p_e = match region.to_raw(c.mean) {
                Ok(raw_region) => Some(tost_p(c, e, &raw_region)?),
                Err(_) => None,
            };
            let p_sg = match &bounds_rel {
                Some(b) => Some(sgpv(b, region)?),
                None => None,
            };
            let bf = rel.as_ref().map(|r| bayes_factor_sorted(r, region));
            (p_e, p_sg, bf)
        }
    };

    Ok(CandidateStatistics {
        xbar_dm,
        r_xbar_dm,
        s_dm,
        rs_dm,
        bf,
        p_n: welch_p(c, e),
        p_e,
        p_sg,
        cohen_d: cohens_d(c, e).ok(),
        delta_m,
        r_delta_m,
        delta_l,
        r_delta_l,
        rnd,
        bounds_raw,
        bounds_rel,
    })
}

/// Whether `candidate` predicts that experiment 1 has the higher effect
/// strength. Both experiments must lie in `regime`'s sign.
pub fn decide_stronger(
    stats1: &CandidateStatistics,
    stats2: &CandidateStatistics,
    candidate: Candidate,
    regime: Regime,
) -> Result<bool> {
    if sign(stats1.xbar_dm) != regime.sign() || sign(stats2.xbar_dm) != regime.sign() {
        return Err(Error::MixedSignRegime);
    }
    let v1 = candidate.value(stats1).ok_or(Error::StatisticUnavailable(candidate.name()))?;
    let v2 = candidate.value(stats2).ok_or(Error::StatisticUnavailable(candidate.name()))?;
    Ok(match candidate {
        Candidate::XbarDm
        | Candidate::RXbarDm
        | Candidate::Cd
        | Candidate::DeltaM
        | Candidate::RDeltaM
        | Candidate::DeltaL
        | Candidate::RDeltaL => v1.abs() > v2.abs(),
        Candidate::SDm => v1 < v2,
        Candidate::RsDm => v1.abs() < v2.abs(),
        Candidate::PN => v1 < v2,
        Candidate::PE => v1 > v2,
        Candidate::PSg => v1 < v2,
        Candidate::Bf => v1 > v2,
        Candidate::Rnd => v1 < v2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bounds(lo: f64, hi: f64) -> CredibleBounds {
        CredibleBounds::new(lo, hi, 0.05, Scale::Raw).unwrap()
    }

    fn group(mean: f64, sd: f64, size: usize) -> GroupSummary {
        GroupSummary::new(mean, sd, size).unwrap()
    }

    #[test]
    fn least_difference_examples() {
        assert_eq!(least_difference(&bounds(2.0, 10.0), 1.0), 2.0);
        assert_eq!(least_difference(&bounds(-3.0, 4.0), 1.0), 0.0);
        assert_eq!(least_difference(&bounds(-3.0, 4.0), -1.0), 0.0);
        assert_eq!(least_difference(&bounds(-9.0, -4.0), -1.0), -4.0);
        assert_eq!(least_difference(&bounds(0.0, 4.0), 1.0), 0.0);
        assert_eq!(least_difference(&bounds(-4.0, 0.0), -1.0), 0.0);
        assert_eq!(least_difference(&bounds(2.0, 3.0), 0.0), 0.0);
    }

    #[test]
    fn scan_examples() {
        assert_eq!(least_difference_scan(&bounds(2.0, 10.0), 1000), 2.0);
        assert!(least_difference_scan(&bounds(-3.0, 4.0), 1000).abs() <= 7.0 / 1000.0);
        assert_eq!(least_difference_scan(&bounds(-9.0, -4.0), 1000), -4.0);
    }

    #[test]
    fn most_difference_point_mass() {
        assert_eq!(most_difference(&[5.0; 100], 0.05, 1.0).unwrap(), 5.0);
        assert_eq!(most_difference(&[5.0; 100], 0.2, -1.0).unwrap(), -5.0);
        assert_eq!(most_difference(&[-5.0; 100], 0.05, -1.0).unwrap(), -5.0);
        assert_eq!(most_difference(&[], 0.05, 1.0), Err(Error::EmptyDraws));
    }

    #[test]
    fn most_difference_is_order_statistic_of_magnitudes() {
        let draws: Vec<f64> = (0..997).map(|i| ((i * 7919) % 997) as f64 / 50.0 - 6.0).collect();
        for alpha in [0.01, 0.05, 0.2, 0.45] {
            let mut mags: Vec<f64> = draws.iter().map(|d| d.abs()).collect();
            mags.sort_by(f64::total_cmp);
            let k = draws.len();
            let j = (1..=k).find(|&j| j as f64 / k as f64 >= 1.0 - alpha).unwrap();
            assert_eq!(most_difference(&draws, alpha, 1.0).unwrap(), mags[j - 1]);
        }
    }

    #[test]
    fn welch_reference_case() {
        // t = 1/sqrt(0.2) = 2.2360680, df = 18 exactly; p from an independent reference.
        let w = welch_test(&group(0.0, 1.0, 10), &group(1.0, 1.0, 10));
        assert_abs_diff_eq!(w.t, 5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(w.df, 18.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.p, 0.0382496145, epsilon = 1e-9);
    }

    #[test]
    fn welch_degenerate_cases() {
        assert_eq!(welch_p(&group(3.0, 0.0, 4), &group(3.0, 0.0, 5)), 1.0);
        let w = welch_test(&group(3.0, 0.0, 4), &group(4.0, 0.0, 5));
        assert_eq!(w.p, 0.0);
        assert!(w.zero_variance);
        assert_eq!(welch_p(&group(1.0, 2.0, 6), &group(1.0, 3.0, 9)), 1.0);
        // one zero sd: df collapses to the other group's df
        assert_abs_diff_eq!(welch_test(&group(0.0, 0.0, 4), &group(1.0, 2.0, 9)).df, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn cohens_d_examples() {
        assert_abs_diff_eq!(cohens_d(&group(0.0, 1.0, 10), &group(1.0, 1.0, 10)).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            cohens_d(&group(2.0, 1.0, 3), &group(5.0, 2.0, 5)).unwrap(),
            3.0 / 3f64.sqrt(),
            epsilon = 1e-12
        );
        assert_eq!(cohens_d(&group(2.0, 0.0, 3), &group(5.0, 0.0, 5)), Err(Error::ZeroPooledVariance));
    }

    #[test]
    fn sgpv_examples() {
        let h0 = NullRegion::new(-10.0, 1.0, Scale::Raw).unwrap();
        assert_abs_diff_eq!(sgpv(&bounds(0.0, 2.0), &h0).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(sgpv(&bounds(-3.0, 0.5), &h0).unwrap(), 1.0);
        assert_eq!(sgpv(&bounds(2.0, 5.0), &h0).unwrap(), 0.0);
        assert_eq!(sgpv(&bounds(0.5, 0.5), &h0).unwrap(), 1.0);
        assert_eq!(sgpv(&bounds(3.0, 3.0), &h0).unwrap(), 0.0);
        let rel = NullRegion::new(-0.2, 0.2, Scale::Relative).unwrap();
        assert!(matches!(sgpv(&bounds(0.0, 1.0), &rel), Err(Error::ScaleMismatch { .. })));
    }

    #[test]
    fn tost_examples() {
        let margins = NullRegion::symmetric(10.0, Scale::Raw).unwrap();
        let at_margin = tost_p(&group(0.0, 1e-6, 10), &group(10.0, 1e-6, 10), &margins).unwrap();
        assert_abs_diff_eq!(at_margin, 0.5, epsilon = 1e-9);
        let deep = tost_p(&group(0.0, 1e-3, 10), &group(0.0, 1e-3, 10), &margins).unwrap();
        assert!(deep < 1e-12);
        let up = tost_p(&group(0.0, 2.0, 8), &group(3.0, 1.5, 7), &margins).unwrap();
        let down = tost_p(&group(0.0, 2.0, 8), &group(-3.0, 1.5, 7), &margins).unwrap();
        assert_abs_diff_eq!(up, down, epsilon = 1e-14);
    }

    #[test]
    fn decisions_follow_magnitude_within_regime() {
        let study = StudyRecord::bare(group(10.0, 1.0, 8), group(15.0, 1.0, 8), 0.05).unwrap();
        let draws = crate::posterior::sample_study(&study, 2000, 1).unwrap();
        let region = NullRegion::symmetric(1.0, Scale::Raw).unwrap();
        let mut a = candidate_suite(&study, &region, &draws, 0.3).unwrap();
        let mut b = a.clone();
        a.delta_l = 5.0;
        b.delta_l = 2.0;
        assert!(decide_stronger(&a, &b, Candidate::DeltaL, Regime::Positive).unwrap());
        assert!(decide_stronger(&a, &b, Candidate::Rnd, Regime::Positive).is_ok());
        a.xbar_dm = -1.0;
        b.xbar_dm = -2.0;
        a.delta_l = -5.0;
        b.delta_l = -2.0;
        assert!(decide_stronger(&a, &b, Candidate::DeltaL, Regime::Negative).unwrap());
        assert_eq!(
            decide_stronger(&a, &b, Candidate::DeltaL, Regime::Positive),
            Err(Error::MixedSignRegime)
        );
    }
}
