//! Student-t helpers.
//!
//! Posterior sampling needs millions of t quantiles, so integer degrees of
//! freedom use the closed-form finite series for the CDF and a safeguarded
//! Newton solve. Tail probabilities for tests (fractional Welch degrees of
//! freedom) go through `statrs`.

use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::ln_gamma;

/// Above this many degrees of freedom the series gets long; defer to `statrs`.
const SERIES_MAX_DF: usize = 300;

/// Standard Student-t with integer degrees of freedom.
#[derive(Debug, Clone, Copy)]
pub struct IntegerT {
    df: usize,
    nu: f64,
    log_norm: f64,
}

impl IntegerT {
    pub fn new(df: usize) -> Self {
        assert!(df >= 1, "t distribution needs df >= 1");
        let nu = df as f64;
        let log_norm = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * PI).ln();
        Self { df, nu, log_norm }
    }

    pub fn df(&self) -> usize {
        self.df
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let c2 = self.nu / (self.nu + t * t);
        // (1 + t^2/nu)^(-(nu+1)/2) = c^(nu+1)
        (self.log_norm + 0.5 * (self.nu + 1.0) * c2.ln()).exp()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t.is_infinite() {
            return if t > 0.0 { 1.0 } else { 0.0 };
        }
        if self.df > SERIES_MAX_DF {
            return StudentsT::new(0.0, 1.0, self.nu).unwrap().cdf(t);
        }
        let r = (self.nu + t * t).sqrt();
        let c = self.nu.sqrt() / r;
        let s = t / r;
        let c2 = c * c;
        let a = if self.df % 2 == 1 {
            let theta = t.atan2(self.nu.sqrt());
            let mut sum = 0.0;
            if self.df > 1 {
                // c + (2/3) c^3 + (2*4)/(3*5) c^5 + ... up to c^(df-2)
                let mut term = c;
                sum = term;
                let mut k = 1.0;
                let mut power = 3;
                while power <= self.df - 2 {
                    term *= c2 * (2.0 * k) / (2.0 * k + 1.0);
                    sum += term;
                    k += 1.0;
                    power += 2;
                }
            }
            2.0 / PI * (theta + s * sum)
        } else {
            // 1 + (1/2) c^2 + (1*3)/(2*4) c^4 + ... up to c^(df-2)
            let mut term = 1.0;
            let mut sum = 1.0;
            let mut k = 1.0;
            let mut power = 2;
            while power <= self.df - 2 {
                term *= c2 * (2.0 * k - 1.0) / (2.0 * k);
                sum += term;
                k += 1.0;
                power += 2;
            }
            s * sum
        };
        (0.5 + 0.5 * a).clamp(0.0, 1.0)
    }

    /// Quantile at `p` in (0, 1), refined from `guess`.
    pub fn quantile_from(&self, p: f64, guess: f64) -> f64 {
        debug_assert!(p > 0.0 && p < 1.0);
        match self.df {
            1 => return (PI * (p - 0.5)).tan(),
            2 => return (2.0 * p - 1.0) / (2.0 * p * (1.0 - p)).sqrt(),
            _ => {}
        }
        if self.df > SERIES_MAX_DF {
            return StudentsT::new(0.0, 1.0, self.nu).unwrap().inverse_cdf(p);
        }
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut q = if guess.is_finite() { guess } else { 0.0 };
        for _ in 0..200 {
            let resid = self.cdf(q) - p;
            if resid == 0.0 {
                return q;
            }
            if resid < 0.0 {
                lo = q;
            } else {
                hi = q;
            }
            let density = self.pdf(q);
            let mut next = q - resid / density;
            let newton = next > lo && next < hi && next.is_finite();
            if !newton {
                next = match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => 0.5 * (lo + hi),
                    (true, false) => lo + 2.0 * lo.abs().max(1.0),
                    (false, true) => hi - 2.0 * hi.abs().max(1.0),
                    (false, false) => 0.0,
                };
            }
            // Newton converges quadratically, so a step this small leaves an
            // error far below double precision.
            if newton && (next - q).abs() <= 1e-9 * q.abs().max(1.0) {
                return next;
            }
            q = next;
        }
        q
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.quantile_from(p, 0.0)
    }

    /// Quantiles at the shifted regular grid `(j + shift) / k`, `j = 0..k`,
    /// in increasing order. `shift` must lie in (0, 1).
    pub fn grid_quantiles(&self, k: usize, shift: f64) -> Vec<f64> {
        debug_assert!(shift > 0.0 && shift < 1.0);
        let kf = k as f64;
        let p = |j: usize| (j as f64 + shift) / kf;
        let mut out = vec![0.0; k];
        let mid = ((0.5 * kf - shift).round().max(0.0) as usize).min(k - 1);
        out[mid] = self.quantile_from(p(mid), 0.0);
        // Sweep outward, predicting each point from its neighbour.
        for j in mid + 1..k {
            out[j] = self.quantile_from(p(j), self.predict(out[j - 1], 1.0 / kf));
        }
        for j in (0..mid).rev() {
            out[j] = self.quantile_from(p(j), self.predict(out[j + 1], -1.0 / kf));
        }
        out
    }

    /// Second-order Taylor step of the quantile function from `q` by `dp`.
    fn predict(&self, q: f64, dp: f64) -> f64 {
        let f = self.pdf(q);
        let curvature = (self.nu + 1.0) * q / (self.nu + q * q) / (f * f);
        q + dp / f + 0.5 * dp * dp * curvature
    }
}

/// Upper-tail probability `P(T > t)` for real-valued degrees of freedom.
pub fn t_sf(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 0.0;
    }
    if t == f64::NEG_INFINITY {
        return 1.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df must be positive");
    // Use the lower tail of -t for accuracy when t is large.
    dist.cdf(-t)
}

/// Lower-tail probability `P(T <= t)` for real-valued degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> f64 {
    t_sf(-t, df)
}

/// Critical value `t` with `P(T > t) = upper_tail`.
pub fn t_upper_quantile(upper_tail: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("df must be positive");
    -dist.inverse_cdf(upper_tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cdf_matches_statrs() {
        for df in [1usize, 2, 3, 4, 5, 7, 10, 19, 40, 99, 301] {
            let reference = StudentsT::new(0.0, 1.0, df as f64).unwrap();
            let t = IntegerT::new(df);
            for x in [-50.0, -8.0, -3.0, -1.0, -0.1, 0.0, 0.3, 1.7, 4.0, 12.0] {
                assert_abs_diff_eq!(t.cdf(x), reference.cdf(x), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn pdf_matches_statrs() {
        use statrs::distribution::Continuous;
        for df in [1usize, 3, 8, 50] {
            let reference = StudentsT::new(0.0, 1.0, df as f64).unwrap();
            let t = IntegerT::new(df);
            for x in [-6.0, -1.0, 0.0, 0.5, 3.0] {
                assert_abs_diff_eq!(t.pdf(x), reference.pdf(x), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for df in [1usize, 2, 3, 4, 6, 9, 15, 39, 120, 400] {
            let t = IntegerT::new(df);
            for p in [1e-7, 1e-5, 0.001, 0.025, 0.3, 0.5, 0.77, 0.975, 0.9999, 1.0 - 1e-6] {
                let q = t.quantile(p);
                let back = t.cdf(q);
                assert!((back - p).abs() <= 1e-12 + 1e-9 * p, "df={df} p={p} q={q} back={back}");
            }
        }
    }

    #[test]
    fn grid_matches_pointwise_quantiles() {
        for df in [3usize, 7, 19] {
            let t = IntegerT::new(df);
            let grid = t.grid_quantiles(1000, 0.37);
            assert!(grid.windows(2).all(|w| w[0] < w[1]));
            for (j, &q) in grid.iter().enumerate() {
                let p = (j as f64 + 0.37) / 1000.0;
                assert_abs_diff_eq!(q, t.quantile(p), epsilon = 1e-10 * q.abs().max(1.0));
            }
        }
    }

    #[test]
    fn upper_quantile_is_critical_value() {
        // t_{0.025, 10} = 2.228138851986274
        assert_abs_diff_eq!(t_upper_quantile(0.025, 10.0), 2.228138851986274, epsilon = 1e-9);
        assert_abs_diff_eq!(t_sf(2.228138851986274, 10.0), 0.025, epsilon = 1e-12);
    }
}
