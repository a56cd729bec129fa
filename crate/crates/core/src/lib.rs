//! Least difference in means.
//!
//! Bayesian effect-strength statistics for two independent groups: posterior
//! sampling of the group means, the least difference `delta_l` (the credible
//! bound nearest zero) and its relative form, practical-significance tests,
//! rival statistics, and simulation benchmarks of comparison error.

pub mod error;
pub mod hypothesis;
pub mod model;
pub mod posterior;
pub mod riskbench;
pub mod statistics;
pub mod stream;
pub mod tdist;

pub use error::{Error, Result};
pub use hypothesis::{consensus, test_practical_significance, Significance};
pub use model::*;
pub use posterior::{
    credible_bounds, ecdf, sample_posterior, sample_study, PosteriorDraws, SortedDraws, DEFAULT_DRAWS,
    MIN_DRAWS, NONPOSITIVE_TOLERANCE,
};
pub use statistics::{
    bayes_factor, candidate_suite, cohens_d, decide_stronger, effect_strength, least_difference,
    least_difference_scan, most_difference, sgpv, tost_p, welch_p, welch_test, WelchTest,
};
