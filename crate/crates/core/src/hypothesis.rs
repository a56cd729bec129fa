//! Practical-significance tests against signed thresholds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NullRegion;

/// Outcome of testing a least difference against a null region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Significance {
    PracticallySignificant,
    NotPracticallySignificant,
    /// The credible interval touches zero; the result takes no part in testing.
    NoPosteriorSignificance,
}

impl Significance {
    pub fn name(self) -> &'static str {
        match self {
            Significance::PracticallySignificant => "practically_significant",
            Significance::NotPracticallySignificant => "not_practically_significant",
            Significance::NoPosteriorSignificance => "no_posterior_significance",
        }
    }
}

/// Tests `delta_l` against the region's thresholds. Ties with a threshold are
/// not significant.
pub fn test_practical_significance(delta_l: f64, region: &NullRegion) -> Significance {
    if delta_l == 0.0 {
        Significance::NoPosteriorSignificance
    } else if (delta_l > 0.0 && delta_l > region.pos_threshold)
        || (delta_l < 0.0 && delta_l < region.neg_threshold)
    {
        Significance::PracticallySignificant
    } else {
        Significance::NotPracticallySignificant
    }
}

/// Consensus across several threshold sets: every one must find the result
/// practically significant.
pub fn consensus(designations: &[Significance]) -> Result<bool> {
    if designations.is_empty() {
        return Err(Error::InvalidInput {
            field: "designations",
            reason: "empty input".into(),
        });
    }
    Ok(designations.iter().all(|d| *d == Significance::PracticallySignificant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scale;
    use Significance::*;

    fn region(neg: f64, pos: f64) -> NullRegion {
        NullRegion::new(neg, pos, Scale::Raw).unwrap()
    }

    #[test]
    fn designations() {
        assert_eq!(test_practical_significance(0.0, &region(-1.0, 1.0)), NoPosteriorSignificance);
        assert_eq!(test_practical_significance(5.0, &region(-3.0, 3.0)), PracticallySignificant);
        assert_eq!(test_practical_significance(-2.0, &region(-4.0, 4.0)), NotPracticallySignificant);
        assert_eq!(test_practical_significance(-5.0, &region(-4.0, 4.0)), PracticallySignificant);
        assert_eq!(test_practical_significance(3.0, &region(-3.0, 3.0)), NotPracticallySignificant);
        assert_eq!(test_practical_significance(-3.0, &region(-3.0, 3.0)), NotPracticallySignificant);
    }

    #[test]
    fn consensus_rules() {
        assert!(consensus(&[PracticallySignificant, PracticallySignificant]).unwrap());
        assert!(!consensus(&[PracticallySignificant, NotPracticallySignificant]).unwrap());
        assert!(!consensus(&[NoPosteriorSignificance, PracticallySignificant]).unwrap());
        assert!(consensus(&[]).is_err());
    }
}
