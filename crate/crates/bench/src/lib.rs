//! Benchmark fixtures shared by the criterion benches.

use leastdiff::{GroupSummary, StudyRecord};

/// A typical two-group study: ten observations per group, a 25% reduction.
pub fn typical_study() -> StudyRecord {
    StudyRecord::bare(
        GroupSummary::new(100.0, 15.0, 10).expect("valid group"),
        GroupSummary::new(75.0, 12.0, 10).expect("valid group"),
        0.025,
    )
    .expect("valid study")
}
