//! The closed-form radial reference and the comparison checks between a
//! solved field and it.

mod analysis;
mod checks;
mod radial;
mod report;
mod rigidity;

pub use analysis::{analyze, analyze_field, Analysis, AnalysisSettings};
pub use checks::{
    boundary_moment_check, distribution_comparison, flux_check, full_measure_check, lemma_check, lemma_grid,
    lemma_residuals, minima_comparison, norm_comparison, pointwise_comparison, Tolerances,
};
pub use radial::RadialReference;
pub use report::{CheckRecord, ComparisonReport, ReportMeta};
pub use rigidity::{rigidity_probe, RigidityRow, RigidityTable, FIT_LEVELS};
