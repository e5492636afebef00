//! Distribution functions, rearrangements and level-set geometry of
//! piecewise-linear fields, all computed exactly on the interpolant.

mod circle;
mod distribution;
mod level_set;
mod rearrangement;

pub use circle::{center_spread, circle_fit, fit_points, CircleFit};
pub use distribution::{distribution, DistributionProfile};
pub use level_set::{
    coarea_sides, exterior_reciprocal_integral, exterior_segments, isoperimetric_residual, level_set_geometry,
    plateau_measure, weighted_boundary_moment, BoundarySegment, Contour, LevelSetGeometry,
};
pub use rearrangement::{decreasing_rearrangement, schwartz_value, RearrangementProfile};
