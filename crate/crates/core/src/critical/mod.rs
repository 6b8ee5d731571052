//! Gradients, special and pseudocritical points, and the localization of
//! discontinuities of reduced size functions.

mod discontinuity;
mod gradient;
mod hull;
mod localization;
mod pseudocritical;

pub use discontinuity::{
    cloud_from_series, discontinuity_cloud, discontinuity_cloud_with, hausdorff, hausdorff_dd, lattice_values,
    DdGrid, DiscontinuityCloud, Grid,
};
pub use gradient::{special_points, triangle_gradients, GradientField, MeshGeometry};
pub use hull::{convex_hull_contains_zero, min_norm_point, HullTest};
pub use localization::{check_discontinuity_localization, Axis, CoordinateCheck, LocalizationReport, PairLocalization};
pub use pseudocritical::{
    lb_pseudocritical, lb_pseudocritical_with, pseudocritical_projection, pseudocritical_projection_with,
    ProjectionIndex, PseudocriticalReport, PseudocriticalWitness, Tolerances, WitnessValue, MAX_PROJECTION_ARITY,
};
