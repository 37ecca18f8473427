//! Interval-set measure algebra, critical radii, the greedy disjoint
//! covering with 5-fold dilations, and the weighted covering bound.

mod cover;
mod hypothesis;
mod interval_set;
mod weights;

pub use cover::{
    critical_radius, density, select_cover, CoverSelection, Cylinder, DILATION, MAX_LEVEL, RADIUS_FLOOR, VITALI_TOL,
};
pub use hypothesis::{hypothesis_check, HypothesisOutcome, MIN_SCAN};
pub use interval_set::{random_interval_set, IntervalSet};
pub use weights::{
    calibrate_delta, comparison_samples, doubling_check, evaluate_lemma, ink_spots_bound, measure_comparison_check,
    ComparisonOutcome, DoublingOutcome, InkConstants, LemmaReport, AP_COARSE, AP_RESOLUTION, AP_DIVERGENCE, DELTA_SAFETY,
};
