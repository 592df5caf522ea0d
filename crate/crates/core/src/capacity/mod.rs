//! Riesz capacity estimates, Hausdorff content bounds and Wiener-type series.

mod discretize;
mod estimate;
pub mod lp;
mod wiener;

pub use discretize::{cell_kernel, CellGrid, DiscretizedCompact, LatticeSpec};
pub use estimate::{
    ball_capacity, calibrate_lebesgue_constant, capacity_lp, capacity_lp_with,
    hausdorff_content_upper, lebesgue_lower_bound, richardson_extrapolate, CapacityEstimate,
    LpDiagnostics,
};
pub use wiener::{
    classify_trend, s_thin_verdict, wiener_partial_sums, ThinnessVerdict, TrendParams, TrendVerdict, WienerEntry,
    WienerParams, WienerSeriesReport,
};
