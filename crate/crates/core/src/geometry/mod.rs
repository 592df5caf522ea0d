//! Points, balls, dyadic annuli, swiss-cheese domains and area-density profiles.

mod annulus;
mod ball;
mod cheese;
mod density;
mod point;

pub use annulus::{annulus_index, dyadic, shell_index_of_radius, Annulus};
pub use ball::Ball;
pub use cheese::{
    disk_intersection_area, AnnulusRecord, BudgetRule, CheeseDocument, CheeseParams, Membership,
    Square, SwissCheese, CHEESE_FORMAT, CHEESE_VERSION,
};
pub use density::{
    area_density_profile, partial_area_density_profile, DensityEntry, DyadicDensityProfile, Sampler,
};
pub use point::{unit_ball_volume, Point, Point2};
