//! Railway toolkit: order-frequency tracks from vehicle speed, wheel
//! out-of-roundness profiles from extracted envelopes, and the stiffness and
//! unsprung-mass regressions.

pub mod geometry;
pub mod profile;
pub mod regression;
pub mod spatial;

pub use geometry::{
    sleeper_track, wheel_order_track, SpeedProfile, TrackGeometry, WheelGeometry,
    DEFAULT_SLEEPER_SPACING, DEFAULT_WHEEL_DIAMETER,
};
pub use profile::{
    reconstruct_wheel_profile, reconstruct_wheel_profile_window, WheelProfile,
    DEFAULT_PROFILE_BINS,
};
pub use regression::{fit_log_linear, fit_proportional, FitMode, RegressionFit};
pub use spatial::{spatial_bin_magnitudes, SpatialBins, DEFAULT_SPATIAL_INTERVAL};
