//! Gaussian wave packets built from the stationary states, and the
//! transmission and reflection packets they split into.

mod engine;
mod spectrum;
mod trajectory;

pub use engine::{evolve, PacketConfig, PacketEngine, PacketState, Snapshot, NORM_DRIFT_TOL};
pub use spectrum::{
    asymptotic_group_times_packet, build_spectrum, GaussianSpectrum, SpectralTimes, DEFAULT_MIN_L0_KBAR,
    K_EPSILON,
};
pub use trajectory::{
    acceleration, cm_track, fit_asymptotic_times, local_group_times, norm_trace, Acceleration, CmTrajectory,
    FittedTimes, NormTrace, TimeGrid, TrackEvents,
};
