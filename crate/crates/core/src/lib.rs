//! Stationary scattering, subprocess wave functions, wave packets and
//! characteristic times for a symmetric double rectangular barrier.

pub mod basis;
pub mod chartimes;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod scatter;
pub mod superposition;
pub mod swf;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
pub use scatter::{
    compose_two_barrier, eval_total, find_resonances, one_barrier_params, total_field, transfer_matrix,
    OneBarrierParams, StationaryField, TransferMatrix, TwoBarrierParams, WaveNumberPoint,
};
pub use units::{BarrierSystem, UnitSystem};
pub use swf::{current, eval_swf, ref_field, SwfField, SwfState, Which};
pub use chartimes::{
    buttiker_dwell, derivatives, dwell_times, opaque_limit_report, phase_and_group_times, x_start_closed,
    DerivBundle, TimeReport,
};
pub use superposition::{current_audit, naive_split, CurrentAudit, NaiveSplit};
