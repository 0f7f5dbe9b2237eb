//! Nonasymptotic bounds on the maximum coding rate of SISO Rician
//! block-fading channels without a priori channel state information.
//!
//! The crate evaluates, by seeded Monte-Carlo integration:
//!
//! - a dependence-testing achievability bound for noncoherent shell-code
//!   transmission,
//! - the matching min-max converse bound,
//! - a pilot-assisted variant of the achievability bound, and
//! - the AWGN normal approximation they converge to for large Rician
//!   factors.
//!
//! Rates are reported in bits per channel use; everything internal is in
//! nats and, for probability-like quantities, in log domain.

pub mod bounds;
pub mod cli;
pub mod density;
pub mod engine;
pub mod model;
pub mod numerics;

pub use bounds::{BoundKind, BoundResult, SampleBatch};
pub use density::{log_g, log_output_pdf, sample_info_density, GIntegralArgs};
pub use engine::{ResultRow, SweepSpec};
pub use model::{ChannelParams, CodeSpec, PilotConfig};
