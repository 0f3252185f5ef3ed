//! Link-level models for cooperative networks that combine an active relay
//! with a reconfigurable intelligent surface (RIS).
//!
//! The crate is `no_std` (it needs `alloc`) and covers the pure numerics:
//! node placement, path loss, seeded channel synthesis, RIS phase alignment,
//! relaying rate formulas and a particle swarm optimizer for the RIS phase
//! vector. File formats, sweeps and the command line live in `hrn-sim`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channels;
pub mod error;
pub mod geometry;
pub mod pso;
pub mod relaying;
pub mod ris;
pub mod units;

pub use channels::{
    build_channel_set, free_space_gain, umi_gain, ChannelSet, Coefficient, GainModel, LinkGain,
    LosMap, SystemParams, UmiGain,
};
pub use error::{Error, Result};
pub use geometry::{
    distance, relay_assisted_layout, ris_assisted_layout, symmetric_hrn_layout, NetworkLayout,
    Position, RisScenario,
};
pub use pso::{PhaseOptimizer, PhaseSearch, Pso, PsoParams};
pub use relaying::{
    evaluate_scheme, rate_fd_af, rate_fd_df, rate_hd_af, rate_hd_df, Duplex, PhaseConfig,
    Protocol, RateResult, SchemeSpec, Topology,
};
pub use ris::{align_phases, cascaded_channel, hybrid_hop_gain, RisPhaseVector};
