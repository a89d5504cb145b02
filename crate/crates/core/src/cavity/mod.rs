//! Discrete-event simulation of the single-barrier toy cavity and the
//! two-barrier protocol.
//!
//! Barrier A is closed except once per outer cycle, so a run is a sequence of
//! cycles, each made of one barrier-A interaction followed by `n_B` bounces
//! of the inner packet on barrier B. Wave packets are mode amplitudes indexed
//! by region and cycle; `L` and `v` only set the time unit.

mod bob_end;
mod config;
mod table;
mod trace;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use bob_end::{
    lookup as lookup_end, registered as registered_ends, BobEnd, CavityState, ChannelEvent, MirroredEnd, OpenEnd,
    PacketStatus, ToyMirror, ToyOpen,
};
pub use config::{Logic, ProtocolConfig, ToyConfig, TraceConfig};
pub use table::{closed_form_amplitude, Form};
pub use trace::{CycleReplay, PacketRecord, Region, SimTrace, Snapshot, SnapshotRow, TraceDocument};

use crate::error::{Error, Result};

/// Runs the single-barrier cavity for `laps` round trips.
///
/// With the mirror in place the two sides exchange amplitude through
/// `U(ε)^laps`; with the end open, whatever crosses the barrier on a lap
/// leaves at the end of that lap.
pub fn run_toy(epsilon: f64, laps: u32, bob_mirror: bool) -> Result<SimTrace> {
    SimTrace::run(TraceConfig::Toy(ToyConfig {
        epsilon,
        laps,
        bob_mirror,
    }))
}

/// Runs the two-barrier protocol.
pub fn run_protocol(config: &ProtocolConfig) -> Result<SimTrace> {
    SimTrace::run(TraceConfig::Protocol(*config))
}

/// Probability that reached the transmission channel, against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelProbability {
    pub measured: f64,
    /// `(π²/8)(ε_B/ε_A)` for the open end, the bound `π ε_A / 2` for the mirror.
    pub closed_form: f64,
    pub ratio: f64,
}

/// Total probability ever present past barrier B.
///
/// For the open end this is the sum over escaped packets. For the mirror the
/// channel amplitude is removed at the end of every cycle, so the removed
/// packets carry everything that was ever past barrier B.
///
/// Requires `N = n_A`; an unevolved trace (`N = 0`) reports zero.
pub fn channel_probability(trace: &SimTrace) -> Result<ChannelProbability> {
    let cfg = trace.require_protocol()?;
    if cfg.cycles != cfg.n_a && cfg.cycles != 0 {
        return Err(Error::IncompleteRotation {
            cycles: cfg.cycles,
            n_a: cfg.n_a,
        });
    }
    let closed_form = match cfg.logic {
        Logic::Open => PI * PI / 8.0 * cfg.ratio(),
        Logic::Mirrored => PI * cfg.epsilon_a() / 2.0,
    };
    let measured = trace.escaped_probability() + trace.final_state().channel.norm_sqr();
    Ok(ChannelProbability {
        measured,
        closed_form,
        ratio: measured / closed_form,
    })
}

/// Alice's reading at the end of cycle `detection_cycle`: 1 if she finds
/// the particle with probability above 1/2, else 0.
pub fn decode_bit(trace: &SimTrace, detection_cycle: u32) -> Result<u8> {
    if detection_cycle == 0 || detection_cycle > trace.cycles() {
        return Err(Error::CycleOutOfRange {
            cycle: detection_cycle,
            available: trace.cycles(),
        });
    }
    let p = trace.alice_after(detection_cycle)?.norm_sqr();
    Ok(u8::from(p > 0.5))
}
