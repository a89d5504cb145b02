//! What happens at Bob's end of the cavity.
//!
//! Each variant is a [`BobEnd`] strategy, registered under a name and looked
//! up at runtime. The engine in [`super::trace`] only talks to the trait.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::amplitude::{BarrierUnitary, ComplexAmp};
use crate::error::{Error, Result};

/// Mode amplitudes inside the cavity.
///
/// `inner` is the region between barriers A and B (Bob's side of the barrier
/// in the toy cavity); `channel` is the transmission channel past barrier B.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CavityState {
    pub alice: ComplexAmp,
    pub inner: ComplexAmp,
    pub channel: ComplexAmp,
}

impl CavityState {
    pub fn at_alice() -> Self {
        CavityState {
            alice: ComplexAmp::ONE,
            ..Default::default()
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alice.norm_sqr() + self.inner.norm_sqr() + self.channel.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PacketStatus {
    /// Left the cavity for good.
    Escaped,
    /// Present in the transmission channel but still inside the cavity.
    ChannelOccupancy,
}

/// Amplitude found past barrier B after one inner bounce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEvent {
    pub amplitude: ComplexAmp,
    pub status: PacketStatus,
}

pub trait BobEnd: Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn describe(&self) -> &'static str;

    /// One hit of the inner packet on barrier B.
    fn bounce(&self, barrier_b: &BarrierUnitary, state: &mut CavityState) -> Option<ChannelEvent>;

    /// End of an outer cycle. Returns whatever leaves the cavity.
    fn close_cycle(&self, state: &mut CavityState) -> Option<ComplexAmp>;
}

/// Logic 0: no mirror, whatever crosses barrier B is gone.
#[derive(Debug)]
pub struct OpenEnd;

impl BobEnd for OpenEnd {
    fn name(&self) -> &'static str {
        "open"
    }

    fn describe(&self) -> &'static str {
        "two-barrier cavity, Bob's end open (logic 0)"
    }

    fn bounce(&self, barrier_b: &BarrierUnitary, state: &mut CavityState) -> Option<ChannelEvent> {
        // The far side of B starts empty on every hit.
        let (kept, emitted) = barrier_b.apply((state.inner, ComplexAmp::ZERO));
        state.inner = kept;
        Some(ChannelEvent {
            amplitude: emitted,
            status: PacketStatus::Escaped,
        })
    }

    fn close_cycle(&self, _state: &mut CavityState) -> Option<ComplexAmp> {
        None
    }
}

/// Logic 1: a mirror closes the channel during the inner bounces and is
/// briefly removed at the end of every cycle.
#[derive(Debug)]
pub struct MirroredEnd;

impl BobEnd for MirroredEnd {
    fn name(&self) -> &'static str {
        "mirror"
    }

    fn describe(&self) -> &'static str {
        "two-barrier cavity, Bob's end mirrored (logic 1)"
    }

    fn bounce(&self, barrier_b: &BarrierUnitary, state: &mut CavityState) -> Option<ChannelEvent> {
        let (inner, channel) = barrier_b.apply((state.inner, state.channel));
        state.inner = inner;
        state.channel = channel;
        Some(ChannelEvent {
            amplitude: channel,
            status: PacketStatus::ChannelOccupancy,
        })
    }

    fn close_cycle(&self, state: &mut CavityState) -> Option<ComplexAmp> {
        Some(std::mem::take(&mut state.channel))
    }
}

/// Single-barrier cavity with Bob's end closed.
#[derive(Debug)]
pub struct ToyMirror;

impl BobEnd for ToyMirror {
    fn name(&self) -> &'static str {
        "toy-mirror"
    }

    fn describe(&self) -> &'static str {
        "single-barrier cavity, Bob's end closed"
    }

    fn bounce(&self, _barrier_b: &BarrierUnitary, _state: &mut CavityState) -> Option<ChannelEvent> {
        None
    }

    fn close_cycle(&self, _state: &mut CavityState) -> Option<ComplexAmp> {
        None
    }
}

/// Single-barrier cavity with Bob's end open: each lap, the packet that
/// crossed the barrier leaves.
#[derive(Debug)]
pub struct ToyOpen;

impl BobEnd for ToyOpen {
    fn name(&self) -> &'static str {
        "toy-open"
    }

    fn describe(&self) -> &'static str {
        "single-barrier cavity, Bob's end open"
    }

    fn bounce(&self, _barrier_b: &BarrierUnitary, _state: &mut CavityState) -> Option<ChannelEvent> {
        None
    }

    fn close_cycle(&self, state: &mut CavityState) -> Option<ComplexAmp> {
        Some(std::mem::take(&mut state.inner))
    }
}

static REGISTRY: &[&'static dyn BobEnd] = &[&OpenEnd, &MirroredEnd, &ToyMirror, &ToyOpen];

/// Looks up a registered end strategy by name.
pub fn lookup(name: &str) -> Result<&'static dyn BobEnd> {
    REGISTRY
        .iter()
        .copied()
        .find(|e| e.name() == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "cavity end",
            name: name.to_string(),
        })
}

pub fn registered() -> impl Iterator<Item = &'static dyn BobEnd> {
    REGISTRY.iter().copied()
}
