//! The cycle engine and the trace it produces.
//!
//! A trace keeps one checkpoint per completed cycle. Snapshots and ledger
//! entries inside a cycle are regenerated on demand by replaying that cycle
//! from its checkpoint through the same code path the run used, so the
//! replayed values are bit-identical to the original evolution while memory
//! stays `O(N)` instead of `O(N · n_B)`.

use serde::{Deserialize, Serialize};

use super::bob_end::{self, BobEnd, CavityState, PacketStatus};
use super::config::{Logic, ProtocolConfig, TraceConfig};
use crate::amplitude::{BarrierUnitary, ComplexAmp};
use crate::error::{Error, Result};

/// State of the cavity at one recorded instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub j_a: u32,
    /// 0 right after the barrier-A interaction, then `1..=n_B`.
    pub j_b: u32,
    pub state: CavityState,
    /// Total probability in the escaped ledger at this instant.
    pub escaped_probability: f64,
}

impl Snapshot {
    pub fn total_probability(&self) -> f64 {
        self.state.norm_sqr() + self.escaped_probability
    }
}

/// A packet past barrier B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    #[serde(rename = "j_A")]
    pub j_a: u32,
    /// Absent for packets released at the end of a cycle.
    #[serde(rename = "j_B")]
    pub j_b: Option<u32>,
    pub amplitude: ComplexAmp,
    pub status: PacketStatus,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Geometry {
    gate: BarrierUnitary,
    inner: BarrierUnitary,
    bounces: u32,
    cycles: u32,
    end: &'static dyn BobEnd,
}

impl Geometry {
    pub(crate) fn from_config(config: &TraceConfig) -> Result<Self> {
        config.validate()?;
        Ok(match config {
            TraceConfig::Protocol(c) => Geometry {
                gate: c.barrier_a().unitary(),
                inner: c.barrier_b().unitary(),
                bounces: c.n_b,
                cycles: c.cycles,
                end: bob_end::lookup(c.logic.end_name())?,
            },
            TraceConfig::Toy(c) => Geometry {
                gate: BarrierUnitary::rotation(c.epsilon),
                inner: BarrierUnitary::identity(),
                bounces: 0,
                cycles: c.laps,
                end: bob_end::lookup(if c.bob_mirror { "toy-mirror" } else { "toy-open" })?,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Checkpoint {
    state: CavityState,
    escaped: CompensatedSum,
}

/// Neumaier summation; the escaped ledger can hold millions of tiny terms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Runs one outer cycle: barrier A, `n_B` bounces on barrier B, end of cycle.
#[inline]
fn advance_cycle<S, P>(geo: &Geometry, j_a: u32, point: &mut Checkpoint, mut on_snapshot: S, mut on_packet: P)
where
    S: FnMut(Snapshot),
    P: FnMut(PacketRecord),
{
    let state = &mut point.state;
    let (alice, inner) = geo.gate.apply((state.alice, state.inner));
    state.alice = alice;
    state.inner = inner;
    on_snapshot(Snapshot {
        j_a,
        j_b: 0,
        state: *state,
        escaped_probability: point.escaped.value(),
    });

    for j_b in 1..=geo.bounces {
        if let Some(ev) = geo.end.bounce(&geo.inner, state) {
            if ev.status == PacketStatus::Escaped {
                point.escaped.add(ev.amplitude.norm_sqr());
            }
            on_packet(PacketRecord {
                j_a,
                j_b: Some(j_b),
                amplitude: ev.amplitude,
                status: ev.status,
            });
        }
        on_snapshot(Snapshot {
            j_a,
            j_b,
            state: *state,
            escaped_probability: point.escaped.value(),
        });
    }

    if let Some(amplitude) = geo.end.close_cycle(state) {
        point.escaped.add(amplitude.norm_sqr());
        on_packet(PacketRecord {
            j_a,
            j_b: None,
            amplitude,
            status: PacketStatus::Escaped,
        });
    }
}

/// Everything recorded during one replayed cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleReplay {
    pub snapshots: Vec<Snapshot>,
    pub packets: Vec<PacketRecord>,
}

/// Output of a cavity run.
#[derive(Debug, Clone)]
pub struct SimTrace {
    config: TraceConfig,
    geometry: Geometry,
    /// `checkpoints[j]` is the state after `j` completed cycles.
    checkpoints: Vec<Checkpoint>,
}

impl PartialEq for SimTrace {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.checkpoints == other.checkpoints
    }
}

impl SimTrace {
    pub(crate) fn run(config: TraceConfig) -> Result<Self> {
        let geometry = Geometry::from_config(&config)?;
        let mut point = Checkpoint {
            state: CavityState::at_alice(),
            escaped: CompensatedSum::default(),
        };
        let mut checkpoints = Vec::with_capacity(geometry.cycles as usize + 1);
        checkpoints.push(point);
        for j_a in 1..=geometry.cycles {
            advance_cycle(&geometry, j_a, &mut point, |_| {}, |_| {});
            checkpoints.push(point);
        }
        Ok(SimTrace {
            config,
            geometry,
            checkpoints,
        })
    }

    pub fn config(&self) -> &TraceConfig {
        &self.config
    }

    /// The protocol parameters, if this is a two-barrier trace.
    pub fn protocol(&self) -> Option<&ProtocolConfig> {
        match &self.config {
            TraceConfig::Protocol(c) => Some(c),
            TraceConfig::Toy(_) => None,
        }
    }

    pub(crate) fn require_protocol(&self) -> Result<&ProtocolConfig> {
        self.protocol().ok_or(Error::WrongTraceKind {
            expected: "two-barrier protocol",
        })
    }

    pub fn logic(&self) -> Option<Logic> {
        self.protocol().map(|c| c.logic)
    }

    pub fn end_strategy(&self) -> &'static dyn BobEnd {
        self.geometry.end
    }

    /// Number of outer cycles `N`.
    pub fn cycles(&self) -> u32 {
        self.geometry.cycles
    }

    /// Inner bounces per cycle (`n_B`, or 0 for the toy cavity).
    pub fn bounces_per_cycle(&self) -> u32 {
        self.geometry.bounces
    }

    /// `N · (1 + n_B)`.
    pub fn snapshot_count(&self) -> u64 {
        u64::from(self.cycles()) * (1 + u64::from(self.bounces_per_cycle()))
    }

    /// Cavity state after `j_a` completed cycles; `j_a = 0` is the initial state.
    pub fn state_after(&self, j_a: u32) -> Result<CavityState> {
        self.checkpoint(j_a).map(|c| c.state)
    }

    pub fn alice_after(&self, j_a: u32) -> Result<ComplexAmp> {
        self.state_after(j_a).map(|s| s.alice)
    }

    /// Escaped-ledger probability after `j_a` completed cycles.
    pub fn escaped_after(&self, j_a: u32) -> Result<f64> {
        self.checkpoint(j_a).map(|c| c.escaped.value())
    }

    pub fn final_state(&self) -> CavityState {
        self.checkpoints.last().expect("initial checkpoint").state
    }

    /// Total probability that has left the cavity.
    pub fn escaped_probability(&self) -> f64 {
        self.checkpoints.last().expect("initial checkpoint").escaped.value()
    }

    fn checkpoint(&self, j_a: u32) -> Result<&Checkpoint> {
        self.checkpoints.get(j_a as usize).ok_or(Error::CycleOutOfRange {
            cycle: j_a,
            available: self.cycles(),
        })
    }

    /// Replays cycle `j_a` (1-based) from its checkpoint.
    pub fn replay_cycle(&self, j_a: u32) -> Result<CycleReplay> {
        if j_a == 0 || j_a > self.cycles() {
            return Err(Error::CycleOutOfRange {
                cycle: j_a,
                available: self.cycles(),
            });
        }
        let mut point = self.checkpoints[j_a as usize - 1];
        let mut snapshots = Vec::with_capacity(1 + self.geometry.bounces as usize);
        let mut packets = Vec::with_capacity(self.geometry.bounces as usize + 1);
        advance_cycle(
            &self.geometry,
            j_a,
            &mut point,
            |s| snapshots.push(s),
            |p| packets.push(p),
        );
        debug_assert_eq!(point, self.checkpoints[j_a as usize]);
        Ok(CycleReplay { snapshots, packets })
    }

    /// Amplitudes past barrier B during cycle `j_a`, ordered by `j_B`.
    ///
    /// With the open end these are the escaping packets; with the mirror they
    /// are the channel occupancies before the end-of-cycle removal.
    pub fn channel_in_cycle(&self, j_a: u32) -> Result<Vec<PacketRecord>> {
        let mut out = Vec::with_capacity(self.geometry.bounces as usize);
        self.visit_cycle(
            j_a,
            |_| {},
            |p| {
                if p.j_b.is_some() {
                    out.push(p);
                }
            },
        )?;
        Ok(out)
    }

    /// Calls `f(j_B, amplitude)` for every channel amplitude of cycle `j_a`.
    pub(crate) fn for_each_channel<F: FnMut(u32, ComplexAmp)>(&self, j_a: u32, mut f: F) -> Result<()> {
        self.visit_cycle(
            j_a,
            |_| {},
            |p| {
                if let Some(j_b) = p.j_b {
                    f(j_b, p.amplitude);
                }
            },
        )
    }

    fn visit_cycle<S, P>(&self, j_a: u32, on_snapshot: S, on_packet: P) -> Result<()>
    where
        S: FnMut(Snapshot),
        P: FnMut(PacketRecord),
    {
        if j_a == 0 || j_a > self.cycles() {
            return Err(Error::CycleOutOfRange {
                cycle: j_a,
                available: self.cycles(),
            });
        }
        let mut point = self.checkpoints[j_a as usize - 1];
        advance_cycle(&self.geometry, j_a, &mut point, on_snapshot, on_packet);
        Ok(())
    }

    /// Every snapshot in time order.
    pub fn snapshots(&self) -> impl Iterator<Item = Snapshot> + '_ {
        (1..=self.cycles()).flat_map(move |j| self.replay_cycle(j).expect("cycle within range").snapshots.into_iter())
    }

    /// Escaped packets in emission order.
    pub fn ledger(&self) -> impl Iterator<Item = PacketRecord> + '_ {
        self.packets().filter(|p| p.status == PacketStatus::Escaped)
    }

    /// Every packet record, escaped or occupancy, in time order.
    pub fn packets(&self) -> impl Iterator<Item = PacketRecord> + '_ {
        (1..=self.cycles()).flat_map(move |j| self.replay_cycle(j).expect("cycle within range").packets.into_iter())
    }

    /// The channel occupancy map: one record per `(j_A, j_B)` label.
    pub fn channel_records(&self) -> impl Iterator<Item = PacketRecord> + '_ {
        self.packets().filter(|p| p.j_b.is_some())
    }

    pub fn to_document(&self) -> TraceDocument {
        let mut snapshots = Vec::new();
        let mut ledger = Vec::new();
        for j in 1..=self.cycles() {
            let replay = self.replay_cycle(j).expect("cycle within range");
            for s in &replay.snapshots {
                snapshots.extend(SnapshotRow::from_snapshot(s));
            }
            ledger.extend(replay.packets);
        }
        TraceDocument {
            config: self.config,
            snapshots,
            ledger,
        }
    }

    /// Rebuilds a trace from its document by re-running the config and
    /// checking that every recorded value matches exactly.
    pub fn from_document(doc: &TraceDocument) -> Result<Self> {
        let trace = SimTrace::run(doc.config)?;
        let fresh = trace.to_document();
        if fresh.snapshots.len() != doc.snapshots.len() {
            return Err(Error::TraceMismatch(format!(
                "expected {} snapshot rows, found {}",
                fresh.snapshots.len(),
                doc.snapshots.len()
            )));
        }
        if fresh.ledger.len() != doc.ledger.len() {
            return Err(Error::TraceMismatch(format!(
                "expected {} ledger records, found {}",
                fresh.ledger.len(),
                doc.ledger.len()
            )));
        }
        if let Some((i, (a, b))) = fresh
            .snapshots
            .iter()
            .zip(&doc.snapshots)
            .enumerate()
            .find(|(_, (a, b))| a != b)
        {
            return Err(Error::TraceMismatch(format!(
                "snapshot row {i}: expected {a:?}, found {b:?}"
            )));
        }
        if let Some((i, (a, b))) = fresh
            .ledger
            .iter()
            .zip(&doc.ledger)
            .enumerate()
            .find(|(_, (a, b))| a != b)
        {
            return Err(Error::TraceMismatch(format!(
                "ledger record {i}: expected {a:?}, found {b:?}"
            )));
        }
        Ok(trace)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Alice,
    Between,
    Channel,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Alice, Region::Between, Region::Channel];

    pub fn name(self) -> &'static str {
        match self {
            Region::Alice => "alice",
            Region::Between => "between",
            Region::Channel => "channel",
        }
    }

    pub fn of(self, state: &CavityState) -> ComplexAmp {
        match self {
            Region::Alice => state.alice,
            Region::Between => state.inner,
            Region::Channel => state.channel,
        }
    }
}

impl std::str::FromStr for Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alice" => Ok(Region::Alice),
            "between" => Ok(Region::Between),
            "channel" => Ok(Region::Channel),
            other => Err(Error::InvalidArgument(format!("unknown region `{other}`"))),
        }
    }
}

/// One region of one snapshot, as written to JSON and CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRow {
    #[serde(rename = "j_A")]
    pub j_a: u32,
    #[serde(rename = "j_B")]
    pub j_b: u32,
    pub region: Region,
    pub re: f64,
    pub im: f64,
}

impl SnapshotRow {
    pub fn from_snapshot(s: &Snapshot) -> [SnapshotRow; 3] {
        Region::ALL.map(|region| {
            let amp = region.of(&s.state);
            SnapshotRow {
                j_a: s.j_a,
                j_b: s.j_b,
                region,
                re: amp.re,
                im: amp.im,
            }
        })
    }
}

/// Serialized form of a [`SimTrace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub config: TraceConfig,
    pub snapshots: Vec<SnapshotRow>,
    pub ledger: Vec<PacketRecord>,
}
