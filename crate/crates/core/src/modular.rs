//! Region-resolved expectation of the π-rotation (exchange) operator for
//! two cavities placed symmetrically about the `z` axis.
//!
//! For a particle in `(|ψ↑⟩ + |ψ↓⟩)/√2` the rotation swaps the branches, so
//! `⟨e^{iπL_z/ħ}⟩ = Re⟨ψ↑|ψ↓⟩`. The `1/√2` factors cancel against the two
//! cross terms; contributions here are reported on that normalization, so an
//! untouched particle gives exactly 1.
//!
//! Alice-side and between-barrier contributions pair the two branches'
//! amplitudes at the same instant. Channel amplitudes are paired by their
//! `(j_A, j_B)` labels: each label is one path, from the upper cavity's
//! escaping packet to the lower cavity's channel occupancy.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::cavity::{closed_form_amplitude, run_protocol, Form, Logic, ProtocolConfig, Region, SimTrace};
use crate::error::{Error, Result};
use crate::format::sig17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapDecomposition {
    pub alice_contrib: f64,
    pub between_contrib: f64,
    pub channel_contrib: f64,
    pub total: f64,
}

impl OverlapDecomposition {
    fn from_parts(alice_contrib: f64, between_contrib: f64, channel_contrib: f64) -> Self {
        OverlapDecomposition {
            alice_contrib,
            between_contrib,
            channel_contrib,
            total: alice_contrib + between_contrib + channel_contrib,
        }
    }

    pub const CSV_HEADER: &'static str = "alice_contrib,between_contrib,channel_contrib,total";

    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{},{},{},{}\n",
            Self::CSV_HEADER,
            sig17(self.alice_contrib),
            sig17(self.between_contrib),
            sig17(self.channel_contrib),
            sig17(self.total)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxRecord {
    #[serde(rename = "j_A")]
    pub j_a: u32,
    /// Channel contribution from all paths with `j_A ≤` this cycle.
    pub cumulative_channel: f64,
    pub alice_term: f64,
    pub running_total: f64,
}

/// Time-resolved flow of the exchange expectation into the channel.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FluxSeries {
    pub records: Vec<FluxRecord>,
}

impl FluxSeries {
    pub const CSV_HEADER: &'static str = "j_A,cumulative_channel,alice_term,running_total";

    /// Cumulative channel contribution after `j_a` cycles (0 before any).
    pub fn cumulative_at(&self, j_a: u32) -> Option<f64> {
        if j_a == 0 {
            return Some(0.0);
        }
        self.records.get(j_a as usize - 1).map(|r| r.cumulative_channel)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.j_a,
                sig17(r.cumulative_channel),
                sig17(r.alice_term),
                sig17(r.running_total)
            ));
        }
        out
    }
}

fn check_pair<'a>(up: &'a SimTrace, down: &'a SimTrace) -> Result<&'a ProtocolConfig> {
    let a = up.require_protocol()?;
    let b = down.require_protocol()?;
    if (a.n_a, a.n_b, a.cycles) != (b.n_a, b.n_b, b.cycles) {
        return Err(Error::MismatchedTraces(format!(
            "(n_A, n_B, N) = ({}, {}, {}) vs ({}, {}, {})",
            a.n_a, a.n_b, a.cycles, b.n_a, b.n_b, b.cycles
        )));
    }
    if a.length_scale != b.length_scale || a.speed != b.speed {
        return Err(Error::MismatchedTraces("different time units".into()));
    }
    Ok(a)
}

/// Walks both traces cycle by cycle, calling `on_cycle(j_A, alice, between,
/// cumulative_channel)` after every completed cycle.
fn walk_overlap<F>(up: &SimTrace, down: &SimTrace, mut on_cycle: F) -> Result<()>
where
    F: FnMut(u32, f64, f64, f64),
{
    let cfg = check_pair(up, down)?;
    let mut cumulative = 0.0;
    let mut upper = Vec::with_capacity(cfg.n_b as usize);
    for j_a in 1..=cfg.cycles {
        upper.clear();
        up.for_each_channel(j_a, |_, amp| upper.push(amp))?;
        let mut k = 0usize;
        let mut unmatched = false;
        down.for_each_channel(j_a, |_, amp| match upper.get(k) {
            Some(u) => {
                cumulative += u.overlap_re(amp);
                k += 1;
            }
            None => unmatched = true,
        })?;
        if unmatched || k != upper.len() {
            return Err(Error::MismatchedTraces(format!(
                "cycle {j_a}: channel labels do not pair up"
            )));
        }
        let su = up.state_after(j_a)?;
        let sd = down.state_after(j_a)?;
        on_cycle(
            j_a,
            su.alice.overlap_re(sd.alice),
            su.inner.overlap_re(sd.inner) + su.channel.overlap_re(sd.channel),
            cumulative,
        );
    }
    Ok(())
}

/// Region decomposition of `Re⟨ψ↑|ψ↓⟩` at the end of the traces.
///
/// `up` is the open-end (logic 0) cavity, `down` the mirrored one; both must
/// share `n_A`, `n_B` and `N`.
pub fn exchange_expectation(up: &SimTrace, down: &SimTrace) -> Result<OverlapDecomposition> {
    let cfg = check_pair(up, down)?;
    let mut channel = 0.0;
    walk_overlap(up, down, |_, _, _, c| channel = c)?;
    let su = up.state_after(cfg.cycles)?;
    let sd = down.state_after(cfg.cycles)?;
    Ok(OverlapDecomposition::from_parts(
        su.alice.overlap_re(sd.alice),
        su.inner.overlap_re(sd.inner) + su.channel.overlap_re(sd.channel),
        channel,
    ))
}

/// Runs both cavities for `cfg` and decomposes their overlap.
pub fn exchange_expectation_for(cfg: &ProtocolConfig) -> Result<OverlapDecomposition> {
    let up = run_protocol(&cfg.with_logic(Logic::Open))?;
    let down = run_protocol(&cfg.with_logic(Logic::Mirrored))?;
    exchange_expectation(&up, &down)
}

/// The same decomposition built from the limit-form table amplitudes instead
/// of simulated ones, exposing the finite-parameter corrections.
pub fn exchange_expectation_limit(n_a: u32, n_b: u32, cycles: u32) -> Result<OverlapDecomposition> {
    let cfg = ProtocolConfig::new(n_a, n_b, Logic::Open)?.with_cycles(cycles);
    let (ea, eb) = (cfg.epsilon_a(), cfg.epsilon_b());
    let amp = |region, logic, j_a, j_b| closed_form_amplitude(region, logic, j_a, j_b, ea, eb, Form::Limit);

    let alice = amp(Region::Alice, Logic::Open, cycles, 0)?.overlap_re(amp(Region::Alice, Logic::Mirrored, cycles, 0)?);
    let between =
        amp(Region::Between, Logic::Open, cycles, n_b)?.overlap_re(amp(Region::Between, Logic::Mirrored, cycles, n_b)?);
    let mut channel = 0.0;
    for j_a in 1..=cycles {
        for j_b in 1..=n_b {
            channel += amp(Region::Channel, Logic::Open, j_a, j_b)?.overlap_re(amp(
                Region::Channel,
                Logic::Mirrored,
                j_a,
                j_b,
            )?);
        }
    }
    Ok(OverlapDecomposition::from_parts(alice, between, channel))
}

/// Per-cycle accumulation of the channel contribution and the running total.
pub fn flux_series(up: &SimTrace, down: &SimTrace) -> Result<FluxSeries> {
    let mut records = Vec::with_capacity(up.cycles() as usize);
    walk_overlap(up, down, |j_a, alice, between, cumulative| {
        records.push(FluxRecord {
            j_a,
            cumulative_channel: cumulative,
            alice_term: alice,
            running_total: alice + between + cumulative,
        })
    })?;
    Ok(FluxSeries { records })
}

/// `Σ_{j=1}^{n} (π/2n) sin(jπ/2n)`, a Riemann sum for `∫₀¹ (π/2) sin(πx/2) dx = 1`.
pub fn riemann_transfer_sum(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("Riemann sum needs n ≥ 1".into()));
    }
    let step = FRAC_PI_2 / f64::from(n);
    Ok((1..=n).map(|j| step * (f64::from(j) * step).sin()).sum())
}

/// `Σ_{j=1}^{n_cycles} ε_A sin(j ε_A)` with `ε_A = π/(2 n_A)`; tends to
/// `1 − cos(n_cycles ε_A)` as `n_A` grows.
pub fn partial_transfer_sum(n_cycles: u32, n_a: u32) -> Result<f64> {
    if n_a == 0 {
        return Err(Error::InvalidArgument("n_A must be positive".into()));
    }
    let eps = FRAC_PI_2 / f64::from(n_a);
    Ok((1..=n_cycles).map(|j| eps * (f64::from(j) * eps).sin()).sum())
}

/// Outcome of running one cavity against a mirror in superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorRun {
    /// `Re⟨ψ⁽⁰⁾(t)|ψ⁽¹⁾(t)⟩` for `t = 0..=total_cycles`.
    pub exchange_series: Vec<f64>,
    pub decomposition_at_end: OverlapDecomposition,
    pub alice_region_overlap_at_end: f64,
}

impl MirrorRun {
    pub const CSV_HEADER: &'static str = "cycle,exchange";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (t, v) in self.exchange_series.iter().enumerate() {
            out.push_str(&format!("{t},{}\n", sig17(*v)));
        }
        out
    }
}

/// One cavity whose end mirror is in a superposition of covering (logic 1)
/// and not covering (logic 0) Bob's end. The mirror is a passive branch
/// label; both particle branches are evolved and paired as in
/// [`exchange_expectation`].
pub fn mirror_superposition_run(base: &ProtocolConfig, total_cycles: u32) -> Result<MirrorRun> {
    if total_cycles == 0 {
        return Err(Error::InvalidArgument(
            "mirror superposition run needs at least one cycle".into(),
        ));
    }
    let cfg = base.with_cycles(total_cycles);
    let open = run_protocol(&cfg.with_logic(Logic::Open))?;
    let mirrored = run_protocol(&cfg.with_logic(Logic::Mirrored))?;

    let initial = open.state_after(0)?;
    let mut exchange_series = Vec::with_capacity(total_cycles as usize + 1);
    exchange_series.push(initial.alice.overlap_re(mirrored.state_after(0)?.alice));
    let series = flux_series(&open, &mirrored)?;
    exchange_series.extend(series.records.iter().map(|r| r.running_total));

    let decomposition_at_end = exchange_expectation(&open, &mirrored)?;
    Ok(MirrorRun {
        exchange_series,
        alice_region_overlap_at_end: decomposition_at_end.alice_contrib,
        decomposition_at_end,
    })
}
