//! Serializable reports for every subcommand and their text/CSV/JSON forms.
//!
//! Machine formats carry full precision (17 significant digits in CSV,
//! shortest round-trip floats in JSON); text uses 6 significant digits.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use cqc_core::cavity::{channel_probability, CavityState, ChannelProbability, SnapshotRow, TraceDocument};
use cqc_core::format::{sig17, sig6};
use cqc_core::modular::{exchange_expectation_for, MirrorRun};
use cqc_core::sweep::{convergence_fit, Abscissa, FitOutcome, SweepSpec};
use cqc_core::{
    decode_bit, flux_series, mirror_superposition_run, riemann_transfer_sum, run_protocol, run_sweep, run_toy,
    FluxSeries, Logic, OverlapDecomposition, ProtocolConfig, Result, SimTrace, SweepTable,
};
use serde::{Deserialize, Serialize};

use crate::invocation::{Command, Format};

/// State at the end of one outer cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    #[serde(rename = "j_A")]
    pub j_a: u32,
    pub state: CavityState,
    pub escaped_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub config: ProtocolConfig,
    /// Present when the run covers exactly `n_A` cycles.
    pub channel_probability: Option<ChannelProbability>,
    /// Bob's bit as read by Alice after the last cycle.
    pub decoded_bit: Option<u8>,
    pub cycles: Vec<CycleRow>,
}

impl ProtocolReport {
    pub const CSV_HEADER: &'static str =
        "j_A,alice_re,alice_im,inner_re,inner_im,channel_re,channel_im,escaped_probability";

    pub fn from_trace(config: ProtocolConfig, trace: &SimTrace) -> Result<Self> {
        let cycles = (0..=config.cycles)
            .map(|j| {
                Ok(CycleRow {
                    j_a: j,
                    state: trace.state_after(j)?,
                    escaped_probability: trace.escaped_after(j)?,
                })
            })
            .collect::<Result<_>>()?;
        let complete = config.cycles == config.n_a;
        Ok(ProtocolReport {
            config,
            channel_probability: complete.then(|| channel_probability(trace)).transpose()?,
            decoded_bit: (config.cycles > 0)
                .then(|| decode_bit(trace, config.cycles))
                .transpose()?,
            cycles,
        })
    }

    fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.cycles {
            let s = r.state;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.j_a,
                sig17(s.alice.re),
                sig17(s.alice.im),
                sig17(s.inner.re),
                sig17(s.inner.im),
                sig17(s.channel.re),
                sig17(s.channel.im),
                sig17(r.escaped_probability)
            );
        }
        out
    }

    fn to_text(&self) -> String {
        let c = &self.config;
        let last = self.cycles.last().expect("cycle 0 is always present");
        let mut out = String::new();
        let _ = writeln!(
            out,
            "protocol  n_A={} n_B={} N={} logic={} ({})",
            c.n_a,
            c.n_b,
            c.cycles,
            c.logic,
            if c.is_double_limit() {
                "double limit"
            } else {
                "outside double limit"
            }
        );
        let _ = writeln!(out, "eps_A      {}", sig6(c.epsilon_a()));
        let _ = writeln!(out, "eps_B      {}", sig6(c.epsilon_b()));
        let _ = writeln!(out, "P(alice)   {}", sig6(last.state.alice.norm_sqr()));
        let _ = writeln!(out, "P(between) {}", sig6(last.state.inner.norm_sqr()));
        let _ = writeln!(out, "P(escaped) {}", sig6(last.escaped_probability));
        if let Some(p) = &self.channel_probability {
            let label = match c.logic {
                Logic::Open => "(pi^2/8) eps_B/eps_A",
                Logic::Mirrored => "bound pi eps_A/2",
            };
            let _ = writeln!(
                out,
                "P(channel) {}  {label} = {}  ratio {}",
                sig6(p.measured),
                sig6(p.closed_form),
                sig6(p.ratio)
            );
        }
        if let Some(bit) = self.decoded_bit {
            let _ = writeln!(out, "decoded    {bit} (sent {})", c.logic.bit());
        }
        out
    }
}

fn snapshot_csv(doc: &TraceDocument) -> String {
    let mut out = String::from("j_A,j_B,region,re,im\n");
    for r in &doc.snapshots {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.j_a,
            r.j_b,
            r.region.name(),
            sig17(r.re),
            sig17(r.im)
        );
    }
    out
}

fn snapshot_text(doc: &TraceDocument) -> String {
    let mut out = format!("{:>6} {:>6} {:<8} {:>13} {:>13}\n", "j_A", "j_B", "region", "re", "im");
    for r in &doc.snapshots {
        let SnapshotRow {
            j_a,
            j_b,
            region,
            re,
            im,
        } = r;
        let _ = writeln!(
            out,
            "{j_a:>6} {j_b:>6} {:<8} {:>13} {:>13}",
            region.name(),
            sig6(*re),
            sig6(*im)
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub config: ProtocolConfig,
    pub decomposition: OverlapDecomposition,
    /// `cos(Nε_A)`, `0`, `1 − cos(Nε_A)` and `1`.
    pub reference: OverlapDecomposition,
}

impl ExpectationReport {
    pub fn reference_for(config: &ProtocolConfig) -> OverlapDecomposition {
        let alice = (f64::from(config.cycles) * config.epsilon_a()).cos();
        OverlapDecomposition {
            alice_contrib: alice,
            between_contrib: 0.0,
            channel_contrib: 1.0 - alice,
            total: 1.0,
        }
    }

    fn to_csv(self) -> String {
        let row = |name: &str, d: &OverlapDecomposition| {
            format!(
                "{name},{},{},{},{}\n",
                sig17(d.alice_contrib),
                sig17(d.between_contrib),
                sig17(d.channel_contrib),
                sig17(d.total)
            )
        };
        format!(
            "row,{}\n{}{}",
            OverlapDecomposition::CSV_HEADER,
            row("measured", &self.decomposition),
            row("reference", &self.reference)
        )
    }

    fn to_text(self) -> String {
        let c = &self.config;
        let (d, r) = (&self.decomposition, &self.reference);
        let mut out = format!(
            "exchange expectation  n_A={} n_B={} N={}\n{:<9} {:>14}  reference\n",
            c.n_a, c.n_b, c.cycles, "region", "measured"
        );
        for (name, m, label, v) in [
            ("alice", d.alice_contrib, "cos(N eps_A)", r.alice_contrib),
            ("between", d.between_contrib, "", r.between_contrib),
            ("channel", d.channel_contrib, "1 - cos(N eps_A)", r.channel_contrib),
            ("total", d.total, "", r.total),
        ] {
            let reference = if label.is_empty() {
                sig6(v)
            } else {
                format!("{label} = {}", sig6(v))
            };
            let _ = writeln!(out, "{name:<9} {:>14}  {reference}", sig6(m));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannReport {
    pub n: u32,
    pub value: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub table: SweepTable,
    pub abscissa: Abscissa,
    /// Empirical convergence order of `|deviation|`.
    pub fit: FitOutcome,
}

fn mirror_text(config: &ProtocolConfig, run: &MirrorRun) -> String {
    let d = &run.decomposition_at_end;
    let ea = config.epsilon_a();
    let n = f64::from(config.cycles);
    let alice_ref = (n * ea).cos() * ea.cos().powf(n);
    let mut out = format!(
        "mirror superposition  n_A={} n_B={} cycles={}\n",
        config.n_a, config.n_b, config.cycles
    );
    let _ = writeln!(
        out,
        "alice overlap  {}  cos(N eps_A) cos^N(eps_A) = {}",
        sig6(run.alice_region_overlap_at_end),
        sig6(alice_ref)
    );
    let _ = writeln!(out, "between        {}", sig6(d.between_contrib));
    let _ = writeln!(
        out,
        "channel        {}  1 - cos(N eps_A) = {}",
        sig6(d.channel_contrib),
        sig6(1.0 - (n * ea).cos())
    );
    let _ = writeln!(out, "total          {}  1", sig6(d.total));
    out
}

fn flux_text(series: &FluxSeries) -> String {
    let mut out = format!(
        "{:>6} {:>18} {:>13} {:>13}\n",
        "j_A", "cumulative_channel", "alice_term", "running_total"
    );
    for r in &series.records {
        let _ = writeln!(
            out,
            "{:>6} {:>18} {:>13} {:>13}",
            r.j_a,
            sig6(r.cumulative_channel),
            sig6(r.alice_term),
            sig6(r.running_total)
        );
    }
    out
}

fn sweep_text(report: &SweepReport) -> String {
    let mut out = format!(
        "sweep  target={}\n{:>7} {:>9} {:>12} {:>13} {:>13} {:>13}\n",
        report.table.target, "n_A", "n_B", "ratio", "measured", "reference", "deviation"
    );
    for r in &report.table.rows {
        let _ = writeln!(
            out,
            "{:>7} {:>9} {:>12} {:>13} {:>13} {:>13}",
            r.n_a,
            r.n_b,
            sig6(r.ratio),
            sig6(r.measured),
            sig6(r.reference),
            sig6(r.deviation)
        );
    }
    match &report.fit {
        FitOutcome::Fitted(f) => {
            let _ = writeln!(
                out,
                "empirical order {} in eps_A (constant {}, r^2 {})",
                sig6(f.order),
                sig6(f.constant),
                sig6(f.r_squared)
            );
        }
        FitOutcome::Unfittable { reason } => {
            let _ = writeln!(out, "empirical order: not fittable ({reason})");
        }
    }
    out
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn sweep_report(spec: &SweepSpec) -> Result<SweepReport> {
    let table = run_sweep(spec)?;
    let abscissa = Abscissa::EpsilonA;
    let fit = convergence_fit(&table, abscissa);
    Ok(SweepReport { table, abscissa, fit })
}

/// Runs the command and renders its output.
pub fn render(command: &Command, format: Format) -> Result<String> {
    Ok(match command {
        &Command::Toy { n_a, laps, mirror } => {
            let trace = run_toy(FRAC_PI_2 / f64::from(n_a), laps, mirror)?;
            let doc = trace.to_document();
            match format {
                Format::Json => json(&doc),
                Format::Csv => snapshot_csv(&doc),
                Format::Text => {
                    let end = trace.final_state();
                    format!(
                        "toy  eps={} laps={laps} bob={}\nP(alice)   {}\nP(bob)     {}\nP(escaped) {}\n",
                        sig6(FRAC_PI_2 / f64::from(n_a)),
                        if mirror { "mirror" } else { "open" },
                        sig6(end.alice.norm_sqr()),
                        sig6(end.inner.norm_sqr()),
                        sig6(trace.escaped_probability())
                    )
                }
            }
        }
        &Command::Protocol { config, snapshots } => {
            let trace = run_protocol(&config)?;
            if snapshots {
                let doc = trace.to_document();
                match format {
                    Format::Json => json(&doc),
                    Format::Csv => snapshot_csv(&doc),
                    Format::Text => snapshot_text(&doc),
                }
            } else {
                let report = ProtocolReport::from_trace(config, &trace)?;
                match format {
                    Format::Json => json(&report),
                    Format::Csv => report.to_csv(),
                    Format::Text => report.to_text(),
                }
            }
        }
        Command::Expectation(config) => {
            let report = ExpectationReport {
                config: *config,
                decomposition: exchange_expectation_for(config)?,
                reference: ExpectationReport::reference_for(config),
            };
            match format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
                Format::Text => report.to_text(),
            }
        }
        Command::Flux(config) => {
            let up = run_protocol(&config.with_logic(Logic::Open))?;
            let down = run_protocol(&config.with_logic(Logic::Mirrored))?;
            let series = flux_series(&up, &down)?;
            match format {
                Format::Json => json(&series),
                Format::Csv => series.to_csv(),
                Format::Text => flux_text(&series),
            }
        }
        Command::Mirror(config) => {
            let run = mirror_superposition_run(config, config.cycles)?;
            match format {
                Format::Json => json(&run),
                Format::Csv => run.to_csv(),
                Format::Text => mirror_text(config, &run),
            }
        }
        &Command::Riemann { n } => {
            let value = riemann_transfer_sum(n)?;
            let report = RiemannReport {
                n,
                value,
                deviation: value - 1.0,
            };
            match format {
                Format::Json => json(&report),
                Format::Csv => format!("n,value,deviation\n{n},{},{}\n", sig17(value), sig17(report.deviation)),
                Format::Text => format!(
                    "riemann sum  n={n}\nvalue      {}\ndeviation  {}\n",
                    sig6(value),
                    sig6(report.deviation)
                ),
            }
        }
        Command::Sweep(spec) => {
            let report = sweep_report(spec)?;
            match format {
                Format::Json => json(&report),
                Format::Csv => report.table.to_csv(),
                Format::Text => sweep_text(&report),
            }
        }
    })
}
