//! Parameter sweeps along double-limit sequences and empirical convergence
//! orders.
//!
//! Each quantity that can be swept is a [`SweepTarget`], registered by name.
//! Every row runs a fresh deterministic simulation and compares it with the
//! quantity's closed-form reference; rows are independent and computed in
//! parallel, and the table keeps the order of the input pairs.
//!
//! Fitted orders are empirical findings about the simulator, not claims
//! derived from the closed forms.

use std::f64::consts::PI;
use std::fmt::Debug;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{channel_probability, run_protocol, Logic, ProtocolConfig};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::modular::{exchange_expectation_for, riemann_transfer_sum};

/// How many outer cycles each row runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CyclesRule {
    /// `N = n_A`.
    Full,
    /// `N = round(f · n_A)`.
    Fraction(f64),
}

impl CyclesRule {
    pub fn cycles_for(&self, n_a: u32) -> Result<u32> {
        match *self {
            CyclesRule::Full => Ok(n_a),
            CyclesRule::Fraction(f) if f.is_finite() && f >= 0.0 => {
                let n = (f * f64::from(n_a)).round();
                if n > f64::from(u32::MAX) {
                    return Err(Error::InvalidArgument(format!("cycle fraction {f} is too large")));
                }
                Ok(n as u32)
            }
            CyclesRule::Fraction(f) => Err(Error::InvalidArgument(format!(
                "cycle fraction must be finite and non-negative, got {f}"
            ))),
        }
    }
}

/// A measured value and the closed form it is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub measured: f64,
    pub reference: f64,
}

pub trait SweepTarget: Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn describe(&self) -> &'static str;

    fn measure(&self, n_a: u32, n_b: u32, cycles: u32) -> Result<Measurement>;

    /// The closed form alone, without running anything.
    fn reference(&self, n_a: u32, n_b: u32, cycles: u32) -> f64;
}

fn eps(n: u32) -> f64 {
    PI / (2.0 * f64::from(n))
}

#[derive(Debug)]
pub struct ChannelProbOpen;

impl SweepTarget for ChannelProbOpen {
    fn name(&self) -> &'static str {
        "channel_prob_logic0"
    }
    fn describe(&self) -> &'static str {
        "probability past barrier B with Bob's end open vs (π²/8)(ε_B/ε_A)"
    }
    fn measure(&self, n_a: u32, n_b: u32, cycles: u32) -> Result<Measurement> {
        let cfg = ProtocolConfig::new(n_a, n_b, Logic::Open)?.with_cycles(cycles);
        let p = channel_probability(&run_protocol(&cfg)?)?;
        Ok(Measurement {
            measured: p.measured,
            reference: self.reference(n_a, n_b, cycles),
        })
    }
    fn reference(&self, n_a: u32, n_b: u32, _cycles: u32) -> f64 {
        PI * PI / 8.0 * eps(n_b) / eps(n_a)
    }
}

#[derive(Debug)]
pub struct ChannelProbMirrored;

impl SweepTarget for ChannelProbMirrored {
    fn name(&self) -> &'static str {
        "channel_prob_logic1"
    }
    fn describe(&self) -> &'static str {
        "probability past barrier B with Bob's end mirrored vs the bound π ε_A / 2"
    }
    fn measure(&self, n_a: u32, n_b: u32, cycles: u32) -> Result<Measurement> {
        let cfg = ProtocolConfig::new(n_a, n_b, Logic::Mirrored)?.with_cycles(cycles);
        let p = channel_probability(&run_protocol(&cfg)?)?;
        Ok(Measurement {
            measured: p.measured,
            reference: self.reference(n_a, n_b, cycles),
        })
    }
    fn reference(&self, n_a: u32, _n_b: u32, _cycles: u32) -> f64 {
        PI * eps(n_a) / 2.0
    }
}

#[derive(Debug)]
pub struct ExchangeTotal;

impl SweepTarget for ExchangeTotal {
    fn name(&self) -> &'static str {
        "exchange_total"
    }
    fn describe(&self) -> &'static str {
        "total exchange expectation vs 1"
    }
    fn measure(&self, n_a: u32, n_b: u32, cycles: u32) -> Result<Measurement> {
        let cfg = ProtocolConfig::new(n_a, n_b, Logic::Open)?.with_cycles(cycles);
        Ok(Measurement {
            measured: exchange_expectation_for(&cfg)?.total,
            reference: 1.0,
        })
    }
    fn reference(&self, _n_a: u32, _n_b: u32, _cycles: u32) -> f64 {
        1.0
    }
}

#[derive(Debug)]
pub struct AliceContrib;

impl SweepTarget for AliceContrib {
    fn name(&self) -> &'static str {
        "alice_contrib"
    }
    fn describe(&self) -> &'static str {
        "Alice-side exchange contribution vs cos(N ε_A)"
    }
    fn measure(&self, n_a: u32, n_b: u32, cycles: u32) -> Result<Measurement> {
        let cfg = ProtocolConfig::new(n_a, n_b, Logic::Open)?.with_cycles(cycles);
        Ok(Measurement {
            measured: exchange_expectation_for(&cfg)?.alice_contrib,
            reference: self.reference(n_a, n_b, cycles),
        })
    }
    fn reference(&self, n_a: u32, _n_b: u32, cycles: u32) -> f64 {
        (f64::from(cycles) * eps(n_a)).cos()
    }
}

#[derive(Debug)]
pub struct ChannelContrib;

impl SweepTarget for ChannelContrib {
    fn name(&self) -> &'static str {
        "channel_contrib"
    }
    fn describe(&self) -> &'static str {
        "transmission-channel exchange contribution vs 1 − cos(N ε_A)"
    }
    fn measure(&self, n_a: u32, n_b: u32, cycles: u32) -> Result<Measurement> {
        let cfg = ProtocolConfig::new(n_a, n_b, Logic::Open)?.with_cycles(cycles);
        Ok(Measurement {
            measured: exchange_expectation_for(&cfg)?.channel_contrib,
            reference: self.reference(n_a, n_b, cycles),
        })
    }
    fn reference(&self, n_a: u32, _n_b: u32, cycles: u32) -> f64 {
        1.0 - (f64::from(cycles) * eps(n_a)).cos()
    }
}

/// The Riemann transfer sum with `n = n_A`; `n_B` and the cycle rule are unused.
#[derive(Debug)]
pub struct RiemannSum;

impl SweepTarget for RiemannSum {
    fn name(&self) -> &'static str {
        "riemann_sum"
    }
    fn describe(&self) -> &'static str {
        "Σ (π/2n) sin(jπ/2n) with n = n_A vs 1"
    }
    fn measure(&self, n_a: u32, _n_b: u32, _cycles: u32) -> Result<Measurement> {
        Ok(Measurement {
            measured: riemann_transfer_sum(n_a)?,
            reference: 1.0,
        })
    }
    fn reference(&self, _n_a: u32, _n_b: u32, _cycles: u32) -> f64 {
        1.0
    }
}

static TARGETS: &[&'static dyn SweepTarget] = &[
    &ChannelProbOpen,
    &ChannelProbMirrored,
    &ExchangeTotal,
    &AliceContrib,
    &ChannelContrib,
    &RiemannSum,
];

pub fn lookup_target(name: &str) -> Result<&'static dyn SweepTarget> {
    TARGETS
        .iter()
        .copied()
        .find(|t| t.name() == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "sweep target",
            name: name.to_string(),
        })
}

pub fn registered_targets() -> impl Iterator<Item = &'static dyn SweepTarget> {
    TARGETS.iter().copied()
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub pairs: Vec<(u32, u32)>,
    pub target: &'static dyn SweepTarget,
    pub cycles: CyclesRule,
}

impl SweepSpec {
    pub fn new(pairs: Vec<(u32, u32)>, target: &str, cycles: CyclesRule) -> Result<Self> {
        Ok(SweepSpec {
            pairs,
            target: lookup_target(target)?,
            cycles,
        })
    }

    /// `(n_A, n_B) = (25·2^k, 2500·4^k)` for `k = 0..=k_max`, driving both
    /// `ε_A` and `ε_B/ε_A` to zero.
    pub fn ladder(k_max: u32, target: &str) -> Result<Self> {
        if k_max > 6 {
            return Err(Error::InvalidArgument(format!(
                "ladder depth {k_max} exceeds the supported maximum of 6"
            )));
        }
        let pairs = (0..=k_max).map(|k| (25 << k, 2500 << (2 * k))).collect();
        SweepSpec::new(pairs, target, CyclesRule::Full)
    }

    /// Whether `n_A` increases strictly down the rows.
    pub fn is_limit_sequence(&self) -> bool {
        self.pairs.windows(2).all(|w| w[0].0 < w[1].0)
    }

    fn validate_pair(index: usize, (n_a, n_b): (u32, u32)) -> Result<()> {
        if n_a < 2 || n_b < n_a {
            return Err(Error::Row {
                index,
                n_a,
                n_b,
                source: Box::new(Error::InvalidConfig("sweep pairs need n_B ≥ n_A ≥ 2".into())),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "n_A")]
    pub n_a: u32,
    #[serde(rename = "n_B")]
    pub n_b: u32,
    /// `ε_B / ε_A`.
    pub ratio: f64,
    pub measured: f64,
    pub reference: f64,
    /// Signed, `measured − reference`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub target: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub const CSV_HEADER: &'static str = "n_A,n_B,ratio,measured,reference,deviation";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n_a,
                r.n_b,
                sig17(r.ratio),
                sig17(r.measured),
                sig17(r.reference),
                sig17(r.deviation)
            ));
        }
        out
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    for (i, &pair) in spec.pairs.iter().enumerate() {
        SweepSpec::validate_pair(i, pair)?;
    }
    let rows = spec
        .pairs
        .par_iter()
        .enumerate()
        .map(|(index, &(n_a, n_b))| {
            let wrap = |e: Error| Error::Row {
                index,
                n_a,
                n_b,
                source: Box::new(e),
            };
            let cycles = spec.cycles.cycles_for(n_a).map_err(wrap)?;
            let m = spec.target.measure(n_a, n_b, cycles).map_err(wrap)?;
            Ok(SweepRow {
                n_a,
                n_b,
                ratio: f64::from(n_a) / f64::from(n_b),
                measured: m.measured,
                reference: m.reference,
                deviation: m.measured - m.reference,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        target: spec.target.name().to_string(),
        rows,
    })
}

/// The small parameter a deviation is fitted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    EpsilonA,
    Ratio,
    InverseNA,
}

impl Abscissa {
    pub fn of(self, row: &SweepRow) -> f64 {
        match self {
            Abscissa::EpsilonA => eps(row.n_a),
            Abscissa::Ratio => row.ratio,
            Abscissa::InverseNA => 1.0 / f64::from(row.n_a),
        }
    }
}

impl std::str::FromStr for Abscissa {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon_a" | "eps_a" => Ok(Abscissa::EpsilonA),
            "ratio" => Ok(Abscissa::Ratio),
            "inverse_n_a" | "1/n_a" => Ok(Abscissa::InverseNA),
            other => Err(Error::InvalidArgument(format!("unknown abscissa `{other}`"))),
        }
    }
}

/// `|deviation| ≈ constant · abscissa^order`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFit {
    pub order: f64,
    pub constant: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum FitOutcome {
    Fitted(ConvergenceFit),
    Unfittable { reason: String },
}

impl FitOutcome {
    pub fn fitted(&self) -> Option<&ConvergenceFit> {
        match self {
            FitOutcome::Fitted(f) => Some(f),
            FitOutcome::Unfittable { .. } => None,
        }
    }
}

/// Least-squares line through `(log x, log |deviation|)`.
pub fn convergence_fit(table: &SweepTable, abscissa: Abscissa) -> FitOutcome {
    let unfittable = |reason: &str| FitOutcome::Unfittable {
        reason: reason.to_string(),
    };
    if table.rows.len() < 3 {
        return unfittable("need at least 3 rows");
    }
    if table
        .rows
        .iter()
        .any(|r| r.deviation == 0.0 || !r.deviation.is_finite())
    {
        return unfittable("zero or non-finite deviation");
    }
    let positive = table.rows[0].deviation > 0.0;
    if table.rows.iter().any(|r| (r.deviation > 0.0) != positive) {
        return unfittable("deviations change sign");
    }
    let points: Vec<(f64, f64)> = table
        .rows
        .iter()
        .map(|r| (abscissa.of(r).ln(), r.deviation.abs().ln()))
        .collect();
    if points.iter().any(|(x, _)| !x.is_finite()) {
        return unfittable("abscissa must be positive");
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return unfittable("abscissa values coincide");
    }
    let order = sxy / sxx;
    let intercept = my - order * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - (intercept + order * p.0)).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    FitOutcome::Fitted(ConvergenceFit {
        order,
        constant: intercept.exp(),
        r_squared,
    })
}
