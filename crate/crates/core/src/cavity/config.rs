use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amplitude::Barrier;
use crate::error::{Error, Result};

/// Bob's choice at his end of the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Logic {
    /// Logic 0: the end is left open, anything crossing barrier B escapes.
    Open,
    /// Logic 1: the end is covered by a mirror.
    Mirrored,
}

impl Logic {
    pub fn bit(self) -> u8 {
        match self {
            Logic::Open => 0,
            Logic::Mirrored => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Logic::Open),
            1 => Ok(Logic::Mirrored),
            other => Err(Error::InvalidArgument(format!("logic bit must be 0 or 1, got {other}"))),
        }
    }

    /// Registry name of the end strategy that realizes this logic.
    pub fn end_name(self) -> &'static str {
        match self {
            Logic::Open => "open",
            Logic::Mirrored => "mirror",
        }
    }
}

impl From<Logic> for u8 {
    fn from(l: Logic) -> u8 {
        l.bit()
    }
}

impl TryFrom<u8> for Logic {
    type Error = Error;
    fn try_from(bit: u8) -> Result<Self> {
        Logic::from_bit(bit)
    }
}

impl FromStr for Logic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "open" => Ok(Logic::Open),
            "1" | "mirror" | "mirrored" => Ok(Logic::Mirrored),
            other => Err(Error::InvalidArgument(format!("unknown logic `{other}`"))),
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

fn unit() -> f64 {
    1.0
}

/// Parameters of one run of the two-barrier protocol.
///
/// `ε_A = π/(2 n_A)` and `ε_B = π/(2 n_B)`, so `n_A` hits on barrier A and
/// `n_B` hits on barrier B each make exactly a quarter turn. One outer cycle
/// lasts `L/v`; barrier A is open only once per cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    #[serde(rename = "n_A")]
    pub n_a: u32,
    #[serde(rename = "n_B")]
    pub n_b: u32,
    pub cycles: u32,
    pub logic: Logic,
    #[serde(default = "unit")]
    pub length_scale: f64,
    #[serde(default = "unit")]
    pub speed: f64,
}

impl ProtocolConfig {
    /// A full-length run, `N = n_A`, with `L = v = 1`.
    pub fn new(n_a: u32, n_b: u32, logic: Logic) -> Result<Self> {
        let cfg = ProtocolConfig {
            n_a,
            n_b,
            cycles: n_a,
            logic,
            length_scale: 1.0,
            speed: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_cycles(mut self, cycles: u32) -> Self {
        self.cycles = cycles;
        self
    }

    pub fn with_logic(mut self, logic: Logic) -> Self {
        self.logic = logic;
        self
    }

    pub fn with_scales(mut self, length_scale: f64, speed: f64) -> Result<Self> {
        self.length_scale = length_scale;
        self.speed = speed;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_a == 0 {
            return Err(Error::InvalidConfig("n_A must be positive".into()));
        }
        if self.n_b == 0 {
            return Err(Error::InvalidConfig("n_B must be positive".into()));
        }
        if !(self.length_scale.is_finite() && self.length_scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "length scale must be positive, got {}",
                self.length_scale
            )));
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "speed must be positive, got {}",
                self.speed
            )));
        }
        Ok(())
    }

    pub fn epsilon_a(&self) -> f64 {
        FRAC_PI_2 / f64::from(self.n_a)
    }

    pub fn epsilon_b(&self) -> f64 {
        FRAC_PI_2 / f64::from(self.n_b)
    }

    pub fn barrier_a(&self) -> Barrier {
        Barrier::new(self.epsilon_a()).expect("n_A ≥ 1 keeps ε_A in range")
    }

    pub fn barrier_b(&self) -> Barrier {
        Barrier::new(self.epsilon_b()).expect("n_B ≥ 1 keeps ε_B in range")
    }

    /// `ε_B / ε_A = n_A / n_B`.
    pub fn ratio(&self) -> f64 {
        f64::from(self.n_a) / f64::from(self.n_b)
    }

    /// Duration of one outer cycle, `L/v`.
    pub fn cycle_time(&self) -> f64 {
        self.length_scale / self.speed
    }

    /// Elapsed time after `j_a` completed cycles.
    pub fn time_after(&self, j_a: u32) -> f64 {
        f64::from(j_a) * self.cycle_time()
    }

    /// `T_A = π L / (2 ε_A v)`, the time for a full transfer across barrier A.
    pub fn transfer_time(&self) -> f64 {
        f64::from(self.n_a) * self.cycle_time()
    }

    /// Rough double-limit check: `n_B ≥ 10 n_A` and `n_A ≥ 20`.
    pub fn is_double_limit(&self) -> bool {
        self.n_a >= 20 && u64::from(self.n_b) >= 10 * u64::from(self.n_a)
    }
}

/// Parameters of the single-barrier toy cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub epsilon: f64,
    pub laps: u32,
    pub bob_mirror: bool,
}

impl ToyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= FRAC_PI_2) {
            return Err(Error::InvalidAngle(self.epsilon));
        }
        Ok(())
    }
}

/// What a [`SimTrace`](super::SimTrace) was produced from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TraceConfig {
    Protocol(ProtocolConfig),
    Toy(ToyConfig),
}

impl TraceConfig {
    pub fn cycles(&self) -> u32 {
        match self {
            TraceConfig::Protocol(c) => c.cycles,
            TraceConfig::Toy(c) => c.laps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TraceConfig::Protocol(c) => c.validate(),
            TraceConfig::Toy(c) => c.validate(),
        }
    }
}
