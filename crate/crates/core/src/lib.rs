//! Amplitude-level simulation of counterfactual communication through a
//! chain of weak barriers, and bookkeeping of modular angular momentum
//! (`L_z mod 2ħ`) flowing into the transmission channel.
//!
//! - [`amplitude`]: complex amplitudes and the barrier unitary `U(ε)`.
//! - [`cavity`]: the single-barrier toy cavity and the two-barrier protocol.
//! - [`modular`]: the exchange-operator expectation, its region decomposition
//!   and time-resolved flux.
//! - [`sweep`]: double-limit sweeps and convergence-order fits.

pub mod amplitude;
pub mod cavity;
mod error;
pub mod format;
pub mod modular;
pub mod sweep;

pub use amplitude::{apply_barrier, barrier_power, Barrier, BarrierUnitary, ComplexAmp};
pub use cavity::{
    channel_probability, closed_form_amplitude, decode_bit, run_protocol, run_toy, Logic, ProtocolConfig, SimTrace,
};
pub use error::{Error, Result};
pub use modular::{
    exchange_expectation, flux_series, mirror_superposition_run, partial_transfer_sum, riemann_transfer_sum,
    FluxSeries, OverlapDecomposition,
};
pub use sweep::{convergence_fit, run_sweep, SweepSpec, SweepTable};
