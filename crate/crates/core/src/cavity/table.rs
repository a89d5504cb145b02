//! Closed-form region amplitudes for the two-barrier protocol.
//!
//! `exact` gives the finite-parameter expression, `limit` the leading form in
//! the double limit `ε_A → 0`, `ε_B/ε_A → 0`. For the open end the
//! Alice-side entry has no separate finite form; both give `cos(j_A ε_A)`.

use serde::{Deserialize, Serialize};

use super::config::Logic;
use super::trace::Region;
use crate::amplitude::ComplexAmp;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Exact,
    Limit,
}

/// Table entry for `region` after `j_a` hits on barrier A and `j_b` hits on
/// barrier B. `j_b` is ignored for the Alice region and must be at least 1
/// for the channel.
pub fn closed_form_amplitude(
    region: Region,
    logic: Logic,
    j_a: u32,
    j_b: u32,
    eps_a: f64,
    eps_b: f64,
    form: Form,
) -> Result<ComplexAmp> {
    if !(eps_a.is_finite() && eps_b.is_finite()) {
        return Err(Error::InvalidArgument("angles must be finite".into()));
    }
    if region == Region::Channel && j_b == 0 {
        return Err(Error::InvalidArgument(
            "channel amplitudes are labelled by j_B ≥ 1".into(),
        ));
    }
    let ja = f64::from(j_a);
    let jb = f64::from(j_b);
    let powi = |x: f64, n: u32| x.powi(n as i32);

    let amp = match (logic, region, form) {
        (Logic::Open, Region::Alice, _) => ComplexAmp::real((ja * eps_a).cos()),
        (Logic::Open, Region::Between, Form::Exact) => ComplexAmp::imag((ja * eps_a).sin() * powi(eps_b.cos(), j_b)),
        (Logic::Open, Region::Between, Form::Limit) => ComplexAmp::imag((ja * eps_a).sin()),
        (Logic::Open, Region::Channel, Form::Exact) => {
            // i sin(j_A ε_A) cos^{j_B-1}(ε_B) · i sin ε_B
            ComplexAmp::real(-(ja * eps_a).sin() * powi(eps_b.cos(), j_b - 1) * eps_b.sin())
        }
        (Logic::Open, Region::Channel, Form::Limit) => ComplexAmp::real(-eps_b * (ja * eps_a).sin()),
        (Logic::Mirrored, Region::Alice, Form::Exact) => ComplexAmp::real(powi(eps_a.cos(), j_a)),
        (Logic::Mirrored, Region::Alice, Form::Limit) => ComplexAmp::ONE,
        (Logic::Mirrored, Region::Between, Form::Exact) => {
            if j_a == 0 {
                ComplexAmp::ZERO
            } else {
                ComplexAmp::imag(powi(eps_a.cos(), j_a - 1) * eps_a.sin() * (jb * eps_b).cos())
            }
        }
        (Logic::Mirrored, Region::Between, Form::Limit) => {
            if j_a == 0 {
                ComplexAmp::ZERO
            } else {
                ComplexAmp::imag(eps_a * (jb * eps_b).cos())
            }
        }
        (Logic::Mirrored, Region::Channel, Form::Exact) => {
            if j_a == 0 {
                ComplexAmp::ZERO
            } else {
                // cos^{j_A-1}(ε_A) · i sin ε_A · i sin(j_B ε_B)
                ComplexAmp::real(-powi(eps_a.cos(), j_a - 1) * eps_a.sin() * (jb * eps_b).sin())
            }
        }
        (Logic::Mirrored, Region::Channel, Form::Limit) => {
            if j_a == 0 {
                ComplexAmp::ZERO
            } else {
                ComplexAmp::real(-eps_a * (jb * eps_b).sin())
            }
        }
    };
    Ok(amp)
}
