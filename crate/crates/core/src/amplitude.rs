//! Complex amplitudes and the two-mode barrier unitary.
//!
//! A thin barrier with angle `ε` reflects with amplitude `cos ε` and transmits
//! with amplitude `i sin ε`:
//!
//! ```text
//! U(ε) = | cos ε    i sin ε |
//!        | i sin ε  cos ε   |
//! ```
//!
//! The family is closed under composition, `U(a) U(b) = U(a + b)`, so `j`
//! consecutive hits on the same barrier act as a single rotation by `j ε`.
//! Reflections off closed cavity ends carry no extra phase here: every `-1`
//! that shows up in a run comes from composing rotations (`cos π = -1`).

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when comparing two evaluation routes of the same unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// A complex probability amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexAmp {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmp {
    pub const ZERO: ComplexAmp = ComplexAmp { re: 0.0, im: 0.0 };
    pub const ONE: ComplexAmp = ComplexAmp { re: 1.0, im: 0.0 };
    pub const I: ComplexAmp = ComplexAmp { re: 0.0, im: 1.0 };

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        ComplexAmp { re, im }
    }

    #[inline]
    pub const fn real(re: f64) -> Self {
        ComplexAmp { re, im: 0.0 }
    }

    #[inline]
    pub const fn imag(im: f64) -> Self {
        ComplexAmp { re: 0.0, im }
    }

    #[inline]
    pub fn conj(self) -> Self {
        ComplexAmp {
            re: self.re,
            im: -self.im,
        }
    }

    /// `|z|²`, the probability carried by this amplitude.
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    #[inline]
    pub fn scale(self, k: f64) -> Self {
        ComplexAmp {
            re: self.re * k,
            im: self.im * k,
        }
    }

    /// Multiplies by `i·k` without forming a full complex product.
    #[inline]
    pub fn mul_i(self, k: f64) -> Self {
        ComplexAmp {
            re: -self.im * k,
            im: self.re * k,
        }
    }

    /// `Re[conj(self) · other]`, the real part of the overlap `⟨self|other⟩`.
    #[inline]
    pub fn overlap_re(self, other: Self) -> f64 {
        self.re * other.re + self.im * other.im
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Largest componentwise distance, used by tolerance checks.
    pub fn dist(self, other: Self) -> f64 {
        (self.re - other.re).abs().max((self.im - other.im).abs())
    }
}

impl Add for ComplexAmp {
    type Output = ComplexAmp;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        ComplexAmp {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl AddAssign for ComplexAmp {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for ComplexAmp {
    type Output = ComplexAmp;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        ComplexAmp {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for ComplexAmp {
    type Output = ComplexAmp;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        ComplexAmp {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Mul<f64> for ComplexAmp {
    type Output = ComplexAmp;
    #[inline]
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl Neg for ComplexAmp {
    type Output = ComplexAmp;
    #[inline]
    fn neg(self) -> Self {
        ComplexAmp {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl fmt::Display for ComplexAmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        match f.precision() {
            Some(p) => write!(f, "{:.*}{}{:.*}i", p, self.re, sign, p, self.im.abs()),
            None => write!(f, "{}{}{}i", self.re, sign, self.im.abs()),
        }
    }
}

/// An ordered pair of mode amplitudes on either side of a barrier.
pub type ModePair = (ComplexAmp, ComplexAmp);

/// A physical barrier, `0 ≤ ε ≤ π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    epsilon: f64,
}

impl Barrier {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&epsilon) {
            return Err(Error::InvalidAngle(epsilon));
        }
        Ok(Barrier { epsilon })
    }

    /// Barrier with `ε = π / (2n)`, so that `n` hits make a quarter turn.
    pub fn quarter_turn_in(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("hit count n must be positive".into()));
        }
        Ok(Barrier {
            epsilon: FRAC_PI_2 / f64::from(n),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn transmission(&self) -> ComplexAmp {
        ComplexAmp::imag(self.epsilon.sin())
    }

    pub fn reflection(&self) -> ComplexAmp {
        ComplexAmp::real(self.epsilon.cos())
    }

    pub fn unitary(&self) -> BarrierUnitary {
        BarrierUnitary::rotation(self.epsilon)
    }
}

/// `U(θ)` for an arbitrary real angle; powers of a barrier leave `[0, π/2]`.
///
/// Alongside `cos θ` the versine `1 − cos θ` is kept to full relative
/// precision. Near-identity rotations apply the diagonal as `a − vers·a`,
/// which keeps `cos² + sin²` within ~1e-24 of one instead of the ~1e-16
/// bias of the rounded cosine; that bias otherwise accumulates over
/// millions of bounces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierUnitary {
    cos: f64,
    sin: f64,
    vers: f64,
}

impl BarrierUnitary {
    pub fn rotation(theta: f64) -> Self {
        let half = (0.5 * theta).sin();
        BarrierUnitary {
            cos: theta.cos(),
            sin: theta.sin(),
            vers: 2.0 * half * half,
        }
    }

    /// `U(j·θ)`, with the rounding error of the product `j·θ` carried into
    /// the angle so that large `j` does not lose the low bits of the phase.
    pub fn rotation_times(theta: f64, j: u32) -> Self {
        let jf = f64::from(j);
        let head = jf * theta;
        let tail = jf.mul_add(theta, -head);
        let base = Self::rotation(head);
        let (s, c) = (base.sin, base.cos);
        BarrierUnitary {
            cos: c - tail * s,
            sin: s + tail * c,
            vers: base.vers + tail * s,
        }
    }

    pub fn identity() -> Self {
        BarrierUnitary {
            cos: 1.0,
            sin: 0.0,
            vers: 0.0,
        }
    }

    #[inline]
    pub fn cos(&self) -> f64 {
        self.cos
    }

    #[inline]
    pub fn sin(&self) -> f64 {
        self.sin
    }

    #[inline]
    fn diagonal(&self, a: ComplexAmp) -> ComplexAmp {
        if self.vers < 0.5 {
            ComplexAmp::new((-self.vers).mul_add(a.re, a.re), (-self.vers).mul_add(a.im, a.im))
        } else {
            a.scale(self.cos)
        }
    }

    #[inline]
    pub fn apply(&self, (a, b): ModePair) -> ModePair {
        (
            self.diagonal(a) + b.mul_i(self.sin),
            a.mul_i(self.sin) + self.diagonal(b),
        )
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &BarrierUnitary) -> BarrierUnitary {
        // Both factors are symmetric with real diagonal c and imaginary
        // off-diagonal i·s; the product stays in the family.
        BarrierUnitary {
            cos: self.cos * other.cos - self.sin * other.sin,
            sin: self.sin * other.cos + self.cos * other.sin,
            vers: self.vers + other.vers - self.vers * other.vers + self.sin * other.sin,
        }
    }

    /// The four entries in row-major order.
    pub fn matrix(&self) -> [[ComplexAmp; 2]; 2] {
        let c = ComplexAmp::real(self.cos);
        let s = ComplexAmp::imag(self.sin);
        [[c, s], [s, c]]
    }
}

/// Passes a two-mode state through a barrier once.
pub fn apply_barrier(barrier: &Barrier, pair: ModePair) -> ModePair {
    barrier.unitary().apply(pair)
}

/// `U(ε)^j` applied to `pair`.
///
/// The returned value is the `j`-fold iteration. The single rotation `U(jε)`
/// is evaluated alongside it and the two are checked against each other.
pub fn barrier_power(barrier: &Barrier, j: u32, pair: ModePair) -> ModePair {
    let (iterated, discrepancy) = barrier_power_checked(barrier, j, pair);
    debug_assert!(
        discrepancy <= UNITARY_TOLERANCE * pair_scale(pair),
        "U(ε)^{j} and U({j}ε) disagree by {discrepancy:e}"
    );
    iterated
}

/// Like [`barrier_power`], but also reports the largest componentwise gap
/// between the iterated product and the single rotation by `j ε`.
pub fn barrier_power_checked(barrier: &Barrier, j: u32, pair: ModePair) -> (ModePair, f64) {
    let step = barrier.unitary();
    let mut iterated = pair;
    for _ in 0..j {
        iterated = step.apply(iterated);
    }
    let direct = BarrierUnitary::rotation_times(barrier.epsilon(), j).apply(pair);
    let gap = iterated.0.dist(direct.0).max(iterated.1.dist(direct.1));
    (iterated, gap)
}

/// `|a|² + |b|²`.
pub fn pair_norm_sqr((a, b): ModePair) -> f64 {
    a.norm_sqr() + b.norm_sqr()
}

fn pair_scale(pair: ModePair) -> f64 {
    pair_norm_sqr(pair).sqrt().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn close(a: ComplexAmp, b: ComplexAmp) -> bool {
        a.dist(b) <= 1e-12
    }

    #[test]
    fn quarter_turn_moves_everything_across() {
        let b = Barrier::new(FRAC_PI_2).unwrap();
        let (l, r) = apply_barrier(&b, (ComplexAmp::ONE, ComplexAmp::ZERO));
        assert!(close(l, ComplexAmp::ZERO));
        assert!(close(r, ComplexAmp::I));
    }

    #[test]
    fn zero_angle_is_identity() {
        let b = Barrier::new(0.0).unwrap();
        let pair = (ComplexAmp::new(0.3, -0.2), ComplexAmp::new(-1.5, 0.7));
        assert_eq!(apply_barrier(&b, pair), pair);
    }

    #[test]
    fn half_quarter_splits_evenly() {
        let b = Barrier::new(FRAC_PI_4).unwrap();
        let (l, r) = apply_barrier(&b, (ComplexAmp::ONE, ComplexAmp::ZERO));
        let h = 2f64.sqrt() / 2.0;
        assert!(close(l, ComplexAmp::real(h)));
        assert!(close(r, ComplexAmp::imag(h)));
        assert!((l.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_angles_outside_quarter_turn() {
        assert!(Barrier::new(-1e-9).is_err());
        assert!(Barrier::new(FRAC_PI_2 + 1e-9).is_err());
        assert!(Barrier::new(f64::NAN).is_err());
        assert!(Barrier::quarter_turn_in(0).is_err());
    }

    #[test]
    fn power_of_n_hits_reaches_far_side() {
        for n in [1u32, 2, 7, 50, 100, 1000] {
            let b = Barrier::quarter_turn_in(n).unwrap();
            let (l, r) = barrier_power(&b, n, (ComplexAmp::ONE, ComplexAmp::ZERO));
            assert!(close(l, ComplexAmp::ZERO), "n={n}: {l}");
            assert!(close(r, ComplexAmp::I), "n={n}: {r}");
        }
    }

    #[test]
    fn power_of_2n_hits_returns_with_sign_flip() {
        for n in [1u32, 3, 100, 5000] {
            let b = Barrier::quarter_turn_in(n).unwrap();
            let (l, r) = barrier_power(&b, 2 * n, (ComplexAmp::ONE, ComplexAmp::ZERO));
            assert!(close(l, -ComplexAmp::ONE), "n={n}: {l}");
            assert!(close(r, ComplexAmp::ZERO), "n={n}: {r}");
        }
    }

    #[test]
    fn empty_power_is_identity() {
        let b = Barrier::new(0.4).unwrap();
        let pair = (ComplexAmp::new(0.1, 0.2), ComplexAmp::new(0.3, 0.4));
        assert_eq!(barrier_power(&b, 0, pair), pair);
    }

    #[test]
    fn compose_adds_angles() {
        let u = BarrierUnitary::rotation(0.3).compose(&BarrierUnitary::rotation(1.1));
        let v = BarrierUnitary::rotation(1.4);
        assert!((u.cos() - v.cos()).abs() < 1e-15);
        assert!((u.sin() - v.sin()).abs() < 1e-15);
        let w = BarrierUnitary::rotation(PI).compose(&BarrierUnitary::identity());
        assert!((w.cos() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn display_formats_sign() {
        assert_eq!(format!("{:.2}", ComplexAmp::new(1.0, -0.5)), "1.00-0.50i");
        assert_eq!(format!("{}", ComplexAmp::new(0.0, 2.0)), "0+2i");
    }
}
