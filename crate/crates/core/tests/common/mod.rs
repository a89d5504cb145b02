//! Brute-force reference evolution for the two-barrier protocol.
//!
//! The whole system lives in one state vector over the modes
//! `[alice, inner, channel, slot_0, slot_1, ...]`, one slot per packet that
//! will ever leave the cavity. Every elementary event is an explicit
//! full-size unitary applied to the whole vector. Nothing here uses the
//! library's amplitude arithmetic.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

pub const ALICE: usize = 0;
pub const INNER: usize = 1;
pub const CHANNEL: usize = 2;
pub const FIRST_SLOT: usize = 3;

/// A full-size matrix in which every row has at most two nonzero entries,
/// stored row by row. Untouched modes get identity rows.
#[derive(Debug, Clone)]
pub struct FullUnitary {
    rows: Vec<[(usize, Complex64); 2]>,
}

impl FullUnitary {
    pub fn identity(dim: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        FullUnitary {
            rows: (0..dim).map(|i| [(i, one), (i, zero)]).collect(),
        }
    }

    /// `U(θ)` acting on modes `p` and `q`, identity elsewhere.
    pub fn beam_splitter(dim: usize, p: usize, q: usize, theta: f64) -> Self {
        let mut u = Self::identity(dim);
        let c = Complex64::new(theta.cos(), 0.0);
        let s = Complex64::new(0.0, theta.sin());
        u.rows[p] = [(p, c), (q, s)];
        u.rows[q] = [(p, s), (q, c)];
        u
    }

    /// Exchanges modes `p` and `q`.
    pub fn swap(dim: usize, p: usize, q: usize) -> Self {
        let mut u = Self::identity(dim);
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        u.rows[p] = [(q, one), (q, zero)];
        u.rows[q] = [(p, one), (p, zero)];
        u
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.rows.len());
        self.rows
            .iter()
            .map(|[(c0, a0), (c1, a1)]| a0 * v[*c0] + a1 * v[*c1])
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, a) in row {
                m.data[i][*j] += a;
            }
        }
        m
    }
}

/// A plain dense complex matrix, for small cross-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub data: Vec<Vec<Complex64>>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            data: vec![vec![Complex64::new(0.0, 0.0); n]; n],
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Largest entry of `|M†M − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.data.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.data[k][i].conj() * self.data[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

/// One recorded instant of the reference evolution.
#[derive(Debug, Clone)]
pub struct OracleSnapshot {
    pub j_a: u32,
    pub j_b: u32,
    pub alice: Complex64,
    pub inner: Complex64,
    pub channel: Complex64,
    pub total_probability: f64,
}

/// A packet recorded when it reaches the far side of barrier B.
#[derive(Debug, Clone)]
pub struct OracleChannel {
    pub j_a: u32,
    pub j_b: u32,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub snapshots: Vec<OracleSnapshot>,
    /// Channel amplitude at every `(j_A, j_B)` label.
    pub channel: Vec<OracleChannel>,
    /// Final amplitudes of the escape slots, in emission order.
    pub escaped: Vec<Complex64>,
    pub final_alice: Vec<Complex64>,
}

/// Evolves the protocol with explicit full-size unitaries.
///
/// `mirrored = false` is Bob's open end (logic 0), `true` the mirror (logic 1).
/// With `dense = true` every unitary is expanded to a dense matrix first.
pub fn oracle_protocol(n_a: u32, n_b: u32, cycles: u32, mirrored: bool, dense: bool) -> OracleRun {
    let eps_a = FRAC_PI_2 / n_a as f64;
    let eps_b = FRAC_PI_2 / n_b as f64;
    let slots = if mirrored {
        cycles as usize
    } else {
        cycles as usize * n_b as usize
    };
    let dim = FIRST_SLOT + slots;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[ALICE] = Complex64::new(1.0, 0.0);

    let step = |u: FullUnitary, psi: &[Complex64]| -> Vec<Complex64> {
        if dense {
            u.to_dense().apply(psi)
        } else {
            u.apply(psi)
        }
    };

    let mut next_slot = FIRST_SLOT;
    let mut snapshots = Vec::new();
    let mut channel = Vec::new();
    let mut final_alice = vec![psi[ALICE]];

    let record = |psi: &[Complex64], j_a: u32, j_b: u32| OracleSnapshot {
        j_a,
        j_b,
        alice: psi[ALICE],
        inner: psi[INNER],
        channel: psi[CHANNEL],
        total_probability: psi.iter().map(|z| z.norm_sqr()).sum(),
    };

    for j_a in 1..=cycles {
        psi = step(FullUnitary::beam_splitter(dim, ALICE, INNER, eps_a), &psi);
        snapshots.push(record(&psi, j_a, 0));
        for j_b in 1..=n_b {
            if mirrored {
                psi = step(FullUnitary::beam_splitter(dim, INNER, CHANNEL, eps_b), &psi);
                channel.push(OracleChannel {
                    j_a,
                    j_b,
                    amplitude: psi[CHANNEL],
                });
            } else {
                let slot = next_slot;
                next_slot += 1;
                psi = step(FullUnitary::beam_splitter(dim, INNER, slot, eps_b), &psi);
                channel.push(OracleChannel {
                    j_a,
                    j_b,
                    amplitude: psi[slot],
                });
            }
            snapshots.push(record(&psi, j_a, j_b));
        }
        if mirrored {
            let slot = next_slot;
            next_slot += 1;
            psi = step(FullUnitary::swap(dim, CHANNEL, slot), &psi);
        }
        final_alice.push(psi[ALICE]);
    }
    assert_eq!(next_slot, dim);

    OracleRun {
        snapshots,
        channel,
        escaped: psi[FIRST_SLOT..].to_vec(),
        final_alice,
    }
}

pub fn amp_dist(a: cqc_core::ComplexAmp, b: Complex64) -> f64 {
    (a.re - b.re).abs().max((a.im - b.im).abs())
}

/// Largest deviation between the library run and the oracle over every
/// snapshot, channel label and ledger entry.
pub fn compare_with_oracle(n_a: u32, n_b: u32, logic: cqc_core::Logic) -> f64 {
    use cqc_core::cavity::PacketStatus;

    let cfg = cqc_core::ProtocolConfig::new(n_a, n_b, logic).unwrap();
    let trace = cqc_core::run_protocol(&cfg).unwrap();
    let oracle = oracle_protocol(n_a, n_b, cfg.cycles, logic == cqc_core::Logic::Mirrored, false);

    let mut worst = 0.0f64;
    let mut count = 0usize;
    for (s, o) in trace.snapshots().zip(&oracle.snapshots) {
        assert_eq!((s.j_a, s.j_b), (o.j_a, o.j_b));
        worst = worst
            .max(amp_dist(s.state.alice, o.alice))
            .max(amp_dist(s.state.inner, o.inner))
            .max(amp_dist(s.state.channel, o.channel))
            .max((s.total_probability() - o.total_probability).abs());
        count += 1;
    }
    assert_eq!(count, oracle.snapshots.len());

    let channel: Vec<_> = trace.channel_records().collect();
    assert_eq!(channel.len(), oracle.channel.len());
    for (p, o) in channel.iter().zip(&oracle.channel) {
        assert_eq!((p.j_a, p.j_b), (o.j_a, Some(o.j_b)));
        worst = worst.max(amp_dist(p.amplitude, o.amplitude));
    }

    let ledger: Vec<_> = trace.ledger().collect();
    assert_eq!(ledger.len(), oracle.escaped.len());
    for (p, o) in ledger.iter().zip(&oracle.escaped) {
        assert_eq!(p.status, PacketStatus::Escaped);
        worst = worst.max(amp_dist(p.amplitude, *o));
    }
    worst
}
