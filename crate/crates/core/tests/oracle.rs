mod common;

use common::{compare_with_oracle, oracle_protocol, FullUnitary};
use cqc_core::cavity::{closed_form_amplitude, Form, Region};
use cqc_core::{run_protocol, run_toy, ComplexAmp, Logic, ProtocolConfig};

#[test]
fn oracle_matrices_are_unitary() {
    for dim in [3usize, 5, 9] {
        for theta in [0.0, 0.1, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2] {
            let d = FullUnitary::beam_splitter(dim, 1, dim - 1, theta).to_dense();
            assert!(d.unitarity_defect() < 1e-15);
        }
        assert!(FullUnitary::swap(dim, 2, dim - 1).to_dense().unitarity_defect() < 1e-15);
    }
}

#[test]
fn dense_and_row_forms_of_the_oracle_agree() {
    for mirrored in [false, true] {
        for (n_a, n_b) in [(2, 2), (3, 4), (4, 5)] {
            let a = oracle_protocol(n_a, n_b, n_a, mirrored, false);
            let b = oracle_protocol(n_a, n_b, n_a, mirrored, true);
            for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
                assert!((x.alice - y.alice).norm() < 1e-15);
                assert!((x.inner - y.inner).norm() < 1e-15);
                assert!((x.channel - y.channel).norm() < 1e-15);
            }
            for (x, y) in a.escaped.iter().zip(&b.escaped) {
                assert!((x - y).norm() < 1e-15);
            }
        }
    }
}

#[test]
fn simulator_matches_oracle_on_a_moderate_grid() {
    for logic in [Logic::Open, Logic::Mirrored] {
        for (n_a, n_b) in [(1, 1), (2, 3), (5, 17), (12, 40), (3, 200)] {
            let worst = compare_with_oracle(n_a, n_b, logic);
            assert!(worst <= 1e-12, "{logic:?} ({n_a},{n_b}): {worst:e}");
        }
    }
}

#[test]
fn oracle_conserves_probability() {
    for mirrored in [false, true] {
        let run = oracle_protocol(6, 50, 6, mirrored, false);
        for s in &run.snapshots {
            assert!((s.total_probability - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn mirrored_run_matches_exact_table_entries() {
    let cfg = ProtocolConfig::new(20, 30, Logic::Mirrored).unwrap();
    let (ea, eb) = (cfg.epsilon_a(), cfg.epsilon_b());
    let trace = run_protocol(&cfg).unwrap();
    for s in trace.snapshots() {
        for region in [Region::Between, Region::Channel] {
            if region == Region::Channel && s.j_b == 0 {
                continue;
            }
            let expected = closed_form_amplitude(region, Logic::Mirrored, s.j_a, s.j_b, ea, eb, Form::Exact).unwrap();
            assert!(
                region.of(&s.state).dist(expected) < 1e-12,
                "{region:?} at ({}, {})",
                s.j_a,
                s.j_b
            );
        }
        let alice = closed_form_amplitude(Region::Alice, Logic::Mirrored, s.j_a, 0, ea, eb, Form::Exact).unwrap();
        assert!(s.state.alice.dist(alice) < 1e-12);
    }
}

#[test]
fn first_open_cycle_matches_exact_table_entries() {
    // Before any inner leftover flows back through A, the open-end entries are exact.
    let cfg = ProtocolConfig::new(30, 80, Logic::Open).unwrap();
    let (ea, eb) = (cfg.epsilon_a(), cfg.epsilon_b());
    let trace = run_protocol(&cfg).unwrap();
    let replay = trace.replay_cycle(1).unwrap();
    for s in &replay.snapshots {
        let between = closed_form_amplitude(Region::Between, Logic::Open, 1, s.j_b, ea, eb, Form::Exact).unwrap();
        assert!(s.state.inner.dist(between) < 1e-12);
    }
    for p in trace.channel_in_cycle(1).unwrap() {
        let expected =
            closed_form_amplitude(Region::Channel, Logic::Open, 1, p.j_b.unwrap(), ea, eb, Form::Exact).unwrap();
        assert!(p.amplitude.dist(expected) < 1e-12);
    }
}

#[test]
fn single_bounce_mirror_reduces_to_open_toy() {
    // n_B = 1 sends the whole inner packet past B; removing the mirror then
    // empties it, exactly as in the toy cavity with Bob's end open.
    for n_a in [5u32, 40, 100] {
        let cfg = ProtocolConfig::new(n_a, 1, Logic::Mirrored).unwrap();
        let full = run_protocol(&cfg).unwrap();
        let toy = run_toy(cfg.epsilon_a(), n_a, false).unwrap();
        for j in 0..=n_a {
            let expected = ComplexAmp::real(cfg.epsilon_a().cos().powi(j as i32));
            assert!(full.alice_after(j).unwrap().dist(expected) < 1e-12);
            assert!(full.alice_after(j).unwrap().dist(toy.alice_after(j).unwrap()) < 1e-12);
        }
        assert!((full.escaped_probability() - toy.escaped_probability()).abs() < 1e-12);
    }
}

#[test]
fn escaped_packets_stay_frozen() {
    // The oracle keeps every escaped slot inside the evolving vector; its
    // final values must equal the amplitudes at the moment of emission.
    let run = oracle_protocol(4, 25, 4, false, false);
    for (slot, emitted) in run.escaped.iter().zip(&run.channel) {
        assert_eq!(*slot, emitted.amplitude);
    }
}
