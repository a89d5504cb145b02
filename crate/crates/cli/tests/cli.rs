use std::f64::consts::PI;
use std::process::Command as Process;

use cqc_cli::report::{render, ExpectationReport, ProtocolReport, RiemannReport, SweepReport};
use cqc_cli::{parse_invocation, Command, Format};
use cqc_core::cavity::TraceDocument;
use cqc_core::modular::MirrorRun;
use cqc_core::{FluxSeries, Logic, SimTrace};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn cqc(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_cqc")).args(args).output().unwrap()
}

fn rendered(args: &[&str]) -> String {
    let inv = parse_invocation(args).unwrap();
    render(&inv.command, inv.format).unwrap()
}

/// Parses JSON output into `T` and checks that re-serializing reproduces it.
fn round_trip<T: Serialize + DeserializeOwned>(args: &[&str]) -> T {
    let text = rendered(args);
    let value: T = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
    assert_eq!(again, text, "{args:?}");
    value
}

#[test]
fn protocol_flags_map_directly() {
    let inv = parse_invocation(["protocol", "--n-a", "50", "--n-b", "5000", "--logic", "0"]).unwrap();
    match inv.command {
        Command::Protocol { config, snapshots } => {
            assert_eq!(
                (config.n_a, config.n_b, config.cycles, config.logic),
                (50, 5000, 50, Logic::Open)
            );
            assert!(!snapshots);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(inv.format, Format::Text);
    assert!(inv.out.is_none());
}

#[test]
fn expectation_defaults() {
    let inv = parse_invocation(["expectation"]).unwrap();
    match inv.command {
        Command::Expectation(cfg) => assert_eq!((cfg.n_a, cfg.n_b, cfg.cycles), (100, 10_000, 100)),
        other => panic!("{other:?}"),
    }
    let mirror = parse_invocation(["mirror", "--n-a", "30"]).unwrap();
    assert!(matches!(mirror.command, Command::Mirror(cfg) if cfg.cycles == 60));
    let toy = parse_invocation(["toy", "--logic", "mirror"]).unwrap();
    assert!(matches!(
        toy.command,
        Command::Toy {
            n_a: 100,
            laps: 100,
            mirror: true
        }
    ));
}

#[test]
fn usage_errors_name_the_flag_and_exit_2() {
    let err = parse_invocation(["protocol", "--n-a", "0"]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("--n-a"));
    for args in [
        &["protocol", "--n-a", "0"][..],
        &["teleport"],
        &["expectation", "--bogus"],
        &["protocol", "--logic", "2"],
        &["sweep", "--target", "nope"],
        &["mirror", "--cycles", "0"],
    ] {
        let out = cqc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn simulation_rejection_exits_2() {
    let out = cqc(&["sweep", "--pairs", "20:2000,50:10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
}

#[test]
fn unwritable_output_exits_3() {
    let out = cqc(&["riemann", "--out", "/nonexistent-dir/x.csv", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_file_receives_the_rendering() {
    let dir = std::env::temp_dir().join(format!("cqc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let out = cqc(&[
        "riemann",
        "--n",
        "10",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, rendered(&["riemann", "--n", "10", "--format", "json"]));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn default_expectation_run_succeeds() {
    let out = cqc(&["expectation"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let total_line = text.lines().find(|l| l.starts_with("total")).unwrap();
    let total: f64 = total_line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((total - 1.0).abs() <= 0.05);
    assert!(text.contains("cos(N eps_A)"));
    assert!(text.contains("1 - cos(N eps_A)"));
}

#[test]
fn riemann_csv_is_one_row() {
    let csv = rendered(&["riemann", "--n", "1000", "--format", "csv"]);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines, ["n,value,deviation", lines[1]]);
    let fields: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    // Σ sin(ja) = sin(na/2) sin((n+1)a/2) / sin(a/2)
    let a = PI / 2000.0;
    let closed = a * (500.0 * a).sin() * (500.5 * a).sin() / (0.5 * a).sin();
    assert_eq!(fields[0], 1000.0);
    assert!((fields[1] - closed).abs() < 1e-12);
    assert_eq!(fields[2], fields[1] - 1.0);
}

#[test]
fn flux_csv_has_one_monotone_row_per_cycle() {
    let csv = rendered(&["flux", "--format", "csv"]);
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 100);
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1]);
    }
}

#[test]
fn json_round_trips_into_module_types() {
    let toy: TraceDocument = round_trip(&["toy", "--n-a", "20", "--format", "json"]);
    SimTrace::from_document(&toy).unwrap();
    let snaps: TraceDocument = round_trip(&[
        "protocol",
        "--n-a",
        "4",
        "--n-b",
        "9",
        "--snapshots",
        "--format",
        "json",
    ]);
    SimTrace::from_document(&snaps).unwrap();
    let protocol: ProtocolReport = round_trip(&["protocol", "--n-a", "20", "--n-b", "400", "--format", "json"]);
    assert_eq!(protocol.cycles.len(), 21);
    assert_eq!(protocol.decoded_bit, Some(0));
    let _: ExpectationReport = round_trip(&["expectation", "--n-a", "20", "--n-b", "400", "--format", "json"]);
    let flux: FluxSeries = round_trip(&["flux", "--n-a", "20", "--n-b", "400", "--format", "json"]);
    assert_eq!(flux.records.len(), 20);
    let mirror: MirrorRun = round_trip(&["mirror", "--n-a", "20", "--n-b", "400", "--format", "json"]);
    assert_eq!(mirror.exchange_series.len(), 41);
    let _: RiemannReport = round_trip(&["riemann", "--n", "7", "--format", "json"]);
    let sweep: SweepReport = round_trip(&[
        "sweep",
        "--pairs",
        "20:400,40:1600",
        "--target",
        "channel_contrib",
        "--format",
        "json",
    ]);
    assert_eq!(sweep.table.rows.len(), 2);
}

fn numbers(line: &str) -> Vec<f64> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter_map(|t| t.parse().ok())
        .collect()
}

#[test]
fn formats_agree_on_values() {
    let args = ["expectation", "--n-a", "40", "--n-b", "4000"];
    let with = |f: &str| rendered(&[&args[..], &["--format", f]].concat());
    let json: ExpectationReport = serde_json::from_str(&with("json")).unwrap();
    let d = json.decomposition;
    let expected = [d.alice_contrib, d.between_contrib, d.channel_contrib, d.total];

    // CSV carries 17 significant digits: exact after re-parse.
    let csv = with("csv");
    let measured = numbers(csv.lines().nth(1).unwrap());
    assert_eq!(measured, expected);

    // Text carries 6 significant digits.
    let text = with("text");
    for (line, want) in text.lines().skip(2).zip(expected) {
        let got = numbers(line)[0];
        assert!((got - want).abs() <= 5e-6 * want.abs().max(1e-300), "{line}: {want}");
    }
}

#[test]
fn sweep_text_labels_order_as_empirical() {
    let text = rendered(&["sweep", "--target", "riemann_sum", "--pairs", "10:10,100:100,1000:1000"]);
    assert!(text.contains("empirical order 0.99"), "{text}");
}
