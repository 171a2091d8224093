use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fbva_core::scenario::{CheckStatus, XvaReport};
use fbva_core::Error;

const BIN: &str = env!("CARGO_BIN_EXE_fbva");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn fbva(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn json_report(args: &[&str]) -> (String, XvaReport) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = fbva(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&text).unwrap();
    (text, report)
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn basis_with(cds: f64, asw: f64) -> String {
    format!(
        r#"{{
  "grid": {{ "start": 0.0, "end": 3.0, "step": 0.5 }},
  "discount_curve": {{ "flat_rate": 0.02 }},
  "party_a": {{ "name": "A", "recovery": 0.4, "cds_spread": {cds}, "asw_spread": {asw} }},
  "party_b": {{ "name": "B", "recovery": 0.4, "cds_spread": 0.01, "asw_spread": 0.01 }},
  "copula_rho": 0.2,
  "product": {{ "type": "deterministic_profile", "values": [100, 100, 100, 100, 100, 100, 100] }},
  "n_paths": 40000,
  "seed": 99
}}"#
    )
}

#[test]
fn reference_scenario_reproduces_hand_values() {
    let s = fixture("reference_single_period.json");
    let (_, r) = json_report(&["--scenario", s.to_str().unwrap()]);
    let exact = 0.6 * -(-0.05f64).exp_m1() * 100.0;
    assert!((r.bcva.value - exact).abs() < 3.0 * r.bcva.std_error);
    let f = &r.fair_spreads.a;
    assert!((f.spread - exact / 100.0).abs() < 3.0 * f.std_error);
    assert_eq!(r.identity.status, CheckStatus::Passed);
    assert_eq!(r.identity.n_paths_checked, 100_000);
    assert!(r.metadata.elapsed_seconds.is_none());
}

#[test]
fn reports_are_byte_identical_across_runs_and_workers() {
    let s = fixture("forward_5y.json");
    let s = s.to_str().unwrap();
    for format in ["json", "csv", "text"] {
        let base = fbva(&["--scenario", s, "--paths", "4000", "--format", format]).stdout;
        assert!(!base.is_empty());
        for workers in ["1", "4", "16"] {
            let again = fbva(&["--scenario", s, "--paths", "4000", "--format", format, "--workers", workers]).stdout;
            assert_eq!(base, again, "{format} at {workers} workers");
        }
    }
    let other_seed = fbva(&["--scenario", s, "--paths", "4000", "--seed", "2"]).stdout;
    let base = fbva(&["--scenario", s, "--paths", "4000"]).stdout;
    assert_ne!(base, other_seed);
}

#[test]
fn json_round_trips_and_text_names_the_headline_rows() {
    let s = fixture("basis_120_90.json");
    let s = s.to_str().unwrap();
    let (text, report) = json_report(&["--scenario", s, "--paths", "5000"]);
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);

    let table = String::from_utf8(fbva(&["--scenario", s, "--paths", "5000"]).stdout).unwrap();
    for row in [" BVA ", " FBVA ", " F_A ", " F_B "] {
        assert!(table.contains(row), "missing {row}");
    }
    let csv = String::from_utf8(fbva(&["--scenario", s, "--paths", "5000", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("section,metric,value,std_error\n"));
    assert!(csv.contains("\nadjustment,FBVA,"));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let s = fixture("riskless.json");
    let out = dir.path().join("report.json");
    let status = fbva(&["--scenario", s.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let (printed, _) = json_report(&["--scenario", s.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), printed);

    let bad = fbva(&["--scenario", s.to_str().unwrap(), "--out", "/nonexistent-dir/report.txt"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn riskless_parties_have_no_adjustments() {
    let s = fixture("riskless.json");
    let (_, r) = json_report(&["--scenario", s.to_str().unwrap()]);
    for a in r.adjustments() {
        assert_eq!(a.value, 0.0, "{}", a.kind.label());
    }
    assert_eq!(r.fair_spreads.a.spread, 0.0);
    assert_eq!(r.fair_spreads.b.spread, 0.0);
    // survival ledgers net to zero up to rounding
    assert!(r.identity.max_residual_ratio < 1.0);
    assert!(r.identity.max_residual < 1e-12 * 100.0);
    assert_eq!(r.risky_value, r.risk_free_value);
}

#[test]
fn equal_sources_give_zero_basis_and_lower_asset_swap_spreads_a_positive_one() {
    let dir = tempfile::tempdir().unwrap();
    let same = write_scenario(dir.path(), "same.json", &basis_with(0.012, 0.012));
    let (_, r) = json_report(&["--scenario", same.to_str().unwrap()]);
    assert_eq!(r.basis.fbva_minus_bva, 0.0);
    assert_eq!(r.fbcva.value, r.bcva.value);

    let basis = write_scenario(dir.path(), "basis.json", &basis_with(0.012, 0.009));
    let (_, r) = json_report(&["--scenario", basis.to_str().unwrap(), "--oracle-check"]);
    assert!(r.fbcva.value < r.bcva.value);
    assert!(r.warnings.is_empty());
    let oracle = r.oracle.expect("deterministic exposure has oracles");
    assert_eq!(oracle.len(), 5);
    for e in &oracle {
        assert!(e.deviation_in_se.abs() < 4.0, "{:?}", e);
    }
}

#[test]
fn negative_basis_is_accepted_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), "neg.json", &basis_with(0.009, 0.012));
    let (_, r) = json_report(&["--scenario", p.to_str().unwrap(), "--paths", "1000"]);
    assert_eq!(r.warnings.len(), 1);
    assert!(r.warnings[0].contains("party_a"));
}

#[test]
fn ledger_dump_lists_both_loans_of_every_path() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("ledgers.csv");
    let s = fixture("reference_single_period.json");
    let out = fbva(&["--scenario", s.to_str().unwrap(), "--paths", "50", "--dump-ledgers", dump.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dump).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,amount,tag,path_id"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 4));
    let draws = rows.iter().filter(|r| r[2] == "initial_draw").count();
    assert_eq!(draws, 100);
    let ids: std::collections::BTreeSet<u64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(ids.len(), 50);
    assert!(rows.iter().any(|r| r[2] == "recovery_A"));
}

#[test]
fn oracle_check_prints_deviations() {
    let s = fixture("reference_single_period.json");
    let out = fbva(&["--scenario", s.to_str().unwrap(), "--oracle-check", "--paths", "20000"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().filter(|l| l.starts_with("oracle ")).count(), 5);
    assert!(err.contains("deviation"));
}

#[test]
fn config_errors_exit_with_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (basis_with(0.012, 0.009).replace("\"end\": 3.0", "\"end\": 0.0"), "grid"),
        (basis_with(-0.01, 0.009), "party_a.cds_spread"),
        (basis_with(0.012, 0.009).replace("\"copula_rho\": 0.2", "\"copula_rho\": 1.5"), "copula_rho"),
        (basis_with(0.012, 0.009).replace("\"n_paths\": 40000,", ""), "n_paths"),
        (basis_with(0.012, 0.009).replace("100, 100, 100]", "100]"), "product"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let p = write_scenario(dir.path(), &format!("bad{i}.json"), text);
        let out = fbva(&["--scenario", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "case {field}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(field), "case {field}: {err}");
    }
    let missing = fbva(&["--scenario", "/no/such/file.json"]);
    assert_eq!(missing.status.code(), Some(1));
    let s = fixture("riskless.json");
    let bad_format = fbva(&["--scenario", s.to_str().unwrap(), "--format", "xml"]);
    assert_eq!(bad_format.status.code(), Some(1));
    let zero = fbva(&["--scenario", s.to_str().unwrap(), "--paths", "0"]);
    assert_eq!(zero.status.code(), Some(1));
}

#[test]
fn exit_codes_separate_config_identity_and_numerical_failures() {
    let identity = Error::IdentityViolation {
        path_id: 3,
        residual: 1.0,
        tolerance: 1e-12,
    };
    assert_eq!(identity.exit_code(), 2);
    assert_eq!(Error::InfeasibleSpread { adjustment: 1.0 }.exit_code(), 3);
    assert_eq!(Error::Numerical("x".into()).exit_code(), 3);
    assert_eq!(Error::Domain("x".into()).exit_code(), 1);
}
