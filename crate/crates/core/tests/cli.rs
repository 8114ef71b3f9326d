use std::process::Command;

use rkhs_sandwich::report::{exit_code, Payload, Report};

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sandwich")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn decide_exit_codes() {
    let (c, out) = run(&["decide", "--from", "lp:1", "--to", "lp:inf"]);
    assert_eq!(c, 0);
    let r = Report::from_json(&out).unwrap();
    assert!(matches!(r.payload, Payload::Decide { .. }));
    assert_eq!(r.exit_code(), 0);

    let (c, _) = run(&["decide", "--from", "lp:3", "--to", "lp:4"]);
    assert_eq!(c, 10);
    let (c, _) = run(&["decide", "--from", "holder:1", "--to", "sup", "--domain", "cube:3"]);
    assert_eq!(c, 10);
    let (c, out) = run(&["decide", "--from", "holder:1", "--to", "sup", "--domain", "cube:1", "--summary"]);
    assert_eq!(c, 0, "{out}");
    assert!(out.starts_with("feasible"));
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(run(&["decide", "--from", "lp:1"]).0, 64);
    assert_eq!(run(&["nonsense"]).0, 64);
    assert_eq!(run(&["decide", "--from", "bogus:1", "--to", "lp:2"]).0, 64);
    // Reversed pair: lp:4 does not sit inside lp:2.
    assert_eq!(run(&["decide", "--from", "lp:4", "--to", "lp:2"]).0, 65);
    // Scans need an infeasible pair.
    assert_eq!(run(&["scan", "--from", "lp:1", "--to", "lp:inf"]).0, 65);
}

#[test]
fn scan_reports_series() {
    let (c, out) = run(&["scan", "--from", "lp:3", "--to", "lp:4", "--ns", "4,8,16"]);
    assert_eq!(c, 0);
    let r = Report::from_json(&out).unwrap();
    let Payload::Scan { series } = r.payload else { panic!("not a scan") };
    assert!((series.slope - 1.0 / 6.0).abs() < 1e-3, "{}", series.slope);
    assert!(r.seed.is_some());
}

#[test]
fn table_cells_follow_exit_contract() {
    let (c, out) = run(&["table", "--grid", "lp"]);
    assert_eq!(c, 0);
    let Payload::Table { table } = Report::from_json(&out).unwrap().payload else { panic!("not a table") };
    assert_eq!(table.cells.len(), 25);
    for cell in table.cells.iter().filter(|c| c.status.is_some()) {
        let (code, _) = run(&["decide", "--from", &cell.from, "--to", &cell.to]);
        assert_eq!(code, exit_code(cell.status.unwrap()), "{} -> {}", cell.from, cell.to);
    }
}

#[test]
fn irkbs_verdicts() {
    let (c, out) = run(&["irkbs", "--series", "cos", "--domain-radius", "1"]);
    assert_eq!(c, 0);
    assert!(out.contains("yes-bounded-kernels"), "{out}");
    let (_, out) = run(&["irkbs", "--series", "cos"]);
    assert!(out.contains("conditional"), "{out}");
    let (_, out) = run(&["irkbs", "--series", "exp"]);
    assert!(out.contains("\"no\""), "{out}");
    assert_eq!(run(&["irkbs", "--coefficients", "1,x"]).0, 64);
}

#[test]
fn packing_fit() {
    let (c, out) = run(&["packing", "--domain", "cube:2"]);
    assert_eq!(c, 0);
    let Payload::Packing { fit, .. } = Report::from_json(&out).unwrap().payload else { panic!("not packing") };
    assert!((fit.unwrap().slope - 2.0).abs() < 0.3);
}
