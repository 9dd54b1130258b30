use std::fs;
use std::path::Path;

use tourney_cli::{run, CommandResult};

fn tourney(args: &[&str]) -> CommandResult {
    run(std::iter::once("tourney").chain(args.iter().copied()))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn eval_pagerank_on_superman_kryptonite() {
    let dir = tempfile::tempdir().unwrap();
    let sk4 = path(dir.path(), "sk4.txt");
    let made = tourney(&[
        "construct",
        "--family",
        "superman_kryptonite",
        "--param",
        "4",
        "--out",
        &sk4,
    ]);
    assert_eq!(made.exit_code, 0);
    assert_eq!(fs::read_to_string(&sk4).unwrap(), made.report);

    let r = tourney(&["eval", "--rule", "PR", "--tournament", &sk4]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.report.trim(), "4/13 3/13 2/13 4/13");
}

#[test]
fn lp_below_threshold_is_infeasible_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = path(dir.path(), "cert.txt");
    let r = tourney(&["lp", "--n", "3", "--lambda", "9/10", "--out", &cert]);
    assert_eq!(r.exit_code, 1);
    assert!(r.report.contains("INFEASIBLE"));
    assert!(!fs::read_to_string(&cert).unwrap().trim().is_empty());
}

#[test]
fn scan_reports_rseb_slack() {
    let r = tourney(&["scan", "--rule", "RSEB", "--n", "3", "--lambda", "0"]);
    assert_eq!(r.exit_code, 0);
    let mut lines = r.report.lines();
    assert_eq!(lines.next(), Some("alpha = 1/3"));
    assert!(lines.next().unwrap().starts_with("witness: tournament 3:"));
}

#[test]
fn lp_tables_round_trip_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    for (n, symmetric) in [("3", false), ("4", true)] {
        let table = path(dir.path(), &format!("table{n}.txt"));
        let mut args = vec!["lp", "--n", n, "--lambda", "1", "--out", &table];
        if symmetric {
            args.push("--symmetric");
        }
        let solved = tourney(&args);
        assert_eq!(solved.exit_code, 0, "{}", solved.report);
        assert!(solved.report.contains("FEASIBLE"));

        let checked = tourney(&["verify-table", "--table", &table]);
        assert_eq!(checked.exit_code, 0, "{}", checked.report);
        assert_eq!(checked.report.lines().count(), 4);

        // A smaller λ than the table was built for is detected.
        let strict = tourney(&["verify-table", "--table", &table, "--lambda", "1/2"]);
        assert_eq!(strict.exit_code, 1, "{}", strict.report);
        assert!(strict.report.contains("witness"));
    }
}

#[test]
fn table_scans_agree_with_rule_scans() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "t.txt");
    assert_eq!(
        tourney(&["lp", "--n", "3", "--lambda", "1", "--out", &table]).exit_code,
        0
    );
    let scan = tourney(&["scan", "--table", &table, "--lambda", "1"]);
    assert_eq!(scan.exit_code, 0);
    assert!(scan.report.starts_with("alpha = 0"));
    let fair = tourney(&["fairness", "--table", &table]);
    assert_eq!(fair.exit_code, 0, "{}", fair.report);
    assert_eq!(tourney(&["monotone", "--table", &table]).exit_code, 0);
}

#[test]
fn witnesses_replay_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let r = tourney(&["min-lambda", "--rule", "TCR", "--n", "4"]);
    assert_eq!(r.exit_code, 0);
    assert!(r.report.starts_with("min_lambda = 2\n"));
    let compact = r
        .report
        .split_whitespace()
        .skip_while(|w| *w != "tournament")
        .nth(1)
        .unwrap();
    let file = path(dir.path(), "w.txt");
    fs::write(&file, compact).unwrap();
    let before = tourney(&["eval", "--rule", "TCR", "--tournament", &file]);
    assert_eq!(before.exit_code, 0);
    assert_eq!(before.report.split_whitespace().count(), 4);
}

#[test]
fn failing_properties_exit_one_with_witness() {
    let r = tourney(&["pnm", "--rule", "RSEB", "--n", "4"]);
    assert_eq!(r.exit_code, 1);
    assert!(r.report.contains("fails; witness tournament"));
    let r = tourney(&[
        "fairness",
        "--rule",
        "ICR",
        "--n",
        "4",
        "--property",
        "cover",
    ]);
    assert_eq!(r.exit_code, 1);
    let r = tourney(&["monotone", "--rule", "RDM", "--n", "4"]);
    assert_eq!(r.exit_code, 0);
}

#[test]
fn probe_forces_the_three_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = path(dir.path(), "c3.txt");
    fs::write(&cycle, "3\n010\n001\n100\n").unwrap();
    let r = tourney(&["probe", "--n", "3", "--lambda", "1", "--tournament", &cycle]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.report.matches("min 1/3 max 1/3 forced").count(), 3);
    let r = tourney(&["probe", "--n", "3", "--lambda", "0", "--tournament", &cycle]);
    assert_eq!(r.exit_code, 1);
}

#[test]
fn bounds_csv_matches() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "bounds.csv");
    let r = tourney(&["bounds", "--alpha", "1/10", "--out", &csv]);
    assert_eq!(r.exit_code, 0, "{}", r.report);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("rule,family,n,quantity,oracle,implementation,match"));
    assert!(!text.contains(",false"));
    let r = tourney(&["bounds", "--rule", "RSEB", "--n", "8"]);
    assert_eq!(r.report.trim(), "alpha >= 1/7");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["eval", "--rule", "PR", "--bogus"],
        vec!["eval", "--rule", "XYZ", "--family", "rkoth_gadget"],
        vec!["scan", "--rule", "RSEB", "--n", "3", "--lambda", "0.5"],
        vec!["mc", "--rule", "PR", "--family", "rkoth_gadget"],
        vec!["eval", "--rule", "PR", "--tournament", "/nonexistent/file"],
        vec!["lp", "--n", "9", "--lambda", "1"],
    ] {
        let r = tourney(&args);
        assert_eq!(r.exit_code, 2, "{args:?}: {}", r.report);
        assert!(!r.report.is_empty());
    }
    assert!(tourney(&["frobnicate"]).report.contains("Usage"));
    assert_eq!(tourney(&["--help"]).exit_code, 0);
}

#[test]
fn seeded_runs_are_reproducible_across_thread_counts() {
    let args = |threads: &'static str| {
        tourney(&[
            "--threads",
            threads,
            "mc",
            "--rule",
            "RDM",
            "--family",
            "rkoth_gadget",
            "--seed",
            "7",
            "--trials",
            "200000",
        ])
    };
    let one = args("1");
    assert_eq!(one.exit_code, 0, "{}", one.report);
    assert_eq!(one, args("4"));
    assert_ne!(
        one.report,
        tourney(&[
            "mc",
            "--rule",
            "RDM",
            "--family",
            "rkoth_gadget",
            "--seed",
            "8",
            "--trials",
            "200000"
        ])
        .report
    );

    let a = tourney(&["--threads", "1", "reproduce", "--n", "3"]);
    assert_eq!(a.exit_code, 0, "{}", a.report);
    assert_eq!(a, tourney(&["--threads", "3", "reproduce", "--n", "3"]));
}
