mod common;

use std::fs;
use std::path::Path;

use common::*;
use navsim_cli::output::{RISK_HEADER, TRAJECTORY_HEADER};

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(expected == actual, "{name} differs from the golden file");
}

fn run(args: &[&str]) {
    let o = navsim(args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn csv_headers_are_frozen() {
    assert_eq!(
        TRAJECTORY_HEADER.join(","),
        "t,x,y,psi_deg,u,v,r_deg,delta_deg,d_c,chi_e_deg,d_wp,cr,reward"
    );
    assert_eq!(
        RISK_HEADER.join(","),
        "t,obstacle_id,range,rel_speed,dcpa,tcpa,cr,critical_id,step"
    );
}

#[test]
fn rollout_outputs_match_golden_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    run(&[
        "rollout",
        "--scenario",
        "fig6a",
        "--action",
        "3",
        "--steps",
        "30",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("# L = 230 m, U = 12.346656 m/s;"));
    assert_eq!(csv.lines().nth(1).unwrap(), TRAJECTORY_HEADER.join(","));
    check_golden("rollout_fig6a.csv", &csv);
    check_golden(
        "rollout_fig6a.svg",
        &fs::read_to_string(out.join("track.svg")).unwrap(),
    );
}

#[test]
fn dynamic_plot_matches_golden_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    run(&[
        "rollout",
        "--scenario",
        "dyn-demo",
        "--steps",
        "40",
        "--out",
        out.to_str().unwrap(),
    ]);
    let svg = fs::read_to_string(out.join("track.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    // own ship plus four moving obstacles
    assert_eq!(
        doc.descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .count(),
        5
    );
    check_golden("rollout_dyn_demo.svg", &svg);
}

#[test]
fn risk_table_matches_golden_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    run(&[
        "risk",
        "--scenario",
        "dyn-demo",
        "--steps",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(out.join("risk.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), RISK_HEADER.join(","));
    check_golden("risk_dyn_demo.csv", &csv);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        run(&[
            "rollout",
            "--scenario",
            "fig5b",
            "--action",
            "1",
            "--seed",
            "4",
            "--out",
            d.to_str().unwrap(),
        ]);
    }
    for f in ["trajectory.csv", "track.svg"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
}
