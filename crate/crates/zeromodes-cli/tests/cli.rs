//! End-to-end runs of the `zeromodes` binary on the shipped configs.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], cfg: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeromodes"))
        .args(args)
        .arg("--config")
        .arg(cfg)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn rows(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice::<Value>(&out.stdout).unwrap().as_array().unwrap().clone()
}

fn temp_config(text: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.toml");
    std::fs::write(&p, text).unwrap();
    (dir, p)
}

#[test]
fn disc_with_three_pi_has_one_up_mode() {
    let r = rows(&run(&["count"], &config("disc_count.toml")));
    assert_eq!(r[0]["count"], 1);
    assert_eq!(r[0]["chirality"], "up");
    assert_eq!(r[0]["index"], 1);
}

#[test]
fn plane_without_flux_has_no_modes() {
    let r = rows(&run(&["count"], &config("plane_zero.toml")));
    assert_eq!(r[0]["count"], 0);
    assert_eq!(r[0]["chirality"], "none");
}

#[test]
fn overlapping_holes_exit_2_with_violations() {
    let out = run(&["count"], &config("overlapping.toml"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("overlap"));
}

#[test]
fn unknown_keys_exit_2() {
    let (_d, p) = temp_config("[domain]\nkind = \"plane\"\nradius = 1.0\n");
    assert_eq!(run(&["count"], &p).status.code(), Some(2));
}

#[test]
fn disc_verify_passes() {
    let r = rows(&run(&["verify"], &config("disc_verify.toml")));
    assert_eq!(r.len(), 2);
    for row in &r {
        assert_eq!(row["pass"], true);
        assert!(row["residuals"]["pde"].as_f64().unwrap() < 1e-6);
        assert!(row["residuals"]["leakage"].as_array().unwrap().iter().all(|l| l.as_f64().unwrap() < 1e-6));
        assert_eq!(row["analytic_extension"], serde_json::json!([true]));
    }
}

#[test]
fn hole_flux_pi_normalizes_to_an_empty_basis() {
    let r = rows(&run(&["verify"], &config("disc_hole_pi.toml")));
    assert_eq!(r[0]["count"], 0);
    assert_eq!(r[0]["phi_normalized"], serde_json::json!([-1.0]));
    assert_eq!(r[0]["pass"], true);
}

#[test]
fn tight_tolerance_on_a_coarse_grid_exits_3() {
    let out = run(&["verify", "--tol", "1e-12", "--grid", "16"], &config("disc_verify.toml"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid too coarse"));
}

#[test]
fn sphere_verify_passes_with_dressing_note() {
    let a = rows(&run(&["verify"], &config("sphere_verify.toml")));
    let b = rows(&run(&["verify"], &config("sphere_redesignated.toml")));
    assert_eq!(a.len(), 2);
    assert_eq!(a[0]["count"], b[0]["count"]);
    for row in a.iter().chain(&b) {
        assert_eq!(row["pass"], true);
        assert!(row["note"].as_str().unwrap().contains("W^(-1/2)"));
    }
}

#[test]
fn json_and_csv_carry_the_same_numbers() {
    for (cmd, cfg) in [("verify", "sphere_verify.toml"), ("sweep", "sweep_disc.toml"), ("eta", "eta.toml")] {
        let json = rows(&run(&[cmd], &config(cfg)));
        let out = run(&[cmd, "--format", "csv"], &config(cfg));
        assert!(out.status.success());
        let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
        let header = rdr.headers().unwrap().clone();
        let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(records.len(), json.len());
        for (rec, row) in records.iter().zip(&json) {
            for (key, cell) in header.iter().zip(rec.iter()) {
                let v = key.split('.').fold(row, |v, k| &v[k]);
                let want = match v {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    Value::Array(xs) => xs
                        .iter()
                        .map(|x| if let Value::String(s) = x { s.clone() } else { x.to_string() })
                        .collect::<Vec<_>>()
                        .join(";"),
                    other => other.to_string(),
                };
                assert_eq!(cell, want, "{cmd}: column {key}");
            }
        }
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for (cmd, cfg) in [("verify", "disc_verify.toml"), ("sweep", "sweep_disc.toml"), ("bm", "bm.toml")] {
        let a = run(&[cmd, "--format", "csv"], &config(cfg));
        let b = run(&[cmd, "--format", "csv"], &config(cfg));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn out_flag_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.json");
    let out = run(&["count", "--out", p.to_str().unwrap()], &config("disc_count.toml"));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(v[0]["count"], 1);
}

fn jumps(r: &[Value], key: &str) -> Vec<f64> {
    r.iter()
        .filter(|row| row[key].as_i64().is_some_and(|j| j != 0))
        .map(|row| row["phi_total"].as_f64().unwrap())
        .collect()
}

#[test]
fn disc_sweep_jumps_just_after_odd_multiples_of_pi() {
    let out = run(&["sweep"], &config("sweep_disc.toml"));
    let r = rows(&out);
    assert_eq!(r.len(), 97);
    // Φ/2π + ½ crosses an integer at odd multiples of π; the strict floor
    // keeps the lower value there, so the step shows at the next grid point
    let want: Vec<f64> = [-5.0, -3.0, -1.0, 1.0, 3.0, 5.0].iter().map(|x| x + 0.125).collect();
    assert_eq!(jumps(&r, "jump_disc"), want);
    assert!(r.iter().all(|row| row["jump_disc"].as_i64().is_none_or(|j| j == 0 || j == 1)));
    assert!(r.iter().all(|row| row["index"] == row["count_disc"].as_i64().map(|c| if row["chirality_disc"] == "down" { -c } else { c }).unwrap()));
    assert!(String::from_utf8_lossy(&out.stderr).contains("disc count jumps by 1 between Φ = -5π and -4.875π"));
}

#[test]
fn plane_sweep_jumps_at_whole_turns() {
    let (_d, p) = temp_config(
        "[domain]\nkind = \"plane\"\n[field]\n[[field.bumps]]\ncenter = [0.0, 0.0]\nradius = 1.0\nflux = 0\n\
         [sweep]\nphi_min = -6\nphi_max = 6\nstep = \"1/8\"\n",
    );
    let r = rows(&run(&["sweep"], &p));
    // |count| drops when |Φ|/2π passes a whole number from above on the
    // negative side and rises just after it on the positive side
    assert_eq!(jumps(&r, "jump_plane"), vec![-4.0, -2.0, 2.125, 4.125]);
    assert!(r.iter().all(|row| row["count_disc"].is_null()));
}

#[test]
fn bm_sweep_finds_modes_at_odd_pi_only() {
    let r = rows(&run(&["sweep"], &config("bm_sweep.toml")));
    let with: Vec<f64> = r.iter().filter(|row| row["has_mode"] == true).map(|row| row["phi_total"].as_f64().unwrap()).collect();
    assert_eq!(with, vec![-5.0, -3.0, -1.0, 1.0, 3.0, 5.0]);
}

#[test]
fn bm_mode_verifies() {
    let r = rows(&run(&["bm"], &config("bm.toml")));
    assert_eq!(r[0]["has_mode"], true);
    assert_eq!(r[0]["n"], 2);
    assert_eq!(r[0]["pass"], true);
}

#[test]
fn bm_exterior_has_no_mode() {
    let (_d, p) = temp_config("[bm]\nr_in = 1.0\nphi = 3\ns_in = 1.0\n");
    let r = rows(&run(&["bm"], &p));
    assert_eq!(r[0]["has_mode"], false);
    assert!(r[0]["reason"].as_str().is_some());
}

#[test]
fn eta_table_matches_closed_form() {
    let r = rows(&run(&["eta"], &config("eta.toml")));
    assert_eq!(r.len(), 5);
    for row in &r {
        assert!(row["abs_error"].as_f64().unwrap() < 1e-3, "{row}");
    }
    assert_eq!(r[0]["eta_closed"], -0.75);
}

#[test]
fn index_agrees_with_count() {
    let r = rows(&run(&["index"], &config("index.toml")));
    assert_eq!(r[0]["consistent"], true);
    assert_eq!(r[0]["index"], 2);
    assert_eq!(r[0]["index"], r[0]["signed_count"]);
}

#[test]
fn index_on_a_plane_is_a_config_error() {
    assert_eq!(run(&["index"], &config("plane_zero.toml")).status.code(), Some(2));
}
