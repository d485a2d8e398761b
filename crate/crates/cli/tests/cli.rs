//! End-to-end runs of the `lpmix` binary against the bundled configs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn lpmix(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpmix"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn run(command: &str, config: &Path, extra: &[&str]) -> (TempDir, Output) {
    let dir = TempDir::new().unwrap();
    let mut args = vec![command, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = lpmix(dir.path(), &args);
    (dir, out)
}

fn report(dir: &TempDir, command: &str) -> Value {
    let text = fs::read_to_string(dir.path().join(format!("{command}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn write_config(dir: &TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("config.json");
    fs::write(&p, body).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn analyze_golden_mean() {
    let (dir, out) = run("analyze", &configs().join("golden_mean.json"), &[]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "analyze");
    assert_eq!(r["result"]["primitive"], true);
    let h = r["result"]["entropy"].as_f64().unwrap();
    assert!((h - 0.4812).abs() < 1e-4);
    assert_eq!(r["result"]["periodic_counts"][3]["count"], 7);
    // defaults are written out
    assert_eq!(r["config"]["max_period"], 10);
    assert_eq!(r["versions"]["lpmix_core"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn analyze_parity_decomposes_into_two_classes() {
    let (dir, out) = run("analyze", &configs().join("parity.json"), &[]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "analyze");
    assert_eq!(r["result"]["primitive"], false);
    assert_eq!(r["result"]["decomposition"]["l"], 2);
    assert_eq!(r["result"]["decomposition"]["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn analyze_rejects_a_non_essential_matrix() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"size": 2, "rows": [[1, 0], [0, 0]]}"#);
    let out = lpmix(dir.path(), &["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not essential"));
    assert!(!dir.path().join("analyze.json").exists());
}

#[test]
fn lpp_full_shift_has_n0_two() {
    let (dir, out) = run("lpp", &configs().join("lpp_full_shift.json"), &[]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "lpp");
    assert_eq!(r["result"]["outcome"], "certificate");
    assert_eq!(r["result"]["N0"], 2);
    assert_eq!(r["result"]["verified"], true);
    assert_eq!(r["result"]["mixing"]["all_hit"], true);
}

#[test]
fn lpp_refutes_the_parity_shift() {
    let (dir, out) = run("lpp", &configs().join("lpp_parity.json"), &[]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "lpp");
    assert_eq!(r["result"]["outcome"], "refutation");
    assert_eq!(r["result"]["exhaustive"], true);
}

#[test]
fn lpp_horizon_too_small_exits_three() {
    // eight 3-words cannot fit in a cycle of length 5
    let (_dir, out) = run(
        "lpp",
        &configs().join("lpp_full_shift.json"),
        &["--epsilon", "0.125", "--n-max", "5"],
    );
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon too small"));
}

#[test]
fn pseudo_shadow_cat_map_rows_all_pass() {
    let (dir, out) = run("pseudo-shadow", &configs().join("shadow_cat.json"), &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir, "pseudo-shadow");
    let n0 = r["result"]["parameters"]["n0"].as_u64().unwrap();
    let rows = r["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 31);
    assert_eq!(rows[0]["n"].as_u64().unwrap(), n0);
    assert_eq!(rows[30]["n"].as_u64().unwrap(), n0 + 30);
    for row in rows {
        assert_eq!(row["pass"], true, "{row}");
        assert!(row["shadow_distance"].as_f64().unwrap() <= row["bound"].as_f64().unwrap() * (1.0 + 1e-9));
    }
    assert_eq!(r["config"]["n_from"].as_u64().unwrap(), n0);
}

#[test]
fn pseudo_shadow_below_n0_exits_three() {
    let (dir, out) = run(
        "pseudo-shadow",
        &configs().join("shadow_cat.json"),
        &["--n-from", "5", "--n-to", "8"],
    );
    assert_eq!(code(&out), 3);
    assert!(!dir.path().join("pseudo-shadow.json").exists());
}

#[test]
fn pseudo_shadow_symbolic_defects_are_word_length_bounded() {
    let (dir, out) = run("pseudo-shadow", &configs().join("shadow_symbolic.json"), &[]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "pseudo-shadow");
    let m = r["result"]["word_length"].as_u64().unwrap();
    let bound = 0.5f64.powi(m as i32);
    assert_eq!(r["result"]["defect_bound"].as_f64().unwrap(), bound);
    for row in r["result"]["rows"].as_array().unwrap() {
        assert!(row["defect"].as_f64().unwrap() <= bound);
        assert_eq!(row["pass"], true);
    }
}

#[test]
fn pseudo_shadow_horseshoe() {
    let (dir, out) = run(
        "pseudo-shadow",
        &configs().join("shadow_horseshoe.json"),
        &["--n-to", "50"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(report(&dir, "pseudo-shadow")["result"]["all_pass"], true);
}

#[test]
fn approx_periodic_target_is_at_distance_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"system": {"kind": "sft", "matrix": {"size": 2, "rows": [[1, 1], [1, 1]]}},
            "target": {"kind": "cycles", "cycles": [{"word": "011", "weight": 1.0}]},
            "epsilon": 0.05}"#,
    );
    let out = lpmix(dir.path(), &["approx-measure", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "approx-measure");
    assert_eq!(r["result"]["distance"], 0.0);
    assert_eq!(r["result"]["period"], 3);
}

#[test]
fn approx_mixed_target_within_epsilon() {
    let (dir, out) = run(
        "approx-measure",
        &configs().join("approx_periodic.json"),
        &["--format", "csv"],
    );
    assert_eq!(code(&out), 0);
    let r = report(&dir, "approx-measure");
    assert!(r["result"]["distance"].as_f64().unwrap() < r["config"]["epsilon"].as_f64().unwrap());
    let csv = fs::read_to_string(dir.path().join("approx-measure.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("target_id,method,parameter,distance"));
    assert!(lines.next().unwrap().starts_with("half_half,periodic,"));
}

#[test]
fn approx_bernoulli_is_mixing_and_close() {
    let (dir, out) = run("approx-measure", &configs().join("approx_bernoulli.json"), &[]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "approx-measure");
    assert_eq!(r["result"]["mode"], "bernoulli");
    assert_eq!(r["result"]["support_primitive"], true);
    assert_eq!(r["result"]["within_epsilon"], true);
    assert_eq!(r["result"]["monotone"], true);
}

#[test]
fn approx_bernoulli_on_a_non_mixing_support_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"system": {"kind": "sft", "matrix": {"size": 2, "rows": [[0, 1], [1, 0]]}},
            "target": {"kind": "cycles", "cycles": [{"word": "01", "weight": 1.0}]},
            "mode": "bernoulli"}"#,
    );
    let out = lpmix(dir.path(), &["approx-measure", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not primitive"));
}

#[test]
fn approx_lebesgue_on_the_torus() {
    let (dir, out) = run("approx-measure", &configs().join("approx_cat.json"), &[]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "approx-measure");
    assert_eq!(r["result"]["within_epsilon"], true);
    assert_eq!(r["config"]["family"]["kind"], "modes");
}

#[test]
fn perturb_keeps_n0() {
    let (dir, out) = run("perturb-smoke", &configs().join("perturb.json"), &[]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "perturb-smoke");
    assert_eq!(r["result"]["both_certified"], true);
    assert_eq!(r["result"]["same_n0"], true);
    assert_eq!(r["result"]["after"]["rates"]["expansion"], 2.9);
}

#[test]
fn perturb_zero_magnitude_is_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"system": {"kind": "horseshoe", "contraction": 0.25, "expansion": 4.0}}"#,
    );
    let out = lpmix(dir.path(), &["perturb-smoke", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = report(&dir, "perturb-smoke");
    assert_eq!(r["result"]["identical"], true);
    assert_eq!(r["config"]["magnitude"], 0.0);
}

#[test]
fn perturb_beyond_the_hyperbolic_margin_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        r#"{"system": {"kind": "horseshoe", "contraction": 0.25, "expansion": 4.0}}"#,
    );
    let out = lpmix(
        dir.path(),
        &["perturb-smoke", "--config", cfg.to_str().unwrap(), "--magnitude", "0.7"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_config_and_bad_flags_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&lpmix(dir.path(), &["analyze"])), 2);
    assert_eq!(code(&lpmix(dir.path(), &["analyze", "--format", "xml"])), 2);
    let cfg = write_config(&dir, r#"{"matrix": {"size": 1, "rows": [[1]]}, "unknown": 1}"#);
    assert_eq!(code(&lpmix(dir.path(), &["lpp", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let cases = [
        ("analyze", "golden_mean.json"),
        ("lpp", "lpp_full_shift.json"),
        ("pseudo-shadow", "shadow_cat.json"),
        ("approx-measure", "approx_bernoulli.json"),
        ("perturb-smoke", "perturb.json"),
    ];
    for (command, file) in cases {
        let cfg = configs().join(file);
        let extra = ["--format", "csv", "--seed", "7"];
        let (a, oa) = run(command, &cfg, &extra);
        let (b, ob) = run(command, &cfg, &extra);
        assert_eq!(code(&oa), 0);
        assert_eq!(code(&ob), 0);
        for ext in ["json", "csv"] {
            let name = format!("{command}.{ext}");
            let x = fs::read(a.path().join(&name)).unwrap();
            let y = fs::read(b.path().join(&name)).unwrap();
            assert_eq!(x, y, "{name} differs between runs");
        }
        assert_eq!(report(&a, command)["seed"], 7);
    }
}
