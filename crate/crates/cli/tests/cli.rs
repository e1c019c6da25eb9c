use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use cubic_slice::render::Sidecar;
use cubic_slice_cli::{parse_args, run, RunConfig, RUN_FILE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubic-slice"))
}

fn args(dir: &Path, rest: &[&str]) -> Vec<String> {
    let mut v = vec!["cubic-slice".to_string()];
    v.extend(rest.iter().map(|s| s.to_string()));
    v.push("--out".into());
    v.push(dir.display().to_string());
    v
}

fn rerun_into(config: &Path, dir: &Path) -> i32 {
    run(args(dir, &["rerun", config.to_str().unwrap()]))
}

#[test]
fn parabolic_half_has_two_atoms_of_weight_pi() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(args(dir.path(), &["parabolic", "--p", "1", "--q", "2"])), 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("parabolic.json")).unwrap()).unwrap();
    assert_eq!(v["atoms_c"].as_array().unwrap().len(), 2);
    assert_eq!(v["roots_u"].as_array().unwrap().len(), 2);
    assert_eq!(v["coeffs"].as_array().unwrap().len(), 3);
    assert!((v["weight"].as_f64().unwrap() - PI).abs() < 1e-15);
    for atom in v["atoms_c"].as_array().unwrap() {
        let (re, im) = (atom[0].as_f64().unwrap(), atom[1].as_f64().unwrap());
        assert!((re.hypot(im) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn converge_has_one_row_per_convergent() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(args(dir.path(), &["converge", "--theta", "golden", "--depth", "10", "--grid", "7", "--order", "1024"]));
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("converge.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "p,q,sup_gap,weak_star_gap,u_n_at_zero,seconds");
    assert_eq!(lines.len(), 11);
    let qs: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(qs, ["1", "2", "3", "5", "8", "13", "21", "34", "55", "89"]);
}

#[test]
fn slice_writes_png_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(args(dir.path(), &["slice", "--lambda", "0+0.4i", "--center", "0", "--half-width", "8", "--res", "32"]));
    assert_eq!(code, 0);
    let png = fs::read(dir.path().join("slice.png")).unwrap();
    assert_eq!(&png[1..4], b"PNG");
    let side = Sidecar::decode(&fs::read(dir.path().join("slice.slcf")).unwrap()).unwrap();
    assert_eq!((side.width, side.height), (32, 32));
    assert_eq!(side.half_width, 8.0);
    assert!(side.values.iter().all(|v| (0.0..9.0).contains(v)));
    assert!(dir.path().join(RUN_FILE).exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["series", "--lambda", "0+0.4i", "--c", "1+", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1);
    assert!(err.contains("--c"), "{err}");

    let out = bin().args(["slice", "--res", "64"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("--lambda"));

    let out = bin().args(["parabolic", "--p", "2", "--q", "4", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().env("SLICE_THREADS", "many").args(["parabolic", "--p", "1", "--q", "2", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // λ = -1 makes λ³ - λ vanish.
    let out = bin().args(["series", "--lambda", "-1", "--c", "2", "--order", "10", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cmd = ["zcurve", "--lambda", "0+0.4i", "--rays", "16"];
    let one = bin().args(cmd).args(["--threads", "1", "--out"]).arg(a.path()).status().unwrap();
    let two = bin().env("SLICE_THREADS", "3").args(cmd).arg("--out").arg(b.path()).status().unwrap();
    assert!(one.success() && two.success());
    assert_eq!(fs::read(a.path().join("zcurve.csv")).unwrap(), fs::read(b.path().join("zcurve.csv")).unwrap());
}

#[test]
fn rerun_is_byte_identical() {
    let runs: [&[&str]; 4] = [
        &["parabolic", "--p", "5", "--q", "8", "--seed", "7"],
        &["slice", "--lambda", "0+0.4i", "--res", "24", "--mode", "both", "--ss"],
        &["heightfield", "--lambda", "0+0.4i", "--res", "16", "--order", "256"],
        &["series", "--lambda", "0.5", "--c", "-2+1i", "--order", "64"],
    ];
    for cmd in runs {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(run(args(a.path(), cmd)), 0, "{cmd:?}");
        assert_eq!(rerun_into(&a.path().join(RUN_FILE), b.path()), 0);
        for entry in fs::read_dir(a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            if name == RUN_FILE {
                continue;
            }
            assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
        }
    }
}

#[test]
fn rerun_of_converge_matches_except_timings() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run(args(a.path(), &["converge", "--depth", "6", "--grid", "5", "--order", "512"])), 0);
    assert_eq!(rerun_into(&a.path().join(RUN_FILE), b.path()), 0);
    let strip = |p: &Path| -> Vec<String> {
        fs::read_to_string(p.join("converge.csv"))
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    assert_eq!(strip(a.path()), strip(b.path()));
}

#[test]
fn config_round_trips_through_json() {
    let cfg = parse_args(["cubic-slice", "vslice", "--lambda", "-0.2+0.3i", "--half-width", "2", "--threads", "2"]).unwrap();
    let back = RunConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.to_json(), cfg.to_json());
}
