use cubic_ist_harness::config::PotentialSpec;
use cubic_ist_harness::report::{anchor_known, ANCHORS};
use cubic_ist_harness::{run, Command, RunConfig};
use std::path::Path;
use std::process::Command as Process;

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_cubic-ist"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn invert_writes_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(
        dir.path(),
        "one.json",
        r#"{"sc1": null, "sc2": null, "bound": [{"kappa": 1, "b_re": 1, "b_im": 0}], "boundHat": []}"#,
    );
    let out = dir.path().join("q.csv");
    let st = bin()
        .args(["invert", "--data"])
        .arg(&data)
        .args(["--x-min", "-5", "--x-max", "5", "--dx", "0.01", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,q_re,q_im,F_re,F_im"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1001);
    let first: Vec<f64> = rows[0].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], -5.0);
    // 17 significant digits
    assert!(rows[0].split(',').all(|v| v.split('e').next().unwrap().trim_start_matches('-').len() == 18));
    let report = String::from_utf8(st.stdout).unwrap();
    assert!(report.starts_with("check,anchor,residual,tolerance,pass\n"));
    assert!(report.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let st = bin()
            .env("CUBIC_IST_THREADS", threads)
            .args(["verify-identities", "--samples", "200", "--radius", "5", "--seed", "7", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(st.status.success());
        (std::fs::read(out).unwrap(), st.stdout)
    };
    let a = run("1", "a.csv");
    let b = run("4", "b.csv");
    assert_eq!(a, b);
    let c = {
        let out = dir.path().join("c.csv");
        bin().args(["verify-identities", "--samples", "200", "--seed", "8", "--out"]).arg(&out).output().unwrap();
        std::fs::read(out).unwrap()
    };
    assert_ne!(a.0, c);
}

#[test]
fn exit_status_reflects_records_and_usage() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.json", r#"{"kind": "gaussian", "amplitude": 0, "width": 1}"#);
    let out = dir.path().join("f.csv");
    let st = bin().args(["forward", "--potential"]).arg(&zero).arg("--out").arg(&out).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    assert!(dir.path().join("f_asymptotic.csv").exists());

    // the Gaussian misses the 5% large-omega tolerance at x = 1
    let st = bin().args(["forward"]).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&st.stdout).contains("large-omega limit at x = 1 (omega = 40)"));

    let bad = write(dir.path(), "bad.json", r#"{"tolerances": {"jump": -1}}"#);
    let st = bin().arg("--config").arg(&bad).arg("jump-residual").output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("tolerances.jump"));

    let st = bin().args(["invert"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("`data`"));

    let st = bin().env("CUBIC_IST_THREADS", "zero").args(["bound-states"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));

    let cfg = write(dir.path(), "inv.json", r#"{"command": "invert"}"#);
    let st = bin().arg("--config").arg(&cfg).arg("forward").output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("`command`"));
}

#[test]
fn numeric_failures_carry_context() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.json", r#"{"bound": [{"kappa": 1, "b_re": 1, "b_im": 0}]}"#);
    let st = bin().args(["invert", "--data"]).arg(&data).args(["--dx", "-0.5"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let cfg = write(dir.path(), "c.json", r#"{"inverse": {"max_extension": 1.0}}"#);
    let st = bin().arg("--config").arg(&cfg).args(["invert", "--data"]).arg(&data).output().unwrap();
    assert_eq!(st.status.code(), Some(3));
    let err = String::from_utf8_lossy(&st.stderr);
    assert!(err.contains("invert: reflectionless solver") && err.contains("domain too small"), "{err}");
}

#[test]
fn every_record_anchor_is_in_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.json", r#"{"bound": [{"kappa": 1, "b_re": 1, "b_im": 0}]}"#);
    let mut seen = Vec::new();
    for (cmd, zero) in [
        (Command::VerifyIdentities, false),
        (Command::Forward, false),
        (Command::Forward, true),
        (Command::BoundStates, false),
        (Command::Invert, false),
        (Command::JumpResidual, false),
    ] {
        let mut c = RunConfig { command: Some(cmd), data: Some(data.clone()), ..Default::default() };
        c.identities.samples = 20;
        c.jump.boundary = false;
        if zero {
            c.potential = PotentialSpec::Zero { decay_rate: None };
        }
        let out = run(&c).unwrap();
        for r in &out.records {
            assert!(anchor_known(r.anchor), "{}", r.anchor);
            assert_eq!(r.pass, r.residual <= r.tolerance);
            seen.push(r.anchor);
        }
    }
    // every manifest entry other than the roundtrip comparisons is exercised
    for (a, _) in ANCHORS {
        assert!(seen.contains(a) || a.starts_with("scatter::scattering_coefficients") || a.ends_with("#kappa"), "{a}");
    }
}

#[test]
fn roundtrip_reports_forward_failures_as_records() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.json", r#"{"bound": [{"kappa": 1, "b_re": 1, "b_im": 0}]}"#);
    let mut c = RunConfig { command: Some(Command::Roundtrip), data: Some(data), ..Default::default() };
    c.x_grid = cubic_ist_harness::config::XGrid { min: -60.0, max: 60.0, dx: 0.01 };
    let out = run(&c).unwrap();
    let names: Vec<&str> = out.records.iter().map(|r| r.check.as_str()).collect();
    assert!(names.contains(&"roundtrip sc1 on i l_zeta1") && names.contains(&"roundtrip bound states"));
    assert!(out.diagnostic("forward_failures").is_some());
    assert_eq!(out.tables.len(), 2);
    assert_eq!(out.tables[1].rows.len(), 10);
}
