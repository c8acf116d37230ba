use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spinforge(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinforge"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("spawn spinforge")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&spinforge(dir.path(), &["gate", "zz"])), 3);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"j_mhz": 20}"#).unwrap();
    let o = spinforge(dir.path(), &["--params", bad.to_str().unwrap(), "spectrum"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));

    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&spinforge(
            dir.path(),
            &["--params", missing.to_str().unwrap(), "spectrum"]
        )),
        2
    );
    assert_eq!(
        code(&spinforge(dir.path(), &["design-cphase", "--theta", "0"])),
        4
    );
    assert_eq!(
        code(&spinforge(
            dir.path(),
            &["design-cphase", "--theta", "half"]
        )),
        2
    );
}

#[test]
fn spectrum_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinforge(dir.path(), &["spectrum"]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "level,energy_J0_MHz,energy_J_MHz,shift_MHz,exchange_shift_MHz"
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 4);
    // parallel levels carry no exchange shift
    assert!(
        rows[0].ends_with(",29.230000000,0.000000000"),
        "{}",
        rows[0]
    );
}

#[test]
fn gate_report_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = spinforge(dir.path(), &["--format", "json", "gate", "sq_two_piece"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("gate_sq_two_piece.json")).unwrap();
    assert_eq!(read(&a), read(&b));

    let report: serde_json::Value = serde_json::from_slice(&read(&a)).unwrap();
    assert_eq!(report["tag"], "sq_two_piece");
    assert!(report["fidelity"].as_f64().unwrap() > 0.999994);
    assert!(a.path().join("envelope_sq_two_piece.csv").exists());
}

#[test]
fn noise_sweep_ignores_thread_count() {
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_spinforge"))
            .env("SPINFORGE_THREADS", threads)
            .arg("--out")
            .arg(dir.path())
            .args(["--step-ps", "1", "--seed", "11"])
            .args([
                "noise-sweep",
                "--tags",
                "sq_two_piece",
                "--samples",
                "6",
                "--grid-khz",
                "50,200",
            ])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let meta = fs::read_to_string(dir.path().join("noise_sq_two_piece.meta.json")).unwrap();
        assert!(meta.contains("\"seed\": 11"), "{meta}");
        fs::read_to_string(dir.path().join("noise_sq_two_piece.csv")).unwrap()
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert!(one.starts_with("sigma_delta_kHz,mean_infidelity,stderr,n_samples,rejected_samples\n"));
    assert_eq!(one.lines().count(), 3);
}
