use std::process::{Command, Output};

fn gbe(args: &[&str], cache: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbe")).args(args).env("GBE_CACHE_DIR", cache).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn coinciding_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = gbe(&["compute", "--n", "1", "--g", "1", "--coinciding", "--format", "latex"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "\\hbar\\left(\\frac{1}{2 y} - \\frac{x}{2 y^{2}}\\right)");
    let o = gbe(&["compute", "--n", "2", "--g", "0", "--coinciding"], dir.path());
    assert_eq!(stdout(&o).trim(), "T/y^4");
    let o = gbe(&["compute", "--n", "2", "--g", "0", "--coinciding", "--format", "latex"], dir.path());
    assert_eq!(stdout(&o).trim(), "\\frac{T}{y^{4}}");
}

#[test]
fn machine_format_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compute", "--n", "2", "--g", "2", "--format", "machine"];
    let a = gbe(&args, dir.path());
    let b = gbe(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["g"], 2);
    let parts = v["parts"].as_array().unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[0]["hbar_power"], 2);
    assert!(parts[1]["ratfn"].as_str().unwrap().contains("| y:["));
}

#[test]
fn output_file_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("w.txt");
    let o = gbe(&["compute", "--n", "3", "--g", "0", "--out", out.to_str().unwrap()], &cache);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&out).unwrap().contains("y3"));
    let listed = stdout(&gbe(&["cache", "--list"], &cache));
    assert!(listed.lines().any(|l| l == "W_3_0.txt"), "{listed}");
    let o = gbe(&["cache", "--clear"], &cache);
    assert!(o.status.success());
    assert_eq!(stdout(&gbe(&["cache", "--list"], &cache)).trim(), "");
}

#[test]
fn small_battery_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = gbe(&["check", "--max-chi", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = gbe(&["check", "--max-chi", "5", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["failed"], 0);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["compute", "--n", "1"][..],
        &["compute", "--n", "1", "--g", "1", "--bogus"],
        &["compute", "--n", "0", "--g", "1"],
        &["compute", "--n", "1", "--g", "1", "--format", "pdf"],
        &["moments", "--kmax", "2", "--eval", "N=2"],
        &["cache"],
        &["x2", "--n", "1", "--g", "2"],
    ] {
        assert_eq!(gbe(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn moments_and_mc() {
    let dir = tempfile::tempdir().unwrap();
    let o = gbe(&["moments", "--kmax", "2", "--eval", "N=2,kappa=1"], dir.path());
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("m_2 = N*T - T + kappa^-1*T  = 2\n"), "{s}");
    let o = gbe(&["mc", "--N", "1", "--kappa", "2", "--samples", "20000", "--kmax", "2"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let o = gbe(&["--threads", "2", "mc", "--N", "3", "--kappa", "0.5", "--samples", "5000", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}
