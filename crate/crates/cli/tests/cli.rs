use std::io::Write;
use std::process::{Command, Output};

fn procalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_procalg"))
        .args(args)
        .env_remove("PROCALG_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn decide_valid_under_ccs() {
    let o = procalg(&[
        "decide",
        "--comm",
        "ccs",
        "--alphabet",
        "a,~a",
        "x | (y | z) = 0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "VALID");
}

#[test]
fn decide_invalid_prints_witness() {
    let o = procalg(&["decide", "--comm", "none", "x || y = x |_ y"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("INVALID"), "{out}");
    assert!(out.contains("witness: x := "), "{out}");
    assert!(out.contains("experiment: "), "{out}");
}

#[test]
fn verbose_shows_normal_forms() {
    let o = procalg(&["decide", "-v", "x || y = y || x"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("normal form (lhs): ") && out.contains("W = "),
        "{out}"
    );
}

#[test]
fn bisim_exit_codes() {
    assert_eq!(
        procalg(&["bisim", "--comm", "none", "a.0 || b.0", "a.b.0 + b.a.0"])
            .status
            .code(),
        Some(0)
    );
    let o = procalg(&["bisim", "a.0", "b.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("<a>true"));
}

#[test]
fn json_is_deterministic() {
    let args = [
        "decide",
        "--output",
        "json",
        "--comm",
        "ccs",
        "--alphabet",
        "a,~a",
        "x | y = y | x + a.0",
    ];
    let (a, b) = (procalg(&args), procalg(&args));
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"], "invalid");
    assert!(v["witness"]["x"].is_string());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(procalg(&["decide", "x +"]).status.code(), Some(2));
    assert_eq!(procalg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        procalg(&["decide", "--comm", "ccs", "--alphabet", "a", "x = x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(procalg(&["bisim", "x", "0"]).status.code(), Some(2));
    assert_eq!(
        procalg(&["decide", "--comm", "weird", "x = x"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn decide_file_reports_worst() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# laws\nx + y = y + x\n\nx || y = x |_ y  # fails").unwrap();
    let o = procalg(&["decide", "--file", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("VALID\nINVALID"), "{out}");
}

#[test]
fn normalize_trace_checks() {
    let o = procalg(&[
        "normalize",
        "--comm",
        "ccs",
        "--alphabet",
        "a,~a",
        "--trace",
        "a.0 | ~a.0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("tau.0"));
    let trace: String = lines.map(|l| format!("{l}\n")).collect();
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(trace.as_bytes()).unwrap();
    let path = f.path().to_str().unwrap();
    assert_eq!(
        procalg(&["check-trace", "--comm", "ccs", "--alphabet", "a,~a", path])
            .status
            .code(),
        Some(0)
    );
    // communication is not admissible without ccs
    assert_eq!(
        procalg(&["check-trace", "--comm", "none", "--alphabet", "a,~a", path])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn lts_and_decompose() {
    let o = procalg(&["lts", "--comm", "ccs", "a.0 || ~a.0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = procalg(&["decompose", "a.0 || a.0 || b.a.0"]);
    assert_eq!(stdout(&o), "a.0\na.0\nb.a.0\n");
}

#[test]
fn refute_and_table_fallback() {
    let o = procalg(&["refute", "x || y = x |_ y"]);
    assert_eq!(o.status.code(), Some(1));
    let o = procalg(&["refute", "--depth", "1", "x + y = y + x"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("UNKNOWN"));

    let mut t = tempfile::NamedTempFile::new().unwrap();
    writeln!(t, "a ~a -> tau").unwrap();
    let comm = format!("table:{}", t.path().to_str().unwrap());
    let o = procalg(&["decide", "--comm", &comm, "--depth", "1", "x | y = y | x"]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
