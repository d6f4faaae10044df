use std::process::{Command, Output};

fn awnev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awnev")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_csv() {
    let o = awnev(&["--expr", "pinf(0.3)", "eval", "--x", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,value"));
    assert!(lines.next().unwrap().starts_with("2,-0.0239497698"));
}

#[test]
fn char_json_has_meta_and_rows() {
    let o = awnev(&[
        "--expr",
        "pinf(0.3)",
        "--format",
        "json",
        "char",
        "--rmin",
        "10",
        "--rmax",
        "100",
        "--points",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["meta"]["command"], "char");
    assert_eq!(v["meta"]["expression"], "pinf(0.3)");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let (m, n, t) = (
            r["m"].as_f64().unwrap(),
            r["N"].as_f64().unwrap(),
            r["T"].as_f64().unwrap(),
        );
        assert!((t - m - n).abs() < 1e-12);
    }
}

#[test]
fn dq_of_x_squared_is_constant() {
    let o = awnev(&["--expr", "x^2", "--format", "json", "dq", "--order", "2", "--x", "0.7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = v.to_string();
    // (1+q)/√q at q = 1/2
    assert!(s.contains("2.1213203435596"), "{s}");
}

#[test]
fn expression_from_file() {
    let path = std::env::temp_dir().join(format!("awnev-cli-{}.expr", std::process::id()));
    std::fs::write(&path, "pinf(0.3)\n").unwrap();
    let arg = format!("@{}", path.display());
    let o = awnev(&["--expr", &arg, "eval", "--x", "2"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-0.0239497698"));
    let o = awnev(&["--expr", "@/nonexistent/awnev.expr", "eval", "--x", "2"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn csv_summary_lines() {
    let o = awnev(&["--q", "0.1", "theta-verify", "--identity", "triple", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("# ")));
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["--expr", "pinf(0.3", "eval", "--x", "1"], 2),
        (&["--expr", "pinf(0)", "eval", "--x", "1"], 2),
        (&["--expr", "1/(x*pinf(0.3))", "deficiency", "--value", "0"], 2),
        (
            &["--q", "0.2", "--tol", "1e-30", "theta-verify", "--identity", "square"],
            3,
        ),
        (&["--q", "1.5", "--expr", "x", "eval", "--x", "1"], 4),
        (&["--q", "0", "--expr", "x", "eval", "--x", "1"], 4),
    ];
    for (args, code) in cases {
        let o = awnev(args);
        assert_eq!(
            o.status.code(),
            Some(*code),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
}
