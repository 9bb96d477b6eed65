use std::path::Path;
use std::process::{Command, Output};

fn acp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acp")).args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(name).display()))
}

#[test]
fn meanfield_trajectory_reaches_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mf.cfg");
    std::fs::write(&cfg, "# endemic regime\nlambda1 = 0\nlambda2 = 3\ngamma = 1\nu1 = 0.1\nu2 = 0.1\n").unwrap();
    let out = dir.path().join("out");
    let o = acp(&["meanfield", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&out, "meanfield.csv");
    assert_eq!(csv.lines().next(), Some("t,u1,u2"));
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 200.0);
    assert!((last[1] - 1.0 / 6.0).abs() < 1e-6 && (last[2] - 1.0 / 6.0).abs() < 1e-6);
}

#[test]
fn negative_gamma_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = acp(&["branching", "--set", "gamma=-1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));
    assert!(!dir.path().join("branching.csv").exists());
}

#[test]
fn unknown_and_malformed_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = acp(&["simulate", "--set", "lambda3=1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda3"));
    let o = acp(&["block", "--set", "k=0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`k`"));
}

#[test]
fn oversized_enumeration_exits_with_budget_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = acp(&["percolation", "--set", "d=2", "--set", "n_max=20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn headers_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str, &str); 5] = [
        (&["simulate", "--replicas", "3", "--set", "half_width=10"], "simulate.csv",
            "replica,pi1,pi2,t_cumulative,extinction_time,max_space,max_time,extinct"),
        (&["branching", "--replicas", "3"], "branching.csv", "replica,progeny,generations,capped"),
        (&["block", "--replicas", "3", "--set", "k=2"], "block.csv",
            "replica,healthy_block,card_lambda_minus,card_lambda_plus"),
        (&["percolation", "--set", "n_max=3"], "percolation.csv", "n,count,bound"),
        (&["percolation", "--replicas", "3", "--set", "task=field", "--set", "half_width=5", "--set", "levels=6"],
            "percolation.csv", "replica,has_closed_path,longest"),
    ];
    for (i, (args, file, header)) in cases.iter().enumerate() {
        let out = dir.path().join(i.to_string());
        let mut full = args.to_vec();
        full.extend(["--out", out.to_str().unwrap()]);
        let o = acp(&full);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(read(&out, file).lines().next(), Some(*header));
        let summary: serde_json::Value = serde_json::from_str(&read(&out, "summary.json")).unwrap();
        assert!(summary["aggregates"].is_object() && summary["config"].is_object());
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, name: &str| {
        let out = dir.path().join(name);
        let o = acp(&["simulate", "--seed", "42", "--replicas", "200", "--jobs", jobs, "--set", "half_width=30",
            "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        (read(&out, "simulate.csv"), read(&out, "summary.json"))
    };
    assert_eq!(run("1", "a"), run("3", "b"));
}

#[test]
fn more_replicas_keep_existing_rows() {
    let dir = tempfile::tempdir().unwrap();
    let run = |n: &str| {
        let out = dir.path().join(n);
        let o = acp(&["branching", "--seed", "9", "--replicas", n, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        read(&out, "branching.csv")
    };
    let small = run("50");
    let large = run("100");
    assert!(large.starts_with(&small));
    assert_eq!(large.lines().count(), 101);
}

#[test]
fn verify_reports_every_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = acp(&["verify", "--set", "scale=quick", "--out", dir.path().to_str().unwrap()]);
    // Exit 0 when every check passes, 1 otherwise; never a usage or runtime error.
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "verify.csv");
    assert_eq!(csv.lines().count(), 10);
    let failed = csv.lines().skip(1).any(|l| l.ends_with(",false"));
    assert_eq!(o.status.code() == Some(1), failed);
    assert_eq!(read(dir.path(), "verify_report.txt").matches("criterion ").count(), 9);
}
