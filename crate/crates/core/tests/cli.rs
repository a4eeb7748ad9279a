use std::process::{Command, Output};

fn sublattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sublattice"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_table() {
    let o = sublattice(&["count", "--n", "2", "--r", "1..=4", "--jobs", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect();
    assert_eq!(
        lines,
        [
            "n k r method count",
            "2 0 1 oracle 1",
            "2 0 2 oracle 3",
            "2 0 3 oracle 3",
            "2 0 4 oracle 4"
        ]
    );
}

#[test]
fn unital_counts() {
    let o = sublattice(&[
        "count", "--n", "3", "--r", "1..4", "--method", "unital", "--format", "csv",
    ]);
    assert_eq!(
        stdout(&o),
        "n,k,r,method,count\n3,0,1,unital,1\n3,0,2,unital,3\n3,0,3,unital,3\n3,0,4,unital,4\n"
    );
}

#[test]
fn corank_oracle_and_formula_agree() {
    let run = |method| {
        let o = sublattice(&[
            "count-corank",
            "--ambient",
            "3",
            "--corank",
            "2",
            "--torsion",
            "1..=6",
            "--method",
            method,
            "--format",
            "csv",
        ]);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    let oracle = run("oracle");
    assert_eq!(oracle, ["7"; 6]);
    assert_eq!(oracle, run("formula"));
}

#[test]
fn verify_writes_wall_time_to_stderr_only() {
    let o = sublattice(&["verify", "--n", "2", "--k", "1", "--r", "1..=3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(!out.contains(" in "), "{out}");
    assert!(out.ends_with("# cells: 3  passed: 3  failed: 0  incomplete: 0\n"));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.starts_with("verified 3 cells") && err.trim_end().ends_with('s'),
        "{err}"
    );
}

#[test]
fn verify_budget_exhaustion_exits_2() {
    let o = sublattice(&[
        "verify", "--n", "1", "--k", "1", "--r", "3", "--budget", "1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains(r#""status":"incomplete""#));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        sublattice(&["count", "--n", "3..1", "--r", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sublattice(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        sublattice(&["count", "--n", "0", "--r", "1", "--method", "unital"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sublattice(&["--help"]).status.code(), Some(0));
}

#[test]
fn series_to_file_and_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f3.csv");
    let p = path.to_str().unwrap();
    let o = sublattice(&["series", "--n", "3", "--r-max", "6", "--output", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "r,f,N\n1,1,1\n2,3,4\n3,3,7\n4,4,11\n5,3,14\n6,9,23\n"
    );

    let o = sublattice(&[
        "series", "--n", "4", "--r-max", "50", "--budget", "200", "--output", p,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("r,f,N\n1,1,1\n"), "{text}");
    assert!(
        text.lines()
            .last()
            .unwrap()
            .starts_with("# truncated at r="),
        "{text}"
    );
}

#[test]
fn cache_is_reused_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.jsonl");
    let c = cache.to_str().unwrap();
    let args = [
        "count", "--n", "2", "--r", "1..=6", "--cache", c, "--format", "json",
    ];
    let cold = sublattice(&args);
    let text = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text
        .lines()
        .all(|l| l.contains(r#""engine_version":"sublattice-"#)));
    let warm = sublattice(&args);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(std::fs::read_to_string(&cache).unwrap(), text);

    std::fs::write(&cache, "garbage\n").unwrap();
    assert_eq!(sublattice(&args).status.code(), Some(2));
}
