use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_amop-bench");

fn bench(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["run", "--help"], &["recover", "--help"], &["analyze", "pmin", "--help"]] {
        let o = bench(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
    }
    let help = stdout(&bench(&["recover", "--help"]));
    for flag in ["--matrix", "--y", "--algo", "--t", "--eps", "--cap-k", "--sparsity", "--max-iters", "--seed"] {
        assert!(help.contains(flag), "{flag} undocumented");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bench(&[]).status.code(), Some(1));
    assert_eq!(bench(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bench(&["analyze", "pmin", "--k-max", "many"]).status.code(), Some(1));
    assert_eq!(bench(&["analyze", "pmin", "--t", "1.5"]).status.code(), Some(1));
}

#[test]
fn spec_errors_exit_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", r#"{"kind":"recovery_percentage","trails":5}"#);
    let o = bench(&["run", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trails"));
}

#[test]
fn runtime_errors_exit_two() {
    let o = bench(&["run", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "s.json", r#"{"kind":"pmin_table","analysis":{"k_max":2}}"#);
    let o = bench(&["run", &p, "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_writes_csv_and_seed_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"kind":"recovery_percentage","N":48,"m":[24],"sparsity":[2],"trials":4,"base_seed":3}"#,
    );
    let out = dir.path().join("out.csv");
    let run = |extra: &[&str]| {
        let mut args = vec!["run", spec.as_str(), "--output", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(bench(&args).status.code(), Some(0));
        std::fs::read_to_string(&out).unwrap()
    };
    let first = run(&[]);
    assert!(first.contains("# base_seed: 3\n"));
    assert_eq!(first, run(&[]));
    let seeded = run(&["--seed", "11"]);
    assert!(seeded.contains("# base_seed: 11\n"));
    assert!(seeded.contains("\"base_seed\":11"));
    let fewer = run(&["--trials", "2"]);
    assert!(fewer.contains(",amop,2,"));
}

#[test]
fn analyze_subcommands_print_tables() {
    let p = stdout(&bench(&["analyze", "pmin", "--k-max", "2", "--t", "0.5"]));
    assert!(p.ends_with("K,t_0.5,romp\n1,1,0.5\n2,0.8,0.5\n"), "{p}");
    let d = stdout(&bench(&["analyze", "drange", "--s-max", "3", "--noise", "0,0.1"]));
    let rows: Vec<&str> = d.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "s,eps_0,eps_0.1");
    assert_eq!(rows.len(), 3);
}

#[test]
fn recover_solves_a_small_real_system() {
    let dir = tempfile::tempdir().unwrap();
    // Identity columns plus a dense one; y picks columns 1 and 3.
    let a = write(dir.path(), "a.txt", "4 6 real\n1 0 0 0 0.5 0.5\n0 1 0 0 0.5 -0.5\n0 0 1 0 0.5 0.5\n0 0 0 1 0.5 -0.5\n");
    let y = write(dir.path(), "y.txt", "# measurements\n4 1 real\n0\n2\n0\n-3\n");
    for algo in ["amop", "omp"] {
        let o = bench(&["recover", "--matrix", &a, "--y", &y, "--algo", algo]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(text.contains("# halt_reason: converged"), "{text}");
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, ["index,re,im", "1,2,0", "3,-3,0"]);
    }
    let o = bench(&["recover", "--matrix", &a, "--y", &y, "--algo", "cosamp"]);
    assert_eq!(o.status.code(), Some(1), "cosamp without --sparsity");
}

#[test]
fn recover_reads_complex_files_and_rejects_bad_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.txt", "2 3 complex\n1 0 0 0 0 1\n0 0 1 0 0 1\n");
    let y = write(dir.path(), "y.txt", "2 1 complex\n0 2\n0 0\n");
    let o = bench(&["recover", "--matrix", &a, "--y", &y, "--algo", "omp", "--eps", "1e-9"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let body: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect();
    assert_eq!(body, ["index,re,im", "0,0,2"]);

    let short = write(dir.path(), "short.txt", "3 1 real\n1\n2\n3\n");
    assert_eq!(bench(&["recover", "--matrix", &a, "--y", &short]).status.code(), Some(1));
    let junk = write(dir.path(), "junk.txt", "2 1 real\n1 x\n");
    assert_eq!(bench(&["recover", "--matrix", &a, "--y", &junk]).status.code(), Some(1));
}
