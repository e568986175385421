use std::path::{Path, PathBuf};

use dynpaths::cli::run_cli;

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dynpaths-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("dynpaths").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn gen_to(path: &Path, args: &[&str]) {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let (code, _, err) = cli(&full);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn gen_is_deterministic() {
    let a = cli(&["gen", "oumv-fully", "--n", "4", "--alpha", "0", "--beta", "0", "--seed", "7"]);
    let b = cli(&["gen", "oumv-fully", "--n", "4", "--alpha", "0", "--beta", "0", "--seed", "7"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert!(a.1.starts_with("# dynpaths-script v1"));
}

#[test]
fn random_script_is_legal_and_oracle_verifies() {
    let p = tmp("random.txt");
    gen_to(&p, &["random", "--n", "64", "--p", "0.1", "--updates", "200", "--seed", "1"]);
    let text = std::fs::read_to_string(&p).unwrap();
    dynpaths::graph::script::UpdateScript::parse(&text).unwrap().validate().unwrap();
    let (code, out, _) = cli(&["verify", "--structure", "bfs-oracle", "--script", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS"));
}

#[test]
fn exact_apsp_verifies_on_seeded_scripts() {
    for seed in 0..5 {
        let p = tmp(&format!("apsp-{seed}.txt"));
        let s = seed.to_string();
        gen_to(&p, &["random", "--n", "20", "--p", "0.15", "--updates", "30", "--seed", &s]);
        let (code, out, err) =
            cli(&["verify", "--structure", "exact-apsp", "--script", p.to_str().unwrap(), "--seed", &s]);
        assert_eq!(code, 0, "{out}{err}");
    }
}

#[test]
fn kcycle_triangle_expects_one() {
    let g = tmp("tri.txt");
    std::fs::write(&g, "N 3 1\nE 0 1\nE 1 2\nE 2 0\n").unwrap();
    let s = tmp("tri-script.txt");
    gen_to(&s, &["kcycle", "--k", "3", "--mode", "fully", "--seed", "3", "--graph", g.to_str().unwrap()]);
    let (code, out, _) = cli(&["run", "--structure", "bfs-oracle", "--script", s.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# dynpaths-harness v1"));
    let rows: Vec<&str> = out.lines().skip(2).collect();
    assert!(rows.iter().any(|r| r.split(',').nth(1) == Some("1")));
    assert!(rows.iter().all(|r| r.split(',').nth(1) == r.split(',').nth(2)));
}

#[test]
fn spanner_run_reports_sizes_and_audit() {
    let p = tmp("sp.txt");
    gen_to(&p, &["random", "--n", "30", "--p", "0.2", "--updates", "20", "--seed", "4"]);
    let (code, out, _) = cli(&["run", "--structure", "spanner-comb", "--script", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.ends_with("audit-ok")));
    assert!(out.contains("# audit updates=20 violations=0"));
}

#[test]
fn run_output_is_byte_identical() {
    let p = tmp("ident.txt");
    gen_to(&p, &["oumv-inc", "--n", "3", "--beta", "1", "--seed", "2"]);
    let a = cli(&["run", "--structure", "exact-apsp", "--script", p.to_str().unwrap()]);
    let b = cli(&["run", "--structure", "exact-apsp", "--script", p.to_str().unwrap()]);
    assert_eq!(a, b);
}

#[test]
fn verify_failure_exits_one() {
    let p = tmp("wrong.txt");
    std::fs::write(&p, "N 3 0\nE 0 1\nE 1 2\nQD 0 2 1\n").unwrap();
    let (code, out, _) = cli(&["verify", "--structure", "bfs-oracle", "--script", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("first mismatch: step 0"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cli(&["run", "--structure", "nope", "--script", "x"]).0, 2);
    assert_eq!(cli(&["frobnicate"]).0, 2);
    assert_eq!(cli(&["run", "--structure", "bfs-oracle", "--script", "/nonexistent/file"]).0, 2);
    let p = tmp("eps.txt");
    std::fs::write(&p, "N 2 0\n").unwrap();
    assert_eq!(cli(&["run", "--structure", "approx-apsp", "--script", p.to_str().unwrap(), "--eps=0"]).0, 2);
    assert_eq!(cli(&["--help"]).0, 0);
}

#[test]
fn bench_reports_percentiles() {
    let p = tmp("bench.txt");
    gen_to(&p, &["random", "--n", "16", "--p", "0.2", "--updates", "10", "--seed", "9"]);
    let (code, out, _) = cli(&[
        "bench",
        "--structure",
        "path-reporter",
        "--script",
        p.to_str().unwrap(),
        "--repeat",
        "2",
        "--warmup",
        "0",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# dynpaths-bench v1"));
    assert!(out.lines().any(|l| l.starts_with("update,20,")));
}
