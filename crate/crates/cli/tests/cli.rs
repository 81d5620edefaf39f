use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lambdaq"))
}

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn pqca_run_prints_state_and_acceptance() {
    let spec = sample("stochastic.pqca");
    let o = run(&["pqca-run", spec.to_str().unwrap(), "--k", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("2/3 [0]"), "{out}");
    assert!(out.contains("1/3 [1]"), "{out}");
    assert!(out.contains("acceptance probability 1/9"), "{out}");
}

#[test]
fn machine_format() {
    let spec = sample("stochastic.pqca");
    let o = run(&["pqca-run", spec.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("config=[0] amplitude=2/3"));
    assert!(stdout(&o).contains("acceptance=1/9"));
}

#[test]
fn strict_unitary_rejects_stochastic_matrix() {
    let spec = sample("stochastic.pqca");
    let o = run(&["pqca-run", spec.to_str().unwrap(), "--strict-unitary"]);
    assert_eq!(code(&o), 2);
    let o = run(&["pqca-run", sample("reflection.pqca").to_str().unwrap(), "--strict-unitary"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn index_errors_are_validation_failures() {
    let spec = scratch(
        "bad_index.pqca",
        "sublattices 1 2 1\nwidth 1\nrow 0 1 0\nrow 1 0 1\ninit 5\n",
    );
    assert_eq!(code(&run(&["pqca-run", spec.to_str().unwrap()])), 2);
}

#[test]
fn malformed_file_is_a_parse_failure() {
    let spec = scratch("bad_syntax.pqca", "sublattices 1 2\n");
    let o = run(&["pqca-run", spec.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(code(&run(&["pqca-run", "/nonexistent/file.pqca"])), 1);
}

#[test]
fn reduce_cancels_and_counts_steps() {
    let t = scratch("cancel.lq", "[a, ~a]");
    let o = run(&["reduce", t.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "[]\nsteps 0\nwork 0\n");

    let t = scratch("beta.lq", r"(\x. [x, x]) a");
    let o = run(&["reduce", t.to_str().unwrap(), "--trace"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("step 1: "), "{out}");
    assert!(out.contains("[a : 2]"), "{out}");
}

#[test]
fn reduce_exit_codes() {
    let omega = scratch("omega.lq", r"(\x. x x) (\x. x x)");
    let o = run(&["reduce", omega.to_str().unwrap(), "--steps", "3"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("fuel exhausted after 3"));

    let bad = scratch("bad.lq", r"(\x. x");
    assert_eq!(code(&run(&["reduce", bad.to_str().unwrap()])), 1);
}

#[test]
fn compile_writes_a_manifest_that_parses_back() {
    let spec = sample("stochastic.pqca");
    let o = run(&["compile", spec.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("\nb 9\n"), "{text}");
    assert!(text.contains("\nt 0 6 3\nt 1 0 9\n"), "{text}");
    let manifest = lambdaq::manifest::parse_manifest(&text).unwrap();
    let compiled = lambdaq::compile::CompiledAutomaton::new(
        &lambdaq::pqca::parse_pqca(&std::fs::read_to_string(&spec).unwrap())
            .unwrap()
            .spec,
        lambdaq::compile::ScalingMode::Product,
    );
    assert!(lambdaq::alpha_eq(&manifest.step_term, &compiled.step_term));

    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("reflection.manifest");
    let o = run(&[
        "compile",
        sample("reflection.pqca").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let written = std::fs::read_to_string(&out).unwrap();
    assert!(lambdaq::manifest::parse_manifest(&written).is_ok());
}

#[test]
fn compare_sample_files() {
    for (name, k) in [("stochastic.pqca", 2), ("reflection.pqca", 2), ("identity.pqca", 3)] {
        let o = run(&["compare", sample(name).to_str().unwrap(), "--k", &k.to_string()]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        assert!(stdout(&o).contains("equal true"));
    }
}

#[test]
fn compare_random_automata() {
    let o = run(&["compare", "--seed", "11", "--count", "4", "--k", "2", "--format", "machine"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("equal=true").count(), 4);
}

#[test]
fn count_total_decoding_mismatch_exits_four() {
    // normalising by the count total is wrong once counts are not all of one sign
    let o = run(&[
        "compare",
        sample("reflection.pqca").to_str().unwrap(),
        "--decode-mode",
        "paper",
    ]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("equal false"));

    let o = run(&[
        "compare",
        sample("stochastic.pqca").to_str().unwrap(),
        "--decode-mode",
        "count-total",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn compare_fuel_exhaustion() {
    let o = run(&["compare", sample("reflection.pqca").to_str().unwrap(), "--steps", "10"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn bench_reports_a_linear_fit() {
    let o = run(&[
        "bench",
        sample("identity.pqca").to_str().unwrap(),
        "--ks",
        "1,2,4",
        "--format",
        "machine",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let steps: Vec<u64> = out
        .lines()
        .filter_map(|l| l.split_whitespace().find_map(|f| f.strip_prefix("steps=")))
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(steps.len(), 3);
    assert_eq!(steps[1], 2 * steps[0]);
    assert_eq!(steps[2], 4 * steps[0]);
    assert!(out.contains("relative_residual=0.000000"), "{out}");
}
