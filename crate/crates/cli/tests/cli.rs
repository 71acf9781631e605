//! End-to-end checks of the command-line surface and its exit-code
//! contract: 0 pass, 1 verification failure, 2 usage/input error.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hopspan")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hopspan-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn build_verify_round_trip_exits_zero() {
    let dir = workdir("round-trip");
    let out = run(&dir, &["gen", "random", "--n", "100", "--m", "400", "--seed", "3", "--output", "g.wel"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(
        &dir,
        &["build", "hopset", "--k", "6", "--f", "identity", "--t", "1", "--seed", "7", "--input", "g.wel", "--output", "h.hopset"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // the build echoes the resolved schedule
    let echo = String::from_utf8_lossy(&out.stdout);
    assert!(echo.contains("\"lambdas\""), "schedule echo missing: {echo}");
    let out = run(
        &dir,
        &["verify", "--graph", "g.wel", "--artifact", "h.hopset", "--report", "rep.json", "--csv", "rows.csv"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("rep.json").exists());
    let csv = std::fs::read_to_string(dir.join("rows.csv")).unwrap();
    assert!(csv.starts_with("u,v,dist,approx,ratio\n"));
    assert!(csv.lines().count() > 100);
}

#[test]
fn verification_failure_exits_one() {
    let dir = workdir("fail");
    run(&dir, &["gen", "random", "--n", "60", "--m", "200", "--seed", "1", "--output", "g.wel"]);
    run(
        &dir,
        &["build", "hopset", "--k", "4", "--f", "identity", "--seed", "0", "--input", "g.wel", "--output", "h.hopset"],
    );
    // stretch 1 within one hop is unsatisfiable on a sparse weighted graph
    let out = run(
        &dir,
        &["verify", "--graph", "g.wel", "--artifact", "h.hopset", "--alpha", "1.0", "--beta", "1"],
    );
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("worst pair"), "{text}");
}

#[test]
fn missing_input_exits_two() {
    let dir = workdir("missing");
    let out = run(
        &dir,
        &["build", "hopset", "--k", "4", "--input", "nope.wel", "--output", "h.hopset"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_tower_without_overrides_exits_two() {
    let dir = workdir("tower-fail");
    let out = run(
        &dir,
        &["gen", "tower", "--k", "2", "--f", "linear", "--alpha", "2", "--a", "1", "--layer-mult", "1000000", "--output", "t.wel"],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n^(1-1/(2k))"), "error should name the violated size remark: {err}");
}

#[test]
fn artifacts_are_byte_identical_per_config() {
    let dir = workdir("determinism");
    run(&dir, &["gen", "random", "--n", "80", "--m", "240", "--seed", "5", "--output", "g.wel"]);
    for (out_name1, out_name2) in [("a.hopset", "b.hopset")] {
        for name in [out_name1, out_name2] {
            let out = run(
                &dir,
                &["build", "hopset", "--k", "5", "--f", "interleaved:2", "--seed", "9", "--input", "g.wel", "--output", name],
            );
            assert!(out.status.success());
        }
        let a = std::fs::read(dir.join(out_name1)).unwrap();
        let b = std::fs::read(dir.join(out_name2)).unwrap();
        assert_eq!(a, b, "artifacts differ across identical runs");
    }
    // generated graphs are deterministic per seed as well
    run(&dir, &["gen", "random", "--n", "80", "--m", "240", "--seed", "5", "--output", "g2.wel"]);
    assert_eq!(
        std::fs::read(dir.join("g.wel")).unwrap(),
        std::fs::read(dir.join("g2.wel")).unwrap()
    );
    // verification reports are byte-identical too, regardless of thread count
    for (threads, name) in [("1", "r1.json"), ("4", "r2.json")] {
        let out = run(
            &dir,
            &["--threads", threads, "verify", "--graph", "g.wel", "--artifact", "a.hopset", "--report", name],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(dir.join("r1.json")).unwrap(),
        std::fs::read(dir.join("r2.json")).unwrap()
    );
}

#[test]
fn results_independent_of_thread_count() {
    let dir = workdir("threads");
    run(&dir, &["gen", "random", "--n", "60", "--m", "200", "--seed", "4", "--output", "g.wel"]);
    let args = [
        "bench", "--k", "4", "--n", "50", "--m", "160", "--schedules", "identity",
        "--alphas", "5", "--graph-seeds", "2", "--sample-seeds", "2",
    ];
    let one = run(&dir, &[&["--threads", "1"], &args[..]].concat());
    let many = run(&dir, &[&["--threads", "4"], &args[..]].concat());
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn gen_cage_petersen_has_expected_size() {
    let dir = workdir("cage");
    let out = run(&dir, &["gen", "cage", "--name", "petersen", "--output", "pet.wel"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("pet.wel")).unwrap();
    let edges = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).count();
    assert_eq!(edges, 15);
    assert!(text.contains("# n=10"));
}

#[test]
fn gen_tower_writes_sidecar_with_layer_map() {
    let dir = workdir("tower");
    let out = run(
        &dir,
        &["gen", "tower", "--k", "2", "--f", "identity", "--alpha", "2", "--a", "1", "--layer-mult", "2", "--towers", "3", "--top-layer", "5", "--output", "t.wel"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("t.tower.json")).unwrap()).unwrap();
    assert_eq!(sidecar["towers"], 3);
    assert_eq!(sidecar["non_asymptotic"], true);
    assert!(sidecar["layer_map"].as_array().unwrap().len() == 3);
    assert!(sidecar["schedule"]["lambdas"].as_array().is_some());
}

#[test]
fn bench_emits_csv_rows() {
    let dir = workdir("bench");
    let out = run(
        &dir,
        &["bench", "--k", "3", "--n", "50", "--m", "150", "--schedules", "linear,identity", "--alphas", "5,7", "--graph-seeds", "1", "--sample-seeds", "1"],
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("schedule,graph_seed,sample_seed,n,m,hopset_edges,alpha,beta_star")
    );
    assert_eq!(lines.count(), 4, "two schedules x two alphas");
}

#[test]
fn trace_validates_certificates() {
    let dir = workdir("trace");
    run(&dir, &["gen", "random", "--n", "70", "--m", "250", "--seed", "2", "--output", "g.wel"]);
    let out = run(
        &dir,
        &["trace", "--graph", "g.wel", "--k", "6", "--f", "identity", "--t", "1", "--seed", "4", "--pairs", "50", "--pair-seed", "8", "--report", "certs.json"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let certs: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("certs.json")).unwrap()).unwrap();
    assert!(!certs.as_array().unwrap().is_empty());
}

#[test]
fn spanner_half_verify_checks_multiple_t() {
    let dir = workdir("half");
    run(&dir, &["gen", "random", "--n", "90", "--m", "260", "--seed", "6", "--unweighted", "--output", "g.wel"]);
    let out = run(
        &dir,
        &["build", "spanner-half", "--k", "8", "--f", "identity", "--seed", "1", "--input", "g.wel", "--output", "s.spanner"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // lambdas echo as exact thirds
    let echo = String::from_utf8_lossy(&out.stdout);
    assert!(echo.contains("1/3"), "{echo}");
    let out = run(&dir, &["verify", "--graph", "g.wel", "--artifact", "s.spanner"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("pass").count(), 3, "three t values verified: {text}");
}

#[test]
fn levels_json_injection_is_honored() {
    let dir = workdir("levels");
    run(&dir, &["gen", "random", "--n", "30", "--m", "90", "--seed", "9", "--output", "g.wel"]);
    // identity k=4 has depth F=3; force one vertex to the top effective level
    let mut levels = vec![0u32; 30];
    levels[7] = 2;
    let la = serde_json::json!({
        "levels": levels,
        "seed": null,
        "depth": 3,
        "top_nonempty": false,
    });
    std::fs::write(dir.join("levels.json"), la.to_string()).unwrap();
    let out = run(
        &dir,
        &["build", "hopset", "--k", "4", "--f", "identity", "--input", "g.wel", "--levels-json", "levels.json", "--output", "h.hopset"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let artifact = std::fs::read_to_string(dir.join("h.hopset")).unwrap();
    // vertex 7 is everyone's level-2 pivot, so pivot edges at level 2 exist
    assert!(artifact.contains("pivot:2"), "{artifact}");
}
