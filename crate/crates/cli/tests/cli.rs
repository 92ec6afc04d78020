//! End-to-end tests of the command line: the generate → reduce → solve →
//! verify chain, exit codes, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bicrit"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn assert_code(out: &Output, want: i32) {
    assert_eq!(
        out.status.code(),
        Some(want),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn strong_pipeline_runs_green() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_code(
        &run(d, &["gen-source", "--kind", "threepartition", "--m", "2", "--planted", "--seed", "4", "--out", &path(d, "src.json")]),
        0,
    );
    assert_code(
        &run(d, &["reduce", "--kind", "strong", "--input", &path(d, "src.json"), "--output", &path(d, "inst.json")]),
        0,
    );
    for suite in ["identities", "lemmas", "sweep", "roundtrip"] {
        let mut args = vec!["verify", "--input", "inst.json", "--suite", suite, "--samples", "100"];
        let sidecar = path(d, "src.solution.json");
        if suite == "roundtrip" {
            args.extend(["--solution", &sidecar]);
        }
        assert_code(&run(d, &args), 0);
    }
    assert_code(&run(d, &["solve", "--input", &path(d, "inst.json")]), 0);
}

#[test]
fn weak_pipeline_runs_green() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_code(
        &run(d, &["gen-source", "--kind", "partition", "--n", "3", "--value-max", "4", "--planted", "--seed", "9", "--out", &path(d, "src.json")]),
        0,
    );
    assert_code(
        &run(d, &["reduce", "--kind", "weak", "--input", &path(d, "src.json"), "--output", &path(d, "inst.json")]),
        0,
    );
    for suite in ["lemmas", "sweep", "roundtrip"] {
        assert_code(&run(d, &["verify", "--input", "inst.json", "--suite", suite, "--samples", "100"]), 0);
    }
}

#[test]
fn deterministic_outputs_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["a.json", "b.json"] {
        assert_code(
            &run(d, &["gen-source", "--kind", "threepartition", "--m", "3", "--planted", "--seed", "42", "--out", &path(d, name)]),
            0,
        );
    }
    assert_eq!(fs::read(d.join("a.json")).unwrap(), fs::read(d.join("b.json")).unwrap());
    assert_eq!(
        fs::read(d.join("a.solution.json")).unwrap(),
        fs::read(d.join("b.solution.json")).unwrap()
    );

    // The full chain stays byte-identical as well.
    for (src, inst, res) in [("a.json", "ia.json", "ra.json"), ("b.json", "ib.json", "rb.json")] {
        assert_code(&run(d, &["reduce", "--kind", "strong", "--input", &path(d, src), "--output", &path(d, inst)]), 0);
        assert_code(&run(d, &["verify", "--input", &path(d, inst), "--suite", "lemmas", "--seed", "7", "--samples", "50", "--out", &path(d, res)]), 0);
    }
    assert_eq!(fs::read(d.join("ia.json")).unwrap(), fs::read(d.join("ib.json")).unwrap());
    assert_eq!(fs::read(d.join("ra.json")).unwrap(), fs::read(d.join("rb.json")).unwrap());
}

#[test]
fn exit_codes_cover_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let tiny = r#"{
        "jobs": [
            {"id": 0, "p": "2", "d": "2", "tag": {"kind": "plain"}},
            {"id": 1, "p": "3", "d": "4", "tag": {"kind": "plain"}},
            {"id": 2, "p": "2", "d": "5", "tag": {"kind": "plain"}}
        ],
        "variant": {"kind": "none"}
    }"#;
    fs::write(d.join("tiny.json"), tiny).unwrap();

    // 0: solvable.
    assert_code(&run(d, &["solve", "--input", "tiny.json", "--variant", "constraint", "--ell", "3"]), 0);
    // 3: bound below the EDD optimum.
    assert_code(&run(d, &["solve", "--input", "tiny.json", "--variant", "constraint", "--ell", "1"]), 3);
    // 4: enumeration budget of one subset.
    assert_code(
        &run(d, &["solve", "--input", "tiny.json", "--variant", "constraint", "--ell", "3", "--budget-subsets", "1"]),
        4,
    );
    // 2: precondition violation in a reduction.
    assert_code(
        &run(d, &["reduce", "--kind", "lexgadget", "--input", "tiny.json", "--output", "x.json", "--ell", "99"]),
        2,
    );
    // 2: unparsable input.
    fs::write(d.join("garbage.json"), "{").unwrap();
    assert_code(&run(d, &["solve", "--input", "garbage.json", "--variant", "brute"]), 2);
    // 2: float smuggled into an exact field.
    fs::write(
        d.join("float.json"),
        r#"{"jobs":[{"id":0,"p":1.5,"d":"2","tag":{"kind":"plain"}}],"variant":{"kind":"none"}}"#,
    )
    .unwrap();
    assert_code(&run(d, &["solve", "--input", "float.json", "--variant", "brute"]), 2);
}

#[test]
fn verification_failure_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_code(
        &run(d, &["gen-source", "--kind", "threepartition", "--m", "1", "--planted", "--seed", "2", "--out", &path(d, "src.json")]),
        0,
    );
    assert_code(
        &run(d, &["reduce", "--kind", "strong", "--input", &path(d, "src.json"), "--output", &path(d, "inst.json")]),
        0,
    );
    // Corrupt one processing time; the identity suite must notice.
    let text = fs::read_to_string(d.join("inst.json")).unwrap();
    let mut inst: serde_json::Value = serde_json::from_str(&text).unwrap();
    let p = inst["jobs"][3]["p"].as_str().unwrap().parse::<i128>().unwrap();
    inst["jobs"][3]["p"] = serde_json::Value::String((p + 1).to_string());
    fs::write(d.join("bad.json"), serde_json::to_string(&inst).unwrap()).unwrap();
    assert_code(&run(d, &["verify", "--input", "bad.json", "--suite", "identities"]), 5);
    assert_code(&run(d, &["verify", "--input", "bad.json", "--suite", "lemmas", "--samples", "60"]), 5);
}

#[test]
fn manifest_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_code(
        &run(d, &[
            "--manifest", &path(d, "m.json"),
            "gen-source", "--kind", "partition", "--n", "4", "--seed", "5", "--out", &path(d, "s.json"),
        ]),
        0,
    );
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("m.json")).unwrap()).unwrap();
    assert_eq!(manifest["rng"], "chacha8");
    assert_eq!(manifest["seed"], 5);
    assert!(manifest["command"].as_array().unwrap().iter().any(|v| v == "gen-source"));
    assert_eq!(manifest["outputs"][0], path(d, "s.json"));
}

#[test]
fn strict_mode_rejects_wrong_group_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("src.json"), r#"{"kind":"threepartition","a":["1","1","2"],"m":2}"#).unwrap();
    assert_code(
        &run(d, &["reduce", "--kind", "strong", "--input", "src.json", "--output", "x.json", "--strict-3partition"]),
        2,
    );
}

fn _unused(_: PathBuf) {}
