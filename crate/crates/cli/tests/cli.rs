use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value as Json};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nonadd"));
    c.env_remove("NONADD_BUDGET");
    c
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn nonadd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Json {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &tempfile::TempDir, name: &str, v: &Json) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn counterexample_gould_diverges() {
    let f = corpus("counterexample.json");
    let o = run(&["integrate", p(&f), "--engine", "gould", "--json"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    let v = json_out(&o);
    assert_eq!(v["status"], "divergent");
    let sigmas: Vec<String> = v["certificate"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["sigma"][0]["decimal"].as_str().unwrap().to_string())
        .collect();
    assert!(sigmas.len() >= 10);
    for (i, s) in sigmas.iter().enumerate() {
        assert_eq!(s, &(i + 1).to_string());
    }
}

#[test]
fn counterexample_rl_and_bs_are_zero() {
    let f = corpus("counterexample.json");
    for engine in ["rl", "bs"] {
        let o = run(&["integrate", p(&f), "--engine", engine, "--json"]);
        assert_eq!(o.status.code(), Some(0));
        let v = json_out(&o);
        assert_eq!(v["status"], "value");
        assert_eq!(v["value"][0]["num"], "0");
        assert_eq!(v["radius"], 0.0);
    }
}

#[test]
fn zero_function_is_zero_everywhere() {
    let f = corpus("zero_function.json");
    for engine in ["rl", "bs", "gould"] {
        let o = run(&["integrate", p(&f), "--engine", engine, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{engine}");
        assert_eq!(json_out(&o)["value"][0]["num"], "0", "{engine}");
    }
}

#[test]
fn worked_variations() {
    let cases = [
        ("pointmass_123.json", None, json!("6")),
        ("pointmass_123.json", Some("finite:[0,2]"), json!("4")),
        ("table_square.json", None, json!("16")),
    ];
    for (file, set, want) in cases {
        let f = corpus(file);
        let mut args = vec!["variation", p(&f)];
        if let Some(s) = set {
            args.extend(["--set", s]);
        } else {
            args.extend(["--set", "all"]);
        }
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0));
        let v = json_out(&o);
        assert_eq!(v["variation"]["num"], want, "{file}");
        assert_eq!(v["variation"]["den"], "1");
    }
    let o = run(&["variation", p(&corpus("cardclass_infinite.json"))]);
    assert_eq!(json_out(&o)["variation"], "inf");
}

#[test]
fn broken_table_is_skipped_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    // m({0}) > m({0,1}): not monotone, so the order theorems must skip
    let s = write(
        &dir,
        "broken.json",
        &json!({
            "version": 1,
            "ground": {"finite": 2},
            "measure": {"table": [0, 3, 1, 2]},
            "function": {"table": [1, 2]},
            "g": {"table": [2, 2]}
        }),
    );
    let report = dir.path().join("report.json");
    let o = run(&[
        "verify",
        "--count",
        "0",
        "--scenario",
        p(&s),
        "--report",
        p(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: Json = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["failures"], 0);
    let theorems = r["theorems"].as_array().unwrap();
    let t = theorems
        .iter()
        .find(|t| t["theorem"] == "monotone-indefinite")
        .unwrap();
    assert_eq!(t["skips"].as_array().unwrap().len(), 1);
    assert!(t["skips"][0]["reason"]
        .as_str()
        .unwrap()
        .contains("monotone"));
}

#[test]
fn trace_sigma_counts_up() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = run(&["trace", p(&corpus("counterexample.json")), "--csv", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["step", "k_blocks", "sigma_0", "radius"]
    );
    let sigma: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[2].parse().unwrap())
        .collect();
    assert!(sigma.len() >= 10);
    for (i, s) in sigma.iter().enumerate() {
        assert_eq!(*s, (i + 1) as f64);
    }
}

#[test]
fn output_is_deterministic() {
    let runs = [
        vec!["integrate", "--engine", "gould", "--json"],
        vec!["trace"],
        vec!["properties"],
    ];
    for file in [
        "counterexample.json",
        "pointmass_geometric.json",
        "sqrt_distortion.json",
    ] {
        let f = corpus(file);
        for args in &runs {
            let mut a = args.clone();
            a.insert(1, p(&f));
            let x = run(&a);
            let y = run(&a);
            assert_eq!(x.stdout, y.stdout, "{file} {args:?}");
            assert!(!x.stdout.is_empty());
        }
    }
    let v = ["verify", "--count", "3", "--seed", "7"];
    assert_eq!(run(&v).stdout, run(&v).stdout);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(
        &dir,
        "unknown.json",
        &json!({"version": 1, "ground": "omega", "measure": {"cardclass": {"0": 0, "inf": 1}}, "extra": 1}),
    );
    assert_eq!(run(&["properties", p(&unknown)]).status.code(), Some(1));
    assert_eq!(
        run(&["integrate", "/nonexistent.json"]).status.code(),
        Some(1)
    );
    // atoms are only decided on finite grounds
    let o = run(&["atoms", p(&corpus("counterexample.json"))]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn budget_precedence() {
    let f = corpus("counterexample.json");
    let steps = |o: &Output| json_out(o)["certificate"].as_array().unwrap().len();
    let base = run(&["integrate", p(&f), "--engine", "gould", "--json"]);
    let env = bin()
        .args(["integrate", p(&f), "--engine", "gould", "--json"])
        .env("NONADD_BUDGET", "depth=5")
        .output()
        .unwrap();
    let flag = bin()
        .args([
            "integrate",
            p(&f),
            "--engine",
            "gould",
            "--json",
            "--budget",
            "depth=8",
        ])
        .env("NONADD_BUDGET", "depth=5")
        .output()
        .unwrap();
    assert!(steps(&env) < steps(&base));
    assert!(steps(&env) < steps(&flag) && steps(&flag) < steps(&base));
    let bad = bin()
        .args(["integrate", p(&f), "--engine", "gould"])
        .env("NONADD_BUDGET", "depth=lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn corpus_verify_passes() {
    let dir = corpus("");
    let o = run(&["verify", "--count", "5", "--corpus", p(&dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("failures: 0"));
}

#[test]
fn scenarios_match_schema() {
    let schema: Json = serde_json::from_str(
        &std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/scenario.schema.json"),
        )
        .unwrap(),
    )
    .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let mut seen = 0;
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let v: Json = serde_json::from_str(&text).unwrap();
        assert!(validator.is_valid(&v), "{}", path.display());
        // what the loader writes back is valid too
        let loaded = nonadd::literal::ScenarioFile::parse(&text)
            .unwrap()
            .load()
            .unwrap();
        let back = serde_json::to_value(loaded.to_file()).unwrap();
        assert!(
            validator.is_valid(&back),
            "{} after round trip",
            path.display()
        );
        seen += 1;
    }
    assert!(seen >= 7);
    let bad = json!({"version": 1, "ground": "omega", "measure": {"family": "table", "values": [0], "x": 1}});
    assert!(!validator.is_valid(&bad));
}
