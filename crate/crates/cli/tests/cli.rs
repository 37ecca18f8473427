use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use degenlab_cli::config::{parse, validate, Experiment, Severity};
use degenlab_cli::output::{format_float, Value};
use degenlab_cli::run;
use serde_json::Value as Json;

fn degenlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degenlab")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn records(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn stderr_json(out: &Output) -> Json {
    serde_json::from_slice(&out.stderr).expect("stderr carries a JSON error object")
}

#[test]
fn hardy_gamma_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = degenlab(&["hardy", "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = records(&dir.path().join("run/results.csv"));
    assert_eq!(rows.len(), 1);
    let get = |name: &str| rows[0][column(&h, name)].clone();
    assert!((get("lhs").parse::<f64>().unwrap() - 0.0625).abs() < 1e-8);
    assert!((get("rhs").parse::<f64>().unwrap() - 0.25).abs() < 1e-8);
    assert_eq!(get("holds"), "true");
    assert_eq!(get("experiment"), "hardy");
}

#[test]
fn theta_sweep_flags_window_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.toml", "experiment = \"theta-sweep\"\n[theta_sweep]\np = [2.0]\n");
    let out = degenlab(&["theta-sweep", "--config", &cfg, "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = records(&dir.path().join("run/results.csv"));
    let (kind, theta, blowup) = (column(&h, "kind"), column(&h, "theta"), column(&h, "blowup"));
    let flagged: Vec<f64> = rows
        .iter()
        .filter(|r| r[kind] == "endpoint" && r[blowup] == "true")
        .map(|r| r[theta].parse().unwrap())
        .collect();
    assert_eq!(flagged, vec![-2.0, 0.0]);
    assert!(rows.iter().filter(|r| r[kind] == "ratio").all(|r| r[blowup] == "false"));
    let summary: Json = serde_json::from_str(&fs::read_to_string(dir.path().join("run/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["sweeps"][0]["blowup_flags"], serde_json::json!([-2.0, 0.0]));
}

#[test]
fn empty_data_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["solve-elliptic", "euler-exact", "solve-parabolic"] {
        let cfg = write(dir.path(), "empty.toml", "[problem]\nf = []\nbig_f = []\n");
        let out = degenlab(&[kind, "--config", &cfg, "--out", kind], dir.path());
        assert!(out.status.success(), "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        let (h, rows) = records(&dir.path().join(kind).join("results.csv"));
        let u = column(&h, "u");
        assert!(!rows.is_empty() && rows.iter().all(|r| r[u].parse::<f64>().unwrap() == 0.0), "{kind}");
    }
}

#[test]
fn identical_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ink.toml",
        "experiment = \"ink-spots\"\nseed = 11\n[ink]\nrandom_sets = 4\ngamma = [0.6, 0.3]\nweight_exponent = 0.5\n",
    );
    let run_to = |out: &str, extra: &[&str]| {
        let mut args = vec!["run", "--config", cfg.as_str(), "--out", out];
        args.extend_from_slice(extra);
        let o = degenlab(&args, dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(dir.path().join(out).join("results.csv")).unwrap()
    };
    let a = run_to("a", &[]);
    let b = run_to("b", &["--threads", "3"]);
    let c = run_to("c", &["--seed", "12"]);
    assert_eq!(a, b);
    assert_ne!(a, c);

    let bumps = write(dir.path(), "norms.toml", "[norms]\ncount = 5\ntheta = [1.0, -1.0]\n");
    let n1 = degenlab(&["norms", "--config", &bumps, "--seed", "3", "--out", "n1"], dir.path());
    let n2 = degenlab(&["norms", "--config", &bumps, "--seed", "3", "--out", "n2"], dir.path());
    assert!(n1.status.success() && n2.status.success());
    assert_eq!(fs::read(dir.path().join("n1/results.csv")).unwrap(), fs::read(dir.path().join("n2/results.csv")).unwrap());
}

#[test]
fn rows_carry_hash_and_round_trip_floats() {
    let dir = tempfile::tempdir().unwrap();
    let out = degenlab(&["lambda-sweep", "--out", "run"], dir.path());
    assert!(out.status.success());
    let (h, rows) = records(&dir.path().join("run/results.csv"));
    let summary: Json = serde_json::from_str(&fs::read_to_string(dir.path().join("run/summary.json")).unwrap()).unwrap();
    let hash = summary["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    let hc = column(&h, "config_hash");
    assert!(rows.iter().all(|r| r[hc] == hash));
    for name in ["lambda", "ratio", "lhs", "rhs"] {
        let k = column(&h, name);
        for r in &rows {
            let x: f64 = r[k].parse().unwrap();
            assert_eq!(format_float(x), r[k]);
        }
    }
    let lambdas: Vec<f64> = rows.iter().map(|r| r[column(&h, "lambda")].parse().unwrap()).collect();
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
    assert!(summary["timestamp_unix"].as_u64().unwrap() > 0);
    assert_eq!(summary["rows"].as_u64().unwrap() as usize, rows.len());
}

#[test]
fn float_format_is_seventeen_digits() {
    assert_eq!(format_float(0.1), "1.0000000000000001e-1");
    assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
    assert_eq!(format_float(f64::INFINITY), "inf");
    for x in [std::f64::consts::PI, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }
}

#[test]
fn json_format_writes_results_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = degenlab(&["bs-price", "--out", "run", "--format", "json"], dir.path());
    assert!(out.status.success());
    let rows: Json = serde_json::from_str(&fs::read_to_string(dir.path().join("run/results.json")).unwrap()).unwrap();
    let at_money = rows.as_array().unwrap().iter().find(|r| r["spot"] == 100.0).unwrap();
    assert!((at_money["price_quadrature"].as_f64().unwrap() - 10.4506).abs() < 1e-3);
    assert!(!dir.path().join("run/results.csv").exists());
}

#[test]
fn threads_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_degenlab"))
        .args(["ap-weight", "--out", "run"])
        .env("DEGENLAB_THREADS", "2")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary: Json = serde_json::from_str(&fs::read_to_string(dir.path().join("run/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["threads"], 2);
}

#[test]
fn validate_valid_file_has_no_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ok.toml", "experiment = \"euler-exact\"\nseed = 5\n[exact]\np = 2.0\ntheta = -1.0\n");
    let out = degenlab(&["validate", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let v: Json = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["diagnostics"], serde_json::json!([]));
}

#[test]
fn validate_names_unknown_key() {
    let text = "experiment = \"hardy\"\n[hardy]\np = [2.0]\nthetas = [1.0]\n";
    let (cfg, diags) = validate(text, None);
    assert!(cfg.is_none());
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].field.as_deref(), Some("thetas"));
    assert_eq!(diags[0].line, Some(4));
    assert!(diags[0].message.contains("unknown field"));

    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.toml", text);
    let out = degenlab(&["validate", "--config", &path], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let top = write(dir.path(), "top.toml", "experimnt = \"hardy\"\n");
    let out = degenlab(&["hardy", "--config", &top], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["error"]["kind"], "config");
    assert_eq!(e["error"]["diagnostics"][0]["field"], "experimnt");
    assert_eq!(e["error"]["diagnostics"][0]["line"], 1);
}

#[test]
fn validate_warns_on_window_endpoint() {
    // roots -2 and 1 give the window (-4, 2) at p = 2
    let text = "experiment = \"euler-exact\"\n[problem]\nn_c = 2.0\n[exact]\np = 2.0\ntheta = 2.0\n";
    let (cfg, diags) = validate(text, None);
    assert!(cfg.is_some());
    assert_eq!(diags.len(), 1);
    let d = &diags[0];
    assert_eq!(d.severity, Severity::Warning);
    assert_eq!(d.field.as_deref(), Some("exact.theta"));
    assert_eq!(d.line, Some(6));
    assert!(d.message.contains("window (-4, 2)"), "{}", d.message);
}

#[test]
fn module_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "edge.toml", "[exact]\ntheta = 0.0\n");
    let out = degenlab(&["euler-exact", "--config", &cfg, "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let e = stderr_json(&out);
    assert_eq!(e["error"]["kind"], "module");
    assert_eq!(e["error"]["variant"], "ForbiddenExponent");
}

#[test]
fn semantic_errors_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.toml", "[hardy]\np = [0.5]\n");
    let out = degenlab(&["hardy", "--config", &cfg, "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["diagnostics"][0]["field"], "hardy.p");
    let out = degenlab(&["run", "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = degenlab(&["hardy", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
}

#[test]
fn rows_sorted_by_parameters() {
    let cfg = parse("[ap]\nexponents = [2.0, 0.0, 0.5]\np = [3.0, 2.0]\nresolutions = [1024, 64]\ndoubling = false\n").unwrap();
    let (rows, _) = run(&cfg, Experiment::ApWeight).unwrap();
    let key = |r: &degenlab_cli::output::Row| {
        let num = |k| match r.get(k) {
            Some(Value::Num(x)) => *x,
            Some(Value::Int(i)) => *i as f64,
            _ => f64::NAN,
        };
        (num("exponent"), num("p"), num("resolution"))
    };
    let keys: Vec<_> = rows.iter().map(key).collect();
    assert_eq!(keys.len(), 12);
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "{keys:?}");
}

#[test]
fn hash_ignores_output_and_tracks_seed() {
    let a = parse("seed = 1\n[output]\ndir = \"x\"\n").unwrap();
    let b = parse("seed = 1\n[output]\ndir = \"y\"\nformat = \"json\"\n").unwrap();
    let c = parse("seed = 2\n").unwrap();
    assert_eq!(a.hash(Experiment::Norms), b.hash(Experiment::Norms));
    assert_ne!(a.hash(Experiment::Norms), c.hash(Experiment::Norms));
    assert_ne!(a.hash(Experiment::Norms), a.hash(Experiment::Hardy));
}

#[test]
fn every_kind_runs_with_defaults() {
    let empty = parse("").unwrap();
    for kind in Experiment::ALL {
        let (rows, _) = run(&empty, kind).unwrap_or_else(|e| panic!("{}: {e:?}", kind.as_str()));
        assert!(!rows.is_empty(), "{}", kind.as_str());
        assert!(rows.iter().all(|r| r.get("experiment") == Some(&Value::from(kind.as_str()))));
    }
}

#[test]
fn ap_weight_classifies_examples() {
    let cfg = parse("[ap]\nexponents = [0.5, 2.0]\np = [2.0]\nresolutions = [256]\n").unwrap();
    let (rows, _) = run(&cfg, Experiment::ApWeight).unwrap();
    let outcomes: Vec<&Value> = rows.iter().filter_map(|r| r.get("outcome")).collect();
    assert_eq!(outcomes, vec![&Value::from("holds"), &Value::from("not-applicable")]);
}
