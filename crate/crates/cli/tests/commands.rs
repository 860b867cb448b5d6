use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use finsler_robin::radial::wulff_secular;
use finsler_robin_cli::{cache_key, Cache, Outcome, RunConfig, CACHE_DIR_ENV};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_in(dir: &Path, args: &[&str], config: &str, env: &[(&str, &Path)]) -> Run {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_finsler-robin"));
    cmd.args(args)
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .env_remove(CACHE_DIR_ENV);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().unwrap();
    Run {
        code: status.code().unwrap(),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn run(args: &[&str], config: &str) -> (Run, TempDir) {
    let dir = TempDir::new().unwrap();
    let r = run_in(dir.path(), args, config, &[]);
    (r, dir)
}

fn summary(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {} / {}", r.stdout, r.stderr))
}

fn read(dir: &TempDir, name: &str) -> String {
    fs::read_to_string(dir.path().join("out").join(name)).unwrap()
}

#[test]
fn eig_on_wulff_domains() {
    let (r, _d) = run(
        &["eig"],
        r#"{"norm":{"family":"euclidean"},"domain":{"wulff":{"radius":1}},"alpha":0}"#,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(summary(&r)["results"][0]["lambda"], 0.0);

    let (r, d) = run(
        &["eig"],
        r#"{"norm":{"family":"lp","p":3},"domain":{"wulff":{"radius":1}},"alpha":-1,
            "output":{"eigenfunction":true},"solver":{"n_nodes":500}}"#,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lib = wulff_secular(1.0, -1.0).unwrap();
    let got = &summary(&r)["results"][0]["lambda"];
    assert_eq!(got.to_string(), serde_json::to_string(&lib).unwrap());
    assert_eq!(got.as_f64(), Some(lib));
    let csv = read(&d, "eigenfunction.csv");
    assert!(csv.starts_with("r,phi\n"));
    assert_eq!(csv.lines().count(), 501);
    assert_eq!(read(&d, "summary.json"), r.stdout);
}

#[test]
fn eig_sweep_on_polygon_and_annulus() {
    let (r, d) = run(
        &["eig"],
        r#"{"norm":{"family":"euclidean"},"domain":{"vertices":[[0,0],[1,0],[1,1],[0,1]]},
            "alpha":{"sweep":{"from":-1,"to":0,"n":3}},"solver":{"refinements":3},
            "output":{"eigenfunction":true},"workers":2}"#,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = summary(&r);
    assert_eq!(s["method"], "fem");
    let rows = s["results"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["lambda"], 0.0);
    let l: Vec<f64> = rows.iter().map(|v| v["lambda"].as_f64().unwrap()).collect();
    assert!(l[0] < l[1] && l[1] < 0.0);
    for row in rows {
        assert!(
            row["lambda"].as_f64().unwrap() <= row["pf_over_v_bound"].as_f64().unwrap() + 1e-12
        );
    }
    assert!(read(&d, "eigenfunction_002.csv").starts_with("x,y,u\n"));

    let (r, _d) = run(
        &["eig"],
        r#"{"norm":{"family":"euclidean"},"domain":{"annulus":{"r1":0.5,"r2":1}},"alpha":-1}"#,
    );
    assert_eq!(r.code, 0);
    assert_eq!(summary(&r)["domain"], "annulus");
}

#[test]
fn exit_codes() {
    let (r, _d) = run(
        &["eig"],
        r#"{"norm":{"family":"hexagonal"},"domain":{"wulff":{"radius":1}},"alpha":-1}"#,
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("`norm.family`"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let (r, _d) = run(
        &["eig"],
        r#"{"norm":{"family":"euclidean"},"domain":{"wulff":{"radius":1}}}"#,
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("`alpha`"), "{}", r.stderr);

    let (r, _d) = run(
        &["geom"],
        r#"{"norm":{"family":"euclidean"},"domain":{"annulus":{"r1":0.5,"r2":1}}}"#,
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("`domain`"));

    // Two iterations cannot meet a zero residual tolerance.
    let (r, _d) = run(
        &["eig"],
        r#"{"norm":{"family":"lp","p":4},"domain":{"vertices":[[0,0],[1,0],[1,1],[0,1]]},"alpha":-1,
            "solver":{"max_iters":2,"residual_tol":0,"refinements":3}}"#,
    );
    assert_eq!(r.code, 3, "{}", r.stderr);

    // A zero tolerance rejects the nonzero quadratic remainder.
    let (r, _d) = run(
        &["verify", "asymptotics"],
        r#"{"norm":{"family":"euclidean"},"alpha":-1e-3,"solver":{"tolerance":0}}"#,
    );
    assert_eq!(r.code, 1);
    assert_eq!(summary(&r)["failed"], 1);

    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_finsler-robin"))
        .args(["eig", dir.path().join("missing.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_chain_and_area() {
    let square = r#""domain":{"vertices":[[0,0],[1,0],[1,1],[0,1]]}"#;
    let (r, d) = run(
        &["verify", "chain"],
        &format!(r#"{{"norm":{{"family":"euclidean"}},{square},"alpha":-1}}"#),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rec: Value =
        serde_json::from_str(read(&d, "records.jsonl").lines().next().unwrap()).unwrap();
    assert_eq!(rec["verdict"], "pass");
    assert!(rec["quantities"]["margin_parallel"].as_f64().unwrap() > 0.0);
    assert_eq!(read(&d, "summary.csv").lines().count(), 2);

    let (r, _d) = run(
        &["verify", "area"],
        &format!(
            r#"{{"norm":{{"family":"quadratic","m":[[4,0],[0,1]]}},{square},
                "alpha":{{"sweep":{{"from":-1,"to":0,"n":5}}}},"solver":{{"refinements":3}}}}"#
        ),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = summary(&r);
    assert!(s.as_object().unwrap().contains_key("alpha_star_hat"));
    assert_eq!(s["alpha_star_hat"], -1.0);
    assert_eq!(s["records"], 5);
}

#[test]
fn verify_perimeter_on_wulff_polygon_is_tight() {
    let (r, d) = run(
        &["verify", "perimeter"],
        r#"{"norm":{"family":"euclidean"},"domain":{"wulff":{"radius":1,"sides":128}},"alpha":-0.1}"#,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rec: Value = serde_json::from_str(read(&d, "records.jsonl").trim()).unwrap();
    let margin = rec["quantities"]["margin"].as_f64().unwrap();
    let tol = rec["tolerance"].as_f64().unwrap();
    assert!(margin.abs() <= 10.0 * tol, "{margin}");
}

#[test]
fn curves_are_deterministic() {
    let cfg = r#"{"norm":{"family":"euclidean"},"alpha":{"sweep":{"from":-0.2,"to":-0.01,"n":2}},"checks":{"epsilon":0.1}}"#;
    let (a, da) = run(&["curves"], cfg);
    let (b, db) = run(&["curves"], cfg);
    assert_eq!(a.code, 0, "{}", a.stderr);
    let csv = read(&da, "curves.csv");
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("alpha,gamma_A,gamma_B"));
    assert_eq!(csv, read(&db, "curves.csv"));
    assert_eq!(read(&da, "curves.svg"), read(&db, "curves.svg"));
    assert_eq!(a.stdout, b.stdout);
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] <= v[2], "{line}");
    }
    let svg = read(&da, "curves.svg");
    assert!(svg.contains(r#"viewBox="0 0 800 600""#));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("Gamma_A") && svg.contains("Gamma_B"));

    let (r, _d) = run(&["curves"], r#"{"norm":{"family":"euclidean"},"alpha":-1}"#);
    assert_eq!(r.code, 2);
}

#[test]
fn geom_and_norm_check() {
    let (r, d) = run(
        &["geom"],
        r#"{"norm":{"family":"euclidean"},"domain":{"vertices":[[0,0],[3,0],[3,1],[0,1]]},"checks":{"samples":100}}"#,
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = summary(&r);
    assert_eq!(s["area"], 3.0);
    assert_eq!(s["anis_perimeter"], 8.0);
    assert!((s["inradius"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(read(&d, "profile.csv").lines().count(), 102);

    let cfg = r#"{"norm":{"family":"quadratic","m":[[2,0.5],[0.5,1]]},"seed":11,"checks":{"samples":300}}"#;
    let (a, _da) = run(&["norm-check"], cfg);
    let (b, _db) = run(&["norm-check"], cfg);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(summary(&a)["identities"].as_array().unwrap().len(), 6);

    let (r, _d) = run(&["norm-check"], r#"{"norm":{"family":"euclidean"}}"#);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("`seed`"));
}

#[test]
fn results_are_cached_by_content() {
    let cache = TempDir::new().unwrap();
    let work = TempDir::new().unwrap();
    let cfg = r#"{"norm":{"family":"euclidean"},"domain":{"wulff":{"radius":2}},"alpha":{"sweep":{"from":-3,"to":-1,"n":3}}}"#;
    let env = [(CACHE_DIR_ENV, cache.path())];
    let first = run_in(work.path(), &["-v", "eig"], cfg, &env);
    assert!(first.stderr.contains("cache miss"), "{}", first.stderr);
    let second = run_in(work.path(), &["-v", "eig"], cfg, &env);
    assert!(second.stderr.contains("cache hit"), "{}", second.stderr);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(fs::read_dir(cache.path()).unwrap().count(), 1);

    // Thread count and output location do not change the key; the norm does.
    let parsed = RunConfig::parse(cfg).unwrap();
    let mut moved = parsed.clone();
    moved.workers = Some(3);
    moved.output.dir = "elsewhere".into();
    let eig = finsler_robin_cli::Command::Eig;
    assert_eq!(cache_key(&eig, &parsed), cache_key(&eig, &moved));
    let mut other = parsed.clone();
    other.norm = finsler_robin::NormSpec::Lp { p: 3.0 };
    assert_ne!(cache_key(&eig, &parsed), cache_key(&eig, &other));
    assert_ne!(
        cache_key(&eig, &parsed),
        cache_key(&finsler_robin_cli::Command::Geom, &parsed)
    );

    // A hit is served without recomputing.
    let store = Cache::new(cache.path());
    let key = cache_key(&eig, &parsed);
    let mut doctored: Outcome = store.load(&key).unwrap();
    doctored.summary["marker"] = Value::from("from cache");
    store.store(&key, &doctored).unwrap();
    let third = run_in(work.path(), &["eig"], cfg, &env);
    assert_eq!(summary(&third)["marker"], "from cache");
}

#[test]
fn worker_count_does_not_change_results() {
    let base = r#""norm":{"family":"lp","p":4},"domain":{"vertices":[[0,0],[2,0],[1,1.5]]},
        "alpha":{"sweep":{"from":-2,"to":-0.5,"n":4}},"solver":{"refinements":3}"#;
    let (a, _da) = run(&["eig"], &format!("{{{base},\"workers\":1}}"));
    let (b, _db) = run(&["eig"], &format!("{{{base},\"workers\":4}}"));
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
}
