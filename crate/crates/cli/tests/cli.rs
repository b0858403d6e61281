use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use planar_ising::io::{read_model, read_samples, write_moments, write_samples};
use planar_ising::ising::{empirical_moments, IsingModel};
use planar_ising::kacward::brute_force_inference;
use planar_ising::planar::{is_outerplanar, is_planar, Graph};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planar-ising"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn load(p: &Path) -> IsingModel {
    read_model(fs::File::open(p).unwrap()).unwrap().0
}

fn save(p: &Path, m: &IsingModel) {
    planar_ising::io::write_model(fs::File::create(p).unwrap(), m, None).unwrap();
}

fn counterexample() -> IsingModel {
    let mut edges = Vec::new();
    let mut theta = Vec::new();
    for u in 0..5 {
        for v in u + 1..5 {
            if (u, v) != (0, 4) {
                edges.push((u, v));
                theta.push(if matches!((u, v), (1, 2) | (2, 3) | (1, 3)) { 0.1 } else { 1.0 });
            }
        }
    }
    IsingModel::zero_field(Graph::from_edges(5, edges).unwrap(), theta).unwrap()
}

#[test]
fn gen_grid_and_outerplanar() {
    let d = TempDir::new().unwrap();
    let g = path(&d, "grid.json");
    ok(&["gen", "--kind", "grid:7x7", "--seed", "1", "--out", s(&g)]);
    let m = load(&g);
    assert_eq!(m.graph().num_edges(), 84);
    assert!(path(&d, "grid.json.manifest.json").exists());

    let o = path(&d, "outer.json");
    ok(&["gen", "--kind", "outerplanar:12", "--range", "-1,1", "--out", s(&o)]);
    let m = load(&o);
    assert_eq!(m.n(), 12);
    assert!(is_outerplanar(m.graph()));
    assert!(!m.is_zero_field());
}

#[test]
fn usage_errors_exit_two() {
    let d = TempDir::new().unwrap();
    let out = path(&d, "m.json");
    assert_eq!(run(&["gen", "--kind", "torus:3", "--out", s(&out)]).status.code(), Some(2));
    assert_eq!(run(&["fit", "--out", s(&out)]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn sample_is_deterministic_and_sized() {
    let d = TempDir::new().unwrap();
    let m = path(&d, "m.json");
    ok(&["gen", "--kind", "grid:2x2", "--seed", "3", "--out", s(&m)]);
    let a = path(&d, "a.csv");
    let b = path(&d, "b.csv");
    for p in [&a, &b] {
        ok(&["sample", "--model", s(&m), "--num", "20000", "--seed", "5", "--out", s(p)]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let samples = read_samples(fs::File::open(&a).unwrap(), false).unwrap();
    assert_eq!(samples.len(), 20000);

    let model = load(&m);
    let (_, exact) = brute_force_inference(&model).unwrap();
    let emp = empirical_moments(&samples).unwrap();
    for p in model.graph().edges() {
        assert!((emp.pair(*p) - exact.pair(*p)).abs() < 0.03);
    }
}

#[test]
fn sample_rejects_missing_model() {
    let d = TempDir::new().unwrap();
    let out = run(&["sample", "--model", s(&path(&d, "nope.json")), "--num", "3", "--out", s(&path(&d, "x.csv"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fit_independent_data_gives_empty_graph() {
    // full factorial design: every pair is exactly uncorrelated
    let d = TempDir::new().unwrap();
    let rows: Vec<Vec<i8>> = (0..16u32)
        .map(|s| (0..4).map(|v| if s >> v & 1 == 1 { 1 } else { -1 }).collect())
        .collect();
    let data = path(&d, "ind.csv");
    write_samples(fs::File::create(&data).unwrap(), &rows).unwrap();
    let out = path(&d, "fit.json");
    let trace = path(&d, "trace.csv");
    ok(&["fit", "--samples", s(&data), "--stop", "gamma:0.01", "--out", s(&out), "--trace", s(&trace)]);
    assert_eq!(load(&out).graph().num_edges(), 0);
    assert_eq!(fs::read_to_string(&trace).unwrap().lines().count(), 1);
}

#[test]
fn fit_counterexample_moments() {
    let d = TempDir::new().unwrap();
    let (_, mom) = brute_force_inference(&counterexample()).unwrap();
    let mf = path(&d, "mom.csv");
    write_moments(fs::File::create(&mf).unwrap(), &mom).unwrap();
    let out = path(&d, "fit.json");
    let trace = path(&d, "trace.csv");
    ok(&["fit", "--moments", s(&mf), "--stop", "maximal", "--out", s(&out), "--trace", s(&trace)]);
    let g = load(&out);
    assert_eq!(g.graph().num_edges(), 9);
    assert!(g.graph().has_edge(0, 4));
    assert!(!g.graph().has_edge(2, 3));
    let t = fs::read_to_string(&trace).unwrap();
    assert!(t.starts_with("step,u,v,bound_gain,realized_gain,avg_ll,num_edges,newton_iters,rejected\n"));
    assert_eq!(t.lines().count(), 10);
}

#[test]
fn maximal_trace_length_follows_mode_and_cap() {
    let d = TempDir::new().unwrap();
    let m = path(&d, "m.json");
    ok(&["gen", "--kind", "outerplanar:6", "--seed", "2", "--out", s(&m)]);
    let data = path(&d, "s.csv");
    ok(&["sample", "--model", s(&m), "--num", "500", "--out", s(&data)]);
    let cases = [
        ("zero-field", None, 3 * 6 - 6),
        ("mixed", None, 3 * 7 - 6),
        ("zero-field", Some("5"), 5),
    ];
    for (mode, cap, expect) in cases {
        let out = path(&d, "f.json");
        let trace = path(&d, "t.csv");
        let mut args = vec!["fit", "--samples", s(&data), "--mode", mode, "--out", s(&out), "--trace", s(&trace)];
        if let Some(c) = cap {
            args.extend(["--max-edges", c]);
        }
        ok(&args);
        let rows = fs::read_to_string(&trace).unwrap().lines().skip(1).filter(|l| l.ends_with(",0")).count();
        assert_eq!(rows, expect, "{mode} {cap:?}");
    }
    // outer-planar mode starts from the six auxiliary edges
    let out = path(&d, "f.json");
    let trace = path(&d, "t.csv");
    ok(&["fit", "--samples", s(&data), "--mode", "outer-planar", "--out", s(&out), "--trace", s(&trace)]);
    let rows = fs::read_to_string(&trace).unwrap().lines().count() - 1;
    assert_eq!(rows, 3 * 7 - 6 - 6);
    assert!(is_outerplanar(load(&out).graph()));
}

#[test]
fn fit_rejects_bad_values() {
    let d = TempDir::new().unwrap();
    let data = path(&d, "bad.csv");
    fs::write(&data, "x0,x1\n1,-1\n1,2\n").unwrap();
    let out = run(&["fit", "--samples", s(&data), "--out", s(&path(&d, "f.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad value"));

    let zo = path(&d, "zo.csv");
    fs::write(&zo, "a,b\n1,0\n0,0\n1,1\n").unwrap();
    ok(&["fit", "--samples", s(&zo), "--zero-one", "--out", s(&path(&d, "g.json"))]);
}

#[test]
fn fit_reports_nonconvergence_with_exit_three() {
    let d = TempDir::new().unwrap();
    let (_, mom) = brute_force_inference(&counterexample()).unwrap();
    let mf = path(&d, "mom.csv");
    write_moments(fs::File::create(&mf).unwrap(), &mom).unwrap();
    let out = path(&d, "fit.json");
    let r = run(&["fit", "--moments", s(&mf), "--max-iters", "1", "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(3));
    assert!(out.exists());
    let manifest = fs::read_to_string(path(&d, "fit.json.manifest.json")).unwrap();
    assert!(manifest.contains("\"converged\": false"));
}

#[test]
fn infer_examples() {
    let d = TempDir::new().unwrap();
    let m = path(&d, "m.json");
    let out = path(&d, "z.csv");
    save(&m, &IsingModel::zero_field(Graph::cycle(5), vec![0.0; 5]).unwrap());
    ok(&["infer", "--model", s(&m), "--query", "logz", "--out", s(&out)]);
    let v: f64 = fs::read_to_string(&out).unwrap().lines().nth(1).unwrap().parse().unwrap();
    assert!((v - 5.0 * LN_2).abs() < 1e-12);

    save(&m, &IsingModel::zero_field(Graph::from_edges(2, [(0, 1)]).unwrap(), vec![1.0]).unwrap());
    ok(&["infer", "--model", s(&m), "--query", "moments", "--out", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let row = text.lines().find(|l| l.starts_with("0,1,")).unwrap();
    let mu: f64 = row[4..].parse().unwrap();
    assert!((mu - 1f64.tanh()).abs() < 1e-12);
}

#[test]
fn infer_matches_enumeration() {
    let d = TempDir::new().unwrap();
    for (seed, kind) in [(1, "random-planar:12"), (2, "outerplanar:10"), (3, "grid:3x4")] {
        let m = path(&d, "m.json");
        ok(&["gen", "--kind", kind, "--seed", &seed.to_string(), "--out", s(&m)]);
        let model = load(&m);
        let (lz, mom) = brute_force_inference(&model).unwrap();
        let z = path(&d, "z.csv");
        ok(&["infer", "--model", s(&m), "--query", "logz", "--out", s(&z)]);
        let v: f64 = fs::read_to_string(&z).unwrap().lines().nth(1).unwrap().parse().unwrap();
        assert!((v - lz).abs() < 1e-9 * lz.abs().max(1.0));
        let mo = path(&d, "mo.csv");
        ok(&["infer", "--model", s(&m), "--query", "moments", "--out", s(&mo)]);
        for line in fs::read_to_string(&mo).unwrap().lines() {
            let f: Vec<&str> = line.split(',').collect();
            let (exact, got) = match f.len() {
                2 => (mom.mean(f[0].parse().unwrap()), f[1].parse::<f64>().unwrap()),
                _ => (mom.get(f[0].parse().unwrap(), f[1].parse().unwrap()), f[2].parse::<f64>().unwrap()),
            };
            assert!((exact - got).abs() < 1e-8);
        }
    }
}

#[test]
fn infer_nonplanar_field_model_enumerates() {
    let d = TempDir::new().unwrap();
    let m = path(&d, "k4.json");
    // K4 with fields: the extension is K5
    let model = IsingModel::with_fields(Graph::complete(4), vec![0.3; 6], vec![0.2, -0.1, 0.4, 0.1]).unwrap();
    save(&m, &model);
    let out = path(&d, "z.csv");
    ok(&["infer", "--model", s(&m), "--query", "logz", "--out", s(&out)]);
    let manifest = fs::read_to_string(path(&d, "z.csv.manifest.json")).unwrap();
    assert!(manifest.contains("enumeration"));
}

#[test]
fn eval_and_dot() {
    let d = TempDir::new().unwrap();
    let m = path(&d, "m.json");
    save(&m, &IsingModel::independent(3));
    let data = path(&d, "s.csv");
    fs::write(&data, "a,b,c\n1,1,-1\n-1,1,1\n").unwrap();
    let out = ok(&["eval", "--model", s(&m), "--samples", s(&data)]);
    let ll: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((ll + 3.0 * LN_2).abs() < 1e-12);

    let g = path(&d, "g.json");
    ok(&["gen", "--kind", "grid:3x3", "--seed", "4", "--out", s(&g)]);
    let dot = path(&d, "g.dot");
    ok(&["export-dot", "--model", s(&g), "--out", s(&dot)]);
    let first = fs::read(&dot).unwrap();
    ok(&["export-dot", "--model", s(&g), "--out", s(&dot)]);
    assert_eq!(first, fs::read(&dot).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("[label=")).count(), 9);
    let theta = text.lines().find(|l| l.contains(" -- ")).unwrap();
    let val = theta.split("theta=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(val.split('.').nth(1).unwrap().len(), 6);
}

#[test]
fn grid_round_trip_recovers_test_likelihood() {
    let d = TempDir::new().unwrap();
    let m = path(&d, "truth.json");
    ok(&["gen", "--kind", "grid:4x4", "--seed", "6", "--out", s(&m)]);
    let train = path(&d, "train.csv");
    let test = path(&d, "test.csv");
    ok(&["sample", "--model", s(&m), "--num", "10000", "--seed", "1", "--out", s(&train)]);
    ok(&["sample", "--model", s(&m), "--num", "10000", "--seed", "2", "--out", s(&test)]);
    let fitted = path(&d, "fit.json");
    ok(&["fit", "--samples", s(&train), "--stop", "bic", "--out", s(&fitted)]);
    let eval = |model: &Path| -> f64 {
        let o = ok(&["eval", "--model", s(model), "--samples", s(&test)]);
        String::from_utf8(o.stdout).unwrap().trim().parse().unwrap()
    };
    let (truth, learned) = (eval(&m), eval(&fitted));
    assert!((truth - learned).abs() <= 0.05, "truth {truth}, learned {learned}");
    assert!(is_planar(load(&fitted).graph()));
}
