use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn curvcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvcut")).args(args).env("CURVCUT_THREADS", "1").output().expect("binary runs")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn curvature_of_k2_is_two() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("k2.edges");
    fs::write(&edges, "# single edge\nu v 1\n").unwrap();
    let out = dir.path().join("out");
    let o = curvcut(&["curvature", "--graph", path_arg(&edges), "--dimension", "inf", "--out", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("profile.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "vertex,dimension,curvature");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let k: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((k - 2.0).abs() < 1e-9, "{row}");
    }
}

#[test]
fn verify_small_complete_graph_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = curvcut(&["verify", "--gen", "complete:3", "--w", "0", "--seed", "7", "--out", path_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["semigroup-properties.json", "gradient-estimate.json", "distance-bound.json", "summary.csv"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("gradient-estimate.json")).unwrap()).unwrap();
    for key in ["theorem", "instance", "checks", "verdict"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn bound_without_positive_curvature_is_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.edges");
    fs::write(&edges, "0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 0\n").unwrap();
    let w = dir.path().join("w.txt");
    fs::write(&w, "0\n").unwrap();
    let o = curvcut(&["bound", "--graph", path_arg(&edges), "--w", path_arg(&w), "--out", path_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("not applicable"));
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().ends_with("not_applicable"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(curvcut(&["curvature"]).status.code(), Some(2));
    assert_eq!(curvcut(&["curvature", "--graph", "/definitely/missing.edges"]).status.code(), Some(2));
    assert_eq!(curvcut(&["curvature", "--gen", "cycle:2"]).status.code(), Some(2));
    assert_eq!(curvcut(&["curvature", "--gen", "cycle:5", "--dimension", "zero"]).status.code(), Some(2));
    assert_eq!(curvcut(&["evolve", "--gen", "cycle:5", "--grid", "1,0.5"]).status.code(), Some(2));
    assert_eq!(curvcut(&["evolve", "--gen", "cycle:5", "--w", "9"]).status.code(), Some(2));
    assert_eq!(curvcut(&["gen"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_curvcut"))
        .args(["gen", "--gen", "path:3", "--out", path_arg(tempfile::tempdir().unwrap().path())])
        .env("CURVCUT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn generated_graph_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = curvcut(&["gen", "--gen", "erdos-renyi:9,0.5,3", "--out", path_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let edges = dir.path().join("graph.edges");
    let direct = dir.path().join("direct");
    let reread = dir.path().join("reread");
    assert_eq!(curvcut(&["curvature", "--gen", "erdos-renyi:9,0.5,3", "--out", path_arg(&direct)]).status.code(), Some(0));
    assert_eq!(curvcut(&["curvature", "--graph", path_arg(&edges), "--out", path_arg(&reread)]).status.code(), Some(0));
    // relabelling permutes the local eigenproblems, so allow rounding differences
    let by_label = |p: &Path| {
        let mut rows: Vec<(String, f64)> = fs::read_to_string(p.join("profile.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let cols: Vec<&str> = l.split(',').collect();
                (cols[0].to_string(), cols[2].parse().unwrap())
            })
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        rows
    };
    let (x, y) = (by_label(&direct), by_label(&reread));
    assert_eq!(x.len(), 9);
    for (a, b) in x.iter().zip(&y) {
        assert_eq!(a.0, b.0);
        assert!((a.1 - b.1).abs() < 1e-12, "{a:?} {b:?}");
    }
}

#[test]
fn evolve_writes_both_traces() {
    let dir = tempfile::tempdir().unwrap();
    let o = curvcut(&["evolve", "--gen", "path:5", "--w", "0", "--field", "plateau:2", "--grid", "0,0.25,0.5", "--out", path_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["trace_heat.csv", "trace_cutoff.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().next(), Some("t,vertex,value,gamma"));
        assert_eq!(text.lines().count(), 1 + 3 * 5);
    }
}

#[test]
fn field_file_and_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("f.txt");
    fs::write(&field, (0..12).map(|i| format!("{i} {}\n", i as f64 * 0.5)).collect::<String>()).unwrap();
    let o = curvcut(&[
        "exhaust", "--gen", "path:12", "--field", path_arg(&field), "--w", "0,1,2,3,4,5,6", "--w", "0,1,2,3", "--w", "0",
        "--t", "1", "--out", path_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = fs::read_to_string(dir.path().join("exhaustion.csv")).unwrap();
    assert_eq!(rows.lines().count(), 4);
    let bad = curvcut(&["exhaust", "--gen", "path:12", "--w", "0", "--w", "5", "--out", path_arg(dir.path())]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = curvcut(&["verify", "--gen", "erdos-renyi:8,0.4,5", "--field", "plateau:9", "--out", path_arg(dir.path())]);
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
    }
    for name in ["semigroup-properties.json", "gradient-estimate.json", "distance-bound.json", "summary.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}
