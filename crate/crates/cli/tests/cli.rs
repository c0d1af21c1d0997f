use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn gmom(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmom"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "c3.json", r#"{"nodes": 3, "edges": [[0, 1, 1], [1, 2, 1], [0, 2, 1]]}"#);
    write(
        dir.path(),
        "k3.json",
        r#"{"alpha": [1, 1, 1], "beta": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]}"#,
    );
    write(
        dir.path(),
        "coin.json",
        r#"{"kind": "random", "alpha": [1], "dist": [[[["0", "1/2"], ["1", "1/2"]]]]}"#,
    );
    dir
}

#[test]
fn triangle_into_k3() {
    let dir = setup();
    let o = gmom(&["hom", "--graph", "c3.json", "--target", "k3.json"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "6");
    let o = gmom(&["hom", "--graph", "c3.json", "--target", "k3.json", "--density"], dir.path());
    assert_eq!(stdout(&o).trim(), "2/9");
    let o = gmom(&["hom", "--graph", "c3.json", "--target", "k3.json", "--injective"], dir.path());
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn quantum_graph_input() {
    let dir = setup();
    write(
        dir.path(),
        "q.json",
        r#"{"labels": 0, "terms": [{"coef": "1/2", "graph": {"nodes": 2, "edges": [[0, 1, 2]]}}, {"coef": "-1", "graph": {"nodes": 1, "edges": []}}]}"#,
    );
    let o = gmom(&["hom", "--graph", "q.json", "--target", "coin.json"], dir.path());
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).trim(), "-3/4");
}

#[test]
fn multi_edge_on_coin_differs_from_expectation() {
    let dir = setup();
    let k22 = gmom(&["graph", "family", "multiedge", "2", "--out", "k22.json"], dir.path());
    assert!(k22.status.success());
    let o = gmom(&["hom", "--graph", "k22.json", "--target", "coin.json", "--density"], dir.path());
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn bad_hankel_exits_one_with_witness() {
    let dir = setup();
    write(dir.path(), "bad.json", r#"{"values": ["1", "1/2", "1/5"]}"#);
    let o = gmom(&["moments", "check", "--seq", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["hankel_psd"], false);
    assert!(v["witness"]["vector"].is_array());
}

#[test]
fn moments_recover_coin() {
    let dir = setup();
    write(dir.path(), "m.json", r#"{"values": ["1", "1/2", "1/2", "1/2"]}"#);
    let o = gmom(&["moments", "recover", "--seq", "m.json", "--atoms", "2"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"], true);
    assert_eq!(v["atoms"], serde_json::json!([["0", "1/2"], ["1", "1/2"]]));
}

#[test]
fn symmetric_domain_bound() {
    let dir = setup();
    write(dir.path(), "m.json", r#"{"values": ["1", "0", "4"]}"#);
    let o = gmom(&["moments", "check", "--seq", "m.json", "--domain", "dd", "--d", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = gmom(&["moments", "check", "--seq", "m.json", "--domain", "dd", "--d", "2"], dir.path());
    assert!(o.status.success(), "{o:?}");
}

#[test]
fn input_errors_exit_two() {
    let dir = setup();
    write(dir.path(), "broken.json", "{ nodes: ");
    let cases: [&[&str]; 5] = [
        &["hom", "--graph", "broken.json", "--target", "k3.json"],
        &["hom", "--graph", "missing.json", "--target", "k3.json"],
        &["hom", "--graph", "c3.json", "--target", "k3.json", "--bogus"],
        &["graph", "enumerate", "--nodes", "11"],
        &["verify", "--suite", "no-such-suite"],
    ];
    let mut messages = Vec::new();
    for args in cases {
        let o = gmom(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let msg = String::from_utf8_lossy(&o.stderr).into_owned();
        assert!(!msg.is_empty());
        messages.push(msg);
    }
    messages.sort();
    messages.dedup();
    assert_eq!(messages.len(), 5);
}

#[test]
fn emitted_json_reparses() {
    let dir = setup();
    assert!(gmom(
        &[
            "connmat",
            "--target",
            "coin.json",
            "--k",
            "1",
            "--nodes",
            "2",
            "--mult",
            "2",
            "--out",
            "m.json"
        ],
        dir.path()
    )
    .status
    .success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(v["psd"], true);
    let m: graph_moments::linalg::Matrix<graph_moments::scalar::Rational> = graph_moments::io::matrix_from_json(&v["matrix"]).unwrap();
    assert_eq!(graph_moments::io::matrix_to_json(&m), v["matrix"]);

    assert!(gmom(&["graph", "family", "bipartite", "2", "3", "--out", "k23.json"], dir.path())
        .status
        .success());
    assert!(gmom(&["graph", "canon", "--graph", "k23.json", "--out", "canon.json"], dir.path())
        .status
        .success());
    let a = graph_moments::io::graph_from_json(
        &serde_json::from_str(&std::fs::read_to_string(dir.path().join("canon.json")).unwrap()).unwrap(),
    )
    .unwrap();
    assert_eq!(a.node_count(), 5);
    assert_eq!(a.edge_count(), 6);
    let o = gmom(&["graph", "eulerian", "--graph", "k23.json"], dir.path());
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn spectrum_and_special_matrices() {
    let dir = setup();
    let o = gmom(&["spectrum", "--graphon", "k3.json", "--cycles", "3..6"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cycles"].as_array().unwrap().len(), 4);
    assert_eq!(v["cycles"][0]["t"], "2/9");
    let o = gmom(&["connmat", "--target", "k3.json", "--special", "c", "--size", "4"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rank"], 2);
}

#[test]
fn sample_is_reproducible() {
    let dir = setup();
    let args = [
        "sample",
        "--target",
        "coin.json",
        "--graph",
        "c3.json",
        "--n",
        "25,50",
        "--reps",
        "10",
        "--seed",
        "42",
        "--out",
        "t.csv",
    ];
    assert!(gmom(&args, dir.path()).status.success());
    let first = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(gmom(&args, dir.path()).status.success());
    let second = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(first, second);
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "n,mean,variance,bound");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("25,"));
}

#[test]
fn rankgrowth_report() {
    let dir = setup();
    let o = gmom(
        &["rankgrowth", "--target", "coin.json", "--n", "1..3", "--report", "r.json"],
        dir.path(),
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["kind"], "proper");
    assert_eq!(v["rows"][2]["dim"], 8);
    let o = gmom(&["rankgrowth", "--target", "coin.json", "--n", "6", "--budget", "100"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_necessity_suite() {
    let dir = setup();
    let o = gmom(&["verify", "--suite", "necessity"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS necessity"));
}
