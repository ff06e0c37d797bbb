use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use prefrank::graph::io::parse_edge_list;
use prefrank::ranking::{PreferenceVector, Task};

fn prefrank(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prefrank"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = prefrank(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn records(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn generated_files_parse_back_and_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let graph = ["--family", "union-cliques", "--n", "30", "--k", "10", "--seed", "4"];
    ok(d, &[&["gen-graph"][..], &graph, &["--out", "g1"]].concat());
    ok(d, &[&["gen-graph"][..], &graph, &["--out", "g2"]].concat());
    ok(d, &[&["gen-pref"][..], &graph, &["--task", "FR", "--out", "p1"]].concat());
    ok(d, &[&["gen-pref"][..], &graph, &["--task", "FR", "--out", "p2"]].concat());
    assert_eq!(fs::read(d.join("g1")).unwrap(), fs::read(d.join("g2")).unwrap());
    assert_eq!(fs::read(d.join("p1")).unwrap(), fs::read(d.join("p2")).unwrap());

    let g = parse_edge_list(&fs::read_to_string(d.join("g1")).unwrap()).unwrap();
    assert_eq!(g.n(), 30);
    assert_eq!(g.edge_count(), 10 * 3);
    let p = PreferenceVector::parse_text(&fs::read_to_string(d.join("p1")).unwrap()).unwrap();
    assert_eq!(p.task(), Task::Full);
    assert_eq!(p.n(), 30);
    // f = A α with α ≥ 0: every node in a triangle gets the sum of two α's
    assert!(p.values().iter().all(|&v| (0.0..=2.0).contains(&v)));
}

#[test]
fn two_cluster_ordinal_ratings_respect_the_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        dir.path(),
        &["gen-pref", "--family", "two-cluster", "--n", "100", "--p", "0.6", "--q", "0.1", "--task", "OR(10)", "--seed", "9"],
    );
    let p = PreferenceVector::parse_text(&text).unwrap();
    assert_eq!(p.task(), Task::Ordinal(10));
    let (first, second) = p.values().split_at(50);
    let low = first.iter().copied().fold(f64::INFINITY, f64::min);
    let high = second.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(low > high, "cluster 1 min {low} <= cluster 2 max {high}");
}

#[test]
fn full_information_separable_run_has_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(
        dir.path(),
        &[
            "experiment", "--family", "erdos-renyi", "--n", "10", "--q", "0.5", "--task", "FR",
            "--algorithms", "PR-Kron,PR-nLap-Kron", "--fractions", "1.0", "--repeats", "1", "--c", "1000",
            "--seed", "2", "--no-time",
        ],
    );
    let rows: Vec<_> = records(&csv).into_iter().filter(|r| &r[0] == "trial").collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(&r[11], "0", "er_D of {} is {}", &r[2], &r[11]);
        assert_eq!(&r[12], "0");
    }
}

#[test]
fn summaries_match_trials_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("sweep.toml"),
        "seed = 11\nrepeats = 2\ntask = \"OR(4)\"\nfractions = [0.2, 0.5]\nalgorithms = [\"PR-Kron\", \"GR\", \"RC\"]\nrecord_time = false\n\n[graph]\nfamily = \"two-cluster\"\nn = 16\np = 0.6\nq = 0.1\n",
    )
    .unwrap();
    // the command line wins over the file
    let a = ok(d, &["experiment", "--config", "sweep.toml", "--repeats", "3"]);
    let b = ok(d, &["--config", "sweep.toml", "experiment", "--repeats", "3", "--out", "b.csv"]);
    assert_eq!(a, fs::read_to_string(d.join("b.csv")).unwrap());
    assert!(b.is_empty());

    let rows = records(&a);
    let trials: Vec<_> = rows.iter().filter(|r| &r[0] == "trial").collect();
    assert_eq!(trials.len(), 3 * 2 * 3);
    assert!(trials.iter().all(|r| r[9].parse::<u64>().is_ok() && r[1].len() == 16));
    for mean in rows.iter().filter(|r| &r[0] == "mean") {
        let group: Vec<f64> = trials
            .iter()
            .filter(|t| t[2] == mean[2] && t[7] == mean[7])
            .map(|t| t[11].parse().unwrap())
            .collect();
        assert_eq!(group.len(), 3);
        let m = group.iter().sum::<f64>() / 3.0;
        assert_eq!(mean[11].parse::<f64>().unwrap(), m);
    }
    let other_seed = ok(d, &["experiment", "--config", "sweep.toml", "--seed", "12"]);
    assert_ne!(records(&other_seed)[0][1], rows[0][1]);
}

#[test]
fn rank_and_baseline_on_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-graph", "--family", "erdos-renyi", "--n", "12", "--q", "0.4", "--seed", "1", "--out", "g"]);
    ok(d, &["gen-pref", "--graph", "g", "--task", "FR", "--seed", "1", "--out", "p"]);
    let pr = ok(d, &["rank", "--graph", "g", "--pref", "p", "--fraction", "1.0", "--embedding", "LS-PD", "--scores", "s.csv"]);
    assert!(pr.contains("algorithm=PR-PD\n"));
    assert!(pr.contains("m=66\n"));
    assert_eq!(records(&fs::read_to_string(d.join("s.csv")).unwrap()).len(), 66);
    for method in ["rc", "gr"] {
        let out = ok(d, &["baseline", "--graph", "g", "--pref", "p", "--method", method, "--fraction", "1.0"]);
        let line = out.lines().find(|l| l.starts_with("ranking=")).unwrap();
        assert_eq!(line.split_whitespace().count(), 12);
    }
    // RC recovers a noiseless full ranking exactly
    let rc = ok(d, &["baseline", "--graph", "g", "--pref", "p", "--method", "rc", "--fraction", "1.0"]);
    assert!(rc.contains("d_k=0\n"), "{rc}");
}

#[test]
fn analyze_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let csv = ok(d, &["analyze", "--families", "complete", "--sizes", "50,100,200", "--eps", "0.05,0.1,0.2,0.3"]);
    let rows = records(&csv);
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| &r[2] == "1.0" || &r[2] == "1"));
    for n in ["50", "100", "200"] {
        let f: Vec<f64> = rows.iter().filter(|r| &r[1] == n).map(|r| r[4].parse().unwrap()).collect();
        assert!(f.windows(2).all(|w| w[0] < w[1]), "{f:?}");
    }

    let common = ["analyze", "--family", "union-cliques", "--n", "6", "--k", "2", "--mc", "300", "--families", "cliques:2", "--seed", "3"];
    ok(d, &[&common[..], &["--out", "csv"]].concat());
    ok(d, &[&common[..], &["--format", "json", "--out", "json"]].concat());
    let bounds_csv = records(&fs::read_to_string(d.join("csv/bounds.csv")).unwrap());
    let bounds_json: Vec<serde_json::Value> = fs::read_to_string(d.join("json/bounds.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(bounds_csv.len(), 6);
    assert_eq!(bounds_json.len(), 6);
    for (c, j) in bounds_csv.iter().zip(&bounds_json) {
        assert_eq!(&c[0], j["embedding"].as_str().unwrap());
        for (col, key) in [(5, "bound_value"), (6, "mc_estimate"), (3, "lambda1_node")] {
            assert_eq!(c[col].parse::<f64>().unwrap(), j[key].as_f64().unwrap());
        }
    }
    let cx_csv = records(&fs::read_to_string(d.join("csv/complexity.csv")).unwrap());
    let cx_json: Vec<serde_json::Value> = fs::read_to_string(d.join("json/complexity.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(cx_csv.len(), cx_json.len());
    for (c, j) in cx_csv.iter().zip(&cx_json) {
        assert_eq!(c[4].parse::<f64>().unwrap(), j["f_star"].as_f64().unwrap());
    }
}

#[test]
fn ingest_writes_one_file_set_per_subset() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data: String = (0..30)
        .map(|i| format!("{} 1:{} 2:{}\n", (i % 5) + 1, f64::from(i) * 0.1, f64::from(i % 7)))
        .collect();
    fs::write(d.join("data.txt"), data).unwrap();
    let args = ["ingest", "--features", "data.txt", "--subset-size", "12", "--subsets", "3", "--task", "OR(5)", "--seed", "8"];
    ok(d, &[&args[..], &["--out", "a"]].concat());
    ok(d, &[&args[..], &["--out", "b"]].concat());
    for s in 0..3 {
        for ext in ["edges", "pref", "items"] {
            let name = format!("subset_{s:03}.{ext}");
            assert_eq!(fs::read(d.join("a").join(&name)).unwrap(), fs::read(d.join("b").join(&name)).unwrap());
        }
        let p = PreferenceVector::parse_text(&fs::read_to_string(d.join(format!("a/subset_{s:03}.pref"))).unwrap()).unwrap();
        assert_eq!(p.n(), 12);
        assert_eq!(p.task(), Task::Ordinal(5));
    }
    ok(d, &["ingest", "--features", "data.txt", "--subset-size", "30", "--subsets", "1", "--out", "whole"]);
    let items = fs::read_to_string(d.join("whole/subset_000.items")).unwrap();
    assert_eq!(items.lines().count(), 30);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(prefrank(d, &["rank", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(prefrank(d, &["gen-pref", "--task", "XR", "--family", "complete", "--n", "3"]).status.code(), Some(1));
    let missing = prefrank(d, &["rank", "--graph", "missing.edges", "--pref", "missing.pref"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.edges"));
    assert_eq!(prefrank(d, &["gen-graph", "--family", "union-cliques", "--n", "10", "--k", "11"]).status.code(), Some(2));
    assert_eq!(prefrank(d, &["--help"]).status.code(), Some(0));
}
