use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use matchwidth_core::graph::TreeDecomposition;
use matchwidth_core::oracle::{check_witnessing, PermutationOracle};
use matchwidth_core::Graph;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchwidth"))
        .args(args)
        .env_remove("MATCHWIDTH_CAP_PERMS")
        .env_remove("MATCHWIDTH_CAP_MODELS")
        .env_remove("MATCHWIDTH_CAP_PATHS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn assert_error_line(o: &Output, code: i32, kind: &str) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error: {kind}: ")), "{err}");
}

fn generate(dir: &Path, extra: &[&str]) {
    let mut args = vec!["generate", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).expect(name);
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

#[test]
fn generate_k8_height1_gives_16_vars_and_width_7() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--k", "8", "--height", "1"]);
    let cnf = fs::read_to_string(dir.path().join("phi.cnf")).unwrap();
    assert!(cnf.starts_with("p cnf 16 "), "{cnf}");
    let g = Graph::parse_edge_list(&fs::read_to_string(dir.path().join("gk.graph")).unwrap()).unwrap();
    let td = TreeDecomposition::parse_td(&fs::read_to_string(dir.path().join("gk.td")).unwrap()).unwrap();
    assert_eq!(g.vertex_count(), 16);
    assert_eq!(td.width(), 7);
    td.verify(&g).unwrap();
}

#[test]
fn generate_height0_is_path_cnf() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--k", "8"]);
    let cnf = fs::read_to_string(dir.path().join("phi.cnf")).unwrap();
    let lines: Vec<&str> = cnf.lines().collect();
    assert_eq!(lines, ["p cnf 4 3", "1 2 0", "2 3 0", "3 4 0"]);
}

#[test]
fn generate_is_byte_identical_under_the_same_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--k", "4", "--height", "1", "--nrobp", "--ratio", "0.5", "--seed", "11"];
    generate(a.path(), &args);
    generate(b.path(), &args);
    for name in ["gk.graph", "phi.cnf", "gk.td", "phi.nrobp"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let c = tempfile::tempdir().unwrap();
    generate(c.path(), &["--k", "4", "--height", "1", "--nrobp", "--ratio", "0.5", "--seed", "12"]);
    assert_ne!(fs::read(a.path().join("phi.nrobp")).unwrap(), fs::read(c.path().join("phi.nrobp")).unwrap());
}

#[test]
fn verify_suites_pass() {
    for suite in ["pmw", "scdt", "nrobp"] {
        let o = run(&["verify", "--suite", suite]);
        assert!(o.status.success(), "{suite}: {}", stderr(&o));
        let text = stdout(&o);
        let rows = csv_rows(&text);
        assert!(rows.len() >= 3, "{text}");
        for r in rows.iter().filter(|r| r[4] == "true") {
            assert_eq!(r[3], "0", "{r:?}");
            assert!(r[2].parse::<usize>().unwrap() > 0, "{r:?}");
        }
    }
}

#[test]
fn verify_all_is_deterministic_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = run(&["verify", "--suite", "all", "--seed", "5", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    let suites = column(&text, "suite");
    for s in ["pmw", "scdt", "nrobp"] {
        assert!(suites.iter().any(|x| x == s));
    }
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_error_line(&run(&["verify", "--suite", "bogus"]), 2, "usage");
    assert_error_line(&run(&["frobnicate"]), 2, "usage");
}

#[test]
fn census_ratio_one_passes_covering_identity() {
    let o = run(&["census", "--k", "8", "--height", "1", "--ratio", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(column(&text, "covering_identity"), ["true"]);
    assert_eq!(column(&text, "pass"), ["true"]);
    assert_eq!(column(&text, "f_models"), column(&text, "phi_models"));
}

#[test]
fn census_near_smallest_ratio_still_passes() {
    // |φ| = 1349 for k = 8, height 1; n = 16 and 2^-4 keeps 84 models
    for mode in ["uniform", "concentrated"] {
        let o = run(&["census", "--k", "8", "--height", "1", "--ratio", "0.0625", "--deletion", mode]);
        assert!(o.status.success(), "{mode}: {}", stderr(&o));
        let text = stdout(&o);
        assert_eq!(column(&text, "f_models"), ["84"]);
        assert_eq!(column(&text, "pass"), ["true"]);
        assert_eq!(column(&text, "tp_le_mu_q"), ["true"]);
    }
}

#[test]
fn census_is_deterministic() {
    let args = ["census", "--k", "4", "--height", "1", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn empty_approximant_is_rejected() {
    let o = run(&["census", "--k", "8", "--ratio", "0.01"]);
    assert_error_line(&o, 2, "precondition");
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_inputs_exit_2() {
    assert_error_line(&run(&["census", "--k", "4", "--ratio", "1.5"]), 2, "invalid-input");
    assert_error_line(&run(&["generate", "--k", "6", "--out", "/tmp"]), 2, "invalid-input");
    assert_error_line(&run(&["pmw", "exact", "--graph", "/nonexistent/g"]), 2, "io");
    assert_error_line(&run(&["census", "--k", "4", "--cap-paths", "0"]), 2, "usage");
}

#[test]
fn caps_exit_3_from_flags_and_env() {
    assert_error_line(&run(&["census", "--k", "4", "--height", "1", "--cap-paths", "10"]), 3, "cap-exceeded");
    let o = Command::new(env!("CARGO_BIN_EXE_matchwidth"))
        .args(["census", "--k", "4", "--height", "1"])
        .env("MATCHWIDTH_CAP_PATHS", "10")
        .output()
        .unwrap();
    assert_error_line(&o, 3, "cap-exceeded");
}

#[test]
fn pmw_exact_agrees_with_permutation_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 1)]).unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, g.to_edge_list()).unwrap();
    let o = run(&["pmw", "exact", "--graph", path.to_str().unwrap(), "--vertices", "0,1,3,4,5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    let expected = PermutationOracle::new(&g).pmw(&[0, 1, 3, 4, 5]);
    assert_eq!(first, format!("pmw {expected}"));
}

#[test]
fn pmw_witness_output_is_witnessing() {
    let dir = tempfile::tempdir().unwrap();
    let g = Graph::path(6);
    let path = dir.path().join("g.txt");
    fs::write(&path, g.to_edge_list()).unwrap();
    let o = run(&["pmw", "witness", "--graph", path.to_str().unwrap(), "--order", "2,0,4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    let size: usize = lines.next().unwrap().strip_prefix("size ").unwrap().parse().unwrap();
    let split: usize = lines.next().unwrap().strip_prefix("split ").unwrap().parse().unwrap();
    let pairs: Vec<(usize, usize)> = lines
        .next()
        .unwrap()
        .strip_prefix("matching")
        .unwrap()
        .split_whitespace()
        .map(|e| {
            let (a, b) = e.split_once('-').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(pairs.len(), size);
    // each of 0, 2, 4 can be matched to a distinct outside neighbour
    assert_eq!(size, 3);
    let in_v: Vec<bool> = (0..6).map(|x| [0, 2, 4].contains(&x)).collect();
    check_witnessing(&g, &in_v, &[2, 0, 4], split, &pairs).unwrap();
}

#[test]
fn scdt_dump_of_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.cnf");
    fs::write(&path, "p cnf 2 1\n1 2 0\n").unwrap();
    let o = run(&["scdt", "--cnf", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let root: Vec<&str> = text.lines().filter(|l| l.starts_with("0 ")).collect();
    assert_eq!(root.len(), 2);
    assert!(root[0].ends_with("+1 2/3"), "{text}");
    assert!(root[1].ends_with("-1 1/3"), "{text}");
}

#[test]
fn unsatisfiable_cnf_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.cnf");
    fs::write(&path, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    assert_error_line(&run(&["scdt", "--cnf", path.to_str().unwrap()]), 2, "precondition");
}

#[test]
fn calibrate_tables_pass_and_repeat() {
    let args = ["calibrate", "mainptv", "--k", "8", "--height", "2", "--trials", "12", "--seed", "4"];
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(o.stdout, run(&args).stdout);
    let text = stdout(&o);
    assert!(column(&text, "status").iter().all(|s| s != "fail"));
    // trial 0 takes every vertex, so all 13 tree nodes are occupied
    assert_eq!(column(&text, "occupied")[0], "13");

    let o = run(&["calibrate", "manyvars1", "--trials", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(column(&text, "holds"), vec!["true"; 20]);
    for (slack, deg) in column(&text, "slack_bits").iter().zip(column(&text, "max_degree")) {
        assert!(slack.parse::<f64>().unwrap() >= 0.0);
        assert!(deg.parse::<usize>().unwrap() <= 7);
    }
}
