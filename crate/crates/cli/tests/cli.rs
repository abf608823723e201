use std::path::PathBuf;
use std::process::{Command, Output};

const SIX_CHAIN: &str = "6 2\n1 2\n1 3\n2 1\n2 3\n3 2\n3 4\n4 3\n4 5\n5 3\n5 4\n6 4\n6 5\n";
const CYCLE: &str = "3 1\n1 2\n2 3\n3 1\n";
const STAR_IN: &str = "4 1\n1 4\n2 4\n3 4\n4 1\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_knn-realize"));
    c.env("NO_COLOR", "1");
    c
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("knn-realize-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decide_six_chain() {
    let g = scratch("six_chain.txt", SIX_CHAIN);
    let o = run(&["decide-1d", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("status=realizable\n"));
    assert!(text.contains("ordering=1 2 3 4 5 6\n"));
}

#[test]
fn decide_negative() {
    for (name, text) in [("cycle.txt", CYCLE), ("star.txt", STAR_IN)] {
        let g = scratch(name, text);
        let o = run(&["decide-1d", g.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{name}");
        assert!(stdout(&o).contains("status=not-realizable"));
    }
}

#[test]
fn score_six_chain_unit_positions() {
    let g = scratch("six_chain-score.txt", SIX_CHAIN);
    let r = scratch("unit.txt", "dimension 1\n1 1\n2 2\n3 3\n4 4\n5 5\n6 6\n");
    let o = run(&["score", g.to_str().unwrap(), r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("score=11/12\n"));
    let o = run(&["verify", g.to_str().unwrap(), r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn realize_then_verify() {
    let g = scratch("six_chain-realize.txt", SIX_CHAIN);
    let out = g.with_file_name("six_chain-points.txt");
    let o = run(&["realize-1d", g.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for mode in ["--exact", "--float"] {
        let o = run(&["verify", g.to_str().unwrap(), out.to_str().unwrap(), mode]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
    }
}

#[test]
fn gen_build_round_trip() {
    let pts = scratch("pts.txt", "");
    let o = run(&[
        "gen",
        "points",
        "-n",
        "40",
        "--seed",
        "3",
        "--out",
        pts.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let graph = pts.with_file_name("pts-graph.txt");
    let o = run(&[
        "build-knn",
        pts.to_str().unwrap(),
        "-k",
        "3",
        "--out",
        graph.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", graph.to_str().unwrap(), pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["decide-1d", graph.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn lambda_and_embed_on_cycle() {
    let g = scratch("cycle-lambda.txt", CYCLE);
    let o = run(&["lambda-check", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status=cycle"));
    let o = run(&["embed", g.to_str().unwrap(), "--dim", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status=certified-impossible"));
}

#[test]
fn embed_plane_graph() {
    let g = scratch("plane.txt", "");
    let o = run(&[
        "gen",
        "knn",
        "-n",
        "80",
        "-k",
        "3",
        "--dim",
        "2",
        "--dist",
        "uniform-box",
        "--seed",
        "5",
        "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = g.with_file_name("plane-embedding.txt");
    let o = run(&[
        "embed",
        g.to_str().unwrap(),
        "--seed",
        "9",
        "--budget",
        "restarts=20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = stdout(&o);
    assert!(report.contains("seed=9\n"));
    assert!(report.contains("restarts=20"));
    let score_line = report.lines().find(|l| l.starts_with("score=")).unwrap().to_string();
    let o = run(&["score", g.to_str().unwrap(), out.to_str().unwrap()]);
    assert!(stdout(&o).starts_with(&format!("{score_line}\n")));
}

#[test]
fn bench_csv() {
    let o = run(&["bench", "--min-exp", "6", "--max-exp", "8", "-k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "operation,n,k,ops,wall_ns");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("decide-1d,64,2,"));

    let csv = scratch("bench.csv", "");
    std::fs::remove_file(&csv).unwrap();
    for _ in 0..2 {
        run(&[
            "bench",
            "--min-exp",
            "6",
            "--max-exp",
            "6",
            "--out",
            csv.to_str().unwrap(),
        ]);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("operation")).count(), 1);
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["embed"]).status.code(), Some(64));
    assert_eq!(run(&["decide-1d", "/nonexistent/graph.txt"]).status.code(), Some(66));
    let bad = scratch("bad.txt", "3 1\n1 2\n");
    assert_eq!(run(&["decide-1d", bad.to_str().unwrap()]).status.code(), Some(65));
    let g = scratch("eps.txt", CYCLE);
    assert_eq!(
        run(&["embed", g.to_str().unwrap(), "--eps", "0"]).status.code(),
        Some(64)
    );
    assert_eq!(
        run(&["embed", g.to_str().unwrap(), "--budget", "bogus=1"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn no_color_output_is_plain() {
    let g = scratch("six_chain-color.txt", SIX_CHAIN);
    let o = run(&["decide-1d", g.to_str().unwrap()]);
    assert!(!o.stderr.contains(&0x1b));
}
