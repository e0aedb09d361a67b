use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sinkchain(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinkchain"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn line_value<'a>(text: &'a str, prefix: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(prefix)).unwrap_or_else(|| panic!("no `{prefix}` in\n{text}"))
}

#[test]
fn analyze_catalog_games() {
    let dir = tempfile::tempdir().unwrap();
    let o = sinkchain(&["analyze", "--catalog", "mp", "--dot", "mp.dot"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("components: 1 (1 sink)"), "{s}");
    assert!(s.contains("sink 0 size 4"), "{s}");
    assert!(s.contains("dag: false"), "{s}");
    assert!(std::fs::read_to_string(dir.path().join("mp.dot")).unwrap().starts_with("digraph"));

    let s = stdout(&sinkchain(&["analyze", "--catalog", "co"], dir.path()));
    assert!(s.contains("(2 sink)") && s.contains("dag: true"), "{s}");

    let s = stdout(&sinkchain(&["analyze", "--catalog", "inner_diamond"], dir.path()));
    assert!(s.contains("(1 sink)") && s.contains("size 1:") && s.contains("dag: false"), "{s}");
    let a = json(&dir.path().join("inner_diamond.analysis.json"));
    assert_eq!(a["pure_nash"], serde_json::json!(["(0,0)"]));
}

#[test]
fn game_files_and_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pd.json");
    std::fs::write(
        &path,
        r#"{"name": "pd", "players": 2, "strategies": [["C","D"],["C","D"]],
            "payoffs": [[3,3],[0,5],[5,0],[1,1]]}"#,
    )
    .unwrap();
    let o = sinkchain(&["analyze", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("pure nash: (1,1)"));
    assert!(stdout(&o).contains("dominance survivors: 1;1"));

    let o = sinkchain(&["analyze", "--catalog", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("inner_diamond"));
    assert_eq!(sinkchain(&["analyze"], dir.path()).status.code(), Some(1));
    assert_eq!(sinkchain(&["analyze", "missing.json"], dir.path()).status.code(), Some(1));
    assert_eq!(sinkchain(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(sinkchain(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn simulate_reports_drift_and_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let o = sinkchain(
        &["simulate", "--catalog", "mp", "--start", "0.9,0.1;0.5,0.5", "--time", "50", "--csv", "mp.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let kl: f64 = line_value(&stdout(&o), "kl drift: ").parse().unwrap();
    assert!(kl <= 1e-5, "{kl}");
    let csv = std::fs::read_to_string(dir.path().join("mp.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5002);
    assert!(csv.starts_with("t,"));

    for (game, start, vertex) in [("co", "0.6,0.4;0.6,0.4", [1.0, 0.0, 1.0, 0.0]), ("dd", "uniform", [1.0, 0.0, 1.0, 0.0])] {
        let time = if game == "dd" { "100" } else { "50" };
        let o = sinkchain(&["simulate", "--catalog", game, "--start", start, "--time", time], dir.path());
        let end: Vec<f64> = line_value(&stdout(&o), "endpoint: ")
            .split([';', ','])
            .map(|v| v.parse().unwrap())
            .collect();
        let gap = end.iter().zip(vertex).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap <= 1e-6, "{game}: {end:?}");
    }

    let o = sinkchain(&["simulate", "--catalog", "co", "--start", "0.5,0.5;0.7,0.7"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("player 1"), "{}", stderr(&o));
}

#[test]
fn chain_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = sinkchain(&["chain", "--catalog", "mp", "--kappa", "16"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&dir.path().join("mp.chain.json"));
    assert_eq!(r["sink_morse_count"], 1);
    let sink = r["sinks"][0].as_u64().unwrap() as usize;
    assert_eq!(r["morse_sets"][sink]["size"], 256);
    assert!(r.get("timing").is_none());

    let o = sinkchain(&["chain", "--catalog", "co", "--kappa", "16", "--dot", "co.dot"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("co.chain.json"));
    assert_eq!(r["sink_morse_count"], 2);
    assert_eq!(r["conjecture1"], "holds");
    // the box holding the mixed equilibrium is in no sink Morse set
    for s in r["sinks"].as_array().unwrap() {
        let boxes = r["morse_sets"][s.as_u64().unwrap() as usize]["boxes"].as_array().unwrap();
        for center in [119, 120, 135, 136] {
            assert!(!boxes.contains(&Value::from(center)));
        }
    }
    let dot = std::fs::read_to_string(dir.path().join("co.dot")).unwrap();
    assert_eq!(dot.matches("lightgrey").count(), 2);

    let o = sinkchain(&["chain", "--catalog", "outer_diamond", "--kappa", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("outer_diamond.chain.json"));
    assert_eq!(r["sink_morse_count"], 1);
    assert_eq!(r["correspondence"][0]["content_containment"], "holds");

    let o = sinkchain(&["chain", "--catalog", "rps", "--kappa", "100"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("try kappa <="), "{}", stderr(&o));
}

#[test]
fn chain_refines_until_sinks_separate() {
    let dir = tempfile::tempdir().unwrap();
    let game = r#"{"name": "shallow", "players": 2, "strategies": [["a", "b"], ["a", "b"]],
        "payoffs": [[0.94, 0.94], [0.24, 0.24], [0.26, 0.26], [0.39, 0.39]]}"#;
    let path = dir.path().join("shallow.json");
    std::fs::write(&path, game).unwrap();
    let path = path.to_str().unwrap();

    let o = sinkchain(&["chain", path, "--kappa", "16"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&dir.path().join("shallow.chain.json"));
    assert_eq!(r["sink_scc_count"], 2);
    assert_eq!(r["conjecture1"], "unresolved-at-resolution");

    let o = sinkchain(&["chain", path, "--kappa", "16", "--max-T", "100"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&dir.path().join("shallow.chain.json"));
    assert_eq!(r["conjecture1"], "holds");
    assert_eq!(r["sink_morse_count"], 2);
    let t = r["resolution"]["t"].as_f64().unwrap();
    assert!(t > 1.0 && t <= 100.0, "{t}");
    let m = json(&dir.path().join("chain.manifest.json"));
    assert_eq!(m["parameters"]["resolution"]["t"].as_f64(), Some(t));
    assert_eq!(m["parameters"]["refine"]["max_kappa"], 16);

    let o = sinkchain(&["chain", path, "--max-kappa", "32"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn certify_accepts_and_refuses() {
    let dir = tempfile::tempdir().unwrap();
    for game in ["dd", "co"] {
        let o = sinkchain(&["certify", "--catalog", game, "--subgame", "0;0"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let c = json(&dir.path().join(format!("{game}.certificate.json")));
        assert!(c["m"].as_f64().unwrap() > 0.0);
        assert_eq!(c["audit"]["violations"], 0);
    }
    let o = sinkchain(&["certify", "--catalog", "mp", "--subgame", "0;0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("refused"));
    assert!(stdout(&o).contains("(0,0) -> (0,1)"), "{}", stdout(&o));
}

#[test]
fn scan_writes_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let o = sinkchain(&["scan", "--shape", "2x2", "--count", "20", "--kappa", "8", "--seed", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(&dir.path().join("scan.json"));
    assert_eq!(r["conjecture1"]["violated"], 0);
    assert_eq!(r["seed"], 3);
    let m = json(&dir.path().join("scan.manifest.json"));
    assert_eq!(m["command"], "scan");
    assert_eq!(m["seed"], 3);
    assert!(m["outputs"].as_array().unwrap().iter().any(|p| p.as_str().unwrap().ends_with("scan.json")));
}

#[test]
fn plot_shades_sink_boxes() {
    let dir = tempfile::tempdir().unwrap();
    for (game, sinks) in [("mp", 256), ("co", 8), ("sd", 4)] {
        let o = sinkchain(&["plot", "--catalog", game], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let svg = std::fs::read_to_string(dir.path().join(format!("{game}.svg"))).unwrap();
        assert!(svg.contains(r#"width="600" height="600""#));
        assert_eq!(svg.matches("class=\"sink\"").count(), sinks, "{game}");
        let arrows = svg.matches("class=\"arrow\"").count();
        assert!(arrows > 200 && arrows <= 225, "{game}: {arrows}");
    }
    assert_eq!(sinkchain(&["plot", "--catalog", "rps"], dir.path()).status.code(), Some(1));
}

#[test]
fn reruns_reproduce_outputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["chain", "--catalog", "sd", "--kappa", "12", "--seed", "5", "--dot", "sd.dot"];
    sinkchain(&args, a.path());
    sinkchain(&args, b.path());
    let m = json(&a.path().join("chain.manifest.json"));
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for p in outputs {
        let name = Path::new(p.as_str().unwrap()).file_name().unwrap();
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name:?}"
        );
    }
    assert_eq!(m["args"][0], "chain");
    assert_eq!(m["version"], "0.1.0");
}
