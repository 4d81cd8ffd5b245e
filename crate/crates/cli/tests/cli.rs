use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gnne(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnne"))
        .args(args)
        .env_remove("GNNE_OUTPUT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn gnne")
}

fn karate() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/karate.edges")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A reduced but complete experiment on the bundled karate club network.
fn small_config(dir: &Path, seed: u64) -> PathBuf {
    let text = format!(
        r#"{{
  "schema_version": 1,
  "seed": {seed},
  "datasets": [{{"name": "karate", "path": "{}"}}],
  "training": {{"ba_nodes": 120, "label_runs": 20, "model": {{"epochs_feature": 40, "epochs_task": 60}}}},
  "embedding": {{"walks_per_node": 3, "walk_length": 15, "epochs": 1}},
  "evaluation": {{"spread": {{"top_frac": 0.05, "runs": 50}}}}
}}"#,
        karate().display()
    );
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn generate_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.edges");
    let b = dir.path().join("b.edges");
    for p in [&a, &b] {
        let o = gnne(&["--seed", "7", "generate", "--nodes", "1000", "--m", "2", "--output", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(bytes).unwrap().lines().count(), 1 + 2 + 2 * 997);

    let c = dir.path().join("c.edges");
    gnne(&["--seed", "8", "generate", "--output", c.to_str().unwrap()]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn unknown_method_lists_valid_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = gnne(&[
        "rank",
        "--dataset",
        karate().to_str().unwrap(),
        "--method",
        "XYZ",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("XYZ"), "{msg}");
    for m in ["HC", "DC", "CI", "CC", "EC", "BC", "KSHELL", "IKS", "GAT", "GCN", "GEHC", "GNNE", "RANDOM"] {
        assert!(msg.contains(m), "{m} missing from: {msg}");
    }
    assert!(!out.exists());
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");

    let missing = gnne(&["rank", "--dataset", "/no/such/file.edges", "--method", "DC", "--output", out.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2), "{}", stderr(&missing));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 1, "bogus": true}"#).unwrap();
    let o = gnne(&["--config", bad.to_str().unwrap(), "generate", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"));

    std::fs::write(&bad, r#"{"schema_version": 9}"#).unwrap();
    let o = gnne(&["--config", bad.to_str().unwrap(), "generate", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let o = gnne(&["rank", "--dataset", karate().to_str().unwrap(), "--method", "GNNE"]);
    assert_eq!(o.status.code(), Some(1), "GNNE without a checkpoint is a usage error");

    let o = gnne(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));

    // a learning rate this large overflows the weights on the first update
    let nan = dir.path().join("nan.json");
    std::fs::write(
        &nan,
        r#"{"schema_version": 1, "methods": ["GNNE"],
            "training": {"ba_nodes": 30, "label_runs": 2, "model": {"lr": 1e300, "epochs_feature": 5, "epochs_task": 5}}}"#,
    )
    .unwrap();
    let run = dir.path().join("run");
    let o = gnne(&["--config", nan.to_str().unwrap(), "--run-dir", run.to_str().unwrap(), "train"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("non-finite"));
}

#[test]
fn run_directories_are_timestamped_under_the_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gnne"))
        .args(["generate", "--nodes", "20"])
        .env("GNNE_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let runs: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(runs.len(), 1);
    let name = runs[0].file_name().unwrap().to_str().unwrap().to_string();
    assert!(name.starts_with("generate-") && name.ends_with('Z'), "{name}");
    assert!(runs[0].join("ba.edges").exists());
    assert!(runs[0].join("config.json").exists());
}

#[test]
fn train_rank_attack_spread_chain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 1);
    let cfg = cfg.to_str().unwrap();
    let train = dir.path().join("train");
    let o = gnne(&["--config", cfg, "--run-dir", train.to_str().unwrap(), "train", "--methods", "GNNE,GAT"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["task_model.json", "gat_baseline.json", "gcn_baseline.json", "checkpoints.json", "loss_task.csv"] {
        assert!(train.join(f).exists(), "{f}");
    }

    let mut rankings = Vec::new();
    for m in ["GNNE", "DC", "RANDOM"] {
        let out = dir.path().join(format!("{m}.csv"));
        let o = gnne(&[
            "--config",
            cfg,
            "rank",
            "--dataset",
            karate().to_str().unwrap(),
            "--method",
            m,
            "--checkpoint",
            train.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{m}: {}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().next(), Some("node_label,score,rank"));
        assert_eq!(text.lines().count(), 35);
        rankings.push(out.to_str().unwrap().to_string());
    }

    let karate = karate();
    let attack = dir.path().join("attack");
    let mut args = vec!["--run-dir", attack.to_str().unwrap(), "attack", "--dataset", karate.to_str().unwrap()];
    args.push("--rankings");
    args.extend(rankings.iter().map(String::as_str));
    let o = gnne(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = std::fs::read_to_string(attack.join("attack.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(attack.join("curves/lcc_DC.csv").exists());

    let spread = dir.path().join("spread");
    let mut args = vec![
        "--run-dir",
        spread.to_str().unwrap(),
        "spread",
        "--dataset",
        karate.to_str().unwrap(),
        "--runs",
        "30",
    ];
    args.push("--rankings");
    args.extend(rankings.iter().map(String::as_str));
    let o = gnne(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let curve = std::fs::read_to_string(spread.join("spread_DC.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("t,F_mean"));
    // ceil(0.05 * 34) seeds at t = 0
    assert!(lines.next().unwrap().starts_with("0,2"), "{curve}");
}

#[test]
fn reproduce_emits_one_row_per_method_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 11);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for run in [&a, &b] {
        let o = gnne(&["--config", cfg.to_str().unwrap(), "--run-dir", run.to_str().unwrap(), "reproduce"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let report = std::fs::read_to_string(a.join("karate/report.csv")).unwrap();
    let rows: Vec<&str> = report.lines().skip(1).collect();
    assert_eq!(rows.len(), 13, "{report}");
    for table in ["table_lcc.csv", "table_efficiency.csv", "table_spread.csv"] {
        assert_eq!(std::fs::read_to_string(a.join(table)).unwrap().lines().count(), 14, "{table}");
    }

    let files = files_under(&a);
    assert_eq!(files, files_under(&b));
    assert!(files.len() > 50);
    for f in &files {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{}", f.display());
    }
}
