use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use topicfuse::cli::{load_predictions, PredictionRecord};
use topicfuse::{save_model, FeatureToggles, Model, TopicSpace};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topicfuse"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn synth(dir: &Path, documents: &str) {
    ok(dir, &["synth", "--out-dir", ".", "--documents", documents, "--authors", "30", "--seed", "3"]);
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Model over (Sports, Cricket) whose content biases produce the given
/// probabilities for every document.
fn constant_model(dir: &Path, probs: [f64; 2]) -> PathBuf {
    let space = TopicSpace::new(["Sports", "Cricket"]).unwrap();
    fs::write(dir.join("topics.txt"), space.to_file_string()).unwrap();
    let mut model = Model::zeros(space, 16, FeatureToggles::all());
    model.content_mut().bias_mut().copy_from_slice(&probs.map(logit));
    let path = dir.join("const.bin");
    save_model(&model, &path).unwrap();
    path
}

const DEMO_DOC: &str = r#"{"id":"d1","text":"what a match","author":{"id":"u1"},"gold_labels":["Sports","Cricket"]}"#;

#[test]
fn full_workflow() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d, "400");
    let out = ok(
        d,
        &[
            "weak-label", "--corpus", "corpus.jsonl", "--topics", "topics.txt", "--rules",
            "rules.txt", "--topical-out", "weak.jsonl", "--chatter-out", "chatter.jsonl",
        ],
    );
    assert!(stdout(&out).contains("topical:"));
    let lines = |p: &str| fs::read_to_string(d.join(p)).unwrap().lines().count();
    assert_eq!(lines("weak.jsonl") + lines("chatter.jsonl"), 400);

    ok(d, &["split", "--corpus", "corpus.jsonl", "--out-prefix", "gold", "--seed", "1"]);
    assert_eq!(
        lines("gold.train.jsonl") + lines("gold.valid.jsonl") + lines("gold.test.jsonl"),
        400
    );

    ok(
        d,
        &[
            "train", "--corpus", "weak.jsonl", "--chatter", "chatter.jsonl", "--topics",
            "topics.txt", "--out", "pre.bin", "--epochs", "2", "--dim", "4096",
        ],
    );
    ok(
        d,
        &[
            "train", "--corpus", "gold.train.jsonl", "--labels", "gold", "--topics", "topics.txt",
            "--init", "pre.bin", "--out", "model.bin", "--epochs", "2", "--dim", "4096",
        ],
    );
    ok(
        d,
        &[
            "predict", "--model", "model.bin", "--corpus", "gold.test.jsonl", "--constraints",
            "constraints.txt", "--out", "preds.jsonl", "--threads", "2",
        ],
    );
    assert_eq!(lines("preds.jsonl"), lines("gold.test.jsonl"));
    let out = ok(
        d,
        &[
            "evaluate", "--topics", "topics.txt", "--predictions", "preds.jsonl", "--gold",
            "gold.test.jsonl", "--constraints", "constraints.txt", "--out", "report.json",
            "--table", "report.tsv",
        ],
    );
    assert!(stdout(&out).contains("median APS:"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert!(report["median_aps"].as_f64().unwrap() > 0.0);
    assert!(fs::read_to_string(d.join("report.tsv")).unwrap().starts_with("topic\tap\n"));
}

#[test]
fn weak_label_is_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d, "100");
    for out in ["a", "b"] {
        let topical = format!("{out}.topical.jsonl");
        let chatter = format!("{out}.chatter.jsonl");
        ok(
            d,
            &[
                "weak-label", "--corpus", "corpus.jsonl", "--topics", "topics.txt", "--rules",
                "rules.txt", "--topical-out", &topical, "--chatter-out", &chatter,
            ],
        );
    }
    assert_eq!(fs::read(d.join("a.topical.jsonl")).unwrap(), fs::read(d.join("b.topical.jsonl")).unwrap());
    assert_eq!(fs::read(d.join("a.chatter.jsonl")).unwrap(), fs::read(d.join("b.chatter.jsonl")).unwrap());
}

#[test]
fn missing_rules_file_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d, "20");
    let out = run(
        d,
        &[
            "weak-label", "--corpus", "corpus.jsonl", "--topics", "topics.txt", "--rules",
            "nope.txt", "--topical-out", "t.jsonl", "--chatter-out", "c.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.txt"));
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["train", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(tmp.path(), &[]).status.code(), Some(1));
    assert_eq!(run(tmp.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(
        run(tmp.path(), &["split", "--corpus", "x", "--out-prefix", "y", "--fractions", "0.5,0.5"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn invalid_fractions_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d, "20");
    let out = run(d, &["split", "--corpus", "corpus.jsonl", "--out-prefix", "y", "--fractions", "0.5,0.5,0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn training_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d, "200");
    for out in ["m1.bin", "m2.bin"] {
        ok(
            d,
            &[
                "train", "--corpus", "corpus.jsonl", "--labels", "gold", "--topics", "topics.txt",
                "--out", out, "--epochs", "2", "--seed", "5",
            ],
        );
    }
    assert_eq!(fs::read(d.join("m1.bin")).unwrap(), fs::read(d.join("m2.bin")).unwrap());
}

#[test]
fn config_file_sets_training_options() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d, "100");
    fs::write(d.join("cfg.toml"), "[train]\nepochs = 1\ndim = 64\n").unwrap();
    ok(
        d,
        &[
            "--config", "cfg.toml", "train", "--corpus", "corpus.jsonl", "--labels", "gold",
            "--topics", "topics.txt", "--out", "a.bin",
        ],
    );
    ok(
        d,
        &[
            "train", "--corpus", "corpus.jsonl", "--labels", "gold", "--topics", "topics.txt",
            "--out", "b.bin", "--epochs", "1", "--dim", "64",
        ],
    );
    assert_eq!(fs::read(d.join("a.bin")).unwrap(), fs::read(d.join("b.bin")).unwrap());

    fs::write(d.join("bad.toml"), "[train]\nepoch = 1\n").unwrap();
    let out = run(
        d,
        &[
            "--config", "bad.toml", "train", "--corpus", "corpus.jsonl", "--topics", "topics.txt",
            "--out", "c.bin",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn init_model_must_match_topics() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d, "50");
    let model = constant_model(d, [0.5, 0.5]);
    // `constant_model` overwrote `topics.txt` with two topics; restore the ten.
    synth(d, "50");
    let out = run(
        d,
        &[
            "train", "--corpus", "corpus.jsonl", "--labels", "gold", "--topics", "topics.txt",
            "--init", model.to_str().unwrap(), "--out", "m.bin",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mismatch"));
}

#[test]
fn predict_calibrates_and_can_skip_constraints() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let model = constant_model(d, [0.3, 0.9]);
    fs::write(d.join("c.txt"), "includes Sports Cricket\n").unwrap();
    fs::write(d.join("docs.jsonl"), format!("{DEMO_DOC}\n")).unwrap();
    let m = model.to_str().unwrap();
    ok(d, &["predict", "--model", m, "--corpus", "docs.jsonl", "--constraints", "c.txt", "--out", "cal.jsonl"]);
    ok(
        d,
        &[
            "predict", "--model", m, "--corpus", "docs.jsonl", "--constraints", "c.txt",
            "--no-constraints", "--out", "raw.jsonl",
        ],
    );
    let cal: Vec<PredictionRecord> = load_predictions(&d.join("cal.jsonl")).unwrap();
    assert!((cal[0].combined[0] - 0.3).abs() < 1e-12);
    assert!((cal[0].calibrated[0] - 0.987273).abs() < 1e-6);
    assert!((cal[0].calibrated[1] - 0.981818).abs() < 1e-6);
    let raw = load_predictions(&d.join("raw.jsonl")).unwrap();
    assert_eq!(
        raw[0].calibrated.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        raw[0].combined.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );

    // Calibration removes the violation the raw probabilities show at 0.5.
    let violations = |field: &str| {
        ok(
            d,
            &[
                "evaluate", "--topics", "topics.txt", "--predictions", "cal.jsonl", "--gold",
                "docs.jsonl", "--constraints", "c.txt", "--threshold", "0.5", "--field", field,
                "--out", "r.json",
            ],
        );
        let r: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
        r["violations"]["inclusion"].as_u64().unwrap()
    };
    assert_eq!(violations("combined"), 1);
    assert_eq!(violations("calibrated"), 0);
}

#[test]
fn constraints_must_name_model_topics() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let model = constant_model(d, [0.3, 0.9]);
    fs::write(d.join("c.txt"), "includes Music Jazz\n").unwrap();
    fs::write(d.join("docs.jsonl"), format!("{DEMO_DOC}\n")).unwrap();
    let out = run(
        d,
        &["predict", "--model", model.to_str().unwrap(), "--corpus", "docs.jsonl", "--constraints", "c.txt", "--out", "p.jsonl"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_corpus_gives_empty_predictions() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let model = constant_model(d, [0.3, 0.9]);
    fs::write(d.join("empty.jsonl"), "").unwrap();
    ok(d, &["predict", "--model", model.to_str().unwrap(), "--corpus", "empty.jsonl", "--out", "p.jsonl"]);
    assert_eq!(fs::read(d.join("p.jsonl")).unwrap(), b"");
}

#[test]
fn evaluate_chatter_only_and_rejects_unevaluable() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("topics.txt"), "Sports\nCricket\n").unwrap();
    fs::write(
        d.join("chatter.jsonl"),
        "{\"id\":\"c1\",\"combined\":[0.0,0.0],\"calibrated\":[0.0,0.0],\"converged\":true}\n",
    )
    .unwrap();
    let out = ok(d, &["evaluate", "--topics", "topics.txt", "--chatter-predictions", "chatter.jsonl"]);
    assert!(stdout(&out).contains("chatter above 0.9: 0"));

    fs::write(
        d.join("gold.jsonl"),
        "{\"id\":\"c1\",\"text\":\"hi\",\"author\":{\"id\":\"u\"},\"gold_labels\":[]}\n\
         {\"id\":\"c2\",\"text\":\"hey\",\"author\":{\"id\":\"u\"},\"gold_labels\":[]}\n",
    )
    .unwrap();
    let mut preds = fs::read_to_string(d.join("chatter.jsonl")).unwrap();
    preds.push_str("{\"id\":\"c2\",\"combined\":[0.95,0.0],\"calibrated\":[0.95,0.0],\"converged\":true}\n");
    fs::write(d.join("preds.jsonl"), preds).unwrap();
    // Gold sets are all empty, so no topic is evaluable.
    let out = run(d, &["evaluate", "--topics", "topics.txt", "--predictions", "preds.jsonl", "--gold", "gold.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no evaluable topic"));
    let out = ok(d, &["evaluate", "--topics", "topics.txt", "--chatter-predictions", "preds.jsonl"]);
    assert!(stdout(&out).contains("chatter above 0.9: 1"));

    fs::write(
        d.join("gold.jsonl"),
        "{\"id\":\"c1\",\"text\":\"hi\",\"author\":{\"id\":\"u\"},\"gold_labels\":[\"Sports\"]}\n",
    )
    .unwrap();
    fs::write(
        d.join("one.jsonl"),
        "{\"id\":\"c1\",\"combined\":[0.2,0.1],\"calibrated\":[0.2,0.1],\"converged\":true}\n",
    )
    .unwrap();
    ok(d, &["evaluate", "--topics", "topics.txt", "--predictions", "one.jsonl", "--gold", "gold.jsonl"]);
}

#[test]
fn ablation_ladder_runs_seven_steps() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth(d, "300");
    ok(
        d,
        &[
            "weak-label", "--corpus", "corpus.jsonl", "--topics", "topics.txt", "--rules",
            "rules.txt", "--topical-out", "weak.jsonl", "--chatter-out", "chatter.jsonl",
        ],
    );
    ok(d, &["split", "--corpus", "corpus.jsonl", "--out-prefix", "gold"]);
    let out = ok(
        d,
        &[
            "ablate", "--topics", "topics.txt", "--weak", "weak.jsonl", "--weak-chatter",
            "chatter.jsonl", "--train", "gold.train.jsonl", "--test", "gold.test.jsonl",
            "--constraints", "constraints.txt", "--epochs", "1", "--dim", "4096", "--out",
            "ladder.tsv",
        ],
    );
    let table = stdout(&out);
    let steps: Vec<&str> = table.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(
        steps,
        ["text", "+media", "+pretraining", "+links", "+author", "+entities", "+constraints"]
    );
    assert_eq!(fs::read_to_string(d.join("ladder.tsv")).unwrap(), table);
}
