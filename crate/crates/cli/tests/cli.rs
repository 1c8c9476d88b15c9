use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sli")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn apply_prints_one_word_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = sli(dir.path(), &["apply", "-r", "u > o / _ C", "talun", "suat"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "talon\nsuat\n");

    let o = sli(dir.path(), &["--format", "json", "apply", "-r", "t > d / _ #", "sunt"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["output"], "sund");
    assert_eq!(v[0]["changed"], true);
}

#[test]
fn apply_reads_law_files_and_lexicons() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("law.txt"), "// word-final devoicing\nt > d / _ #\n").unwrap();
    std::fs::write(dir.path().join("lex.txt"), "sunt\ntapere\n").unwrap();
    let o = sli(dir.path(), &["apply", "--law", "law.txt", "--lexicon", "lex.txt"]);
    assert_eq!(stdout(&o), "sund\ntapere\n");

    std::fs::write(dir.path().join("empty.txt"), "").unwrap();
    let o = sli(dir.path(), &["apply", "-r", "t > d", "--lexicon", "empty.txt"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sli(dir.path(), &["apply", "-r", "t > > d", "ta"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1:"), "{}", stderr(&o));

    let o = sli(dir.path(), &["apply", "--law", "missing.txt", "ta"]);
    assert_eq!(o.status.code(), Some(1));

    // no fixture covers this seed
    let o = sli(dir.path(), &["--seed", "8", "--cache-only", "datagen", "--condition", "rp-li", "--count", "2"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));

    std::fs::write(dir.path().join("bad.jsonl"), "{\"id\": 3}\n").unwrap();
    let o = sli(dir.path(), &["eval", "--tasks", "bad.jsonl", "--gold"]);
    assert_eq!(o.status.code(), Some(6), "{}", stderr(&o));
}

#[test]
fn parse_law_prints_every_notation() {
    let dir = tempfile::tempdir().unwrap();
    let o = sli(dir.path(), &["parse-law", "a > e / _ j"]);
    let out = stdout(&o);
    assert!(out.contains("BasicAction(predicates=[lambda x: x == 'a', lambda x: x == '@', lambda x: x == 'j']"), "{out}");
    assert!(out.contains("\"change_pos\":[0]"), "{out}");
}

#[test]
fn derive_traces_each_law() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.txt"), "u > o / _ C // lowering\nt > d / _ #\n").unwrap();
    let o = sli(dir.path(), &["derive", "--cascade", "c.txt", "sunt"]);
    assert_eq!(stdout(&o), "sond\n");
    let o = sli(dir.path(), &["derive", "--cascade", "c.txt", "--trace", "sunt"]);
    let out = stdout(&o);
    assert!(out.contains("law 0: lowering") && out.contains("sunt -> sont") && out.contains("sont -> sond"), "{out}");
}

#[test]
fn datagen_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for (jobs, name) in [("1", "a.jsonl"), ("4", "b.jsonl")] {
        let o = sli(dir.path(), &["--seed", "3", "--jobs", jobs, "datagen", "--condition", "rp-ri", "--count", "30", "--out", name]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.jsonl")).unwrap());
    assert_eq!(a.iter().filter(|b| **b == b'\n').count(), 30);

    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.jsonl.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 3);
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn idp_and_rp_pi_use_bundled_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = sli(dir.path(), &["datagen", "--condition", "idp-pi", "--count", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = sli(dir.path(), &["--seed", "7", "--cache-only", "datagen", "--condition", "rp-pi", "--count", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().all(|l| l.contains("\"rp-pi-poc-7-")));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "[datagen]\nn_examples = 20\n[bench]\ndistractor_min = 5\n").unwrap();
    let o = sli(dir.path(), &["--config", "run.toml", "datagen", "--condition", "rp-ri", "--count", "2"]);
    let first: Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["inputs"].as_array().unwrap().len(), 20);

    let count_unchanged = |out: &str| -> Vec<usize> {
        out.lines()
            .map(|l| {
                let t: Value = serde_json::from_str(l).unwrap();
                let (i, o) = (t["inputs"].as_array().unwrap(), t["outputs"].as_array().unwrap());
                i.iter().zip(o).filter(|(a, b)| a == b).count()
            })
            .collect()
    };
    let from_file = count_unchanged(&stdout(&sli(dir.path(), &["--config", "run.toml", "bench"])));
    assert!(from_file.iter().all(|&n| n >= 5), "{from_file:?}");
    let from_flag = count_unchanged(&stdout(&sli(dir.path(), &["--config", "run.toml", "bench", "--distractor-min", "2"])));
    assert!(from_flag.iter().any(|&n| n < 5), "{from_flag:?}");

    std::fs::write(dir.path().join("bad.toml"), "[datagen]\nunknown = 1\n").unwrap();
    assert_eq!(sli(dir.path(), &["--config", "bad.toml", "bench"]).status.code(), Some(2));
}

#[test]
fn bench_eval_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let o = sli(dir.path(), &["bench", "--out", "bench.jsonl"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stats: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bench.jsonl.stats.json")).unwrap()).unwrap();
    assert_eq!(stats["tasks"], 10);

    let o = sli(dir.path(), &["eval", "--tasks", "bench.jsonl", "--gold", "--out", "gold"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("| Pass rate (%) | 100.00 | 100.00 |"), "{}", stdout(&o));

    // the same answers as transcripts, one of them unparseable
    let tasks = std::fs::read_to_string(dir.path().join("bench.jsonl")).unwrap();
    let mut samples = String::new();
    for (i, line) in tasks.lines().enumerate() {
        let t: Value = serde_json::from_str(line).unwrap();
        let law = serde_json::to_string(&t["gold_law"]).unwrap();
        let ctor = stdout(&sli(dir.path(), &["parse-law", &law])).lines().next().unwrap().to_string();
        let text = if i == 0 { "no code here".to_string() } else { format!("```python\n{ctor}\n```") };
        samples.push_str(&serde_json::json!({"task_id": t["id"], "transcripts": [text, text, text]}).to_string());
        samples.push('\n');
    }
    std::fs::write(dir.path().join("samples.jsonl"), samples).unwrap();
    let o = sli(dir.path(), &["--format", "json", "eval", "--tasks", "bench.jsonl", "--samples", "samples.jsonl", "--out", "model"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["aggregates"]["pass_rate"], 0.9);

    let o = sli(dir.path(), &["report", "gold.json", "model.json"]);
    let out = stdout(&o);
    assert!(out.contains("| gold | 100.00 | 100.00 |") && out.contains("| model | 90.00 | 90.00 |"), "{out}");
}

#[test]
fn stats_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = sli(dir.path(), &["stats", "--m", "7"]);
    assert_eq!(stdout(&o).trim(), "alpha_adjusted = 0.00714");
    std::fs::write(dir.path().join("x.txt"), "1 2 3 4 5 6").unwrap();
    std::fs::write(dir.path().join("y.txt"), "[2, 4, 5, 7, 9, 8]").unwrap();
    let o = sli(dir.path(), &["--format", "json", "stats", "--x", "x.txt", "--y", "y.txt", "--alternative", "less"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["p_value"], 1.0 / 64.0);
    assert_eq!(v["record"]["significant"], true);
}
