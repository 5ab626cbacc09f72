use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_attackability"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn synth(dir: &Path, posts: usize) -> PathBuf {
    let out = run(&["synth", "--out", dir.to_str().unwrap(), "--posts", &posts.to_string(), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("config.toml")
}

fn stage(name: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![name, "--config", config.to_str().unwrap()];
    if !extra.contains(&"--jobs") {
        args.extend(["--jobs", "2"]);
    }
    args.extend_from_slice(extra);
    run(&args)
}

fn xml_ok(text: &str) {
    let opts = roxmltree::ParsingOptions { allow_dtd: true, ..Default::default() };
    roxmltree::Document::parse_with_options(text, opts).expect("well-formed XHTML");
}

#[test]
fn full_pipeline_on_small_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path(), 150);
    let out = stage("all", &config, &[]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(out.status.success(), "{stderr}");
    let o = tmp.path().join("out");
    for f in [
        "corpus.json",
        "splits.json",
        "labels.jsonl",
        "datasets.json",
        "domains.csv",
        "knowledge.csv",
        "features.csv",
        "effects.csv",
        "effects.html",
        "model_attacked.json",
        "grid_attacked.csv",
        "metrics.csv",
        "metrics.txt",
        "report/index.html",
        "manifests/report.json",
    ] {
        assert!(o.join(f).is_file(), "{f} missing");
    }
    let metrics = std::fs::read_to_string(o.join("metrics.txt")).unwrap();
    assert!(metrics.contains("LR") && metrics.contains("Length") && metrics.contains("Random"));
    xml_ok(&std::fs::read_to_string(o.join("report/index.html")).unwrap());
    xml_ok(&std::fs::read_to_string(o.join("effects.html")).unwrap());
    let page = std::fs::read_dir(o.join("report"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap() != "index.html")
        .expect("a post page");
    xml_ok(&std::fs::read_to_string(page).unwrap());

    // Everything is current now.
    let again = stage("all", &config, &[]);
    assert!(again.status.success());
    assert_eq!(String::from_utf8_lossy(&again.stderr).matches("up to date").count(), 9);
}

#[test]
fn stage_order_is_enforced() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path(), 30);
    let out = stage("evaluate", &config, &[]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("run train first"), "{msg}");

    let out = stage("label", &config, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run ingest first"));
}

#[test]
fn forced_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path(), 40);
    assert!(stage("ingest", &config, &[]).status.success());
    let read = |f: &str| std::fs::read(tmp.path().join("out").join(f)).unwrap();
    assert!(stage("label", &config, &["--force"]).status.success());
    let first = (read("labels.jsonl"), read("labeled_corpus.json"), read("datasets.json"));
    assert!(stage("label", &config, &["--force"]).status.success());
    assert_eq!(first, (read("labels.jsonl"), read("labeled_corpus.json"), read("datasets.json")));
}

#[test]
fn changed_settings_rerun_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path(), 40);
    assert!(stage("ingest", &config, &[]).status.success());
    assert!(stage("label", &config, &[]).status.success());
    let current = stage("label", &config, &[]);
    assert!(String::from_utf8_lossy(&current.stderr).contains("up to date"));
    let text = std::fs::read_to_string(&config).unwrap().replace("max_quotes = 3", "max_quotes = 4");
    std::fs::write(&config, text).unwrap();
    let rerun = stage("label", &config, &[]);
    assert!(rerun.status.success());
    assert!(!String::from_utf8_lossy(&rerun.stderr).contains("up to date"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.toml");
    assert_eq!(stage("ingest", &missing, &[]).status.code(), Some(1));
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "seed = 1\n[paths]\nposts = 'p'\n").unwrap();
    assert_eq!(stage("ingest", &bad, &[]).status.code(), Some(1));
}

#[test]
fn missing_input_data_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path(), 20);
    std::fs::remove_file(tmp.path().join("posts.jsonl")).unwrap();
    let out = stage("ingest", &config, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn all_on_bundled_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let text = std::fs::read_to_string(fixture.join("labeling.toml")).unwrap();
    let data = fixture.join("../../../core/tests/fixtures/labeling").canonicalize().unwrap();
    let text = text.replace("../../../core/tests/fixtures/labeling", data.to_str().unwrap());
    let config = tmp.path().join("config.toml");
    std::fs::write(&config, text).unwrap();
    let out = stage("all", &config, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["metrics.csv", "effects.csv", "report/index.html"] {
        assert!(tmp.path().join("out").join(f).is_file(), "{f}");
    }
}

#[test]
fn job_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path(), 80);
    let read_all = |jobs: &str| {
        let out = stage("all", &config, &["--force", "--jobs", jobs]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let o = tmp.path().join("out");
        ["labels.jsonl", "domain_topics.json", "features.csv", "effects.csv", "model_attacked.json", "metrics.csv"]
            .map(|f| std::fs::read(o.join(f)).unwrap())
    };
    assert!(read_all("1") == read_all("4"));
}
