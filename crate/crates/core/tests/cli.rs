mod common;

use std::path::Path;

use common::{fixtures, phishkit};
use phishkit::classifiers::{serialize_model, LogisticModel, Model, ModelFile, Preprocessing};

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn ok(args: &[&str]) -> String {
    let out = phishkit(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = phishkit(args);
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn small_corpus(dir: &Path) -> String {
    let spec = path(dir, "spec.json");
    std::fs::write(
        &spec,
        r#"{"n_per_class": 150, "seed": 5,
            "legitimate": [0.3, 0.05, 0.03, 0.15, 0.1, 0.01, 0.2, 0.15, 0.3, 0.01],
            "phishing": [0.75, 0.35, 0.55, 0.45, 0.55, 0.3, 0.6, 0.55, 0.8, 0.15]}"#,
    )
    .unwrap();
    let csv = path(dir, "corpus.csv");
    ok(&["gen-corpus", "--input", &spec, "--output", &csv]);
    csv
}

#[test]
fn extract_writes_the_expected_fixture_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "vectors.csv");
    let fx = fixtures();
    ok(&["extract", "--input", fx.join("mailbox.mbox").to_str().unwrap(), "--fixtures", fx.join("resolver.json").to_str().unwrap(), "--output", &out]);
    let expected = std::fs::read_to_string(fx.join("expected_vectors.csv")).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), expected);
    let manifest = std::fs::read_to_string(format!("{out}.manifest.json")).unwrap();
    assert!(manifest.contains("\"legitimate\": 9") && manifest.contains("\"phishing\": 11"));
}

#[test]
fn empty_mailbox_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mbox = path(dir.path(), "empty.mbox");
    std::fs::write(&mbox, "").unwrap();
    let out = path(dir.path(), "v.csv");
    ok(&["extract", "--input", &mbox, "--fixtures", fixtures().join("resolver.json").to_str().unwrap(), "--output", &out]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n");
}

#[test]
fn missing_fixture_is_a_data_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = path(dir.path(), "no-such-resolver.json");
    let (status, stderr) = code(&[
        "extract",
        "--input",
        fixtures().join("mailbox").to_str().unwrap(),
        "--fixtures",
        &missing,
        "--output",
        &path(dir.path(), "v.csv"),
    ]);
    assert_eq!(status, 2);
    assert!(stderr.contains(&missing), "{stderr}");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&[]).0, 1);
    assert_eq!(code(&["train", "--model", "knn", "--input", "a", "--output", "b"]).0, 1);
    assert_eq!(code(&["extract", "--input", "a", "--output", "b"]).0, 1);
    assert_eq!(code(&["sweep", "--input", "a", "--output", "b", "--grid", "1:0:0.1"]).0, 1);
    assert_eq!(code(&["--help"]).0, 0);
}

#[test]
fn bad_spec_and_single_class_data_fail() {
    let dir = tempfile::tempdir().unwrap();
    let spec = path(dir.path(), "bad.json");
    std::fs::write(&spec, r#"{"n_per_class": 0, "seed": 1, "legitimate": [], "phishing": []}"#).unwrap();
    assert_eq!(code(&["gen-corpus", "--input", &spec, "--output", &path(dir.path(), "x.csv")]).0, 2);

    let csv = path(dir.path(), "one.csv");
    std::fs::write(&csv, "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n0,0,0,0,0,0,0,0,0,0,1\n1,0,0,0,0,0,0,0,0,0,1\n").unwrap();
    let (status, stderr) = code(&["train", "--input", &csv, "--model", "lr", "--output", &path(dir.path(), "m.json")]);
    assert_eq!(status, 2);
    assert!(stderr.contains("both classes"), "{stderr}");
}

#[test]
fn divergence_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let csv = small_corpus(dir.path());
    let (status, stderr) =
        code(&["train", "--input", &csv, "--model", "ann", "--layers", "4", "--lr", "1e300", "--epochs", "5", "--output", &path(dir.path(), "m.json")]);
    assert_eq!(status, 3, "{stderr}");
}

#[test]
fn gen_corpus_default_spec_has_four_thousand_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "c.csv");
    ok(&["gen-corpus", "--output", &csv, "--seed", "3"]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4001);
}

#[test]
fn sweep_grid_gives_eleven_rows_with_the_exact_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv = small_corpus(dir.path());
    let out = path(dir.path(), "sweep.csv");
    ok(&["sweep", "--input", &csv, "--model", "lr", "--grid", "0:1:0.1", "--epochs", "200", "--output", &out]);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,p_d,p_fa,p_md,accuracy");
    assert_eq!(lines.len(), 12);
    assert!(lines[1].starts_with("0,") && lines[11].starts_with("1,"));
    for line in &lines[1..] {
        assert!(line.split(',').skip(1).all(|v| v.len() == 6 && v.as_bytes()[1] == b'.'), "{line}");
    }
}

#[test]
fn train_then_classify_fixture_emails() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = path(dir.path(), "c.csv");
    ok(&["gen-corpus", "--output", &corpus]);
    let model = path(dir.path(), "lr.json");
    ok(&["train", "--input", &corpus, "--model", "lr", "--output", &model]);
    let fx = fixtures();
    let resolver = fx.join("resolver.json");
    let classify = |eml: &str| ok(&["classify", "--model", &model, "--input", fx.join("mailbox").join(eml).to_str().unwrap(), "--fixtures", resolver.to_str().unwrap()]);
    let phish = classify("e05.eml");
    assert!(phish.starts_with("phishing score="), "{phish}");
    assert!(phish.contains("f10_bad_attachment"));
    let clean = classify("e01.eml");
    assert!(clean.starts_with("legitimate score=") && clean.trim_end().ends_with("fired=none"), "{clean}");

    let broken = path(dir.path(), "broken.eml");
    std::fs::write(&broken, "From: x@y.com\nSubject: no body separator").unwrap();
    let (status, _) = code(&["classify", "--model", &model, "--input", &broken, "--fixtures", resolver.to_str().unwrap()]);
    assert_ne!(status, 0);
}

fn hand_model(dir: &Path) -> String {
    let mut lr = LogisticModel::zeros(10);
    lr.weights[0] = -1.0;
    lr.weights[1] = 2.0;
    let p = path(dir, "hand.json");
    std::fs::write(&p, serialize_model(&ModelFile::new(Model::Lr(lr), Preprocessing::default()))).unwrap();
    p
}

#[test]
fn evaluate_reports_both_false_alarm_denominators() {
    let dir = tempfile::tempdir().unwrap();
    let model = hand_model(dir.path());
    // Two phishing rows caught, one legitimate row flagged, three passed.
    let csv = path(dir.path(), "hand.csv");
    let mut text = String::from("f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n");
    for (f1, label) in [(1, 1), (1, 1), (1, 0), (0, 0), (0, 0), (0, 0)] {
        text.push_str(&format!("{f1},0,0,0,0,0,0,0,0,0,{label}\n"));
    }
    std::fs::write(&csv, text).unwrap();
    let standard = path(dir.path(), "standard.csv");
    let paper = path(dir.path(), "paper.csv");
    ok(&["evaluate", "--model", &model, "--input", &csv, "--output", &standard]);
    ok(&["evaluate", "--model", &model, "--input", &csv, "--output", &paper, "--pfa-denominator", "paper"]);
    assert_eq!(std::fs::read_to_string(&standard).unwrap(), "param,p_d,p_fa,p_md,accuracy\nlr,1.0000,0.2500,0.0000,0.8333\n");
    assert_eq!(std::fs::read_to_string(&paper).unwrap(), "param,p_d,p_fa,p_md,accuracy\nlr,1.0000,0.5000,0.0000,0.8333\n");
}

#[test]
fn perfectly_separated_data_scores_full_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let model = hand_model(dir.path());
    let csv = path(dir.path(), "sep.csv");
    std::fs::write(&csv, "f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,label\n1,0,0,0,0,0,0,0,0,0,1\n0,1,1,0,0,0,0,0,0,0,0\n").unwrap();
    let report = ok(&["evaluate", "--model", &model, "--input", &csv]);
    assert!(report.contains("accuracy=1.0000"), "{report}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let csv = small_corpus(dir.path());
    for (kind, extra) in [("lr", vec![]), ("ann", vec!["--layers", "6", "--epochs", "50"]), ("svm", vec!["--kernel", "poly"])] {
        let a = path(dir.path(), &format!("{kind}-a.json"));
        let b = path(dir.path(), &format!("{kind}-b.json"));
        for out in [&a, &b] {
            let mut args = vec!["train", "--input", &csv, "--model", kind, "--seed", "11", "--output", out];
            args.extend(&extra);
            ok(&args);
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{kind}");
    }
}
