mod common;

use common::fixtures;
use phishkit::corpus::load_indicator_dataset;
use phishkit::email::{parse_email, parse_mbox, ParsedEmail, RawEmail};
use phishkit::features::{extract_vector, FeatureConfig, FeatureVector, Label};
use phishkit::resolver::FixtureResolver;
use phishkit::Dataset;

fn mailbox_files() -> Vec<RawEmail> {
    let mut paths: Vec<_> = std::fs::read_dir(fixtures().join("mailbox")).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths.iter().map(|p| RawEmail::read(p).unwrap()).collect()
}

fn vectors(emails: &[ParsedEmail]) -> Vec<FeatureVector> {
    let resolver = FixtureResolver::load(fixtures().join("resolver.json")).unwrap();
    let config = FeatureConfig::default();
    emails
        .iter()
        .map(|e| {
            let label = Label::parse(e.label_hint.as_deref().unwrap()).unwrap();
            extract_vector(e, &config, &resolver).with_label(label)
        })
        .collect()
}

fn parsed(raws: &[RawEmail]) -> Vec<ParsedEmail> {
    raws.iter().map(|r| parse_email(r).unwrap()).collect()
}

#[test]
fn twenty_emails_match_the_hand_labeled_vectors() {
    let emails = parsed(&mailbox_files());
    assert_eq!(emails.len(), 20);
    let got = Dataset::from_vectors(&vectors(&emails)).unwrap();
    let expected = load_indicator_dataset(fixtures().join("expected_vectors.csv")).unwrap();
    for (i, email) in emails.iter().enumerate() {
        assert_eq!(got.row(i), expected.row(i), "email {} ({:?})", i + 1, email.subject);
    }
    assert_eq!(got.labels(), expected.labels());
}

#[test]
fn mbox_and_separate_files_parse_identically() {
    let from_mbox = parse_mbox(&std::fs::read(fixtures().join("mailbox.mbox")).unwrap()).unwrap();
    let a = parsed(&from_mbox);
    let b = parsed(&mailbox_files());
    assert_eq!(a, b);
}

#[test]
fn literal_indicator_cases() {
    let emails = parsed(&mailbox_files());
    let vs = vectors(&emails);
    let find = |pred: &dyn Fn(&ParsedEmail) -> bool| -> FeatureVector {
        let i = emails.iter().position(pred).expect("fixture email present");
        vs[i]
    };

    let ip = find(&|e| e.links.iter().any(|l| l.host == "50.10.125.26"));
    assert_eq!(ip.f6_clear_ip(), 1);
    let short = find(&|e| e.links.iter().any(|l| l.host == "goo.gl"));
    assert_eq!(short.f5_hidden(), 1);
    let verify = find(&|e| e.subject.contains("Verify Now"));
    assert_eq!(verify.f3_blacklist(), 1);
    let exe = find(&|e| e.attachments.iter().any(|a| a.extension == "exe"));
    assert_eq!(exe.f10_bad_attachment(), 1);
    let clean = find(&|e| e.links.is_empty() && e.attachments.is_empty() && e.sender_domain == "und.edu");
    assert_eq!(clean.fired(), Vec::<&str>::new());
}

#[test]
fn every_indicator_fires_somewhere_in_the_fixture() {
    let vs = vectors(&parsed(&mailbox_files()));
    for j in 0..10 {
        assert!(vs.iter().any(|v| v.indicators[j] == 1), "f{} never fires", j + 1);
        assert!(vs.iter().any(|v| v.indicators[j] == 0), "f{} always fires", j + 1);
    }
}
