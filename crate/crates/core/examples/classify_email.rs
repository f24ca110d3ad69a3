//! Trains LR on the synthetic corpus, then classifies fixture emails the
//! same way `phishkit classify` does.
//!
//! ```text
//! cargo run --example classify_email [message.eml ...]
//! ```

use std::path::{Path, PathBuf};

use phishkit::classifiers::{Classifier, LogisticModel, LrParams};
use phishkit::corpus::{generate_synthetic_corpus, SyntheticSpec};
use phishkit::email::{parse_email, RawEmail};
use phishkit::evaluation::Standardizer;
use phishkit::features::{extract_vector, FeatureConfig};
use phishkit::resolver::FixtureResolver;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let data = generate_synthetic_corpus(&SyntheticSpec::default())?;
    let standardizer = Standardizer::fit(&data)?;
    let model = LogisticModel::train(&standardizer.transform(&data)?, &LrParams::default())?;

    let resolver = FixtureResolver::load(root.join("fixtures/resolver.json"))?;
    let config = FeatureConfig::default();
    let mut paths: Vec<PathBuf> = std::env::args_os().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        paths = ["e01.eml", "e02.eml", "e05.eml"].iter().map(|f| root.join("fixtures/mailbox").join(f)).collect();
    }
    for path in paths {
        let email = parse_email(&RawEmail::read(&path)?)?;
        let v = extract_vector(&email, &config, &resolver);
        let x = standardizer.transform_row(ndarray::ArrayView1::from(&v.as_f64()))?;
        let score = model.score(x.view())?;
        let verdict = if model.predict(x.view())? == 1 { "phishing" } else { "legitimate" };
        println!("{}: {verdict} score={score:.4} fired={:?}", path.display(), v.fired());
    }
    Ok(())
}
