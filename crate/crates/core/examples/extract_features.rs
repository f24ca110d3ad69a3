//! Runs the ten indicator rules over the fixture mailbox with the offline
//! resolver and prints one vector per email.

use std::path::Path;

use phishkit::email::{parse_email, parse_mbox};
use phishkit::features::{extract_vector, FeatureConfig, FEATURE_NAMES};
use phishkit::resolver::FixtureResolver;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let resolver = FixtureResolver::load(root.join("fixtures/resolver.json"))?;
    let config = FeatureConfig::default();

    println!("{:<44} {}", "subject", FEATURE_NAMES.map(|n| &n[..n.find('_').unwrap()]).join(" "));
    for raw in parse_mbox(&std::fs::read(root.join("fixtures/mailbox.mbox"))?)? {
        let email = parse_email(&raw)?;
        let v = extract_vector(&email, &config, &resolver);
        let cells: Vec<String> = v.indicators.iter().zip(FEATURE_NAMES).map(|(b, n)| format!("{b:>w$}", w = n.find('_').unwrap())).collect();
        let subject: String = email.subject.chars().take(43).collect();
        println!("{subject:<44} {}", cells.join(" "));
    }
    Ok(())
}
