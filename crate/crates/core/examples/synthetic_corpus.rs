//! Draws the shipped 2000 + 2000 synthetic corpus and compares each
//! indicator's empirical firing rate with the probability it was drawn from.

use phishkit::corpus::{generate_synthetic_corpus, SyntheticSpec};
use phishkit::features::FEATURE_NAMES;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec::default();
    let data = generate_synthetic_corpus(&spec)?;
    let n = spec.n_per_class as f64;
    println!("{} rows, class counts {:?}", data.len(), data.class_counts());
    println!("{:<18} {:>12} {:>12}", "indicator", "legit p/obs", "phish p/obs");
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        let col = data.features().column(j);
        let legit = col.iter().take(spec.n_per_class).sum::<f64>() / n;
        let phish = col.iter().skip(spec.n_per_class).sum::<f64>() / n;
        println!(
            "{name:<18} {:>5.2}/{:<6.3} {:>5.2}/{:<6.3}",
            spec.legitimate[j], legit, spec.phishing[j], phish
        );
    }
    Ok(())
}
