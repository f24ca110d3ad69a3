//! Best ANN, best SVM and best LR side by side. This trains six networks,
//! four SVMs and eleven LR models, so build with `--release`.

use phishkit::corpus::{generate_synthetic_corpus, SyntheticSpec};
use phishkit::evaluation::{model_comparison, prepare, text_table, ComparisonConfig, PfaDenominator, SplitSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = generate_synthetic_corpus(&SyntheticSpec::default())?;
    let split = prepare(&data, &SplitSpec::new(0.7, 7))?;
    let mut config = ComparisonConfig::default();
    config.ann.seed = 7;
    let table = model_comparison(&split, &config, PfaDenominator::Standard)?;
    print!("{}", text_table("Model comparison", "Model", &table.metric_rows()));
    Ok(())
}
