//! A (100, 100) relu network on the synthetic corpus.
//!
//! Pass a smaller epoch count as the first argument for a quicker run.

use phishkit::classifiers::{AnnModel, AnnParams};
use phishkit::corpus::{generate_synthetic_corpus, SyntheticSpec};
use phishkit::evaluation::{evaluate, prepare, PfaDenominator, SplitSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let data = generate_synthetic_corpus(&SyntheticSpec::default())?;
    let split = prepare(&data, &SplitSpec::new(0.7, 7))?;
    let params = AnnParams { epochs, seed: 7, ..AnnParams::default() };
    let model = AnnModel::train(&split.train, &params)?;
    for (i, c) in model.cost_history.iter().enumerate().step_by((epochs / 10).max(1)) {
        println!("epoch {i:>5}  cost {c:.5}");
    }
    let (_, m) = evaluate(&model, &split.test, PfaDenominator::Standard)?;
    println!("held out: p_d {:.4}  p_fa {:.4}  accuracy {:.4}", m.p_d, m.p_fa, m.accuracy);
    Ok(())
}
