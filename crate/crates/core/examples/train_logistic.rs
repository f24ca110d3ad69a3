//! Logistic regression on the standardized synthetic corpus, held-out
//! metrics and the learned weights.

use phishkit::classifiers::{LogisticModel, LrParams};
use phishkit::corpus::{generate_synthetic_corpus, SyntheticSpec};
use phishkit::evaluation::{evaluate, prepare, PfaDenominator, SplitSpec};
use phishkit::features::FEATURE_NAMES;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = generate_synthetic_corpus(&SyntheticSpec::default())?;
    let split = prepare(&data, &SplitSpec::new(0.7, 7))?;
    let params = LrParams { lambda: 0.7, ..LrParams::default() };
    let model = LogisticModel::train(&split.train, &params)?;

    let first = model.cost_history.first().copied().unwrap_or(f64::NAN);
    let last = model.cost_history.last().copied().unwrap_or(f64::NAN);
    println!("cost {first:.4} -> {last:.4} over {} epochs", params.epochs);

    let (cm, m) = evaluate(&model, &split.test, PfaDenominator::Standard)?;
    println!("held out: {cm:?}");
    println!("p_d {:.4}  p_fa {:.4}  p_md {:.4}  accuracy {:.4}", m.p_d, m.p_fa, m.p_md, m.accuracy);

    println!("bias {:+.4}", model.weights[0]);
    for (name, w) in FEATURE_NAMES.iter().zip(&model.weights[1..]) {
        println!("{name:<18} {w:+.4}");
    }
    Ok(())
}
