//! LR metrics across a grid of regularization strengths, written as the
//! plotting CSV on stdout.

use phishkit::classifiers::LrParams;
use phishkit::corpus::{generate_synthetic_corpus, SyntheticSpec};
use phishkit::evaluation::{metrics_csv, parse_grid, prepare, regularization_sweep, PfaDenominator, SplitSpec, SweepModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = parse_grid(&std::env::args().nth(1).unwrap_or_else(|| "0,1,10,100,1000".into()))?;
    let data = generate_synthetic_corpus(&SyntheticSpec::default())?;
    let split = prepare(&data, &SplitSpec::new(0.7, 7))?;
    let sweep = regularization_sweep(&split, &SweepModel::Lr(LrParams::default()), &grid, PfaDenominator::Standard)?;
    print!("{}", metrics_csv(&sweep.rows()));
    println!("# best lambda {}", sweep.parameter_values[sweep.best()]);
    Ok(())
}
