//! The four-kernel SVM table on the synthetic corpus.

use phishkit::classifiers::SvmParams;
use phishkit::corpus::{generate_synthetic_corpus, SyntheticSpec};
use phishkit::evaluation::{kernel_comparison, prepare, text_table, PfaDenominator, SplitSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = generate_synthetic_corpus(&SyntheticSpec::default())?;
    let split = prepare(&data, &SplitSpec::new(0.7, 7))?;
    let table = kernel_comparison(&split, &SvmParams::default(), PfaDenominator::Standard)?;
    print!("{}", text_table("SVM kernels", "Kernel", &table.metric_rows()));
    println!("best kernel: {}", table.best().label);
    Ok(())
}
