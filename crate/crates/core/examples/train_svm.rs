//! SMO on a small linearly separable set, then on the synthetic corpus with
//! an RBF kernel.

use ndarray::Array2;
use phishkit::classifiers::{Classifier, KernelKind, KernelSpec, SvmModel, SvmParams};
use phishkit::corpus::{generate_synthetic_corpus, SyntheticSpec};
use phishkit::evaluation::{evaluate, prepare, PfaDenominator, SplitSpec};
use phishkit::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two clusters either side of x0 = 0.
    let x = Array2::from_shape_fn((8, 2), |(i, j)| {
        let side = if i < 4 { -1.0 } else { 1.0 };
        if j == 0 { side * (1.0 + (i % 4) as f64 * 0.5) } else { (i % 4) as f64 - 1.5 }
    });
    let toy = Dataset::new(x, vec![0, 0, 0, 0, 1, 1, 1, 1])?;
    let svm = SvmModel::train(&toy, &SvmParams::new(KernelSpec::linear()))?;
    let sum: f64 = svm.dual_coef.iter().sum();
    println!(
        "toy: {} support vectors, bias {:+.4}, sum(alpha*y) {sum:.2e}, kkt gap {:.2e}",
        svm.n_support(),
        svm.bias,
        svm.kkt_gap
    );
    println!("toy predictions {:?}", svm.predict_dataset(&toy)?);

    let data = generate_synthetic_corpus(&SyntheticSpec::default())?;
    let split = prepare(&data, &SplitSpec::new(0.7, 7))?;
    let params = SvmParams::new(KernelSpec::with_defaults(KernelKind::Rbf, data.n_features()));
    let svm = SvmModel::train(&split.train, &params)?;
    svm.ensure_converged()?;
    let (_, m) = evaluate(&svm, &split.test, PfaDenominator::Standard)?;
    println!(
        "rbf: {} iterations, {} support vectors, held-out accuracy {:.4}",
        svm.iterations,
        svm.n_support(),
        m.accuracy
    );
    Ok(())
}
