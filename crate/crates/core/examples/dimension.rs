//! Exact and numeric dimension estimates.

use dyadim::dimension::{dimension_estimate, numeric_dimension_estimate};
use dyadim::{MarkovMeasure, WeightPair, WeightSequence};

fn main() -> dyadim::Result<()> {
    let cases = [
        ("uniform", WeightSequence::constant(0.5, 0.5)?),
        ("constant (0.3, 0.7)", WeightSequence::constant(0.3, 0.7)?),
        ("bernoulli 0.4", WeightSequence::constant(0.4, 0.4)?),
        (
            "doubling blocks",
            WeightSequence::doubling_blocks(WeightPair::new(0.5, 0.5), WeightPair::new(0.1, 0.1), 1)?,
        ),
    ];
    for (name, w) in cases {
        let m = MarkovMeasure::new(w);
        println!("{name:>20}: {}", dimension_estimate(&m, 100_000, 10_000)?.summary());
    }

    let m = MarkovMeasure::new(WeightSequence::constant(0.3, 0.7)?);
    let numeric = numeric_dimension_estimate(&m, 100_000, 1000)?;
    println!("numeric surrogate for (0.3, 0.7): {}", numeric.summary());
    Ok(())
}
