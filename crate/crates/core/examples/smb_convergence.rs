//! Local exponents along sampled paths approach `c_n`.

use dyadim::dimension::smb_check;
use dyadim::{MarkovMeasure, WeightSequence};

fn main() -> dyadim::Result<()> {
    let m = MarkovMeasure::new(WeightSequence::constant(0.3, 0.7)?);
    let report = smb_check(&m, 10_000, 200, 0, &[100, 1000, 10_000])?;
    for s in &report.summary {
        println!(
            "n={:>6}  c_n={:.6}  median exponent={:.6}  median dev={:.6}  max dev={:.6}",
            s.checkpoint, s.reference, s.median_exponent, s.median_dev, s.max_dev
        );
    }
    Ok(())
}
