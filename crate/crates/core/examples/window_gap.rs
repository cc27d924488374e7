//! Window entropies and the decay of the gap between the two states.

use dyadim::entropy::{delta_recursion_check, eta_bound, window_entropy};
use dyadim::{MarkovMeasure, WeightPair, WeightSequence};

fn main() -> dyadim::Result<()> {
    let w = WeightSequence::random(3, 256, 0.05, 0.95, vec![WeightPair::new(0.2, 0.9)])?;
    let m = MarkovMeasure::new(w);

    for k in [1, 2, 5, 10, 50, 200] {
        let g = window_entropy(&m, 10, k)?;
        println!(
            "k={k:>3}  a={:>10.5}  b={:>10.5}  delta={:.6}  eta(k-1)={:.6}",
            g.a,
            g.b,
            g.delta,
            eta_bound(k.max(2) - 1)
        );
    }

    let report = delta_recursion_check(&m, 100, 200)?;
    println!(
        "{} pairs checked, {} eta violations, worst delta/eta = {:.4}",
        report.rows.len(),
        report.eta_violations,
        report.max_eta_ratio
    );
    Ok(())
}
