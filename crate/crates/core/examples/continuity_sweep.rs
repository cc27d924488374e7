//! Dimension differences under shrinking perturbations.

use dyadim::dimension::continuity_sweep;
use dyadim::weights::PerturbMode;
use dyadim::WeightSequence;

fn main() -> dyadim::Result<()> {
    let w = WeightSequence::constant(0.3, 0.7)?;
    let zetas = [0.1, 0.05, 0.02, 0.01, 0.0];
    for mode in [PerturbMode::UniformShift, PerturbMode::SeededRandom] {
        println!("{mode}");
        for r in continuity_sweep(&w, &zetas, mode, 1, 10_000, 1000)? {
            println!(
                "  zeta={:.3}  dist={:.4}  lower diff={:.6}  upper diff={:.6}",
                r.zeta, r.realized_distance, r.lower_diff, r.upper_diff
            );
        }
    }
    Ok(())
}
