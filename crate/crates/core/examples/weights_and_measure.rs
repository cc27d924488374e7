//! Cylinder masses of a two-state Markov measure.

use dyadim::measure::path_rng;
use dyadim::{CylinderAddress, MarkovMeasure, WeightPair, WeightSequence};

fn main() -> dyadim::Result<()> {
    let w = WeightSequence::periodic(vec![WeightPair::new(0.2, 0.8), WeightPair::new(0.6, 0.4)])?;
    let m = MarkovMeasure::new(w);

    for s in ["0", "01", "011", "0110"] {
        let addr: CylinderAddress = s.parse()?;
        println!("mu({s:>4}) = {:.6}", m.cylinder_mass(&addr));
    }

    // children always split the parent
    let parent: CylinderAddress = "0110".parse()?;
    let kids = m.cylinder_mass(&parent.child(0)) + m.cylinder_mass(&parent.child(1));
    println!("mu(01100) + mu(01101) = {kids:.6}");

    for (n, pi) in m.marginals(6).iter().enumerate() {
        println!("pi_{}(0) = {:.6}", n + 1, pi[0]);
    }

    let trace = m.sample_path(12, &mut path_rng(7, 0))?;
    println!("sampled {} with log-mass {:.6}", trace.address, trace.cumulative[11]);
    Ok(())
}
