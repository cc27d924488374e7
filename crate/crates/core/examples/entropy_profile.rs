//! Entropy recursion against brute-force enumeration.

use dyadim::entropy::{entropy_bruteforce, entropy_profile};
use dyadim::{MarkovMeasure, WeightPair, WeightSequence};

fn main() -> dyadim::Result<()> {
    let w = WeightSequence::random(42, 16, 0.0, 1.0, vec![WeightPair::new(0.5, 0.5)])?;
    let m = MarkovMeasure::new(w);
    let profile = entropy_profile(&m, 14)?;

    println!("{:>3} {:>12} {:>12} {:>9}", "n", "H_n", "brute", "c_n");
    for n in 1..=14 {
        let brute = entropy_bruteforce(&m, n)?;
        println!(
            "{n:>3} {:>12.8} {:>12.8} {:>9.6}",
            profile.entropy(n),
            brute,
            profile.normalized(n)
        );
    }

    let stationary = entropy_profile(&MarkovMeasure::new(WeightSequence::constant(0.3, 0.7)?), 5000)?;
    println!("constant (0.3, 0.7): c_5000 = {:.6}", stationary.normalized(5000));
    Ok(())
}
