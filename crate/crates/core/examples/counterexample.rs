//! Two doubling measures with close step ratios and distant dimensions.

use dyadim::counterexample::{
    build_pair, dimension_gap_report, epsilon_for_log_gap, verify_ratio_condition,
};

fn main() -> dyadim::Result<()> {
    let (mu, nu, plan) = build_pair(0.1, 0.01, 3)?;
    println!("stage depths: {:?}", plan.depths());
    for a in plan.achieved() {
        println!(
            "stage {} regime {}: mu mass {:.12}, nu mass {:.12} (need > {})",
            a.stage,
            a.regime,
            a.mu_mass,
            a.nu_mass,
            1.0 - a.target
        );
    }

    let ratio = verify_ratio_condition(&mu, &nu, plan.deepest())?;
    for c in &ratio.classes {
        println!("  {}  {:.4} vs {:.4}  gap {:.6}", c.label(), c.step_mu, c.step_nu, c.log_gap);
    }
    println!("sup gap {:.6}", ratio.sup_log_gap);

    let gap = dimension_gap_report(&mu, &nu, &plan);
    println!(
        "dim mu = {:.6}, dim nu <= {:.6}, gap {:.6}",
        gap.dim_mu, gap.dim_nu_bound, gap.gap
    );

    println!("epsilon for a 0.1-nat gap: {:.6}", epsilon_for_log_gap(0.1)?);
    Ok(())
}
