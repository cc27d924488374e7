//! Where `|h(p) - h(q)| <= (1 - |p - q|) log 2` breaks.

use dyadim::entropy::{lemma2_scan, lemma2_scan_on, Lemma2Point};

fn main() -> dyadim::Result<()> {
    let full = lemma2_scan(0.01)?;
    println!(
        "full grid: {} points, {} violations",
        full.points_checked,
        full.violations.len()
    );
    if let Some(w) = full.worst {
        println!("worst at ({:.2}, {:.2}): excess {:.6}", w.p, w.q, w.excess());
    }
    let pt = Lemma2Point::evaluate(0.01, 0.5);
    println!("(0.01, 0.50): lhs {:.6}, rhs {:.6}", pt.lhs, pt.rhs);

    let inner = lemma2_scan_on(0.01, 0.2, 0.8)?;
    println!("[0.2, 0.8]^2: {} violations", inner.violations.len());
    Ok(())
}
