//! Per-generation Shannon entropies of a Markov measure.
//!
//! `H_n = -Σ_{I ∈ F_n} μ(I) log μ(I)` is computed two ways: by the linear
//! chain-rule recursion over last-symbol marginals ([`entropy_profile`]) and
//! by enumerating all `2^n` cylinders ([`entropy_bruteforce`]), which serves
//! as the oracle for the first. Entropies are in nats; `c_n` is `H_n`
//! divided by `n log 2`.

mod lemma;
mod window;

use std::io::Write;

pub use lemma::{lemma2_scan, lemma2_scan_on, Lemma2Point, Lemma2Scan};
pub use window::{
    delta_recursion_check, eta_bound, window_entropy, write_window_csv, RecursionReport,
    RecursionRow, WindowGap, WindowTable,
};

use crate::error::{Error, Result};
use crate::measure::MarkovMeasure;
use crate::summation::{pairwise_sum, CompensatedSum};
use crate::LN_2;

/// Largest generation [`entropy_bruteforce`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 22;

/// `h(p) = p log p + (1 - p) log(1 - p)` with `0 log 0 = 0`; lies in `[-log 2, 0]`.
pub fn binary_entropy(p: f64) -> f64 {
    xlogx(p) + xlogx(1.0 - p)
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `γ` for the step from generation `n` to `n + 1`: `h(p_n)` after a `0`,
/// `h(q_n)` after a `1`.
pub fn step_entropy(m: &MarkovMeasure, n: usize, last: u8) -> f64 {
    assert!(n >= 1, "the root step has no last symbol");
    let w = m.weights().value_at(n);
    match last {
        0 => binary_entropy(w.p),
        1 => binary_entropy(w.q),
        other => panic!("symbol {other} is not 0 or 1"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    horizon: usize,
    entropies: Vec<f64>,
    normalized: Vec<f64>,
    marginals: Vec<[f64; 2]>,
}

impl EntropyProfile {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `H_n` in nats, `1 <= n <= horizon`.
    pub fn entropy(&self, n: usize) -> f64 {
        self.entropies[n - 1]
    }

    /// `c_n = H_n / (n log 2)`.
    pub fn normalized(&self, n: usize) -> f64 {
        self.normalized[n - 1]
    }

    /// `π_n`.
    pub fn marginal(&self, n: usize) -> [f64; 2] {
        self.marginals[n - 1]
    }

    pub fn entropies(&self) -> &[f64] {
        &self.entropies
    }

    pub fn normalized_values(&self) -> &[f64] {
        &self.normalized
    }

    /// CSV with columns `n,H_nats,c_n,pi0`, or with an extra
    /// `H_bruteforce_nats` column when `oracle` is given (one value per row).
    pub fn write_csv<W: Write>(&self, mut out: W, oracle: Option<&[f64]>) -> std::io::Result<()> {
        match oracle {
            Some(_) => writeln!(out, "n,H_nats,c_n,pi0,H_bruteforce_nats")?,
            None => writeln!(out, "n,H_nats,c_n,pi0")?,
        }
        for n in 1..=self.horizon {
            write!(
                out,
                "{},{},{},{}",
                n,
                self.entropy(n),
                self.normalized(n),
                self.marginal(n)[0]
            )?;
            if let Some(o) = oracle {
                write!(out, ",{}", o[n - 1])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// `H_1..H_horizon` by the recursion
/// `H_{n+1} = H_n - [π_n(0) h(p_n) + π_n(1) h(q_n)]`, linear in `horizon`.
pub fn entropy_profile(m: &MarkovMeasure, horizon: usize) -> Result<EntropyProfile> {
    if horizon == 0 {
        return Err(Error::param("entropy profile horizon must be >= 1"));
    }
    let marginals = m.marginals(horizon);
    let mut entropies = Vec::with_capacity(horizon);
    let mut acc = CompensatedSum::new();
    acc.add(-binary_entropy(m.weights().value_at(0).p));
    entropies.push(acc.value());
    for n in 1..horizon {
        let w = m.weights().value_at(n);
        let pi = marginals[n - 1];
        acc.add(-(pi[0] * binary_entropy(w.p) + pi[1] * binary_entropy(w.q)));
        entropies.push(acc.value());
    }
    let normalized = entropies
        .iter()
        .enumerate()
        .map(|(i, h)| (h / ((i + 1) as f64 * LN_2)).clamp(0.0, 1.0))
        .collect();
    Ok(EntropyProfile {
        horizon,
        entropies,
        normalized,
        marginals,
    })
}

/// `H_n` by enumerating all `2^n` cylinders of generation `n`; zero-mass
/// cylinders contribute nothing. Masses are built level by level from the
/// child ratios, and the terms are reduced in a fixed pairwise order.
pub fn entropy_bruteforce(m: &MarkovMeasure, n: usize) -> Result<f64> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            requested: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let p0 = m.weights().value_at(0).p;
    // index i holds the address whose bits are the binary digits of i
    let mut masses = vec![p0, 1.0 - p0];
    for generation in 1..n {
        let mut next = Vec::with_capacity(masses.len() * 2);
        for (i, &mass) in masses.iter().enumerate() {
            let last = (i & 1) as u8;
            next.push(mass * m.child_ratio(generation, last, 0));
            next.push(mass * m.child_ratio(generation, last, 1));
        }
        masses = next;
    }
    let terms: Vec<f64> = masses.iter().map(|&x| -xlogx(x)).collect();
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::CylinderAddress;
    use crate::weights::{WeightPair, WeightSequence};

    fn constant(p: f64, q: f64) -> MarkovMeasure {
        MarkovMeasure::new(WeightSequence::constant(p, q).unwrap())
    }

    #[test]
    fn binary_entropy_values() {
        assert!((binary_entropy(0.5) + LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        let direct = 0.3f64 * 0.3f64.ln() + 0.7 * 0.7f64.ln();
        assert!((binary_entropy(0.3) - direct).abs() < 1e-15);
        assert!((binary_entropy(0.3) + 0.610864).abs() < 1e-6);
    }

    #[test]
    fn step_entropy_values() {
        assert!((step_entropy(&constant(0.5, 0.5), 9, 0) + LN_2).abs() < 1e-15);
        assert!((step_entropy(&constant(0.3, 0.7), 2, 1) + 0.610864).abs() < 1e-6);
        assert_eq!(step_entropy(&constant(1.0, 0.5), 3, 0), 0.0);
    }

    #[test]
    fn uniform_profile_is_full_dimensional() {
        let prof = entropy_profile(&constant(0.5, 0.5), 10).unwrap();
        for n in 1..=10 {
            assert!((prof.entropy(n) - n as f64 * LN_2).abs() < 1e-12);
            assert!((prof.normalized(n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn first_generation_entropy_matches_two_cylinders() {
        let w = WeightSequence::explicit(vec![WeightPair::new(0.25, 0.9)], vec![WeightPair::new(0.5, 0.5)])
            .unwrap();
        let m = MarkovMeasure::new(w);
        let prof = entropy_profile(&m, 1).unwrap();
        let by_hand = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert!((prof.entropy(1) - by_hand).abs() < 1e-15);
        assert!((prof.entropy(1) - 0.562335).abs() < 1e-6);
    }

    #[test]
    fn stationary_constant_chain_limit() {
        let prof = entropy_profile(&constant(0.3, 0.7), 2000).unwrap();
        assert!((prof.normalized(2000) - 0.881291).abs() < 1e-6);
    }

    #[test]
    fn bruteforce_examples() {
        let b = entropy_bruteforce(&constant(0.5, 0.5), 8).unwrap();
        assert!((b - 8.0 * LN_2).abs() < 1e-12);
        assert_eq!(entropy_bruteforce(&constant(0.0, 1.0), 5).unwrap(), 0.0);
        assert!(matches!(
            entropy_bruteforce(&constant(0.5, 0.5), 23),
            Err(Error::SizeLimit { requested: 23, .. })
        ));
    }

    #[test]
    fn bruteforce_masses_match_cylinder_masses() {
        // same enumeration, computed from the per-address product instead
        let m = MarkovMeasure::new(
            WeightSequence::random(3, 10, 0.0, 1.0, vec![WeightPair::new(0.2, 0.6)]).unwrap(),
        );
        let n = 9;
        let direct: f64 = (0..1u64 << n)
            .map(|i| m.cylinder_mass(&CylinderAddress::from_index(i, n)))
            .map(|x| -xlogx(x))
            .sum();
        assert!((entropy_bruteforce(&m, n).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn recursion_matches_bruteforce_seed_42() {
        let m = MarkovMeasure::new(
            WeightSequence::random(42, 16, 0.0, 1.0, vec![WeightPair::new(0.5, 0.5)]).unwrap(),
        );
        let prof = entropy_profile(&m, 12).unwrap();
        assert!((prof.entropy(12) - entropy_bruteforce(&m, 12).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn profile_invariants_hold_for_degenerate_weights() {
        let w = WeightSequence::periodic(vec![
            WeightPair::new(0.0, 1.0),
            WeightPair::new(1.0, 0.3),
            WeightPair::new(0.5, 0.0),
        ])
        .unwrap();
        let prof = entropy_profile(&MarkovMeasure::new(w), 300).unwrap();
        for n in 1..=300 {
            let h = prof.entropy(n);
            assert!(h >= 0.0 && h <= n as f64 * LN_2 + 1e-12);
            if n > 1 {
                let d = h - prof.entropy(n - 1);
                assert!(d >= -1e-12 && d <= LN_2 + 1e-12);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let prof = entropy_profile(&constant(0.5, 0.5), 3).unwrap();
        let mut buf = Vec::new();
        prof.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,H_nats,c_n,pi0\n1,"));
        assert_eq!(text.lines().count(), 4);
    }
}
