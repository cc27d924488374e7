//! The Markov measure on dyadic cylinders: masses, conditional child ratios,
//! last-symbol marginals and μ-distributed path sampling.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::weights::WeightSequence;

/// A finite binary word `ε_1 … ε_n`; the empty word is the whole space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CylinderAddress {
    bits: Vec<u8>,
}

impl CylinderAddress {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::param(format!("address symbol {b} is not 0 or 1")));
        }
        Ok(Self { bits })
    }

    /// The `index`-th address of generation `generation` in lexicographic
    /// order (first symbol most significant).
    pub fn from_index(index: u64, generation: usize) -> Self {
        debug_assert!(generation < 64 && index < (1u64 << generation));
        let bits = (0..generation)
            .map(|i| ((index >> (generation - 1 - i)) & 1) as u8)
            .collect();
        Self { bits }
    }

    pub fn generation(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn last(&self) -> Option<u8> {
        self.bits.last().copied()
    }

    pub fn child(&self, symbol: u8) -> Self {
        assert!(symbol <= 1);
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.extend_from_slice(&self.bits);
        bits.push(symbol);
        Self { bits }
    }

    pub fn concat(&self, other: &CylinderAddress) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }
}

impl FromStr for CylinderAddress {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::param(format!("address symbol `{other}` is not 0 or 1"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}

impl fmt::Display for CylinderAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// One sampled μ-typical path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub address: CylinderAddress,
    /// `X_n = log(μ(I_n) / μ(I_{n-1}))` for `n = 1..=depth`, in nats.
    pub increments: Vec<f64>,
    /// `log μ(I_n)` for `n = 1..=depth`.
    pub cumulative: Vec<f64>,
}

impl PathTrace {
    pub fn depth(&self) -> usize {
        self.increments.len()
    }

    /// CSV with columns `n,bit,x_n_nats,log_mass_nats`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,bit,x_n_nats,log_mass_nats")?;
        for (i, ((b, x), c)) in self
            .address
            .bits()
            .iter()
            .zip(&self.increments)
            .zip(&self.cumulative)
            .enumerate()
        {
            writeln!(out, "{},{},{},{}", i + 1, b, x, c)?;
        }
        Ok(())
    }
}

/// The rng stream for path `index` under `master_seed`. Streams for distinct
/// indices are disjoint, so paths can be sampled in any order or in parallel.
pub fn path_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct MarkovMeasure {
    weights: WeightSequence,
}

impl MarkovMeasure {
    pub fn new(weights: WeightSequence) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    /// Probability that the symbol at generation `n + 1` is `next`, given
    /// the symbol at generation `n` is `last`. `last = None` is the root step.
    fn step_probability(&self, n: usize, last: Option<u8>, next: u8) -> f64 {
        let w = self.weights.value_at(n);
        let zero = match last {
            None | Some(0) => w.p,
            _ => w.q,
        };
        if next == 0 {
            zero
        } else {
            1.0 - zero
        }
    }

    /// `μ(IJ) / μ(I)` for any `I` of generation `n >= 1` ending in `last`.
    pub fn child_ratio(&self, n: usize, last: u8, next: u8) -> f64 {
        assert!(n >= 1, "the root has no last symbol");
        assert!(last <= 1 && next <= 1);
        self.step_probability(n, Some(last), next)
    }

    /// `log μ(I)` in nats; `-inf` for zero-mass cylinders.
    pub fn cylinder_log_mass(&self, addr: &CylinderAddress) -> f64 {
        let mut last = None;
        let mut acc = 0.0;
        for (n, &b) in addr.bits().iter().enumerate() {
            acc += self.step_probability(n, last, b).ln();
            last = Some(b);
        }
        acc
    }

    pub fn cylinder_mass(&self, addr: &CylinderAddress) -> f64 {
        self.cylinder_log_mass(addr).exp()
    }

    /// Marginals `π_1, …, π_count` of the last symbol, `π_n = [P(ε_n = 0), P(ε_n = 1)]`.
    pub fn marginals(&self, count: usize) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        let p0 = self.weights.value_at(0).p;
        let mut pi = [p0, 1.0 - p0];
        out.push(pi);
        for n in 1..count {
            let w = self.weights.value_at(n);
            let zero = pi[0] * w.p + pi[1] * w.q;
            pi = [zero, 1.0 - zero];
            out.push(pi);
        }
        out
    }

    /// `π_n` for a single generation `n >= 1`.
    pub fn marginal_last_symbol(&self, n: usize) -> Result<[f64; 2]> {
        if n == 0 {
            return Err(Error::param("the last-symbol marginal needs n >= 1"));
        }
        Ok(*self.marginals(n).last().expect("n >= 1"))
    }

    /// Walks one μ-distributed path of length `depth`, handing
    /// `(n, bit, X_n)` to `visit` for `n = 1..=depth`. A branch of
    /// probability zero is never taken.
    pub fn walk_path<R, F>(&self, depth: usize, rng: &mut R, mut visit: F)
    where
        R: Rng + ?Sized,
        F: FnMut(usize, u8, f64),
    {
        let mut last = None;
        for n in 0..depth {
            let zero = self.step_probability(n, last, 0);
            let u: f64 = rng.random();
            let (bit, prob) = if u < zero { (0, zero) } else { (1, 1.0 - zero) };
            visit(n + 1, bit, prob.ln());
            last = Some(bit);
        }
    }

    pub fn sample_path<R: Rng + ?Sized>(&self, depth: usize, rng: &mut R) -> Result<PathTrace> {
        if depth == 0 {
            return Err(Error::param("sample depth must be >= 1"));
        }
        let mut bits = Vec::with_capacity(depth);
        let mut increments = Vec::with_capacity(depth);
        let mut cumulative = Vec::with_capacity(depth);
        let mut acc = 0.0;
        self.walk_path(depth, rng, |_, bit, x| {
            acc += x;
            bits.push(bit);
            increments.push(x);
            cumulative.push(acc);
        });
        Ok(PathTrace {
            address: CylinderAddress { bits },
            increments,
            cumulative,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightPair;
    use crate::LN_2;
    use proptest::prelude::*;

    fn constant(p: f64, q: f64) -> MarkovMeasure {
        MarkovMeasure::new(WeightSequence::constant(p, q).unwrap())
    }

    fn addr(s: &str) -> CylinderAddress {
        s.parse().unwrap()
    }

    #[test]
    fn log_mass_examples() {
        let m = constant(0.5, 0.5);
        assert!((m.cylinder_log_mass(&addr("0110")) + 4.0 * LN_2).abs() < 1e-15);
        assert_eq!(m.cylinder_log_mass(&CylinderAddress::root()), 0.0);

        let m = constant(0.3, 0.7);
        assert!((m.cylinder_log_mass(&addr("00")) - 0.09f64.ln()).abs() < 1e-15);
        // 0 -> 1 -> 1: p_0 = 0.3, then 1 - p_1 = 0.7, then 1 - q_2 = 0.3
        assert!((m.cylinder_mass(&addr("011")) - 0.3 * 0.7 * 0.3).abs() < 1e-15);

        let m = constant(0.0, 0.5);
        assert_eq!(m.cylinder_log_mass(&addr("00")), f64::NEG_INFINITY);
    }

    #[test]
    fn child_ratio_examples() {
        let m = constant(0.3, 0.7);
        assert_eq!(m.child_ratio(4, 0, 0), 0.3);
        assert!((m.child_ratio(4, 1, 1) - 0.3).abs() < 1e-15);

        let per = MarkovMeasure::new(
            WeightSequence::periodic(vec![WeightPair::new(0.2, 0.8), WeightPair::new(0.6, 0.4)])
                .unwrap(),
        );
        assert_eq!(per.child_ratio(3, 1, 0), 0.4);
    }

    #[test]
    fn marginal_examples() {
        let m = constant(0.5, 0.5);
        assert_eq!(m.marginal_last_symbol(17).unwrap(), [0.5, 0.5]);

        let m = constant(0.3, 0.7);
        let pi2 = m.marginal_last_symbol(2).unwrap();
        assert!((pi2[0] - 0.58).abs() < 1e-15);
        assert!((pi2[1] - 0.42).abs() < 1e-15);
        let far = m.marginal_last_symbol(200).unwrap();
        assert!((far[0] - 0.5).abs() < 1e-12);
        assert!(m.marginal_last_symbol(0).is_err());
    }

    #[test]
    fn deterministic_chain_path() {
        let m = constant(1.0, 0.0);
        let t = m.sample_path(5, &mut path_rng(11, 0)).unwrap();
        assert_eq!(t.address, addr("00000"));
        assert!(t.increments.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn uniform_paths_have_exact_log_mass() {
        let m = constant(0.5, 0.5);
        for seed in 0..5 {
            let t = m.sample_path(40, &mut path_rng(seed, 3)).unwrap();
            assert!((t.cumulative[39] + 40.0 * LN_2).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_reproducible_and_consistent() {
        let m = MarkovMeasure::new(
            WeightSequence::random(5, 64, 0.0, 1.0, vec![WeightPair::new(0.4, 0.9)]).unwrap(),
        );
        let a = m.sample_path(100, &mut path_rng(42, 7)).unwrap();
        let b = m.sample_path(100, &mut path_rng(42, 7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, m.sample_path(100, &mut path_rng(42, 8)).unwrap());
        for n in 1..=100 {
            let prefix = CylinderAddress::new(a.address.bits()[..n].to_vec()).unwrap();
            let want = m.cylinder_log_mass(&prefix);
            assert!((a.cumulative[n - 1] - want).abs() < 1e-12);
            assert!(a.increments[n - 1] <= 0.0);
        }
    }

    #[test]
    fn first_bit_frequency_matches_p0() {
        let p0 = 0.37;
        let m = constant(p0, 0.5);
        let paths = 100_000u64;
        let zeros = (0..paths)
            .filter(|&i| m.sample_path(1, &mut path_rng(1, i)).unwrap().address.bits()[0] == 0)
            .count() as f64;
        let freq = zeros / paths as f64;
        let se = (p0 * (1.0 - p0) / paths as f64).sqrt();
        assert!((freq - p0).abs() < 3.0 * se, "freq {freq}");
    }

    #[test]
    fn csv_export_layout() {
        let m = constant(0.5, 0.5);
        let t = m.sample_path(2, &mut path_rng(0, 0)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,bit,x_n_nats,log_mass_nats");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn address_parsing_and_indexing() {
        assert_eq!(CylinderAddress::from_index(6, 4), addr("0110"));
        assert_eq!(addr("0110").to_string(), "0110");
        assert!("012".parse::<CylinderAddress>().is_err());
        assert!(CylinderAddress::new(vec![0, 2]).is_err());
        assert_eq!(addr("01").child(1), addr("011"));
    }

    proptest! {
        #[test]
        fn markov_property_on_siblings(seed in any::<u64>(), n in 1usize..10, idx in any::<u64>(), j in 0u8..2) {
            let m = MarkovMeasure::new(
                WeightSequence::random(seed, 16, 0.01, 0.99, vec![WeightPair::new(0.5, 0.5)]).unwrap(),
            );
            let a = CylinderAddress::from_index(idx % (1 << n), n);
            // flip the first symbol only: same generation, same last bit
            let mut bits = a.bits().to_vec();
            if n > 1 { bits[0] ^= 1; }
            let b = CylinderAddress::new(bits).unwrap();
            let da = m.cylinder_log_mass(&a.child(j)) - m.cylinder_log_mass(&a);
            let db = m.cylinder_log_mass(&b.child(j)) - m.cylinder_log_mass(&b);
            prop_assert!((da - db).abs() < 1e-12);
            prop_assert!((da - m.child_ratio(n, a.last().unwrap(), j).ln()).abs() < 1e-12);
        }
    }
}
