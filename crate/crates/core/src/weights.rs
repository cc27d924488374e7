//! Weight sequences `(p_n, q_n)` driving the non-homogeneous Markov measure.
//!
//! `p_n` is the probability of emitting a `0` after a `0` at the step from
//! generation `n` to `n + 1`; `q_n` is the probability of emitting a `0`
//! after a `1`. The root step only reads `p_0`, so `q_0` is carried but never
//! consulted by the measure.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Horizon used to describe perturbations of sequences that are not
/// eventually periodic.
pub const PERTURB_SCAN_HORIZON: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub p: f64,
    pub q: f64,
}

impl WeightPair {
    pub const fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    fn validate(self, index: usize) -> Result<Self> {
        for (coordinate, value) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidWeight {
                    index,
                    coordinate,
                    value,
                });
            }
        }
        Ok(self)
    }

    fn max_abs_diff(self, other: Self) -> f64 {
        (self.p - other.p).abs().max((self.q - other.q).abs())
    }
}

impl From<(f64, f64)> for WeightPair {
    fn from((p, q): (f64, f64)) -> Self {
        Self { p, q }
    }
}

/// Which of the four declared shapes a sequence has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Constant,
    Periodic,
    Explicit,
    Generator,
}

type RuleFn = Arc<dyn Fn(usize) -> WeightPair + Send + Sync>;

#[derive(Clone)]
enum Generator {
    /// Blocks of length `base * 2^j`, alternating `first` (even `j`) and
    /// `second` (odd `j`).
    DoublingBlocks {
        first: WeightPair,
        second: WeightPair,
        base: usize,
    },
    Shifted {
        inner: Box<WeightSequence>,
        zeta: f64,
    },
    Jittered {
        inner: Box<WeightSequence>,
        zeta: f64,
        seed: u64,
    },
    Custom {
        name: String,
        rule: RuleFn,
    },
}

#[derive(Clone)]
enum Rule {
    Constant(WeightPair),
    Periodic(Vec<WeightPair>),
    Explicit {
        prefix: Vec<WeightPair>,
        tail: Vec<WeightPair>,
    },
    Generator(Generator),
}

/// An immutable, deterministic weight sequence with every value in `[0, 1]`.
#[derive(Clone)]
pub struct WeightSequence {
    rule: Rule,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::Constant(w) => write!(f, "constant({}, {})", w.p, w.q),
            Rule::Periodic(v) => write!(f, "periodic{:?}", pairs_debug(v)),
            Rule::Explicit { prefix, tail } => write!(
                f,
                "explicit{:?} tail {:?}",
                pairs_debug(prefix),
                pairs_debug(tail)
            ),
            Rule::Generator(Generator::DoublingBlocks {
                first,
                second,
                base,
            }) => write!(
                f,
                "doubling-blocks(({}, {}), ({}, {}), base {})",
                first.p, first.q, second.p, second.q, base
            ),
            Rule::Generator(Generator::Shifted { inner, zeta }) => {
                write!(f, "shift({:?}, {})", inner, zeta)
            }
            Rule::Generator(Generator::Jittered { inner, zeta, seed }) => {
                write!(f, "jitter({:?}, {}, seed {})", inner, zeta, seed)
            }
            Rule::Generator(Generator::Custom { name, .. }) => write!(f, "generator({name})"),
        }
    }
}

fn pairs_debug(v: &[WeightPair]) -> Vec<(f64, f64)> {
    v.iter().map(|w| (w.p, w.q)).collect()
}

fn validate_all(pairs: &[WeightPair], offset: usize) -> Result<()> {
    for (i, w) in pairs.iter().enumerate() {
        w.validate(offset + i)?;
    }
    Ok(())
}

impl WeightSequence {
    pub fn constant(p: f64, q: f64) -> Result<Self> {
        let w = WeightPair::new(p, q).validate(0)?;
        Ok(Self {
            rule: Rule::Constant(w),
        })
    }

    pub fn periodic(pairs: Vec<WeightPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::param("a periodic sequence needs at least one pair"));
        }
        validate_all(&pairs, 0)?;
        Ok(Self {
            rule: Rule::Periodic(pairs),
        })
    }

    /// A finite prefix followed by a repeating tail. A one-element tail is a
    /// constant tail. Tail phase is counted from the end of the prefix.
    pub fn explicit(prefix: Vec<WeightPair>, tail: Vec<WeightPair>) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::param("an explicit sequence needs a non-empty tail"));
        }
        validate_all(&prefix, 0)?;
        validate_all(&tail, prefix.len())?;
        Ok(Self {
            rule: Rule::Explicit { prefix, tail },
        })
    }

    /// `len` pairs drawn uniformly from `[low, high]` with a seeded stream,
    /// materialized as an explicit sequence with the given tail.
    pub fn random(
        seed: u64,
        len: usize,
        low: f64,
        high: f64,
        tail: Vec<WeightPair>,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&low) || !(0.0..=1.0).contains(&high) || low > high {
            return Err(Error::param(format!(
                "random weight range [{low}, {high}] must lie inside [0, 1]"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prefix = (0..len)
            .map(|_| {
                let p = low + (high - low) * rng.random::<f64>();
                let q = low + (high - low) * rng.random::<f64>();
                WeightPair::new(p, q)
            })
            .collect();
        Self::explicit(prefix, tail)
    }

    pub fn doubling_blocks(first: WeightPair, second: WeightPair, base: usize) -> Result<Self> {
        if base == 0 {
            return Err(Error::param("doubling blocks need a positive base length"));
        }
        first.validate(0)?;
        second.validate(0)?;
        Ok(Self {
            rule: Rule::Generator(Generator::DoublingBlocks {
                first,
                second,
                base,
            }),
        })
    }

    /// An arbitrary deterministic rule. The rule must return values in
    /// `[0, 1]`; [`WeightSequence::value_at`] panics otherwise.
    pub fn generator<F>(name: impl Into<String>, rule: F) -> Self
    where
        F: Fn(usize) -> WeightPair + Send + Sync + 'static,
    {
        Self {
            rule: Rule::Generator(Generator::Custom {
                name: name.into(),
                rule: Arc::new(rule),
            }),
        }
    }

    pub fn kind(&self) -> SequenceKind {
        match self.rule {
            Rule::Constant(_) => SequenceKind::Constant,
            Rule::Periodic(_) => SequenceKind::Periodic,
            Rule::Explicit { .. } => SequenceKind::Explicit,
            Rule::Generator(_) => SequenceKind::Generator,
        }
    }

    /// `(p_n, q_n)`.
    pub fn value_at(&self, n: usize) -> WeightPair {
        match &self.rule {
            Rule::Constant(w) => *w,
            Rule::Periodic(v) => v[n % v.len()],
            Rule::Explicit { prefix, tail } => match prefix.get(n) {
                Some(w) => *w,
                None => tail[(n - prefix.len()) % tail.len()],
            },
            Rule::Generator(g) => g.value_at(n),
        }
    }

    /// The repeating part of an eventually periodic sequence: the index at
    /// which it starts and one full cycle of values.
    pub fn eventual_cycle(&self) -> Option<(usize, &[WeightPair])> {
        match &self.rule {
            Rule::Constant(w) => Some((0, std::slice::from_ref(w))),
            Rule::Periodic(v) => Some((0, v)),
            Rule::Explicit { prefix, tail } => Some((prefix.len(), tail)),
            Rule::Generator(_) => None,
        }
    }

    pub fn is_eventually_periodic(&self) -> bool {
        self.eventual_cycle().is_some()
    }

    pub fn values(&self, count: usize) -> Vec<WeightPair> {
        (0..count).map(|n| self.value_at(n)).collect()
    }

    fn map_stored<F>(&self, mut f: F) -> Option<Self>
    where
        F: FnMut(WeightPair) -> WeightPair,
    {
        let rule = match &self.rule {
            Rule::Constant(w) => Rule::Constant(f(*w)),
            Rule::Periodic(v) => Rule::Periodic(v.iter().map(|w| f(*w)).collect()),
            Rule::Explicit { prefix, tail } => Rule::Explicit {
                prefix: prefix.iter().map(|w| f(*w)).collect(),
                tail: tail.iter().map(|w| f(*w)).collect(),
            },
            Rule::Generator(_) => return None,
        };
        Some(Self { rule })
    }
}

impl Generator {
    fn value_at(&self, n: usize) -> WeightPair {
        match self {
            Generator::DoublingBlocks {
                first,
                second,
                base,
            } => {
                // block j covers [base (2^j - 1), base (2^{j+1} - 1))
                let m = (n / base + 1) as u64;
                let j = 63 - m.leading_zeros();
                if j.is_multiple_of(2) {
                    *first
                } else {
                    *second
                }
            }
            Generator::Shifted { inner, zeta } => {
                let w = inner.value_at(n);
                WeightPair::new(clamp_unit(w.p + zeta), clamp_unit(w.q + zeta))
            }
            Generator::Jittered { inner, zeta, seed } => {
                let w = inner.value_at(n);
                let mut rng = index_stream(*seed, n as u64);
                let dp = jitter(&mut rng, *zeta);
                let dq = jitter(&mut rng, *zeta);
                WeightPair::new(clamp_unit(w.p + dp), clamp_unit(w.q + dq))
            }
            Generator::Custom { name, rule } => {
                let w = rule(n);
                assert!(
                    w.validate(n).is_ok(),
                    "generator `{name}` produced ({}, {}) at index {n}",
                    w.p,
                    w.q
                );
                w
            }
        }
    }
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn index_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn jitter(rng: &mut ChaCha8Rng, zeta: f64) -> f64 {
    (2.0 * rng.random::<f64>() - 1.0) * zeta
}

/// An ℓ∞ distance together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distance {
    pub value: f64,
    /// `true` when the supremum over all indices was attained; `false` when
    /// only `[0, compared)` was inspected (a lower bound).
    pub exact: bool,
    pub compared: usize,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `sup_n max(|p_n - p'_n|, |q_n - q'_n|)`.
///
/// Exact when both sequences are eventually periodic (the comparison covers
/// both prefixes plus one common period); otherwise computed over
/// `[0, horizon)` and flagged as a lower bound.
pub fn linf_distance(a: &WeightSequence, b: &WeightSequence, horizon: usize) -> Result<Distance> {
    if horizon == 0 {
        return Err(Error::param("linf_distance needs horizon >= 1"));
    }
    let exact_span = match (a.eventual_cycle(), b.eventual_cycle()) {
        (Some((sa, ca)), Some((sb, cb))) => {
            let lcm = (ca.len() / gcd(ca.len(), cb.len())).checked_mul(cb.len());
            lcm.and_then(|l| sa.max(sb).checked_add(l))
        }
        _ => None,
    };
    let (compared, exact) = match exact_span {
        Some(span) => (span, true),
        None => (horizon, false),
    };
    let value = (0..compared)
        .map(|n| a.value_at(n).max_abs_diff(b.value_at(n)))
        .fold(0.0, f64::max);
    Ok(Distance {
        value,
        exact,
        compared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbMode {
    UniformShift,
    SeededRandom,
}

impl std::str::FromStr for PerturbMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-shift" => Ok(Self::UniformShift),
            "seeded-random" => Ok(Self::SeededRandom),
            other => Err(Error::param(format!("unknown perturbation mode `{other}`"))),
        }
    }
}

impl fmt::Display for PerturbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UniformShift => "uniform-shift",
            Self::SeededRandom => "seeded-random",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Perturbed {
    pub weights: WeightSequence,
    pub requested: f64,
    /// Distance actually realized after clamping to `[0, 1]`.
    pub realized: Distance,
    /// Some coordinate hit the boundary of `[0, 1]`.
    pub clamped: bool,
}

/// Moves every coordinate by at most `zeta`, clamping to `[0, 1]`.
///
/// Stored values (constant, periodic, explicit) are perturbed in place, so
/// the result keeps the original shape; seeded-random draws one offset per
/// stored coordinate. Generator sequences are wrapped and perturbed per
/// index, and their metadata is measured over [`PERTURB_SCAN_HORIZON`].
pub fn perturb(w: &WeightSequence, zeta: f64, mode: PerturbMode, seed: u64) -> Result<Perturbed> {
    if !(zeta >= 0.0 && zeta.is_finite()) {
        return Err(Error::param(format!("perturbation size {zeta} must be >= 0")));
    }
    if zeta == 0.0 {
        return Ok(Perturbed {
            weights: w.clone(),
            requested: 0.0,
            realized: linf_distance(w, w, PERTURB_SCAN_HORIZON)?,
            clamped: false,
        });
    }

    let mut clamped = false;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shift = |x: f64, delta: f64| {
        let y = x + delta;
        if !(0.0..=1.0).contains(&y) {
            clamped = true;
        }
        clamp_unit(y)
    };
    let stored = w.map_stored(|pair| {
        let (dp, dq) = match mode {
            PerturbMode::UniformShift => (zeta, zeta),
            PerturbMode::SeededRandom => {
                let dp = jitter(&mut rng, zeta);
                (dp, jitter(&mut rng, zeta))
            }
        };
        WeightPair::new(shift(pair.p, dp), shift(pair.q, dq))
    });

    let weights = match stored {
        Some(s) => s,
        None => {
            let inner = Box::new(w.clone());
            let g = match mode {
                PerturbMode::UniformShift => Generator::Shifted { inner, zeta },
                PerturbMode::SeededRandom => Generator::Jittered { inner, zeta, seed },
            };
            let out = WeightSequence {
                rule: Rule::Generator(g),
            };
            clamped = (0..PERTURB_SCAN_HORIZON).any(|n| {
                let (a, b) = (w.value_at(n), out.value_at(n));
                let moved = |x: f64, y: f64| (y == 0.0 || y == 1.0) && x != y;
                match mode {
                    PerturbMode::UniformShift => a.p + zeta > 1.0 || a.q + zeta > 1.0,
                    PerturbMode::SeededRandom => moved(a.p, b.p) || moved(a.q, b.q),
                }
            });
            out
        }
    };
    let realized = linf_distance(w, &weights, PERTURB_SCAN_HORIZON)?;
    Ok(Perturbed {
        weights,
        requested: zeta,
        realized,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(p: f64, q: f64) -> WeightPair {
        WeightPair::new(p, q)
    }

    #[test]
    fn value_at_follows_each_rule() {
        let c = WeightSequence::constant(0.3, 0.7).unwrap();
        assert_eq!(c.value_at(5), pair(0.3, 0.7));

        let per = WeightSequence::periodic(vec![pair(0.2, 0.8), pair(0.6, 0.4)]).unwrap();
        assert_eq!(per.value_at(3), pair(0.6, 0.4));

        let ex = WeightSequence::explicit(vec![pair(0.1, 0.9)], vec![pair(0.5, 0.5)]).unwrap();
        assert_eq!(ex.value_at(0), pair(0.1, 0.9));
        assert_eq!(ex.value_at(7), pair(0.5, 0.5));
    }

    #[test]
    fn periodic_tail_phase_starts_after_prefix() {
        let ex = WeightSequence::explicit(
            vec![pair(0.1, 0.1); 3],
            vec![pair(0.2, 0.2), pair(0.3, 0.3)],
        )
        .unwrap();
        assert_eq!(ex.value_at(3), pair(0.2, 0.2));
        assert_eq!(ex.value_at(4), pair(0.3, 0.3));
        assert_eq!(ex.value_at(5), pair(0.2, 0.2));
    }

    #[test]
    fn out_of_range_weights_are_rejected() {
        assert!(matches!(
            WeightSequence::constant(1.2, 0.5),
            Err(Error::InvalidWeight { coordinate: "p", .. })
        ));
        assert!(WeightSequence::periodic(vec![pair(0.5, -0.1)]).is_err());
        assert!(WeightSequence::periodic(vec![]).is_err());
        assert!(WeightSequence::constant(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn doubling_blocks_alternate_with_doubling_lengths() {
        let a = pair(0.5, 0.5);
        let b = pair(0.1, 0.1);
        let w = WeightSequence::doubling_blocks(a, b, 3).unwrap();
        let got: Vec<bool> = (0..21).map(|n| w.value_at(n) == a).collect();
        // lengths 3, 6, 12
        let want: Vec<bool> = (0..21).map(|n| n < 3 || n >= 9).collect();
        assert_eq!(got, want);
        assert!(!w.is_eventually_periodic());
    }

    #[test]
    fn distance_examples() {
        let a = WeightSequence::constant(0.3, 0.7).unwrap();
        let b = WeightSequence::constant(0.35, 0.7).unwrap();
        let d = linf_distance(&a, &b, 10).unwrap();
        assert!((d.value - 0.05).abs() < 1e-15);
        assert!(d.exact);

        assert_eq!(linf_distance(&a, &a, 1).unwrap().value, 0.0);

        let per = WeightSequence::periodic(vec![pair(0.2, 0.8), pair(0.6, 0.4)]).unwrap();
        let half = WeightSequence::constant(0.5, 0.5).unwrap();
        let d = linf_distance(&per, &half, 1).unwrap();
        assert!((d.value - 0.3).abs() < 1e-15);
        assert!(d.exact);
        assert_eq!(d.compared, 2);
    }

    #[test]
    fn distance_against_generator_is_horizon_limited() {
        let g = WeightSequence::doubling_blocks(pair(0.5, 0.5), pair(0.1, 0.1), 4).unwrap();
        let c = WeightSequence::constant(0.5, 0.5).unwrap();
        let short = linf_distance(&g, &c, 4).unwrap();
        assert!(!short.exact);
        assert_eq!(short.value, 0.0);
        let long = linf_distance(&g, &c, 100).unwrap();
        assert!((long.value - 0.4).abs() < 1e-15);
        assert!(linf_distance(&g, &c, 0).is_err());
    }

    #[test]
    fn perturb_examples() {
        let w = WeightSequence::constant(0.3, 0.7).unwrap();
        let out = perturb(&w, 0.05, PerturbMode::UniformShift, 0).unwrap();
        assert_eq!(out.weights.value_at(0), pair(0.3 + 0.05, 0.7 + 0.05));
        assert_eq!(out.weights.kind(), SequenceKind::Constant);
        assert!(!out.clamped);

        let zero = perturb(&w, 0.0, PerturbMode::SeededRandom, 9).unwrap();
        assert_eq!(zero.weights.value_at(3), w.value_at(3));

        let edge = WeightSequence::constant(0.98, 0.5).unwrap();
        let out = perturb(&edge, 0.05, PerturbMode::UniformShift, 0).unwrap();
        assert_eq!(out.weights.value_at(0).p, 1.0);
        assert!((out.weights.value_at(0).q - 0.55).abs() < 1e-15);
        assert!((out.realized.value - 0.05).abs() < 1e-12);
        assert!(out.clamped);
        assert!(perturb(&edge, -0.1, PerturbMode::UniformShift, 0).is_err());
    }

    #[test]
    fn perturbing_generators_wraps_them() {
        let g = WeightSequence::doubling_blocks(pair(0.5, 0.5), pair(0.97, 0.1), 2).unwrap();
        let out = perturb(&g, 0.05, PerturbMode::UniformShift, 0).unwrap();
        assert!(!out.realized.exact);
        assert!(out.clamped);
        let out = perturb(&g, 0.05, PerturbMode::SeededRandom, 3).unwrap();
        assert!(out.realized.value <= 0.05);
        let again = perturb(&g, 0.05, PerturbMode::SeededRandom, 3).unwrap();
        for n in 0..200 {
            assert_eq!(out.weights.value_at(n), again.weights.value_at(n));
        }
    }

    fn arb_pairs(max_len: usize) -> impl Strategy<Value = Vec<WeightPair>> {
        prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1..max_len)
            .prop_map(|v| v.into_iter().map(WeightPair::from).collect())
    }

    fn arb_sequence() -> impl Strategy<Value = WeightSequence> {
        (arb_pairs(6), arb_pairs(4))
            .prop_map(|(prefix, tail)| WeightSequence::explicit(prefix, tail).unwrap())
    }

    proptest! {
        #[test]
        fn perturbation_is_bounded_per_coordinate(
            w in arb_sequence(),
            zeta in 0.0..0.3f64,
            seed in any::<u64>(),
            random in any::<bool>(),
        ) {
            let mode = if random { PerturbMode::SeededRandom } else { PerturbMode::UniformShift };
            let out = perturb(&w, zeta, mode, seed).unwrap();
            for n in 0..32 {
                let (a, b) = (w.value_at(n), out.weights.value_at(n));
                prop_assert!((a.p - b.p).abs() <= zeta + 1e-15);
                prop_assert!((a.q - b.q).abs() <= zeta + 1e-15);
                prop_assert!((0.0..=1.0).contains(&b.p) && (0.0..=1.0).contains(&b.q));
            }
            prop_assert!(out.realized.value <= zeta + 1e-15);
        }

        #[test]
        fn distance_is_a_pseudometric(a in arb_sequence(), b in arb_sequence(), c in arb_sequence(), h in 1usize..50) {
            let d = |x: &WeightSequence, y: &WeightSequence| {
                let all: f64 = (0..h).map(|n| x.value_at(n).max_abs_diff(y.value_at(n))).fold(0.0, f64::max);
                all
            };
            prop_assert_eq!(d(&a, &b), d(&b, &a));
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-15);
            prop_assert_eq!(linf_distance(&a, &a, h).unwrap().value, 0.0);
            let exact = linf_distance(&a, &b, h).unwrap();
            prop_assert!(exact.exact);
            prop_assert_eq!(exact.value, linf_distance(&b, &a, h).unwrap().value);
            prop_assert!(exact.value >= d(&a, &b));
        }

        #[test]
        fn periodic_values_repeat(v in arb_pairs(5), n in 0usize..1000) {
            let m = v.len();
            let w = WeightSequence::periodic(v).unwrap();
            prop_assert_eq!(w.value_at(n), w.value_at(n % m));
            prop_assert_eq!(w.value_at(n).p.to_bits(), w.value_at(n).p.to_bits());
        }
    }
}
