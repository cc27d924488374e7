//! Measures on the dyadic Cantor set driven by non-homogeneous two-state
//! Markov weights.
//!
//! A weight sequence `(p_n, q_n)` fixes the conditional child masses of every
//! dyadic cylinder: a cylinder whose last symbol is `0` sends a fraction `p_n`
//! of its mass to its `0`-child, one ending in `1` sends `q_n`. The crate
//! computes the per-generation Shannon entropies of such measures (by an
//! exact linear recursion, cross-checked against brute-force enumeration),
//! turns them into Hausdorff and packing dimension estimates, probes the
//! almost-sure convergence of local exponents by Monte Carlo, and builds the
//! stage-wise pair of doubling measures whose conditional ratios are
//! uniformly close while their dimensions are far apart.
//!
//! All masses are handled in the log domain (nats). `-inf` is an exact zero.
//!
//! The `examples/` directory holds one runnable program per capability; the
//! `dyadim` binary is a thin config-driven front end over [`runner`].

pub mod counterexample;
pub mod dimension;
pub mod entropy;
pub mod error;
pub mod measure;
pub mod runner;
pub mod summation;
pub mod weights;

pub use counterexample::{BernoulliSpec, PiecewiseMeasure, StagePlan};
pub use dimension::{DimensionEstimate, EstimateMode, SmbReport};
pub use entropy::{EntropyProfile, WindowGap};
pub use error::{Error, Result};
pub use measure::{CylinderAddress, MarkovMeasure, PathTrace};
pub use weights::{WeightPair, WeightSequence};

/// `ln 2`, the normalizing constant between nats and dyadic dimension units.
pub const LN_2: f64 = std::f64::consts::LN_2;
