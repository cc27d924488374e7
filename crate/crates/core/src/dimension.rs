//! Hausdorff and packing dimension estimates of Markov measures.
//!
//! The lower (Hausdorff) dimension of the measure equals the lower entropy
//! `liminf c_n` and the upper (packing) dimension equals `limsup c_n`. For
//! eventually periodic weights the limit exists and has a closed form over
//! the periodic cycle of last-symbol marginals; otherwise the liminf and
//! limsup are replaced by the min and max of `c_n` over a trailing window.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{binary_entropy, entropy_profile};
use crate::error::{Error, Result};
use crate::measure::{path_rng, MarkovMeasure};
use crate::weights::{perturb, PerturbMode, WeightSequence};
use crate::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    ExactPeriodic,
    HorizonNumeric,
}

impl fmt::Display for EstimateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExactPeriodic => "exact-periodic",
            Self::HorizonNumeric => "horizon-numeric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionEstimate {
    /// Hausdorff dimension of the measure (lower entropy over `log 2`).
    pub lower: f64,
    /// Packing dimension of the measure (upper entropy over `log 2`).
    pub upper: f64,
    pub mode: EstimateMode,
    pub horizon: usize,
    pub window: usize,
}

impl DimensionEstimate {
    pub fn summary(&self) -> String {
        format!(
            "lower={:.6}, upper={:.6}, mode={}",
            self.lower, self.upper, self.mode
        )
    }

    /// CSV with columns `lower,upper,mode,horizon,window`, values to 6 decimals.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "lower,upper,mode,horizon,window")?;
        writeln!(
            out,
            "{:.6},{:.6},{},{},{}",
            self.lower, self.upper, self.mode, self.horizon, self.window
        )
    }
}

/// `lim c_n` for eventually periodic weights.
///
/// Over one period the marginal map `π(0) ↦ q_j + (p_j - q_j) π(0)` composes
/// to an affine map with slope `Π (p_j - q_j)`, a strict contraction as soon
/// as one `|p_j - q_j| < 1`. Its fixed point seeds the periodic cycle of
/// marginals, and the limit is the cycle average of the step entropies.
pub fn exact_dimension_periodic(m: &MarkovMeasure) -> Result<f64> {
    let (_, cycle) = m.weights().eventual_cycle().ok_or(Error::NotPeriodic)?;
    if cycle.iter().all(|w| (w.p - w.q).abs() >= 1.0) {
        return Err(Error::DegeneratePeriod);
    }
    let (slope, offset) = cycle.iter().fold((1.0, 0.0), |(a, b), w| {
        let d = w.p - w.q;
        (d * a, w.q + d * b)
    });
    let mut zero = offset / (1.0 - slope);
    let mut total = 0.0;
    for w in cycle {
        total -= zero * binary_entropy(w.p) + (1.0 - zero) * binary_entropy(w.q);
        zero = w.q + (w.p - w.q) * zero;
    }
    Ok((total / (cycle.len() as f64 * LN_2)).clamp(0.0, 1.0))
}

fn check_horizon(horizon: usize, window: usize) -> Result<()> {
    if window < 10 || horizon < 10 * window {
        return Err(Error::param(format!(
            "need horizon >= 10 * window >= 100, got horizon {horizon}, window {window}"
        )));
    }
    Ok(())
}

/// Exact limit when the weights are eventually periodic with a contracting
/// marginal cycle, trailing-window min/max of `c_n` otherwise.
pub fn dimension_estimate(
    m: &MarkovMeasure,
    horizon: usize,
    window: usize,
) -> Result<DimensionEstimate> {
    check_horizon(horizon, window)?;
    match exact_dimension_periodic(m) {
        Ok(d) => Ok(DimensionEstimate {
            lower: d,
            upper: d,
            mode: EstimateMode::ExactPeriodic,
            horizon,
            window,
        }),
        Err(Error::NotPeriodic | Error::DegeneratePeriod) => {
            numeric_dimension_estimate(m, horizon, window)
        }
        Err(e) => Err(e),
    }
}

/// min and max of `c_n` over `horizon - window < n <= horizon`.
pub fn numeric_dimension_estimate(
    m: &MarkovMeasure,
    horizon: usize,
    window: usize,
) -> Result<DimensionEstimate> {
    check_horizon(horizon, window)?;
    let profile = entropy_profile(m, horizon)?;
    let tail = &profile.normalized_values()[horizon - window..];
    let lower = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DimensionEstimate {
        lower,
        upper,
        mode: EstimateMode::HorizonNumeric,
        horizon,
        window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckpointSummary {
    pub checkpoint: usize,
    /// `c_n` at the checkpoint.
    pub reference: f64,
    pub mean_dev: f64,
    pub max_dev: f64,
    pub median_dev: f64,
    pub median_exponent: f64,
}

/// Local exponents `-log μ(I_n(x)) / (n log 2)` of sampled paths compared
/// with `c_n` at a set of checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmbReport {
    pub depth: usize,
    pub paths: usize,
    pub seed: u64,
    /// Sorted, without duplicates.
    pub checkpoints: Vec<usize>,
    /// `exponents[path][i]` at `checkpoints[i]`.
    pub exponents: Vec<Vec<f64>>,
    /// `|exponent - c_n|`, same layout as `exponents`.
    pub deviations: Vec<Vec<f64>>,
    pub summary: Vec<CheckpointSummary>,
}

impl SmbReport {
    /// CSV with columns `checkpoint,mean_dev,max_dev,paths`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "checkpoint,mean_dev,max_dev,paths")?;
        for s in &self.summary {
            writeln!(out, "{},{},{},{}", s.checkpoint, s.mean_dev, s.max_dev, self.paths)?;
        }
        Ok(())
    }
}

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Samples `paths` independent μ-typical paths (path `i` uses rng stream `i`
/// under `seed`) and records their local exponents at `checkpoints`.
pub fn smb_check(
    m: &MarkovMeasure,
    depth: usize,
    paths: usize,
    seed: u64,
    checkpoints: &[usize],
) -> Result<SmbReport> {
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    if paths == 0 || cps.is_empty() || cps[0] == 0 || *cps.last().unwrap() > depth {
        return Err(Error::param(format!(
            "smb check needs paths >= 1 and checkpoints in [1, {depth}]"
        )));
    }
    let profile = entropy_profile(m, depth)?;
    let reference: Vec<f64> = cps.iter().map(|&n| profile.normalized(n)).collect();

    let exponents: Vec<Vec<f64>> = (0..paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut out = Vec::with_capacity(cps.len());
            let mut next = 0;
            let mut acc = 0.0;
            m.walk_path(cps[cps.len() - 1], &mut rng, |n, _, x| {
                acc += x;
                if next < cps.len() && n == cps[next] {
                    out.push(-acc / (n as f64 * LN_2));
                    next += 1;
                }
            });
            out
        })
        .collect();
    let deviations: Vec<Vec<f64>> = exponents
        .iter()
        .map(|row| row.iter().zip(&reference).map(|(e, c)| (e - c).abs()).collect())
        .collect();

    let summary = cps
        .iter()
        .enumerate()
        .map(|(j, &checkpoint)| {
            let devs: Vec<f64> = deviations.iter().map(|row| row[j]).collect();
            let exps: Vec<f64> = exponents.iter().map(|row| row[j]).collect();
            CheckpointSummary {
                checkpoint,
                reference: reference[j],
                mean_dev: devs.iter().sum::<f64>() / paths as f64,
                max_dev: devs.iter().copied().fold(0.0, f64::max),
                median_dev: median(&devs),
                median_exponent: median(&exps),
            }
        })
        .collect();

    Ok(SmbReport {
        depth,
        paths,
        seed,
        checkpoints: cps,
        exponents,
        deviations,
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub zeta: f64,
    pub realized_distance: f64,
    pub lower_diff: f64,
    pub upper_diff: f64,
    /// `exact-periodic` only when both estimates were exact.
    pub mode: EstimateMode,
}

/// Perturbs `w` by each `zeta`, estimates both dimensions of the original
/// and perturbed measures with the same horizon and window, and tabulates
/// the absolute differences, largest `zeta` first.
pub fn continuity_sweep(
    w: &WeightSequence,
    zetas: &[f64],
    mode: PerturbMode,
    seed: u64,
    horizon: usize,
    window: usize,
) -> Result<Vec<SweepRow>> {
    if zetas.is_empty() {
        return Err(Error::param("continuity sweep needs at least one zeta"));
    }
    let base = dimension_estimate(&MarkovMeasure::new(w.clone()), horizon, window)?;
    let mut rows = zetas
        .iter()
        .map(|&zeta| {
            let pert = perturb(w, zeta, mode, seed)?;
            let est = dimension_estimate(&MarkovMeasure::new(pert.weights), horizon, window)?;
            let both_exact = base.mode == EstimateMode::ExactPeriodic
                && est.mode == EstimateMode::ExactPeriodic;
            Ok(SweepRow {
                zeta,
                realized_distance: pert.realized.value,
                lower_diff: (base.lower - est.lower).abs(),
                upper_diff: (base.upper - est.upper).abs(),
                mode: if both_exact {
                    EstimateMode::ExactPeriodic
                } else {
                    EstimateMode::HorizonNumeric
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.zeta.total_cmp(&a.zeta));
    Ok(rows)
}

/// CSV with columns `zeta,realized_distance,lower_diff,upper_diff,mode`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "zeta,realized_distance,lower_diff,upper_diff,mode")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.zeta, r.realized_distance, r.lower_diff, r.upper_diff, r.mode
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightPair;

    fn constant(p: f64, q: f64) -> MarkovMeasure {
        MarkovMeasure::new(WeightSequence::constant(p, q).unwrap())
    }

    #[test]
    fn exact_examples() {
        assert!((exact_dimension_periodic(&constant(0.5, 0.5)).unwrap() - 1.0).abs() < 1e-15);
        let d = exact_dimension_periodic(&constant(0.3, 0.7)).unwrap();
        assert!((d - 0.881291).abs() < 1e-6);
        let d = exact_dimension_periodic(&constant(0.4, 0.4)).unwrap();
        assert!((d - 0.970951).abs() < 1e-6);
        // Bernoulli reduction
        let p = 0.17;
        let d = exact_dimension_periodic(&constant(p, p)).unwrap();
        assert!((d + binary_entropy(p) / LN_2).abs() < 1e-15);
    }

    #[test]
    fn degenerate_period_is_rejected() {
        assert!(matches!(
            exact_dimension_periodic(&constant(1.0, 0.0)),
            Err(Error::DegeneratePeriod)
        ));
        let g = WeightSequence::doubling_blocks(WeightPair::new(0.5, 0.5), WeightPair::new(0.1, 0.1), 8)
            .unwrap();
        assert!(matches!(
            exact_dimension_periodic(&MarkovMeasure::new(g)),
            Err(Error::NotPeriodic)
        ));
    }

    #[test]
    fn periodic_limit_matches_long_profile() {
        let w = WeightSequence::explicit(
            vec![WeightPair::new(0.9, 0.05); 7],
            vec![
                WeightPair::new(0.2, 0.8),
                WeightPair::new(0.6, 0.1),
                WeightPair::new(0.95, 0.3),
            ],
        )
        .unwrap();
        let m = MarkovMeasure::new(w);
        let exact = exact_dimension_periodic(&m).unwrap();
        let num = numeric_dimension_estimate(&m, 30_000, 3_000).unwrap();
        assert!((num.lower - exact).abs() < 1e-3 && (num.upper - exact).abs() < 1e-3);
        assert!(num.lower <= num.upper);
    }

    #[test]
    fn estimate_examples() {
        let e = dimension_estimate(&constant(0.5, 0.5), 1000, 100).unwrap();
        assert_eq!((e.lower, e.upper, e.mode), (1.0, 1.0, EstimateMode::ExactPeriodic));
        assert_eq!(e.summary(), "lower=1.000000, upper=1.000000, mode=exact-periodic");

        let e = dimension_estimate(&constant(0.3, 0.7), 1000, 100).unwrap();
        assert!((e.lower - 0.881291).abs() < 1e-6);
        assert!(dimension_estimate(&constant(0.3, 0.7), 999, 100).is_err());
        assert!(dimension_estimate(&constant(0.3, 0.7), 1000, 9).is_err());
    }

    #[test]
    fn degenerate_period_falls_back_to_numeric() {
        let e = dimension_estimate(&constant(0.0, 1.0), 1000, 100).unwrap();
        assert_eq!(e.mode, EstimateMode::HorizonNumeric);
        assert_eq!((e.lower, e.upper), (0.0, 0.0));
    }

    #[test]
    fn doubling_blocks_separate_lower_and_upper() {
        let g = WeightSequence::doubling_blocks(
            WeightPair::new(0.5, 0.5),
            WeightPair::new(0.1, 0.1),
            16,
        )
        .unwrap();
        let m = MarkovMeasure::new(g);
        let e = dimension_estimate(&m, 20_000, 2_000).unwrap();
        assert_eq!(e.mode, EstimateMode::HorizonNumeric);
        assert!(e.lower < e.upper - 0.01, "{e:?}");
        // brute check against the c_n sequence itself
        let prof = entropy_profile(&m, 20_000).unwrap();
        let tail = &prof.normalized_values()[18_000..];
        assert_eq!(e.lower, tail.iter().copied().fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn smb_uniform_has_zero_deviation() {
        let r = smb_check(&constant(0.5, 0.5), 500, 8, 3, &[10, 100, 500]).unwrap();
        assert!(r.deviations.iter().flatten().all(|&d| d < 1e-12));
        assert!(smb_check(&constant(0.5, 0.5), 50, 8, 3, &[100]).is_err());
        assert!(smb_check(&constant(0.5, 0.5), 50, 0, 3, &[10]).is_err());
    }

    #[test]
    fn smb_is_deterministic() {
        let m = constant(0.3, 0.7);
        let a = smb_check(&m, 2000, 16, 9, &[100, 2000]).unwrap();
        let b = smb_check(&m, 2000, 16, 9, &[2000, 100]).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("checkpoint,mean_dev,max_dev,paths\n100,"));
    }

    #[test]
    fn sweep_with_zero_zeta_is_identical() {
        let w = WeightSequence::constant(0.3, 0.7).unwrap();
        let rows = continuity_sweep(&w, &[0.0, 0.02], PerturbMode::UniformShift, 0, 1000, 100).unwrap();
        assert_eq!(rows[0].zeta, 0.02);
        assert_eq!((rows[1].lower_diff, rows[1].upper_diff), (0.0, 0.0));
        assert!(continuity_sweep(&w, &[], PerturbMode::UniformShift, 0, 1000, 100).is_err());
    }

    #[test]
    fn median_handles_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
