//! A pair of doubling measures with close conditional ratios and distant
//! dimensions.
//!
//! Both measures are built block by block. Inside a block every symbol is
//! drawn i.i.d. from one of four Bernoulli specs:
//!
//! | regime | `μ` uses | `ν` uses |
//! |--------|----------|----------|
//! | 0 | `λ_0`: `p0 = 1/2` | `ρ_0`: `p0 = 1/2 - ε` |
//! | 1 | `λ_1`: `p0 = δ(1 - ε)` | `ρ_1`: `p0 = δ` |
//!
//! Block `k` covers positions `[n_k, n_{k+1})` with `n_0 = 0`. After a block
//! ends, its zero-count decides the class of the cylinder: class `1`
//! (`ν`-typical) or class `0` (`μ`-typical), and the class selects the regime
//! of the next block. Block 0 runs in regime 0.
//!
//! Masses of classes are binomial sums over zero-counts, so every stage
//! condition is certified exactly, with no enumeration of words.

mod binomial;

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

pub use binomial::{interval_probability, linear_count_interval, log_pmf};

use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::measure::CylinderAddress;
use crate::LN_2;

/// Largest block length the stage search will try.
pub const MAX_BLOCK_LEN: u64 = 1 << 42;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliSpec {
    p0: f64,
}

impl BernoulliSpec {
    pub fn new(p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::param(format!("Bernoulli weight {p0} is outside [0, 1]")));
        }
        Ok(Self { p0 })
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Per-symbol information `-h(p0)` in nats.
    pub fn entropy_rate(&self) -> f64 {
        -binary_entropy(self.p0)
    }

    /// `ln P(symbol)`.
    pub fn step_log(&self, symbol: u8) -> f64 {
        match symbol {
            0 => self.p0.ln(),
            _ => (1.0 - self.p0).ln(),
        }
    }

    /// Log-mass of a word of length `len` as `a + b z` in its zero-count `z`.
    fn linear_log_mass(&self, len: u64) -> (f64, f64) {
        let (l0, l1) = (self.p0.ln(), (1.0 - self.p0).ln());
        (len as f64 * l1, l0 - l1)
    }

    /// Log-mass of any word with `len` symbols of which `zeros` are `0`.
    pub fn log_word_mass(&self, len: u64, zeros: u64) -> f64 {
        let ones = len - zeros;
        let part = |count: u64, lp: f64| if count == 0 { 0.0 } else { count as f64 * lp };
        part(zeros, self.p0.ln()) + part(ones, (1.0 - self.p0).ln())
    }
}

/// Spec-measure of the length-`n` words `w` with
/// `| |log spec(w)| / n - |center| | <= half_width`.
///
/// The band is taken on the magnitude of the per-symbol log-mass, so the
/// center may be given either as a log-mass (`-log 2`) or as an information
/// rate (`log 2`).
pub fn smb_concentration(spec: BernoulliSpec, n: u64, band: (f64, f64)) -> Result<f64> {
    let (center, half_width) = band;
    if n == 0 {
        return Err(Error::param("block length must be >= 1"));
    }
    if !(half_width >= 0.0) {
        return Err(Error::param(format!("band half-width {half_width} must be >= 0")));
    }
    let c = center.abs();
    let nf = n as f64;
    if spec.p0 == 0.0 || spec.p0 == 1.0 {
        // a single word of mass 1
        return Ok(if c <= half_width { 1.0 } else { 0.0 });
    }
    let (a, b) = spec.linear_log_mass(n);
    // rounding slack far below the lattice spacing |b| of log-masses
    let slack = 1e-12 * nf * (c + half_width + 1.0);
    let lower = -nf * (c + half_width) - slack;
    let upper = -nf * (c - half_width) + slack;
    Ok(match linear_count_interval(n, a, b, lower, upper, false) {
        Some((lo, hi)) => interval_probability(n, spec.p0, lo, hi),
        None => 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Mu,
    Nu,
}

/// Classification of one block in one parent regime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageThreshold {
    pub stage: usize,
    pub regime: u8,
    pub block_len: u64,
    /// Zero-count at which both specs give the block the same mass.
    pub lr_cut: f64,
    /// Inclusive zero-count range classified `1`; `None` when empty.
    pub nu_counts: Option<(u64, u64)>,
}

impl StageThreshold {
    pub fn classify(&self, zeros: u64) -> u8 {
        match self.nu_counts {
            Some((lo, hi)) if (lo..=hi).contains(&zeros) => 1,
            _ => 0,
        }
    }
}

/// Certified quantities for one stage and one parent regime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageAchieved {
    pub stage: usize,
    pub regime: u8,
    /// `ε^{k+1}`.
    pub target: f64,
    /// `μ`-spec mass of the class-0 blocks.
    pub mu_mass: f64,
    /// `ν`-spec mass of the class-1 blocks.
    pub nu_mass: f64,
    /// Worst `|log μ(I)/n_{k+1} + log 2|` over class-0 cylinders, when checked.
    pub mu_band_dev: Option<f64>,
    /// Worst `|log ν(I)/n_{k+1} - h(ρ)|` over class-1 cylinders, when checked.
    pub nu_band_dev: Option<f64>,
}

impl StageAchieved {
    pub fn masses_ok(&self) -> bool {
        self.mu_mass > 1.0 - self.target && self.nu_mass > 1.0 - self.target
    }

    pub fn bands_ok(&self) -> bool {
        self.mu_band_dev.is_none_or(|d| d < self.target)
            && self.nu_band_dev.is_none_or(|d| d < self.target)
    }
}

/// Bounds of `log μ` and `log ν` over the cylinders of one class at the
/// current frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ClassRange {
    mu: (f64, f64),
    nu: (f64, f64),
}

impl ClassRange {
    fn merge(a: Option<Self>, b: Self) -> Self {
        match a {
            None => b,
            Some(a) => Self {
                mu: (a.mu.0.min(b.mu.0), a.mu.1.max(b.mu.1)),
                nu: (a.nu.0.min(b.nu.0), a.nu.1.max(b.nu.1)),
            },
        }
    }
}

/// Result of a successful stage search, ready to append to a plan.
#[derive(Debug, Clone)]
pub struct StageOutcome {
    pub stage: usize,
    pub block_len: u64,
    pub depth: u64,
    pub thresholds: Vec<StageThreshold>,
    pub achieved: Vec<StageAchieved>,
    frontier: [Option<ClassRange>; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct StagePlan {
    epsilon: f64,
    delta: f64,
    depths: Vec<u64>,
    thresholds: Vec<StageThreshold>,
    achieved: Vec<StageAchieved>,
    #[serde(skip)]
    frontier: [Option<ClassRange>; 2],
}

impl StagePlan {
    /// An empty plan; `ε ∈ [0, 1/2)` and `δ ∈ (0, 1)`.
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::param(format!("epsilon {epsilon} must lie in [0, 1/2)")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!("delta {delta} must lie in (0, 1)")));
        }
        let root = ClassRange {
            mu: (0.0, 0.0),
            nu: (0.0, 0.0),
        };
        Ok(Self {
            epsilon,
            delta,
            depths: Vec::new(),
            thresholds: Vec::new(),
            achieved: Vec::new(),
            frontier: [Some(root), None],
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `n_1 < n_2 < …`.
    pub fn depths(&self) -> &[u64] {
        &self.depths
    }

    pub fn thresholds(&self) -> &[StageThreshold] {
        &self.thresholds
    }

    pub fn achieved(&self) -> &[StageAchieved] {
        &self.achieved
    }

    pub fn stages(&self) -> usize {
        self.depths.len()
    }

    pub fn deepest(&self) -> u64 {
        self.depths.last().copied().unwrap_or(0)
    }

    pub fn spec(&self, role: Role, regime: u8) -> BernoulliSpec {
        let p0 = match (role, regime) {
            (Role::Mu, 0) => 0.5,
            (Role::Nu, 0) => 0.5 - self.epsilon,
            (Role::Mu, _) => self.delta * (1.0 - self.epsilon),
            (Role::Nu, _) => self.delta,
        };
        BernoulliSpec { p0 }
    }

    pub fn threshold(&self, stage: usize, regime: u8) -> Option<&StageThreshold> {
        self.thresholds
            .iter()
            .find(|t| t.stage == stage && t.regime == regime)
    }

    /// Whether any cylinder at the deepest boundary is in class `regime`.
    pub fn regime_present(&self, regime: u8) -> bool {
        self.frontier[regime as usize].is_some()
    }

    pub fn push(&mut self, outcome: StageOutcome) -> Result<()> {
        if outcome.stage != self.stages() || outcome.depth <= self.deepest() {
            return Err(Error::param(format!(
                "stage {} does not extend a plan with {} stages",
                outcome.stage,
                self.stages()
            )));
        }
        self.depths.push(outcome.depth);
        self.thresholds.extend(outcome.thresholds);
        self.achieved.extend(outcome.achieved);
        self.frontier = outcome.frontier;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// Checks one block length for every regime present at the frontier.
    fn evaluate(&self, stage: usize, target: f64, len: u64) -> Option<StageOutcome> {
        let parent_depth = self.deepest();
        let depth = parent_depth + len;
        let nf = depth as f64;
        let mut thresholds = Vec::new();
        let mut achieved = Vec::new();
        let mut frontier: [Option<ClassRange>; 2] = [None, None];

        for regime in 0..2u8 {
            let Some(parent) = self.frontier[regime as usize] else {
                continue;
            };
            let mu = self.spec(Role::Mu, regime);
            let nu = self.spec(Role::Nu, regime);
            let (a_mu, b_mu) = mu.linear_log_mass(len);
            let (a_nu, b_nu) = nu.linear_log_mass(len);

            // log(ν/μ) of a block, linear in the zero-count
            let (a_lr, b_lr) = (a_nu - a_mu, b_nu - b_mu);
            let lr_side = linear_count_interval(len, a_lr, b_lr, 0.0, f64::INFINITY, true);

            let nu_band = (stage == 0 && regime == 0) || (stage >= 1 && regime == 1);
            let nu_counts = if nu_band {
                let h = nu.entropy_rate();
                let lower = -nf * (h + target) - parent.nu.0;
                let upper = -nf * (h - target) - parent.nu.1;
                let band = linear_count_interval(len, a_nu, b_nu, lower, upper, true);
                intersect(lr_side, band)
            } else {
                lr_side
            };

            let nu_pieces: Vec<(u64, u64)> = nu_counts.into_iter().collect();
            let mu_pieces = complement(len, nu_counts);

            let mu_mass = 1.0 - nu_counts.map_or(0.0, |(lo, hi)| interval_probability(len, mu.p0, lo, hi));
            let nu_mass = nu_counts.map_or(0.0, |(lo, hi)| interval_probability(len, nu.p0, lo, hi));

            let mu_band_dev = (regime == 0).then(|| {
                band_deviation(&mu_pieces, parent.mu, (a_mu, b_mu), nf, mu.entropy_rate())
            });
            let nu_band_dev = nu_band.then(|| {
                band_deviation(&nu_pieces, parent.nu, (a_nu, b_nu), nf, nu.entropy_rate())
            });

            let row = StageAchieved {
                stage,
                regime,
                target,
                mu_mass,
                nu_mass,
                mu_band_dev,
                nu_band_dev,
            };
            if !(row.masses_ok() && row.bands_ok()) {
                return None;
            }
            achieved.push(row);
            thresholds.push(StageThreshold {
                stage,
                regime,
                block_len: len,
                lr_cut: -a_lr / b_lr,
                nu_counts,
            });

            for (digit, pieces) in [(0usize, &mu_pieces), (1, &nu_pieces)] {
                if let Some(r) = child_range(pieces, parent, (a_mu, b_mu), (a_nu, b_nu)) {
                    frontier[digit] = Some(ClassRange::merge(frontier[digit], r));
                }
            }
        }
        Some(StageOutcome {
            stage,
            block_len: len,
            depth,
            thresholds,
            achieved,
            frontier,
        })
    }
}

fn intersect(a: Option<(u64, u64)>, b: Option<(u64, u64)>) -> Option<(u64, u64)> {
    let ((a0, a1), (b0, b1)) = (a?, b?);
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    (lo <= hi).then_some((lo, hi))
}

fn complement(len: u64, set: Option<(u64, u64)>) -> Vec<(u64, u64)> {
    match set {
        None => vec![(0, len)],
        Some((lo, hi)) => {
            let mut out = Vec::new();
            if lo > 0 {
                out.push((0, lo - 1));
            }
            if hi < len {
                out.push((hi + 1, len));
            }
            out
        }
    }
}

fn linear_extremes(pieces: &[(u64, u64)], (a, b): (f64, f64)) -> Option<(f64, f64)> {
    pieces
        .iter()
        .flat_map(|&(lo, hi)| [lo, hi])
        .map(|z| a + b * z as f64)
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((f64::min(lo, v), f64::max(hi, v))),
        })
}

/// Worst `|(log parent + log block) / depth + rate|` over the pieces.
fn band_deviation(
    pieces: &[(u64, u64)],
    parent: (f64, f64),
    block: (f64, f64),
    depth: f64,
    rate: f64,
) -> f64 {
    match linear_extremes(pieces, block) {
        None => 0.0,
        Some((lo, hi)) => {
            let low = (parent.0 + lo) / depth + rate;
            let high = (parent.1 + hi) / depth + rate;
            low.abs().max(high.abs())
        }
    }
}

fn child_range(
    pieces: &[(u64, u64)],
    parent: ClassRange,
    mu: (f64, f64),
    nu: (f64, f64),
) -> Option<ClassRange> {
    let (mu_lo, mu_hi) = linear_extremes(pieces, mu)?;
    let (nu_lo, nu_hi) = linear_extremes(pieces, nu)?;
    Some(ClassRange {
        mu: (parent.mu.0 + mu_lo, parent.mu.1 + mu_hi),
        nu: (parent.nu.0 + nu_lo, parent.nu.1 + nu_hi),
    })
}

/// Smallest block length (doubling, then bisection) for which the
/// classification of stage `stage` meets every band and mass condition with
/// tolerance `target`.
pub fn find_stage_depth(plan: &StagePlan, stage: usize, target: f64) -> Result<StageOutcome> {
    if stage != plan.stages() {
        return Err(Error::param(format!(
            "plan has {} stages; cannot search stage {stage}",
            plan.stages()
        )));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::param(format!("target {target} must lie in (0, 1)")));
    }
    for regime in 0..2u8 {
        if plan.regime_present(regime) {
            let mu = plan.spec(Role::Mu, regime);
            if mu == plan.spec(Role::Nu, regime) {
                return Err(Error::Inseparable {
                    stage,
                    regime,
                    p0: mu.p0,
                });
            }
        }
    }
    let mut hi = 1u64;
    let mut found = loop {
        if let Some(out) = plan.evaluate(stage, target, hi) {
            break out;
        }
        if hi >= MAX_BLOCK_LEN {
            return Err(Error::SearchExhausted {
                stage,
                limit: MAX_BLOCK_LEN,
            });
        }
        hi *= 2;
    };
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match plan.evaluate(stage, target, mid) {
            Some(out) => {
                hi = mid;
                found = out;
            }
            None => lo = mid,
        }
    }
    Ok(found)
}

/// Mass of a cylinder under one of the two block-wise measures.
#[derive(Debug, Clone)]
pub struct PiecewiseMeasure {
    plan: Arc<StagePlan>,
    role: Role,
}

impl PiecewiseMeasure {
    pub fn new(plan: Arc<StagePlan>, role: Role) -> Self {
        Self { plan, role }
    }

    pub fn plan(&self) -> &StagePlan {
        &self.plan
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn spec(&self, regime: u8) -> BernoulliSpec {
        self.plan.spec(self.role, regime)
    }

    /// Class digits of the completed blocks of `addr`.
    pub fn class_digits(&self, addr: &CylinderAddress) -> Vec<u8> {
        let mut digits = Vec::new();
        self.walk(addr, |_, _, _| {}, |d| digits.push(d));
        digits
    }

    /// Regime of the block holding symbol `addr.generation()`.
    pub fn regime_after(&self, addr: &CylinderAddress) -> u8 {
        self.class_digits(addr).last().copied().unwrap_or(0)
    }

    pub fn cylinder_log_mass(&self, addr: &CylinderAddress) -> f64 {
        let mut total = 0.0;
        self.walk(
            addr,
            |spec, len, zeros| total += spec.log_word_mass(len, zeros),
            |_| {},
        );
        total
    }

    pub fn cylinder_mass(&self, addr: &CylinderAddress) -> f64 {
        self.cylinder_log_mass(addr).exp()
    }

    /// Splits `addr` into blocks, reporting each (full or partial) block's
    /// spec and zero-count, and the class digit of each completed block.
    fn walk(
        &self,
        addr: &CylinderAddress,
        mut block: impl FnMut(BernoulliSpec, u64, u64),
        mut digit: impl FnMut(u8),
    ) {
        let bits = addr.bits();
        let len = bits.len() as u64;
        let mut regime = 0u8;
        let mut start = 0u64;
        for (stage, &end) in self.plan.depths.iter().enumerate() {
            let stop = end.min(len);
            let zeros = bits[start as usize..stop as usize]
                .iter()
                .filter(|&&b| b == 0)
                .count() as u64;
            block(self.spec(regime), stop - start, zeros);
            if len < end {
                return;
            }
            regime = self
                .plan
                .threshold(stage, regime)
                .map_or(0, |t| t.classify(zeros));
            digit(regime);
            start = end;
        }
        let zeros = bits[start as usize..].iter().filter(|&&b| b == 0).count() as u64;
        block(self.spec(regime), len - start, zeros);
    }

    /// Masses of every class history at the deepest stage boundary, from
    /// the binomial class masses. Sums to one.
    pub fn class_masses(&self) -> Vec<(Vec<u8>, f64)> {
        let mut layer = vec![(Vec::new(), 1.0, 0u8)];
        for stage in 0..self.plan.stages() {
            let mut next = Vec::with_capacity(layer.len() * 2);
            for (history, mass, regime) in layer {
                let t = self
                    .plan
                    .threshold(stage, regime)
                    .expect("every reachable regime has a threshold");
                let to_one = t.nu_counts.map_or(0.0, |(lo, hi)| {
                    interval_probability(t.block_len, self.spec(regime).p0, lo, hi)
                });
                for (d, m) in [(0u8, 1.0 - to_one), (1, to_one)] {
                    let mut h = history.clone();
                    h.push(d);
                    next.push((h, mass * m, d));
                }
            }
            layer = next;
        }
        layer.into_iter().map(|(h, m, _)| (h, m)).collect()
    }
}

/// `(μ, ν, plan)` with `stages` certified stages; `ε ∈ (0, 1/4)`, `δ ∈ (0, 1)`.
pub fn build_pair(
    epsilon: f64,
    delta: f64,
    stages: usize,
) -> Result<(PiecewiseMeasure, PiecewiseMeasure, Arc<StagePlan>)> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::param(format!("epsilon {epsilon} must lie in (0, 1/4)")));
    }
    if stages == 0 {
        return Err(Error::param("at least one stage is required"));
    }
    let mut plan = StagePlan::new(epsilon, delta)?;
    for k in 0..stages {
        let outcome = find_stage_depth(&plan, k, epsilon.powi(k as i32 + 1))?;
        plan.push(outcome)?;
    }
    let plan = Arc::new(plan);
    Ok((
        PiecewiseMeasure::new(plan.clone(), Role::Mu),
        PiecewiseMeasure::new(plan.clone(), Role::Nu),
        plan,
    ))
}

/// One of the four step types: symbol `symbol` drawn in regime `regime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioClass {
    pub regime: u8,
    pub symbol: u8,
    pub step_mu: f64,
    pub step_nu: f64,
    /// `|log step_mu - log step_nu|`.
    pub log_gap: f64,
    pub reached: bool,
}

impl RatioClass {
    pub fn label(&self) -> String {
        format!("{}:{}", self.regime, self.symbol)
    }
}

/// The four step types for parameters `(ε, δ)`, all marked reached.
pub fn ratio_classes(epsilon: f64, delta: f64) -> [RatioClass; 4] {
    let mu = [0.5, delta * (1.0 - epsilon)];
    let nu = [0.5 - epsilon, delta];
    let class = |regime: usize, symbol: u8| {
        let (pm, pn) = (mu[regime], nu[regime]);
        let (sm, sn) = if symbol == 0 { (pm, pn) } else { (1.0 - pm, 1.0 - pn) };
        RatioClass {
            regime: regime as u8,
            symbol,
            step_mu: sm,
            step_nu: sn,
            log_gap: (sm.ln() - sn.ln()).abs(),
            reached: true,
        }
    };
    [class(0, 0), class(0, 1), class(1, 0), class(1, 1)]
}

/// Construction `ε` whose regime-0 log gap `-log(1 - 2ε)` equals `target`.
pub fn epsilon_for_log_gap(target: f64) -> Result<f64> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::param(format!("target gap {target} must be positive")));
    }
    Ok((1.0 - (-target).exp()) / 2.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub depth: u64,
    pub sup_log_gap: f64,
    pub classes: [RatioClass; 4],
}

impl RatioReport {
    /// CSV with columns `regime,step_mu,step_nu,log_gap`; `regime` is
    /// `<regime>:<symbol>`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "regime,step_mu,step_nu,log_gap")?;
        for c in &self.classes {
            writeln!(out, "{},{},{},{}", c.label(), c.step_mu, c.step_nu, c.log_gap)?;
        }
        Ok(())
    }
}

/// Supremum over all steps up to generation `depth` of
/// `|log μ(I)/μ(Î) - log ν(I)/ν(Î)|`, read off the four step types.
pub fn verify_ratio_condition(
    mu: &PiecewiseMeasure,
    nu: &PiecewiseMeasure,
    depth: u64,
) -> Result<RatioReport> {
    let plan = mu.plan();
    if mu.role != Role::Mu || nu.role != Role::Nu {
        return Err(Error::param("expected the (mu, nu) pair in that order"));
    }
    if !Arc::ptr_eq(&mu.plan, &nu.plan) && plan.depths != nu.plan().depths {
        return Err(Error::param("mu and nu come from different plans"));
    }
    if depth > plan.deepest() {
        return Err(Error::param(format!(
            "depth {depth} exceeds the deepest stage boundary {}",
            plan.deepest()
        )));
    }
    // regime 1 governs block k >= 1 when stage k-1 sends some mass to class 1
    let regime1 = plan.depths.iter().enumerate().any(|(k, &start)| {
        depth > start
            && plan
                .thresholds
                .iter()
                .any(|t| t.stage == k && t.nu_counts.is_some())
    });
    let mut classes = ratio_classes(plan.epsilon, plan.delta);
    for c in &mut classes {
        c.reached = depth >= 1 && (c.regime == 0 || regime1);
    }
    let sup_log_gap = classes
        .iter()
        .filter(|c| c.reached)
        .map(|c| c.log_gap)
        .fold(0.0, f64::max);
    Ok(RatioReport {
        depth,
        sup_log_gap,
        classes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionGapReport {
    pub dim_mu: f64,
    /// `-h(δ)/log 2`, the lower-entropy rate along the `ρ_1` blocks.
    pub dim_nu_bound: f64,
    /// Band tolerance of the last built stage, in dimension units.
    pub dim_nu_slack: f64,
    pub gap: f64,
    pub stages: usize,
    /// The values are limits of the infinite construction.
    pub asymptotic: bool,
    /// `Σ_k (1 - μ-mass kept in regime 0 at stage k)` over the built stages.
    pub mu_mass_leaving_regime0: f64,
    /// `Σ_k ε^{k+1}`, bounding the above for every number of stages.
    pub mu_mass_leaving_bound: f64,
    pub method: String,
}

/// Limit dimensions of the pair read off the stage structure.
pub fn dimension_gap_report(
    _mu: &PiecewiseMeasure,
    _nu: &PiecewiseMeasure,
    plan: &StagePlan,
) -> DimensionGapReport {
    let eps = plan.epsilon;
    let dim_nu_bound = -binary_entropy(plan.delta) / LN_2;
    let last_target = eps.powi(plan.stages().max(1) as i32);
    let leaving = plan
        .achieved
        .iter()
        .filter(|a| a.regime == 0)
        .map(|a| 1.0 - a.mu_mass)
        .sum();
    DimensionGapReport {
        dim_mu: 1.0,
        dim_nu_bound,
        dim_nu_slack: last_target / LN_2,
        gap: 1.0 - dim_nu_bound,
        stages: plan.stages(),
        asymptotic: true,
        mu_mass_leaving_regime0: leaving,
        mu_mass_leaving_bound: eps / (1.0 - eps),
        method: "stage analysis: mu keeps all but a summable mass in the uniform regime; \
                 nu's lower entropy rate along its class-1 blocks is h(rho_1)"
            .to_string(),
    }
}
