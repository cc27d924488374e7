//! Window entropies `a_n^k`, `b_n^k` and their per-step gap `Δ_n^k`.
//!
//! For a cylinder `I` of generation `n`, `a_n^k` is the mass-weighted sum of
//! `log(μ(I0K)/μ(I0))` over all extensions `K` of length `k - 1`, and `b_n^k`
//! the same below `I1`. Both depend only on `n` and `k`, and satisfy the
//! backward two-state recursion
//!
//! ```text
//! E(s, m, 0) = 0
//! E(0, m, j) = h(p_m) + p_m E(0, m+1, j-1) + (1 - p_m) E(1, m+1, j-1)
//! E(1, m, j) = h(q_m) + q_m E(0, m+1, j-1) + (1 - q_m) E(1, m+1, j-1)
//! ```
//!
//! with `a_n^k = E(0, n+1, k-1)` and `b_n^k = E(1, n+1, k-1)`.

use std::io::Write;

use serde::Serialize;

use super::binary_entropy;
use crate::error::{Error, Result};
use crate::measure::MarkovMeasure;
use crate::LN_2;

/// Rounding slack when comparing exact window gaps against bounds.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowGap {
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    /// `|a - b| / k`.
    pub delta: f64,
}

impl WindowGap {
    fn new(n: usize, k: usize, a: f64, b: f64) -> Self {
        Self {
            n,
            k,
            a,
            b,
            delta: (a - b).abs() / k as f64,
        }
    }
}

fn step(m: &MarkovMeasure, index: usize, (a, b): (f64, f64)) -> (f64, f64) {
    let w = m.weights().value_at(index);
    (
        binary_entropy(w.p) + w.p * a + (1.0 - w.p) * b,
        binary_entropy(w.q) + w.q * a + (1.0 - w.q) * b,
    )
}

/// `a_n^k`, `b_n^k` and `Δ_n^k` in `O(k)`. Generation `n = 0` (the root) is
/// accepted as well.
pub fn window_entropy(m: &MarkovMeasure, n: usize, k: usize) -> Result<WindowGap> {
    if k == 0 {
        return Err(Error::param("window length k must be >= 1"));
    }
    let mut ab = (0.0, 0.0);
    for index in (n + 1..n + k).rev() {
        ab = step(m, index, ab);
    }
    Ok(WindowGap::new(n, k, ab.0, ab.1))
}

/// `η(k) = e² log 2 / (k + 1)`.
pub fn eta_bound(k: usize) -> f64 {
    std::f64::consts::E.powi(2) * LN_2 / (k as f64 + 1.0)
}

/// All window gaps for `0 <= n <= n_max`, `1 <= k <= k_max`, built with one
/// backward sweep per window end point: `O((n_max + k_max) k_max)`.
#[derive(Debug, Clone)]
pub struct WindowTable {
    n_max: usize,
    k_max: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl WindowTable {
    pub fn new(m: &MarkovMeasure, n_max: usize, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::param("window table needs k_max >= 1"));
        }
        let size = (n_max + 1) * k_max;
        let mut a = vec![0.0; size];
        let mut b = vec![0.0; size];
        // windows (n, k) with n + k = end share one sweep
        for end in 1..=n_max + k_max {
            let mut ab = (0.0, 0.0);
            let mut k = 1;
            loop {
                let n = end - k;
                if n <= n_max {
                    let slot = n * k_max + (k - 1);
                    a[slot] = ab.0;
                    b[slot] = ab.1;
                }
                if k == k_max || n == 0 {
                    break;
                }
                ab = step(m, n, ab);
                k += 1;
            }
        }
        Ok(Self { n_max, k_max, a, b })
    }

    pub fn get(&self, n: usize, k: usize) -> WindowGap {
        assert!(n <= self.n_max && (1..=self.k_max).contains(&k));
        let slot = n * self.k_max + (k - 1);
        WindowGap::new(n, k, self.a[slot], self.b[slot])
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }
}

/// One comparison of `Δ_{n-1}^{k+1}` against its recursive bound and `η(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecursionRow {
    pub n: usize,
    pub k: usize,
    /// `Δ_{n-1}^{k+1}`.
    pub lhs: f64,
    /// `(1 - |p_n - q_n|) log 2 / (k + 1) + |p_n - q_n| (1 - 1/(k+1)) Δ_n^k`.
    pub recursive_bound: f64,
    pub eta: f64,
    pub recursive_ok: bool,
    pub eta_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecursionReport {
    pub n_max: usize,
    pub k_max: usize,
    pub rows: Vec<RecursionRow>,
    pub recursive_violations: usize,
    pub eta_violations: usize,
    /// Largest `Δ_{n-1}^{k+1} / η(k)` seen.
    pub max_eta_ratio: f64,
}

impl RecursionReport {
    pub fn violations(&self) -> impl Iterator<Item = &RecursionRow> {
        self.rows.iter().filter(|r| !r.recursive_ok || !r.eta_ok)
    }
}

/// Evaluates, for every `1 <= n <= n_max` and `1 <= k <= k_max`, the
/// one-step recursive bound on `Δ_{n-1}^{k+1}` and the closed bound `η(k)`.
/// Violations are recorded, not raised: the recursive bound inherits the
/// pointwise entropy estimate, which fails near the boundary of `[0, 1]²`.
pub fn delta_recursion_check(
    m: &MarkovMeasure,
    n_max: usize,
    k_max: usize,
) -> Result<RecursionReport> {
    if n_max == 0 || k_max == 0 {
        return Err(Error::param("recursion check needs n_max >= 1 and k_max >= 1"));
    }
    let table = WindowTable::new(m, n_max, k_max + 1)?;
    let mut rows = Vec::with_capacity(n_max * k_max);
    let (mut recursive_violations, mut eta_violations) = (0, 0);
    let mut max_eta_ratio = 0.0f64;
    for n in 1..=n_max {
        let w = m.weights().value_at(n);
        let gap = (w.p - w.q).abs();
        for k in 1..=k_max {
            let kp1 = k as f64 + 1.0;
            let lhs = table.get(n - 1, k + 1).delta;
            let inner = table.get(n, k).delta;
            let recursive_bound = (1.0 - gap) * LN_2 / kp1 + gap * (1.0 - 1.0 / kp1) * inner;
            let eta = eta_bound(k);
            let recursive_ok = lhs <= recursive_bound + BOUND_SLACK;
            let eta_ok = lhs <= eta + BOUND_SLACK;
            recursive_violations += usize::from(!recursive_ok);
            eta_violations += usize::from(!eta_ok);
            max_eta_ratio = max_eta_ratio.max(lhs / eta);
            rows.push(RecursionRow {
                n,
                k,
                lhs,
                recursive_bound,
                eta,
                recursive_ok,
                eta_ok,
            });
        }
    }
    Ok(RecursionReport {
        n_max,
        k_max,
        rows,
        recursive_violations,
        eta_violations,
        max_eta_ratio,
    })
}

/// CSV with columns `n,k,a,b,delta,eta_bound,bound_ok` for every
/// `1 <= n <= n_max`, `1 <= k <= k_max` of `table`; `bound_ok` compares
/// `Δ_n^k` with `η(k - 1)`.
pub fn write_window_csv<W: Write>(table: &WindowTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,k,a,b,delta,eta_bound,bound_ok")?;
    for n in 1..=table.n_max() {
        for k in 1..=table.k_max() {
            let g = table.get(n, k);
            let eta = eta_bound(k - 1);
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                n,
                k,
                g.a,
                g.b,
                g.delta,
                eta,
                g.delta <= eta + BOUND_SLACK
            )?;
        }
    }
    Ok(())
}
