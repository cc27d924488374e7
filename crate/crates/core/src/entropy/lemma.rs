//! Grid scan of the pointwise estimate `|h(p) - h(q)| <= (1 - |p - q|) log 2`.
//!
//! The estimate does not hold on all of `[0, 1]²`: it fails when one argument
//! is close to `0` or `1` and the other is near `1/2`. The scan reports where.

use serde::Serialize;

use super::binary_entropy;
use crate::error::{Error, Result};
use crate::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Point {
    pub p: f64,
    pub q: f64,
    /// `|h(p) - h(q)|`.
    pub lhs: f64,
    /// `(1 - |p - q|) log 2`.
    pub rhs: f64,
}

impl Lemma2Point {
    pub fn evaluate(p: f64, q: f64) -> Self {
        Self {
            p,
            q,
            lhs: (binary_entropy(p) - binary_entropy(q)).abs(),
            rhs: (1.0 - (p - q).abs()) * LN_2,
        }
    }

    pub fn excess(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn violated(&self) -> bool {
        self.lhs > self.rhs
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma2Scan {
    pub grid_step: f64,
    pub low: f64,
    pub high: f64,
    pub points_checked: usize,
    pub violations: Vec<Lemma2Point>,
    /// The violation with the largest `lhs - rhs`, if any.
    pub worst: Option<Lemma2Point>,
}

impl Lemma2Scan {
    pub fn max_excess(&self) -> f64 {
        self.worst.map_or(0.0, |w| w.excess())
    }

    /// The violation at grid point `(p, q)`, matched to within half a step.
    pub fn violation_at(&self, p: f64, q: f64) -> Option<&Lemma2Point> {
        let tol = self.grid_step / 2.0;
        self.violations
            .iter()
            .find(|v| (v.p - p).abs() < tol && (v.q - q).abs() < tol)
    }
}

/// Scans the full grid `{0, step, 2 step, …} ∩ [0, 1]` squared.
pub fn lemma2_scan(grid_step: f64) -> Result<Lemma2Scan> {
    lemma2_scan_on(grid_step, 0.0, 1.0)
}

/// Scans the grid points of `[0, 1]` that fall in `[low, high]`, squared.
pub fn lemma2_scan_on(grid_step: f64, low: f64, high: f64) -> Result<Lemma2Scan> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::param(format!(
            "grid step {grid_step} must lie in (0, 0.1]"
        )));
    }
    if !(0.0..=1.0).contains(&low) || !(0.0..=1.0).contains(&high) || low > high {
        return Err(Error::param(format!("scan range [{low}, {high}] is invalid")));
    }
    let eps = 1e-9 * grid_step;
    let count = ((1.0 + eps) / grid_step).floor() as usize;
    let grid: Vec<f64> = (0..=count)
        .map(|i| (i as f64 * grid_step).min(1.0))
        .filter(|&x| x >= low - eps && x <= high + eps)
        .collect();

    let mut violations = Vec::new();
    let mut worst: Option<Lemma2Point> = None;
    for &p in &grid {
        for &q in &grid {
            let pt = Lemma2Point::evaluate(p, q);
            if pt.violated() {
                if worst.is_none_or(|w| pt.excess() > w.excess()) {
                    worst = Some(pt);
                }
                violations.push(pt);
            }
        }
    }
    Ok(Lemma2Scan {
        grid_step,
        low,
        high,
        points_checked: grid.len() * grid.len(),
        violations,
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_examples() {
        let pt = Lemma2Point::evaluate(0.4, 0.4);
        assert_eq!(pt.lhs, 0.0);
        assert!(!pt.violated());

        let pt = Lemma2Point::evaluate(0.01, 0.5);
        assert!((binary_entropy(0.01) + 0.0560015).abs() < 1e-7);
        assert!((pt.lhs - 0.637146).abs() < 1e-6);
        assert!((pt.rhs - 0.353505).abs() < 1e-6);
        assert!(pt.violated());

        let pt = Lemma2Point::evaluate(0.0, 1.0);
        assert_eq!((pt.lhs, pt.rhs), (0.0, 0.0));
        assert!(!pt.violated());
    }

    #[test]
    fn scan_finds_boundary_violations_only() {
        let scan = lemma2_scan(0.05).unwrap();
        assert_eq!(scan.points_checked, 21 * 21);
        assert!(!scan.violations.is_empty());
        assert!(scan.max_excess() > 0.0);
        let inner = lemma2_scan_on(0.05, 0.2, 0.8).unwrap();
        assert!(inner.violations.is_empty());
        assert_eq!(inner.max_excess(), 0.0);
    }

    #[test]
    fn scan_rejects_bad_steps() {
        assert!(lemma2_scan(0.0).is_err());
        assert!(lemma2_scan(0.2).is_err());
        assert!(lemma2_scan_on(0.01, 0.9, 0.1).is_err());
    }
}
