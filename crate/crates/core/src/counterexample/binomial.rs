//! Exact binomial masses for block zero-counts.
//!
//! Block lengths in the stage construction reach ~10⁹, where `ln Γ`
//! differences lose several digits. The log-pmf here uses Loader's
//! saddle-point form (Stirling remainders plus a stable deviance term),
//! which stays accurate to a few ulps at any `n`.

use statrs::function::gamma::ln_gamma;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln n! - (n + 1/2) ln n + n - ln √(2π)`.
fn stirling_remainder(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        return ln_gamma(n + 1.0) - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if n > 15_000.0 {
        (S0 - S1 / nn) / n
    } else if n > 500.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// `x ln(x / m) + m - x`, computed without cancellation when `x ≈ m`.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1.0;
        loop {
            ej *= v2;
            let next = s + ej / (2.0 * j + 1.0);
            if next == s {
                return s;
            }
            s = next;
            j += 1.0;
        }
    }
    x * (x / m).ln() + m - x
}

/// `ln P(Z = k)` for `Z ~ Binomial(n, p)`.
pub fn log_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let q = 1.0 - p;
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let (nf, kf) = (n as f64, k as f64);
    if k == 0 {
        return nf * (-p).ln_1p();
    }
    if k == n {
        return nf * p.ln();
    }
    let rest = nf - kf;
    let lc = stirling_remainder(nf)
        - stirling_remainder(kf)
        - stirling_remainder(rest)
        - deviance(kf, nf * p)
        - deviance(rest, nf * q);
    let lf = 2.0 * LN_SQRT_2PI + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

/// `P(lo <= Z <= hi)` for `Z ~ Binomial(n, p)`.
///
/// Summation starts at the point of `[lo, hi]` nearest the mode and walks
/// outwards with the pmf ratio; because the pmf is log-concave, the walk
/// stops once the geometric bound on the remaining terms drops below
/// `1e-18` of the running sum.
pub fn interval_probability(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    let hi = hi.min(n);
    if lo > hi {
        return 0.0;
    }
    if lo == 0 && hi == n {
        return 1.0;
    }
    if p <= 0.0 {
        return if lo == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if hi == n { 1.0 } else { 0.0 };
    }
    let mode = (((n + 1) as f64 * p).floor() as u64).min(n);
    let start = mode.clamp(lo, hi);
    let odds = p / (1.0 - p);
    let nf = n as f64;
    const TAIL: f64 = 1e-18;

    let mut total = 1.0;
    // rightwards: term(z+1)/term(z) = (n - z)/(z + 1) * odds
    let mut term = 1.0;
    let mut z = start;
    while z < hi {
        let ratio = (nf - z as f64) / (z as f64 + 1.0) * odds;
        term *= ratio;
        total += term;
        z += 1;
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < TAIL * total {
            break;
        }
    }
    // leftwards: term(z-1)/term(z) = z/(n - z + 1) / odds
    let mut term = 1.0;
    let mut z = start;
    while z > lo {
        let ratio = z as f64 / (nf - z as f64 + 1.0) / odds;
        term *= ratio;
        total += term;
        z -= 1;
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < TAIL * total {
            break;
        }
    }
    (log_pmf(n, p, start).exp() * total).clamp(0.0, 1.0)
}

/// Integer points `z ∈ [0, n]` with `lower ⋖ a + b z ⋖ upper`, where `⋖` is
/// `<` when `strict` and `<=` otherwise. The feasible set of a linear
/// function is an interval; `None` when it is empty.
pub fn linear_count_interval(
    n: u64,
    a: f64,
    b: f64,
    lower: f64,
    upper: f64,
    strict: bool,
) -> Option<(u64, u64)> {
    let ok = |z: u64| {
        let v = a + b * z as f64;
        if strict {
            lower < v && v < upper
        } else {
            lower <= v && v <= upper
        }
    };
    if b == 0.0 {
        return ok(0).then_some((0, n));
    }
    // real-valued crossing points, then integer refinement
    let (r1, r2) = ((lower - a) / b, (upper - a) / b);
    let (rl, rh) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let nf = n as f64;
    if rh < -1.0 || rl > nf + 1.0 || rl.is_nan() || rh.is_nan() {
        return None;
    }
    let clamp = |x: f64| x.clamp(0.0, nf) as u64;
    let mut lo = clamp(rl.floor() - 1.0);
    let mut hi = clamp(rh.ceil() + 1.0);
    while lo <= hi && !ok(lo) {
        lo += 1;
        if lo > n {
            return None;
        }
    }
    while hi >= lo && !ok(hi) {
        if hi == 0 {
            return None;
        }
        hi -= 1;
    }
    (lo <= hi && ok(lo)).then_some((lo, hi))
}
