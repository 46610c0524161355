//! Bracketing root finders and grid-based extremum detection.

use crate::error::{Error, Result};

/// Bisection for a sign change of `f` on `[lo, hi]`, to absolute width `tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates the switch point of a predicate that holds at `lo` and fails at
/// `hi`, to absolute width `tol`. The predicate is assumed to switch once.
pub fn bisect_predicate<F>(mut holds: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> bool,
{
    if !holds(lo) || holds(hi) {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grid indices at which the forward differences of `values` change sign.
///
/// Differences with `|Δ| <= noise * (1 + |v|)` carry no sign information and
/// are skipped; this keeps rounding noise in nearly flat tails from being
/// reported as extrema. Each returned index `k` marks an extremum between
/// `k - 1` and `k + 1` (with skipped points, somewhere in that span).
pub fn sign_change_indices(values: &[f64], noise: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut last: Option<f64> = None;
    for k in 1..values.len() {
        let d = values[k] - values[k - 1];
        if d.abs() <= noise * (1.0 + values[k].abs()) || d.is_nan() {
            continue;
        }
        let s = d.signum();
        if let Some(prev) = last {
            if prev != s {
                out.push(k - 1);
            }
        }
        last = Some(s);
    }
    out
}

/// Number of interior extrema of a sampled curve, see [`sign_change_indices`].
pub fn count_extrema(values: &[f64], noise: f64) -> usize {
    sign_change_indices(values, noise).len()
}

/// Golden-section search for the local maximum (or minimum, when
/// `maximize` is false) of `f` on `[lo, hi]`.
pub fn golden_extremum<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, maximize: bool) -> f64
where
    F: FnMut(f64) -> f64,
{
    let sign = if maximize { 1.0 } else { -1.0 };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = sign * f(x1);
    let mut f2 = sign * f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = sign * f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = sign * f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Refines every grid extremum of `f` sampled at `grid` and returns the
/// refined abscissae in increasing order.
pub fn refine_extrema<F>(mut f: F, grid: &[f64], noise: f64, tol: f64) -> Vec<f64>
where
    F: FnMut(f64) -> f64,
{
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    sign_change_indices(&values, noise)
        .into_iter()
        .map(|k| {
            let lo = grid[k.saturating_sub(1)];
            let hi = grid[(k + 1).min(grid.len() - 1)];
            let maximize = values[k] >= values[k.saturating_sub(1)];
            golden_extremum(&mut f, lo, hi, tol, maximize)
        })
        .collect()
}

/// `points` evenly spaced samples on `(0, end]` (the origin excluded).
pub fn open_grid(end: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|k| end * k as f64 / points as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn predicate_switch() {
        let r = bisect_predicate(|x| x < 0.3, 0.0, 1.0, 1e-10).unwrap();
        assert!((r - 0.3).abs() < 1e-9);
        assert!(bisect_predicate(|x| x < 0.3, 0.5, 1.0, 1e-10).is_err());
    }

    #[test]
    fn extrema_of_sampled_sine() {
        let grid = open_grid(10.0, 2000);
        let vals: Vec<f64> = grid.iter().map(|t| t.sin()).collect();
        assert_eq!(count_extrema(&vals, 1e-14), 3);
        let ext = refine_extrema(f64::sin, &grid, 1e-14, 1e-10);
        let want = [
            std::f64::consts::FRAC_PI_2,
            1.5 * std::f64::consts::PI,
            2.5 * std::f64::consts::PI,
        ];
        for (a, b) in ext.iter().zip(want) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn flat_tail_is_ignored() {
        let vals = [0.0, 0.5, 0.9, 1.0, 1.0 + 1e-17, 1.0, 1.0 + 1e-17];
        assert_eq!(count_extrema(&vals, 1e-13), 0);
    }
}
