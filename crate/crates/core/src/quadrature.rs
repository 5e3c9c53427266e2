//! Uniform grids and the composite trapezoid rule.
//!
//! Sums run in ascending index order so results do not depend on how the
//! integrand values were produced.

/// `count` equally spaced points on the closed interval `[a, b]`.
pub fn closed_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "closed grid needs two points");
    let h = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|k| if k == count - 1 { b } else { a + k as f64 * h })
        .collect()
}

/// `count` equally spaced points on the half-open interval `[a, b)`.
pub fn half_open_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    let h = (b - a) / count as f64;
    (0..count).map(|k| a + k as f64 * h).collect()
}

/// Trapezoid weights for `count` points with spacing `h`.
pub fn trapezoid_weights(count: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; count];
    if let Some(first) = w.first_mut() {
        *first = 0.5 * h;
    }
    if let Some(last) = w.last_mut() {
        *last = 0.5 * h;
    }
    w
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Integral over `[low, high]` of the piecewise-linear interpolant through
/// `(grid, values)`. Parts of the interval outside the grid contribute zero.
/// Over the full grid this equals [`trapezoid`].
pub fn interpolant_integral(grid: &[f64], values: &[f64], low: f64, high: f64) -> f64 {
    debug_assert_eq!(grid.len(), values.len());
    if grid.len() < 2 || high <= low {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 0..grid.len() - 1 {
        let (a, b) = (grid[k], grid[k + 1]);
        let lo = low.max(a);
        let hi = high.min(b);
        if hi <= lo {
            continue;
        }
        let slope = (values[k + 1] - values[k]) / (b - a);
        let at = |t: f64| values[k] + slope * (t - a);
        total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    total
}
