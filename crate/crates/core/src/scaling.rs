//! Least-squares slope on log-log axes, for error-scaling sweeps.

/// Slope of the least-squares line through `(ln x, ln y)`.
///
/// Points with a non-positive coordinate are skipped. Returns NaN with fewer
/// than two usable points.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return f64::NAN;
    }
    let count = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (lx, ly) in &logs {
        sxy += (lx - mean_x) * (ly - mean_y);
        sxx += (lx - mean_x) * (lx - mean_x);
    }
    sxy / sxx
}

/// `count` points spaced evenly in log between `low` and `high`.
pub fn log_space(low: f64, high: f64, count: usize) -> Vec<f64> {
    let (a, b) = (low.ln(), high.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}
