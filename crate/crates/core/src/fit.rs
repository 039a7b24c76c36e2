//! Small least-squares helpers shared by the decay and norm-growth reports.

/// Ordinary least squares for `y ~ slope * x + intercept`.
///
/// Returns `(slope, intercept, rms_residual)`; degenerate inputs (fewer
/// than two distinct abscissas) give a zero slope.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len().min(ys.len());
    if n < 2 {
        let intercept = ys.first().copied().unwrap_or(0.0);
        return (0.0, intercept, 0.0);
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for i in 0..n {
        let r = ys[i] - slope * xs[i] - intercept;
        ss += r * r;
    }
    (slope, intercept, (ss / nf).sqrt())
}

/// Least-squares exponent of `v ~ C <n>^p` over the pairs with `v > 0`,
/// where `<n> = 2 + |n|`.
pub fn fit_power_law(ns: &[i64], vals: &[f64]) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&n, &v) in ns.iter().zip(vals) {
        if v > 0.0 && v.is_finite() {
            xs.push(angle_bracket(n).ln());
            ys.push(v.ln());
        }
    }
    fit_line(&xs, &ys).0
}

/// The paper-style weight `<n> = 2 + |n|`.
pub fn angle_bracket(n: i64) -> f64 {
    2.0 + n.unsigned_abs() as f64
}
