//! Least-squares fits used by the envelope estimators.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`. Needs two distinct `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    Some(LinearFit {
        slope,
        intercept,
        residual: (ss / n as f64).sqrt(),
    })
}

/// Coefficient `a` of the fit `y ≈ a·x + b·ln x + c` (requires `x > 0` and at
/// least three points). Absorbs logarithmic corrections that a plain line
/// would fold into its slope.
pub fn log_corrected_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 3 || x.len() != y.len() || x.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    // Normal equations for the basis (x, ln x, 1), centred for conditioning.
    let n = x.len() as f64;
    let cols: Vec<[f64; 2]> = x.iter().map(|&v| [v, v.ln()]).collect();
    let mean = [
        cols.iter().map(|c| c[0]).sum::<f64>() / n,
        cols.iter().map(|c| c[1]).sum::<f64>() / n,
    ];
    let my = y.iter().sum::<f64>() / n;
    let mut a = [[0.0; 2]; 2];
    let mut b = [0.0; 2];
    for (c, &yv) in cols.iter().zip(y) {
        let d = [c[0] - mean[0], c[1] - mean[1]];
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] += d[i] * d[j];
            }
            b[i] += d[i] * (yv - my);
        }
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() <= 1e-14 * a[0][0] * a[1][1] {
        return None;
    }
    Some((b[0] * a[1][1] - b[1] * a[0][1]) / det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-14);
        assert!(f.residual < 1e-14);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn log_correction_is_separated() {
        let x: Vec<f64> = (5..20).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v - 2.0 * v.ln() + 4.0).collect();
        assert!((log_corrected_slope(&x, &y).unwrap() - 0.3).abs() < 1e-10);
        // a plain line is biased by the logarithm
        assert!((linear_fit(&x, &y).unwrap().slope - 0.3).abs() > 0.05);
    }
}
