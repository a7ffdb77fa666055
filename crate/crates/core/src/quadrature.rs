//! Composite 4-point Gauss–Legendre quadrature with a one-halving error estimate.

use serde::Serialize;

const NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// A computed value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// Integral of `f` over `[a, b]` split into `n` equal panels.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> f64 {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let mid = a + (i as f64 + 0.5) * h;
        let mut panel = 0.0;
        for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
            panel += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * panel;
    }
    total
}

/// Integral at `n` and `2n` panels; the finer value is returned and the
/// difference between the two levels is the error estimate.
pub fn gauss_legendre_refined<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> Estimate {
    let coarse = gauss_legendre(a, b, n, &mut f);
    let fine = gauss_legendre(a, b, 2 * n.max(1), &mut f);
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let v = gauss_legendre(0.0, 2.0, 1, |x| x * x * x - x + 1.0);
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn arctan_integral() {
        let e = gauss_legendre_refined(0.0, 1.0, 4, |t| 2.0 / (1.0 + t * t));
        assert!((e.value - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!(e.error < 1e-8);
    }
}
