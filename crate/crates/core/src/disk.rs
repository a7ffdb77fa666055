//! Evaluation points of the unit disk that keep `1 - z` and `1 + z` accurate.
//!
//! Hyperbolic radii up to several hundred are needed when locating level sets
//! `|f| = r` for large `r`. At such radii `1 - |z|` falls far below the spacing
//! of doubles near 1, so a point built from a bare `Complex64` would collapse
//! onto the boundary. A [`DiskPoint`] built with [`DiskPoint::polar`] carries
//! the two factors every catalog map is written in, computed without
//! cancellation.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    z: Complex64,
    one_minus: Complex64,
    one_plus: Complex64,
    one_minus_abs: f64,
}

impl DiskPoint {
    /// Wraps a point of the open unit disk.
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 {
            return Err(Error::OutOfDomain(format!("{z}")));
        }
        Ok(Self::new_unchecked(z))
    }

    pub(crate) fn new_unchecked(z: Complex64) -> Self {
        Self {
            z,
            one_minus: Complex64::new(1.0 - z.re, -z.im),
            one_plus: Complex64::new(1.0 + z.re, z.im),
            one_minus_abs: 1.0 - z.norm(),
        }
    }

    /// The point `(1 - eps) e^{i angle}` with `eps = 1 - |z|` given exactly.
    pub fn polar(angle: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) || !angle.is_finite() {
            return Err(Error::OutOfDomain(format!("angle {angle}, 1-|z| = {eps}")));
        }
        let t = 1.0 - eps;
        let unit = Complex64::from_polar(1.0, angle);
        let half = Complex64::from_polar(1.0, 0.5 * angle);
        let (s, c) = (0.5 * angle).sin_cos();
        // 1 - t e^{ia} = (1 - e^{ia}) + eps e^{ia},  1 - e^{ia} = -2i sin(a/2) e^{ia/2}
        let one_minus = Complex64::new(0.0, -2.0 * s) * half + unit * eps;
        // 1 + t e^{ia} = 2 cos(a/2) e^{ia/2} - eps e^{ia}
        let one_plus = half * (2.0 * c) - unit * eps;
        Ok(Self {
            z: unit * t,
            one_minus,
            one_plus,
            one_minus_abs: eps,
        })
    }

    /// Point on the ray of direction `angle` at hyperbolic distance `s` from 0.
    pub fn from_hyperbolic_radius(angle: f64, s: f64) -> Result<Self> {
        if !(s >= 0.0) {
            return Err(Error::BadParameter(format!("hyperbolic radius {s}")));
        }
        // 1 - tanh(s/2) = 2 e^{-s} / (1 + e^{-s})
        let e = (-s).exp();
        Self::polar(angle, 2.0 * e / (1.0 + e))
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// `1 - z`
    pub fn one_minus(&self) -> Complex64 {
        self.one_minus
    }

    /// `1 + z`
    pub fn one_plus(&self) -> Complex64 {
        self.one_plus
    }

    /// `1 - |z|`
    pub fn one_minus_abs(&self) -> f64 {
        self.one_minus_abs
    }

    /// Hyperbolic distance from the origin, `log((1+|z|)/(1-|z|))`.
    pub fn hyperbolic_radius(&self) -> f64 {
        let eps = self.one_minus_abs;
        ((2.0 - eps) / eps).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_agrees_with_cartesian_away_from_the_boundary() {
        for &(a, eps) in &[(0.3, 0.5), (-2.0, 0.01), (3.0, 0.9), (0.0, 0.25)] {
            let p = DiskPoint::polar(a, eps).unwrap();
            let q = DiskPoint::new(Complex64::from_polar(1.0 - eps, a)).unwrap();
            assert!((p.one_minus() - q.one_minus()).norm() < 1e-15);
            assert!((p.one_plus() - q.one_plus()).norm() < 1e-15);
        }
    }

    #[test]
    fn tiny_eps_survives_on_the_positive_axis() {
        let p = DiskPoint::polar(0.0, 1e-30).unwrap();
        assert_eq!(p.one_minus(), Complex64::new(1e-30, 0.0));
        assert!((p.hyperbolic_radius() - (2e30f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_radius_round_trip() {
        for &s in &[0.0, 0.5, 3.0, 40.0, 300.0] {
            let p = DiskPoint::from_hyperbolic_radius(1.0, s).unwrap();
            assert!((p.hyperbolic_radius() - s).abs() < 1e-9 * (1.0 + s));
        }
    }

    #[test]
    fn rejects_points_outside() {
        assert!(DiskPoint::new(Complex64::new(1.0, 0.0)).is_err());
        assert!(DiskPoint::polar(0.0, 0.0).is_err());
    }
}
