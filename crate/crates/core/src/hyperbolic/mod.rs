//! Hyperbolic distance and density in the unit disk, their pushforwards under
//! catalog maps, and geodesics through Möbius images of diameters.

mod grid;

use num_complex::Complex64;

use crate::catalog::ConformalMap;
use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_refined, Estimate};
use crate::riemann_sphere::{ExtendedComplex, PolylinePath};

pub use grid::{quasihyperbolic_distance, GridRegion, QhEstimate, QhField};

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPoint(Complex64);

impl HyperbolicPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        DiskPoint::new(z).map(|_| Self(z))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }
}

/// `log((1+p)/(1−p))` with `p = |(z1 − z2)/(1 − z̄1 z2)|`, evaluated as
/// `2 asinh(|z1 − z2| / √((1−|z1|²)(1−|z2|²)))` to keep precision near `∂𝔻`.
pub fn hyperbolic_distance_disk(z1: HyperbolicPoint, z2: HyperbolicPoint) -> f64 {
    let (a, b) = (z1.0, z2.0);
    let ea = (1.0 - a.norm()) * (1.0 + a.norm());
    let eb = (1.0 - b.norm()) * (1.0 + b.norm());
    2.0 * ((a - b).norm() / (ea * eb).sqrt()).asinh()
}

/// Hyperbolic distance in `map(𝔻)` through preimages.
pub fn hyperbolic_distance_domain(map: &dyn ConformalMap, w1: ExtendedComplex, w2: ExtendedComplex) -> Result<f64> {
    if !map.has_inverse() {
        return Err(Error::NoInverse(map.name()));
    }
    let z1 = HyperbolicPoint::new(map.inverse(w1)?)?;
    let z2 = HyperbolicPoint::new(map.inverse(w2)?)?;
    Ok(hyperbolic_distance_disk(z1, z2))
}

/// Density `λ` of the image domain at `map(z)`: `(2/(1−|z|²)) / |map′(z)|`.
pub fn hyperbolic_density_pushforward(map: &dyn ConformalMap, z: HyperbolicPoint) -> Result<f64> {
    let p = DiskPoint::new(z.0)?;
    let d = map.deriv(&p).norm();
    if d == 0.0 || !d.is_finite() {
        return Err(Error::ZeroDerivative(format!("{}", z.0)));
    }
    let r = z.0.norm();
    Ok(2.0 / ((1.0 - r) * (1.0 + r)) / d)
}

/// The radius `{t e^{iθ} : t0 ≤ t ≤ t1}` as a polyline whose vertices
/// accumulate geometrically toward `|z| = 1`.
pub fn radial_geodesic(theta: f64, t0: f64, t1: f64) -> Result<PolylinePath> {
    if !(0.0 <= t0 && t0 < t1 && t1 < 1.0) {
        return Err(Error::BadParameter(format!("radial geodesic needs 0 <= t0 < t1 < 1, got {t0}, {t1}")));
    }
    // Vertices equally spaced in log(1 − t), at least 8 segments.
    let (l0, l1) = ((1.0 - t0).ln(), (1.0 - t1).ln());
    let n = (((l0 - l1) / 0.25).ceil() as usize).max(8);
    let u = Complex64::from_polar(1.0, theta);
    let mut pts = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = if k == 0 {
            t0
        } else if k == n {
            t1
        } else {
            1.0 - (l0 + (l1 - l0) * k as f64 / n as f64).exp()
        };
        pts.push(u * t);
    }
    PolylinePath::through(&pts, 4)
}

/// Disk automorphism `φ_a(z) = (z + a)/(1 + ā z)`, sending 0 to `a`.
pub fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (z + a) / (Complex64::new(1.0, 0.0) + a.conj() * z)
}

/// The hyperbolic geodesic `φ_a({t e^{iθ} : −1 < t < 1})` joining
/// `φ_a(−e^{iθ})` to `φ_a(e^{iθ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusGeodesic {
    a: Complex64,
    direction: Complex64,
}

impl MobiusGeodesic {
    pub fn new(a: Complex64, theta: f64) -> Result<Self> {
        HyperbolicPoint::new(a)?;
        Ok(Self {
            a,
            direction: Complex64::from_polar(1.0, theta),
        })
    }

    /// `φ_a(t e^{iθ})`, `t ∈ [−1, 1]`.
    pub fn point(&self, t: f64) -> Complex64 {
        mobius(self.a, self.direction * t)
    }

    pub fn endpoints(&self) -> (Complex64, Complex64) {
        (self.point(-1.0), self.point(1.0))
    }

    // |d/dt φ_a(t e^{iθ})| = (1 − |a|²) / |1 + ā t e^{iθ}|²
    fn speed(&self, t: f64) -> f64 {
        let q = Complex64::new(1.0, 0.0) + self.a.conj() * self.direction * t;
        (1.0 - self.a.norm_sqr()) / q.norm_sqr()
    }

    /// Euclidean length of the subarc from `point(t)` to the endpoint with
    /// the shorter subarc.
    pub fn tail_length(&self, t: f64) -> Estimate {
        let fwd = gauss_legendre_refined(t, 1.0, 64, |s| self.speed(s));
        let back = gauss_legendre_refined(-1.0, t, 64, |s| self.speed(s));
        if fwd.value <= back.value {
            fwd
        } else {
            back
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AffineMap, SectorMap};
    use std::f64::consts::PI;

    fn hp(re: f64, im: f64) -> HyperbolicPoint {
        HyperbolicPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn disk_distance_examples() {
        assert_eq!(hyperbolic_distance_disk(hp(0.0, 0.0), hp(0.0, 0.0)), 0.0);
        assert!((hyperbolic_distance_disk(hp(0.0, 0.0), hp(0.5, 0.0)) - 3f64.ln()).abs() < 1e-15);
        // move 0.3 to 0 with the automorphism φ_{-0.3}
        let a = Complex64::new(-0.3, 0.0);
        let moved = mobius(a, Complex64::new(0.0, 0.3));
        let direct = hyperbolic_distance_disk(hp(0.3, 0.0), hp(0.0, 0.3));
        let via = hyperbolic_distance_disk(hp(0.0, 0.0), HyperbolicPoint::new(moved).unwrap());
        assert!((direct - via).abs() < 1e-12);
    }

    #[test]
    fn points_outside_are_rejected() {
        assert!(matches!(HyperbolicPoint::new(Complex64::new(1.0, 0.0)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn domain_distance_on_the_sector_axis() {
        let f = SectorMap::new(PI / 2.0).unwrap();
        let w0 = f.base_point();
        assert_eq!(hyperbolic_distance_domain(&f, w0, w0).unwrap(), 0.0);
        for &t in &[0.1, 0.5, 0.9, 0.999] {
            let w = f.eval_at(Complex64::new(t, 0.0));
            let h = hyperbolic_distance_domain(&f, w0, w).unwrap();
            assert!((h - ((1.0 + t) / (1.0 - t)).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn density_examples() {
        let z = hp(0.0, 0.0);
        assert_eq!(hyperbolic_density_pushforward(&AffineMap::identity(), z).unwrap(), 2.0);
        let double = AffineMap::new(Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(hyperbolic_density_pushforward(&double, z).unwrap(), 1.0);
        let half_plane = SectorMap::new(PI).unwrap();
        assert!((hyperbolic_density_pushforward(&half_plane, z).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radial_geodesic_shape() {
        let g = radial_geodesic(0.0, 0.0, 0.5).unwrap();
        assert_eq!(g.vertices()[0], ExtendedComplex::finite(0.0, 0.0));
        assert_eq!(*g.vertices().last().unwrap(), ExtendedComplex::finite(0.5, 0.0));
        let g = radial_geodesic(1.1, 0.2, 0.999).unwrap();
        assert!((g.euclidean_length() - 0.799).abs() < 1e-12);
        assert!(radial_geodesic(0.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn geodesic_tail_bounds() {
        let g = MobiusGeodesic::new(Complex64::new(0.4, -0.3), 0.7).unwrap();
        for k in -9..10 {
            let t = k as f64 / 10.0;
            let z = g.point(t);
            let l = g.tail_length(t).value;
            let e = 1.0 - z.norm();
            assert!(e <= l * (1.0 + 1e-12) && l <= PI / 2.0 * e * (1.0 + 1e-12), "t={t}: {e} {l}");
        }
    }
}
