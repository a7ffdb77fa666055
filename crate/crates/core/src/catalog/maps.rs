use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::riemann_sphere::{spherical_derivative_formula, ExtendedComplex};

/// An analytic univalent map of the unit disk with its complex derivative.
pub trait ConformalMap: fmt::Debug + Send + Sync {
    /// Short name with parameters, e.g. `sector:1.5708`.
    fn name(&self) -> String;

    fn eval(&self, p: &DiskPoint) -> ExtendedComplex;

    fn deriv(&self, p: &DiskPoint) -> Complex64;

    /// Preimage of `w` in the disk. Maps without a registered inverse return
    /// [`Error::NoInverse`].
    fn inverse(&self, w: ExtendedComplex) -> Result<Complex64> {
        let _ = w;
        Err(Error::NoInverse(self.name()))
    }

    fn has_inverse(&self) -> bool {
        false
    }

    /// `f#(z) = 2|f'(z)| / (1 + |f(z)|²)`.
    fn spherical_derivative_at(&self, p: &DiskPoint) -> f64 {
        spherical_derivative_formula(self.eval(p), self.deriv(p))
    }

    /// Convenience evaluation at a plain complex point (no boundary precision).
    fn eval_at(&self, z: Complex64) -> ExtendedComplex {
        self.eval(&DiskPoint::new_unchecked(z))
    }

    fn deriv_at(&self, z: Complex64) -> Complex64 {
        self.deriv(&DiskPoint::new_unchecked(z))
    }

    /// Base point `f(0)`.
    fn base_point(&self) -> ExtendedComplex {
        self.eval_at(Complex64::new(0.0, 0.0))
    }
}

pub(crate) fn checked_preimage(z: Complex64, w: ExtendedComplex) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() && z.norm() < 1.0 {
        Ok(z)
    } else {
        Err(Error::PreimageNotInDisk(format!("{w}")))
    }
}

/// `z ↦ a z + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub scale: Complex64,
    pub shift: Complex64,
}

impl AffineMap {
    pub fn new(scale: Complex64, shift: Complex64) -> Result<Self> {
        if scale.norm() == 0.0 {
            return Err(Error::BadParameter("affine scale must be nonzero".into()));
        }
        Ok(Self { scale, shift })
    }

    pub fn identity() -> Self {
        Self {
            scale: Complex64::new(1.0, 0.0),
            shift: Complex64::new(0.0, 0.0),
        }
    }
}

impl ConformalMap for AffineMap {
    fn name(&self) -> String {
        format!("affine:{},{}", self.scale, self.shift)
    }
    fn eval(&self, p: &DiskPoint) -> ExtendedComplex {
        ExtendedComplex::from(self.scale * p.z() + self.shift)
    }
    fn deriv(&self, _p: &DiskPoint) -> Complex64 {
        self.scale
    }
    fn inverse(&self, w: ExtendedComplex) -> Result<Complex64> {
        let v = w.as_finite().ok_or_else(|| Error::PreimageNotInDisk("∞".into()))?;
        checked_preimage((v - self.shift) / self.scale, w)
    }
    fn has_inverse(&self) -> bool {
        true
    }
}

/// `z ↦ ((1+z)/(1−z))^{θ/π} + offset`, onto the sector `|Arg(w − offset)| < θ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorMap {
    theta: f64,
    offset: Complex64,
}

impl SectorMap {
    pub fn new(theta: f64) -> Result<Self> {
        Self::translated(theta, Complex64::new(0.0, 0.0))
    }

    pub fn translated(theta: f64, offset: Complex64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 2.0 * PI) {
            return Err(Error::BadParameter(format!("sector opening {theta} not in (0, 2π]")));
        }
        if !(offset.re.is_finite() && offset.im.is_finite()) {
            return Err(Error::BadParameter(format!("offset {offset}")));
        }
        Ok(Self { theta, offset })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn offset(&self) -> Complex64 {
        self.offset
    }

    fn exponent(&self) -> f64 {
        self.theta / PI
    }

    /// `((1+z)/(1−z))^{θ/π}` on the principal branch; the base has positive
    /// real part on the disk.
    fn power(&self, p: &DiskPoint) -> Complex64 {
        let log_ratio = p.one_plus().ln() - p.one_minus().ln();
        (log_ratio * self.exponent()).exp()
    }
}

impl ConformalMap for SectorMap {
    fn name(&self) -> String {
        if self.offset == Complex64::new(0.0, 0.0) {
            format!("sector:{}", self.theta)
        } else {
            format!("sector:{}:offset={},{}", self.theta, self.offset.re, self.offset.im)
        }
    }

    fn eval(&self, p: &DiskPoint) -> ExtendedComplex {
        ExtendedComplex::from(self.power(p) + self.offset)
    }

    fn deriv(&self, p: &DiskPoint) -> Complex64 {
        self.power(p) * self.exponent() * 2.0 / (p.one_plus() * p.one_minus())
    }

    fn inverse(&self, w: ExtendedComplex) -> Result<Complex64> {
        let v = w.as_finite().ok_or_else(|| Error::PreimageNotInDisk("∞".into()))? - self.offset;
        if v.norm() == 0.0 || v.arg().abs() >= self.theta / 2.0 {
            return Err(Error::PreimageNotInDisk(format!("{w}")));
        }
        let zeta = (v.ln() / self.exponent()).exp();
        if zeta.re <= 0.0 {
            return Err(Error::PreimageNotInDisk(format!("{w}")));
        }
        checked_preimage((zeta - 1.0) / (zeta + 1.0), w)
    }

    fn has_inverse(&self) -> bool {
        true
    }
}

/// Koebe function `z / (1−z)²`, onto `ℂ ∖ (−∞, −1/4]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KoebeMap;

impl ConformalMap for KoebeMap {
    fn name(&self) -> String {
        "koebe".into()
    }

    fn eval(&self, p: &DiskPoint) -> ExtendedComplex {
        let m = p.one_minus();
        ExtendedComplex::from(p.z() / (m * m))
    }

    fn deriv(&self, p: &DiskPoint) -> Complex64 {
        let m = p.one_minus();
        p.one_plus() / (m * m * m)
    }

    fn inverse(&self, w: ExtendedComplex) -> Result<Complex64> {
        let v = w.as_finite().ok_or_else(|| Error::PreimageNotInDisk("∞".into()))?;
        // w z² − (2w+1) z + w = 0; the root inside the disk is
        // 2w / ((2w+1) ± sqrt(4w+1)) with the sign giving the larger denominator.
        let s = (v * 4.0 + 1.0).sqrt();
        let b = v * 2.0 + 1.0;
        let denom = if (b + s).norm() >= (b - s).norm() { b + s } else { b - s };
        if denom.norm() == 0.0 {
            return Err(Error::PreimageNotInDisk(format!("{w}")));
        }
        checked_preimage(v * 2.0 / denom, w)
    }

    fn has_inverse(&self) -> bool {
        true
    }
}

/// `log((1+z)/(1−z))`, onto the strip `|Im w| < π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StripMap;

impl ConformalMap for StripMap {
    fn name(&self) -> String {
        "strip".into()
    }

    fn eval(&self, p: &DiskPoint) -> ExtendedComplex {
        ExtendedComplex::from(p.one_plus().ln() - p.one_minus().ln())
    }

    fn deriv(&self, p: &DiskPoint) -> Complex64 {
        Complex64::new(2.0, 0.0) / (p.one_plus() * p.one_minus())
    }

    fn inverse(&self, w: ExtendedComplex) -> Result<Complex64> {
        let v = w.as_finite().ok_or_else(|| Error::PreimageNotInDisk("∞".into()))?;
        if v.im.abs() >= PI / 2.0 {
            return Err(Error::PreimageNotInDisk(format!("{w}")));
        }
        checked_preimage((v * 0.5).tanh(), w)
    }

    fn has_inverse(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn maps() -> Vec<Box<dyn ConformalMap>> {
        vec![
            Box::new(SectorMap::new(PI / 4.0).unwrap()),
            Box::new(SectorMap::new(PI / 2.0).unwrap()),
            Box::new(SectorMap::new(PI).unwrap()),
            Box::new(SectorMap::new(1.5 * PI).unwrap()),
            Box::new(SectorMap::new(2.0 * PI).unwrap()),
            Box::new(SectorMap::translated(PI / 2.0, Complex64::new(-5.0, 0.0)).unwrap()),
            Box::new(KoebeMap),
            Box::new(StripMap),
            Box::new(AffineMap::new(Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)).unwrap()),
        ]
    }

    fn random_points(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let r = 0.95 * rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, rng.gen::<f64>() * 2.0 * PI)
            })
            .collect()
    }

    #[test]
    fn derivative_matches_central_differences() {
        for f in maps() {
            for z in random_points(1000, 1) {
                let h = 1e-6 * (1.0 - z.norm());
                let fd = |dz: Complex64| {
                    let a = f.eval_at(z + dz).as_finite().unwrap();
                    let b = f.eval_at(z - dz).as_finite().unwrap();
                    (a - b) / (dz * 2.0)
                };
                let numeric = (fd(Complex64::new(h, 0.0)) + fd(Complex64::new(0.0, h))) * 0.5;
                let exact = f.deriv_at(z);
                let rel = (numeric - exact).norm() / exact.norm();
                assert!(rel < 1e-6, "{} at {z}: rel {rel}", f.name());
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        for f in maps() {
            for z in random_points(1000, 2) {
                let w = f.eval_at(z);
                let back = f.inverse(w).unwrap();
                assert!((back - z).norm() < 1e-10, "{} at {z}", f.name());
            }
        }
    }

    #[test]
    fn sampled_images_are_injective() {
        for f in maps() {
            let pts = random_points(400, 3);
            let imgs: Vec<Complex64> = pts.iter().map(|&z| f.eval_at(z).as_finite().unwrap()).collect();
            for i in 0..pts.len() {
                for j in 0..i {
                    if (imgs[i] - imgs[j]).norm() < 1e-9 {
                        assert!((pts[i] - pts[j]).norm() < 1e-9, "{}", f.name());
                    }
                }
            }
        }
    }

    #[test]
    fn sector_base_point_is_one() {
        for k in 1..=8 {
            let f = SectorMap::new(k as f64 * PI / 4.0).unwrap();
            let w = f.base_point().as_finite().unwrap();
            assert!((w - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn koebe_normalization() {
        let f = KoebeMap;
        assert_eq!(f.base_point(), ExtendedComplex::finite(0.0, 0.0));
        assert_eq!(f.deriv_at(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        // f(0) = 0, f'(0) = 1 give f#(0) = 2
        assert_eq!(f.spherical_derivative_at(&DiskPoint::new(Complex64::new(0.0, 0.0)).unwrap()), 2.0);
    }

    #[test]
    fn inverse_rejects_points_outside_the_image() {
        let sector = SectorMap::new(PI / 2.0).unwrap();
        assert!(matches!(
            sector.inverse(ExtendedComplex::finite(-1.0, 0.0)),
            Err(Error::PreimageNotInDisk(_))
        ));
        assert!(StripMap.inverse(ExtendedComplex::finite(0.0, 2.0)).is_err());
        assert!(KoebeMap.inverse(ExtendedComplex::finite(-1.0, 0.0)).is_err());
    }

    #[test]
    fn bad_openings_are_rejected() {
        assert!(SectorMap::new(0.0).is_err());
        assert!(SectorMap::new(7.0).is_err());
        assert!(SectorMap::new(f64::NAN).is_err());
    }
}
