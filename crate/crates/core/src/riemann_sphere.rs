//! Chordal and spherical geometry of the extended plane.
//!
//! The spherical metric has density `2|dz| / (1 + |z|²)`, which makes the
//! Riemann sphere a sphere of diameter 2 (so `σ(0, ∞) = π`). Chordal distance
//! `χ` is the straight-line distance between stereographic images on that
//! sphere and spherical distance `σ` is the great-circle distance, giving the
//! closed form `σ = 2 asin(χ / 2)` and the sandwich `χ ≤ σ ≤ (π/2) χ`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::catalog::ConformalMap;
use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::kdtree::KdTree;
use crate::quadrature::{gauss_legendre, Estimate};

/// Factor turning a chordal net mesh `δ` into the additive uncertainty of a
/// spherical boundary distance: `(π δ / 2)(π / 2)`.
pub const NET_UNCERTAINTY_FACTOR: f64 = PI * PI / 4.0;

/// A point of the extended plane `ℂ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtendedComplex {
    /// Rejects NaN components; infinite components are mapped to `∞`.
    pub fn new(z: Complex64) -> Result<Self> {
        if z.re.is_nan() || z.im.is_nan() {
            return Err(Error::NonFinite(format!("{z}")));
        }
        Ok(Self::from(z))
    }

    pub fn finite(re: f64, im: f64) -> Self {
        Self::from(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match *self {
            Self::Finite(z) => Some(z),
            Self::Infinity => None,
        }
    }

    /// Modulus, `+inf` at `∞`.
    pub fn norm(&self) -> f64 {
        match self {
            Self::Finite(z) => z.norm(),
            Self::Infinity => f64::INFINITY,
        }
    }

    /// `1/z`, exchanging `0` and `∞`.
    pub fn recip(&self) -> Self {
        match *self {
            Self::Infinity => Self::Finite(Complex64::new(0.0, 0.0)),
            Self::Finite(z) if z == Complex64::new(0.0, 0.0) => Self::Infinity,
            Self::Finite(z) => Self::from(z.inv()),
        }
    }

    /// Stereographic image on the unit sphere of R³ (`∞` is the north pole).
    pub fn to_sphere(&self) -> [f64; 3] {
        match *self {
            Self::Infinity => [0.0, 0.0, 1.0],
            Self::Finite(z) => {
                let m = z.norm();
                if m <= 1.0 {
                    let n = 1.0 + m * m;
                    [2.0 * z.re / n, 2.0 * z.im / n, (m * m - 1.0) / n]
                } else {
                    // u = 1 / conj(z), |u| < 1
                    let u = z.conj().inv();
                    let q = u.norm_sqr();
                    let n = 1.0 + q;
                    [2.0 * u.re / n, 2.0 * u.im / n, (1.0 - q) / n]
                }
            }
        }
    }

    /// Inverse of [`to_sphere`](Self::to_sphere) for a unit vector.
    pub fn from_sphere(p: [f64; 3]) -> Self {
        let [x, y, z] = p;
        if z > 0.0 {
            // via 1/conj(w) = (x + iy) / (1 + z)
            let denom = 1.0 + z;
            let u = Complex64::new(x / denom, y / denom);
            if u == Complex64::new(0.0, 0.0) {
                Self::Infinity
            } else {
                Self::from(u.conj().inv())
            }
        } else {
            let denom = 1.0 - z;
            Self::Finite(Complex64::new(x / denom, y / denom))
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            Self::Finite(z)
        } else {
            Self::Infinity
        }
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(z) => write!(f, "{z}"),
            Self::Infinity => write!(f, "∞"),
        }
    }
}

/// Chordal distance `χ(z, w)`, in `[0, 2]`.
pub fn chordal_distance(z: ExtendedComplex, w: ExtendedComplex) -> f64 {
    use ExtendedComplex::*;
    match (z, w) {
        (Infinity, Infinity) => 0.0,
        (Finite(a), Infinity) | (Infinity, Finite(a)) => 2.0 / 1f64.hypot(a.norm()),
        (Finite(a), Finite(b)) => {
            // z -> 1/z is a chordal isometry; keep both moduli below 1.
            let (a, b) = if a.norm() > 1.0 && b.norm() > 1.0 {
                (a.inv(), b.inv())
            } else {
                (a, b)
            };
            2.0 * (a - b).norm() / (1f64.hypot(a.norm()) * 1f64.hypot(b.norm()))
        }
    }
}

/// Spherical distance `σ(z, w) = 2 asin(χ / 2)`, in `[0, π]`.
pub fn spherical_distance(z: ExtendedComplex, w: ExtendedComplex) -> f64 {
    chord_to_arc(chordal_distance(z, w))
}

pub(crate) fn chord_to_arc(chi: f64) -> f64 {
    2.0 * (0.5 * chi).min(1.0).asin()
}

/// A polyline in the extended plane. Only the first and last vertices may be
/// `∞`; a segment ending at `∞` follows the ray from its finite vertex in the
/// radial direction (the positive real direction when that vertex is 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PolylinePath {
    vertices: Vec<ExtendedComplex>,
    subdivisions: Vec<usize>,
}

impl PolylinePath {
    pub fn new(vertices: Vec<ExtendedComplex>, subdivisions: Vec<usize>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::BadParameter("a path needs at least 2 vertices".into()));
        }
        if subdivisions.len() != vertices.len() - 1 {
            return Err(Error::BadParameter(format!(
                "{} segments but {} subdivision counts",
                vertices.len() - 1,
                subdivisions.len()
            )));
        }
        if subdivisions.contains(&0) {
            return Err(Error::BadParameter("subdivision counts must be >= 1".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadParameter("consecutive vertices coincide".into()));
        }
        let last = vertices.len() - 1;
        if vertices[1..last].iter().any(|v| v.is_infinite()) {
            return Err(Error::BadParameter("only endpoints may be infinite".into()));
        }
        Ok(Self {
            vertices,
            subdivisions,
        })
    }

    /// Polyline through finite vertices with the same subdivision count on every segment.
    pub fn through(points: &[Complex64], subdivisions: usize) -> Result<Self> {
        let vertices = points.iter().map(|&z| ExtendedComplex::from(z)).collect::<Vec<_>>();
        let n = vertices.len().saturating_sub(1);
        Self::new(vertices, vec![subdivisions; n])
    }

    pub fn segment(a: ExtendedComplex, b: ExtendedComplex, subdivisions: usize) -> Result<Self> {
        Self::new(vec![a, b], vec![subdivisions])
    }

    pub fn vertices(&self) -> &[ExtendedComplex] {
        &self.vertices
    }

    pub fn subdivisions(&self) -> &[usize] {
        &self.subdivisions
    }

    /// Same path with every subdivision count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            vertices: self.vertices.clone(),
            subdivisions: self.subdivisions.iter().map(|n| n * factor.max(1)).collect(),
        }
    }

    /// Euclidean length; infinite when an endpoint is `∞`.
    pub fn euclidean_length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| match (w[0].as_finite(), w[1].as_finite()) {
                (Some(a), Some(b)) => (b - a).norm(),
                _ => f64::INFINITY,
            })
            .sum()
    }
}

fn ray_direction(a: Complex64) -> Complex64 {
    if a.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        a / a.norm()
    }
}

/// Spherical length of `path`, or of its image under `map` when given.
///
/// Composite Gauss–Legendre on every segment at the stored subdivision counts
/// and at twice those counts; the finer value is returned with the difference
/// as error estimate.
pub fn spherical_path_length(path: &PolylinePath, map: Option<&dyn ConformalMap>) -> Result<Estimate> {
    let coarse = path_length_at(path, map, 1)?;
    let fine = path_length_at(path, map, 2)?;
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    })
}

fn path_length_at(path: &PolylinePath, map: Option<&dyn ConformalMap>, factor: usize) -> Result<f64> {
    let mut total = 0.0;
    for (w, &n) in path.vertices.windows(2).zip(path.subdivisions.iter()) {
        let n = n * factor;
        let piece = match (w[0], w[1], map) {
            (ExtendedComplex::Finite(a), ExtendedComplex::Finite(b), None) => {
                let d = b - a;
                let len = d.norm();
                gauss_legendre(0.0, 1.0, n, |t| {
                    let z = a + d * t;
                    2.0 * len / (1.0 + z.norm_sqr())
                })
            }
            (ExtendedComplex::Finite(a), ExtendedComplex::Infinity, None)
            | (ExtendedComplex::Infinity, ExtendedComplex::Finite(a), None) => {
                // z = a + u s/(1-s): density 2|u| / ((1-s)² + |(1-s)a + s u|²)
                let u = ray_direction(a);
                gauss_legendre(0.0, 1.0, n, |s| {
                    let q = a * (1.0 - s) + u * s;
                    2.0 / ((1.0 - s) * (1.0 - s) + q.norm_sqr())
                })
            }
            (ExtendedComplex::Finite(a), ExtendedComplex::Finite(b), Some(f)) => {
                let d = b - a;
                let len = d.norm();
                let mut bad = None;
                let v = gauss_legendre(0.0, 1.0, n, |t| {
                    let z = a + d * t;
                    match DiskPoint::new(z) {
                        Ok(p) => {
                            let s = f.spherical_derivative_at(&p);
                            if !s.is_finite() {
                                bad.get_or_insert(z);
                            }
                            s * len
                        }
                        Err(_) => {
                            bad.get_or_insert(z);
                            0.0
                        }
                    }
                });
                if let Some(z) = bad {
                    return Err(Error::NonFiniteIntegrand(format!("map evaluated at {z}")));
                }
                v
            }
            (_, _, Some(_)) => {
                return Err(Error::NonFiniteIntegrand("map evaluated at ∞".into()));
            }
            (ExtendedComplex::Infinity, ExtendedComplex::Infinity, None) => unreachable!(),
        };
        total += piece;
    }
    Ok(total)
}

/// Spherical derivative `f#(z) = 2|f'(z)| / (1 + |f(z)|²)`.
pub fn spherical_derivative(map: &dyn ConformalMap, z: ExtendedComplex) -> Result<f64> {
    let p = match z {
        ExtendedComplex::Finite(z) => DiskPoint::new(z)?,
        ExtendedComplex::Infinity => return Err(Error::OutOfDomain("∞".into())),
    };
    Ok(map.spherical_derivative_at(&p))
}

/// `2|d| / (1 + |v|²)` evaluated without overflow for large `|v|`.
pub(crate) fn spherical_derivative_formula(value: ExtendedComplex, deriv: Complex64) -> f64 {
    match value {
        ExtendedComplex::Infinity => 0.0,
        ExtendedComplex::Finite(v) => {
            let m = v.norm();
            let d = deriv.norm();
            if m > 1.0 {
                2.0 * (d / m) / m / (1.0 + (1.0 / m) / m)
            } else {
                2.0 * d / (1.0 + m * m)
            }
        }
    }
}

/// A finite sample of a boundary set together with its chordal mesh `δ`:
/// every boundary point lies within chordal distance `δ` of a sample.
#[derive(Debug, Clone)]
pub struct BoundaryNet {
    points: Vec<ExtendedComplex>,
    delta: f64,
    tree: KdTree,
}

impl BoundaryNet {
    pub fn new(points: Vec<ExtendedComplex>, delta: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        if !(delta >= 0.0) {
            return Err(Error::BadParameter(format!("net mesh {delta}")));
        }
        let sphere: Vec<[f64; 3]> = points.iter().map(|p| p.to_sphere()).collect();
        let tree = KdTree::new(&sphere);
        Ok(Self { points, delta, tree })
    }

    pub fn points(&self) -> &[ExtendedComplex] {
        &self.points
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Additive uncertainty of a spherical distance measured against this net.
    pub fn uncertainty(&self) -> f64 {
        NET_UNCERTAINTY_FACTOR * self.delta
    }

    /// Nearest sample in the chordal metric: (χ, sample).
    pub fn nearest(&self, w: ExtendedComplex) -> (f64, ExtendedComplex) {
        let (_, i) = self
            .tree
            .nearest(w.to_sphere())
            .expect("boundary nets are never empty");
        let p = self.points[i];
        (chordal_distance(w, p), p)
    }
}

/// Spherical distance from `w` to a boundary net, with its net uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetDistance {
    pub value: f64,
    pub uncertainty: f64,
}

/// `dist_σ(w, ∂D)` measured against a δ-net of `∂D`. The sampled value never
/// underestimates the true distance by more than the reported uncertainty and
/// never overestimates it by more than `(π/2) δ`.
pub fn dist_sigma_to_boundary(w: ExtendedComplex, boundary: &BoundaryNet) -> Result<NetDistance> {
    if boundary.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let (chi, _) = boundary.nearest(w);
    Ok(NetDistance {
        value: chord_to_arc(chi),
        uncertainty: boundary.uncertainty(),
    })
}

/// Upper bound of the sandwich `σ ≤ (π/2) χ`.
pub fn sandwich_upper(chi: f64) -> f64 {
    FRAC_PI_2 * chi
}

/// Stereographic pullback of the shorter great-circle arc from `z` to `w`,
/// sampled at `n` equal arc steps. Interior samples must avoid `∞`.
pub fn great_circle_path(z: ExtendedComplex, w: ExtendedComplex, n: usize) -> Result<PolylinePath> {
    let p = z.to_sphere();
    let q = w.to_sphere();
    let dot = (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]).clamp(-1.0, 1.0);
    let theta = dot.acos();
    if theta == 0.0 || n == 0 {
        return Err(Error::BadParameter("great circle between coincident points".into()));
    }
    // Unit tangent at p pointing toward q (any orthogonal vector when antipodal).
    let mut u = [q[0] - dot * p[0], q[1] - dot * p[1], q[2] - dot * p[2]];
    let mut m = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if m < 1e-12 {
        let e = if p[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let d = e[0] * p[0] + e[1] * p[1] + e[2] * p[2];
        u = [e[0] - d * p[0], e[1] - d * p[1], e[2] - d * p[2]];
        m = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    }
    let u = [u[0] / m, u[1] / m, u[2] / m];
    let mut vertices = Vec::with_capacity(n + 1);
    vertices.push(z);
    for i in 1..n {
        let t = theta * i as f64 / n as f64;
        let (s, c) = t.sin_cos();
        vertices.push(ExtendedComplex::from_sphere([
            c * p[0] + s * u[0],
            c * p[1] + s * u[1],
            c * p[2] + s * u[2],
        ]));
    }
    vertices.push(w);
    PolylinePath::new(vertices, vec![1; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AffineMap, SectorMap};
    use crate::quadrature::gauss_legendre_refined;

    fn c(re: f64, im: f64) -> ExtendedComplex {
        ExtendedComplex::finite(re, im)
    }
    const INF: ExtendedComplex = ExtendedComplex::Infinity;

    #[test]
    fn chordal_examples() {
        assert_eq!(chordal_distance(c(0.0, 0.0), INF), 2.0);
        assert_eq!(chordal_distance(c(0.3, -2.0), c(0.3, -2.0)), 0.0);
        assert_eq!(chordal_distance(INF, INF), 0.0);
        assert!((chordal_distance(c(1.0, 0.0), c(-1.0, 0.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn chordal_matches_sphere_embedding() {
        let pts = [c(0.0, 0.0), c(0.5, 0.2), c(-3.0, 4.0), c(1e8, -1e8), INF, c(1e-9, 0.0)];
        for &a in &pts {
            for &b in &pts {
                let (p, q) = (a.to_sphere(), b.to_sphere());
                let e = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                assert!((e - chordal_distance(a, b)).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn sphere_round_trip() {
        for &z in &[c(0.0, 0.0), c(0.5, -0.25), c(-7.0, 3.0), c(2e10, 1.0), INF] {
            let back = ExtendedComplex::from_sphere(z.to_sphere());
            assert!(chordal_distance(z, back) < 1e-14, "{z} -> {back}");
        }
    }

    #[test]
    fn spherical_examples() {
        assert_eq!(spherical_distance(c(2.0, 1.0), c(2.0, 1.0)), 0.0);
        // oracle: 2∫₀^∞ dt/(1+t²) along the ray
        let ray = gauss_legendre_refined(0.0, 1.0, 64, |s| 2.0 / ((1.0 - s).powi(2) + s * s));
        assert!((ray.value - PI).abs() < 1e-12);
        assert!((spherical_distance(c(0.0, 0.0), INF) - ray.value).abs() < 1e-12);
        assert!((spherical_distance(c(0.0, 0.0), c(1.0, 0.0)) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn huge_points_do_not_overflow() {
        let d = spherical_distance(c(1e200, 0.0), c(-1e200, 0.0));
        assert!(d.is_finite() && d < 1e-199);
        assert!(spherical_distance(c(1e300, 1e300), INF) > 0.0);
    }

    #[test]
    fn path_length_of_unit_segment() {
        let path = PolylinePath::segment(c(0.0, 0.0), c(1.0, 0.0), 4).unwrap();
        let l = spherical_path_length(&path, None).unwrap();
        // closed form 2 arctan(1)
        assert!((l.value - 2.0 * 1f64.atan()).abs() < 1e-12);
        assert!(l.error < 1e-9);
    }

    #[test]
    fn path_length_to_infinity() {
        let path = PolylinePath::segment(c(0.0, 0.0), INF, 16).unwrap();
        let l = spherical_path_length(&path, None).unwrap();
        assert!((l.value - PI).abs() < 1e-12);
        let path = PolylinePath::segment(INF, c(0.0, 2.0), 16).unwrap();
        let l = spherical_path_length(&path, None).unwrap();
        assert!((l.value - (PI - 2.0 * 2f64.atan())).abs() < 1e-12);
    }

    #[test]
    fn degenerate_segment_is_tiny() {
        let eps = 1e-9;
        let path = PolylinePath::segment(c(0.2, 0.1), c(0.2 + eps, 0.1), 1).unwrap();
        let l = spherical_path_length(&path, None).unwrap();
        assert!(l.value <= eps * 2.0);
        assert!(PolylinePath::segment(c(0.2, 0.1), c(0.2, 0.1), 1).is_err());
    }

    #[test]
    fn identity_map_matches_plain_length() {
        let id = AffineMap::identity();
        let path = PolylinePath::segment(c(0.0, 0.0), c(0.6, 0.3), 8).unwrap();
        let a = spherical_path_length(&path, None).unwrap();
        let b = spherical_path_length(&path, Some(&id)).unwrap();
        assert!((a.value - b.value).abs() < 1e-14);
    }

    #[test]
    fn mapped_path_outside_disk_is_rejected() {
        let id = AffineMap::identity();
        let path = PolylinePath::segment(c(0.0, 0.0), c(1.5, 0.0), 4).unwrap();
        assert!(matches!(
            spherical_path_length(&path, Some(&id)),
            Err(Error::NonFiniteIntegrand(_))
        ));
    }

    #[test]
    fn spherical_derivative_examples() {
        let id = AffineMap::identity();
        assert_eq!(spherical_derivative(&id, c(0.0, 0.0)).unwrap(), 2.0);
        let half_plane = SectorMap::new(PI).unwrap();
        assert!((spherical_derivative(&half_plane, c(0.0, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            spherical_derivative(&id, c(1.0, 0.0)),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn net_distance_examples() {
        let n = 4096;
        let circle: Vec<_> = (0..n)
            .map(|j| ExtendedComplex::from(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)))
            .collect();
        let delta = chordal_distance(circle[0], circle[1]);
        let net = BoundaryNet::new(circle, delta).unwrap();
        let d0 = dist_sigma_to_boundary(c(0.0, 0.0), &net).unwrap();
        assert!((d0.value - FRAC_PI_2).abs() < 1e-14);
        assert!((d0.uncertainty - NET_UNCERTAINTY_FACTOR * delta).abs() < 1e-18);
        let dinf = dist_sigma_to_boundary(INF, &net).unwrap();
        assert!((dinf.value - FRAC_PI_2).abs() < 1e-14);
        let on = dist_sigma_to_boundary(net.points()[17], &net).unwrap();
        assert_eq!(on.value, 0.0);
        assert!(matches!(BoundaryNet::new(vec![], 0.1), Err(Error::EmptyBoundary)));
    }
}
