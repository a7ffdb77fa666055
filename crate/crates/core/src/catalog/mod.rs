//! Explicit conformal maps of the unit disk onto unbounded model domains.
//!
//! Every entry pairs a [`ConformalMap`] with an analytic description of the
//! image: boundary pieces (rays and lines), a membership test, the Euclidean
//! distance to the boundary and, where known, the Hölder exponent and Hardy
//! number of the domain.

mod maps;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::riemann_sphere::{chordal_distance, BoundaryNet, ExtendedComplex};

pub use maps::{AffineMap, ConformalMap, KoebeMap, SectorMap, StripMap};

/// Ground-truth value attached to a catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KnownValue {
    Finite { value: f64, provenance: String },
    /// Explicitly infinite; never encoded as a large number.
    Infinite { provenance: String },
    Absent { provenance: String },
}

impl KnownValue {
    fn finite(value: f64, provenance: &str) -> Self {
        Self::Finite {
            value,
            provenance: provenance.into(),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite { .. })
    }

    pub fn provenance(&self) -> &str {
        match self {
            Self::Finite { provenance, .. } | Self::Infinite { provenance } | Self::Absent { provenance } => {
                provenance
            }
        }
    }
}

impl fmt::Display for KnownValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite { value, .. } => write!(f, "{value}"),
            Self::Infinite { .. } => write!(f, "inf"),
            Self::Absent { .. } => write!(f, "none"),
        }
    }
}

/// One straight piece of an unbounded boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPiece {
    /// `{origin + t e^{i angle} : t ≥ 0}`
    Ray { origin: Complex64, angle: f64 },
    /// `{point + t e^{i angle} : t ∈ ℝ}`
    Line { point: Complex64, angle: f64 },
}

impl BoundaryPiece {
    /// Euclidean distance from `w` to the piece.
    pub fn distance(&self, w: Complex64) -> f64 {
        match *self {
            Self::Ray { origin, angle } => {
                let u = Complex64::from_polar(1.0, angle);
                let v = (w - origin) * u.conj();
                if v.re > 0.0 {
                    v.im.abs()
                } else {
                    v.norm()
                }
            }
            Self::Line { point, angle } => {
                let u = Complex64::from_polar(1.0, angle);
                ((w - point) * u.conj()).im.abs()
            }
        }
    }

    /// Samples along the piece. Consecutive samples are at most `step(p)`
    /// apart; a ray is additionally refined geometrically toward its origin
    /// with ratio `1 + corner_ratio`. Marching stops once `|p| > far`.
    pub fn march<F: Fn(Complex64) -> f64>(&self, step: F, corner_ratio: f64, far: f64) -> Vec<Complex64> {
        const CORNER_FLOOR: f64 = 1e-10;
        let walk = |base: Complex64, u: Complex64, corner: bool, out: &mut Vec<Complex64>| {
            let mut t = 0.0f64;
            loop {
                let p = base + u * t;
                if p.norm() > far {
                    break;
                }
                let mut h = step(p);
                if corner {
                    h = h.min((corner_ratio * t).max(CORNER_FLOOR));
                }
                t += h;
                out.push(base + u * t);
            }
        };
        match *self {
            Self::Ray { origin, angle } => {
                let mut out = vec![origin];
                walk(origin, Complex64::from_polar(1.0, angle), true, &mut out);
                out
            }
            Self::Line { point, angle } => {
                let u = Complex64::from_polar(1.0, angle);
                let mut back = Vec::new();
                walk(point, -u, false, &mut back);
                back.reverse();
                back.push(point);
                walk(point, u, false, &mut back);
                back
            }
        }
    }
}

/// Analytic description of a catalog image domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    /// `{|Arg(w − offset)| < θ/2}`
    Sector { theta: f64, offset: Complex64 },
    /// `ℂ ∖ (−∞, −1/4]`
    Koebe,
    /// `{|Im w| < π/2}`
    Strip,
}

/// An unbounded simply connected domain given by its Riemann map.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    name: String,
    kind: DomainKind,
    map: Arc<dyn ConformalMap>,
    pieces: Vec<BoundaryPiece>,
    known_alpha: KnownValue,
    known_hardy: KnownValue,
}

// Geometric refinement of boundary nets toward corners and slit tips.
pub(crate) const CORNER_RATIO: f64 = 0.02;

impl DomainSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn map(&self) -> &dyn ConformalMap {
        self.map.as_ref()
    }

    pub fn map_arc(&self) -> Arc<dyn ConformalMap> {
        Arc::clone(&self.map)
    }

    pub fn pieces(&self) -> &[BoundaryPiece] {
        &self.pieces
    }

    pub fn known_alpha(&self) -> &KnownValue {
        &self.known_alpha
    }

    pub fn known_hardy(&self) -> &KnownValue {
        &self.known_hardy
    }

    /// `w₀ = f(0)`; finite for every catalog map.
    pub fn base_point(&self) -> Complex64 {
        self.map
            .base_point()
            .as_finite()
            .expect("catalog maps send 0 to a finite point")
    }

    pub fn contains(&self, w: Complex64) -> bool {
        match self.kind {
            DomainKind::Sector { theta, offset } => {
                let v = w - offset;
                if v.norm() == 0.0 {
                    return false;
                }
                if theta >= 2.0 * PI {
                    !(v.im == 0.0 && v.re < 0.0)
                } else {
                    v.arg().abs() < theta / 2.0
                }
            }
            DomainKind::Koebe => !(w.im == 0.0 && w.re <= -0.25),
            DomainKind::Strip => w.im.abs() < PI / 2.0,
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(Complex64::new(0.0, 0.0))
    }

    /// Euclidean distance from `w` to `∂D`.
    pub fn euclid_dist_to_boundary(&self, w: Complex64) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.distance(w))
            .fold(f64::INFINITY, f64::min)
    }

    /// `dist(0, ℂ ∖ D)`: zero when the origin lies outside the domain.
    pub fn dist_origin_to_complement(&self) -> f64 {
        if self.contains_origin() {
            self.euclid_dist_to_boundary(Complex64::new(0.0, 0.0))
        } else {
            0.0
        }
    }

    /// Finite boundary samples whose chordal spacing is at most about `delta`,
    /// together with the certified mesh (largest chordal gap between
    /// neighbours, including the final gap to ∞).
    pub fn boundary_samples(&self, delta: f64) -> Result<(Vec<Complex64>, f64)> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::BadParameter(format!("chordal mesh {delta} not in (0, 1)")));
        }
        // A Euclidean step h at p moves chordally by about 2h / (1 + |p|²).
        let step = |p: Complex64| 0.45 * delta * (1.0 + p.norm_sqr());
        let far = 2.0 / delta;
        let mut points = Vec::new();
        let mut mesh = 0.0f64;
        for piece in &self.pieces {
            let run = piece.march(step, CORNER_RATIO, far);
            for w in run.windows(2) {
                mesh = mesh.max(chordal_distance(w[0].into(), w[1].into()));
            }
            for end in [run[0], run[run.len() - 1]] {
                if end.norm() > far {
                    mesh = mesh.max(chordal_distance(end.into(), ExtendedComplex::Infinity));
                }
            }
            points.extend(run);
        }
        Ok((points, mesh))
    }

    /// Chordal δ-net of `∂D ∪ {∞}`.
    pub fn boundary_net(&self, delta: f64) -> Result<BoundaryNet> {
        let (samples, mesh) = self.boundary_samples(delta)?;
        let mut points: Vec<ExtendedComplex> = samples.into_iter().map(ExtendedComplex::Finite).collect();
        points.push(ExtendedComplex::Infinity);
        BoundaryNet::new(points, mesh)
    }
}

/// Sector `{|Arg w| < θ/2}`, `0 < θ ≤ 2π`.
pub fn make_sector(theta: f64) -> Result<DomainSpec> {
    make_translated_sector(theta, Complex64::new(0.0, 0.0))
}

/// Sector of opening `θ` with vertex at `offset`.
pub fn make_translated_sector(theta: f64, offset: Complex64) -> Result<DomainSpec> {
    let map = SectorMap::translated(theta, offset)?;
    let pieces = if theta >= 2.0 * PI {
        vec![BoundaryPiece::Ray { origin: offset, angle: PI }]
    } else {
        vec![
            BoundaryPiece::Ray { origin: offset, angle: theta / 2.0 },
            BoundaryPiece::Ray { origin: offset, angle: -theta / 2.0 },
        ]
    };
    let known_alpha = if theta < PI {
        KnownValue::finite(theta / PI, "sector of opening θ < π is θ/π-Hölder")
    } else {
        KnownValue::finite(1.0, "sector of opening θ ≥ π is 1-Hölder")
    };
    Ok(DomainSpec {
        name: map.name(),
        kind: DomainKind::Sector { theta, offset },
        map: Arc::new(map),
        pieces,
        known_alpha,
        known_hardy: KnownValue::finite(PI / theta, "sector Hardy number π/θ"),
    })
}

/// `ℂ ∖ (−∞, −1/4]`, the image of the Koebe function.
pub fn make_koebe() -> DomainSpec {
    DomainSpec {
        name: "koebe".into(),
        kind: DomainKind::Koebe,
        map: Arc::new(KoebeMap),
        pieces: vec![BoundaryPiece::Ray {
            origin: Complex64::new(-0.25, 0.0),
            angle: PI,
        }],
        known_alpha: KnownValue::finite(1.0, "affine image of the slit plane, a 1-Hölder domain"),
        known_hardy: KnownValue::finite(0.5, "affine image of the slit plane; Hardy number 1/2"),
    }
}

/// The strip `{|Im w| < π/2}`.
pub fn make_strip() -> DomainSpec {
    DomainSpec {
        name: "strip".into(),
        kind: DomainKind::Strip,
        map: Arc::new(StripMap),
        pieces: vec![
            BoundaryPiece::Line {
                point: Complex64::new(0.0, PI / 2.0),
                angle: 0.0,
            },
            BoundaryPiece::Line {
                point: Complex64::new(0.0, -PI / 2.0),
                angle: 0.0,
            },
        ],
        known_alpha: KnownValue::Absent {
            provenance: "no α: σ(f(t), ∞) decays logarithmically".into(),
        },
        known_hardy: KnownValue::Infinite {
            provenance: "exponential growth of the strip map; every H^p".into(),
        },
    }
}

/// Largest excess over 2π accepted (and clamped) by [`parse_domain`].
pub const OPENING_ROUNDING: f64 = 1e-4;

/// Resolves a catalog name: `sector:<θ>`, `sector:<θ>:offset=<re>,<im>`,
/// `koebe` or `strip`.
pub fn parse_domain(name: &str) -> Result<DomainSpec> {
    let unknown = || Error::UnknownDomain(name.to_string());
    let name = name.trim();
    match name {
        "koebe" => return Ok(make_koebe()),
        "strip" => return Ok(make_strip()),
        _ => {}
    }
    let rest = name.strip_prefix("sector:").ok_or_else(unknown)?;
    let mut parts = rest.splitn(2, ':');
    let mut theta: f64 = parts.next().ok_or_else(unknown)?.parse().map_err(|_| unknown())?;
    // Openings written to a few decimals may round up past 2π.
    if theta > 2.0 * PI && theta <= 2.0 * PI + OPENING_ROUNDING {
        theta = 2.0 * PI;
    }
    let offset = match parts.next() {
        None => Complex64::new(0.0, 0.0),
        Some(o) => {
            let o = o.strip_prefix("offset=").ok_or_else(unknown)?;
            let (re, im) = o.split_once(',').ok_or_else(unknown)?;
            Complex64::new(re.parse().map_err(|_| unknown())?, im.parse().map_err(|_| unknown())?)
        }
    };
    make_translated_sector(theta, offset)
}

/// Openings of the sector family used throughout the checks.
pub fn standard_sector_angles() -> [f64; 6] {
    [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI, 1.5 * PI, 2.0 * PI]
}

/// The full catalog: six sectors, Koebe, strip and a translated sector.
pub fn standard_catalog() -> Vec<DomainSpec> {
    let mut out: Vec<DomainSpec> = standard_sector_angles()
        .iter()
        .map(|&t| make_sector(t).expect("valid opening"))
        .collect();
    out.push(make_koebe());
    out.push(make_strip());
    out.push(make_translated_sector(PI / 2.0, Complex64::new(5.0, 0.0)).expect("valid opening"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::DiskPoint;

    #[test]
    fn sector_examples() {
        let half = make_sector(PI).unwrap();
        assert_eq!(half.known_hardy().value(), Some(1.0));
        let quarter = make_sector(PI / 2.0).unwrap();
        assert_eq!(quarter.known_alpha().value(), Some(0.5));
        assert_eq!(quarter.known_hardy().value(), Some(2.0));
        assert!(make_sector(0.0).is_err());
    }

    #[test]
    fn koebe_boundary_distance() {
        let k = make_koebe();
        assert_eq!(k.base_point(), Complex64::new(0.0, 0.0));
        assert_eq!(k.euclid_dist_to_boundary(k.base_point()), 0.25);
        assert!(k.contains_origin());
    }

    #[test]
    fn strip_flags() {
        let s = make_strip();
        assert!(s.known_hardy().is_infinite());
        assert!(s.known_alpha().value().is_none());
        assert_eq!(s.base_point(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn translated_sector_excludes_origin() {
        let d = make_translated_sector(PI / 2.0, Complex64::new(5.0, 0.0)).unwrap();
        assert!(!d.contains_origin());
        assert!(make_translated_sector(PI / 2.0, Complex64::new(-5.0, 0.0)).unwrap().contains_origin());
        assert_eq!(d.dist_origin_to_complement(), 0.0);
        assert_eq!(d.known_hardy(), make_sector(PI / 2.0).unwrap().known_hardy());
    }

    #[test]
    fn names_round_trip() {
        for d in standard_catalog() {
            let again = parse_domain(d.name()).unwrap();
            assert_eq!(again.name(), d.name());
            assert_eq!(again.kind(), d.kind());
        }
        assert!(matches!(parse_domain("disk"), Err(Error::UnknownDomain(_))));
        assert!(matches!(parse_domain("sector:abc"), Err(Error::UnknownDomain(_))));
        assert_eq!(parse_domain("sector:6.2832").unwrap().name(), make_sector(2.0 * PI).unwrap().name());
        assert!(parse_domain("sector:6.284").is_err());
        let d = parse_domain("sector:1.5708:offset=-5,0").unwrap();
        assert_eq!(d.base_point(), Complex64::new(-4.0, 0.0));
    }

    #[test]
    fn images_lie_in_their_domains() {
        for d in standard_catalog() {
            for k in 0..200 {
                let z = Complex64::from_polar(0.999 * (k as f64 / 200.0), k as f64 * 0.7);
                let w = d.map().eval(&DiskPoint::new(z).unwrap()).as_finite().unwrap();
                assert!(d.contains(w), "{} at {z}", d.name());
                assert!(d.euclid_dist_to_boundary(w) > 0.0);
            }
        }
    }

    #[test]
    fn boundary_net_is_a_chordal_net() {
        for d in standard_catalog() {
            let net = d.boundary_net(1e-2).unwrap();
            assert!(net.delta() <= 1e-2, "{}: {}", d.name(), net.delta());
            // Points on the boundary pieces lie within δ of the net.
            for piece in d.pieces() {
                for k in -200..200 {
                    let t = (k as f64 * 0.07).sinh();
                    let p = match *piece {
                        BoundaryPiece::Ray { origin, angle } => origin + Complex64::from_polar(t.abs(), angle),
                        BoundaryPiece::Line { point, angle } => point + Complex64::from_polar(t, angle),
                    };
                    let (chi, _) = net.nearest(p.into());
                    assert!(chi <= net.delta(), "{} at {p}: {chi} vs {}", d.name(), net.delta());
                }
            }
        }
    }

    #[test]
    fn dist_from_base_point() {
        // distance from 1 to the imaginary axis
        let d = make_sector(PI).unwrap();
        assert!((d.euclid_dist_to_boundary(d.base_point()) - 1.0).abs() < 1e-15);
        let q = make_sector(PI / 2.0).unwrap();
        assert!((q.euclid_dist_to_boundary(q.base_point()) - (PI / 4.0).sin()).abs() < 1e-15);
    }
}
