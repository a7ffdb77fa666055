//! Reduction of an unbounded domain to a bounded one.
//!
//! With `r = dist(w0, ∂D)/2` the map `g(w) = r/(w − w0)` sends `D` onto a
//! domain `D′ ∋ ∞` whose finite boundary `g(∂D) ∪ {0}` lies in the closed
//! disk of radius 1/2. Cutting at `|z| = 4` gives the bounded domain
//! `D₀ = D′ ∩ D(0, 4)`. The checks here compare distances, densities and
//! quasi-hyperbolic growth across the reduction.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{BoundaryPiece, ConformalMap, DomainSpec};
use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::holder::scan_spherical_derivative;
use crate::hyperbolic::{hyperbolic_distance_disk, GridRegion, HyperbolicPoint, QhField};
use crate::kdtree::KdTree;
use crate::riemann_sphere::{chordal_distance, dist_sigma_to_boundary, BoundaryNet, ExtendedComplex};

/// Radius of the cut circle.
pub const CUT_RADIUS: f64 = 4.0;
/// Lower bound for `λ_{D′} δ_{D′}` on `D₀`.
pub const DENSITY_BOUND: f64 = 1.0 / 300.0;
/// Largest relative change of `c₂` between two depths for a stable envelope.
pub const QH_STABILITY: f64 = 0.15;
/// Base cell of the `D₀` grid over `[−4, 4]²`.
pub const QH_BASE_CELL: f64 = 0.5;
/// Width of the `x` bins of the quasi-hyperbolic envelope.
pub const QH_BIN_WIDTH: f64 = 0.25;

/// `h = g ∘ f` with `g(w) = r/(w − w0)`.
#[derive(Debug, Clone)]
pub struct ReductionMap {
    f: Arc<dyn ConformalMap>,
    w0: Complex64,
    r: f64,
}

impl ReductionMap {
    fn offset(&self, p: &DiskPoint) -> ExtendedComplex {
        match self.f.eval(p) {
            ExtendedComplex::Finite(v) => ExtendedComplex::Finite(v - self.w0),
            ExtendedComplex::Infinity => ExtendedComplex::Infinity,
        }
    }
}

impl ConformalMap for ReductionMap {
    fn name(&self) -> String {
        format!("reduction({})", self.f.name())
    }

    fn eval(&self, p: &DiskPoint) -> ExtendedComplex {
        match self.offset(p) {
            ExtendedComplex::Infinity => ExtendedComplex::finite(0.0, 0.0),
            ExtendedComplex::Finite(u) if u.norm() == 0.0 => ExtendedComplex::Infinity,
            ExtendedComplex::Finite(u) => ExtendedComplex::from(Complex64::new(self.r, 0.0) / u),
        }
    }

    fn deriv(&self, p: &DiskPoint) -> Complex64 {
        match self.offset(p) {
            ExtendedComplex::Finite(u) => -self.f.deriv(p) * self.r / (u * u),
            ExtendedComplex::Infinity => Complex64::new(0.0, 0.0),
        }
    }

    fn inverse(&self, w: ExtendedComplex) -> Result<Complex64> {
        let pre = match w {
            ExtendedComplex::Infinity => ExtendedComplex::Finite(self.w0),
            ExtendedComplex::Finite(z) if z.norm() == 0.0 => ExtendedComplex::Infinity,
            ExtendedComplex::Finite(z) => ExtendedComplex::Finite(self.w0 + self.r / z),
        };
        self.f.inverse(pre)
    }

    fn has_inverse(&self) -> bool {
        self.f.has_inverse()
    }

    // With u = f − w0: h# = 2|f′/r| / (1 + |u/r|²), finite even where h = ∞.
    fn spherical_derivative_at(&self, p: &DiskPoint) -> f64 {
        match self.offset(p) {
            ExtendedComplex::Finite(u) => {
                let q = u.norm() / self.r;
                2.0 * (self.f.deriv(p).norm() / self.r) / (1.0 + q * q)
            }
            ExtendedComplex::Infinity => 0.0,
        }
    }
}

/// Euclidean net of the finite boundary of `D′`: `g(∂D) ∪ {0}`.
#[derive(Debug, Clone)]
pub struct PlanarNet {
    points: Vec<Complex64>,
    delta: f64,
    tree: KdTree,
}

impl PlanarNet {
    fn new(points: Vec<Complex64>, delta: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        let coords: Vec<[f64; 3]> = points.iter().map(|p| [p.re, p.im, 0.0]).collect();
        let tree = KdTree::new(&coords);
        Ok(Self { points, delta, tree })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Largest gap between neighbouring samples; bounds the overestimate of
    /// every distance measured against the net.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.tree
            .nearest([z.re, z.im, 0.0])
            .map(|(d, _)| d)
            .expect("planar nets are never empty")
    }
}

/// The reduction of a catalog domain.
#[derive(Debug, Clone)]
pub struct ReductionSpec {
    source: DomainSpec,
    w0: Complex64,
    r: f64,
    map: Arc<ReductionMap>,
    net: Arc<PlanarNet>,
    region: GridRegion,
    anchor: Complex64,
}

/// Mesh of the `g(∂D)` net used by [`build_reduction`].
pub const DEFAULT_PLANAR_MESH: f64 = 2e-5;

pub fn build_reduction(domain: &DomainSpec) -> Result<ReductionSpec> {
    build_reduction_with_mesh(domain, DEFAULT_PLANAR_MESH)
}

pub fn build_reduction_with_mesh(domain: &DomainSpec, planar_mesh: f64) -> Result<ReductionSpec> {
    let w0 = domain.base_point();
    let dist = domain.euclid_dist_to_boundary(w0);
    if !(dist.is_finite() && dist > 0.0) {
        return Err(Error::DegenerateBoundary);
    }
    if !(planar_mesh > 0.0 && planar_mesh < 0.1) {
        return Err(Error::BadParameter(format!("planar mesh {planar_mesh}")));
    }
    let r = dist / 2.0;
    let g = move |w: Complex64| Complex64::new(r, 0.0) / (w - w0);

    // March in the w-plane so that consecutive images are about
    // `planar_mesh` apart: |g′(w)| = r/|w − w0|².
    let step = |p: Complex64| 0.9 * planar_mesh * (p - w0).norm_sqr() / r;
    let far = w0.norm() + 2.0 * r / planar_mesh;
    let mut points = Vec::new();
    let mut delta = 0.0f64;
    for piece in domain.pieces() {
        let run: Vec<Complex64> = piece.march(step, crate::catalog::CORNER_RATIO, far).into_iter().map(g).collect();
        for w in run.windows(2) {
            delta = delta.max((w[1] - w[0]).norm());
        }
        delta = delta.max(run[run.len() - 1].norm());
        if matches!(piece, BoundaryPiece::Line { .. }) {
            delta = delta.max(run[0].norm());
        }
        points.extend(run);
    }
    points.push(Complex64::new(0.0, 0.0));
    let net = Arc::new(PlanarNet::new(points, delta)?);

    let src = domain.clone();
    let net_m = Arc::clone(&net);
    let member = move |z: Complex64| {
        z.norm() < CUT_RADIUS && z.norm() > 0.0 && src.contains(w0 + Complex64::new(r, 0.0) / z)
    };
    let member_d = member.clone();
    let dist_fn = move |z: Complex64| {
        if !member_d(z) {
            return 0.0;
        }
        (net_m.distance(z).min(CUT_RADIUS - z.norm()) - net_m.delta()).max(0.0)
    };
    let region = GridRegion::new(
        Complex64::new(-CUT_RADIUS, -CUT_RADIUS),
        Complex64::new(CUT_RADIUS, CUT_RADIUS),
        QH_BASE_CELL,
        member,
        dist_fn,
    )?;

    // Anchor: deepest point of the real segment [1.5, 3.5].
    let mut anchor = None;
    let mut best = 0.0;
    for j in 0..=200 {
        let z = Complex64::new(1.5 + 0.01 * j as f64, 0.0);
        let d = region.boundary_distance(z);
        if d > best {
            best = d;
            anchor = Some(z);
        }
    }
    let anchor = anchor.ok_or(Error::DegenerateBoundary)?;

    Ok(ReductionSpec {
        source: domain.clone(),
        w0,
        r,
        map: Arc::new(ReductionMap {
            f: domain.map_arc(),
            w0,
            r,
        }),
        net,
        region,
        anchor,
    })
}

impl ReductionSpec {
    pub fn source(&self) -> &DomainSpec {
        &self.source
    }

    pub fn w0(&self) -> Complex64 {
        self.w0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `g(w) = r/(w − w0)` on the sphere.
    pub fn g(&self, w: ExtendedComplex) -> ExtendedComplex {
        match w {
            ExtendedComplex::Infinity => ExtendedComplex::finite(0.0, 0.0),
            ExtendedComplex::Finite(v) if v == self.w0 => ExtendedComplex::Infinity,
            ExtendedComplex::Finite(v) => ExtendedComplex::from(Complex64::new(self.r, 0.0) / (v - self.w0)),
        }
    }

    /// `h = g ∘ f`.
    pub fn map(&self) -> &ReductionMap {
        &self.map
    }

    pub fn planar_net(&self) -> &PlanarNet {
        &self.net
    }

    pub fn region(&self) -> &GridRegion {
        &self.region
    }

    /// `z* ∈ D₀ ∖ 𝔻̄`.
    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    pub fn in_d0(&self, z: Complex64) -> bool {
        self.region.contains(z)
    }

    /// `δ_{D′}(z)`: distance to `g(∂D) ∪ {0}`.
    pub fn delta_d_prime(&self, z: Complex64) -> f64 {
        self.net.distance(z)
    }

    /// `δ_{D₀}(z) = min(δ_{D′}(z), 4 − |z|)`.
    pub fn delta_d0(&self, z: Complex64) -> f64 {
        self.net.distance(z).min(CUT_RADIUS - z.norm())
    }

    /// `max |g(w)|` over the boundary samples.
    pub fn max_boundary_image(&self) -> f64 {
        self.net.points().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Hyperbolic distance in `D′` through `h⁻¹`.
    pub fn hyperbolic_distance_d_prime(&self, z1: Complex64, z2: Complex64) -> Result<f64> {
        let a = HyperbolicPoint::new(self.map.inverse(ExtendedComplex::Finite(z1))?)?;
        let b = HyperbolicPoint::new(self.map.inverse(ExtendedComplex::Finite(z2))?)?;
        Ok(hyperbolic_distance_disk(a, b))
    }

    /// Spherical net of `∂D′` built from the planar samples.
    pub fn spherical_net(&self) -> Result<BoundaryNet> {
        let pts = self.net.points();
        let mut delta = 0.0f64;
        for w in pts.windows(2) {
            let (a, b) = (ExtendedComplex::Finite(w[0]), ExtendedComplex::Finite(w[1]));
            // Pieces are stored one after another; jumps between pieces are
            // bounded by the gap to 0 closing each piece.
            delta = delta.max(chordal_distance(a, b).min(2.0 * self.net.delta()));
        }
        BoundaryNet::new(pts.iter().map(|&p| ExtendedComplex::Finite(p)).collect(), delta)
    }
}

/// The three cases of the fraction bounds `(r² + |w − w0|²)/(r(1 + |w|²))`.
pub fn fraction_envelope(r: f64, w0: Complex64, w: Complex64) -> (f64, f64) {
    let a = w0.norm();
    if a == 0.0 {
        (r.min(1.0).powi(2) / r, r.max(1.0).powi(2) / r)
    } else if r / (r + 1.0) * w.norm() > a {
        (
            r.min(1.0 / (r + 1.0)).powi(2) / r,
            r.max((2.0 * r + 1.0) / (r + 1.0)).powi(2) / r,
        )
    } else {
        (
            r / (1.0 + ((r + 1.0) / r).powi(2) * a * a),
            (r * r + ((2.0 * r + 1.0) / r).powi(2) * a * a) / r,
        )
    }
}

pub fn fraction(r: f64, w0: Complex64, w: Complex64) -> f64 {
    (r * r + (w - w0).norm_sqr()) / (r * (1.0 + w.norm_sqr()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparability {
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub samples: usize,
    /// Samples whose ratio the nets cannot resolve (relative uncertainty
    /// above [`RESOLVED_RATIO_UNCERTAINTY`]); they enter only the fraction check.
    pub unresolved: usize,
    pub envelope_violations: usize,
    /// Largest relative uncertainty among the resolved ratios.
    pub net_uncertainty: f64,
}

pub const RESOLVED_RATIO_UNCERTAINTY: f64 = 0.5;

fn stratified_disk_points(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let eps = 0.5f64.powi(rng.gen_range(0..=16)) * rng.gen_range(0.5..1.0);
            let angle = match rng.gen_range(0..3) {
                0 => 10f64.powf(rng.gen_range(-8.0..0.0)) * if rng.gen::<bool>() { 1.0 } else { -1.0 },
                1 => PI - 10f64.powf(rng.gen_range(-8.0..0.0)) * if rng.gen::<bool>() { 1.0 } else { -1.0 },
                _ => rng.gen_range(-PI..PI),
            };
            Complex64::from_polar(1.0 - eps, angle)
        })
        .collect()
}

/// Ratios `dist_σ(g(w), ∂D′)/dist_σ(w, ∂D)` over seeded samples `w = f(z)`.
pub fn check_distance_comparability(red: &ReductionSpec, n_samples: usize, mesh: f64, seed: u64) -> Result<Comparability> {
    let net_d = red.source.boundary_net(mesh)?;
    let net_dp = red.spherical_net()?;
    let map = red.source.map();
    let pts = stratified_disk_points(n_samples, seed);
    let rows: Vec<Result<(f64, bool, f64)>> = pts
        .par_iter()
        .map(|&z| {
            let w = map.eval(&DiskPoint::new(z)?);
            let wf = w.as_finite().ok_or_else(|| Error::NonFinite(format!("f({z})")))?;
            let a = dist_sigma_to_boundary(w, &net_d)?;
            let b = dist_sigma_to_boundary(red.g(w), &net_dp)?;
            let (lo, hi) = fraction_envelope(red.r, red.w0, wf);
            let fr = fraction(red.r, red.w0, wf);
            let ok = fr >= lo * (1.0 - 1e-12) && fr <= hi * (1.0 + 1e-12);
            let rel = a.uncertainty / a.value + b.uncertainty / b.value;
            Ok((b.value / a.value, ok, rel))
        })
        .collect();
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    let mut bad = 0;
    let mut unresolved = 0;
    let mut unc = 0.0f64;
    for row in rows {
        let (ratio, ok, rel) = row?;
        bad += usize::from(!ok);
        if rel > RESOLVED_RATIO_UNCERTAINTY {
            unresolved += 1;
            continue;
        }
        c1 = c1.min(ratio);
        c2 = c2.max(ratio);
        unc = unc.max(rel);
    }
    Ok(Comparability {
        c1_hat: c1,
        c2_hat: c2,
        samples: n_samples,
        unresolved,
        envelope_violations: bad,
        net_uncertainty: unc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCheck {
    pub min_product: f64,
    /// `λ_{D′} · (net mesh)` at the minimizing sample.
    pub uncertainty: f64,
    pub argmin: [f64; 2],
    pub samples: usize,
    pub pass: bool,
}

/// `min λ_{D′}(h(z)) δ_{D′}(h(z))` over a polar grid of `z` with `h(z) ∈ D₀`:
/// inner radii `0.005..0.5` and the annuli `1 − 2^{−k}`, `k = 1..=depth`.
pub fn check_density_bound(red: &ReductionSpec, depth: u32) -> Result<DensityCheck> {
    let mut zs: Vec<DiskPoint> = Vec::new();
    for j in 0..=24 {
        let rad = 0.005 * 100f64.powf(j as f64 / 24.0);
        for a in 0..256 {
            zs.push(DiskPoint::new(Complex64::from_polar(rad, 2.0 * PI * a as f64 / 256.0))?);
        }
    }
    for k in 1..=depth {
        let n = 1usize << (k + 3);
        for a in 0..n {
            zs.push(DiskPoint::polar(2.0 * PI * a as f64 / n as f64, 0.5f64.powi(k as i32))?);
        }
    }
    let map = red.map.as_ref();
    let u = red.net.delta();
    let rows: Vec<Result<Option<(f64, f64, Complex64)>>> = zs
        .par_iter()
        .map(|p| {
            let y = match map.eval(p).as_finite() {
                Some(y) if y.norm() < CUT_RADIUS => y,
                _ => return Ok(None),
            };
            let d = map.deriv(p).norm();
            if d == 0.0 || !d.is_finite() {
                return Err(Error::ZeroDerivative(format!("{}", p.z())));
            }
            let rad = p.z().norm();
            let eps = p.one_minus_abs();
            let lambda = 2.0 / (eps * (1.0 + rad)) / d;
            Ok(Some((lambda * red.delta_d_prime(y), lambda * u, y)))
        })
        .collect();
    let mut best = (f64::INFINITY, 0.0, Complex64::new(0.0, 0.0));
    let mut count = 0;
    for row in rows {
        if let Some(v) = row? {
            count += 1;
            if v.0 < best.0 {
                best = v;
            }
        }
    }
    Ok(DensityCheck {
        min_product: best.0,
        uncertainty: best.1,
        argmin: [best.2.re, best.2.im],
        samples: count,
        pass: best.0 >= DENSITY_BOUND - best.1,
    })
}

/// One emitted sample of the quasi-hyperbolic envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QhSample {
    pub z: [f64; 2],
    pub x: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QhLevel {
    pub depth: u32,
    pub cell: f64,
    pub c1: f64,
    pub c2: f64,
    pub eligible: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QhHolderCheck {
    pub anchor: [f64; 2],
    pub coarse: QhLevel,
    pub fine: QhLevel,
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub relative_change: f64,
    pub pass: bool,
    pub samples: Vec<QhSample>,
}

fn qh_level(red: &ReductionSpec, depth: u32, n_samples: usize) -> Result<(QhLevel, Vec<QhSample>)> {
    let field = QhField::compute(&red.region, red.anchor, depth)?;
    let cell = field.cell();
    let d_star = red.region.boundary_distance(red.anchor);
    let pts: Vec<(Complex64, f64, f64)> = field
        .nodes()
        .filter(|&(_, d, _)| d >= 4.0 * cell)
        .map(|(z, d, k)| (z, (d_star / d).ln(), k))
        .collect();
    if pts.len() < 4 {
        return Err(Error::DisconnectedEndpoints);
    }
    let x_max = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let x_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let nbins = (((x_max - x_min) / QH_BIN_WIDTH).floor() as usize) + 1;
    let mut bins = vec![(0.0f64, 0usize, f64::NEG_INFINITY); nbins];
    for &(_, x, k) in &pts {
        let b = ((x - x_min) / QH_BIN_WIDTH) as usize;
        let e = &mut bins[b.min(nbins - 1)];
        e.0 += x;
        e.1 += 1;
        e.2 = e.2.max(k);
    }
    let (bx, bk): (Vec<f64>, Vec<f64>) = bins
        .iter()
        .filter(|b| b.1 > 0)
        .map(|b| (b.0 / b.1 as f64, b.2))
        .filter(|&(x, _)| x >= 0.5 * x_max)
        .unzip();
    let c2 = linear_fit(&bx, &bk).ok_or(Error::DisconnectedEndpoints)?.slope;
    let c1 = pts.iter().map(|&(_, x, k)| k - c2 * x).fold(f64::NEG_INFINITY, f64::max);
    let stride = (pts.len() / n_samples.max(1)).max(1);
    let samples = pts
        .iter()
        .step_by(stride)
        .take(n_samples)
        .map(|&(z, x, k)| QhSample { z: [z.re, z.im], x, k })
        .collect();
    Ok((
        QhLevel {
            depth,
            cell,
            c1,
            c2,
            eligible: pts.len(),
        },
        samples,
    ))
}

/// Envelope `k_{D₀}(z*, z) ≤ c₁ + c₂ log(δ(z*)/δ(z))` at grid depths
/// `depth − 1` and `depth`; stable when `c₂` moves less than
/// [`QH_STABILITY`]. All nodes at least four cells from `∂D₀` enter the fit;
/// `n_samples` caps the emitted rows.
pub fn check_qh_holder(red: &ReductionSpec, depth: u32, n_samples: usize) -> Result<QhHolderCheck> {
    if depth == 0 {
        return Err(Error::BadParameter("quasi-hyperbolic depth must be at least 1".into()));
    }
    let (coarse, _) = qh_level(red, depth - 1, 0)?;
    let (fine, samples) = qh_level(red, depth, n_samples)?;
    let relative_change = (fine.c2 - coarse.c2).abs() / coarse.c2.abs();
    Ok(QhHolderCheck {
        anchor: [red.anchor.re, red.anchor.im],
        c1_hat: fine.c1,
        c2_hat: fine.c2,
        relative_change,
        pass: relative_change < QH_STABILITY,
        coarse,
        fine,
        samples,
    })
}

/// `2k_{D₀}(z*, z) ≥ h_{D′}(z*, z)` on grid nodes, and
/// `k_{D₀}(z*, z) ≤ 1 + 4π + 300 h_{D′}(z*, z)` where `|z| ≤ 3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QhComparability {
    pub depth: u32,
    pub samples: usize,
    /// `min (2k − h + 2e)` with `e` the two-depth grid error.
    pub lower_slack: f64,
    /// `min (1 + 4π + 300h + e − k)` over `|z| ≤ 3`.
    pub upper_slack: f64,
    pub grid_error: f64,
    pub pass: bool,
}

pub fn check_qh_comparability(red: &ReductionSpec, depth: u32, n_samples: usize) -> Result<QhComparability> {
    if depth == 0 {
        return Err(Error::BadParameter("quasi-hyperbolic depth must be at least 1".into()));
    }
    let fine = QhField::compute(&red.region, red.anchor, depth)?;
    let coarse = QhField::compute(&red.region, red.anchor, depth - 1)?;
    let cell = fine.cell();
    let nodes: Vec<(Complex64, f64)> = fine
        .nodes()
        .filter(|&(_, d, _)| d >= 4.0 * cell)
        .map(|(z, _, k)| (z, k))
        .collect();
    let stride = (nodes.len() / n_samples.max(1)).max(1);
    let picked: Vec<(Complex64, f64)> = nodes.into_iter().step_by(stride).take(n_samples).collect();
    let rows: Vec<Result<(f64, f64, f64)>> = picked
        .par_iter()
        .map(|&(z, k)| {
            let e = (k - coarse.value_at(&red.region, z)?).abs();
            let h = red.hyperbolic_distance_d_prime(red.anchor, z)?;
            let lower = 2.0 * k - h + 2.0 * e;
            let upper = if z.norm() <= 3.0 {
                1.0 + 4.0 * PI + 300.0 * h + e - k
            } else {
                f64::INFINITY
            };
            Ok((lower, upper, e))
        })
        .collect();
    let (mut lower, mut upper, mut err) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for row in rows {
        let (l, u, e) = row?;
        lower = lower.min(l);
        upper = upper.min(u);
        err = err.max(e);
    }
    Ok(QhComparability {
        depth,
        samples: picked.len(),
        lower_slack: lower,
        upper_slack: upper,
        grid_error: err,
        pass: lower >= 0.0 && upper >= 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub unbounded_holder: bool,
    pub bounded_holder: bool,
    pub pass: bool,
    pub qh: QhHolderCheck,
}

/// Hölder classification of `D` (derivative scan at `scan_depth`) against
/// the quasi-hyperbolic classification of `D₀` (grid depth `qh_depth`).
pub fn check_equivalence(domain: &DomainSpec, scan_depth: u32, qh_depth: u32) -> Result<EquivalenceCheck> {
    let unbounded_holder = scan_spherical_derivative(domain, scan_depth)?.alpha_hat.is_some();
    let red = build_reduction(domain)?;
    let qh = check_qh_holder(&red, qh_depth, 0)?;
    Ok(EquivalenceCheck {
        unbounded_holder,
        bounded_holder: qh.pass,
        pass: unbounded_holder == qh.pass,
        qh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_koebe, make_sector};

    #[test]
    fn half_plane_radius() {
        let red = build_reduction(&make_sector(PI).unwrap()).unwrap();
        assert!((red.r() - 0.5).abs() < 1e-15);
        assert!(red.anchor().norm() > 1.0 && red.in_d0(red.anchor()));
        // g(w0 + 2r e^{it}) lies on |z| = 1/2
        for k in 0..16 {
            let w = red.w0() + Complex64::from_polar(2.0 * red.r(), k as f64);
            let z = red.g(ExtendedComplex::Finite(w)).as_finite().unwrap();
            assert!((z.norm() - 0.5).abs() < 1e-15);
        }
        assert_eq!(red.g(ExtendedComplex::Infinity), ExtendedComplex::finite(0.0, 0.0));
    }

    #[test]
    fn boundary_images_stay_small() {
        let red = build_reduction(&make_koebe()).unwrap();
        assert!(red.max_boundary_image() <= 0.5 + 1e-12);
    }

    #[test]
    fn reduction_map_derivative() {
        let red = build_reduction(&make_sector(PI / 2.0).unwrap()).unwrap();
        let h = red.map();
        let z = Complex64::new(0.3, -0.4);
        let e = 1e-6;
        let fd = (h.eval_at(z + e).as_finite().unwrap() - h.eval_at(z - e).as_finite().unwrap()) / (2.0 * e);
        assert!((fd - h.deriv_at(z)).norm() < 1e-6 * h.deriv_at(z).norm());
        let back = h.inverse(h.eval_at(z)).unwrap();
        assert!((back - z).norm() < 1e-10);
    }

    #[test]
    fn envelope_cases() {
        let (lo, hi) = fraction_envelope(0.5, Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0));
        assert_eq!((lo, hi), (0.5, 2.0));
        let red = build_reduction(&make_sector(PI).unwrap()).unwrap();
        let c = check_distance_comparability(&red, 2000, 1e-3, 1).unwrap();
        assert_eq!(c.envelope_violations, 0);
        assert!(c.c1_hat > 0.0 && c.c2_hat.is_finite());
        assert!(c.unresolved < c.samples);
    }

    #[test]
    fn ratio_tends_to_r_far_out() {
        let d = make_sector(PI).unwrap();
        let red = build_reduction(&d).unwrap();
        let net = d.boundary_net(1e-4).unwrap();
        let snet = red.spherical_net().unwrap();
        for x in [1e2, 1e3] {
            let w = ExtendedComplex::finite(x, 0.0);
            let a = dist_sigma_to_boundary(w, &net).unwrap().value;
            let b = dist_sigma_to_boundary(red.g(w), &snet).unwrap().value;
            assert!((b / a / red.r() - 1.0).abs() < 0.05, "{x}: {}", b / a);
        }
    }

    #[test]
    fn qh_comparability_on_the_half_plane() {
        let red = build_reduction(&make_sector(PI).unwrap()).unwrap();
        let c = check_qh_comparability(&red, 4, 500).unwrap();
        assert!(c.pass, "{c:?}");
        assert!(c.samples > 100);
    }

    #[test]
    fn conformal_invariance_across_the_reduction() {
        let d = make_koebe();
        let red = build_reduction(&d).unwrap();
        for (a, b) in [(0.1, 0.7), (-0.3, 0.95)] {
            let (za, zb) = (Complex64::new(a, 0.2), Complex64::new(b, -0.1));
            let wa = d.map().eval_at(za);
            let wb = d.map().eval_at(zb);
            let direct = crate::hyperbolic::hyperbolic_distance_domain(d.map(), wa, wb).unwrap();
            let (ya, yb) = (red.g(wa).as_finite().unwrap(), red.g(wb).as_finite().unwrap());
            let pushed = red.hyperbolic_distance_d_prime(ya, yb).unwrap();
            assert!((direct - pushed).abs() < 1e-8);
        }
    }

    #[test]
    fn unit_disk_density_sanity() {
        for k in 1..12 {
            let rad = 1.0 - 0.5f64.powi(k);
            let product = 2.0 / ((1.0 - rad) * (1.0 + rad)) * (1.0 - rad);
            assert!((1.0..=2.0).contains(&product));
        }
    }

    #[test]
    fn density_bound_on_the_half_plane() {
        let red = build_reduction(&make_sector(PI).unwrap()).unwrap();
        let d = check_density_bound(&red, 8).unwrap();
        assert!(d.pass, "{d:?}");
    }
}
