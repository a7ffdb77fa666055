//! Hölder exponent estimation for Riemann maps of unbounded domains.
//!
//! Three independent routes to the exponent are provided:
//!
//! * the growth of the spherical derivative toward the unit circle,
//!   `f#(z) ≤ M (1−|z|)^{α−1}` ([`scan_spherical_derivative`]);
//! * the pair condition `σ(f(z1), f(z2)) ≤ K |z1 − z2|^α`
//!   ([`check_holder_pairs`]);
//! * hyperbolic growth against the spherical boundary distance,
//!   `h_D(w0, w) ≤ C + (1/α) log(1/dist_σ(w, ∂D))`
//!   ([`check_hyperbolic_growth`], [`estimate_alpha_from_growth`],
//!   [`check_geodesic_conditions`]).
//!
//! Exponents come from upper envelopes on dyadic annuli `|z| = 1 − 2^{−k}`
//! fitted over the deepest half of the annuli.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::catalog::DomainSpec;
use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::fit::{linear_fit, log_corrected_slope};
use crate::quadrature::gauss_legendre_refined;
use crate::riemann_sphere::{dist_sigma_to_boundary, spherical_distance, ExtendedComplex};

/// A log-corrected exponent below this value is read as "no exponent".
pub const LOG_CORRECTED_FLOOR: f64 = 0.1;
/// Growth of a constant per unit of hyperbolic radius that counts as divergence.
pub const DIVERGENCE_RATE: f64 = 0.1;
/// Relative change between two depths below which a constant counts as stable.
pub const STABILITY_TOLERANCE: f64 = 0.1;
/// Radii `1 − 2^{−k}` stay representable through [`DiskPoint::polar`] far
/// beyond double precision of `|z|`.
pub const MAX_GEODESIC_DEPTH: u32 = 512;
/// Deepest radial stratum `1 − 2^{−k}` used by [`check_holder_pairs`].
pub const DEFAULT_PAIR_DEPTH: u32 = 20;

fn serialize_alpha<S: Serializer>(a: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match a {
        Some(v) => s.serialize_f64(*v),
        None => s.serialize_str("none"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderMethod {
    DerivativeScan,
    HyperbolicGrowth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub method: HolderMethod,
    pub depth: u32,
    /// First annulus of the fit window.
    pub window_start: u32,
    pub samples: u64,
    pub raw_slope: f64,
    /// Exponent before clamping to (0, 1].
    pub raw_alpha: f64,
    /// Exponent from the fit with an additional logarithmic term.
    pub log_corrected_alpha: Option<f64>,
    /// Exponent from the deepest quarter of annuli.
    pub quarter_alpha: Option<f64>,
    pub residual: f64,
}

/// One annulus of an envelope: `k`, hyperbolic radius, and the envelope value
/// (`max f#` for the scan, `min log(1/dist_σ)` for the growth estimator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub k: u32,
    pub h: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    #[serde(serialize_with = "serialize_alpha")]
    pub alpha_hat: Option<f64>,
    pub alpha_uncertainty: f64,
    pub m_hat: Option<f64>,
    pub k_hat: Option<f64>,
    pub c_hat: Option<ConditionConstants>,
    pub diagnostics: FitDiagnostics,
    pub envelope: Vec<EnvelopeRow>,
}

/// Hyperbolic radius of `|z| = 1 − eps`.
fn hyperbolic_radius(eps: f64) -> f64 {
    ((2.0 - eps) / eps).ln()
}

/// Points `(1 − 2^{−k}) e^{2πij/n}` with `n = 2^{k+3}`.
fn annulus_point(k: u32, j: usize) -> DiskPoint {
    let n = 1usize << (k + 3);
    let eps = 0.5f64.powi(k as i32);
    DiskPoint::polar(2.0 * PI * j as f64 / n as f64, eps).expect("annulus radius in (0, 1)")
}

fn annulus_size(k: u32) -> usize {
    1usize << (k + 3)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::BadAlpha(alpha))
    }
}

fn check_depth(depth: u32) -> Result<()> {
    if (4..=40).contains(&depth) {
        Ok(())
    } else {
        Err(Error::BadParameter(format!("depth {depth} outside 4..=40")))
    }
}

// Envelope fit shared by both estimators. `to_alpha` turns a slope into an
// exponent. Returns (alpha_hat, uncertainty, diagnostics).
fn envelope_exponent(
    method: HolderMethod,
    depth: u32,
    samples: u64,
    x: &[f64],
    y: &[f64],
    to_alpha: impl Fn(f64) -> f64,
) -> (Option<f64>, f64, FitDiagnostics) {
    let n = x.len();
    let half = n - n / 2;
    let quarter = n - n / 4;
    let fit = linear_fit(&x[half..], &y[half..]).expect("window holds at least two annuli");
    let raw_alpha = to_alpha(fit.slope);
    let quarter_alpha = linear_fit(&x[quarter..], &y[quarter..]).map(|f| to_alpha(f.slope));
    let log_corrected_alpha = log_corrected_slope(&x[half..], &y[half..]).map(&to_alpha);
    let none = raw_alpha <= 0.0 || log_corrected_alpha.is_some_and(|a| a < LOG_CORRECTED_FLOOR);
    let alpha = (!none).then(|| raw_alpha.min(1.0));
    // Window drift plus two standard errors of the slope.
    let (wx, m) = (&x[half..], (n - half) as f64);
    let mean = wx.iter().sum::<f64>() / m;
    let sxx: f64 = wx.iter().map(|v| (v - mean) * (v - mean)).sum();
    let standard_error = if m > 2.0 { fit.residual * (m / (m - 2.0)).sqrt() / sxx.sqrt() } else { 0.0 };
    let uncertainty = quarter_alpha.map(|q| (q - raw_alpha).abs()).unwrap_or(0.0) + 2.0 * standard_error;
    let diagnostics = FitDiagnostics {
        method,
        depth,
        window_start: (half + 1) as u32,
        samples,
        raw_slope: fit.slope,
        raw_alpha,
        log_corrected_alpha,
        quarter_alpha,
        residual: fit.residual,
    };
    (alpha, uncertainty, diagnostics)
}

/// Exponent from the growth of `f#` on the dyadic annuli `k = 1..=depth`,
/// each sampled at `2^{k+3}` angles.
pub fn scan_spherical_derivative(domain: &DomainSpec, depth: u32) -> Result<HolderEstimate> {
    check_depth(depth)?;
    let map = domain.map();
    let mut envelope = Vec::with_capacity(depth as usize);
    let mut samples = 0u64;
    for k in 1..=depth {
        let n = annulus_size(k);
        let m = (0..n)
            .into_par_iter()
            .map(|j| map.spherical_derivative_at(&annulus_point(k, j)))
            .reduce(|| f64::NEG_INFINITY, f64::max);
        samples += n as u64;
        envelope.push(EnvelopeRow {
            k,
            h: hyperbolic_radius(0.5f64.powi(k as i32)),
            value: m,
        });
    }
    let x: Vec<f64> = envelope.iter().map(|r| r.k as f64 * std::f64::consts::LN_2).collect();
    let y: Vec<f64> = envelope.iter().map(|r| r.value.ln()).collect();
    let (alpha_hat, alpha_uncertainty, diagnostics) =
        envelope_exponent(HolderMethod::DerivativeScan, depth, samples, &x, &y, |s| 1.0 - s);
    let m_hat = alpha_hat.map(|a| {
        envelope
            .iter()
            .map(|r| r.value * 0.5f64.powi(r.k as i32).powf(1.0 - a))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    Ok(HolderEstimate {
        alpha_hat,
        alpha_uncertainty,
        m_hat,
        k_hat: None,
        c_hat: None,
        diagnostics,
        envelope,
    })
}

/// Pairs in one decade of `|z1 − z2|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairBin {
    pub log10_separation: i32,
    pub count: u64,
    pub k_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCheck {
    pub alpha: f64,
    pub k_hat: f64,
    pub n_pairs: u64,
    pub max_depth: u32,
    pub seed: u64,
    pub worst_pair: [[f64; 2]; 2],
    pub bins: Vec<PairBin>,
}

// Angle strata: logarithmically close to 0 or π, or uniform.
fn draw_angle(rng: &mut ChaCha8Rng) -> f64 {
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    match rng.gen_range(0..3) {
        0 => sign * 10f64.powf(rng.gen_range(-9.0..0.0)),
        1 => PI - sign * 10f64.powf(rng.gen_range(-9.0..0.0)),
        _ => rng.gen_range(-PI..PI),
    }
}

fn draw_pair(rng: &mut ChaCha8Rng, max_depth: u32) -> (Complex64, Complex64) {
    loop {
        let k = rng.gen_range(0..=max_depth);
        let eps = 0.5f64.powi(k as i32) * rng.gen_range(0.5..1.0);
        let z1 = Complex64::from_polar(1.0 - eps, draw_angle(rng));
        let sep = 10f64.powf(rng.gen_range(-6.0..2f64.log10()));
        for _ in 0..16 {
            let z2 = z1 + Complex64::from_polar(sep, rng.gen_range(-PI..PI));
            if z2.norm() < 1.0 && z2 != z1 {
                return (z1, z2);
            }
        }
    }
}

/// `K̂ = max σ(f(z1), f(z2)) / |z1 − z2|^α` over `n_pairs` seeded pairs.
///
/// Separations are log-uniform on `[10⁻⁶, 2]`; the first point lies on a
/// radial stratum `1 − 2^{−k}`, `k ≤ DEFAULT_PAIR_DEPTH`.
pub fn check_holder_pairs(domain: &DomainSpec, alpha: f64, n_pairs: u64, seed: u64) -> Result<PairCheck> {
    check_holder_pairs_to_depth(domain, alpha, n_pairs, seed, DEFAULT_PAIR_DEPTH)
}

/// [`check_holder_pairs`] with an explicit deepest radial stratum.
pub fn check_holder_pairs_to_depth(
    domain: &DomainSpec,
    alpha: f64,
    n_pairs: u64,
    seed: u64,
    max_depth: u32,
) -> Result<PairCheck> {
    check_alpha(alpha)?;
    if n_pairs == 0 {
        return Err(Error::BadParameter("n_pairs must be at least 1".into()));
    }
    if max_depth > 45 {
        return Err(Error::BadParameter(format!("pair depth {max_depth} above 45")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Complex64, Complex64)> = (0..n_pairs).map(|_| draw_pair(&mut rng, max_depth)).collect();
    let map = domain.map();
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let fa = map.eval(&DiskPoint::new_unchecked(a));
            let fb = map.eval(&DiskPoint::new_unchecked(b));
            spherical_distance(fa, fb) / (a - b).norm().powf(alpha)
        })
        .collect();
    let mut bins: Vec<PairBin> = (-6..=0)
        .map(|d| PairBin {
            log10_separation: d,
            count: 0,
            k_max: 0.0,
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (i, (&r, &(a, b))) in ratios.iter().zip(&pairs).enumerate() {
        if r > best.0 {
            best = (r, i);
        }
        let d = ((a - b).norm().log10().floor() as i32).clamp(-6, 0);
        let bin = &mut bins[(d + 6) as usize];
        bin.count += 1;
        bin.k_max = bin.k_max.max(r);
    }
    let (a, b) = pairs[best.1];
    Ok(PairCheck {
        alpha,
        k_hat: best.0,
        n_pairs,
        max_depth,
        seed,
        worst_pair: [[a.re, a.im], [b.re, b.im]],
        bins,
    })
}

/// One annulus of the growth profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub k: u32,
    pub h: f64,
    /// `min log(1/dist_σ(f(z), ∂D))` over the annulus.
    pub x_min: f64,
    /// The same minimum with every distance lowered by the net uncertainty;
    /// `None` when some lowered distance is not positive.
    pub x_min_upper: Option<f64>,
}

/// `log(1/dist_σ(f(z), ∂D))` against hyperbolic radius on dyadic annuli.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub depth: u32,
    /// Certified chordal mesh of the boundary net.
    pub mesh: f64,
    pub uncertainty: f64,
    /// Row `k = 0` is the base point.
    pub rows: Vec<GrowthRow>,
}

/// Finest mesh chosen automatically; nets at this mesh hold about 3·10⁵
/// points per unbounded piece.
pub const AUTO_MESH_FLOOR: f64 = 1e-5;

/// Chordal mesh actually used at a given depth: fine enough to resolve
/// boundary distances of order `2^{−depth}`, but not below
/// [`AUTO_MESH_FLOOR`] unless the caller asks for it.
pub fn effective_mesh(mesh: f64, depth: u32) -> f64 {
    mesh.min((0.25 * 0.5f64.powi(depth as i32)).max(AUTO_MESH_FLOOR))
}

pub fn growth_profile(domain: &DomainSpec, depth: u32, mesh: f64) -> Result<GrowthProfile> {
    check_depth(depth)?;
    let net = domain.boundary_net(effective_mesh(mesh, depth))?;
    let map = domain.map();
    let u = net.uncertainty();
    let row = |pts: &mut dyn Iterator<Item = DiskPoint>| -> Result<(f64, Option<f64>)> {
        let mut lo = f64::INFINITY;
        let mut hi = Some(f64::INFINITY);
        for p in pts {
            let d = dist_sigma_to_boundary(map.eval(&p), &net)?;
            lo = lo.min(-d.value.ln());
            hi = match (hi, d.value - d.uncertainty) {
                (Some(h), v) if v > 0.0 => Some(h.min(-v.ln())),
                _ => None,
            };
        }
        Ok((lo, hi))
    };
    let base = DiskPoint::new(Complex64::new(0.0, 0.0))?;
    let (x0, x0_hi) = row(&mut std::iter::once(base))?;
    let mut rows = vec![GrowthRow {
        k: 0,
        h: 0.0,
        x_min: x0,
        x_min_upper: x0_hi,
    }];
    for k in 1..=depth {
        let n = annulus_size(k);
        // Fixed-size chunks evaluated in parallel, reduced in order.
        let parts: Vec<Result<(f64, Option<f64>)>> = (0..n)
            .collect::<Vec<_>>()
            .par_chunks(4096)
            .map(|c| row(&mut c.iter().map(|&j| annulus_point(k, j))))
            .collect();
        let mut lo = f64::INFINITY;
        let mut hi = Some(f64::INFINITY);
        for p in parts {
            let (l, h) = p?;
            lo = lo.min(l);
            hi = match (hi, h) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            };
        }
        rows.push(GrowthRow {
            k,
            h: hyperbolic_radius(0.5f64.powi(k as i32)),
            x_min: lo,
            x_min_upper: hi,
        });
    }
    Ok(GrowthProfile {
        depth,
        mesh: net.delta(),
        uncertainty: u,
        rows,
    })
}

/// `Ĉ = max (h − x/α)` with the interval implied by the net uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub alpha: f64,
    pub c_hat: f64,
    /// Lower end of the interval for `Ĉ`; absent when the net is too coarse
    /// to bound some distance away from zero.
    pub c_lower: Option<f64>,
    pub depth: u32,
    pub mesh: f64,
    pub uncertainty: f64,
}

pub fn growth_constant(profile: &GrowthProfile, alpha: f64) -> Result<GrowthCheck> {
    check_alpha(alpha)?;
    let c_hat = profile
        .rows
        .iter()
        .map(|r| r.h - r.x_min / alpha)
        .fold(f64::NEG_INFINITY, f64::max);
    let c_lower = profile
        .rows
        .iter()
        .map(|r| r.x_min_upper.map(|x| r.h - x / alpha))
        .try_fold(f64::NEG_INFINITY, |acc, v| v.map(|v| acc.max(v)));
    Ok(GrowthCheck {
        alpha,
        c_hat,
        c_lower,
        depth: profile.depth,
        mesh: profile.mesh,
        uncertainty: profile.uncertainty,
    })
}

/// `Ĉ = max (h_D(w0, f(z)) − (1/α) log(1/dist_σ(f(z), ∂D)))` over the base
/// point and the dyadic annuli.
pub fn check_hyperbolic_growth(domain: &DomainSpec, alpha: f64, depth: u32, mesh: f64) -> Result<GrowthCheck> {
    check_alpha(alpha)?;
    growth_constant(&growth_profile(domain, depth, mesh)?, alpha)
}

/// Exponent from the slope of `min log(1/dist_σ)` against hyperbolic radius.
pub fn alpha_from_growth_profile(profile: &GrowthProfile) -> HolderEstimate {
    let rows = &profile.rows[1..];
    let x: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.x_min).collect();
    let samples = rows.iter().map(|r| annulus_size(r.k) as u64).sum::<u64>() + 1;
    let (alpha_hat, alpha_uncertainty, diagnostics) =
        envelope_exponent(HolderMethod::HyperbolicGrowth, profile.depth, samples, &x, &y, |s| s);
    HolderEstimate {
        alpha_hat,
        alpha_uncertainty,
        m_hat: None,
        k_hat: None,
        c_hat: None,
        diagnostics,
        envelope: rows
            .iter()
            .map(|r| EnvelopeRow {
                k: r.k,
                h: r.h,
                value: r.x_min,
            })
            .collect(),
    }
}

pub fn estimate_alpha_from_growth(domain: &DomainSpec, depth: u32, mesh: f64) -> Result<HolderEstimate> {
    Ok(alpha_from_growth_profile(&growth_profile(domain, depth, mesh)?))
}

/// Whether a constant settles or keeps growing between two depths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthTrend {
    Stable,
    Diverging,
    Inconclusive,
}

/// Compares a constant at two depths. Growth faster than
/// [`DIVERGENCE_RATE`] per unit of added hyperbolic radius is divergence; a
/// change within [`STABILITY_TOLERANCE`] of `max(1, |c|)` is stability.
pub fn depth_trend(c_coarse: f64, c_fine: f64, depth_coarse: u32, depth_fine: u32) -> DepthTrend {
    let dh = hyperbolic_radius(0.5f64.powi(depth_fine as i32)) - hyperbolic_radius(0.5f64.powi(depth_coarse as i32));
    let dc = c_fine - c_coarse;
    if dh > 0.0 && dc / dh > DIVERGENCE_RATE {
        DepthTrend::Diverging
    } else if dc.abs() <= STABILITY_TOLERANCE * c_coarse.abs().max(1.0) {
        DepthTrend::Stable
    } else {
        DepthTrend::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicRow {
    pub k: u32,
    pub h: f64,
    /// Spherical length of the image of the radius from `t` to the limit radius.
    pub tail_length: f64,
    /// `σ(f(t e^{iθ}), f(t_end e^{iθ}))`
    pub dist_limit: f64,
    /// `dist_σ(f(t e^{iθ}), ∂D)`
    pub dist_boundary: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicConditions {
    pub alpha: f64,
    pub boundary_angle: f64,
    pub depth: u32,
    pub constants: ConditionConstants,
    /// Samples where the measured chain `tail ≥ dist_limit ≥ dist_boundary`
    /// failed by more than the quadrature and net uncertainties.
    pub ordering_violations: usize,
    pub tail_converged: bool,
    pub tail_error: f64,
    /// Spherical length between the limit radius and a radius 16 times closer
    /// to the circle; the part of the tail the limit point cuts off.
    pub tail_remainder: f64,
    pub net_uncertainty: f64,
    pub rows: Vec<GeodesicRow>,
}

// ∫ f#(s e^{iθ}) ds over the dyadic piece [1 − 2^{−j}, 1 − 2^{−j−1}],
// integrated in u = 1 − s.
fn dyadic_piece(domain: &DomainSpec, theta: f64, j: u32) -> (f64, f64) {
    let map = domain.map();
    let hi = 0.5f64.powi(j as i32);
    let est = gauss_legendre_refined(hi * 0.5, hi, 4, |u| {
        map.spherical_derivative_at(&DiskPoint::polar(theta, u).expect("u in (0, 1]"))
    });
    (est.value, est.error)
}

/// The three constants of the geodesic conditions along the radius of
/// direction `boundary_angle`, sampled at `t = 1 − 2^{−k}`, `k = 0..=depth`,
/// with the radial limit taken at `1 − 2^{−depth−4}`.
pub fn check_geodesic_conditions(
    domain: &DomainSpec,
    boundary_angle: f64,
    alpha: f64,
    depth: u32,
    mesh: f64,
) -> Result<GeodesicConditions> {
    check_alpha(alpha)?;
    if !(4..=MAX_GEODESIC_DEPTH).contains(&depth) {
        return Err(Error::BadParameter(format!("depth {depth} outside 4..={MAX_GEODESIC_DEPTH}")));
    }
    let map = domain.map();
    let end = depth + 4;
    let pieces: Vec<(f64, f64)> = (0..end + 4)
        .into_par_iter()
        .map(|j| dyadic_piece(domain, boundary_angle, j))
        .collect();
    let tail_error: f64 = pieces[..end as usize].iter().map(|p| p.1).sum();
    let tail_remainder: f64 = pieces[end as usize..].iter().map(|p| p.0).sum();
    // tails[k] = ∫ from 1 − 2^{−k} to 1 − 2^{−end}
    let mut tails = vec![0.0; end as usize + 1];
    for j in (0..end as usize).rev() {
        tails[j] = tails[j + 1] + pieces[j].0;
    }
    let total = tails[0];
    let tail_converged = tail_error <= 1e-8 + 1e-6 * total;

    let net = domain.boundary_net(effective_mesh(mesh, depth))?;
    let u = net.uncertainty();
    let limit = map.eval(&DiskPoint::polar(boundary_angle, 0.5f64.powi(end as i32))?);
    let mut rows = Vec::with_capacity(depth as usize + 1);
    let mut violations = 0;
    for k in 0..=depth {
        let p = DiskPoint::polar(boundary_angle, 0.5f64.powi(k as i32))?;
        let w = map.eval(&p);
        let l = tails[k as usize];
        let d2_raw = spherical_distance(w, limit);
        let d3_raw = dist_sigma_to_boundary(w, &net)?.value;
        if d2_raw > l + tail_error + 1e-12 || d3_raw > d2_raw + u {
            violations += 1;
        }
        // Enforce the chain exactly; the raw violations are counted above.
        let d2 = d2_raw.min(l);
        let d3 = d3_raw.min(d2);
        rows.push(GeodesicRow {
            k,
            h: if k == 0 { 0.0 } else { hyperbolic_radius(0.5f64.powi(k as i32)) },
            tail_length: l,
            dist_limit: d2,
            dist_boundary: d3,
        });
    }
    let constant = |pick: fn(&GeodesicRow) -> f64| {
        rows.iter()
            .map(|r| r.h - (1.0 / pick(r)).ln() / alpha)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let constants = ConditionConstants {
        c1: constant(|r| r.tail_length),
        c2: constant(|r| r.dist_limit),
        c3: constant(|r| r.dist_boundary),
    };
    Ok(GeodesicConditions {
        alpha,
        boundary_angle,
        depth,
        constants,
        ordering_violations: violations,
        tail_converged,
        tail_error,
        tail_remainder,
        net_uncertainty: u,
        rows,
    })
}

/// `σ(f(z1), f(z2)) / |z1 − z2|^α` for one pair, exposed for spot checks.
pub fn pair_ratio(domain: &DomainSpec, alpha: f64, z1: Complex64, z2: Complex64) -> Result<f64> {
    check_alpha(alpha)?;
    let a = DiskPoint::new(z1)?;
    let b = DiskPoint::new(z2)?;
    let map = domain.map();
    let (fa, fb): (ExtendedComplex, ExtendedComplex) = (map.eval(&a), map.eval(&b));
    Ok(spherical_distance(fa, fb) / (z1 - z2).norm().powf(alpha))
}
