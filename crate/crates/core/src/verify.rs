//! The acceptance suite: thirteen numbered criteria, each reported with a
//! pass flag, a slack and an uncertainty.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{make_sector, make_strip, standard_catalog, DomainKind, DomainSpec};
use crate::config::Params;
use crate::disk::DiskPoint;
use crate::error::Result;
use crate::hardy::{decade_schedule, decade_schedule_for, estimate_hardy, verify_hardy_bound};
use crate::holder::{
    check_geodesic_conditions, depth_trend, estimate_alpha_from_growth, scan_spherical_derivative, DepthTrend,
};
use crate::hyperbolic::{GridRegion, QhField};
use crate::reduction::{build_reduction, check_density_bound, check_distance_comparability, check_equivalence};
use crate::report::{analyze, AnalysisReport, Invariant, Uncertainty};
use crate::riemann_sphere::{
    chordal_distance, great_circle_path, sandwich_upper, PolylinePath, spherical_distance, spherical_path_length, ExtendedComplex,
};

/// Depth of the derivative scans and growth profiles.
pub const SCAN_DEPTH: u32 = 14;
/// Deeper scan used for the sharpness of the Hardy bound.
pub const SHARP_SCAN_DEPTH: u32 = 18;
/// Geodesic-condition depths of the strip control.
pub const STRIP_GEODESIC_DEPTHS: (u32, u32) = (32, 64);
pub const STRIP_GEODESIC_ALPHAS: [f64; 3] = [1.0, 0.5, 0.25];
/// Finest grid of the unit-disk quasi-hyperbolic oracle.
pub const DISK_QH_DEPTH: u32 = 8;
pub const DISK_QH_CELL: f64 = 0.2;
pub const HARDY_RAYS: usize = 256;
pub const HARDY_DEPTH: u32 = 60;

/// Which domains the catalog-wide criteria run on.
#[derive(Debug, Clone)]
pub enum Scope {
    All,
    Domain(DomainSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub slack: f64,
    pub uncertainty: Uncertainty,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

pub const CRITERIA: [(u32, &str); 13] = [
    (1, "metric_sandwich"),
    (2, "closed_form_matches_path_infimum"),
    (3, "distortion_sandwiches"),
    (4, "sector_exponents"),
    (5, "scan_growth_agreement"),
    (6, "sector_hardy_numbers"),
    (7, "hardy_bound_sharp"),
    (8, "strip_negative_control"),
    (9, "disk_quasihyperbolic_oracle"),
    (10, "density_product_bound"),
    (11, "distance_ratio_envelopes"),
    (12, "holder_classes_agree"),
    (13, "deterministic_reports"),
];

fn zero_offset_sector(d: &DomainSpec) -> Option<f64> {
    match d.kind() {
        DomainKind::Sector { theta, offset } if offset == Complex64::new(0.0, 0.0) => Some(theta),
        _ => None,
    }
}

fn standard_sectors() -> Vec<DomainSpec> {
    standard_catalog()
        .into_iter()
        .filter(|d| zero_offset_sector(d).is_some())
        .collect()
}

impl Scope {
    fn pick(&self, all: Vec<DomainSpec>, applies: impl Fn(&DomainSpec) -> bool) -> Vec<DomainSpec> {
        match self {
            Self::All => all,
            Self::Domain(d) if applies(d) => vec![d.clone()],
            Self::Domain(_) => Vec::new(),
        }
    }

    fn sectors(&self) -> Vec<DomainSpec> {
        self.pick(standard_sectors(), |d| zero_offset_sector(d).is_some())
    }

    fn catalog(&self) -> Vec<DomainSpec> {
        self.pick(standard_catalog(), |_| true)
    }
}

struct Outcome {
    pass: bool,
    slack: f64,
    uncertainty: Uncertainty,
    detail: String,
}

fn not_applicable() -> Outcome {
    Outcome {
        pass: true,
        slack: f64::INFINITY,
        uncertainty: Uncertainty::Exact,
        detail: "not applicable to this domain".into(),
    }
}

fn random_sphere_point(rng: &mut ChaCha8Rng) -> ExtendedComplex {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0f64)];
        let m = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if m > 1e-3 && m <= 1.0 {
            return ExtendedComplex::from_sphere([v[0] / m, v[1] / m, v[2] / m]);
        }
    }
}

fn c01(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slack = f64::INFINITY;
    let mut bad = 0;
    for i in 0..100_000 {
        let (z, w) = if i % 1000 == 0 {
            (ExtendedComplex::Infinity, random_sphere_point(&mut rng))
        } else {
            (random_sphere_point(&mut rng), random_sphere_point(&mut rng))
        };
        let chi = chordal_distance(z, w);
        let sigma = spherical_distance(z, w);
        let s = (sigma - chi).min(sandwich_upper(chi) - sigma);
        bad += usize::from(s < 0.0);
        slack = slack.min(s);
    }
    Ok(Outcome {
        pass: bad == 0,
        slack,
        uncertainty: Uncertainty::Exact,
        detail: format!("100000 pairs, {bad} violations"),
    })
}

fn rotate(v: [f64; 3], k: [f64; 3], c: f64, s: f64) -> [f64; 3] {
    // Rodrigues: v c + (k × v) s + k (k·v)(1 − c)
    let kv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
    let x = [k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]];
    [0, 1, 2].map(|i| v[i] * c + x[i] * s + k[i] * kv * (1.0 - c))
}

/// Rotates the sphere so that the midpoint of the shorter arc from `z` to `w`
/// lands on the south pole (`0`); the pulled-back arc then stays in `|z| ≤ 1`.
fn center_pair(z: ExtendedComplex, w: ExtendedComplex) -> (ExtendedComplex, ExtendedComplex) {
    let (p, q) = (z.to_sphere(), w.to_sphere());
    let mut m = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
    let mut n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    if n < 1e-9 {
        let e = if p[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let d = e[0] * p[0] + e[1] * p[1] + e[2] * p[2];
        m = [e[0] - d * p[0], e[1] - d * p[1], e[2] - d * p[2]];
        n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    }
    let m = [m[0] / n, m[1] / n, m[2] / n];
    // axis m × (0, 0, −1) = (−m_y, m_x, 0)
    let (ax, ay) = (-m[1], m[0]);
    let sin = (ax * ax + ay * ay).sqrt();
    let cos = -m[2];
    let (k, c, s) = if sin < 1e-15 {
        ([1.0, 0.0, 0.0], if cos > 0.0 { 1.0 } else { -1.0 }, 0.0)
    } else {
        ([ax / sin, ay / sin, 0.0], cos, sin)
    };
    (
        ExtendedComplex::from_sphere(rotate(p, k, c, s)),
        ExtendedComplex::from_sphere(rotate(q, k, c, s)),
    )
}

fn c02(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
    let pairs: Vec<(ExtendedComplex, ExtendedComplex)> =
        (0..1000).map(|_| (random_sphere_point(&mut rng), random_sphere_point(&mut rng))).collect();
    let rows: Vec<Result<(f64, f64, f64)>> = pairs
        .par_iter()
        .map(|&(z, w)| {
            let (a, b) = center_pair(z, w);
            let path = great_circle_path(a, b, 2048)?;
            let est = spherical_path_length(&path, None)?;
            let sigma = spherical_distance(z, w);
            // A bowed competitor between the same endpoints is never shorter.
            let (pa, pb) = (a.as_finite().unwrap_or_default(), b.as_finite().unwrap_or_default());
            let bow: Vec<Complex64> = (0..=64)
                .map(|i| {
                    let t = i as f64 / 64.0;
                    pa + (pb - pa) * Complex64::new(t, 0.05 * (PI * t).sin())
                })
                .collect();
            let other = spherical_path_length(&PolylinePath::through(&bow, 8)?, None)?;
            Ok((est.value - sigma, est.error, sigma - other.value - other.error))
        })
        .collect();
    let (mut excess, mut below, mut err, mut shorter) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for r in rows {
        let (d, e, shortfall) = r?;
        excess = excess.max(d);
        below = below.max(-d - e);
        err = err.max(e);
        shorter += usize::from(shortfall > 0.0);
    }
    Ok(Outcome {
        pass: excess < 1e-6 && below <= 1e-12 && shorter == 0,
        slack: 1e-6 - excess,
        uncertainty: Uncertainty::Value(err),
        detail: format!("1000 pairs, largest excess {excess:.3e}, quadrature error {err:.1e}, {shorter} shorter competitors"),
    })
}

/// Koebe distortion and boundary-distance sandwiches at one point, as the
/// smallest relative slack of the six inequalities.
pub fn distortion_slack(domain: &DomainSpec, p: &DiskPoint) -> f64 {
    let map = domain.map();
    let f0 = map.eval_at(Complex64::new(0.0, 0.0)).as_finite().expect("f(0) is finite");
    let d0 = map.deriv_at(Complex64::new(0.0, 0.0)).norm();
    let r = p.z().norm();
    let e = p.one_minus_abs();
    let fz = map.eval(p).as_finite().expect("f is finite on the disk");
    let dz = map.deriv(p).norm();
    let dist = domain.euclid_dist_to_boundary(fz);
    let rel = |lo: f64, x: f64, hi: f64| ((x - lo) / x.abs().max(lo.abs())).min((hi - x) / hi.abs().max(x.abs()));
    let a = rel(d0 * r / ((1.0 + r) * (1.0 + r)), (fz - f0).norm(), d0 * r / (e * e));
    let b = rel(d0 * e / (1.0 + r).powi(3), dz, d0 * (1.0 + r) / (e * e * e));
    let c = rel(0.25 * e * dz, dist, 2.0 * e * dz);
    if r == 0.0 {
        b.min(c)
    } else {
        a.min(b).min(c)
    }
}

fn c03(scope: &Scope, seed: u64) -> Result<Outcome> {
    let domains = scope.catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x03);
    let pts: Vec<DiskPoint> = (0..10_000)
        .map(|_| {
            let eps = 0.5f64.powf(rng.gen_range(0.0..16.0));
            DiskPoint::polar(rng.gen_range(-PI..PI), eps)
        })
        .collect::<Result<_>>()?;
    let mut slack = f64::INFINITY;
    for d in &domains {
        let s = pts
            .par_iter()
            .map(|p| distortion_slack(d, p))
            .reduce(|| f64::INFINITY, f64::min);
        slack = slack.min(s);
    }
    Ok(Outcome {
        pass: slack >= -1e-12,
        slack,
        uncertainty: Uncertainty::Exact,
        detail: format!("{} maps x 10000 points", domains.len()),
    })
}

fn sector_target(theta: f64) -> f64 {
    (theta / PI).min(1.0)
}

fn c04(scope: &Scope) -> Result<Outcome> {
    let mut slack = f64::INFINITY;
    let mut unc = 0.0f64;
    let mut parts = Vec::new();
    for d in scope.sectors() {
        let theta = zero_offset_sector(&d).expect("sector");
        let est = scan_spherical_derivative(&d, SCAN_DEPTH)?;
        let s = match est.alpha_hat {
            Some(a) => 0.05 - (a - sector_target(theta)).abs(),
            None => -1.0,
        };
        slack = slack.min(s);
        unc = unc.max(est.alpha_uncertainty);
        parts.push(format!("{:.4}:{}", theta, fmt_opt(est.alpha_hat)));
    }
    if parts.is_empty() {
        return Ok(not_applicable());
    }
    Ok(Outcome {
        pass: slack >= 0.0,
        slack,
        uncertainty: Uncertainty::Value(unc),
        detail: parts.join(" "),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "none".into())
}

fn c05(scope: &Scope, mesh: f64) -> Result<Outcome> {
    let mut slack = f64::INFINITY;
    let mut unc = 0.0f64;
    let mut parts = Vec::new();
    for d in scope.sectors() {
        let a = scan_spherical_derivative(&d, SCAN_DEPTH)?;
        let b = estimate_alpha_from_growth(&d, SCAN_DEPTH, mesh)?;
        let s = match (a.alpha_hat, b.alpha_hat) {
            (Some(x), Some(y)) => 0.1 - (x - y).abs(),
            _ => -1.0,
        };
        slack = slack.min(s);
        unc = unc.max(a.alpha_uncertainty + b.alpha_uncertainty);
        parts.push(format!("{}/{}", fmt_opt(a.alpha_hat), fmt_opt(b.alpha_hat)));
    }
    if parts.is_empty() {
        return Ok(not_applicable());
    }
    Ok(Outcome {
        pass: slack >= 0.0,
        slack,
        uncertainty: Uncertainty::Value(unc),
        detail: parts.join(" "),
    })
}

fn c06(scope: &Scope) -> Result<Outcome> {
    let mut slack = f64::INFINITY;
    let mut unc = 0.0f64;
    let mut parts = Vec::new();
    for d in scope.sectors() {
        let theta = zero_offset_sector(&d).expect("sector");
        let target = PI / theta;
        let est = estimate_hardy(&d, &decade_schedule(6), HARDY_RAYS, HARDY_DEPTH)?;
        let s_hat = est.h_hat.map(|h| 0.05 - (h - target).abs() / target).unwrap_or(-1.0);
        let s_ratio = est
            .ratios
            .iter()
            .map(|r| 0.01 - (r.ratio - target).abs() / target)
            .fold(f64::INFINITY, f64::min);
        slack = slack.min(s_hat).min(s_ratio);
        unc = unc.max(est.uncertainty / target);
        parts.push(fmt_opt(est.h_hat));
    }
    if parts.is_empty() {
        return Ok(not_applicable());
    }
    Ok(Outcome {
        pass: slack >= 0.0,
        slack,
        uncertainty: Uncertainty::Value(unc),
        detail: parts.join(" "),
    })
}

fn c07(scope: &Scope) -> Result<Outcome> {
    let mut slack = f64::INFINITY;
    let mut unc = 0.0f64;
    let mut pass = true;
    let mut parts = Vec::new();
    for d in scope.catalog() {
        let holder = scan_spherical_derivative(&d, SHARP_SCAN_DEPTH)?;
        if holder.alpha_hat.is_none() {
            continue;
        }
        let hardy = estimate_hardy(&d, &decade_schedule_for(&d, 6), HARDY_RAYS, HARDY_DEPTH)?;
        let v = verify_hardy_bound(&holder, &hardy)?;
        pass &= v.pass;
        unc = unc.max(v.uncertainty);
        let sharp = matches!(zero_offset_sector(&d), Some(t) if t <= PI + 1e-12);
        if sharp {
            let s = 0.1 - v.slack.abs();
            pass &= s >= 0.0;
            slack = slack.min(s);
        }
        slack = slack.min(v.slack + v.uncertainty);
        parts.push(format!("{}:{:.4}", d.name(), v.slack));
    }
    if parts.is_empty() {
        return Ok(not_applicable());
    }
    Ok(Outcome {
        pass,
        slack,
        uncertainty: Uncertainty::Value(unc),
        detail: parts.join(" "),
    })
}

fn c08(scope: &Scope, mesh: f64) -> Result<Outcome> {
    let strip = match scope {
        Scope::All => make_strip(),
        Scope::Domain(d) if matches!(d.kind(), DomainKind::Strip) => d.clone(),
        Scope::Domain(_) => return Ok(not_applicable()),
    };
    let holder = scan_spherical_derivative(&strip, SCAN_DEPTH)?;
    let hardy = estimate_hardy(&strip, &decade_schedule(6), HARDY_RAYS, HARDY_DEPTH)?;
    let (lo, hi) = STRIP_GEODESIC_DEPTHS;
    let mut diverging = true;
    let mut parts = vec![format!("alpha={} hardy_non_finite={}", fmt_opt(holder.alpha_hat), hardy.non_finite)];
    let mut slack = f64::INFINITY;
    for alpha in STRIP_GEODESIC_ALPHAS {
        let a = check_geodesic_conditions(&strip, 0.0, alpha, lo, mesh)?;
        let b = check_geodesic_conditions(&strip, 0.0, alpha, hi, mesh)?;
        let trend = depth_trend(a.constants.c1, b.constants.c1, lo, hi);
        diverging &= trend == DepthTrend::Diverging;
        slack = slack.min(b.constants.c1 - a.constants.c1);
        parts.push(format!("C1({alpha}) {:.3}->{:.3}", a.constants.c1, b.constants.c1));
    }
    Ok(Outcome {
        pass: holder.alpha_hat.is_none() && hardy.non_finite && diverging,
        slack,
        uncertainty: Uncertainty::Exact,
        detail: parts.join(" "),
    })
}

fn c09() -> Result<Outcome> {
    let region = GridRegion::unit_disk(DISK_QH_CELL)?;
    let field = QhField::compute(&region, Complex64::new(0.0, 0.0), DISK_QH_DEPTH)?;
    let mut slack = f64::INFINITY;
    let mut parts = Vec::new();
    for x in [0.5f64, 0.9, 0.99] {
        let exact = (1.0 / (1.0 - x)).ln();
        let k = field.value_at(&region, Complex64::new(x, 0.0))?;
        let rel = (k - exact).abs() / exact;
        slack = slack.min(0.02 - rel);
        parts.push(format!("{x}:{rel:.2e}"));
    }
    Ok(Outcome {
        pass: slack >= 0.0,
        slack,
        uncertainty: Uncertainty::Value(field.cell()),
        detail: parts.join(" "),
    })
}

fn c10(scope: &Scope) -> Result<Outcome> {
    let mut slack = f64::INFINITY;
    let mut pass = true;
    let mut unc = 0.0f64;
    for d in scope.catalog() {
        let c = check_density_bound(&build_reduction(&d)?, 12)?;
        pass &= c.pass;
        slack = slack.min(c.min_product - crate::reduction::DENSITY_BOUND);
        unc = unc.max(c.uncertainty);
    }
    Ok(Outcome {
        pass,
        slack,
        uncertainty: Uncertainty::Value(unc),
        detail: format!("smallest product {:.4}", slack + crate::reduction::DENSITY_BOUND),
    })
}

fn c11(scope: &Scope, params: &Params) -> Result<Outcome> {
    let mut pass = true;
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    let mut unc = 0.0f64;
    for d in scope.catalog() {
        let c = check_distance_comparability(&build_reduction(&d)?, params.samples as usize, params.mesh, params.seed)?;
        pass &= c.envelope_violations == 0 && c.c1_hat > 0.0 && c.c2_hat.is_finite();
        c1 = c1.min(c.c1_hat);
        c2 = c2.max(c.c2_hat);
        unc = unc.max(c.net_uncertainty);
    }
    Ok(Outcome {
        pass,
        slack: c1,
        uncertainty: Uncertainty::Value(unc),
        detail: format!("ratio range [{c1:.4}, {c2:.4}]"),
    })
}

fn c12(scope: &Scope, qh_depth: u32) -> Result<Outcome> {
    let set: Vec<DomainSpec> = [PI / 2.0, PI, 2.0 * PI]
        .iter()
        .map(|&t| make_sector(t))
        .chain(std::iter::once(Ok(make_strip())))
        .collect::<Result<_>>()?;
    let domains = scope.pick(set, |d| {
        zero_offset_sector(d).is_some() || matches!(d.kind(), DomainKind::Strip)
    });
    if domains.is_empty() {
        return Ok(not_applicable());
    }
    let mut pass = true;
    let mut slack = f64::INFINITY;
    let mut parts = Vec::new();
    for d in domains {
        let e = check_equivalence(&d, SCAN_DEPTH, qh_depth)?;
        pass &= e.pass;
        let margin = (crate::reduction::QH_STABILITY - e.qh.relative_change).abs();
        slack = slack.min(if e.pass { margin } else { -margin });
        parts.push(format!("{}:{}/{}", d.name(), e.unbounded_holder, e.bounded_holder));
    }
    Ok(Outcome {
        pass,
        slack,
        uncertainty: Uncertainty::Exact,
        detail: parts.join(" "),
    })
}

fn c13(seed: u64) -> Result<Outcome> {
    let p = Params {
        depth: 10,
        samples: 10_000,
        seed,
        pair_depth: 14,
        geodesic_depth: 8,
        ..Params::default()
    };
    let d = make_sector(PI / 2.0)?;
    let a = analyze(&d, &p)?.to_json();
    let b = analyze(&d, &p)?.to_json();
    Ok(Outcome {
        pass: a == b,
        slack: 0.0,
        uncertainty: Uncertainty::Exact,
        detail: format!("{} bytes", a.len()),
    })
}

/// Runs one criterion.
pub fn run_criterion(id: u32, scope: &Scope, params: &Params) -> Result<CriterionResult> {
    let start = Instant::now();
    let out = match id {
        1 => c01(params.seed),
        2 => c02(params.seed),
        3 => c03(scope, params.seed),
        4 => c04(scope),
        5 => c05(scope, params.mesh),
        6 => c06(scope),
        7 => c07(scope),
        8 => c08(scope, params.mesh),
        9 => c09(),
        10 => c10(scope),
        11 => c11(scope, params),
        12 => c12(scope, params.qh_depth),
        13 => c13(params.seed),
        _ => return Err(crate::error::Error::BadParameter(format!("no criterion {id}"))),
    }?;
    let name = CRITERIA[(id - 1) as usize].1;
    Ok(CriterionResult {
        id,
        name,
        pass: out.pass,
        slack: out.slack,
        uncertainty: out.uncertainty,
        detail: out.detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every criterion, calling `progress` after each.
pub fn run_all(scope: &Scope, params: &Params, mut progress: impl FnMut(&CriterionResult)) -> Result<Vec<CriterionResult>> {
    let mut out = Vec::new();
    for (id, _) in CRITERIA {
        let r = run_criterion(id, scope, params)?;
        progress(&r);
        out.push(r);
    }
    Ok(out)
}

/// Report whose invariants are the criteria. Timings are left out so that
/// reruns are byte-identical.
pub fn verify_report(label: &str, params: &Params, results: &[CriterionResult]) -> AnalysisReport {
    let mut report = AnalysisReport::empty(label, params);
    report.invariants = results
        .iter()
        .map(|r| Invariant::new(format!("{:02}_{}", r.id, r.name), r.pass, r.slack, r.uncertainty))
        .collect();
    report
}
