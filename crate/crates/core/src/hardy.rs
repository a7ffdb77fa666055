//! Hardy number estimation.
//!
//! The Hardy number is read off as `liminf h_D(w0, C_r) / log r`, where
//! `C_r = {|w| = r}`. The hyperbolic distance from the base point to the
//! level set is bounded above by the smallest hyperbolic radius at which some
//! sampled ray `t ↦ f(t e^{iθ})` crosses `|f| = r`. Integral means of `|f|^p`
//! give an independent membership test for `H^p`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::catalog::DomainSpec;
use crate::disk::DiskPoint;
use crate::error::{Error, Result};
use crate::holder::HolderEstimate;
use crate::riemann_sphere::{chordal_distance, spherical_distance, ExtendedComplex};

/// Largest hyperbolic radius searched along a ray; `1 − |z|` is about
/// `2e^{−700}`, just above the smallest normal double.
pub const RAY_RADIUS_MAX: f64 = 700.0;
/// Spacing of the hyperbolic-radius grid scanned for sign changes.
pub const RAY_STEP: f64 = 0.25;
/// Ratios above this value that keep increasing flag a non-finite number.
pub const DEFAULT_RATIO_CEILING: f64 = 10.0;

/// Smallest crossing of `|f| = r` over the sampled rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleDistance {
    /// Hyperbolic radius of the crossing, an upper bound for `h_D(w0, C_r)`.
    pub value: f64,
    pub ray_angle: f64,
    /// The crossing point `w_r`.
    pub point: [f64; 2],
}

fn ray_angles(n_rays: usize) -> Vec<f64> {
    let mut angles: Vec<f64> = (0..n_rays).map(|j| 2.0 * PI * j as f64 / n_rays as f64).collect();
    if n_rays % 2 == 1 {
        angles.push(PI);
    }
    angles
}

fn modulus_on_ray(domain: &DomainSpec, angle: f64, s: f64) -> f64 {
    let p = DiskPoint::from_hyperbolic_radius(angle, s).expect("radius within range");
    domain.map().eval(&p).norm()
}

enum RayOutcome {
    Crossing(f64),
    /// `|f| > r` on the whole ray.
    Above,
    /// `|f| < r` somewhere but no crossing up to the search limit.
    Below,
}

fn scan_ray(domain: &DomainSpec, r: f64, angle: f64, depth: u32) -> RayOutcome {
    let steps = (RAY_RADIUS_MAX / RAY_STEP) as usize;
    let mut prev_s = 0.0;
    let mut prev = modulus_on_ray(domain, angle, 0.0) - r;
    let mut seen_below = prev < 0.0;
    for i in 1..=steps {
        let s = i as f64 * RAY_STEP;
        let cur = modulus_on_ray(domain, angle, s) - r;
        seen_below |= cur < 0.0;
        if (prev < 0.0) != (cur < 0.0) {
            let (mut lo, mut hi) = (prev_s, s);
            let lo_sign = prev < 0.0;
            for _ in 0..depth {
                let mid = 0.5 * (lo + hi);
                if (modulus_on_ray(domain, angle, mid) - r < 0.0) == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return RayOutcome::Crossing(0.5 * (lo + hi));
        }
        prev = cur;
        prev_s = s;
    }
    if seen_below {
        RayOutcome::Below
    } else {
        RayOutcome::Above
    }
}

/// Upper bound for `h_D(w0, C_r)` from `n_rays` equally spaced rays (θ = 0
/// and θ = π always included), each crossing refined by `depth` bisections.
///
/// Fails with [`Error::NoCrossing`] when `|f| > r` on every ray, and with
/// [`Error::BeyondRange`] when the level set lies past the searchable radius.
pub fn hyperbolic_distance_to_circle(domain: &DomainSpec, r: f64, n_rays: usize, depth: u32) -> Result<CircleDistance> {
    if n_rays < 64 {
        return Err(Error::BadParameter(format!("n_rays = {n_rays} below 64")));
    }
    let w0 = domain.base_point().norm();
    if !(r > w0) || !r.is_finite() {
        return Err(Error::BadParameter(format!("radius {r} must exceed |w0| = {w0}")));
    }
    let angles = ray_angles(n_rays);
    let outcomes: Vec<RayOutcome> = angles.par_iter().map(|&a| scan_ray(domain, r, a, depth)).collect();
    let mut best: Option<(f64, f64)> = None;
    let mut any_below = false;
    for (&a, o) in angles.iter().zip(&outcomes) {
        match *o {
            RayOutcome::Crossing(s) => {
                if best.is_none_or(|(b, _)| s < b) {
                    best = Some((s, a));
                }
            }
            RayOutcome::Below => any_below = true,
            RayOutcome::Above => {}
        }
    }
    match best {
        Some((s, a)) => {
            let w = domain
                .map()
                .eval(&DiskPoint::from_hyperbolic_radius(a, s)?)
                .as_finite()
                .unwrap_or(Complex64::new(f64::INFINITY, 0.0));
            Ok(CircleDistance {
                value: s,
                ray_angle: a,
                point: [w.re, w.im],
            })
        }
        None if any_below => Err(Error::BeyondRange {
            radius: r,
            lower_bound: RAY_RADIUS_MAX,
        }),
        None => Err(Error::NoCrossing(r)),
    }
}

/// One radius of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyRatio {
    pub r: f64,
    /// `h_D(w0, C_r)`, or its lower bound when censored.
    pub distance: f64,
    pub ratio: f64,
    /// The level set lies beyond the searched range; `ratio` is a lower bound.
    pub censored: bool,
    pub ray_angle: Option<f64>,
    /// `σ(w_r, ∞) ≥ 2/√(1 + r²)` at the crossing point.
    pub chordal_bound_holds: bool,
}

/// `∫ |f(r e^{iθ})|^p dθ` at `r = 1 − 2^{−k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanRow {
    pub p: f64,
    pub k: u32,
    pub r: f64,
    pub value: f64,
    pub error: f64,
}

/// Result of comparing `h_hat ≤ 1/α̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyBoundVerdict {
    pub pass: bool,
    pub inverse_alpha: f64,
    /// `1/α̂ − ĥ`; negative infinity when `ĥ` is not finite.
    pub slack: f64,
    pub uncertainty: f64,
}

fn serialize_hardy<S: Serializer>(h: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match h {
        Some(v) => s.serialize_f64(*v),
        None => s.serialize_str("non_finite"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyEstimate {
    /// Minimum ratio over the second half of the schedule; `None` when the
    /// ratios were flagged non-finite.
    #[serde(serialize_with = "serialize_hardy")]
    pub h_hat: Option<f64>,
    pub non_finite: bool,
    /// Spread of the ratios over the tail of the schedule.
    pub uncertainty: f64,
    pub ceiling: f64,
    pub n_rays: usize,
    pub depth: u32,
    pub ratios: Vec<HardyRatio>,
    pub means: Vec<MeanRow>,
    pub bound: Option<HardyBoundVerdict>,
}

/// Geometric schedule `r = 10^j`, `j = 1..=max_exponent`.
pub fn decade_schedule(max_exponent: i32) -> Vec<f64> {
    (1..=max_exponent).map(|j| 10f64.powi(j)).collect()
}

/// [`decade_schedule`] without the radii that do not exceed `|w0|` of `domain`.
pub fn decade_schedule_for(domain: &DomainSpec, max_exponent: i32) -> Vec<f64> {
    let w0 = domain.base_point().norm();
    decade_schedule(max_exponent).into_iter().filter(|&r| r > w0).collect()
}

/// Hardy number from the ratios `h_D(w0, C_r)/log r` over `schedule`.
pub fn estimate_hardy(domain: &DomainSpec, schedule: &[f64], n_rays: usize, depth: u32) -> Result<HardyEstimate> {
    estimate_hardy_with_ceiling(domain, schedule, n_rays, depth, DEFAULT_RATIO_CEILING)
}

pub fn estimate_hardy_with_ceiling(
    domain: &DomainSpec,
    schedule: &[f64],
    n_rays: usize,
    depth: u32,
    ceiling: f64,
) -> Result<HardyEstimate> {
    if schedule.len() < 2 || schedule.windows(2).any(|w| !(w[1] > w[0])) || schedule[0] <= 1.0 {
        return Err(Error::BadParameter("schedule must increase, start above 1 and hold two radii".into()));
    }
    let mut ratios = Vec::with_capacity(schedule.len());
    for &r in schedule {
        let row = match hyperbolic_distance_to_circle(domain, r, n_rays, depth) {
            Ok(c) => {
                let w = ExtendedComplex::finite(c.point[0], c.point[1]);
                let chi = chordal_distance(w, ExtendedComplex::Infinity);
                let bound = 2.0 / (1.0 + r * r).sqrt();
                HardyRatio {
                    r,
                    distance: c.value,
                    ratio: c.value / r.ln(),
                    censored: false,
                    ray_angle: Some(c.ray_angle),
                    chordal_bound_holds: spherical_distance(w, ExtendedComplex::Infinity) >= chi
                        && chi >= bound * (1.0 - 1e-9),
                }
            }
            Err(Error::BeyondRange { lower_bound, .. }) => HardyRatio {
                r,
                distance: lower_bound,
                ratio: lower_bound / r.ln(),
                censored: true,
                ray_angle: None,
                chordal_bound_holds: true,
            },
            Err(e) => return Err(e),
        };
        ratios.push(row);
    }
    let tail = &ratios[ratios.len() / 2..];
    let increasing = tail.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let non_finite = tail.iter().any(|t| t.censored && t.ratio > ceiling)
        || (tail.iter().all(|t| t.ratio > ceiling) && increasing);
    let lo = tail.iter().map(|t| t.ratio).fold(f64::INFINITY, f64::min);
    let hi = tail.iter().map(|t| t.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(HardyEstimate {
        h_hat: (!non_finite).then_some(lo),
        non_finite,
        uncertainty: if non_finite { 0.0 } else { hi - lo },
        ceiling,
        n_rays,
        depth,
        ratios,
        means: Vec::new(),
        bound: None,
    })
}

/// Trapezoid value of `∫₀^{2π} |f(r e^{iθ})|^p dθ` with an error estimate from
/// halving the node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub value: f64,
    pub error: f64,
}

fn trapezoid_mean(domain: &DomainSpec, p: f64, eps: f64, n_angles: usize) -> (f64, f64) {
    let map = domain.map();
    let vals: Vec<f64> = (0..n_angles)
        .into_par_iter()
        .map(|j| {
            let a = 2.0 * PI * j as f64 / n_angles as f64;
            let pt = if eps >= 1.0 {
                DiskPoint::new_unchecked(Complex64::new(0.0, 0.0))
            } else {
                DiskPoint::polar(a, eps).expect("radius in [0, 1)")
            };
            map.eval(&pt).norm().powf(p)
        })
        .collect();
    let h = 2.0 * PI / n_angles as f64;
    let fine: f64 = vals.iter().sum::<f64>() * h;
    let coarse: f64 = vals.iter().step_by(2).sum::<f64>() * 2.0 * h;
    (fine, (fine - coarse).abs())
}

/// `∫₀^{2π} |f(r e^{iθ})|^p dθ` with `n_angles` trapezoid nodes.
pub fn integral_means(domain: &DomainSpec, p: f64, r: f64, n_angles: usize) -> Result<MeanEstimate> {
    if !(p > 0.0) {
        return Err(Error::BadParameter(format!("exponent p = {p} must be positive")));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::BadParameter(format!("radius {r} not in [0, 1)")));
    }
    let n = n_angles.max(2) & !1;
    let (value, error) = trapezoid_mean(domain, p, 1.0 - r, n);
    Ok(MeanEstimate { value, error })
}

/// [`integral_means`] at `r = 1 − 2^{−k}` with `2^{k+5}` nodes, keeping
/// `1 − r` exact.
pub fn integral_means_at_depth(domain: &DomainSpec, p: f64, k: u32) -> Result<MeanRow> {
    if !(p > 0.0) {
        return Err(Error::BadParameter(format!("exponent p = {p} must be positive")));
    }
    let eps = 0.5f64.powi(k as i32);
    let (value, error) = trapezoid_mean(domain, p, eps, 1usize << (k + 5));
    Ok(MeanRow {
        p,
        k,
        r: 1.0 - eps,
        value,
        error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    Inconclusive,
}

/// Thresholds of [`classify_hp_membership`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HpThresholds {
    pub first_depth: u32,
    pub last_depth: u32,
    /// Largest relative variation of the means counted as bounded.
    pub variation: f64,
    /// Smallest last-to-first ratio counted as unbounded.
    pub growth: f64,
}

impl Default for HpThresholds {
    fn default() -> Self {
        Self {
            first_depth: 10,
            last_depth: 16,
            variation: 0.1,
            growth: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HpClassification {
    pub p: f64,
    pub class: Membership,
    pub variation: f64,
    pub growth_ratio: f64,
    pub thresholds: HpThresholds,
    pub means: Vec<MeanRow>,
}

pub fn classify_hp_membership(domain: &DomainSpec, p: f64) -> Result<HpClassification> {
    classify_hp_membership_with(domain, p, HpThresholds::default())
}

pub fn classify_hp_membership_with(domain: &DomainSpec, p: f64, t: HpThresholds) -> Result<HpClassification> {
    if t.first_depth >= t.last_depth {
        return Err(Error::BadParameter("membership needs two depths".into()));
    }
    let means = (t.first_depth..=t.last_depth)
        .map(|k| integral_means_at_depth(domain, p, k))
        .collect::<Result<Vec<_>>>()?;
    let lo = means.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
    let hi = means.iter().map(|m| m.value).fold(f64::NEG_INFINITY, f64::max);
    let variation = (hi - lo) / lo;
    let growth_ratio = means[means.len() - 1].value / means[0].value;
    let class = if variation < t.variation {
        Membership::Inside
    } else if growth_ratio > t.growth {
        Membership::Outside
    } else {
        Membership::Inconclusive
    };
    Ok(HpClassification {
        p,
        class,
        variation,
        growth_ratio,
        thresholds: t,
        means,
    })
}

/// Checks `ĥ ≤ 1/α̂` up to the combined uncertainty of both estimates.
pub fn verify_hardy_bound(holder: &HolderEstimate, hardy: &HardyEstimate) -> Result<HardyBoundVerdict> {
    let alpha = holder.alpha_hat.ok_or(Error::MissingAlpha)?;
    let inverse_alpha = 1.0 / alpha;
    let uncertainty = hardy.uncertainty + holder.alpha_uncertainty / (alpha * alpha);
    Ok(match hardy.h_hat {
        Some(h) => HardyBoundVerdict {
            pass: h <= inverse_alpha + uncertainty,
            inverse_alpha,
            slack: inverse_alpha - h,
            uncertainty,
        },
        None => HardyBoundVerdict {
            pass: false,
            inverse_alpha,
            slack: f64::NEG_INFINITY,
            uncertainty,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_koebe, make_sector, make_strip};

    #[test]
    fn sector_distance_is_exact() {
        for &theta in &[PI / 2.0, PI, 2.0 * PI] {
            let d = make_sector(theta).unwrap();
            for &r in &[10.0, 1000.0] {
                let c = hyperbolic_distance_to_circle(&d, r, 64, 60).unwrap();
                let exact = PI / theta * f64::ln(r);
                assert!((c.value - exact).abs() < 1e-9 * exact, "{theta} {r}: {}", c.value);
                assert_eq!(c.ray_angle, 0.0);
            }
        }
    }

    #[test]
    fn monotone_in_radius() {
        let d = make_sector(PI / 2.0).unwrap();
        let a = hyperbolic_distance_to_circle(&d, 5.0, 64, 50).unwrap().value;
        let b = hyperbolic_distance_to_circle(&d, 50.0, 64, 50).unwrap().value;
        assert!(a <= b);
    }

    #[test]
    fn small_radius_is_rejected() {
        let d = make_sector(PI).unwrap();
        assert!(hyperbolic_distance_to_circle(&d, 0.5, 64, 40).is_err());
        assert!(hyperbolic_distance_to_circle(&d, 5.0, 16, 40).is_err());
    }

    #[test]
    fn strip_far_level_sets_are_censored() {
        let s = make_strip();
        assert!(matches!(
            hyperbolic_distance_to_circle(&s, 1e4, 64, 40),
            Err(Error::BeyondRange { .. })
        ));
        let e = estimate_hardy(&s, &decade_schedule(6), 64, 40).unwrap();
        assert!(e.non_finite && e.h_hat.is_none());
        assert!(serde_json::to_string(&e).unwrap().contains("non_finite"));
    }

    #[test]
    fn koebe_ratio_tends_to_one_half() {
        let e = estimate_hardy(&make_koebe(), &decade_schedule(6), 64, 60).unwrap();
        let h = e.h_hat.unwrap();
        assert!((h - 0.5).abs() < 0.06, "{h}");
    }

    #[test]
    fn mean_at_the_centre() {
        let d = make_sector(PI / 2.0).unwrap();
        let m = integral_means(&d, 2.0, 0.0, 64).unwrap();
        assert!((m.value - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn membership_of_the_quarter_plane() {
        let d = make_sector(PI / 2.0).unwrap();
        assert_eq!(classify_hp_membership(&d, 1.0).unwrap().class, Membership::Inside);
        assert_eq!(classify_hp_membership(&d, 4.0).unwrap().class, Membership::Outside);
    }

    #[test]
    fn bound_needs_an_exponent() {
        let s = make_strip();
        let holder = crate::holder::scan_spherical_derivative(&s, 8).unwrap();
        let hardy = estimate_hardy(&s, &decade_schedule(4), 64, 30).unwrap();
        assert!(matches!(verify_hardy_bound(&holder, &hardy), Err(Error::MissingAlpha)));
    }
}
