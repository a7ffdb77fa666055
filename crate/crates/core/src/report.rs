//! Analysis reports and their JSON / CSV encodings.

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::catalog::{DomainSpec, KnownValue};
use crate::config::Params;
use crate::error::Result;
use crate::hardy::{
    classify_hp_membership, decade_schedule_for, estimate_hardy, verify_hardy_bound, HardyBoundVerdict, HardyEstimate,
    HpClassification, Membership,
};
use crate::holder::{
    check_geodesic_conditions, check_holder_pairs_to_depth, check_hyperbolic_growth, depth_trend,
    estimate_alpha_from_growth, scan_spherical_derivative, DepthTrend, GeodesicConditions, GrowthCheck,
    HolderEstimate, PairCheck,
};
use crate::reduction::{
    build_reduction, check_density_bound, check_distance_comparability, check_qh_comparability, check_qh_holder,
    Comparability, DensityCheck, QhComparability, QhHolderCheck, DENSITY_BOUND, QH_STABILITY,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Error bar of a reported quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Uncertainty {
    Exact,
    Value(f64),
}

impl Serialize for Uncertainty {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Exact => s.serialize_str("exact"),
            Self::Value(v) => s.serialize_f64(*v),
        }
    }
}

/// One checked property. `slack ≥ 0` means the property holds with room.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Invariant {
    pub name: String,
    pub pass: bool,
    pub slack: f64,
    pub uncertainty: Uncertainty,
}

impl Invariant {
    pub fn new(name: impl Into<String>, pass: bool, slack: f64, uncertainty: Uncertainty) -> Self {
        Self {
            name: name.into(),
            pass,
            slack,
            uncertainty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderSection {
    pub scan: HolderEstimate,
    pub growth: HolderEstimate,
    /// Exponent used for the pair, growth and geodesic checks: `α̂` when
    /// present, else 1/2.
    pub alpha_checked: f64,
    pub pairs: PairCheck,
    pub growth_check: GrowthCheck,
    pub geodesic: [GeodesicConditions; 2],
    pub geodesic_trend: DepthTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardySection {
    pub known: KnownValue,
    pub estimate: HardyEstimate,
    pub bound: Option<HardyBoundVerdict>,
    pub membership: Vec<HpClassification>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionSection {
    pub r: f64,
    pub w0: [f64; 2],
    pub anchor: [f64; 2],
    pub max_boundary_image: f64,
    pub comparability: Comparability,
    pub density: DensityCheck,
    pub qh: QhHolderCheck,
    pub qh_comparability: QhComparability,
    pub unbounded_holder: bool,
    pub bounded_holder: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub domain: String,
    pub params: Params,
    pub holder: Option<HolderSection>,
    pub hardy: Option<HardySection>,
    pub reduction: Option<ReductionSection>,
    pub invariants: Vec<Invariant>,
    pub version: &'static str,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl AnalysisReport {
    pub fn empty(domain: &str, params: &Params) -> Self {
        Self {
            domain: domain.to_string(),
            params: params.clone(),
            holder: None,
            hardy: None,
            reduction: None,
            invariants: Vec::new(),
            version: VERSION,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.invariants.iter().all(|i| i.pass)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Long-format CSV: `check,bin,field,value`. `check` is the path to the
    /// first array (or the whole path for scalars), `bin` the index in it.
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        flatten(&self.to_value(), "", None, "", &mut rows);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["check", "bin", "field", "value"]).expect("in-memory writes");
        for r in rows {
            w.write_record([r.check, r.bin.map(|b| b.to_string()).unwrap_or_default(), r.field, r.value])
                .expect("in-memory writes");
        }
        String::from_utf8(w.into_inner().expect("in-memory writes")).expect("csv output is utf-8")
    }

    pub fn render(&self) -> String {
        match self.params.format {
            crate::config::Format::Json => self.to_json(),
            crate::config::Format::Csv => self.to_csv(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub check: String,
    pub bin: Option<usize>,
    pub field: String,
    pub value: String,
}

fn join(a: &str, b: &str) -> String {
    if a.is_empty() {
        b.to_string()
    } else {
        format!("{a}.{b}")
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(v: &Value, check: &str, bin: Option<usize>, field: &str, out: &mut Vec<CsvRow>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                if bin.is_none() {
                    flatten(child, &join(check, k), None, field, out);
                } else {
                    flatten(child, check, bin, &join(field, k), out);
                }
            }
        }
        Value::Array(items) if bin.is_none() => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, check, Some(i), field, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, check, bin, &join(field, &i.to_string()), out);
            }
        }
        _ => out.push(CsvRow {
            check: check.to_string(),
            bin,
            field: field.to_string(),
            value: scalar(v),
        }),
    }
}

/// Parses the CSV emitted by [`AnalysisReport::to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| crate::error::Error::BadFlag(e.to_string()))?;
        out.push(CsvRow {
            check: rec[0].to_string(),
            bin: if rec[1].is_empty() { None } else { rec[1].parse().ok() },
            field: rec[2].to_string(),
            value: rec[3].to_string(),
        });
    }
    Ok(out)
}

/// Rows of [`AnalysisReport::to_csv`] before encoding.
pub fn csv_rows(report: &AnalysisReport) -> Vec<CsvRow> {
    let mut rows = Vec::new();
    flatten(&report.to_value(), "", None, "", &mut rows);
    rows
}

fn tol_or(params: &Params, default: f64) -> f64 {
    params.tol.unwrap_or(default)
}

/// Scan, growth, pair, growth-constant and geodesic checks.
pub fn analyze(domain: &DomainSpec, params: &Params) -> Result<AnalysisReport> {
    params.validate()?;
    let scan = scan_spherical_derivative(domain, params.depth)?;
    let growth = estimate_alpha_from_growth(domain, params.depth, params.mesh)?;
    let alpha = scan.alpha_hat.unwrap_or(0.5);
    let pairs = check_holder_pairs_to_depth(domain, alpha, params.samples, params.seed, params.pair_depth)?;
    let growth_check = check_hyperbolic_growth(domain, alpha, params.depth, params.mesh)?;
    let g1 = check_geodesic_conditions(domain, 0.0, alpha, params.geodesic_depth, params.mesh)?;
    let g2 = check_geodesic_conditions(domain, 0.0, alpha, 2 * params.geodesic_depth, params.mesh)?;
    let geodesic_trend = depth_trend(g1.constants.c1, g2.constants.c1, g1.depth, g2.depth);

    let mut report = AnalysisReport::empty(domain.name(), params);
    let tol = tol_or(params, 0.1);
    let (slack, unc) = match (scan.alpha_hat, growth.alpha_hat) {
        (Some(a), Some(b)) => (tol - (a - b).abs(), scan.alpha_uncertainty + growth.alpha_uncertainty),
        (None, None) => (tol, 0.0),
        _ => (-1.0, 0.0),
    };
    report
        .invariants
        .push(Invariant::new("scan_growth_agreement", slack >= 0.0, slack, Uncertainty::Value(unc)));
    for g in [&g1, &g2] {
        let c = g.constants;
        report.invariants.push(Invariant::new(
            format!("condition_chain_order_depth_{}", g.depth),
            g.ordering_violations == 0,
            (c.c1 - c.c2).min(c.c2 - c.c3),
            Uncertainty::Value(g.net_uncertainty + g.tail_error),
        ));
    }
    if let Some(m) = scan.m_hat {
        let bound = 90.0 * pairs.k_hat * (1.0 + domain.dist_origin_to_complement());
        report.invariants.push(Invariant::new(
            "derivative_constant_below_pair_bound",
            m <= bound,
            bound - m,
            Uncertainty::Value(scan.alpha_uncertainty * m),
        ));
    }
    report.holder = Some(HolderSection {
        scan,
        growth,
        alpha_checked: alpha,
        pairs,
        growth_check,
        geodesic: [g1, g2],
        geodesic_trend,
    });
    Ok(report)
}

/// Exponents tested for `H^p` membership.
pub const MEMBERSHIP_EXPONENTS: [f64; 3] = [1.0, 2.0, 4.0];

/// Hardy number, the bound against `1/α̂`, and `H^p` membership.
pub fn hardy(domain: &DomainSpec, params: &Params) -> Result<AnalysisReport> {
    params.validate()?;
    let scan = scan_spherical_derivative(domain, params.depth)?;
    let estimate = estimate_hardy(
        domain,
        &decade_schedule_for(domain, params.hardy_decades),
        params.hardy_rays,
        params.hardy_depth,
    )?;
    let bound = verify_hardy_bound(&scan, &estimate).ok();
    let membership = MEMBERSHIP_EXPONENTS
        .iter()
        .map(|&p| classify_hp_membership(domain, p))
        .collect::<Result<Vec<_>>>()?;

    let mut report = AnalysisReport::empty(domain.name(), params);
    if let Some(b) = bound {
        report.invariants.push(Invariant::new(
            "hardy_number_below_inverse_alpha",
            b.pass,
            b.slack,
            Uncertainty::Value(b.uncertainty),
        ));
    }
    if let (KnownValue::Finite { value, .. }, Some(h)) = (domain.known_hardy(), estimate.h_hat) {
        let tol = tol_or(params, 0.05);
        let slack = tol - (h - value).abs() / value;
        report.invariants.push(Invariant::new(
            "hardy_number_matches_known",
            slack >= 0.0,
            slack,
            Uncertainty::Value(estimate.uncertainty / value),
        ));
    }
    // Simply connected domains have h ≥ 1/2; a lower estimate is an anomaly, not clamped.
    if let Some(h) = estimate.h_hat {
        let slack = h - 0.5;
        report.invariants.push(Invariant::new(
            "hardy_number_at_least_half",
            slack >= -estimate.uncertainty,
            slack,
            Uncertainty::Value(estimate.uncertainty),
        ));
    }
    if domain.known_hardy().is_infinite() {
        report.invariants.push(Invariant::new(
            "hardy_number_flagged_non_finite",
            estimate.non_finite,
            if estimate.non_finite { 0.0 } else { -1.0 },
            Uncertainty::Exact,
        ));
    }
    // Inside for p forces inside for every smaller p; outside forces outside above.
    let nested = membership.windows(2).all(|w| {
        !(w[1].class == Membership::Inside && w[0].class != Membership::Inside)
            && !(w[0].class == Membership::Outside && w[1].class != Membership::Outside)
    });
    report.invariants.push(Invariant::new(
        "membership_nested_in_p",
        nested,
        if nested { 0.0 } else { -1.0 },
        Uncertainty::Exact,
    ));
    report.hardy = Some(HardySection {
        known: domain.known_hardy().clone(),
        estimate,
        bound,
        membership,
    });
    Ok(report)
}

/// The bounded reduction and its checks.
pub fn reduce(domain: &DomainSpec, params: &Params) -> Result<AnalysisReport> {
    params.validate()?;
    let red = build_reduction(domain)?;
    let comparability = check_distance_comparability(&red, params.samples as usize, params.mesh, params.seed)?;
    let density = check_density_bound(&red, params.density_depth)?;
    let mut qh = check_qh_holder(&red, params.qh_depth, 200)?;
    let stability = tol_or(params, QH_STABILITY);
    qh.pass = qh.relative_change < stability;
    let qh_comparability = check_qh_comparability(&red, params.qh_depth, 2000)?;
    let unbounded_holder = scan_spherical_derivative(domain, params.depth)?.alpha_hat.is_some();

    let mut report = AnalysisReport::empty(domain.name(), params);
    let max_image = red.max_boundary_image();
    report.invariants.push(Invariant::new(
        "boundary_image_in_half_disk",
        max_image <= 0.5 + 1e-12,
        0.5 - max_image,
        Uncertainty::Exact,
    ));
    report.invariants.push(Invariant::new(
        "fraction_envelopes",
        comparability.envelope_violations == 0,
        if comparability.envelope_violations == 0 { 0.0 } else { -(comparability.envelope_violations as f64) },
        Uncertainty::Exact,
    ));
    let finite = comparability.c1_hat > 0.0 && comparability.c2_hat.is_finite();
    report.invariants.push(Invariant::new(
        "distance_ratio_positive_finite",
        finite,
        comparability.c1_hat,
        Uncertainty::Value(comparability.net_uncertainty * comparability.c1_hat),
    ));
    report.invariants.push(Invariant::new(
        "density_product_bound",
        density.pass,
        density.min_product - DENSITY_BOUND,
        Uncertainty::Value(density.uncertainty),
    ));
    report.invariants.push(Invariant::new(
        "quasihyperbolic_hyperbolic_comparison",
        qh_comparability.pass,
        qh_comparability.lower_slack.min(qh_comparability.upper_slack),
        Uncertainty::Value(qh_comparability.grid_error),
    ));
    // Distance of the relative change from the stability threshold, signed
    // by agreement of the two classifications.
    let agree = unbounded_holder == qh.pass;
    let margin = (stability - qh.relative_change).abs();
    report.invariants.push(Invariant::new(
        "holder_classes_agree",
        agree,
        if agree { margin } else { -margin },
        Uncertainty::Value((qh.fine.c2 - qh.coarse.c2).abs()),
    ));
    report.reduction = Some(ReductionSection {
        r: red.r(),
        w0: pair(red.w0()),
        anchor: pair(red.anchor()),
        max_boundary_image: max_image,
        comparability,
        density,
        bounded_holder: qh.pass,
        qh,
        qh_comparability,
        unbounded_holder,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_sector;

    #[test]
    fn uncertainty_encoding() {
        let i = Invariant::new("x", true, 0.5, Uncertainty::Exact);
        assert_eq!(
            serde_json::to_string(&i).unwrap(),
            r#"{"name":"x","pass":true,"slack":0.5,"uncertainty":"exact"}"#
        );
    }

    #[test]
    fn csv_long_format() {
        let mut r = AnalysisReport::empty("d", &Params::default());
        r.invariants.push(Invariant::new("a,b", true, 0.1, Uncertainty::Value(1e-300)));
        let text = r.to_csv();
        assert!(text.starts_with("check,bin,field,value\n"));
        assert!(!text.contains('\r'));
        assert!(text.contains("invariants,0,name,\"a,b\"\n"));
        assert!(text.contains("invariants,0,uncertainty,1e-300\n"));
        assert!(text.contains("params.mesh,,,0.001\n"));
        assert_eq!(parse_csv(&text).unwrap(), csv_rows(&r));
    }

    #[test]
    fn analyze_is_deterministic() {
        let p = Params {
            depth: 8,
            samples: 2000,
            pair_depth: 12,
            geodesic_depth: 6,
            ..Params::default()
        };
        let d = make_sector(std::f64::consts::FRAC_PI_2).unwrap();
        let a = analyze(&d, &p).unwrap().to_json();
        let b = analyze(&d, &p).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"version\""));
    }
}
