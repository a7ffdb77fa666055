use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use holder_metrics::catalog::{make_koebe, make_sector, make_strip, standard_catalog, DomainSpec};
use holder_metrics::disk::DiskPoint;
use holder_metrics::hardy::integral_means;
use holder_metrics::holder::{check_holder_pairs_to_depth, scan_spherical_derivative};
use holder_metrics::hyperbolic::{hyperbolic_distance_domain, quasihyperbolic_distance, GridRegion};
use holder_metrics::reduction::build_reduction;
use holder_metrics::riemann_sphere::{
    chordal_distance, sandwich_upper, spherical_distance, ExtendedComplex, PolylinePath,
};
use holder_metrics::verify::distortion_slack;

fn point() -> impl Strategy<Value = ExtendedComplex> {
    prop_oneof![
        20 => (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(a, b)| ExtendedComplex::finite(a, b)),
        5 => (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| ExtendedComplex::finite(a, b)),
        1 => Just(ExtendedComplex::Infinity),
    ]
}

fn disk_point() -> impl Strategy<Value = DiskPoint> {
    (-PI..PI, 0.0..16.0f64).prop_map(|(a, k)| DiskPoint::polar(a, 0.5f64.powf(k)).unwrap())
}

// z ↦ (a z + b)/(−b̄ z + ā) with |a|² + |b|² = 1 is a rotation of the sphere.
fn rotate(z: ExtendedComplex, a: Complex64, b: Complex64) -> ExtendedComplex {
    match z {
        ExtendedComplex::Infinity => {
            if b == Complex64::new(0.0, 0.0) {
                ExtendedComplex::Infinity
            } else {
                ExtendedComplex::from(-a / b.conj())
            }
        }
        ExtendedComplex::Finite(z) => {
            let den = -b.conj() * z + a.conj();
            if den == Complex64::new(0.0, 0.0) {
                ExtendedComplex::Infinity
            } else {
                ExtendedComplex::from((a * z + b) / den)
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn chordal_spherical_sandwich(z in point(), w in point()) {
        let chi = chordal_distance(z, w);
        let sigma = spherical_distance(z, w);
        prop_assert!(chi <= sigma);
        prop_assert!(sigma <= sandwich_upper(chi));
    }

    #[test]
    fn rotations_preserve_both_metrics(
        z in point(), w in point(),
        t in 0.0..PI, u in -PI..PI, v in -PI..PI,
    ) {
        let a = Complex64::from_polar(t.cos(), u);
        let b = Complex64::from_polar(t.sin(), v);
        let (rz, rw) = (rotate(z, a, b), rotate(w, a, b));
        prop_assert!((chordal_distance(z, w) - chordal_distance(rz, rw)).abs() < 1e-9);
        prop_assert!((spherical_distance(z, w) - spherical_distance(rz, rw)).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn distortion_and_boundary_distance(i in 0usize..9, p in disk_point()) {
        let d = &standard_catalog()[i];
        let s = distortion_slack(d, &p);
        prop_assert!(s >= -1e-12, "{} at {}: {}", d.name(), p.z(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn arc_chord(
        cx in -5.0..5.0f64, cy in -5.0..5.0f64, rad in 0.01..10.0f64,
        a in -PI..PI, span in 1e-3..PI,
    ) {
        // smaller arc from angle a to a + span
        let c = Complex64::new(cx, cy);
        let n = 512;
        let pts: Vec<Complex64> = (0..=n)
            .map(|i| c + Complex64::from_polar(rad, a + span * i as f64 / n as f64))
            .collect();
        let arc = PolylinePath::through(&pts, 1).unwrap().euclidean_length();
        let chord = (pts[n] - pts[0]).norm();
        prop_assert!(chord <= arc * (1.0 + 1e-12));
        prop_assert!(arc <= PI / 2.0 * chord * (1.0 + 1e-12));
    }

    #[test]
    fn sector_derivative_bound(k in 0usize..3, p in disk_point()) {
        // f#(z) (1 − |z|)^{1−α} stays below the sampled envelope maximum
        // (with room for off-grid points).
        let theta = [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0][k];
        let d = make_sector(theta).unwrap();
        let m = scan_envelope_max(&d);
        let alpha = theta / PI;
        let v = d.map().spherical_derivative_at(&p) * p.one_minus_abs().powf(1.0 - alpha);
        prop_assert!(v <= 1.5 * m, "{v} vs {m}");
    }

    #[test]
    fn means_nest_in_p(i in 0usize..9, r in 0.0..0.99f64) {
        // (1/2π ∫|f|^p)^{1/p} is nondecreasing in p
        let d = &standard_catalog()[i];
        let mut last = 0.0f64;
        for p in [0.5, 1.0, 2.0, 3.0] {
            let m = integral_means(d, p, r, 4096).unwrap();
            let norm = (m.value / (2.0 * PI)).powf(1.0 / p);
            prop_assert!(norm >= last * (1.0 - 1e-9), "p = {p}: {norm} < {last}");
            last = norm;
        }
    }
}

fn scan_envelope_max(d: &DomainSpec) -> f64 {
    scan_spherical_derivative(d, 14).unwrap().m_hat.unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quasihyperbolic_symmetry_and_triangle(
        a in (0.0..0.8f64, -PI..PI), b in (0.0..0.8f64, -PI..PI), c in (0.0..0.8f64, -PI..PI),
    ) {
        let region = GridRegion::unit_disk(0.2).unwrap();
        let [a, b, c] = [a, b, c].map(|(r, t)| Complex64::from_polar(r, t));
        let depth = 3;
        let ab = quasihyperbolic_distance(&region, a, b, depth).unwrap();
        let ba = quasihyperbolic_distance(&region, b, a, depth).unwrap();
        let bc = quasihyperbolic_distance(&region, b, c, depth).unwrap();
        let ac = quasihyperbolic_distance(&region, a, c, depth).unwrap();
        let err = ab.error.max(ba.error);
        prop_assert!((ab.value - ba.value).abs() <= err + 1e-12);
        let err3 = ab.error.max(bc.error).max(ac.error);
        prop_assert!(ac.value <= ab.value + bc.value + 3.0 * err3 + 1e-12);
    }
}

#[test]
fn conformal_invariance_across_reduction() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for d in [make_sector(PI / 2.0).unwrap(), make_koebe(), make_strip()] {
        let red = build_reduction(&d).unwrap();
        for _ in 0..1000 {
            let mut draw = || DiskPoint::polar(rng.gen_range(-PI..PI), rng.gen_range(0.05..1.0)).unwrap();
            let (p, q) = (draw(), draw());
            let (wa, wb) = (d.map().eval(&p), d.map().eval(&q));
            let direct = hyperbolic_distance_domain(d.map(), wa, wb).unwrap();
            let (ya, yb) = (red.g(wa), red.g(wb));
            let pushed = red
                .hyperbolic_distance_d_prime(ya.as_finite().unwrap(), yb.as_finite().unwrap())
                .unwrap();
            assert!((direct - pushed).abs() < 1e-8, "{}: {direct} vs {pushed}", d.name());
        }
    }
}

#[test]
fn pair_checks_are_deterministic() {
    let d = make_sector(PI / 2.0).unwrap();
    let a = check_holder_pairs_to_depth(&d, 0.5, 20_000, 3, 14).unwrap();
    let b = check_holder_pairs_to_depth(&d, 0.5, 20_000, 3, 14).unwrap();
    assert_eq!(a, b);
    let c = check_holder_pairs_to_depth(&d, 0.5, 20_000, 4, 14).unwrap();
    assert_ne!(a.worst_pair, c.worst_pair);
    assert_eq!(scan_spherical_derivative(&d, 12).unwrap(), scan_spherical_derivative(&d, 12).unwrap());
}

#[test]
fn hardy_number_survives_translation() {
    use holder_metrics::catalog::make_translated_sector;
    use holder_metrics::hardy::{decade_schedule_for, estimate_hardy};
    for theta in [PI / 2.0, PI] {
        let s = make_sector(theta).unwrap();
        let base = estimate_hardy(&s, &decade_schedule_for(&s, 6), 128, 60).unwrap().h_hat.unwrap();
        for offset in [Complex64::new(10.0, 0.0), Complex64::new(-10.0, 0.0), Complex64::new(3.0, -7.0)] {
            let d = make_translated_sector(theta, offset).unwrap();
            let h = estimate_hardy(&d, &decade_schedule_for(&d, 6), 128, 60).unwrap().h_hat.unwrap();
            assert!((h - base).abs() <= 0.05 * base, "θ = {theta}, offset {offset}: {h} vs {base}");
        }
    }
}
