use finsler_core::catalog::lookup;
use finsler_core::geodesics::{compare_geodesics, integrate_geodesic, IntegratorConfig};
use finsler_core::geometry::MetricField;

/// Geodesic equations of `e^{2x¹}δ` written out by hand:
/// `ẍ¹ = (ẋ²)² - (ẋ¹)²`, `ẍ² = -2ẋ¹ẋ²`.
fn conformal_rhs(u: [f64; 4]) -> [f64; 4] {
    let (v1, v2) = (u[2], u[3]);
    [v1, v2, v2 * v2 - v1 * v1, -2.0 * v1 * v2]
}

fn rk4_oracle(u0: [f64; 4], t_end: f64, steps: usize) -> [f64; 4] {
    let h = t_end / steps as f64;
    let mut u = u0;
    let add = |a: [f64; 4], b: [f64; 4], s: f64| std::array::from_fn(|i| a[i] + s * b[i]);
    for _ in 0..steps {
        let k1 = conformal_rhs(u);
        let k2 = conformal_rhs(add(u, k1, h / 2.0));
        let k3 = conformal_rhs(add(u, k2, h / 2.0));
        let k4 = conformal_rhs(add(u, k3, h));
        u = std::array::from_fn(|i| u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    u
}

fn conformal() -> MetricField {
    MetricField::parse("exp(x1)*sqrt(y1^2 + y2^2)", 2).unwrap()
}

fn end_error(cfg: &IntegratorConfig, oracle: [f64; 4]) -> f64 {
    let tr = integrate_geodesic(&conformal(), &[0.1, -0.2], &[0.6, 0.8], 1.0, cfg).unwrap();
    let e = tr.end();
    (0..2)
        .map(|i| (e.x[i] - oracle[i]).abs().max((e.y[i] - oracle[i + 2]).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn conformal_geodesic_matches_rk4_oracle() {
    // 10x finer than the default maximum step
    let oracle = rk4_oracle([0.1, -0.2, 0.6, 0.8], 1.0, 500);
    assert!(end_error(&IntegratorConfig::default(), oracle) < 1e-8);
}

#[test]
fn halving_the_step_bound_shrinks_the_error_fourfold() {
    let oracle = rk4_oracle([0.1, -0.2, 0.6, 0.8], 1.0, 4000);
    let cfg = |h: f64| IntegratorConfig {
        // loose enough that every step is accepted at the bound
        rtol: 1e3,
        atol: 1e3,
        max_step: h,
        initial_step: h,
        ..IntegratorConfig::default()
    };
    let coarse = end_error(&cfg(0.2), oracle);
    let fine = end_error(&cfg(0.1), oracle);
    assert!(coarse >= 4.0 * fine, "coarse {coarse:e}, fine {fine:e}");
}

#[test]
fn own_length_is_conserved() {
    let m = conformal();
    let tr = integrate_geodesic(&m, &[0.1, -0.2], &[0.6, 0.8], 1.0, &IntegratorConfig::default()).unwrap();
    let l0 = m.value(&tr.samples[0].x, &tr.samples[0].y).unwrap();
    for s in &tr.samples {
        assert!((m.value(&s.x, &s.y).unwrap() - l0).abs() < 1e-6);
    }
    assert!((tr.end().s - l0).abs() < 1e-8);
}

#[test]
fn star_length_is_conserved_along_star_geodesics() {
    let bundle = lookup("euclid_curl_b").unwrap().bundle().unwrap();
    let tr = integrate_geodesic(bundle.star(), &[0.2, 0.1], &[1.0, -0.3], 1.0, &IntegratorConfig::default()).unwrap();
    let l0 = bundle.star().value(&tr.samples[0].x, &tr.samples[0].y).unwrap();
    for s in &tr.samples {
        assert!((bundle.star().value(&s.x, &s.y).unwrap() - l0).abs() < 1e-6);
    }
}

#[test]
fn closed_form_gives_the_same_paths() {
    let bundle = lookup("euclid_closed_b").unwrap().bundle().unwrap();
    let cmp = compare_geodesics(&bundle, &[0.3, -0.1], &[0.8, 0.6], 1.0, &IntegratorConfig::default()).unwrap();
    assert!(cmp.max_deviation < 1e-6, "{}", cmp.max_deviation);
}

#[test]
fn curl_form_bends_the_paths() {
    let bundle = lookup("euclid_curl_b").unwrap().bundle().unwrap();
    let cmp = compare_geodesics(&bundle, &[0.3, -0.1], &[0.8, 0.6], 1.0, &IntegratorConfig::default()).unwrap();
    assert!(cmp.max_deviation > 1e-3, "{}", cmp.max_deviation);
}

#[test]
fn closed_form_keeps_star_horizontal_distribution_integrable() {
    use finsler_core::verify::{run_checks, CheckSpec, SamplePlan};
    let bundle = lookup("euclid_closed_b").unwrap().bundle().unwrap();
    let specs = [
        CheckSpec::new("prop5_r").unwrap(),
        CheckSpec::new("prop5_rstar").unwrap(),
        CheckSpec::new("theorem5_integrability_star").unwrap(),
    ];
    let plan = SamplePlan::new("euclid_closed_b", 20, 5, 2);
    let reports = run_checks(&bundle, &specs, &plan).unwrap();
    assert!(reports[0].pass, "base R = {:e}", reports[0].max);
    assert!(reports[1].pass, "R* = {:e} where R vanishes", reports[1].max);
    assert!(reports[2].pass, "[e*_i, e*_j] = {:e}", reports[2].max);
}
