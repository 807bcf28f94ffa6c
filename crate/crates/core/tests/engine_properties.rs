use approx::assert_relative_eq;
use finsler_core::catalog::CATALOG;
use finsler_core::expr::EvalContext;
use finsler_core::geometry::{Frame, MetricField, SlitPoint};
use proptest::prelude::*;

fn metrics() -> Vec<MetricField> {
    CATALOG
        .iter()
        .flat_map(|e| {
            let b = e.bundle().unwrap();
            [b.base().clone(), b.star().clone()]
        })
        .collect()
}

fn point() -> impl Strategy<Value = SlitPoint> {
    (
        prop::array::uniform2(-0.5..0.5f64),
        prop::array::uniform2(-2.0..2.0f64),
    )
        .prop_filter("slit", |(_, y)| y[0].hypot(y[1]) > 0.3)
        .prop_map(|(x, y)| SlitPoint::new(x.to_vec(), y.to_vec()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frames_scale_with_y(p in point(), lambda in 0.2..4.0f64) {
        for m in metrics() {
            let f = Frame::compute(&m, &p, 3).unwrap();
            let s = Frame::compute(&m, &p.scaled(lambda), 3).unwrap();
            assert_relative_eq!(s.l.value(), lambda * f.l.value(), max_relative = 1e-12);
            let (g, gs) = (f.g.value(), s.g.value());
            let (c, cs) = (f.cartan_low.value(), s.cartan_low.value());
            let (gg, ggs) = (f.spray.value(), s.spray.value());
            for (a, b) in g.data().iter().zip(gs.data()) {
                assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
            }
            for (a, b) in c.data().iter().zip(cs.data()) {
                assert!((a - lambda * b).abs() <= 1e-10 * (1.0 + a.abs()));
            }
            for (a, b) in gg.data().iter().zip(ggs.data()) {
                assert!((lambda * lambda * a - b).abs() <= 1e-10 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn fundamental_tensor_matches_finite_differences(p in point()) {
        let h = 1e-4;
        for m in metrics() {
            let g = Frame::compute(&m, &p, 3).unwrap().g.value();
            let e = |i: usize, j: usize, si: f64, sj: f64| {
                let mut y = p.y.clone();
                y[i] += si * h;
                y[j] += sj * h;
                m.value(&p.x, &y).unwrap().powi(2)
            };
            for i in 0..2 {
                for j in 0..2 {
                    let fd = (e(i, j, 1.0, 1.0) - e(i, j, 1.0, -1.0) - e(i, j, -1.0, 1.0) + e(i, j, -1.0, -1.0))
                        / (8.0 * h * h);
                    prop_assert!((fd - g[[i, j]]).abs() < 1e-6 * (1.0 + fd.abs()), "{} vs {}", fd, g[[i, j]]);
                }
            }
        }
    }
}

#[test]
fn mixed_jet_partials_match_finite_differences() {
    let m = MetricField::parse("exp(x1)*sqrt(y1^2 + y2^2) + 0.5*cos(x1)*y1", 2).unwrap();
    let p = SlitPoint::new(vec![0.2, -0.1], vec![0.7, 0.4]).unwrap();
    let jet = m.jet(&p, &EvalContext::full(2, 4)).unwrap();
    let h = 1e-4;
    let l = |dx: f64, dy: f64| m.value(&[p.x[0] + dx, p.x[1]], &[p.y[0], p.y[1] + dy]).unwrap();
    // ∂x1 ∂y2 L
    let fd = (l(h, h) - l(h, -h) - l(-h, h) + l(-h, -h)) / (4.0 * h * h);
    assert_relative_eq!(jet.partial(&[1, 0, 0, 1]), fd, max_relative = 1e-6);
    // ∂x1³ L
    let fd3 = (l(2.0 * h, 0.0) - 2.0 * l(h, 0.0) + 2.0 * l(-h, 0.0) - l(-2.0 * h, 0.0)) / (2.0 * h.powi(3));
    assert_relative_eq!(jet.partial(&[3, 0, 0, 0]), fd3, max_relative = 1e-4);
}
