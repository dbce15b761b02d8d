use killsub::geometry::{
    base_data, bracket_closed, bracket_fd, connection, connection_oracle, riemann_closed, rotate_j, CanonicalModel,
    KillingData, Rect,
};
use killsub::linalg::Vec3;
use proptest::prelude::*;

/// Models with non-constant `λ`, `a`, `b` on `[-1.5, 1.5]²`.
fn model() -> impl Strategy<Value = KillingData> {
    (-0.5f64..0.5, -0.5f64..0.5, 0.0f64..0.3, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(
        |(p, q, s, m, n, k, l)| {
            KillingData::from_strs(
                &format!("exp({p}*x + {q}*y - {s}*(x^2 + y^2))"),
                &format!("{m}*y + {n}*x*y"),
                &format!("{k}*x + {l}*sin(y)"),
                Rect::square(1.5),
            )
            .unwrap()
        },
    )
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, -1.0f64..1.0, -2.0f64..2.0).prop_map(|(x, y, z)| [x, y, z])
}

fn vector() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b, c)| Vec3::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn connection_is_metric(m in model(), p in point()) {
        prop_assert_eq!(connection(&m, p).unwrap().metric_defect(), 0.0);
        let oracle = connection_oracle(&m, p).unwrap();
        prop_assert!(oracle.metric_defect() <= 1e-8, "{}", oracle.metric_defect());
    }

    #[test]
    fn connection_is_torsion_free(m in model(), p in point()) {
        let table = connection(&m, p).unwrap();
        let closed = bracket_closed(&m, p).unwrap();
        let fd = bracket_fd(&m, p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let torsion = table.nabla_frame(i, j) - table.nabla_frame(j, i) - closed[i][j];
                prop_assert!(torsion.norm() <= 1e-8, "T({i},{j}) = {:?}", torsion);
                prop_assert!((fd[i][j] - closed[i][j]).norm() <= 1e-6, "[E{},E{}]", i + 1, j + 1);
            }
        }
        let d = base_data(&m, p[0], p[1]).unwrap();
        prop_assert!((closed[0][1].dot(&Vec3::E3) - 2.0 * d.r).abs() <= 1e-8);
    }

    #[test]
    fn vertical_field_is_killing(m in model(), p in point(), x in vector(), y in vector()) {
        let table = connection(&m, p).unwrap();
        let r = base_data(&m, p[0], p[1]).unwrap().r;
        let nx = table.nabla(&x, &Vec3::E3);
        let ny = table.nabla(&y, &Vec3::E3);
        prop_assert!((nx.dot(&y) + ny.dot(&x)).abs() <= 1e-8);
        let expected = rotate_j(&x.horizontal()) * (-r);
        prop_assert!((nx - expected).norm() <= 1e-10);
    }

    #[test]
    fn curvature_has_tensor_symmetries(
        m in model(),
        p in point(),
        x in vector(),
        y in vector(),
        z in vector(),
        w in vector(),
    ) {
        let rm = |a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3| riemann_closed(&m, p, a, b, c, d).unwrap();
        let base = rm(&x, &y, &z, &w);
        let scale = base.abs().max(1.0);
        prop_assert!((base + rm(&y, &x, &z, &w)).abs() <= 1e-10 * scale);
        prop_assert!((base + rm(&x, &y, &w, &z)).abs() <= 1e-10 * scale);
        prop_assert!((base - rm(&z, &w, &x, &y)).abs() <= 1e-10 * scale);
        let bianchi = base + rm(&y, &z, &x, &w) + rm(&z, &x, &y, &w);
        prop_assert!(bianchi.abs() <= 1e-10 * scale, "{bianchi}");
    }

    #[test]
    fn quarter_turn_pairing_is_skew(x in vector(), y in vector()) {
        let lhs = x.dot(&rotate_j(&y.horizontal()));
        prop_assert!((lhs + y.dot(&rotate_j(&x.horizontal()))).abs() <= 1e-15);
        prop_assert!((lhs + x.wedge(&y).vertical()).abs() <= 1e-15);
    }
}

#[test]
fn gaussian_factor_has_exponential_curvature() {
    let m = KillingData::from_strs("exp(-(x^2+y^2)/4)", "0", "0", Rect::square(2.0)).unwrap();
    let h = 1e-3;
    let log_lambda = |x: f64, y: f64| m.values(x, y).unwrap()[0].ln();
    for &(x, y) in &[(0.0, 0.0), (0.3, -0.7), (1.1, 0.4), (-1.2, -1.2)] {
        let d = base_data(&m, x, y).unwrap();
        let lap = (log_lambda(x + h, y) + log_lambda(x - h, y) + log_lambda(x, y + h) + log_lambda(x, y - h)
            - 4.0 * log_lambda(x, y))
            / (h * h);
        let lambda = m.values(x, y).unwrap()[0];
        let oracle = -lap / (lambda * lambda);
        let expected = ((x * x + y * y) / 2.0).exp();
        assert!((oracle - expected).abs() <= 1e-5 * expected, "oracle {oracle} vs {expected}");
        assert!((d.gauss - expected).abs() <= 1e-12 * expected, "{} vs {expected}", d.gauss);
    }
}
