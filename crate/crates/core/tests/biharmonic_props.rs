use killsub::biharmonic::{
    gradient_frame_residuals, gradient_adapted_frame, frame_system, frame_system_invariant, AmbientScalars, PointInvariants,
};
use killsub::config::Tolerances;
use killsub::expr::Expr;
use killsub::geometry::{bcv, BaseData, KillingData, Rect};
use killsub::hopf::circle_with_kg;
use killsub::linalg::Vec3;
use killsub::surface::SurfacePatch;
use proptest::prelude::*;

fn graph_model(i: usize) -> KillingData {
    match i {
        0 => bcv(0.0, 0.5),
        1 => bcv(1.0, 1.0),
        _ => KillingData::from_strs("exp(-(x^2+y^2)/4)", "0", "x", Rect::square(2.0)).unwrap(),
    }
}

fn height() -> impl Strategy<Value = String> {
    prop::array::uniform4(-0.5f64..0.5).prop_map(|c| format!("{}*x + {}*y + {}*x*y + {}*sin(x)*cos(y)", c[0], c[1], c[2], c[3]))
}

/// Base scalars with a non-vanishing gradient of `r` and `G − 4r²` away from zero.
fn base_data() -> impl Strategy<Value = BaseData> {
    (0.3f64..3.0, -2.0f64..2.0, -2.0f64..2.0, -1.5f64..1.5, -2.0f64..2.0, -2.0f64..2.0, -3.0f64..3.0)
        .prop_filter("needs grad r and G - 4r² nonzero", |&(_, _, _, r, rx, ry, g)| {
            rx.hypot(ry) > 0.05 && (g - 4.0 * r * r).abs() > 0.05
        })
        .prop_map(|(lambda, lx, ly, r, rx, ry, gauss)| BaseData {
            lambda,
            lambda_x: lx,
            lambda_y: ly,
            r,
            r_grad: [rx, ry],
            gauss,
        })
}

fn hopf_cylinder_over_circle(c: f64, mu: f64, kappa: f64) -> (KillingData, SurfacePatch) {
    let m = bcv(c, mu);
    let curve = circle_with_kg(&m, kappa).unwrap();
    let s = SurfacePatch::hopf_cylinder(m.clone(), &curve.x, &curve.y, (0.0, 3.0), (-1.0, 1.0)).unwrap();
    (m, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frame_system_is_orientation_invariant(fam in 0usize..3, h in height(), u in -0.3f64..0.3, v in -0.3f64..0.3) {
        let s = SurfacePatch::graph(graph_model(fam), &h, Rect::square(0.5)).unwrap();
        let f = s.clone().flipped();
        let (a, b) = (s.analyze_point([u, v]).unwrap(), f.analyze_point([u, v]).unwrap());
        prop_assume!(a.sin_phi >= 0.1);
        let (ae1, ae2) = a.adapted_frame().unwrap();
        let (be1, be2) = b.adapted_frame().unwrap();
        let ra = frame_system_invariant(&frame_system(&a.base, a.norm_sq_a, &ae1, &ae2, &a.normal));
        let rb = frame_system_invariant(&frame_system(&b.base, b.norm_sq_a, &be1, &be2, &b.normal));
        prop_assert!((ra.0 - rb.0).abs() <= 1e-10, "{:?} vs {:?}", ra, rb);
        prop_assert!((ra.1 - rb.1).abs() <= 1e-10, "{:?} vs {:?}", ra, rb);
    }

    #[test]
    fn gradient_frame_reduces_the_frame_system(
        base in base_data(),
        phi in 0.05f64..1.5,
        norm_sq_a in 0.0f64..4.0,
    ) {
        let w = base.grad_r().normalized();
        let (e1, e2, eta) = gradient_adapted_frame(&w, phi);
        let res = frame_system(&base, norm_sq_a, &e1, &e2, &eta);
        let amb = AmbientScalars::from(&base);
        let pt = PointInvariants { phi, norm_sq_a, mean_curvature: 0.7 };
        let eq = gradient_frame_residuals(&amb, &pt, &Tolerances::default()).unwrap();
        let scale = 1.0 + base.gauss.abs() + base.grad_r_norm() + 4.0 * base.r * base.r + norm_sq_a;
        prop_assert!((res[0] - eq.first).abs() <= 1e-6 * scale, "{} vs {}", res[0], eq.first);
        prop_assert!((res[1].abs() - eq.second.abs()).abs() <= 1e-6 * scale, "{} vs {}", res[1], eq.second);
        prop_assert!(res[2].abs() <= 1e-6 * scale, "{}", res[2]);
        prop_assert!((e1.dot(&e2)).abs() <= 1e-14 && (e1.dot(&eta)).abs() <= 1e-14 && (e2.dot(&eta)).abs() <= 1e-14);
        prop_assert!((eta[2] - phi.cos()).abs() <= 1e-14);
    }

    #[test]
    fn hopf_cylinder_shape_norm(c in 0.5f64..4.0, frac in 0.0f64..1.0, kappa in 0.6f64..2.0) {
        let mu = frac * ((c - 0.5) / 4.0).sqrt();
        let (_, s) = hopf_cylinder_over_circle(c, mu, kappa);
        for q in [[0.4, 0.0], [1.7, 0.5]] {
            let d = s.analyze_point(q).unwrap();
            let r = d.base.r;
            let expected = d.mean_curvature.powi(2) + 2.0 * r * r;
            prop_assert!((d.norm_sq_a - expected).abs() <= 1e-5, "{} vs {expected}", d.norm_sq_a);
        }
    }

    #[test]
    fn vertical_planes_through_origin_are_harmonic(fam in 0usize..3, theta in 0.0f64..std::f64::consts::PI, u in -0.4f64..0.4) {
        let m = match fam {
            0 => bcv(0.0, 0.5),
            1 => bcv(1.0, 0.5),
            _ => bcv(-1.0, 0.3),
        };
        let (x, y) = (
            Expr::parse(&format!("{:?}*t", theta.cos()), &["t"]).unwrap(),
            Expr::parse(&format!("{:?}*t", theta.sin()), &["t"]).unwrap(),
        );
        let s = SurfacePatch::hopf_cylinder(m, &x, &y, (-0.8, 0.8), (-1.0, 1.0)).unwrap();
        let q = [u, 0.2];
        let h = s.mean_curvature(q).unwrap();
        prop_assert!(h.abs() <= 1e-8, "H = {h}");
        let bt = s.bitension_cmc(q).unwrap();
        prop_assert!(bt.max_abs() <= 1e-6, "{:?}", bt);
    }
}

#[test]
fn biharmonic_hopf_cylinders_have_fixed_shape_norm() {
    for (c, mu) in [(1.0, 0.0), (2.0, 0.3), (4.0, 0.6)] {
        let target: f64 = c - 4.0 * mu * mu;
        let (_, s) = hopf_cylinder_over_circle(c, mu, target.sqrt());
        let d = s.analyze_point([1.0, 0.1]).unwrap();
        let expected = d.base.gauss - 2.0 * d.base.r * d.base.r;
        assert!((d.norm_sq_a - expected).abs() <= 1e-5, "c = {c}: {} vs {expected}", d.norm_sq_a);
        let bt = s.bitension_cmc([1.0, 0.1]).unwrap();
        assert!(bt.max_abs() <= 1e-4, "c = {c}: {bt:?}");
        assert!(s.frame_system_residuals([1.0, 0.1]).unwrap().iter().all(|v| v.abs() <= 1e-5));
    }
}

#[test]
fn unit_vectors_stay_unit_in_gradient_frame() {
    let (e1, e2, eta) = gradient_adapted_frame(&Vec3::new(0.6, 0.8, 0.0), 0.9);
    for v in [e1, e2, eta] {
        assert!((v.norm() - 1.0).abs() <= 1e-15);
    }
}
