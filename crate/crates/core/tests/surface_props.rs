use killsub::expr::Expr;
use killsub::geometry::{bcv, KillingData, Rect};
use killsub::surface::SurfacePatch;
use proptest::prelude::*;

fn family(i: usize) -> KillingData {
    match i {
        0 => bcv(0.0, 0.5),
        1 => bcv(1.0, 1.0),
        2 => bcv(-1.0, 0.3),
        _ => KillingData::from_strs("exp(-(x^2+y^2)/4)", "0", "x", Rect::square(2.0)).unwrap(),
    }
}

fn height() -> impl Strategy<Value = String> {
    prop::array::uniform6(-0.5f64..0.5)
        .prop_map(|c| format!("{}*x + {}*y + {}*x^2 + {}*x*y + {}*y^2 + {}*sin(x)*cos(y)", c[0], c[1], c[2], c[3], c[4], c[5]))
}

fn param() -> impl Strategy<Value = [f64; 2]> {
    (-0.3f64..0.3, -0.3f64..0.3).prop_map(|(u, v)| [u, v])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flipping_the_normal_flips_signed_quantities(fam in 0usize..4, h in height(), q in param()) {
        let s = SurfacePatch::graph(family(fam), &h, Rect::square(0.5)).unwrap();
        let f = s.clone().flipped();
        let (a, b) = (s.analyze_point(q).unwrap(), f.analyze_point(q).unwrap());
        prop_assert!((a.mean_curvature + b.mean_curvature).abs() <= 1e-10);
        prop_assert!((a.cos_phi + b.cos_phi).abs() <= 1e-12);
        prop_assert!((a.norm_sq_a - b.norm_sq_a).abs() <= 1e-10);
        let (ga, gb) = (s.gauss_residual(q).unwrap(), f.gauss_residual(q).unwrap());
        prop_assert!((ga.abs() - gb.abs()).abs() <= 1e-10);
        let (ca, cb) = (s.codazzi_residual(q).unwrap(), f.codazzi_residual(q).unwrap());
        for k in 0..2 {
            prop_assert!((ca[k].abs() - cb[k].abs()).abs() <= 1e-10, "codazzi {k}: {:?} {:?}", ca, cb);
        }
    }

    #[test]
    fn graphs_satisfy_gauss_and_codazzi(fam in 0usize..4, h in height(), q in param()) {
        let s = SurfacePatch::graph(family(fam), &h, Rect::square(0.5)).unwrap();
        prop_assert!(s.gauss_residual(q).unwrap().abs() <= 1e-4);
        let c = s.codazzi_residual(q).unwrap();
        prop_assert!(c[0].abs().max(c[1].abs()) <= 1e-4, "{:?}", c);
        let comp = s.compatibility_residuals(q).unwrap();
        prop_assert!(comp.tangent_part.abs().max(comp.angle_part.abs()) <= 1e-4);
    }

    #[test]
    fn angle_function_determines_the_shape_operator(fam in 0usize..4, h in height(), q in param()) {
        let s = SurfacePatch::graph(family(fam), &h, Rect::square(0.5)).unwrap();
        let d = s.analyze_point(q).unwrap();
        prop_assume!(d.sin_phi >= 0.1);
        prop_assert!(s.norm_sq_residual(q).unwrap().abs() <= 1e-4);
        prop_assert!(s.shape_matrix_residual(q).unwrap() <= 1e-4);
        prop_assert!(s.adapted_connection_residual(q).unwrap() <= 1e-3);
    }
}

#[test]
fn round_cylinder_in_flat_space() {
    let (x, y) = (Expr::parse("cos(t)", &["t"]).unwrap(), Expr::parse("sin(t)", &["t"]).unwrap());
    let s = SurfacePatch::hopf_cylinder(KillingData::flat(2.0), &x, &y, (0.0, 6.0), (-1.0, 1.0)).unwrap();
    for q in [[0.5, 0.0], [2.0, 0.3], [4.5, -0.7]] {
        let d = s.analyze_point(q).unwrap();
        assert!((d.mean_curvature.abs() - 1.0).abs() <= 1e-8, "{}", d.mean_curvature);
        assert!(d.cos_phi.abs() <= 1e-12);
        let a = s.shape_matrix_adapted(q).unwrap();
        let expected = [[0.0, 0.0], [0.0, d.mean_curvature]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - expected[i][j]).abs() <= 1e-6, "{a:?}");
            }
        }
        assert!(s.intrinsic_curvature(q).unwrap().abs() <= 1e-4);
    }
}
