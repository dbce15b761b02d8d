use killsub::expr::{Expr, ExprError, Jet};
use proptest::prelude::*;

/// Templates in the placeholders `X`, `Y` that stay smooth and finite on `[-1, 1]²`.
fn template() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("X".to_string()),
        Just("Y".to_string()),
        (-2.0f64..2.0).prop_map(|c| format!("{c:.3}")),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("({a})^2")),
            inner.clone().prop_map(|a| format!("({a})^3")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("log(2 + sin({a}))")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/(1.5 + cos({b}))")),
            inner.prop_map(|a| format!("exp(0.3*({a}))")),
        ]
    })
}

fn fill(t: &str, x: &str, y: &str) -> String {
    t.replace('X', x).replace('Y', y)
}

fn smooth_expr() -> impl Strategy<Value = String> {
    template().prop_map(|t| fill(&t, "x", "y"))
}

fn eval(e: &Expr, x: f64, y: f64) -> f64 {
    e.eval(&[x, y]).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jet_matches_central_differences(s in smooth_expr(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let e = Expr::parse(&s, &["x", "y"]).unwrap();
        let j = e.eval_jet(&[x, y]).unwrap();
        let h = 1e-4;
        let f = |dx: f64, dy: f64| eval(&e, x + dx, y + dy);
        prop_assert!((j.value() - f(0.0, 0.0)).abs() <= 1e-12 * j.value().abs().max(1.0));
        let gx = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
        let gy = (f(0.0, h) - f(0.0, -h)) / (2.0 * h);
        prop_assert!(close(j.d(0), gx, 1e-5), "{s}: d/dx {} vs {gx}", j.d(0));
        prop_assert!(close(j.d(1), gy, 1e-5), "{s}: d/dy {} vs {gy}", j.d(1));
        let hh = 1e-3;
        let f = |dx: f64, dy: f64| eval(&e, x + dx, y + dy);
        let xx = (f(hh, 0.0) - 2.0 * f(0.0, 0.0) + f(-hh, 0.0)) / (hh * hh);
        let yy = (f(0.0, hh) - 2.0 * f(0.0, 0.0) + f(0.0, -hh)) / (hh * hh);
        let xy = (f(hh, hh) - f(hh, -hh) - f(-hh, hh) + f(-hh, -hh)) / (4.0 * hh * hh);
        prop_assert!(close(j.dd(0, 0), xx, 1e-4), "{s}: xx {} vs {xx}", j.dd(0, 0));
        prop_assert!(close(j.dd(1, 1), yy, 1e-4), "{s}: yy {} vs {yy}", j.dd(1, 1));
        prop_assert!(close(j.dd(0, 1), xy, 1e-4), "{s}: xy {} vs {xy}", j.dd(0, 1));
        prop_assert_eq!(j.dd(0, 1), j.dd(1, 0));
    }

    #[test]
    fn composition_matches_substituted_text(
        outer in template(),
        p in template(),
        q in template(),
        u in -1.0f64..1.0,
        v in -1.0f64..1.0,
    ) {
        // keep the inner maps inside [-1, 1]² where the templates are smooth
        let (p, q) = (format!("sin({})", fill(&p, "u", "v")), format!("cos({})", fill(&q, "u", "v")));
        let outer_e = Expr::parse(&fill(&outer, "x", "y"), &["x", "y"]).unwrap();
        let pe = Expr::parse(&p, &["u", "v"]).unwrap();
        let qe = Expr::parse(&q, &["u", "v"]).unwrap();
        let inner = [pe.eval_jet(&[u, v]).unwrap(), qe.eval_jet(&[u, v]).unwrap()];
        let composed = outer_e.eval_composed(&inner).unwrap();

        let substituted = fill(&outer, &format!("({p})"), &format!("({q})"));
        let direct = Expr::parse(&substituted, &["u", "v"]).unwrap().eval_jet(&[u, v]).unwrap();
        let ok = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
        prop_assert!(ok(composed.value(), direct.value()));
        for i in 0..2 {
            prop_assert!(ok(composed.d(i), direct.d(i)), "d{i}: {} vs {}", composed.d(i), direct.d(i));
            for k in 0..2 {
                prop_assert!(ok(composed.dd(i, k), direct.dd(i, k)));
            }
        }
    }

    #[test]
    fn valid_sentences_parse_and_print_round_trip(s in smooth_expr(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let e = Expr::parse(&s, &["x", "y"]).unwrap();
        let again = Expr::parse(&e.to_string(), &["x", "y"]).unwrap();
        let (a, b) = (eval(&e, x, y), eval(&again, x, y));
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{s} -> {e}");
    }

    #[test]
    fn corrupted_sentences_report_a_syntax_position(s in smooth_expr(), which in 0usize..4) {
        let bad = match which {
            0 => format!("{s}+"),
            1 => format!("({s}"),
            2 => format!("{s})"),
            _ => format!("*{s}"),
        };
        match Expr::parse(&bad, &["x", "y"]) {
            Err(ExprError::Syntax { pos, .. }) => prop_assert!(pos <= bad.len(), "{pos} > {}", bad.len()),
            other => prop_assert!(false, "{bad:?} gave {other:?}"),
        }
    }

    #[test]
    fn arbitrary_text_never_panics(s in "[ -~]{0,40}") {
        let _ = Expr::parse(&s, &["x", "y"]);
    }

    #[test]
    fn jet_arithmetic_is_exact_for_polynomials(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let x = Jet::variable(2, 0, a);
        let y = Jet::variable(2, 1, b);
        let p = x * x * y - y;
        prop_assert_eq!(p.value(), a * a * b - b);
        prop_assert_eq!(p.d(0), 2.0 * a * b);
        prop_assert_eq!(p.d(1), a * a - 1.0);
        prop_assert_eq!(p.dd(0, 0), 2.0 * b);
        prop_assert_eq!(p.dd(0, 1), 2.0 * a);
        prop_assert_eq!(p.dd(1, 1), 0.0);
    }
}
