use std::f64::consts::PI;

use heis_cauchy::expr::{eval, eval_dual, parse_str, Bindings};
use heis_cauchy::heisenberg::{
    group_inv, group_mul, levi_inner, pushforward, pushforward_coords, theta_eval,
};
use heis_cauchy::projection::{decompose_ab, projected_parea};
use heis_cauchy::surfaces::{p_area, p_area_excised, PansuSphere, Sheet};
use heis_cauchy::{parse_surface, ContactVector, Dim, HPoint, PansuDirection, QuadratureSpec, SphereRule, Surface};
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = HPoint> {
    prop::collection::vec(-3.0..3.0f64, 2 * n + 1).prop_map(|c| HPoint::new(c).unwrap())
}

fn unit(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, k)
        .prop_filter("nonzero", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let s = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / s).collect()
        })
}

fn triple() -> impl Strategy<Value = (HPoint, HPoint, HPoint)> {
    (1usize..=3).prop_flat_map(|n| (point(n), point(n), point(n)))
}

fn spec(radial: usize, angular: usize) -> QuadratureSpec {
    QuadratureSpec {
        radial_nodes: radial,
        angular_nodes: angular,
        ..QuadratureSpec::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_is_associative_with_inverses((p, q, r) in triple()) {
        let a = group_mul(&group_mul(&p, &q).unwrap(), &r).unwrap();
        let b = group_mul(&p, &group_mul(&q, &r).unwrap()).unwrap();
        prop_assert!(a.approx_eq(&b, 1e-12));
        let e = HPoint::origin(p.dim());
        prop_assert!(group_mul(&p, &group_inv(&p)).unwrap().approx_eq(&e, 1e-12));
        prop_assert!(group_mul(&group_inv(&p), &p).unwrap().approx_eq(&e, 1e-12));
    }

    #[test]
    fn contact_form_is_left_invariant(
        (p, q, w) in (1usize..=3).prop_flat_map(|n| {
            (point(n), point(n), prop::collection::vec(-2.0..2.0f64, 2 * n + 1))
        })
    ) {
        let pq = group_mul(&p, &q).unwrap();
        let lhs = theta_eval(&pq, &pushforward_coords(&p, &w).unwrap()).unwrap();
        let rhs = theta_eval(&q, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn pairing_is_left_invariant(
        (p, u, v) in (1usize..=3).prop_flat_map(|n| (point(n), point(n), unit(2 * n), unit(2 * n)))
            .prop_map(|(p, b, u, v)| {
                let u = ContactVector::new(b.clone(), u).unwrap();
                let v = ContactVector::new(b, v).unwrap();
                (p, u, v)
            })
    ) {
        let a = levi_inner(&u, &v).unwrap();
        let b = levi_inner(&pushforward(&p, &u).unwrap(), &pushforward(&p, &v).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn pansu_normals_are_unit(
        (n, lambda, frac, dir) in (1usize..=3, 0.25..4.0f64, 0.01..0.99f64)
            .prop_flat_map(|(n, l, f)| (Just(n), Just(l), Just(f), unit(2 * n)))
    ) {
        let s: Surface = PansuSphere::new(Dim::new(n).unwrap(), lambda).unwrap().into();
        for sheet in [Sheet::Upper, Sheet::Lower] {
            let q = s.point(frac / lambda, &dir, sheet).unwrap();
            let nv = q.normal.expect("regular point");
            prop_assert!((nv.levi_norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn graph_and_rotational_densities_agree(r in 0.01..0.95f64, dir in unit(2)) {
        let graph = parse_surface(
            r#"{"kind":"graph","n":1,"R":1.0,"f":"sqrt(R^2 - x1^2 - y1^2)"}"#,
        ).unwrap();
        let rot = parse_surface(r#"{"kind":"rotational","n":1,"R":1.0,"h_plus":"sphere"}"#).unwrap();
        for sheet in [Sheet::Upper, Sheet::Lower] {
            let a = graph.point(r, &dir, sheet).unwrap();
            let b = rot.point(r, &dir, sheet).unwrap();
            prop_assert!((a.density - b.density).abs() <= 1e-12 * (1.0 + b.density));
            prop_assert!(a.coords.approx_eq(&b.coords, 1e-12));
        }
    }

    #[test]
    fn expressions_round_trip(src in expression(), x in -2.0..2.0f64) {
        let ast = parse_str(&src).unwrap();
        let text = ast.to_string();
        let again = parse_str(&text).unwrap();
        prop_assert_eq!(&again.to_string(), &text);
        let b = Bindings::new().with("x", x);
        match (eval(&ast, &b), eval(&again, &b)) {
            (Ok(u), Ok(v)) => prop_assert!(u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan())),
            (Err(_), Err(_)) => {}
            (u, v) => prop_assert!(false, "{:?} vs {:?}", u, v),
        }
    }

    #[test]
    fn dual_numbers_match_differences(
        a in 0.5..2.0f64, c in -1.0..1.0f64, x in 0.1..1.5f64
    ) {
        let src = format!("sin({a}*x) * exp({c}*x) + sqrt(1 + x^2) - ln(x) + x^3/{a}");
        let ast = parse_str(&src).unwrap();
        let b = Bindings::new().with("x", x);
        let d = eval_dual(&ast, "x", &b).unwrap();
        let h = 1e-6;
        let f = |t: f64| eval(&ast, &Bindings::new().with("x", t)).unwrap();
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        prop_assert!((d.value - f(x)).abs() <= 1e-14 * (1.0 + d.value.abs()));
        prop_assert!((d.deriv - fd).abs() <= 1e-6 * (1.0 + fd.abs()));
    }

    #[test]
    fn ab_amplitude(lambda in 0.25..4.0f64, u in 0.001..0.999f64, v in 0.001..0.999f64) {
        let (r, rbar) = (u / lambda, v / lambda);
        let d = decompose_ab(r, rbar, lambda).unwrap();
        let l2 = lambda * lambda * rbar * rbar;
        let target = rbar * rbar / (1.0 - l2);
        prop_assert!((d.a * d.a + d.b * d.b - target).abs() <= 1e-9 * target);
        prop_assert!((d.amplitude - target.sqrt()).abs() <= 1e-9 * target.sqrt());
    }
}

// Sums, products and unary calls over `x` and small constants.
fn expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        (0.1..5.0f64).prop_map(|c| format!("{c}")),
        (1u32..9).prop_map(|k| k.to_string()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"]))
                .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            (inner.clone(), 1u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            (inner.clone(), prop::sample::select(vec!["sin", "cos", "abs", "exp", "sqrt"]))
                .prop_map(|(a, f)| format!("{f}({a})")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

#[test]
fn halving_nodes_converges() {
    for n in 1..=2 {
        let s: Surface = PansuSphere::new(Dim::new(n).unwrap(), 1.0).unwrap().into();
        let exact = heis_cauchy::Constants::new(Dim::new(n).unwrap(), 1.0).unwrap().pansu_area();
        let mut prev = f64::INFINITY;
        for m in [4, 8, 16, 32] {
            let err = (p_area(&s, &spec(m, 2 * m)).unwrap().value - exact).abs();
            assert!(err <= prev.max(1e-12), "n={n} m={m} err={err} prev={prev}");
            prev = err;
        }
        assert!(prev <= 1e-8 * exact, "n={n} err={prev}");
    }
}

#[test]
fn monte_carlo_pansu_projection_within_three_standard_errors() {
    let n = Dim::new(2).unwrap();
    let s: Surface = PansuSphere::new(n, 1.0).unwrap().into();
    let q = QuadratureSpec {
        sphere_rule: SphereRule::MonteCarlo,
        mc_samples: 200_000,
        ..QuadratureSpec::default()
    };
    for seed in 0..6u64 {
        let d = &PansuDirection::random(n, 1.0, 1, 100 + seed).unwrap()[0];
        let r = projected_parea(&s, d, &QuadratureSpec { seed, ..q }).unwrap();
        let se = r.std_error.expect("monte carlo result");
        assert!((r.value - PI * PI).abs() <= 3.0 * se, "seed {seed}: {} +- {se}", r.value);
    }
}

#[test]
fn excision_recovers_the_full_area() {
    let s: Surface = PansuSphere::new(Dim::new(1).unwrap(), 1.0).unwrap().into();
    let q = spec(128, 128);
    let full = p_area(&s, &q).unwrap().value;
    let mut prev = 0.0;
    for eps in [0.1, 0.03, 0.01, 1e-3, 1e-5] {
        let cut = p_area_excised(&s, eps, &q).unwrap().value;
        assert!(cut >= prev - 1e-10 && cut <= full + 1e-10, "eps={eps}: cut={cut} prev={prev} full={full}");
        // Near the poles D ~ r, so the missing piece is about 4 pi eps^3 / 3.
        assert!(full - cut <= 5.0 * eps * eps * eps + 1e-10, "eps={eps}: {}", full - cut);
        prev = cut;
    }
}
