use finsler_robin::norm::{numeric_dual, TOL_POLAR};
use finsler_robin::vec2::{self, Vec2};
use finsler_robin::{FinslerNorm, NormSpec};
use proptest::prelude::*;

fn norm_strategy() -> impl Strategy<Value = FinslerNorm> {
    prop_oneof![
        Just(FinslerNorm::euclidean()),
        // M = RᵀDR with eigenvalues in [0.2, 5].
        (0.2f64..5.0, 0.2f64..5.0, 0.0f64..std::f64::consts::PI).prop_map(|(l1, l2, th)| {
            let (c, s) = (th.cos(), th.sin());
            let m = [
                [l1 * c * c + l2 * s * s, (l1 - l2) * c * s],
                [(l1 - l2) * c * s, l1 * s * s + l2 * c * c],
            ];
            FinslerNorm::quadratic(m).unwrap()
        }),
        (1.3f64..8.0).prop_map(|p| FinslerNorm::lp(p).unwrap()),
    ]
}

fn vector() -> impl Strategy<Value = Vec2> {
    (0.0f64..std::f64::consts::TAU, -2.0f64..2.0)
        .prop_map(|(th, e)| vec2::scale(10f64.powf(e), vec2::unit_from_angle(th)))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn homogeneous_and_even(norm in norm_strategy(), xi in vector(), t in -10.0f64..10.0) {
        let f = norm.eval(vec2::scale(t, xi));
        prop_assert!((f - t.abs() * norm.eval(xi)).abs() <= 1e-12 * (1.0 + f));
        prop_assert_eq!(norm.eval(vec2::scale(-1.0, xi)), norm.eval(xi));
        prop_assert_eq!(norm.eval([0.0, 0.0]), 0.0);
    }

    #[test]
    fn euler_and_duality(norm in norm_strategy(), xi in vector()) {
        let g = norm.grad(xi).unwrap();
        let gp = norm.polar_grad(xi).unwrap();
        prop_assert!(close(vec2::dot(g, xi), norm.eval(xi), 1e-8));
        prop_assert!(close(vec2::dot(gp, xi), norm.polar_eval(xi), 1e-8));
        prop_assert!((norm.polar_eval(g) - 1.0).abs() <= 1e-8);
        prop_assert!((norm.eval(gp) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn inversion(norm in norm_strategy(), xi in vector()) {
        let back = vec2::scale(norm.polar_eval(xi), norm.grad(norm.polar_grad(xi).unwrap()).unwrap());
        prop_assert!(vec2::norm(vec2::sub(back, xi)) <= 1e-7 * vec2::norm(xi));
    }

    #[test]
    fn cauchy_schwarz(norm in norm_strategy(), xi in vector(), eta in vector()) {
        let bound = norm.eval(xi) * norm.polar_eval(eta);
        prop_assert!(vec2::dot(xi, eta).abs() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn bipolar_and_numeric_polar(norm in norm_strategy(), th in 0.0f64..std::f64::consts::TAU) {
        let u = vec2::unit_from_angle(th);
        let f = numeric_dual(|v| norm.polar_eval(v), u);
        prop_assert!((f - norm.eval(u)).abs() <= TOL_POLAR, "{} vs {}", f, norm.eval(u));
        prop_assert!((norm.polar_eval_numeric(u) - norm.polar_eval(u)).abs() <= TOL_POLAR);
    }

    #[test]
    fn gradients_match_central_differences(norm in norm_strategy(), th in 0.0f64..std::f64::consts::TAU) {
        let x = vec2::unit_from_angle(th);
        let h = 1e-6;
        let fd = |f: &dyn Fn(Vec2) -> f64| [
            (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h),
            (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h),
        ];
        let g = norm.grad(x).unwrap();
        let gp = norm.polar_grad(x).unwrap();
        let fg = fd(&|v| norm.eval(v));
        let fgp = fd(&|v| norm.polar_eval(v));
        for i in 0..2 {
            prop_assert!((g[i] - fg[i]).abs() <= 1e-5);
            prop_assert!((gp[i] - fgp[i]).abs() <= 1e-5);
        }
    }

    #[test]
    fn bounds_sandwich_the_norm(norm in norm_strategy(), xi in vector()) {
        let (a, b) = norm.norm_bounds();
        let len = vec2::norm(xi);
        prop_assert!(0.0 < a && a <= b);
        prop_assert!(norm.eval(xi) >= a * len * (1.0 - 1e-9));
        prop_assert!(norm.eval(xi) <= b * len * (1.0 + 1e-9));
    }

    #[test]
    fn wulff_boundary_is_convex_and_on_level_set(norm in norm_strategy(), r in 0.1f64..3.0) {
        let w = norm.wulff_boundary(r, 256).unwrap();
        prop_assert_eq!(w.vertices.len(), w.n_vertices);
        let n = w.vertices.len();
        for i in 0..n {
            let (p, q, s) = (w.vertices[i], w.vertices[(i + 1) % n], w.vertices[(i + 2) % n]);
            prop_assert!((norm.polar_eval(p) - r).abs() <= TOL_POLAR * r.max(1.0));
            prop_assert!(vec2::cross(vec2::sub(q, p), vec2::sub(s, q)) > 0.0);
        }
    }

    #[test]
    fn spec_round_trips_through_json(norm in norm_strategy()) {
        let json = serde_json::to_string(norm.spec()).unwrap();
        let back: NormSpec = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, norm.spec());
        prop_assert_eq!(FinslerNorm::new(back).unwrap().eval([0.3, -0.7]), norm.eval([0.3, -0.7]));
    }
}

#[test]
fn lp_gradient_oracle_at_diagonal() {
    let n = FinslerNorm::lp(4.0).unwrap();
    let g = n.grad([1.0, 1.0]).unwrap();
    let want = 2f64.powf(0.25) / 2.0;
    assert!((g[0] - want).abs() < 1e-14 && (g[1] - want).abs() < 1e-14);
    // q = 4/3: ∇F°(v) = |v|^{q-2} v / ‖v‖_q^{q-1}, so ∇F°(1,1) = 2^{-1/4}(1,1).
    let gp = n.polar_grad([1.0, 1.0]).unwrap();
    assert!((gp[0] - 2f64.powf(-0.25)).abs() < 1e-14 && (gp[1] - gp[0]).abs() < 1e-15);
}

#[test]
fn wulff_area_numeric_agrees() {
    for norm in [
        FinslerNorm::euclidean(),
        FinslerNorm::quadratic([[4.0, 0.0], [0.0, 1.0]]).unwrap(),
        FinslerNorm::lp(4.0).unwrap(),
        FinslerNorm::lp(1.5).unwrap(),
    ] {
        let (a, b) = (norm.wulff_area(), norm.wulff_area_numeric());
        assert!(((a - b) / a).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn rejects_endpoint_exponents_and_indefinite_matrices() {
    assert!(FinslerNorm::lp(1.0).is_err());
    assert!(FinslerNorm::lp(f64::INFINITY).is_err());
    assert!(FinslerNorm::quadratic([[1.0, 2.0], [2.0, 1.0]]).is_err());
    assert!(FinslerNorm::quadratic([[1.0, 0.5], [0.0, 1.0]]).is_err());
}
