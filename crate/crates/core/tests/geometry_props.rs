use finsler_robin::vec2::{self, Vec2};
use finsler_robin::{ConvexPolygon, FinslerNorm};
use proptest::prelude::*;

fn norm_strategy() -> impl Strategy<Value = FinslerNorm> {
    prop_oneof![
        Just(FinslerNorm::euclidean()),
        (0.3f64..3.0, -0.5f64..0.5)
            .prop_map(|(d, o)| { FinslerNorm::quadratic([[1.0, o], [o, d]]).unwrap() }),
        (1.3f64..6.0).prop_map(|p| FinslerNorm::lp(p).unwrap()),
    ]
}

fn polygon_strategy() -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec((-2.0f64..2.0, -1.0f64..1.0), 3..20).prop_filter_map(
        "degenerate hull",
        |pts| {
            let pts: Vec<Vec2> = pts.into_iter().map(|(x, y)| [x, y]).collect();
            ConvexPolygon::convex_hull(&pts)
                .ok()
                .filter(|p| p.area() > 0.05)
        },
    )
}

/// `d_F(x, ∂Ω) = min_y F°(x − y)` by sampling each edge, then refining the
/// best sample by ternary search (`F°(x − y)` is convex along an edge).
fn brute_force_distance(poly: &ConvexPolygon, norm: &FinslerNorm, x: Vec2, per_edge: usize) -> f64 {
    let v = poly.vertices();
    let n = v.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let f =
            |s: f64| norm.polar_eval(vec2::sub(x, vec2::add(a, vec2::scale(s, vec2::sub(b, a)))));
        let step = 1.0 / per_edge as f64;
        let j_best = (0..=per_edge)
            .min_by(|&j, &k| f(j as f64 * step).total_cmp(&f(k as f64 * step)))
            .unwrap();
        let (mut lo, mut hi) = (
            (j_best as f64 - 1.0).max(0.0) * step,
            (j_best as f64 + 1.0).min(per_edge as f64) * step,
        );
        for _ in 0..200 {
            let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
            if f(m1) <= f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best = best.min(f(0.5 * (lo + hi))).min(f(j_best as f64 * step));
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_matches_boundary_sampling(
        poly in polygon_strategy(),
        norm in norm_strategy(),
        w in (0.05f64..0.95, 0.05f64..0.95),
    ) {
        // A random interior point as a convex combination of centroid and vertex.
        let c = poly.centroid();
        let v = poly.vertices()[(w.1 * poly.len() as f64) as usize % poly.len()];
        let x = vec2::add(c, vec2::scale(w.0, vec2::sub(v, c)));
        let per_edge = 100_000 / poly.len();
        let exact = poly.anis_distance(x, &norm).unwrap();
        let brute = brute_force_distance(&poly, &norm, x, per_edge);
        prop_assert!(brute >= exact - 1e-12);
        prop_assert!(brute - exact <= 1e-6 * poly.diameter(), "{} vs {}", exact, brute);
    }

    #[test]
    fn inradius_is_attained(poly in polygon_strategy(), norm in norm_strategy()) {
        let (r, center) = poly.inradius_with_center(&norm);
        prop_assert!((poly.anis_distance(center, &norm).unwrap() - r).abs() <= 1e-8);
        prop_assert!(poly.inner_parallel(&norm, r * (1.0 - 1e-6)).is_some());
        prop_assert!(poly.inner_parallel(&norm, r * (1.0 + 1e-6) + 1e-10).is_none());
    }

    #[test]
    fn profile_is_monotone(poly in polygon_strategy(), norm in norm_strategy()) {
        let p = poly.profile(&norm, 512).unwrap();
        prop_assert_eq!(p.a[0], 0.0);
        prop_assert!((p.a[p.a.len() - 1] - p.a0).abs() <= 1e-9);
        prop_assert_eq!(p.l[0], p.l0);
        prop_assert!((p.r[0] - p.l0 / (2.0 * p.kappa)).abs() <= 1e-12 * p.r[0]);
        for i in 0..p.t_grid.len() - 1 {
            prop_assert!(p.t_grid[i + 1] >= p.t_grid[i]);
            prop_assert!(p.a[i + 1] >= p.a[i] - 1e-12);
            prop_assert!(p.l[i + 1] <= p.l[i] + 1e-9 * p.l0);
            prop_assert!(p.r[i + 1] <= p.r[i] + 1e-12);
            let dt = p.t_grid[i + 1] - p.t_grid[i];
            if dt > 0.0 {
                prop_assert!(((p.r[i + 1] - p.r[i]) / dt).abs() <= 1.0 + 1e-6);
            }
        }
        // Central differences at interior points of the uniform grid whose
        // stencil holds no vertex event (A is only C¹ across events).
        let n = p.t_grid.len() - 1;
        let count = |t: f64| poly.inner_parallel(&norm, t).map_or(0, |q| q.len());
        for i in 1..n - 1 {
            if count(p.t_grid[i - 1]) != count(p.t_grid[i + 1]) {
                continue;
            }
            let da = (p.a[i + 1] - p.a[i - 1]) / (p.t_grid[i + 1] - p.t_grid[i - 1]);
            prop_assert!((da - p.l[i]).abs() <= 1e-3 * p.l[i], "t {}: dA/dt {} vs L {}", p.t_grid[i], da, p.l[i]);
        }
    }

    #[test]
    fn radii_are_ordered(poly in polygon_strategy(), norm in norm_strategy()) {
        let r = poly.parallel_radii(&norm);
        let kappa = norm.wulff_area();
        prop_assert!(0.0 <= r.r1 && r.r1 < r.r2 && r.r3 <= r.r2);
        // r1 ≤ r3 is not automatic: it holds exactly when P_F² ≤ 8κV.
        let p = poly.anis_perimeter(&norm);
        prop_assert_eq!(r.r1 <= r.r3, p * p <= 8.0 * kappa * poly.area() * (1.0 + 1e-12));
        prop_assert!((kappa * (r.r2 * r.r2 - r.r1 * r.r1) - poly.area()).abs() <= 1e-9 * poly.area().max(1.0));
        prop_assert!(poly.isoperimetric_deficit(&norm) >= 0.0);
    }

    #[test]
    fn perimeter_sandwich(poly in polygon_strategy(), norm in norm_strategy()) {
        let (a, b) = norm.norm_bounds();
        let (p, pf) = (poly.perimeter(), poly.anis_perimeter(&norm));
        prop_assert!(a * p <= pf * (1.0 + 1e-9) && pf <= b * p * (1.0 + 1e-9));
    }

    #[test]
    fn eikonal_away_from_ridges(poly in polygon_strategy(), norm in norm_strategy()) {
        prop_assert!(poly.eikonal_check(&norm, 200) <= 1e-4);
    }
}

#[test]
fn steiner_error_halves_when_wulff_resolution_doubles() {
    let sq = ConvexPolygon::rectangle(3.0, 1.0).unwrap();
    for norm in [
        FinslerNorm::euclidean(),
        FinslerNorm::quadratic([[4.0, 0.0], [0.0, 1.0]]).unwrap(),
        FinslerNorm::lp(4.0).unwrap(),
    ] {
        let errs: Vec<f64> = [256, 512, 1024, 2048]
            .iter()
            .map(|&n| {
                sq.steiner_check(&norm, 0.5, n)
                    .unwrap()
                    .max_relative_error()
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= 0.5 * w[0] * (1.0 + 1e-6), "{errs:?}");
        }
        assert!(
            sq.steiner_check(&norm, 0.5, 4096)
                .unwrap()
                .max_relative_error()
                < 1e-3
        );
    }
}

#[test]
fn fine_wulff_polygon_is_nearly_optimal() {
    for norm in [
        FinslerNorm::quadratic([[4.0, 0.0], [0.0, 1.0]]).unwrap(),
        FinslerNorm::lp(4.0).unwrap(),
    ] {
        let w = ConvexPolygon::from_wulff(&norm.wulff_boundary(1.5, 8192).unwrap()).unwrap();
        let pf = w.anis_perimeter(&norm);
        let deficit = w.isoperimetric_deficit(&norm);
        assert!(deficit >= 0.0 && deficit <= 1e-3 * pf * pf);
        let r = w.parallel_radii(&norm);
        assert!(r.r1 < 1e-2 && (r.r2 - 1.5).abs() < 1e-3 && (r.r3 - 1.5).abs() < 1e-3);
        let p = w.profile(&norm, 256).unwrap();
        assert!(p.r[p.r.len() - 1] < 1e-2);
    }
}
