use std::time::Instant;

use finsler_robin::fem::{
    discrete_quotient, eigen_derivative, mesh_polygon, mesh_wulff, pushforward_quotient,
    solve_linear_quadratic, solve_rayleigh, PiecewiseLinear, SolverOptions,
};
use finsler_robin::radial::wulff_secular;
use finsler_robin::{ConvexPolygon, FinslerNorm};

const DIAG41: [[f64; 2]; 2] = [[4.0, 0.0], [0.0, 1.0]];

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn zero_alpha_gives_constant() {
    let mesh = mesh_polygon(&ConvexPolygon::regular(5, 1.0).unwrap(), 2).unwrap();
    let norm = FinslerNorm::lp(4.0).unwrap();
    let sol = solve_rayleigh(&mesh, &norm, 0.0, &SolverOptions::default()).unwrap();
    assert_eq!(sol.lambda, 0.0);
    assert_eq!(sol.iterations, 0);
    let c = sol.u[0];
    assert!(sol.u.iter().all(|v| (v - c).abs() < 1e-15));
    let lin = solve_linear_quadratic(&mesh, DIAG41, 0.0).unwrap();
    assert_eq!(lin.lambda, 0.0);
}

#[test]
fn disk_converges_to_secular_value() {
    let e = FinslerNorm::euclidean();
    let exact = wulff_secular(1.0, -1.0).unwrap();
    let mut errors = Vec::new();
    for level in 2..=4 {
        let mesh = mesh_wulff(&e, 1.0, 16, level).unwrap();
        let t = Instant::now();
        let sol = solve_linear_quadratic(&mesh, [[1.0, 0.0], [0.0, 1.0]], -1.0).unwrap();
        eprintln!(
            "level {level}: {} nodes, {:?}",
            mesh.n_vertices(),
            t.elapsed()
        );
        errors.push(rel(sol.lambda, exact));
    }
    eprintln!("errors {errors:?}");
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.7, "{errors:?}");
    }
    assert!(errors[2] < 1e-2);
}

#[test]
fn quadratic_wulff_matches_disk() {
    let q = FinslerNorm::quadratic(DIAG41).unwrap();
    let mesh = mesh_wulff(&q, 1.0, 16, 4).unwrap();
    let sol = solve_linear_quadratic(&mesh, DIAG41, -1.0).unwrap();
    assert!(rel(sol.lambda, wulff_secular(1.0, -1.0).unwrap()) < 1e-2);
}

#[test]
fn solvers_agree_on_quadratic_norms() {
    let q = FinslerNorm::quadratic(DIAG41).unwrap();
    let mesh = mesh_polygon(&ConvexPolygon::rectangle(3.0, 1.0).unwrap(), 3).unwrap();
    for alpha in [-0.1, -1.0, -5.0] {
        let t = Instant::now();
        let lin = solve_linear_quadratic(&mesh, DIAG41, alpha).unwrap();
        let t_lin = t.elapsed();
        let t = Instant::now();
        let ray = solve_rayleigh(&mesh, &q, alpha, &SolverOptions::default()).unwrap();
        eprintln!(
            "alpha {alpha}: lin {} ({t_lin:?}), rayleigh {} in {} its ({:?})",
            lin.lambda,
            ray.lambda,
            ray.iterations,
            t.elapsed()
        );
        assert!(rel(ray.lambda, lin.lambda) < 1e-8);
        assert!(lin.is_single_signed() && ray.is_single_signed());
    }
}

#[test]
fn square_corner_modes_at_large_alpha() {
    let e = FinslerNorm::euclidean();
    let mesh = mesh_polygon(&ConvexPolygon::unit_square(), 4).unwrap();
    let lin = solve_linear_quadratic(&mesh, [[1.0, 0.0], [0.0, 1.0]], -5.0).unwrap();
    let ray = solve_rayleigh(&mesh, &e, -5.0, &SolverOptions::default()).unwrap();
    assert!(
        rel(ray.lambda, lin.lambda) < 1e-8,
        "{} vs {}",
        ray.lambda,
        lin.lambda
    );
    assert!(lin.lambda <= -5.0 * 4.0);
}

#[test]
fn lp_solution_respects_constant_bound_and_sign() {
    let norm = FinslerNorm::lp(4.0).unwrap();
    let poly = ConvexPolygon::regular(5, 1.0).unwrap();
    let mesh = mesh_polygon(&poly, 3).unwrap();
    let t = Instant::now();
    let sol = solve_rayleigh(&mesh, &norm, -1.0, &SolverOptions::default()).unwrap();
    eprintln!("lp4 pentagon: {} its, {:?}", sol.iterations, t.elapsed());
    let summary = sol.summary(&mesh, &norm);
    assert!(sol.lambda <= summary.pf_over_v_bound + 1e-9);
    assert!(sol.is_single_signed());
}

#[test]
fn change_of_variables_is_exact() {
    let q = FinslerNorm::quadratic(DIAG41).unwrap();
    let mesh = mesh_wulff(&q, 1.0, 16, 2).unwrap();
    // M^{-1/2} = diag(1/2, 1) maps the Wulff ellipse onto the unit disk.
    let disk = mesh.transformed([[0.5, 0.0], [0.0, 1.0]]).unwrap();
    let u: Vec<f64> = mesh
        .vertices
        .iter()
        .map(|v| 1.0 + 0.3 * v[0] - v[1] * v[1] + (v[0] * v[1]).sin())
        .collect();
    for alpha in [0.0, -0.7, -3.0] {
        let a = discrete_quotient(&mesh, &q, alpha, &u);
        let b = discrete_quotient(&disk, &FinslerNorm::euclidean(), alpha, &u);
        assert!(rel(a, b) < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn derivative_matches_finite_differences() {
    let q = FinslerNorm::quadratic(DIAG41).unwrap();
    let poly = ConvexPolygon::regular(5, 1.0).unwrap();
    let mesh = mesh_polygon(&poly, 3).unwrap();
    let h = 1e-4;
    let solve = |a: f64| solve_linear_quadratic(&mesh, DIAG41, a).unwrap();
    for alpha in [-0.5, -2.0] {
        let d = eigen_derivative(&solve(alpha), &mesh, &q);
        let fd = (solve(alpha + h).lambda - solve(alpha - h).lambda) / (2.0 * h);
        assert!(d > 0.0);
        assert!(rel(d, fd) < 1e-3, "{d} vs {fd}");
    }
    let d0 = eigen_derivative(&solve(0.0), &mesh, &q);
    assert!(rel(d0, poly.anis_perimeter(&q) / poly.area()) < 1e-8);
}

#[test]
fn eigenvalue_is_concave_in_alpha() {
    let mesh = mesh_polygon(&ConvexPolygon::unit_square(), 3).unwrap();
    let id = [[1.0, 0.0], [0.0, 1.0]];
    let lams: Vec<f64> = (0..7)
        .map(|i| {
            solve_linear_quadratic(&mesh, id, -0.5 * i as f64)
                .unwrap()
                .lambda
        })
        .collect();
    for w in lams.windows(3) {
        assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-8);
    }
}

#[test]
fn pushforward_constant_and_linear_profiles() {
    let sq = ConvexPolygon::unit_square();
    let e = FinslerNorm::euclidean();
    let one = PiecewiseLinear::uniform(1.0, vec![1.0, 1.0]).unwrap();
    let pq = pushforward_quotient(&sq, &e, &one, -1.0, 2).unwrap();
    assert!((pq.lhs + 4.0).abs() < 1e-6 && (pq.rhs + 4.0).abs() < 1e-6);

    let lin = PiecewiseLinear::uniform(1.0, vec![1.0, 0.4]).unwrap();
    let pq = pushforward_quotient(&sq, &e, &lin, -1.0, 5).unwrap();
    assert!(rel(pq.lhs, pq.rhs) < 1e-3, "{pq:?}");
    let mesh = mesh_polygon(&sq, 5).unwrap();
    let sol = solve_linear_quadratic(&mesh, [[1.0, 0.0], [0.0, 1.0]], -1.0).unwrap();
    assert!(sol.lambda <= pq.lhs);
}

#[test]
fn solution_exports() {
    let mesh = mesh_polygon(&ConvexPolygon::unit_square(), 1).unwrap();
    let sol = solve_linear_quadratic(&mesh, [[1.0, 0.0], [0.0, 1.0]], -1.0).unwrap();
    let csv = sol.to_csv(&mesh);
    assert!(csv.starts_with("x,y,u\n"));
    assert_eq!(csv.lines().count(), mesh.n_vertices() + 1);
    let json = serde_json::to_value(sol.summary(&mesh, &FinslerNorm::euclidean())).unwrap();
    for key in [
        "lambda",
        "alpha",
        "iterations",
        "residual",
        "pf_over_v_bound",
    ] {
        assert!(json.get(key).is_some());
    }
}
