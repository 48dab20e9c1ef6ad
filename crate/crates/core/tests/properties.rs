mod common;

use common::*;
use lpsolve::frames::{self, FrameSystem};
use lpsolve::irls::{self, IrlsOptions, UpdateMode};
use lpsolve::matcore::io::{format_matrix_csv, parse_matrix_str};
use lpsolve::matcore::{build_circulant, build_dft_matrix, circulant_eigen_check, lp_norm, rank, svd};
use lpsolve::opfit::{self, ExperimentSet};
use lpsolve::partition::{self, PartitionSpec};
use lpsolve::pinv::{self, CaseCode, WeightMatrix};
use lpsolve::{Matrix, Vector, C64};
use proptest::prelude::*;
use rand::Rng;

const ALL_CASES: [CaseCode; 10] = [
    CaseCode::C1a,
    CaseCode::C1b,
    CaseCode::C1c,
    CaseCode::C2a,
    CaseCode::C2b,
    CaseCode::C2c,
    CaseCode::C2d,
    CaseCode::C3a,
    CaseCode::C3b,
    CaseCode::C3c,
];

fn complex_matrix(rng: &mut rand::rngs::StdRng, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), m in 1usize..=16, n in 1usize..=16, cplx in any::<bool>()) {
        let mut rng = rng(seed);
        let a = if cplx { complex_matrix(&mut rng, m, n) } else { uniform_matrix(&mut rng, m, n) };
        let s = svd(&a).unwrap();
        let r = s.sigma.len();
        prop_assert!((&s.reconstruct() - &a).frobenius_norm() <= 1e-11 * a.frobenius_norm());
        prop_assert!((&s.u.adjoint() * &s.u).approx_eq(&Matrix::identity(r), 1e-10));
        prop_assert!((&s.v.adjoint() * &s.v).approx_eq(&Matrix::identity(r), 1e-10));
        prop_assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_reconstructs_rank_deficient(seed in any::<u64>(), m in 2usize..=8, n in 2usize..=8) {
        let mut rng = rng(seed);
        let r = rng.gen_range(1..m.min(n));
        let ints = int_matrix_of_rank(&mut rng, m, n, r);
        let a = to_matrix(&ints);
        let s = svd(&a).unwrap();
        prop_assert!((&s.reconstruct() - &a).frobenius_norm() <= 1e-11 * a.frobenius_norm());
        prop_assert_eq!(s.rank(None), exact_rank(&ints));
    }

    #[test]
    fn rank_is_transpose_and_gram_invariant(seed in any::<u64>(), m in 1usize..=8, n in 1usize..=8) {
        let mut rng = rng(seed);
        let r = rng.gen_range(1..=m.min(n));
        let a = to_matrix(&int_matrix_of_rank(&mut rng, m, n, r));
        prop_assert_eq!(rank(&a, None).unwrap(), r);
        prop_assert_eq!(rank(&a.transpose(), None).unwrap(), r);
        prop_assert_eq!(rank(&(&a.adjoint() * &a), None).unwrap(), r);
    }

    #[test]
    fn lp_norm_decreases_in_p(v in prop::collection::vec(-10.0f64..10.0, 1..12), p in 0.5f64..20.0, dq in 0.0f64..20.0) {
        let x = Vector::from_real(&v);
        let np = lp_norm(&x, p).unwrap();
        let nq = lp_norm(&x, p + dq).unwrap();
        prop_assert!(nq <= np * (1.0 + 1e-12) + 1e-300);
        prop_assert!(lp_norm(&x, f64::INFINITY).unwrap() <= nq * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn circulant_is_cyclic_convolution(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = rng(seed);
        let h = complex_vector(&mut rng, n);
        let x = complex_vector(&mut rng, n);
        let y = &build_circulant(&h).unwrap() * &x;
        for i in 0..n {
            let direct: C64 = (0..n).map(|k| h[(i + n - k) % n] * x[k]).sum();
            prop_assert!((y[i] - direct).norm() <= 1e-12);
        }
        let eig = circulant_eigen_check(&h).unwrap();
        prop_assert!(eig.residual <= 1e-10 * eig.scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn csv_round_trip_is_exact(seed in any::<u64>(), m in 1usize..=6, n in 1usize..=6) {
        let mut rng = rng(seed);
        let a = complex_matrix(&mut rng, m, n);
        let scales: Vec<f64> = (0..n).map(|_| 10f64.powi(rng.gen_range(-30..30))).collect();
        let a = a.scale_cols(&scales);
        let back = parse_matrix_str(&format_matrix_csv(&a)).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn penrose_holds_in_every_case(seed in any::<u64>(), case in 0usize..10) {
        let mut rng = rng(seed);
        let code = ALL_CASES[case];
        let (a, b) = case_instance(&mut rng, code);
        prop_assert_eq!(pinv::classify_case(&a, &b, None).unwrap().code, code);
        let ap = pinv::pinv(&a, None).unwrap();
        let report = pinv::verify_penrose(&a, &ap, 1e-8).unwrap();
        prop_assert!(report.pass, "{:?} {:?}", code, report.residuals);
        prop_assert!(pinv::pinv(&ap, None).unwrap().approx_eq(&a, 1e-8 * a.max_abs().max(1.0)));
        let aph = pinv::pinv(&a.adjoint(), None).unwrap();
        prop_assert!(aph.approx_eq(&ap.adjoint(), 1e-10 * ap.max_abs().max(1.0)));
    }

    #[test]
    fn range_and_null_identities(seed in any::<u64>(), case in 0usize..10) {
        let mut rng = rng(seed);
        let (a, _) = case_instance(&mut rng, ALL_CASES[case]);
        let n = a.cols();
        let ap = pinv::pinv(&a, None).unwrap();
        let z = uniform_vector(&mut rng, n);
        let az = &a * &z;
        let left = &az - &(&a * &(&ap * &az));
        prop_assert!(left.norm2() <= 1e-10 * a.frobenius_norm().max(1.0) * z.norm2().max(1.0));
        let w = uniform_vector(&mut rng, n);
        let null = &w - &(&ap * &(&a * &w));
        prop_assert!((&a * &null).norm2() <= 1e-10 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn routes_agree_on_full_rank(seed in any::<u64>(), m in 1usize..=8, n in 1usize..=8) {
        let mut rng = rng(seed);
        let a = uniform_matrix(&mut rng, m, n);
        let (analytic, _) = pinv::pinv_analytic(&a).unwrap();
        let via_svd = pinv::pinv_svd(&a, None).unwrap();
        let scale = via_svd.max_abs();
        prop_assume!(scale < 1e3);
        prop_assert!(analytic.approx_eq(&via_svd, 1e-9 * scale.max(1.0)));
        let limit = pinv::limit_pinv(&a, 1e-6).unwrap();
        prop_assume!(scale < 30.0);
        prop_assert!(analytic.approx_eq(&limit, 1e-5 * scale.max(1.0)));
    }

    #[test]
    fn unit_weights_match_plain_pinv(seed in any::<u64>(), n in 1usize..=6, extra in 0usize..=3) {
        let mut rng = rng(seed);
        let m = n + extra;
        let tall = uniform_matrix(&mut rng, m, n);
        let p = pinv::pinv(&tall, None).unwrap();
        prop_assume!(p.max_abs() < 1e3);
        let w = pinv::weighted_pinv_over(&tall, &WeightMatrix::identity(m)).unwrap();
        prop_assert!(w.approx_eq(&p, 1e-10 * p.max_abs().max(1.0)));
        let wide = tall.transpose();
        let w = pinv::weighted_pinv_under(&wide, &WeightMatrix::identity(m)).unwrap();
        prop_assert!(w.approx_eq(&p.transpose(), 1e-10 * p.max_abs().max(1.0)));
    }

    #[test]
    fn weight_scaling_leaves_minimizer(seed in any::<u64>(), n in 1usize..=5, extra in 1usize..=5, c in 0.01f64..100.0) {
        let mut rng = rng(seed);
        let m = n + extra;
        let a = uniform_matrix(&mut rng, m, n);
        let b = uniform_vector(&mut rng, m);
        let d: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..2.0)).collect();
        let x1 = &pinv::weighted_pinv_over(&a, &WeightMatrix::new(d.clone()).unwrap()).unwrap() * &b;
        let scaled: Vec<f64> = d.iter().map(|v| v * c).collect();
        let x2 = &pinv::weighted_pinv_over(&a, &WeightMatrix::new(scaled).unwrap()).unwrap() * &b;
        prop_assume!(x1.max_abs() < 1e4);
        prop_assert!(x1.approx_eq(&x2, 1e-9 * x1.max_abs().max(1.0)));
    }

    #[test]
    fn general_solution_family(seed in any::<u64>(), case in 0usize..10) {
        let mut rng = rng(seed);
        let (a, b) = case_instance(&mut rng, ALL_CASES[case]);
        let n = a.cols();
        let x0 = pinv::general_solution(&a, &b, &Vector::zeros(n)).unwrap();
        let y = uniform_vector(&mut rng, n).scale(5.0);
        let xy = pinv::general_solution(&a, &b, &y).unwrap();
        let scale = a.frobenius_norm().max(1.0) * x0.norm2().max(1.0);
        prop_assert!((&(&a * &xy) - &(&a * &x0)).norm2() <= 1e-10 * scale);
        prop_assert!(x0.norm2() <= xy.norm2() + 1e-12 * scale);
    }

    #[test]
    fn irls_p2_is_least_squares(seed in any::<u64>(), n in 1usize..=5, extra in 1usize..=10) {
        let mut rng = rng(seed);
        let m = n + extra;
        let a = uniform_matrix(&mut rng, m, n);
        let b = uniform_vector(&mut rng, m);
        let ls = &pinv::pinv(&a, None).unwrap() * &b;
        prop_assume!(ls.max_abs() < 1e3);
        let r = irls::irls_over(&a, &b, &IrlsOptions::over(2.0)).unwrap();
        prop_assert!(r.x.approx_eq(&ls, 1e-10 * ls.max_abs().max(1.0)));
        let at = a.transpose();
        let bt = uniform_vector(&mut rng, n);
        let mn = &pinv::pinv(&at, None).unwrap() * &bt;
        let r = irls::irls_under(&at, &bt, &IrlsOptions::under(2.0)).unwrap();
        prop_assert!(r.x.approx_eq(&mn, 1e-10 * mn.max_abs().max(1.0)));
    }

    #[test]
    fn irls_under_keeps_interpolating(seed in any::<u64>(), m in 1usize..=4, extra in 1usize..=4, p in 1.05f64..4.0, iters in 1usize..=15) {
        let mut rng = rng(seed);
        let n = m + extra;
        let a = uniform_matrix(&mut rng, m, n);
        let b = uniform_vector(&mut rng, m);
        let r = irls::irls_under(&a, &b, &IrlsOptions::under(p).with_iters(iters)).unwrap();
        prop_assert!((&(&a * &r.x) - &b).norm2() <= 1e-8 * b.norm2().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn newton_factor_recorded(seed in any::<u64>(), p in 2.0f64..40.0) {
        let mut rng = rng(seed);
        let a = uniform_matrix(&mut rng, 8, 3);
        let b = uniform_vector(&mut rng, 8);
        let r = irls::irls_over(&a, &b, &IrlsOptions::over(p).with_mode(UpdateMode::Newton).with_trace()).unwrap();
        prop_assert_eq!(r.trace.len(), r.iterations);
        for t in &r.trace {
            prop_assert!((t.q - 1.0 / (t.pk - 1.0)).abs() <= 1e-15);
            prop_assert!(t.error_norm.is_finite());
        }
    }

    #[test]
    fn frame_inequality(seed in any::<u64>(), d in 1usize..=5, extra in 0usize..=5) {
        let mut rng = rng(seed);
        let f = FrameSystem::new(uniform_matrix(&mut rng, d, d + extra)).unwrap();
        let Ok(rep) = frames::frame_bounds(&f) else { return Ok(()) };
        prop_assert!(0.0 < rep.lower && rep.lower <= rep.upper);
        let x = uniform_vector(&mut rng, d);
        let x = x.scale(1.0 / x.norm2());
        let energy = frames::analyze(&f, &x).unwrap().norm2().powi(2);
        prop_assert!(rep.lower - 1e-9 <= energy && energy <= rep.upper + 1e-9);
        let g = frames::dual_frame(&f).unwrap();
        prop_assert!((f.synthesis() * &g).approx_eq(&Matrix::identity(d), 1e-9));
        let back = frames::synthesize(&f, &(&g * &x)).unwrap();
        prop_assert!(back.approx_eq(&x, 1e-9));
    }

    #[test]
    fn augmented_duals_are_duals(seed in any::<u64>(), d in 1usize..=4, extra in 1usize..=4) {
        let mut rng = rng(seed);
        let n = d + extra;
        let f = FrameSystem::new(uniform_matrix(&mut rng, d, n)).unwrap();
        prop_assume!(frames::frame_bounds(&f).map(|r| r.lower > 1e-3).unwrap_or(false));
        let added = uniform_matrix(&mut rng, extra, n);
        let Ok(g) = frames::dual_frame_augmented(&f, &added) else { return Ok(()) };
        prop_assume!(g.max_abs() < 1e4);
        prop_assert!((f.synthesis() * &g).approx_eq(&Matrix::identity(d), 1e-9 * g.max_abs().max(1.0)));
    }

    #[test]
    fn tight_frames_reconstruct(seed in any::<u64>(), n in 3usize..=12, offset in 0.0f64..6.3) {
        let mut rng = rng(seed);
        let f = frames::harmonic_frame(n, offset).unwrap();
        let rep = frames::frame_bounds(&f).unwrap();
        prop_assert!(rep.tight);
        let x = uniform_vector(&mut rng, 2);
        let s = f.synthesis();
        let back = (&(s * &s.adjoint()) * &x).scale(1.0 / rep.lower);
        prop_assert!(back.approx_eq(&x, 1e-6));
    }

    #[test]
    fn dual_basis_is_biorthogonal(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = rng(seed);
        let f = uniform_matrix(&mut rng, n, n);
        let Ok(g) = frames::dual_basis(&f) else { return Ok(()) };
        prop_assume!(g.max_abs() < 1e3);
        let tol = 1e-10 * g.max_abs().max(1.0);
        prop_assert!((&f * &g).approx_eq(&Matrix::identity(n), tol));
        prop_assert!((&g * &f).approx_eq(&Matrix::identity(n), tol));
    }

    #[test]
    fn partition_consistency(seed in any::<u64>(), n in 1usize..=10, kf in 0.0f64..=1.0) {
        let mut rng = rng(seed);
        let k = ((n as f64) * kf).round() as usize;
        let known_x = subset(&mut rng, n, k);
        let known_y = subset(&mut rng, n, n - k);
        let spec = PartitionSpec::new(n, known_x.clone(), known_y.clone()).unwrap();
        let f = complex_matrix(&mut rng, n, n);
        let parts = partition::partition(&f, &spec).unwrap();
        prop_assert_eq!(parts.reassemble(), f.clone());
        prop_assert_eq!(parts.a.shape(), (k, k));
        prop_assert_eq!(parts.d.shape(), (n - k, n - k));

        let x_true = complex_vector(&mut rng, n);
        let y_true = &f * &x_true;
        let xk = x_true.select(&known_x);
        let yk = y_true.select(&known_y);
        let Ok(sol) = partition::partition_solve(&f, &spec, &xk, &yk) else { return Ok(()) };
        let x = sol.x(&spec, &xk);
        let y = sol.y(&spec, &yk);
        let scale = f.frobenius_norm() * x.norm2().max(1.0);
        prop_assert!((&(&f * &x) - &y).norm2() <= 1e-10 * scale.max(1.0));
        if k == n {
            prop_assert_eq!(y, &f * &xk);
        }
    }

    #[test]
    fn sparse_dft_solves_k_by_k(seed in any::<u64>(), e in 2u32..=6, k in 1usize..=8) {
        let mut rng = rng(seed);
        let n = 1usize << e;
        let k = k.min(n);
        let support = subset(&mut rng, n, k);
        let samples_at = subset(&mut rng, n, k);
        let mut spec = vec![C64::new(0.0, 0.0); n];
        for &j in &support {
            spec[j] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let signal = inverse_dft_direct(&spec);
        let samples: Vector = samples_at.iter().map(|&t| signal[t]).collect();
        let Ok(rec) = partition::sparse_dft_recover(&samples, &samples_at, &support, n) else { return Ok(()) };
        prop_assert_eq!(rec.solve_size, k);
        prop_assert!(max_abs_diff(rec.spectrum.as_slice(), &spec) <= 1e-8);
    }

    #[test]
    fn operator_round_trip(seed in any::<u64>(), m in 1usize..=5, n in 1usize..=5) {
        let mut rng = rng(seed);
        let a = uniform_matrix(&mut rng, m, n);
        let x = uniform_matrix(&mut rng, n, n);
        prop_assume!(pinv::pinv(&x, None).map(|p| p.max_abs() < 1e3).unwrap_or(false));
        let e = ExperimentSet::new(x.clone(), &a * &x).unwrap();
        prop_assert!(opfit::fit_operator_exact(&e).unwrap().approx_eq(&a, 1e-10 * 1e3));
    }

    #[test]
    fn ls_fit_is_stationary(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=4, extra in 1usize..=6) {
        let mut rng = rng(seed);
        let p = n + extra;
        let x = uniform_matrix(&mut rng, n, p);
        let b = uniform_matrix(&mut rng, m, p);
        let fit = opfit::fit_operator_ls(&ExperimentSet::new(x.clone(), b.clone()).unwrap()).unwrap();
        prop_assume!(fit.operator.max_abs() < 1e3);
        let grad = &(&(&fit.operator * &x) - &b) * &x.adjoint();
        prop_assert!(grad.max_abs() <= 1e-9 * fit.operator.max_abs().max(1.0));
    }

    #[test]
    fn regression_matches_normal_equations(seed in any::<u64>(), n in 1usize..=4, extra in 0usize..=6) {
        let mut rng = rng(seed);
        let p = n + extra;
        let x = uniform_matrix(&mut rng, n, p);
        let b = uniform_matrix(&mut rng, 1, p);
        let w = opfit::linear_regression(&ExperimentSet::new(x.clone(), b.clone()).unwrap()).unwrap();
        let ne = pinv::solve_normal_equations(&x.transpose(), &b.row(0)).unwrap();
        prop_assume!(ne.max_abs() < 1e2);
        prop_assert!(w.approx_eq(&ne, 1e-10 * ne.max_abs().max(1.0) * 10.0));
    }
}

#[test]
fn sparse_recoveries_share_a_k_dimensional_subspace() {
    let mut rng = rng(77);
    let n = 16;
    let k = 3;
    let support = subset(&mut rng, n, k);
    let samples_at = subset(&mut rng, n, k);
    let mut recovered = Vec::new();
    while recovered.len() < k + 3 {
        let mut spec = vec![C64::new(0.0, 0.0); n];
        for &j in &support {
            spec[j] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let signal = inverse_dft_direct(&spec);
        let samples: Vector = samples_at.iter().map(|&t| signal[t]).collect();
        let rec = partition::sparse_dft_recover(&samples, &samples_at, &support, n).unwrap();
        recovered.push(Vector::new(inverse_dft_direct(rec.spectrum.as_slice())).unwrap());
    }
    assert_eq!(rank(&Matrix::from_columns(&recovered).unwrap(), Some(1e-9)).unwrap(), k);
}

#[test]
fn full_partition_is_inversion() {
    let mut rng = rng(78);
    let n = 6;
    let f = uniform_matrix(&mut rng, n, n);
    let y = uniform_vector(&mut rng, n);
    let spec = PartitionSpec::new(n, vec![], (0..n).collect()).unwrap();
    let sol = partition::partition_solve(&f, &spec, &Vector::zeros(0), &y).unwrap();
    let x = sol.x(&spec, &Vector::zeros(0));
    let direct = gauss_solve(&rows_of(&f), &y.re()).unwrap();
    assert!(x.approx_eq(&Vector::from_real(&direct), 1e-10));
}

#[test]
fn dft_matches_direct_sum() {
    let mut rng = rng(79);
    for n in 1..=12 {
        let x = complex_vector(&mut rng, n);
        let y = &build_dft_matrix(n).unwrap() * &x;
        assert!(max_abs_diff(y.as_slice(), &dft_direct(x.as_slice())) <= 1e-12);
    }
}

/// Fixed instances: with a gradual homotopy the traced objective never
/// rises once the running exponent reaches p.
#[test]
fn gradual_homotopy_is_monotone() {
    let mut rng = rng(606);
    for _ in 0..20 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(n + 1..=20);
        let a = uniform_matrix(&mut rng, m, n);
        let b = uniform_vector(&mut rng, m);
        for p in [2.2, 2.5, 2.9] {
            let opts = IrlsOptions { homotopy_factor: 1.05, ..IrlsOptions::over(p) }
                .with_mode(UpdateMode::Full)
                .with_iters(600)
                .with_trace();
            let r = irls::irls_over(&a, &b, &opts).unwrap();
            assert!(r.converged);
            let settled: Vec<f64> = r.trace.iter().filter(|t| t.pk == p).map(|t| t.error_norm).collect();
            assert!(settled.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "p = {p}: {settled:?}");
        }
    }
}

#[test]
fn exact_rank_agrees_with_svd_rank() {
    let mut rng = rng(80);
    for _ in 0..50 {
        let m = rng.gen_range(1..=7);
        let n = rng.gen_range(1..=7);
        let ints = int_matrix(&mut rng, m, n);
        assert_eq!(exact_rank(&ints), rank(&to_matrix(&ints), None).unwrap());
    }
    assert_eq!(exact_rank(&[vec![1, 2], vec![2, 4]]), 1);
    assert_eq!(exact_rank(&[vec![0, 0], vec![0, 0]]), 0);
    assert_eq!(exact_rank(&[vec![0, 1], vec![1, 0]]), 2);
}
