mod common;

use common::{finite_difference, gaussian_matrix, gaussian_vector, generated, rel, rng, unvec};
use proptest::prelude::*;
use stlscond_core::condition::{
    build_k_dense, kappa_f1, kappa_f2, kappa_kron, kappa_ols, kappa_tls_bg, kappa_tls_bg_with,
    relative_from_absolute, OlsForm, SigmaPower,
};
use stlscond_core::generator::{generate, GeneratorSpec};
use stlscond_core::numerics::{svd, DenseMatrix, Vector};
use stlscond_core::stls::{check_genericity, solve_stls, StlsProblem};

#[test]
fn kron_equals_f1_and_f2() {
    let (p, s) = generated(10, 6, 1.0, 0.1, 5);
    let k = kappa_kron(&s, p.a()).unwrap().absolute;
    assert!(rel(kappa_f1(&s, p.a()).unwrap().absolute, k) <= 1e-10);
    let (p, s) = generated(10, 6, 5.0, 0.1, 5);
    let k = kappa_kron(&s, p.a()).unwrap().absolute;
    assert!(rel(kappa_f2(&s, p.a()).unwrap().absolute, k) <= 1e-10);
}

#[test]
fn f1_matches_kron_near_nongeneric() {
    let (p, s) = generated(50, 30, 0.05, 0.001, 9);
    let k = kappa_kron(&s, p.a()).unwrap().absolute;
    let f1 = kappa_f1(&s, p.a()).unwrap().absolute;
    assert!(rel(f1, k) <= 1e-8, "kron {k} f1 {f1}");
}

#[test]
fn f2_matches_f1_larger_problem() {
    let (p, s) = generated(50, 30, 5.0, 0.1, 2);
    let f1 = kappa_f1(&s, p.a()).unwrap().absolute;
    let f2 = kappa_f2(&s, p.a()).unwrap().absolute;
    assert!(rel(f2, f1) <= 1e-9);
}

#[test]
fn first_order_prediction_matches_finite_differences() {
    let (p, s) = generated(10, 6, 1.0, 0.1, 13);
    let k = build_k_dense(&s, p.a()).unwrap();
    let mut g = rng(99);
    let t = 1e-7;
    for _ in 0..20 {
        let dir = gaussian_vector(10 * 7, &mut g);
        let (da, db) = unvec(&dir, 10, 6);
        let predicted = &k * &dir;
        let fd = finite_difference(&p, &s, &da, &db, t);
        assert!(
            (&fd - &predicted).norm() <= 1e-5 * predicted.norm(),
            "fd {fd} vs {predicted}"
        );
    }
}

#[test]
fn relative_condition_recomputed() {
    let (p, s) = generated(20, 10, 1.0, 0.1, 4);
    let abs = kappa_f2(&s, p.a()).unwrap().absolute;
    let got = relative_from_absolute(&p, &s, abs).unwrap();
    let aug = p.augmented();
    let fro = aug.iter().map(|v| v * v).sum::<f64>().sqrt();
    let want = abs * fro / s.x().iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(rel(got, want) <= 1e-14);
    let rep = kappa_f2(&s, p.a()).unwrap().with_relative(&p, &s).unwrap();
    assert!(rel(rep.relative.unwrap(), rep.absolute * fro / s.x().norm()) <= 1e-14);
}

#[test]
fn tls_closed_form_matches_quadratic_form() {
    let (p, s) = generated(10, 6, 1.0, 0.1, 8);
    let f1 = kappa_f1(&s, p.a()).unwrap().absolute;
    assert!(rel(kappa_tls_bg(&s, p.a()).unwrap().absolute, f1) <= 1e-9);
    let (p, s) = generated(10, 6, 1.0, 0.001, 8);
    let kron = kappa_kron(&s, p.a()).unwrap().absolute;
    assert!(rel(kappa_tls_bg(&s, p.a()).unwrap().absolute, kron) <= 1e-8);
}

#[test]
fn unsquared_tls_variant_disagrees() {
    let (p, s) = generated(10, 6, 1.0, 0.1, 8);
    let f1 = kappa_f1(&s, p.a()).unwrap().absolute;
    let unsq = kappa_tls_bg_with(&s, p.a(), SigmaPower::Unsquared).unwrap().absolute;
    assert!(rel(unsq, f1) > 1e-3, "unsquared {unsq} vs {f1}");
}

#[test]
fn ols_forms_agree_on_random_matrix() {
    let mut g = rng(10);
    let a = gaussian_matrix(10, 4, &mut g);
    let b = gaussian_vector(10, &mut g);
    let f1 = kappa_ols(&a, &b, OlsForm::F1).unwrap().absolute;
    let f2 = kappa_ols(&a, &b, OlsForm::F2).unwrap().absolute;
    let kr = kappa_ols(&a, &b, OlsForm::Kron).unwrap().absolute;
    assert!(rel(f2, f1) <= 1e-10 && rel(kr, f1) <= 1e-10, "{f1} {f2} {kr}");
}

#[test]
fn ols_consistent_rhs_with_orthonormal_columns() {
    let mut g = rng(11);
    let q = svd(&gaussian_matrix(8, 3, &mut g)).unwrap().u;
    let x = Vector::from_vec(vec![1.0, -2.0, 0.5]);
    let b = &q * &x;
    let k = kappa_ols(&q, &b, OlsForm::F2).unwrap().absolute;
    assert!(rel(k, (1.0 + x.norm_squared()).sqrt()) <= 1e-10);
}

#[test]
fn small_lambda_approaches_ols() {
    let mut g = rng(12);
    for _ in 0..5 {
        let a = gaussian_matrix(15, 5, &mut g);
        let b = gaussian_vector(15, &mut g);
        let sigma_hat_n = svd(&a).unwrap().smallest();
        let lambda = 1e-6 * sigma_hat_n / b.norm();
        let p = StlsProblem::new(a.clone(), b.clone(), lambda).unwrap();
        let s = solve_stls(&p).unwrap();
        let stls = kappa_f2(&s, p.a()).unwrap().absolute;
        let ols = kappa_ols(&a, &b, OlsForm::F2).unwrap().absolute;
        assert!(rel(stls, ols) <= 1e-3, "{stls} vs {ols}");
    }
}

/// Top right singular vector of K attains ‖K‖ and nothing exceeds it.
#[test]
fn worst_direction_attains_condition_number() {
    let (p, s) = generated(12, 7, 1.0, 0.1, 21);
    let (m, n) = (12, 7);
    let k = build_k_dense(&s, p.a()).unwrap();
    let dec = svd(&k).unwrap();
    let kappa = kappa_f2(&s, p.a()).unwrap().absolute;
    let t = 1e-7;
    let top = dec.v.column(0).into_owned();
    let (da, db) = unvec(&top, m, n);
    let gain = finite_difference(&p, &s, &da, &db, t).norm() / top.norm();
    assert!(gain >= kappa * (1.0 - 1e-3) && gain <= kappa * (1.0 + 1e-3), "{gain} vs {kappa}");

    let mut g = rng(5);
    for _ in 0..50 {
        let dir = gaussian_vector(m * (n + 1), &mut g);
        let (da, db) = unvec(&dir, m, n);
        let gain = finite_difference(&p, &s, &da, &db, t).norm() / dir.norm();
        assert!(gain <= kappa * (1.0 + 1e-3));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn three_forms_agree(m in 5usize..30, lambda in prop::sample::select(vec![0.05, 1.0, 5.0]),
                         e_p in prop::sample::select(vec![0.1, 0.01, 0.001]), seed in any::<u64>()) {
        let n = 2 * m / 3;
        let g = generate(&GeneratorSpec { m, n, lambda, e_p, seed }).unwrap();
        let gen = check_genericity(&g.problem).unwrap();
        prop_assume!(gen.gap / gen.sigma_hat_1 >= 1e-6);
        let s = solve_stls(&g.problem).unwrap();
        prop_assume!(s.r().norm() / g.problem.b().norm() >= 1e-8);
        let a = g.problem.a();
        let kron = kappa_kron(&s, a).unwrap().absolute;
        let f1 = kappa_f1(&s, a).unwrap().absolute;
        let f2 = kappa_f2(&s, a).unwrap().absolute;
        prop_assert!((kron - f1).abs() <= 1e-8 * kron, "kron {} f1 {}", kron, f1);
        prop_assert!((f1 - f2).abs() <= 1e-8 * kron, "f1 {} f2 {}", f1, f2);
    }

    #[test]
    fn tls_forms_agree(m in 5usize..25, e_p in 0.001f64..0.3, seed in any::<u64>()) {
        let n = m / 2;
        let g = generate(&GeneratorSpec { m, n, lambda: 1.0, e_p, seed }).unwrap();
        let s = solve_stls(&g.problem).unwrap();
        let a = g.problem.a();
        let f2 = kappa_f2(&s, a).unwrap().absolute;
        let bg = kappa_tls_bg(&s, a).unwrap().absolute;
        prop_assert!((f2 - bg).abs() <= 1e-8 * f2);
    }
}

#[test]
fn kron_shape_with_generated_problem() {
    let (p, s) = generated(5, 3, 1.0, 0.1, 1);
    assert_eq!(build_k_dense(&s, p.a()).unwrap().shape(), (3, 20));
    let _ = DenseMatrix::zeros(1, 1);
}
