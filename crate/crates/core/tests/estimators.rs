mod common;

use common::{gaussian_matrix, gaussian_vector, generated, rel, rng};
use proptest::prelude::*;
use stlscond_core::condition::{build_k_dense, kappa_f2};
use stlscond_core::estimators::{
    apply_k, apply_kt, pce, power_iterate, power_method, probabilistic_spectral_norm, sce,
    wallis_factor, ConditionOperator, F2Operator, LinearOperator, LinearSolver, PceConfig,
    PowerConfig, SceConfig,
};
use stlscond_core::numerics::{spectral_norm_dense, DenseMatrix, Vector};

fn vec_of(p: &DenseMatrix) -> Vector {
    Vector::from_column_slice(p.as_slice())
}

#[test]
fn kt_product_matches_dense_transpose() {
    let (p, s) = generated(12, 7, 1.0, 0.1, 31);
    let k = build_k_dense(&s, p.a()).unwrap();
    let mut g = rng(1);
    for _ in 0..10 {
        let y = gaussian_vector(7, &mut g);
        let got = vec_of(&apply_kt(&s, p.a(), &y).unwrap());
        let want = k.transpose() * &y;
        assert!((&got - &want).norm() <= 1e-12 * want.norm().max(1.0));
    }
}

#[test]
fn k_of_kt_is_gram_product() {
    let (p, s) = generated(12, 7, 0.5, 0.05, 32);
    let k = build_k_dense(&s, p.a()).unwrap();
    let gram = &k * k.transpose();
    let mut g = rng(2);
    for _ in 0..10 {
        let y = gaussian_vector(7, &mut g);
        let got = apply_k(&s, p.a(), &apply_kt(&s, p.a(), &y).unwrap()).unwrap();
        let want = &gram * &y;
        assert!((&got - &want).norm() <= 1e-11 * want.norm().max(1.0));
    }
}

#[test]
fn adjoint_identity() {
    let (p, s) = generated(15, 9, 2.0, 0.1, 33);
    let mut g = rng(3);
    for _ in 0..100 {
        let y = gaussian_vector(9, &mut g);
        let pm = gaussian_matrix(15, 10, &mut g);
        let lhs = y.dot(&apply_k(&s, p.a(), &pm).unwrap());
        let rhs = apply_kt(&s, p.a(), &y).unwrap().dot(&pm);
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
    }
}

#[test]
fn power_method_converges_to_spectral_norm() {
    let (p, s) = generated(30, 20, 5.0, 0.1, 34);
    let exact = kappa_f2(&s, p.a()).unwrap().absolute;
    let run = power_iterate(&s, p.a(), &PowerConfig { seed: 9, ..Default::default() }, None).unwrap();
    assert!(run.converged());
    assert!(rel(run.report.absolute, exact) <= 1e-6, "{} vs {exact}", run.report.absolute);
    // Rayleigh-type quotients increase after the first step
    for w in run.history[1..].windows(2) {
        assert!(w[1] >= w[0] * (1.0 - 1e-12), "history not monotone: {:?}", run.history);
    }
}

#[test]
fn power_method_reports_nonconvergence() {
    let (p, s) = generated(30, 20, 5.0, 0.1, 35);
    let cfg = PowerConfig { max_iter: 2, tol: 1e-300, ..Default::default() };
    let rep = power_method(&s, p.a(), &cfg).unwrap();
    let d = rep.diagnostics.unwrap();
    assert_eq!(d.converged, Some(false));
    assert_eq!(d.iterations, Some(2));
}

#[test]
fn power_method_from_top_singular_vector() {
    let (p, s) = generated(10, 6, 1.0, 0.1, 36);
    let k = build_k_dense(&s, p.a()).unwrap();
    let top = stlscond_core::numerics::svd(&k).unwrap().u.column(0).into_owned();
    let run = power_iterate(&s, p.a(), &PowerConfig::default(), Some(&top)).unwrap();
    assert!(run.iterations() <= 4);
    assert!(rel(run.report.absolute, spectral_norm_dense(&k).unwrap()) <= 1e-10);
}

#[test]
fn pce_brackets_random_operators() {
    let mut g = rng(4);
    let (mut lower_ok, mut upper_ok) = (0, 0);
    let trials = 200;
    for t in 0..trials {
        let op = gaussian_matrix(40, 90, &mut g);
        let norm = spectral_norm_dense(&op).unwrap();
        let cfg = PceConfig { seed: t as u64, ..Default::default() };
        let br = probabilistic_spectral_norm(&op, &cfg).unwrap();
        if br.alpha <= norm * (1.0 + 1e-12) {
            lower_ok += 1;
        }
        if br.beta >= norm * (1.0 - 1e-12) {
            upper_ok += 1;
        }
        assert!(br.beta <= (1.0 + cfg.theta) * br.alpha * (1.0 + 1e-12));
    }
    assert_eq!(lower_ok, trials);
    assert!(upper_ok >= 198, "upper bound held in {upper_ok}/{trials}");
}

#[test]
fn pce_on_stls_problem_is_within_tolerance() {
    let (p, s) = generated(200, 150, 5.0, 0.1, 37);
    let exact = kappa_f2(&s, p.a()).unwrap().absolute;
    let cfg = PceConfig { seed: 1, ..Default::default() };
    let rep = pce(&s, p.a(), &cfg).unwrap();
    assert!(rel(rep.absolute, exact) <= cfg.theta / 2.0 + 1e-6, "{} vs {exact}", rep.absolute);
    let d = rep.diagnostics.unwrap();
    assert!(d.lower.unwrap() <= exact * (1.0 + 1e-12));
}

#[test]
fn f2_operator_matches_dense_factor() {
    let (p, s) = generated(9, 5, 1.0, 0.1, 38);
    let op = F2Operator::new(ConditionOperator::new(&s, p.a()).unwrap());
    let w = stlscond_core::condition::f2_matrix(&s, p.a()).unwrap();
    assert_eq!((op.nrows(), op.ncols()), (w.nrows(), w.ncols()));
    let mut g = rng(5);
    let v = gaussian_vector(op.ncols(), &mut g);
    let u = gaussian_vector(op.nrows(), &mut g);
    assert!((op.apply(&v).unwrap() - &w * &v).norm() <= 1e-12 * (&w * &v).norm());
    let wtu = w.transpose() * &u;
    assert!((op.apply_transpose(&u).unwrap() - &wtu).norm() <= 1e-12 * wtu.norm());
}

#[test]
fn sce_full_sample_is_frobenius_norm() {
    let (p, s) = generated(12, 6, 1.0, 0.1, 39);
    let k = build_k_dense(&s, p.a()).unwrap();
    let rep = sce(&s, p.a(), &SceConfig { k: 6, ..Default::default() }).unwrap();
    assert!(rel(rep.absolute, k.norm()) <= 1e-10);
}

#[test]
fn sce_bounded_by_frobenius_scaling() {
    let (p, s) = generated(30, 20, 1.0, 0.1, 40);
    let fro = build_k_dense(&s, p.a()).unwrap().norm();
    for k in 1..=5 {
        let rep = sce(&s, p.a(), &SceConfig { k, seed: k as u64, ..Default::default() }).unwrap();
        assert!(rep.absolute <= wallis_factor(k) / wallis_factor(20) * fro * (1.0 + 1e-12));
    }
}

#[test]
fn sce_sample_size_validation() {
    let (p, s) = generated(8, 4, 1.0, 0.1, 41);
    assert!(sce(&s, p.a(), &SceConfig { k: 5, ..Default::default() }).is_err());
    assert!(sce(&s, p.a(), &SceConfig { k: 0, ..Default::default() }).is_err());
}

#[test]
fn conjugate_gradient_path_matches_cholesky() {
    let (p, s) = generated(40, 25, 1.0, 0.1, 42);
    let cg = LinearSolver::conjugate_gradient();
    let chol = power_method(&s, p.a(), &PowerConfig { seed: 3, ..Default::default() }).unwrap();
    let iter = power_method(&s, p.a(), &PowerConfig { seed: 3, solver: cg, ..Default::default() })
        .unwrap();
    assert!(rel(chol.absolute, iter.absolute) <= 1e-9);
    let a = sce(&s, p.a(), &SceConfig { k: 4, seed: 2, ..Default::default() }).unwrap();
    let b = sce(&s, p.a(), &SceConfig { k: 4, seed: 2, solver: cg }).unwrap();
    assert!(rel(a.absolute, b.absolute) <= 1e-10);
    let a = pce(&s, p.a(), &PceConfig { seed: 2, ..Default::default() }).unwrap();
    let b = pce(&s, p.a(), &PceConfig { seed: 2, solver: cg, ..Default::default() }).unwrap();
    assert!(rel(a.absolute, b.absolute) <= 1e-8);
}

#[test]
fn estimators_are_seed_deterministic() {
    let (p, s) = generated(20, 12, 1.0, 0.1, 43);
    let c = PceConfig { seed: 77, ..Default::default() };
    assert_eq!(pce(&s, p.a(), &c).unwrap(), pce(&s, p.a(), &c).unwrap());
    let c = SceConfig { k: 3, seed: 77, ..Default::default() };
    assert_eq!(sce(&s, p.a(), &c).unwrap(), sce(&s, p.a(), &c).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lower_bound_never_exceeds_norm(rows in 2usize..25, cols in 2usize..25, seed in any::<u64>()) {
        let mut g = rng(seed);
        let op = gaussian_matrix(rows, cols, &mut g);
        let norm = spectral_norm_dense(&op).unwrap();
        let br = probabilistic_spectral_norm(&op, &PceConfig { seed, ..Default::default() }).unwrap();
        prop_assert!(br.alpha <= norm * (1.0 + 1e-10));
        prop_assert!(br.alpha <= br.beta);
        if br.exhausted {
            prop_assert!((br.alpha - norm).abs() <= 1e-9 * norm);
        }
    }

    #[test]
    fn power_estimate_is_below_norm(seed in any::<u64>()) {
        let (p, s) = generated(10, 6, 1.0, 0.1, seed % 1000);
        let exact = kappa_f2(&s, p.a()).unwrap().absolute;
        let cfg = PowerConfig { seed, max_iter: 3, tol: 1e-300, ..Default::default() };
        let est = power_method(&s, p.a(), &cfg).unwrap().absolute;
        prop_assert!(est <= exact * (1.0 + 1e-12));
    }
}
