#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use stlscond_core::generator::{generate, GeneratorSpec};
use stlscond_core::numerics::{DenseMatrix, Vector};
use stlscond_core::stls::{solve_stls, StlsProblem, StlsSolution};

pub fn generated(m: usize, n: usize, lambda: f64, e_p: f64, seed: u64) -> (StlsProblem, StlsSolution) {
    let g = generate(&GeneratorSpec { m, n, lambda, e_p, seed }).unwrap();
    let sol = solve_stls(&g.problem).unwrap();
    (g.problem, sol)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_vector(len: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(len, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Forward difference `(x(A + tΔA, b + tΔb) − x(A, b)) / t`.
pub fn finite_difference(p: &StlsProblem, sol: &StlsSolution, da: &DenseMatrix, db: &Vector, t: f64) -> Vector {
    let pert = StlsProblem::new(p.a() + t * da, p.b() + t * db, p.lambda()).unwrap();
    let xp = solve_stls(&pert).unwrap();
    (xp.x() - sol.x()) / t
}

/// Split a `vec` of length m(n+1) into (ΔA, Δb) using column-major order.
pub fn unvec(d: &Vector, m: usize, n: usize) -> (DenseMatrix, Vector) {
    let da = DenseMatrix::from_column_slice(m, n, &d.as_slice()[..m * n]);
    let db = Vector::from_column_slice(&d.as_slice()[m * n..]);
    (da, db)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
