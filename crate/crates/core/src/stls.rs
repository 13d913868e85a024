//! Scaled total least squares problems and their solution.
//!
//! For data `A` (m×n, m > n), right-hand side `b` and scale `λ > 0` the
//! solution is `x = (AᵀA − σ²I)⁻¹ Aᵀb`, where `σ` is the smallest singular
//! value of the augmented matrix `[A λb]`. It exists and is unique when the
//! smallest singular value of `A` strictly exceeds `σ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, DenseMatrix, SpdFactorization, Vector};

/// Relative gap below which a solution is flagged as ill-posed.
pub const ILL_POSED_RATIO: f64 = 1e-8;

/// Default genericity tolerance, relative to the largest singular value of `A`.
pub const DEFAULT_GAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StlsProblem {
    a: DenseMatrix,
    b: Vector,
    lambda: f64,
}

impl StlsProblem {
    pub fn new(a: DenseMatrix, b: Vector, lambda: f64) -> Result<Self> {
        let (m, n) = a.shape();
        if n == 0 || m <= n {
            return Err(Error::InvalidProblem(format!(
                "need m > n >= 1, got m = {m}, n = {n}"
            )));
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "b has length {}, A has {m} rows",
                b.len()
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        numerics::ensure_finite(&a)?;
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { a, b, lambda })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// `[A λb]`.
    pub fn augmented(&self) -> DenseMatrix {
        let (m, n) = self.a.shape();
        let mut c = self.a.clone().resize_horizontally(n + 1, 0.0);
        for i in 0..m {
            c[(i, n)] = self.lambda * self.b[i];
        }
        c
    }

    /// `‖[A λb]‖_F`.
    pub fn augmented_frobenius(&self) -> f64 {
        (self.a.norm_squared() + (self.lambda * self.b.norm()).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Genericity {
    /// Smallest singular value of `A`.
    pub sigma_hat_n: f64,
    /// Largest singular value of `A`.
    pub sigma_hat_1: f64,
    /// Smallest singular value of `[A λb]`.
    pub sigma_np1: f64,
    pub gap: f64,
}

/// Compare the smallest singular values of `A` and `[A λb]`. A non-positive
/// gap is reported, not raised.
pub fn check_genericity(p: &StlsProblem) -> Result<Genericity> {
    let sa = numerics::singular_values(p.a())?;
    let sc = numerics::singular_values(&p.augmented())?;
    let sigma_hat_n = sa[sa.len() - 1];
    let sigma_np1 = sc[sc.len() - 1];
    Ok(Genericity {
        sigma_hat_n,
        sigma_hat_1: sa[0],
        sigma_np1,
        gap: sigma_hat_n - sigma_np1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Problems with `gap <= gap_tol * σ̂₁` are rejected as nongeneric.
    pub gap_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: DEFAULT_GAP_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StlsSolution {
    x: Vector,
    r: Vector,
    b_norm: f64,
    genericity: Genericity,
    normal_matrix: DenseMatrix,
    factor: SpdFactorization,
    ill_posed: bool,
}

impl StlsSolution {
    pub fn x(&self) -> &Vector {
        &self.x
    }

    /// Residual `A x − b`.
    pub fn r(&self) -> &Vector {
        &self.r
    }

    pub fn b_norm(&self) -> f64 {
        self.b_norm
    }

    pub fn sigma_np1(&self) -> f64 {
        self.genericity.sigma_np1
    }

    pub fn sigma_hat_n(&self) -> f64 {
        self.genericity.sigma_hat_n
    }

    pub fn sigma_hat_1(&self) -> f64 {
        self.genericity.sigma_hat_1
    }

    pub fn genericity_gap(&self) -> f64 {
        self.genericity.gap
    }

    pub fn genericity(&self) -> Genericity {
        self.genericity
    }

    /// `M = AᵀA − σ²_{n+1} I`.
    pub fn normal_matrix(&self) -> &DenseMatrix {
        &self.normal_matrix
    }

    pub fn factor(&self) -> &SpdFactorization {
        &self.factor
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn m(&self) -> usize {
        self.r.len()
    }

    /// Set when the relative genericity gap is below [`ILL_POSED_RATIO`].
    pub fn ill_posed(&self) -> bool {
        self.ill_posed
    }
}

pub fn solve_stls(p: &StlsProblem) -> Result<StlsSolution> {
    solve_stls_with(p, &SolveOptions::default())
}

pub fn solve_stls_with(p: &StlsProblem, opts: &SolveOptions) -> Result<StlsSolution> {
    let genericity = check_genericity(p)?;
    let tol = opts.gap_tol * genericity.sigma_hat_1;
    if genericity.gap <= tol {
        return Err(Error::NongenericProblem {
            gap: genericity.gap,
            tol,
        });
    }

    let a = p.a();
    let n = p.n();
    let sigma2 = genericity.sigma_np1 * genericity.sigma_np1;
    let mut normal = a.transpose() * a;
    for i in 0..n {
        normal[(i, i)] -= sigma2;
    }
    let factor = SpdFactorization::new(normal.clone())?;
    let x = factor.solve(&(a.transpose() * p.b()))?;
    let r = a * &x - p.b();

    Ok(StlsSolution {
        x,
        r,
        b_norm: p.b().norm(),
        ill_posed: genericity.gap < ILL_POSED_RATIO * genericity.sigma_hat_1,
        genericity,
        normal_matrix: normal,
        factor,
    })
}

/// Solution through the right singular vector of `[A λb]` belonging to its
/// smallest singular value: `x = −v[..n] / (λ v[n])`.
pub fn solve_stls_svd(p: &StlsProblem) -> Result<Vector> {
    let genericity = check_genericity(p)?;
    let tol = DEFAULT_GAP_TOL * genericity.sigma_hat_1;
    if genericity.gap <= tol {
        return Err(Error::NongenericProblem {
            gap: genericity.gap,
            tol,
        });
    }
    let n = p.n();
    let dec = numerics::svd(&p.augmented())?;
    let v = dec.v.column(n);
    let last = v[n];
    if last.abs() < 1e-14 {
        return Err(Error::DegenerateSingularVector(last));
    }
    Ok(Vector::from_fn(n, |i, _| -v[i] / (p.lambda() * last)))
}
