//! Dense kernels shared by the solver, the exact condition formulas and the
//! estimators.
//!
//! Matrices are `nalgebra` column-major dense matrices, so `as_slice()` on a
//! matrix is exactly the column-stacking `vec` used by the Kronecker forms.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SVD};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Thin singular value decomposition `X = U diag(s) Vᵀ` with `s` non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub singular_values: Vector,
    pub v: DenseMatrix,
}

impl Svd {
    pub fn largest(&self) -> f64 {
        self.singular_values.iter().copied().fold(0.0, f64::max)
    }

    pub fn smallest(&self) -> f64 {
        self.singular_values[self.singular_values.len() - 1]
    }
}

pub fn ensure_finite(x: &DenseMatrix) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn svd(x: &DenseMatrix) -> Result<Svd> {
    ensure_finite(x)?;
    let dec = SVD::try_new(x.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::ConvergenceFailure("svd".into()))?;
    let u = dec.u.ok_or_else(|| Error::ConvergenceFailure("svd: U".into()))?;
    let v_t = dec
        .v_t
        .ok_or_else(|| Error::ConvergenceFailure("svd: Vt".into()))?;
    Ok(Svd {
        u,
        singular_values: dec.singular_values,
        v: v_t.transpose(),
    })
}

/// Singular values only, in non-increasing order.
pub fn singular_values(x: &DenseMatrix) -> Result<Vector> {
    ensure_finite(x)?;
    let dec = SVD::try_new(x.clone(), false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::ConvergenceFailure("svd".into()))?;
    Ok(dec.singular_values)
}

pub fn spectral_norm_dense(x: &DenseMatrix) -> Result<f64> {
    let s = singular_values(x)?;
    Ok(s.iter().copied().fold(0.0, f64::max))
}

/// Cholesky factorization of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct SpdFactorization {
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactorization {
    /// Factor `m`. Only the lower triangle is read.
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "SPD factorization needs a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        ensure_finite(&m)?;
        Cholesky::new(m)
            .map(|chol| Self { chol })
            .ok_or(Error::NotPositiveDefinite)
    }

    pub fn order(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn solve(&self, y: &Vector) -> Result<Vector> {
        if y.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, factorization has order {}",
                y.len(),
                self.order()
            )));
        }
        Ok(self.chol.solve(y))
    }

    /// Solve for every column of `y` at once.
    pub fn solve_matrix(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        if y.nrows() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, factorization has order {}",
                y.nrows(),
                self.order()
            )));
        }
        Ok(self.chol.solve(y))
    }

    /// Reassemble `L Lᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let l = self.chol.l();
        &l * l.transpose()
    }
}

pub fn solve_spd(m: &SpdFactorization, y: &Vector) -> Result<Vector> {
    m.solve(y)
}

/// Uniformly distributed point on the unit sphere in `dim` dimensions
/// (standard Gaussian draw, then normalized).
pub fn unit_sphere_sample<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    assert!(dim >= 1, "sphere dimension must be at least 1");
    loop {
        let g = Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm > 0.0 && norm.is_finite() {
            return g / norm;
        }
    }
}

/// Householder reflector `I − 2 v vᵀ` for a unit vector `v`.
pub fn householder(v: &Vector) -> DenseMatrix {
    let n = v.len();
    DenseMatrix::identity(n, n) - 2.0 * v * v.transpose()
}
