//! Exact normwise condition numbers.
//!
//! The derivative of the data-to-solution map is the `n × m(n+1)` matrix
//!
//! ```text
//! K = M⁻¹ ( (2/‖r‖² Aᵀr rᵀ − Aᵀ)([xᵀ −1] ⊗ I_m) − [I_n ⊗ rᵀ, 0] )
//! ```
//!
//! acting on `[vec(ΔA); Δb]`, and the absolute condition number is `‖K‖₂`.
//! Two Kronecker-free expressions give the same value:
//!
//! * an `n × n` quadratic form `‖M⁻¹ C M⁻¹‖₂^{1/2}` with
//!   `C = (1+‖x‖²)AᵀA − Aᵀr xᵀ − x rᵀA + ‖r‖² I`, and
//! * an `n × (2m+n)` factor `‖M⁻¹ W‖₂` with
//!   `W = [Aᵀ, ‖x‖Aᵀ(I − rrᵀ/‖r‖²), ‖r‖(I − Aᵀr xᵀ/‖r‖²)]`, `WWᵀ = C`.
//!
//! The rectangular factor avoids both the Kronecker product and the cross
//! product `AᵀA`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, DenseMatrix, SpdFactorization, Vector};
use crate::stls::{StlsProblem, StlsSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Kron,
    F1,
    F2,
    TlsBg,
    OlsF1,
    OlsF2,
    OlsKron,
    Power,
    Pce,
    Sce,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Kron => "KRON",
            Method::F1 => "F1",
            Method::F2 => "F2",
            Method::TlsBg => "TLS_BG",
            Method::OlsF1 => "OLS_F1",
            Method::OlsF2 => "OLS_F2",
            Method::OlsKron => "OLS_KRON",
            Method::Power => "POWER",
            Method::Pce => "PCE",
            Method::Sce => "SCE",
        }
    }

    pub const ALL: [Method; 10] = [
        Method::Kron,
        Method::F1,
        Method::F2,
        Method::TlsBg,
        Method::OlsF1,
        Method::OlsF2,
        Method::OlsKron,
        Method::Power,
        Method::Pce,
        Method::Sce,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts the upper-case tag or its lower-case, dash-separated spelling.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == norm || (norm == "PW" && *m == Method::Power))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub method: Method,
    pub absolute: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl ConditionReport {
    pub fn new(method: Method, absolute: f64) -> Self {
        Self {
            method,
            absolute,
            relative: None,
            diagnostics: None,
        }
    }

    pub fn with_diagnostics(mut self, diagnostics: Diagnostics) -> Self {
        self.diagnostics = Some(diagnostics);
        self
    }

    /// Fill in the relative condition number.
    pub fn with_relative(mut self, p: &StlsProblem, sol: &StlsSolution) -> Result<Self> {
        self.relative = Some(relative_from_absolute(p, sol, self.absolute)?);
        Ok(self)
    }
}

/// `‖r‖₂`, rejecting (numerically) consistent systems whose residual is
/// below `1e-14 (‖A‖_F ‖x‖ + ‖b‖)`.
pub fn checked_residual_norm(sol: &StlsSolution, a: &DenseMatrix) -> Result<f64> {
    let norm = sol.r().norm();
    let tol = 1e-14 * (a.norm() * sol.x().norm() + sol.b_norm());
    if norm <= tol {
        return Err(Error::ZeroResidual { norm, tol });
    }
    Ok(norm)
}

fn check_shapes(sol: &StlsSolution, a: &DenseMatrix) -> Result<()> {
    if a.nrows() != sol.m() || a.ncols() != sol.n() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, solution belongs to a {}x{} problem",
            a.nrows(),
            a.ncols(),
            sol.m(),
            sol.n()
        )));
    }
    Ok(())
}

/// Dense `K`, with columns ordered as `[vec(ΔA); Δb]` (column-major `vec`).
pub fn build_k_dense(sol: &StlsSolution, a: &DenseMatrix) -> Result<DenseMatrix> {
    check_shapes(sol, a)?;
    let rnorm = checked_residual_norm(sol, a)?;
    let (m, n) = a.shape();
    let r = sol.r();
    let x = sol.x();
    let atr = a.transpose() * r;
    let g = (2.0 / (rnorm * rnorm)) * &atr * r.transpose() - a.transpose();

    let mut raw = DenseMatrix::zeros(n, m * (n + 1));
    for j in 0..n {
        let mut block = raw.columns_mut(j * m, m);
        block.copy_from(&(x[j] * &g));
        let mut row = block.row_mut(j);
        row -= r.transpose();
    }
    raw.columns_mut(n * m, m).copy_from(&(-&g));
    sol.factor().solve_matrix(&raw)
}

pub fn kappa_kron(sol: &StlsSolution, a: &DenseMatrix) -> Result<ConditionReport> {
    let k = build_k_dense(sol, a)?;
    Ok(ConditionReport::new(
        Method::Kron,
        numerics::spectral_norm_dense(&k)?,
    ))
}

/// `C = (1+‖x‖²)AᵀA − Aᵀr xᵀ − x rᵀA + ‖r‖² I`, so that `KKᵀ = M⁻¹ C M⁻¹`.
pub fn f1_middle(sol: &StlsSolution, a: &DenseMatrix) -> DenseMatrix {
    let n = a.ncols();
    let x = sol.x();
    let r = sol.r();
    let atr = a.transpose() * r;
    let cross = &atr * x.transpose();
    let mut c = (1.0 + x.norm_squared()) * (a.transpose() * a) - &cross - cross.transpose();
    let rn2 = r.norm_squared();
    for i in 0..n {
        c[(i, i)] += rn2;
    }
    c
}

/// `M⁻¹ S M⁻¹` for symmetric `S`, symmetrized against rounding.
fn sandwich(factor: &SpdFactorization, s: &DenseMatrix) -> Result<DenseMatrix> {
    let left = factor.solve_matrix(s)?;
    let both = factor.solve_matrix(&left.transpose())?;
    Ok(0.5 * (&both + both.transpose()))
}

pub fn kappa_f1(sol: &StlsSolution, a: &DenseMatrix) -> Result<ConditionReport> {
    check_shapes(sol, a)?;
    checked_residual_norm(sol, a)?;
    let inner = sandwich(sol.factor(), &f1_middle(sol, a))?;
    Ok(ConditionReport::new(
        Method::F1,
        numerics::spectral_norm_dense(&inner)?.sqrt(),
    ))
}

/// The `n × (2m+n)` factor `W` with `WWᵀ = C`.
pub fn f2_factor(sol: &StlsSolution, a: &DenseMatrix) -> Result<DenseMatrix> {
    check_shapes(sol, a)?;
    let rnorm = checked_residual_norm(sol, a)?;
    let (m, n) = a.shape();
    let x = sol.x();
    let r = sol.r();
    let rn2 = rnorm * rnorm;
    let at = a.transpose();
    let atr = &at * r;

    let mut w = DenseMatrix::zeros(n, 2 * m + n);
    w.columns_mut(0, m).copy_from(&at);
    w.columns_mut(m, m)
        .copy_from(&(x.norm() * (&at - (&atr / rn2) * r.transpose())));
    let mut tail = DenseMatrix::identity(n, n) - (&atr / rn2) * x.transpose();
    tail *= rnorm;
    w.columns_mut(2 * m, n).copy_from(&tail);
    Ok(w)
}

/// `M⁻¹ W`, the matrix whose spectral norm is the condition number.
pub fn f2_matrix(sol: &StlsSolution, a: &DenseMatrix) -> Result<DenseMatrix> {
    sol.factor().solve_matrix(&f2_factor(sol, a)?)
}

pub fn kappa_f2(sol: &StlsSolution, a: &DenseMatrix) -> Result<ConditionReport> {
    let w = f2_matrix(sol, a)?;
    Ok(ConditionReport::new(
        Method::F2,
        numerics::spectral_norm_dense(&w)?,
    ))
}

/// `absolute · ‖[A λb]‖_F / ‖x‖₂`.
pub fn relative_from_absolute(p: &StlsProblem, sol: &StlsSolution, absolute: f64) -> Result<f64> {
    let xnorm = sol.x().norm();
    if xnorm <= 1e-300 {
        return Err(Error::ZeroSolution);
    }
    Ok(absolute * p.augmented_frobenius() / xnorm)
}

/// Which power of the smallest singular value enters the total least
/// squares closed form. Only [`SigmaPower::Squared`] is consistent with the
/// quadratic form; the unsquared variant exists to measure the difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaPower {
    #[default]
    Squared,
    Unsquared,
}

/// Closed form for the plain (λ = 1) total least squares problem:
/// `‖(1+‖x‖²) M⁻¹ (AᵀA + σ²(I − 2xxᵀ/(1+‖x‖²))) M⁻¹‖₂^{1/2}`.
///
/// Only meaningful when the solution belongs to a λ = 1 problem.
pub fn kappa_tls_bg(sol: &StlsSolution, a: &DenseMatrix) -> Result<ConditionReport> {
    kappa_tls_bg_with(sol, a, SigmaPower::Squared)
}

pub fn kappa_tls_bg_with(
    sol: &StlsSolution,
    a: &DenseMatrix,
    power: SigmaPower,
) -> Result<ConditionReport> {
    check_shapes(sol, a)?;
    let n = a.ncols();
    let x = sol.x();
    let s = match power {
        SigmaPower::Squared => sol.sigma_np1() * sol.sigma_np1(),
        SigmaPower::Unsquared => sol.sigma_np1(),
    };
    let scale = 1.0 + x.norm_squared();
    let mut inner = a.transpose() * a - (2.0 * s / scale) * x * x.transpose();
    for i in 0..n {
        inner[(i, i)] += s;
    }
    inner *= scale;
    let sand = sandwich(sol.factor(), &inner)?;
    Ok(ConditionReport::new(
        Method::TlsBg,
        numerics::spectral_norm_dense(&sand)?.sqrt(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OlsForm {
    F1,
    F2,
    Kron,
}

/// Condition number of the ordinary least squares solution
/// `x = (AᵀA)⁻¹Aᵀb`, the λ → 0 limit.
pub fn kappa_ols(a: &DenseMatrix, b: &Vector, form: OlsForm) -> Result<ConditionReport> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "b has length {}, A has {m} rows",
            b.len()
        )));
    }
    let sv = numerics::singular_values(a)?;
    let (largest, smallest) = (sv[0], sv[sv.len() - 1]);
    if m < n || smallest <= 1e-12 * largest {
        return Err(Error::RankDeficient { smallest, largest });
    }
    let gram = a.transpose() * a;
    let factor = SpdFactorization::new(gram.clone())?;
    let x = factor.solve(&(a.transpose() * b))?;
    let r = a * &x - b;
    let xnorm = x.norm();
    let rnorm = r.norm();

    let (method, absolute) = match form {
        OlsForm::F1 => {
            let mut mid = (1.0 + xnorm * xnorm) * gram;
            for i in 0..n {
                mid[(i, i)] += rnorm * rnorm;
            }
            let sand = sandwich(&factor, &mid)?;
            (Method::OlsF1, numerics::spectral_norm_dense(&sand)?.sqrt())
        }
        OlsForm::F2 => {
            let mut w = DenseMatrix::zeros(n, 2 * m + n);
            w.columns_mut(0, m).copy_from(&a.transpose());
            w.columns_mut(m, m).copy_from(&(xnorm * a.transpose()));
            w.columns_mut(2 * m, n)
                .copy_from(&(rnorm * DenseMatrix::identity(n, n)));
            let mw = factor.solve_matrix(&w)?;
            (Method::OlsF2, numerics::spectral_norm_dense(&mw)?)
        }
        OlsForm::Kron => {
            let pinv = factor.solve_matrix(&a.transpose())?;
            let gram_inv = factor.solve_matrix(&DenseMatrix::identity(n, n))?;
            let mut k = DenseMatrix::zeros(n, n * m + m);
            for j in 0..n {
                let block = -x[j] * &pinv - gram_inv.column(j) * r.transpose();
                k.columns_mut(j * m, m).copy_from(&block);
            }
            k.columns_mut(n * m, m).copy_from(&pinv);
            (Method::OlsKron, numerics::spectral_norm_dense(&k)?)
        }
    };
    Ok(ConditionReport::new(method, absolute))
}
