//! Condition estimation without forming the Kronecker-structured `K`.
//!
//! Everything here is built from two products: `Kᵀy`, returned as the
//! `m × (n+1)` matrix whose column-major `vec` it is, and `K P` for such a
//! matrix `P = [A_p b_p]`. Both need one solve with `M = AᵀA − σ²I`, taken
//! from the Cholesky factor of the solution or, for large problems, from a
//! Jacobi-preconditioned conjugate gradient iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::condition::{checked_residual_norm, ConditionReport, Diagnostics, Method};
use crate::error::{Error, Result};
use crate::numerics::{self, unit_sphere_sample, DenseMatrix, Vector};
use crate::stls::StlsSolution;

/// How `M z = y` is solved inside the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolver {
    /// Reuse the Cholesky factor stored with the solution.
    #[default]
    Cholesky,
    /// Matrix-free preconditioned conjugate gradients on `AᵀA − σ²I`.
    ConjugateGradient { rel_tol: f64, max_iter: usize },
}

impl LinearSolver {
    pub fn conjugate_gradient() -> Self {
        LinearSolver::ConjugateGradient {
            rel_tol: 1e-12,
            max_iter: 0,
        }
    }
}

/// Products with `K` and `Kᵀ` for one solved problem.
#[derive(Debug, Clone)]
pub struct ConditionOperator<'a> {
    a: &'a DenseMatrix,
    sol: &'a StlsSolution,
    rnorm2: f64,
    solver: LinearSolver,
}

impl<'a> ConditionOperator<'a> {
    pub fn new(sol: &'a StlsSolution, a: &'a DenseMatrix) -> Result<Self> {
        if a.nrows() != sol.m() || a.ncols() != sol.n() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, solution belongs to a {}x{} problem",
                a.nrows(),
                a.ncols(),
                sol.m(),
                sol.n()
            )));
        }
        let rnorm = checked_residual_norm(sol, a)?;
        Ok(Self {
            a,
            sol,
            rnorm2: rnorm * rnorm,
            solver: LinearSolver::Cholesky,
        })
    }

    pub fn with_solver(mut self, solver: LinearSolver) -> Self {
        self.solver = solver;
        self
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn solve_m(&self, y: &Vector) -> Result<Vector> {
        match self.solver {
            LinearSolver::Cholesky => self.sol.factor().solve(y),
            LinearSolver::ConjugateGradient { rel_tol, max_iter } => {
                let max_iter = if max_iter == 0 {
                    10 * self.n() + 100
                } else {
                    max_iter
                };
                conjugate_gradient(self.a, self.sol.sigma_np1(), y, rel_tol, max_iter)
            }
        }
    }

    /// `(2/‖r‖² r rᵀ A − A) z`
    fn w_of(&self, z: &Vector) -> Vector {
        let az = self.a * z;
        let r = self.sol.r();
        let scale = 2.0 * r.dot(&az) / self.rnorm2;
        scale * r - az
    }

    /// The `m × (n+1)` matrix `[w xᵀ − r zᵀ, −w]` whose `vec` is `Kᵀy`.
    pub fn apply_kt(&self, y: &Vector) -> Result<DenseMatrix> {
        let (m, n) = (self.m(), self.n());
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "y has length {}, expected {n}",
                y.len()
            )));
        }
        let z = self.solve_m(y)?;
        let w = self.w_of(&z);
        let mut out = DenseMatrix::zeros(m, n + 1);
        out.columns_mut(0, n)
            .copy_from(&(&w * self.sol.x().transpose() - self.sol.r() * z.transpose()));
        out.set_column(n, &(-&w));
        Ok(out)
    }

    /// `K vec(P)` for `P = [A_p b_p]`:
    /// `M⁻¹((2/‖r‖² Aᵀr rᵀ − Aᵀ)(A_p x − b_p) − A_pᵀ r)`.
    pub fn apply_k(&self, p: &DenseMatrix) -> Result<Vector> {
        let (m, n) = (self.m(), self.n());
        if p.shape() != (m, n + 1) {
            return Err(Error::DimensionMismatch(format!(
                "P is {}x{}, expected {m}x{}",
                p.nrows(),
                p.ncols(),
                n + 1
            )));
        }
        let ap = p.columns(0, n);
        let bp = p.column(n);
        let r = self.sol.r();
        let d = ap * self.sol.x() - bp;
        let scale = 2.0 * r.dot(&d) / self.rnorm2;
        let rhs = self.a.transpose() * (scale * r - d) - ap.transpose() * r;
        self.solve_m(&rhs)
    }
}

pub fn apply_kt(sol: &StlsSolution, a: &DenseMatrix, y: &Vector) -> Result<DenseMatrix> {
    ConditionOperator::new(sol, a)?.apply_kt(y)
}

pub fn apply_k(sol: &StlsSolution, a: &DenseMatrix, p: &DenseMatrix) -> Result<Vector> {
    ConditionOperator::new(sol, a)?.apply_k(p)
}

/// Jacobi-preconditioned conjugate gradients for `(AᵀA − σ²I) z = y`.
pub fn conjugate_gradient(
    a: &DenseMatrix,
    sigma: f64,
    y: &Vector,
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vector> {
    let n = a.ncols();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has length {}, expected {n}",
            y.len()
        )));
    }
    let sigma2 = sigma * sigma;
    let apply = |v: &Vector| a.transpose() * (a * v) - sigma2 * v;
    let diag = Vector::from_fn(n, |j, _| a.column(j).norm_squared() - sigma2);
    if diag.iter().any(|d| *d <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let ynorm = y.norm();
    let mut x = Vector::zeros(n);
    if ynorm == 0.0 {
        return Ok(x);
    }
    let mut res = y.clone();
    let mut zres = res.component_div(&diag);
    let mut dir = zres.clone();
    let mut rz = res.dot(&zres);
    for _ in 0..max_iter {
        let q = apply(&dir);
        let curv = dir.dot(&q);
        if curv <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let step = rz / curv;
        x.axpy(step, &dir, 1.0);
        res.axpy(-step, &q, 1.0);
        if res.norm() <= rel_tol * ynorm {
            return Ok(x);
        }
        zres = res.component_div(&diag);
        let rz_next = res.dot(&zres);
        dir = &zres + (rz_next / rz) * &dir;
        rz = rz_next;
    }
    Err(Error::ConvergenceFailure(format!(
        "conjugate gradient did not reach relative residual {rel_tol:e} in {max_iter} iterations"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    /// Stop once successive values of `v` differ by less than this.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub solver: LinearSolver,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
            seed: 0,
            solver: LinearSolver::Cholesky,
        }
    }
}

impl PowerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_iter == 0 {
            return Err(Error::InvalidConfig(format!(
                "power method needs tol > 0 and max_iter >= 1, got {} and {}",
                self.tol, self.max_iter
            )));
        }
        Ok(())
    }
}

/// Result of the power iteration together with the sequence of `v` values.
#[derive(Debug, Clone)]
pub struct PowerRun {
    pub report: ConditionReport,
    pub history: Vec<f64>,
}

impl PowerRun {
    pub fn converged(&self) -> bool {
        self.report
            .diagnostics
            .as_ref()
            .and_then(|d| d.converged)
            .unwrap_or(false)
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

/// Power iteration on `KKᵀ`; the estimate is `√v` where `v` converges to
/// `‖K‖₂²`. Not converging within `max_iter` is reported through the
/// diagnostics, not as an error.
pub fn power_method(
    sol: &StlsSolution,
    a: &DenseMatrix,
    cfg: &PowerConfig,
) -> Result<ConditionReport> {
    Ok(power_iterate(sol, a, cfg, None)?.report)
}

/// Power iteration from an explicit start vector, or from a seeded standard
/// Gaussian vector when `start` is `None`.
pub fn power_iterate(
    sol: &StlsSolution,
    a: &DenseMatrix,
    cfg: &PowerConfig,
    start: Option<&Vector>,
) -> Result<PowerRun> {
    cfg.validate()?;
    let op = ConditionOperator::new(sol, a)?.with_solver(cfg.solver);
    let n = op.n();
    let mut y = match start {
        Some(s) if s.len() != n => {
            return Err(Error::DimensionMismatch(format!(
                "start vector has length {}, expected {n}",
                s.len()
            )))
        }
        Some(s) => s.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
        }
    };
    let ynorm = y.norm();
    if ynorm == 0.0 || !ynorm.is_finite() {
        return Err(Error::InvalidConfig("start vector must be nonzero".into()));
    }
    y /= ynorm;

    let mut history = Vec::new();
    let mut converged = false;
    let mut v = 0.0;
    for i in 0..cfg.max_iter {
        let mut p = op.apply_kt(&y)?;
        v = p.norm();
        history.push(v);
        if v == 0.0 {
            break;
        }
        // the first value is ‖Kᵀy₀‖ for a unit y₀, not yet an estimate of ‖K‖²
        if i >= 2 && (v - history[i - 1]).abs() < cfg.tol {
            converged = true;
            break;
        }
        p /= v;
        // |y| <= ‖K‖₂ from here on, so no renormalization is needed
        y = op.apply_k(&p)?;
    }

    let report = ConditionReport::new(Method::Power, v.sqrt()).with_diagnostics(Diagnostics {
        iterations: Some(history.len()),
        converged: Some(converged),
        ..Default::default()
    });
    Ok(PowerRun { report, history })
}

/// A real matrix accessed only through products.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, v: &Vector) -> Result<Vector>;
    fn apply_transpose(&self, u: &Vector) -> Result<Vector>;
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.nrows()
    }

    fn ncols(&self) -> usize {
        self.ncols()
    }

    fn apply(&self, v: &Vector) -> Result<Vector> {
        Ok(self * v)
    }

    fn apply_transpose(&self, u: &Vector) -> Result<Vector> {
        Ok(self.transpose() * u)
    }
}

/// `M⁻¹ [Aᵀ, ‖x‖Aᵀ(I − rrᵀ/‖r‖²), ‖r‖(I − Aᵀr xᵀ/‖r‖²)]` as an
/// `n × (2m+n)` operator, never materialized.
#[derive(Debug, Clone)]
pub struct F2Operator<'a> {
    op: ConditionOperator<'a>,
    xnorm: f64,
    rnorm: f64,
    atr: Vector,
}

impl<'a> F2Operator<'a> {
    pub fn new(op: ConditionOperator<'a>) -> Self {
        let xnorm = op.sol.x().norm();
        let rnorm = op.rnorm2.sqrt();
        let atr = op.a.transpose() * op.sol.r();
        Self {
            op,
            xnorm,
            rnorm,
            atr,
        }
    }
}

impl LinearOperator for F2Operator<'_> {
    fn nrows(&self) -> usize {
        self.op.n()
    }

    fn ncols(&self) -> usize {
        2 * self.op.m() + self.op.n()
    }

    fn apply(&self, v: &Vector) -> Result<Vector> {
        let (m, n) = (self.op.m(), self.op.n());
        if v.len() != 2 * m + n {
            return Err(Error::DimensionMismatch(format!(
                "operand has length {}, expected {}",
                v.len(),
                2 * m + n
            )));
        }
        let r = self.op.sol.r();
        let x = self.op.sol.x();
        let v1 = v.rows(0, m);
        let v2 = v.rows(m, m);
        let v3 = v.rows(2 * m, n);
        let proj = v2 - (r.dot(&v2) / self.op.rnorm2) * r;
        let mut acc = self.op.a.transpose() * (v1 + self.xnorm * proj);
        acc += self.rnorm * (v3 - (x.dot(&v3) / self.op.rnorm2) * &self.atr);
        self.op.solve_m(&acc)
    }

    fn apply_transpose(&self, u: &Vector) -> Result<Vector> {
        let (m, n) = (self.op.m(), self.op.n());
        if u.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "operand has length {}, expected {n}",
                u.len()
            )));
        }
        let s = self.op.solve_m(u)?;
        let r = self.op.sol.r();
        let x = self.op.sol.x();
        let as_ = self.op.a * &s;
        let mut out = Vector::zeros(2 * m + n);
        out.rows_mut(0, m).copy_from(&as_);
        let proj = &as_ - (r.dot(&as_) / self.op.rnorm2) * r;
        out.rows_mut(m, m).copy_from(&(self.xnorm * proj));
        let tail = &s - (self.atr.dot(&s) / self.op.rnorm2) * x;
        out.rows_mut(2 * m, n).copy_from(&(self.rnorm * tail));
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PceConfig {
    /// Probability that the upper bound fails.
    pub eps: f64,
    /// Target relative width `β/α − 1`.
    pub theta: f64,
    pub seed: u64,
    pub solver: LinearSolver,
}

impl Default for PceConfig {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            theta: 1e-2,
            seed: 0,
            solver: LinearSolver::Cholesky,
        }
    }
}

impl PceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) || self.theta.is_nan() || self.theta <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "need 0 < eps < 1 and theta > 0, got {} and {}",
                self.eps, self.theta
            )));
        }
        Ok(())
    }
}

/// Bracket `alpha <= ‖op‖₂ <= beta`; the upper side holds with probability
/// at least `1 − eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub alpha: f64,
    pub beta: f64,
    /// Bidiagonalization steps taken.
    pub steps: usize,
    /// The Krylov space was exhausted, so `alpha == beta` is exact.
    pub exhausted: bool,
}

/// Largest `δ` with `P(|v₁| < δ) <= eps` for `v` uniform on the unit sphere
/// in `dim` dimensions, using `v₁² ~ Beta(1/2, (dim−1)/2)`.
pub fn sphere_component_quantile(dim: usize, eps: f64) -> f64 {
    if dim <= 1 {
        return 1.0;
    }
    let b = 0.5 * (dim as f64 - 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(0.5, b, mid) < eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-18 {
            break;
        }
    }
    lo.sqrt()
}

/// Largest `t > max θᵢ` with `Σ ln(t − θᵢ) = target`.
fn polynomial_crossing(ritz_sq: &[f64], target: f64) -> f64 {
    let top = ritz_sq.iter().copied().fold(0.0, f64::max);
    let f = |t: f64| ritz_sq.iter().map(|th| (t - th).ln()).sum::<f64>();
    let k = ritz_sq.len() as f64;
    let mut lo = top;
    // every factor is at least t − top, so f(hi) >= target here
    let mut hi = top + (target / k).exp();
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn reorthogonalize(v: &mut Vector, basis: &[Vector]) {
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(v);
            v.axpy(-c, q, 1.0);
        }
    }
}

/// `[B_k, β_k e_k]` for the upper bidiagonal `B_k` of the Golub–Kahan process.
fn extended_bidiagonal(alphas: &[f64], betas: &[f64]) -> DenseMatrix {
    let k = alphas.len();
    let mut b = DenseMatrix::zeros(k, k + 1);
    for j in 0..k {
        b[(j, j)] = alphas[j];
        b[(j, j + 1)] = betas[j];
    }
    b
}

/// Probabilistic two-norm bracket of a matrix-free operator.
///
/// Golub–Kahan bidiagonalization (full reorthogonalization) from a start
/// vector drawn uniformly on the sphere of the operator's domain. After `k`
/// steps the largest singular value of the projected bidiagonal matrix is a
/// guaranteed lower bound. For the upper bound, the next Lanczos vector of
/// `opᵀop` is `p_k(opᵀop) v₁` with `p_k(t) = Π(t − θᵢ)/Π αⱼβⱼ` over the Ritz
/// values `θᵢ`; its unit norm forces `|p_k(‖op‖²)| <= 1/|c₁|`, where `c₁` is
/// the start vector's component on the top right singular vector. With
/// probability `1 − eps`, `|c₁| >= δ`, so `‖op‖²` lies below the point where
/// `|p_k|` reaches `1/δ`. The process deepens until `β/α <= 1 + θ`.
pub fn probabilistic_spectral_norm<O: LinearOperator + ?Sized>(
    op: &O,
    cfg: &PceConfig,
) -> Result<NormBracket> {
    cfg.validate()?;
    let (rows, cols) = (op.nrows(), op.ncols());
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidConfig("operator has an empty dimension".into()));
    }
    let kmax = rows.min(cols);
    let delta = sphere_component_quantile(cols, cfg.eps);
    let log_inv_delta = -delta.ln();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v = unit_sphere_sample(cols, &mut rng);
    let mut vs: Vec<Vector> = Vec::new();
    let mut us: Vec<Vector> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut log_gamma = 0.0;
    let mut best = 0.0f64;

    for k in 1..=kmax {
        let mut u = op.apply(&v)?;
        if let (Some(prev), Some(&b)) = (us.last(), betas.last()) {
            u.axpy(-b, prev, 1.0);
        }
        reorthogonalize(&mut u, &us);
        let alpha_k = u.norm();
        vs.push(v.clone());
        if alpha_k.is_nan() || alpha_k <= 1e-13 * best || alpha_k == 0.0 {
            // A maps the Krylov space into the span already built
            return Ok(NormBracket {
                alpha: best,
                beta: best,
                steps: k,
                exhausted: true,
            });
        }
        u /= alpha_k;
        let mut w = op.apply_transpose(&u)?;
        w.axpy(-alpha_k, &v, 1.0);
        reorthogonalize(&mut w, &vs);
        let beta_k = w.norm();
        us.push(u);
        alphas.push(alpha_k);
        betas.push(beta_k);

        best = numerics::spectral_norm_dense(&extended_bidiagonal(&alphas, &betas))?;
        if k == kmax || beta_k.is_nan() || beta_k <= 1e-13 * best {
            return Ok(NormBracket {
                alpha: best,
                beta: best,
                steps: k,
                exhausted: true,
            });
        }

        log_gamma += alpha_k.ln() + beta_k.ln();
        let mut bk = DenseMatrix::zeros(k, k);
        for j in 0..k {
            bk[(j, j)] = alphas[j];
            if j + 1 < k {
                bk[(j, j + 1)] = betas[j];
            }
        }
        let ritz_sq: Vec<f64> = numerics::singular_values(&bk)?
            .iter()
            .map(|s| s * s)
            .collect();
        let upper = polynomial_crossing(&ritz_sq, log_gamma + log_inv_delta)
            .sqrt()
            .max(best);
        if upper <= (1.0 + cfg.theta) * best {
            return Ok(NormBracket {
                alpha: best,
                beta: upper,
                steps: k,
                exhausted: false,
            });
        }
        v = w / beta_k;
    }
    unreachable!("loop returns at k == kmax")
}

/// Probabilistic estimate: midpoint of a bracket on the spectral norm of
/// the `n × (2m+n)` Kronecker-free factor.
pub fn pce(sol: &StlsSolution, a: &DenseMatrix, cfg: &PceConfig) -> Result<ConditionReport> {
    cfg.validate()?;
    let op = F2Operator::new(ConditionOperator::new(sol, a)?.with_solver(cfg.solver));
    let bracket = probabilistic_spectral_norm(&op, cfg)?;
    Ok(
        ConditionReport::new(Method::Pce, 0.5 * (bracket.alpha + bracket.beta)).with_diagnostics(
            Diagnostics {
                iterations: Some(bracket.steps),
                lower: Some(bracket.alpha),
                upper: Some(bracket.beta),
                ..Default::default()
            },
        ),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceConfig {
    pub k: usize,
    pub seed: u64,
    pub solver: LinearSolver,
}

impl Default for SceConfig {
    fn default() -> Self {
        Self {
            k: 3,
            seed: 0,
            solver: LinearSolver::Cholesky,
        }
    }
}

/// `ω_p ≈ √(2 / (π (p − 1/2)))`, the expected-length factor of a random
/// projection.
pub fn wallis_factor(p: usize) -> f64 {
    (2.0 / (std::f64::consts::PI * (p as f64 - 0.5))).sqrt()
}

/// `k` vectors with entries uniform on (0, 1), orthonormalized by modified
/// Gram–Schmidt. Nearly dependent draws are replaced.
pub fn orthonormal_uniform_samples<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(k);
    while out.len() < k {
        let mut z = Vector::from_fn(n, |_, _| rng.random::<f64>());
        let before = z.norm();
        for q in &out {
            let c = q.dot(&z);
            z.axpy(-c, q, 1.0);
        }
        let after = z.norm();
        if after > 1e-8 * before {
            out.push(z / after);
        }
    }
    out
}

/// Small-sample estimate `(ω_k/ω_n) √(Σ κᵢ²)` with `κᵢ = ‖Kᵀzᵢ‖` for `k`
/// orthonormal probes `zᵢ`; `κᵢ² = zᵢᵀ M⁻¹CM⁻¹ zᵢ` since `KKᵀ = M⁻¹CM⁻¹`.
pub fn sce(sol: &StlsSolution, a: &DenseMatrix, cfg: &SceConfig) -> Result<ConditionReport> {
    let n = a.ncols();
    if cfg.k == 0 {
        return Err(Error::InvalidConfig("sample size must be at least 1".into()));
    }
    if cfg.k > n {
        return Err(Error::SampleTooLarge { k: cfg.k, n });
    }
    let op = ConditionOperator::new(sol, a)?.with_solver(cfg.solver);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples = orthonormal_uniform_samples(n, cfg.k, &mut rng);
    let mut sum = 0.0;
    for z in &samples {
        sum += op.apply_kt(z)?.norm_squared();
    }
    let estimate = wallis_factor(cfg.k) / wallis_factor(n) * sum.sqrt();
    Ok(ConditionReport::new(Method::Sce, estimate).with_diagnostics(Diagnostics {
        iterations: Some(cfg.k),
        ..Default::default()
    }))
}

/// Estimator parameters as read from a JSON block
/// `{power: {tol, max_iter}, pce: {eps, theta}, sce: {k}, seed}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorSettings {
    pub power: PowerSettings,
    pub pce: PceSettings,
    pub sce: SceSettings,
    pub seed: u64,
    pub solver: LinearSolver,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerSettings {
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PceSettings {
    pub eps: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceSettings {
    pub k: usize,
}

impl Default for PowerSettings {
    fn default() -> Self {
        let d = PowerConfig::default();
        Self {
            tol: d.tol,
            max_iter: d.max_iter,
        }
    }
}

impl Default for PceSettings {
    fn default() -> Self {
        let d = PceConfig::default();
        Self {
            eps: d.eps,
            theta: d.theta,
        }
    }
}

impl Default for SceSettings {
    fn default() -> Self {
        Self {
            k: SceConfig::default().k,
        }
    }
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            power: PowerSettings::default(),
            pce: PceSettings::default(),
            sce: SceSettings::default(),
            seed: 0,
            solver: LinearSolver::Cholesky,
        }
    }
}

impl EstimatorSettings {
    pub fn power_config(&self) -> PowerConfig {
        PowerConfig {
            tol: self.power.tol,
            max_iter: self.power.max_iter,
            seed: self.seed,
            solver: self.solver,
        }
    }

    pub fn pce_config(&self) -> PceConfig {
        PceConfig {
            eps: self.pce.eps,
            theta: self.pce.theta,
            seed: self.seed,
            solver: self.solver,
        }
    }

    pub fn sce_config(&self) -> SceConfig {
        SceConfig {
            k: self.sce.k,
            seed: self.seed,
            solver: self.solver,
        }
    }
}
