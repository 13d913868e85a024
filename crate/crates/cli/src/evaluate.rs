use std::fs;

use stlscond_core::condition::{
    kappa_f1, kappa_f2, kappa_kron, kappa_ols, kappa_tls_bg, OlsForm,
};
use stlscond_core::estimators::{pce, power_method, sce, EstimatorSettings, LinearSolver};
use stlscond_core::{ConditionReport, Method, Result, StlsProblem, StlsSolution};

use crate::args::{EstimatorArgs, SolverArg};
use crate::exit::{CliError, CliResult};

/// Estimator settings from an optional JSON file, overridden by flags and
/// finally by the global seed.
pub fn resolve_settings(args: &EstimatorArgs, seed: Option<u64>) -> CliResult<EstimatorSettings> {
    let mut s = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
        }
        None => EstimatorSettings::default(),
    };
    if let Some(v) = args.power_tol {
        s.power.tol = v;
    }
    if let Some(v) = args.power_max_iter {
        s.power.max_iter = v;
    }
    if let Some(v) = args.pce_eps {
        s.pce.eps = v;
    }
    if let Some(v) = args.pce_theta {
        s.pce.theta = v;
    }
    if let Some(v) = args.sce_k {
        s.sce.k = v;
    }
    match args.solver {
        Some(SolverArg::Cholesky) => s.solver = LinearSolver::Cholesky,
        Some(SolverArg::Cg) => s.solver = LinearSolver::conjugate_gradient(),
        None => {}
    }
    if let Some(seed) = seed {
        s.seed = seed;
    }
    s.power_config().validate()?;
    s.pce_config().validate()?;
    if s.sce.k == 0 {
        return Err(CliError::Usage("--sce-k must be at least 1".into()));
    }
    Ok(s)
}

pub fn parse_method(tag: &str) -> CliResult<Method> {
    tag.parse::<Method>()
        .map_err(|_| CliError::Usage(format!("unknown method '{tag}'")))
}

/// Absolute condition number of `p` by `method`.
pub fn evaluate(
    method: Method,
    p: &StlsProblem,
    sol: &StlsSolution,
    settings: &EstimatorSettings,
) -> Result<ConditionReport> {
    let a = p.a();
    match method {
        Method::Kron => kappa_kron(sol, a),
        Method::F1 => kappa_f1(sol, a),
        Method::F2 => kappa_f2(sol, a),
        Method::TlsBg => kappa_tls_bg(sol, a),
        Method::OlsF1 => kappa_ols(a, p.b(), OlsForm::F1),
        Method::OlsF2 => kappa_ols(a, p.b(), OlsForm::F2),
        Method::OlsKron => kappa_ols(a, p.b(), OlsForm::Kron),
        Method::Power => power_method(sol, a, &settings.power_config()),
        Method::Pce => pce(sol, a, &settings.pce_config()),
        Method::Sce => sce(sol, a, &settings.sce_config()),
    }
}
