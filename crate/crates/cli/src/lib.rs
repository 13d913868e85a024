//! `stlscond`: generate scaled total least squares problems, solve them,
//! evaluate their condition numbers and run the benchmark protocols.
//!
//! Exit codes: 0 success, 2 usage, 3 i/o, 4 nongeneric problem,
//! 5 zero residual or zero solution, 1 any other numerical failure.

pub mod args;
pub mod bench;
pub mod evaluate;
pub mod exit;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde::Serialize;
use stlscond_core::generator::{generate, GeneratorSpec};
use stlscond_core::io::ProblemFile;
use stlscond_core::stls::solve_stls_svd;
use stlscond_core::{solve_stls, ConditionReport, Error, Method, StlsProblem};

use args::{BenchRatioArgs, BenchTimeArgs, Cli, Command, CondArgs, Format, GenArgs, GridArgs, Route, SolveArgs};
use bench::{BenchConfig, BENCH_COLUMNS, RATIO_COLUMNS};
use evaluate::{evaluate, parse_method, resolve_settings};
use exit::{CliError, CliResult};

/// Methods run by `cond --method all`.
pub const ALL_METHODS: [Method; 6] = [
    Method::Kron,
    Method::F1,
    Method::F2,
    Method::Power,
    Method::Pce,
    Method::Sce,
];

/// Parse arguments, run, print diagnostics to stderr and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("stlscond: {e}");
            e.code()
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(cli, a),
        Command::Solve(a) => cmd_solve(cli, a),
        Command::Cond(a) => cmd_cond(cli, a),
        Command::BenchTime(a) => cmd_bench_time(cli, a),
        Command::BenchRatio(a) => cmd_bench_ratio(cli, a),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)
                .and_then(|_| so.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn load_problem(path: &Path) -> CliResult<StlsProblem> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    ProblemFile::from_json(&text)
        .and_then(|f| f.to_problem())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cmd_gen(cli: &Cli, a: &GenArgs) -> CliResult<i32> {
    if cli.format == Some(Format::Csv) {
        return Err(CliError::Usage("gen writes JSON only".into()));
    }
    let spec = GeneratorSpec {
        m: a.m,
        n: a.n,
        lambda: a.lambda,
        e_p: a.ep,
        seed: cli.seed.unwrap_or(0),
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let g = generate(&spec)?;
    let mut text = ProblemFile::from_generated(&g).to_json();
    text.push('\n');
    emit(cli.out.as_deref(), text.as_bytes())?;
    Ok(exit::SUCCESS)
}

#[derive(Serialize)]
struct SolveOutput {
    x: Vec<f64>,
    residual_norm: f64,
    sigma_np1: f64,
    sigma_hat_n: f64,
    genericity_gap: f64,
    ill_posed: bool,
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> CliResult<i32> {
    let p = load_problem(&a.input)?;
    let sol = solve_stls(&p)?;
    let x = match a.route {
        Route::Normal => sol.x().clone(),
        Route::Svd => solve_stls_svd(&p)?,
    };
    if sol.ill_posed() {
        eprintln!(
            "stlscond: warning: gap {:e} is tiny relative to the spectrum; the solution is ill-posed",
            sol.genericity_gap()
        );
    }
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&SolveOutput {
            x: x.iter().copied().collect(),
            residual_norm: sol.r().norm(),
            sigma_np1: sol.sigma_np1(),
            sigma_hat_n: sol.sigma_hat_n(),
            genericity_gap: sol.genericity_gap(),
            ill_posed: sol.ill_posed(),
        }),
        Format::Csv => {
            let mut s = String::from("index,x\n");
            for (i, v) in x.iter().enumerate() {
                s.push_str(&format!("{i},{v:?}\n"));
            }
            s
        }
    };
    emit(cli.out.as_deref(), text.as_bytes())?;
    Ok(exit::SUCCESS)
}

#[derive(Serialize)]
struct Ratios {
    ratio1: Option<f64>,
    ratio2: Option<f64>,
    ratio3: Option<f64>,
}

#[derive(Serialize)]
struct CondAll<'a> {
    reports: &'a [ConditionReport],
    ratios: Ratios,
}

#[derive(Serialize)]
struct ReportRow {
    method: Method,
    absolute: f64,
    relative: Option<f64>,
    iterations: Option<usize>,
    converged: Option<bool>,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn cmd_cond(cli: &Cli, a: &CondArgs) -> CliResult<i32> {
    let all = a.method.eq_ignore_ascii_case("all");
    let methods: Vec<Method> = if all {
        ALL_METHODS.to_vec()
    } else {
        vec![parse_method(&a.method)?]
    };
    let mut settings = resolve_settings(&a.estimators, cli.seed)?;
    let p = load_problem(&a.input)?;
    if all && a.estimators.sce_k.is_none() {
        settings.sce.k = settings.sce.k.min(p.n());
    }
    let ols_only = methods
        .iter()
        .all(|m| matches!(m, Method::OlsF1 | Method::OlsF2 | Method::OlsKron));
    let sol = match solve_stls(&p) {
        Ok(s) => Some(s),
        Err(e) if ols_only && !matches!(e, Error::InvalidProblem(_)) => None,
        Err(e) => return Err(e.into()),
    };

    let mut reports = Vec::new();
    let mut relative_error = None;
    for &method in &methods {
        let rep = match &sol {
            Some(s) => evaluate(method, &p, s, &settings)?,
            None => evaluate_ols(method, &p)?,
        };
        let rep = match (&sol, method) {
            (_, Method::OlsF1 | Method::OlsF2 | Method::OlsKron) | (None, _) => rep,
            (Some(s), _) => match rep.clone().with_relative(&p, s) {
                Ok(r) => r,
                Err(e) => {
                    relative_error.get_or_insert(e);
                    rep
                }
            },
        };
        reports.push(rep);
    }

    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json if all => {
            let by = |m: Method| reports.iter().find(|r| r.method == m).map(|r| r.absolute);
            let exact = by(Method::F2);
            let ratio = |m: Method| Some(by(m)? / exact?);
            to_json(&CondAll {
                reports: &reports,
                ratios: Ratios {
                    ratio1: ratio(Method::Power),
                    ratio2: ratio(Method::Pce),
                    ratio3: ratio(Method::Sce),
                },
            })
        }
        Format::Json => to_json(&reports[0]),
        Format::Csv => {
            let rows: Vec<ReportRow> = reports
                .iter()
                .map(|r| {
                    let d = r.diagnostics.clone().unwrap_or_default();
                    ReportRow {
                        method: r.method,
                        absolute: r.absolute,
                        relative: r.relative,
                        iterations: d.iterations,
                        converged: d.converged,
                        lower: d.lower,
                        upper: d.upper,
                    }
                })
                .collect();
            let mut buf = Vec::new();
            bench::write_csv(
                &rows,
                &["method", "absolute", "relative", "iterations", "converged", "lower", "upper"],
                &mut buf,
            )?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
    };
    emit(cli.out.as_deref(), text.as_bytes())?;
    match relative_error {
        Some(e) => {
            eprintln!("stlscond: relative condition number undefined: {e}");
            Ok(exit::compute_code(&e))
        }
        None => Ok(exit::SUCCESS),
    }
}

fn evaluate_ols(method: Method, p: &StlsProblem) -> CliResult<ConditionReport> {
    use stlscond_core::condition::{kappa_ols, OlsForm};
    let form = match method {
        Method::OlsF1 => OlsForm::F1,
        Method::OlsF2 => OlsForm::F2,
        _ => OlsForm::Kron,
    };
    Ok(kappa_ols(p.a(), p.b(), form)?)
}

fn bench_config(cli: &Cli, g: &GridArgs, methods: Vec<Method>) -> CliResult<BenchConfig> {
    let sizes = g
        .sizes
        .iter()
        .map(|s| bench::parse_size(s))
        .collect::<CliResult<Vec<_>>>()?;
    let settings = resolve_settings(&g.estimators, None)?;
    Ok(BenchConfig {
        cells: bench::grid(&sizes, &g.lambdas, &g.eps),
        trials: g.trials,
        methods,
        seed: cli.seed.unwrap_or(settings.seed),
        settings,
    })
}

fn emit_records<T: Serialize, S: Serialize>(
    cli: &Cli,
    g: &GridArgs,
    records: &[T],
    header: &[&str],
    summary: &S,
) -> CliResult<()> {
    let summary_json = to_json(summary);
    if let Some(path) = &g.summary {
        fs::write(path, &summary_json)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            bench::write_csv(records, header, &mut buf)?;
            emit(cli.out.as_deref(), &buf)?;
            if g.summary.is_none() {
                eprint!("{summary_json}");
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Both<'a, T, S> {
                records: &'a [T],
                summary: &'a S,
            }
            let text = to_json(&Both { records, summary });
            emit(cli.out.as_deref(), text.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_bench_time(cli: &Cli, a: &BenchTimeArgs) -> CliResult<i32> {
    let methods = a
        .methods
        .iter()
        .map(|m| parse_method(m))
        .collect::<CliResult<Vec<_>>>()?;
    let cfg = bench_config(cli, &a.grid, methods)?;
    let records = bench::run_timing_bench(&cfg)?;
    let summary = bench::summarize_timing(&records);
    emit_records(cli, &a.grid, &records, &BENCH_COLUMNS, &summary)?;
    Ok(exit::SUCCESS)
}

fn cmd_bench_ratio(cli: &Cli, a: &BenchRatioArgs) -> CliResult<i32> {
    let cfg = bench_config(cli, &a.grid, vec![Method::Power, Method::Pce, Method::Sce])?;
    match a.vary_initial {
        Some(starts) => {
            let records = bench::run_initial_vector_bench(&cfg, starts)?;
            let summary = bench::summarize_timing(&records);
            emit_records(cli, &a.grid, &records, &BENCH_COLUMNS, &summary)?;
        }
        None => {
            let records = bench::run_ratio_bench(&cfg)?;
            let summary = bench::summarize_ratios(&cfg, &records);
            emit_records(cli, &a.grid, &records, &RATIO_COLUMNS, &summary)?;
        }
    }
    Ok(exit::SUCCESS)
}
