//! Benchmark harness over a grid of generated problems.
//!
//! Every trial owns a problem seed `derive_seed(seed, [cell, trial])`;
//! trials run on a rayon pool and results are collected in
//! `(cell, trial)` order, so value columns do not depend on scheduling.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use stlscond_core::estimators::{power_method, EstimatorSettings};
use stlscond_core::generator::{derive_seed, generate, GeneratorSpec};
use stlscond_core::{solve_stls, ConditionReport, Method, StlsProblem, StlsSolution};

use crate::evaluate::evaluate;
use crate::exit::{CliError, CliResult};

pub const BENCH_COLUMNS: [&str; 10] = [
    "m",
    "n",
    "lambda",
    "e_p",
    "seed",
    "method",
    "value",
    "wall_time_seconds",
    "iterations",
    "trial_index",
];
pub const RATIO_COLUMNS: [&str; 4] = ["trial_index", "ratio1", "ratio2", "ratio3"];

/// One measurement. `value` is NaN when the evaluation failed or an
/// iterative method did not converge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub e_p: f64,
    pub seed: u64,
    pub method: Method,
    pub value: f64,
    pub wall_time_seconds: f64,
    pub iterations: Option<usize>,
    pub trial_index: usize,
}

/// Estimates over the exact F2 value: power, PCE, SCE. NaN marks a failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub trial_index: usize,
    pub ratio1: f64,
    pub ratio2: f64,
    pub ratio3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub e_p: f64,
}

impl Cell {
    fn spec(&self, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            m: self.m,
            n: self.n,
            lambda: self.lambda,
            e_p: self.e_p,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub cells: Vec<Cell>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub settings: EstimatorSettings,
}

impl BenchConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if self.cells.is_empty() {
            return Err(CliError::Usage("empty benchmark grid".into()));
        }
        for c in &self.cells {
            c.spec(0).validate()?;
        }
        Ok(())
    }

    pub fn trial_seed(&self, cell: usize, trial: usize) -> u64 {
        derive_seed(self.seed, &[cell as u64, trial as u64])
    }
}

/// Parse `"200x150"` into `(200, 150)`.
pub fn parse_size(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("size '{s}' is not of the form MxN"));
    let (m, n) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((m.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?))
}

/// Cartesian grid in (size, lambda, e_p) order.
pub fn grid(sizes: &[(usize, usize)], lambdas: &[f64], eps: &[f64]) -> Vec<Cell> {
    let mut out = Vec::new();
    for &(m, n) in sizes {
        for &lambda in lambdas {
            for &e_p in eps {
                out.push(Cell { m, n, lambda, e_p });
            }
        }
    }
    out
}

/// Worker pool sized by `STLSCOND_THREADS` (default: all cores).
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("STLSCOND_THREADS") {
        let k: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|k| *k > 0)
            .ok_or_else(|| CliError::Usage(format!("STLSCOND_THREADS='{v}' is not a positive integer")))?;
        b = b.num_threads(k);
    }
    b.build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

fn prepare(cell: &Cell, seed: u64) -> Option<(StlsProblem, StlsSolution)> {
    let g = generate(&cell.spec(seed)).ok()?;
    let sol = solve_stls(&g.problem).ok()?;
    Some((g.problem, sol))
}

fn usable(rep: &ConditionReport) -> Option<f64> {
    let converged = rep
        .diagnostics
        .as_ref()
        .and_then(|d| d.converged)
        .unwrap_or(true);
    (converged && rep.absolute.is_finite()).then_some(rep.absolute)
}

fn timed(
    method: Method,
    p: &StlsProblem,
    sol: &StlsSolution,
    settings: &EstimatorSettings,
) -> (f64, f64, Option<usize>) {
    let start = Instant::now();
    let res = evaluate(method, p, sol, settings);
    let secs = start.elapsed().as_secs_f64();
    match res {
        Ok(rep) => (
            usable(&rep).unwrap_or(f64::NAN),
            secs,
            rep.diagnostics.and_then(|d| d.iterations),
        ),
        Err(_) => (f64::NAN, secs, None),
    }
}

fn settings_for(cfg: &BenchConfig, seed: u64, n: usize) -> EstimatorSettings {
    let mut s = cfg.settings;
    s.seed = seed;
    s.sce.k = s.sce.k.min(n);
    s
}

/// Wall time around each condition evaluation; generation and the solve
/// are not timed.
pub fn run_timing_bench(cfg: &BenchConfig) -> CliResult<Vec<BenchRecord>> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let mut out = Vec::new();
    for (ci, cell) in cfg.cells.iter().enumerate() {
        let rows: Vec<Vec<BenchRecord>> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = cfg.trial_seed(ci, t);
                    let prepared = prepare(cell, seed);
                    let settings = settings_for(cfg, seed, cell.n);
                    cfg.methods
                        .iter()
                        .map(|&method| {
                            let (value, wall, iterations) = match &prepared {
                                Some((p, sol)) => timed(method, p, sol, &settings),
                                None => (f64::NAN, 0.0, None),
                            };
                            BenchRecord {
                                m: cell.m,
                                n: cell.n,
                                lambda: cell.lambda,
                                e_p: cell.e_p,
                                seed,
                                method,
                                value,
                                wall_time_seconds: wall,
                                iterations,
                                trial_index: t,
                            }
                        })
                        .collect()
                })
                .collect()
        });
        out.extend(rows.into_iter().flatten());
    }
    Ok(out)
}

/// Ratios power/F2, PCE/F2 and SCE/F2 per trial. `trial_index` runs over
/// the whole grid: cell `c` owns indices `c·trials .. (c+1)·trials`.
pub fn run_ratio_bench(cfg: &BenchConfig) -> CliResult<Vec<RatioRecord>> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let mut out = Vec::new();
    for (ci, cell) in cfg.cells.iter().enumerate() {
        let rows: Vec<RatioRecord> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = cfg.trial_seed(ci, t);
                    let settings = settings_for(cfg, seed, cell.n);
                    let mut ratios = [f64::NAN; 3];
                    if let Some((p, sol)) = prepare(cell, seed) {
                        if let Some(exact) = evaluate(Method::F2, &p, &sol, &settings)
                            .ok()
                            .as_ref()
                            .and_then(usable)
                        {
                            for (slot, method) in
                                ratios.iter_mut().zip([Method::Power, Method::Pce, Method::Sce])
                            {
                                if let Some(v) = evaluate(method, &p, &sol, &settings)
                                    .ok()
                                    .as_ref()
                                    .and_then(usable)
                                {
                                    *slot = v / exact;
                                }
                            }
                        }
                    }
                    RatioRecord {
                        trial_index: ci * cfg.trials + t,
                        ratio1: ratios[0],
                        ratio2: ratios[1],
                        ratio3: ratios[2],
                    }
                })
                .collect()
        });
        out.extend(rows);
    }
    Ok(out)
}

/// Power method from `starts` random initial vectors on each of `trials`
/// problems per cell. Row `trial_index = group·starts + j`; the start
/// vector of row `j` is seeded with `derive_seed(seed, [j])` where `seed`
/// is the problem seed in the row.
pub fn run_initial_vector_bench(cfg: &BenchConfig, starts: usize) -> CliResult<Vec<BenchRecord>> {
    cfg.validate()?;
    if starts == 0 {
        return Err(CliError::Usage("--vary-initial must be at least 1".into()));
    }
    let pool = thread_pool()?;
    let mut out = Vec::new();
    for (ci, cell) in cfg.cells.iter().enumerate() {
        let rows: Vec<Vec<BenchRecord>> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|group| {
                    let seed = cfg.trial_seed(ci, group);
                    let prepared = prepare(cell, seed);
                    (0..starts)
                        .map(|j| {
                            let (value, wall, iterations) = match &prepared {
                                Some((p, sol)) => {
                                    let mut pc = cfg.settings.power_config();
                                    pc.seed = derive_seed(seed, &[j as u64]);
                                    let start = Instant::now();
                                    let res = power_method(sol, p.a(), &pc);
                                    let secs = start.elapsed().as_secs_f64();
                                    match res {
                                        Ok(rep) => (
                                            usable(&rep).unwrap_or(f64::NAN),
                                            secs,
                                            rep.diagnostics.and_then(|d| d.iterations),
                                        ),
                                        Err(_) => (f64::NAN, secs, None),
                                    }
                                }
                                None => (f64::NAN, 0.0, None),
                            };
                            BenchRecord {
                                m: cell.m,
                                n: cell.n,
                                lambda: cell.lambda,
                                e_p: cell.e_p,
                                seed,
                                method: Method::Power,
                                value,
                                wall_time_seconds: wall,
                                iterations,
                                trial_index: group * starts + j,
                            }
                        })
                        .collect()
                })
                .collect()
        });
        out.extend(rows.into_iter().flatten());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub cell: Cell,
    pub method: Method,
    pub trials: usize,
    pub failures: usize,
    pub mean_wall_time: f64,
    /// Sample variance (divisor `trials − 1`), zero for one trial.
    pub variance_wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_iterations: Option<f64>,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Per (cell, method) wall-time statistics, in first-appearance order.
pub fn summarize_timing(records: &[BenchRecord]) -> Vec<TimingSummary> {
    let mut keys: Vec<(Cell, Method)> = Vec::new();
    for r in records {
        let key = (
            Cell {
                m: r.m,
                n: r.n,
                lambda: r.lambda,
                e_p: r.e_p,
            },
            r.method,
        );
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(cell, method)| {
            let rows: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| {
                    r.method == method
                        && r.m == cell.m
                        && r.n == cell.n
                        && r.lambda == cell.lambda
                        && r.e_p == cell.e_p
                })
                .collect();
            let times: Vec<f64> = rows.iter().map(|r| r.wall_time_seconds).collect();
            let (mean, var) = mean_var(&times);
            let iters: Vec<f64> = rows
                .iter()
                .filter_map(|r| r.iterations.map(|k| k as f64))
                .collect();
            TimingSummary {
                cell,
                method,
                trials: rows.len(),
                failures: rows.iter().filter(|r| r.value.is_nan()).count(),
                mean_wall_time: mean,
                variance_wall_time: var,
                mean_iterations: (!iters.is_empty()).then(|| mean_var(&iters).0),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    /// Share of all trials (failures count as outside) within (0.1, 10).
    pub fraction_inside: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub cell: Cell,
    pub first_trial: usize,
    pub trials: usize,
    pub power: RatioStats,
    pub pce: RatioStats,
    pub sce: RatioStats,
}

pub fn ratio_stats(values: &[f64]) -> RatioStats {
    let ok: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    let inside = ok.iter().filter(|v| **v > 0.1 && **v < 10.0).count();
    RatioStats {
        min: ok.iter().copied().fold(f64::INFINITY, f64::min),
        max: ok.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        fraction_inside: if values.is_empty() {
            f64::NAN
        } else {
            inside as f64 / values.len() as f64
        },
        failures: values.len() - ok.len(),
    }
}

pub fn summarize_ratios(cfg: &BenchConfig, records: &[RatioRecord]) -> Vec<RatioSummary> {
    cfg.cells
        .iter()
        .enumerate()
        .map(|(ci, cell)| {
            let first = ci * cfg.trials;
            let rows: Vec<&RatioRecord> = records
                .iter()
                .filter(|r| r.trial_index >= first && r.trial_index < first + cfg.trials)
                .collect();
            let col = |f: fn(&RatioRecord) -> f64| rows.iter().map(|r| f(r)).collect::<Vec<_>>();
            RatioSummary {
                cell: *cell,
                first_trial: first,
                trials: rows.len(),
                power: ratio_stats(&col(|r| r.ratio1)),
                pce: ratio_stats(&col(|r| r.ratio2)),
                sce: ratio_stats(&col(|r| r.ratio3)),
            }
        })
        .collect()
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], header: &[&str], w: W) -> CliResult<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    wtr.write_record(header).map_err(io)?;
    for r in rows {
        wtr.serialize(r).map_err(io)?;
    }
    wtr.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn read_csv<T: DeserializeOwned, R: Read>(r: R) -> CliResult<Vec<T>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Io(e.to_string()))
}
