//! `solve`, `counterexample`, `experiment1`, `table1`.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use nstr_core::problems::{
    counterexample_f, counterexample_reference_iterates, counterexample_tr_params,
    experiment1_minimizers, experiment1_problem, experiment1_state, experiment1_tr_params,
    experiment2_problem, experiment2_tr_params, CounterexampleModel, CounterexampleParams,
    CounterexampleProblem, Experiment2Config,
};
use nstr_core::trcore::{run, Status, TrParams};
use nstr_core::DenseVector;
use serde::Serialize;

use crate::config::{worker_count, Config};
use crate::output::{self, SCHEMA_VERSION};
use crate::pool::run_pool;
use crate::setup::{self, post_check, PostCheck};

fn out_dir(cfg: &mut Config, default: &str) -> PathBuf {
    cfg.take_path("out")
        .unwrap_or_else(|| PathBuf::from(default))
}

pub fn cmd_solve(mut cfg: Config) -> Result<i32> {
    let out = out_dir(&mut cfg, "nstr-out");
    let post_delta = cfg.take::<f64>("post_delta")?;
    let mut s = setup::build(&mut cfg)?;
    cfg.finish()?;
    let summary = setup::solve_and_write(&mut s, post_delta, &out)?;
    println!(
        "{}: {} after {} iterations, f = {:e}, min(|g|, psi) = {:e}",
        summary.problem,
        summary.status,
        summary.iterations,
        summary.f_final,
        summary.post_check.indicator
    );
    Ok(summary.exit_code)
}

#[derive(Debug, Serialize)]
struct ModelRun {
    status: String,
    iterations: usize,
    final_x: f64,
    final_delta: f64,
    post_check: PostCheck,
}

#[derive(Debug, Serialize)]
struct Verdict {
    schema_version: u32,
    /// Local model ends within 1e-6 of 0.
    local_model_limit_zero: bool,
    /// Bundle model ends within 1e-6 of 1.
    bundle_model_limit_one: bool,
    /// Max over `x_k`, `delta_k` against the closed form; `None` when the
    /// initial radius differs from the one the closed form needs.
    replay_max_abs_err: Option<f64>,
    replay_iterations: usize,
    /// The local model's limit fails the neighbourhood stationarity check.
    non_stationary_limit: bool,
    local: ModelRun,
    bundle: ModelRun,
}

pub fn cmd_counterexample(mut cfg: Config) -> Result<i32> {
    let out = out_dir(&mut cfg, "nstr-counterexample");
    let p = CounterexampleParams::new(cfg.take_or("a", 2.0)?, cfg.take_or("b", 1.0)?)?;
    let x0 = cfg.take_or("x0", -1.0)?;
    let bundle_max_iter = cfg.take_or("bundle_max_iter", 200usize)?;
    let post_delta = cfg.take_or("post_delta", 1e-6)?;
    let mut tr = counterexample_tr_params();
    cfg.apply_tr(&mut tr)?;
    cfg.finish()?;
    tr.validate()?;

    // Preconditions are checked against the radius the closed form needs;
    // a different delta0 only switches the replay off.
    let needed = (tr.beta1 * tr.beta2 - 1.0) / tr.beta1 * x0;
    let reference = counterexample_reference_iterates(
        &p,
        &TrParams {
            delta0: needed,
            ..tr.clone()
        },
        x0,
        tr.max_iter,
    )?;
    let replay = (tr.delta0 - needed).abs() <= 1e-12 * needed.abs();

    output::ensure_dir(&out)?;
    let x0v = DenseVector::from_element(1, x0);
    let mut nb = CounterexampleProblem::new(p, CounterexampleModel::Neighborhood);

    let mut local = CounterexampleProblem::new(p, CounterexampleModel::Local);
    let lo = run(&mut local, &tr, x0v.clone())?;
    let bundle_tr = TrParams {
        max_iter: bundle_max_iter,
        ..tr.clone()
    };
    let bo = run(&mut nb.clone(), &bundle_tr, x0v)?;

    let mut err: f64 = 0.0;
    let mut compared = 0;
    if replay {
        for (k, r) in reference.iter().enumerate() {
            let (Some(x), Some(rec)) = (lo.iterates.get(k), lo.records.get(k)) else {
                break;
            };
            err = err.max((x[0] - r.x).abs()).max((rec.delta - r.delta).abs());
            compared += 1;
        }
    }

    let mut model_run = |o: &nstr_core::trcore::RunOutput| -> Result<ModelRun> {
        Ok(ModelRun {
            status: o.state.status.as_str().to_string(),
            iterations: o.iterations(),
            final_x: o.state.x[0],
            final_delta: o.state.delta,
            post_check: post_check(&mut nb, &o.state.x, post_delta, tr.tol_stationarity)?,
        })
    };
    let local_run = model_run(&lo)?;
    let bundle_run = model_run(&bo)?;
    let verdict = Verdict {
        schema_version: SCHEMA_VERSION,
        local_model_limit_zero: local_run.final_x.abs() <= 1e-6,
        bundle_model_limit_one: (bundle_run.final_x - 1.0).abs() <= 1e-6,
        replay_max_abs_err: replay.then_some(err),
        replay_iterations: compared,
        non_stationary_limit: local_run.post_check.non_stationary_limit,
        local: local_run,
        bundle: bundle_run,
    };

    for (name, o) in [("local", &lo), ("bundle", &bo)] {
        let dir = out.join(name);
        output::ensure_dir(&dir)?;
        output::write_iterates(&dir.join("iterates.csv"), &o.records)?;
        let xs = o.iterates.iter().map(|x| x[0]).collect::<Vec<_>>();
        output::write_text(&dir.join("x.dat"), &output::grid_text(&xs, 1))?;
    }
    let samples = (0..=400).map(|i| {
        let x = -1.5 + 3.5 * f64::from(i) / 400.0;
        vec![x, counterexample_f(&p, x)]
    });
    output::write_text(
        &out.join("objective.dat"),
        &output::columns_text("x f", samples),
    )?;
    output::write_json(&out.join("verdict.json"), &verdict)?;
    println!(
        "local model: x = {:e} ({}), bundle model: x = {} ({}), replay error {}",
        verdict.local.final_x,
        verdict.local.status,
        verdict.bundle.final_x,
        verdict.bundle.status,
        verdict
            .replay_max_abs_err
            .map_or("skipped".to_string(), |e| format!("{e:e}"))
    );
    Ok(0)
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    u0: f64,
    final_u: f64,
    nearest_minimizer: f64,
    error: f64,
    iterations: usize,
    status: String,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    schema_version: u32,
    alpha: f64,
    z_d: f64,
    u_d: f64,
    minimizers: [f64; 2],
    runs: usize,
    failed_runs: usize,
    max_iterations: usize,
    max_error: f64,
    exit_code: i32,
}

pub fn cmd_experiment1(mut cfg: Config) -> Result<i32> {
    let out = out_dir(&mut cfg, "nstr-experiment1");
    let alpha = cfg.take_or("alpha", 0.01)?;
    let z_d = cfg.take_or("z_d", 1.0)?;
    let u_d = cfg.take_or("u_d", -5.0)?;
    let u0s: Vec<f64> = cfg
        .take_list("u0")?
        .unwrap_or_else(|| (-10..=10).map(|i| f64::from(i) * 0.5).collect());
    let workers = worker_count(cfg.take("workers")?)?;
    let mut tr = experiment1_tr_params();
    cfg.apply_tr(&mut tr)?;
    cfg.finish()?;
    tr.validate()?;
    experiment1_problem(alpha, z_d, u_d)?;
    let (m1, m2) = experiment1_minimizers(alpha, z_d, u_d);

    let mut rows: Vec<Option<Result<SweepRow>>> = Vec::new();
    rows.resize_with(u0s.len(), || None);
    run_pool(
        &u0s,
        workers,
        |&u0| -> Result<SweepRow> {
            let mut p = experiment1_problem(alpha, z_d, u_d)?;
            let o = run(&mut p, &tr, DenseVector::from_element(1, u0))?;
            let u = o.state.x[0];
            let near = if (u - m1).abs() <= (u - m2).abs() {
                m1
            } else {
                m2
            };
            Ok(SweepRow {
                u0,
                final_u: u,
                nearest_minimizer: near,
                error: (u - near).abs(),
                iterations: o.iterations(),
                status: o.state.status.as_str().to_string(),
            })
        },
        |i, r| rows[i] = Some(r),
    );
    let rows = rows
        .into_iter()
        .map(|r| r.expect("every job collected"))
        .collect::<Result<Vec<_>>>()?;

    output::ensure_dir(&out)?;
    let mut csv = String::from("u0,final_u,nearest_minimizer,error,iterations,status\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{:e},{:e},{:e},{:e},{},{}",
            r.u0, r.final_u, r.nearest_minimizer, r.error, r.iterations, r.status
        );
    }
    output::write_text(&out.join("sweep.csv"), &csv)?;
    let samples = (0..=600).map(|i| {
        let u = -6.0 + 12.0 * f64::from(i) / 600.0;
        let y = experiment1_state(u);
        let f = 0.5 * (y - z_d).powi(2) + 0.5 * alpha * (u - u_d).powi(2);
        vec![u, f, y]
    });
    output::write_text(
        &out.join("objective.dat"),
        &output::columns_text("u f y", samples),
    )?;

    let failed = rows
        .iter()
        .filter(|r| r.status == Status::MaxIter.as_str())
        .count();
    let summary = SweepSummary {
        schema_version: SCHEMA_VERSION,
        alpha,
        z_d,
        u_d,
        minimizers: [m1, m2],
        runs: rows.len(),
        failed_runs: failed,
        max_iterations: rows.iter().map(|r| r.iterations).max().unwrap_or(0),
        max_error: rows.iter().map(|r| r.error).fold(0.0, f64::max),
        exit_code: if failed == 0 { 0 } else { 2 },
    };
    output::write_json(&out.join("summary.json"), &summary)?;
    println!(
        "{} runs, max {} iterations, max distance to a minimizer {:e}",
        summary.runs, summary.max_iterations, summary.max_error
    );
    Ok(summary.exit_code)
}

#[derive(Debug, Clone, Serialize)]
struct Cell {
    m: usize,
    h: f64,
    alpha: f64,
    nu: f64,
    /// `total(inexact)` or `FAIL`.
    cell: String,
    converged: bool,
    iterations: Option<usize>,
    inexact_iterations: Option<usize>,
    status: String,
    norm_g: Option<f64>,
    psi: Option<f64>,
    indicator: Option<f64>,
    zero_set: Option<usize>,
    biactive: Option<usize>,
    heuristic: bool,
    wall_ms: f64,
    error: Option<String>,
}

fn table1_cell(m: usize, alpha: f64, nu: f64, tr: &TrParams) -> Cell {
    let start = Instant::now();
    let mut cell = Cell {
        m,
        h: 1.0 / (m as f64 + 1.0),
        alpha,
        nu,
        cell: "FAIL".into(),
        converged: false,
        iterations: None,
        inexact_iterations: None,
        status: "error".into(),
        norm_g: None,
        psi: None,
        indicator: None,
        zero_set: None,
        biactive: None,
        heuristic: false,
        wall_ms: 0.0,
        error: None,
    };
    let result = (|| -> Result<()> {
        let c = Experiment2Config::new(m, alpha, nu);
        let mut p = experiment2_problem(&c)?;
        let o = run(&mut p, tr, c.initial_control())?;
        let delta = setup::default_post_delta(&o, tr);
        let check = post_check(&mut p, &o.state.x, delta, tr.tol_stationarity)?;
        let sol = p.solution(&o.state.x)?;
        let total = o.iterations();
        let inexact = o.refined_at.unwrap_or(total);
        cell.iterations = Some(total);
        cell.inexact_iterations = Some(inexact);
        cell.status = o.state.status.as_str().to_string();
        cell.norm_g = Some(check.norm_g);
        cell.psi = Some(check.psi);
        cell.indicator = Some(check.indicator);
        cell.zero_set = Some(sol.sets.active().len());
        cell.biactive = Some(sol.sets.biactive.len());
        cell.heuristic = o.heuristic;
        cell.converged = o.state.status != Status::MaxIter && check.stationary;
        if cell.converged {
            cell.cell = format!("{total}({inexact})");
        }
        Ok(())
    })();
    if let Err(e) = result {
        cell.error = Some(format!("{e:#}"));
    }
    cell.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    cell
}

#[derive(Debug, Serialize)]
struct TableSummary {
    schema_version: u32,
    cells: usize,
    converged: usize,
    exit_code: i32,
}

/// `h = 1/20` and `h = 1/40`.
const TABLE1_MS: [usize; 2] = [19, 39];
const TABLE1_ALPHAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const TABLE1_NUS: [f64; 4] = [4.0, 8.0, 12.0, 18.0];

fn table1_jobs(ms: &[usize], alphas: &[f64], nus: &[f64]) -> Vec<(usize, f64, f64)> {
    let mut jobs = Vec::new();
    for &m in ms {
        for &a in alphas {
            for &nu in nus {
                jobs.push((m, a, nu));
            }
        }
    }
    jobs
}

pub fn cmd_table1(mut cfg: Config) -> Result<i32> {
    let out = out_dir(&mut cfg, "nstr-table1");
    let ms: Vec<usize> = cfg.take_list("ms")?.unwrap_or_else(|| TABLE1_MS.to_vec());
    let alphas: Vec<f64> = cfg
        .take_list("alphas")?
        .unwrap_or_else(|| TABLE1_ALPHAS.to_vec());
    let nus: Vec<f64> = cfg.take_list("nus")?.unwrap_or_else(|| TABLE1_NUS.to_vec());
    let workers = worker_count(cfg.take("workers")?)?;
    let mut tr = experiment2_tr_params();
    cfg.apply_tr(&mut tr)?;
    cfg.finish()?;
    tr.validate()?;

    let jobs = table1_jobs(&ms, &alphas, &nus);
    let mut cells: Vec<Option<Cell>> = Vec::new();
    cells.resize_with(jobs.len(), || None);
    run_pool(
        &jobs,
        workers,
        |&(m, a, nu)| table1_cell(m, a, nu, &tr),
        |i, c| {
            eprintln!("m={} alpha={:e} nu={}: {}", c.m, c.alpha, c.nu, c.cell);
            cells[i] = Some(c);
        },
    );
    let cells: Vec<Cell> = cells.into_iter().map(|c| c.expect("collected")).collect();

    output::ensure_dir(&out)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
    let optu = |v: Option<usize>| v.map_or(String::new(), |x| x.to_string());
    let mut csv = String::from(
        "m,h,alpha,nu,cell,iterations,inexact_iterations,status,norm_g,psi,indicator,zero_set,biactive,heuristic,wall_ms\n",
    );
    for c in &cells {
        let _ = writeln!(
            csv,
            "{},{:e},{:e},{},{},{},{},{},{},{},{},{},{},{},{:.1}",
            c.m,
            c.h,
            c.alpha,
            c.nu,
            c.cell,
            optu(c.iterations),
            optu(c.inexact_iterations),
            c.status,
            opt(c.norm_g),
            opt(c.psi),
            opt(c.indicator),
            optu(c.zero_set),
            optu(c.biactive),
            c.heuristic,
            c.wall_ms
        );
    }
    output::write_text(&out.join("table1.csv"), &csv)?;
    output::write_json(&out.join("cells.json"), &cells)?;

    let converged = cells.iter().filter(|c| c.converged).count();
    // At least 90% of the cells.
    let ok = converged * 10 >= cells.len() * 9;
    let summary = TableSummary {
        schema_version: SCHEMA_VERSION,
        cells: cells.len(),
        converged,
        exit_code: if ok { 0 } else { 2 },
    };
    output::write_json(&out.join("summary.json"), &summary)?;
    println!("{converged}/{} cells converged", cells.len());
    Ok(summary.exit_code)
}

/// Reads an optional config file then applies `key=value` overrides.
pub fn load(args: &[String], require_file: bool) -> Result<Config> {
    let mut file = None;
    let mut pairs = Vec::new();
    for a in args {
        if a.contains('=') {
            pairs.push(a);
        } else if file.is_none() {
            file = Some(PathBuf::from(a));
        } else {
            anyhow::bail!("unexpected argument {a:?}");
        }
    }
    let mut cfg = match &file {
        Some(p) => Config::from_file(p)?,
        None if require_file => anyhow::bail!("missing config file"),
        None => Config::default(),
    };
    for p in pairs {
        cfg.insert_pair(p).context("command-line override")?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_has_32_cells() {
        let jobs = table1_jobs(&TABLE1_MS, &TABLE1_ALPHAS, &TABLE1_NUS);
        assert_eq!(jobs.len(), 32);
        assert_eq!(jobs[0], (19, 1e-1, 4.0));
        assert_eq!(jobs[31], (39, 1e-4, 18.0));
    }

    #[test]
    fn load_splits_file_and_overrides() {
        let dir = std::env::temp_dir().join(format!("nstr-load-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("c.cfg");
        std::fs::write(&f, "alpha=1\n").unwrap();
        let args = vec![f.display().to_string(), "alpha=2".to_string()];
        let mut cfg = load(&args, true).unwrap();
        assert_eq!(cfg.take::<f64>("alpha").unwrap(), Some(2.0));
        assert!(load(&["a".into(), "b".into()], false).is_err());
        assert!(load(&[], true).is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
