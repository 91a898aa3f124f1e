//! Problem construction from configuration keys, and the shared
//! post-run report.

use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use nstr_core::linalg::read_matrix_market;
use nstr_core::models::stationarity_measure;
use nstr_core::problems::{
    counterexample_tr_params, experiment1_problem, experiment1_tr_params, experiment2_problem,
    experiment2_tr_params, CounterexampleModel, CounterexampleParams, CounterexampleProblem,
    Experiment2Config, Problem, TrackingObjective, ViTrackingProblem,
};
use nstr_core::trcore::{RunOutput, Status, StepKind, TrParams};
use nstr_core::vi::ViProblemData;
use nstr_core::DenseVector;
use serde::Serialize;

use crate::config::Config;
use crate::output::{self, SCHEMA_VERSION};

pub enum Built {
    Counterexample(CounterexampleProblem),
    /// `row_len` controls the layout of the `.dat` files.
    Vi {
        problem: Box<ViTrackingProblem>,
        row_len: usize,
    },
}

pub struct Setup {
    pub name: String,
    pub built: Built,
    pub x0: DenseVector,
    pub params: TrParams,
}

fn constant_or_default(cfg: &mut Config, key: &str, default: DenseVector) -> Result<DenseVector> {
    Ok(match cfg.take::<f64>(key)? {
        Some(c) => DenseVector::from_element(default.len(), c),
        None => default,
    })
}

/// Reads the problem keys and the trust-region overrides.
pub fn build(cfg: &mut Config) -> Result<Setup> {
    let name = cfg
        .take_str("problem")
        .context("missing key `problem` (counterexample | experiment1 | experiment2 | matrix)")?;
    let (built, x0, mut params) = match name.as_str() {
        "counterexample" => {
            let p = CounterexampleParams::new(cfg.take_or("a", 2.0)?, cfg.take_or("b", 1.0)?)?;
            let model = match cfg.take_str("model").as_deref() {
                None | Some("local") => CounterexampleModel::Local,
                Some("bundle") => CounterexampleModel::Neighborhood,
                Some(m) => bail!("model must be local or bundle, got {m:?}"),
            };
            let mut params = counterexample_tr_params();
            if model == CounterexampleModel::Neighborhood {
                params.max_iter = 200;
            }
            let x0 = DenseVector::from_element(1, cfg.take_or("x0", -1.0)?);
            (
                Built::Counterexample(CounterexampleProblem::new(p, model)),
                x0,
                params,
            )
        }
        "experiment1" => {
            let problem = experiment1_problem(
                cfg.take_or("alpha", 0.01)?,
                cfg.take_or("z_d", 1.0)?,
                cfg.take_or("u_d", -5.0)?,
            )?;
            let x0 = DenseVector::from_element(1, cfg.take_or("u0", -3.0)?);
            let built = Built::Vi {
                problem: Box::new(problem),
                row_len: 1,
            };
            (built, x0, experiment1_tr_params())
        }
        "experiment2" => {
            let mut c = Experiment2Config::new(
                cfg.take_or("m", 19)?,
                cfg.take_or("alpha", 1e-3)?,
                cfg.take_or("nu", 4.0)?,
            );
            c.target_threshold = cfg.take_or("threshold", c.target_threshold)?;
            match cfg.take_str("schedule").as_deref() {
                None | Some("two_phase") => {}
                Some("exact") => c.schedule = None,
                Some(s) => bail!("schedule must be two_phase or exact, got {s:?}"),
            }
            let problem = experiment2_problem(&c)?;
            let x0 = constant_or_default(cfg, "u0", c.initial_control())?;
            let built = Built::Vi {
                problem: Box::new(problem),
                row_len: c.m,
            };
            (built, x0, experiment2_tr_params())
        }
        "matrix" => {
            let path = cfg
                .take_path("matrix")
                .context("problem=matrix needs `matrix`")?;
            let a = read_matrix_market(&path)
                .with_context(|| format!("matrix file {}", path.display()))?;
            let n = a.dim();
            let nu = cfg.take_or("nu", 1.0)?;
            let data = ViProblemData::new(a, nu)?;
            let z_d = DenseVector::from_element(n, cfg.take_or("z_d", 1.0)?);
            let u_d = DenseVector::from_element(n, cfg.take_or("u_d", 0.0)?);
            let x0 = constant_or_default(cfg, "u0", &z_d * (2.0 * nu))?;
            let obj = TrackingObjective::new(z_d, u_d, cfg.take_or("alpha", 1e-3)?)?;
            let built = Built::Vi {
                problem: Box::new(ViTrackingProblem::new(data, obj)?),
                row_len: 1,
            };
            (built, x0, TrParams::default())
        }
        other => bail!("unknown problem {other:?}"),
    };
    cfg.apply_tr(&mut params)?;
    params.validate()?;
    Ok(Setup {
        name,
        built,
        x0,
        params,
    })
}

/// Stationarity re-checked at the final point with radius `delta`.
#[derive(Debug, Clone, Serialize)]
pub struct PostCheck {
    pub delta: f64,
    pub psi: f64,
    pub norm_g: f64,
    /// `min{|g|, psi}`.
    pub indicator: f64,
    pub stationary: bool,
    /// `indicator > 100 tol_stationarity`.
    pub non_stationary_limit: bool,
}

pub fn post_check<P: Problem + ?Sized>(
    problem: &mut P,
    x: &DenseVector,
    delta: f64,
    tol: f64,
) -> Result<PostCheck> {
    let norm_g = problem.subgradient(x)?.norm();
    let psi = stationarity_measure(&problem.bundle(x, delta)?)?.psi;
    let indicator = norm_g.min(psi);
    Ok(PostCheck {
        delta,
        psi,
        norm_g,
        indicator,
        stationary: indicator <= tol,
        non_stationary_limit: indicator > 100.0 * tol,
    })
}

/// Default post-check radius: the final radius, at most `delta_stationary`.
/// Runs stopped by `g = 0` can end with a large radius.
pub fn default_post_delta(out: &RunOutput, params: &TrParams) -> f64 {
    out.state.delta.min(params.delta_stationary)
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::MaxIter | Status::Running => 2,
        _ => 0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ViSummary {
    /// `{i : y_i = 0}`.
    pub zero_set: usize,
    pub strongly_active: usize,
    pub biactive: usize,
    pub inactive: usize,
    pub vi_solves: usize,
    pub vi_tolerance: f64,
    pub vi_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    pub problem: String,
    pub status: String,
    pub exit_code: i32,
    pub iterations: usize,
    pub successful_steps: usize,
    pub null_steps: usize,
    /// Pass at which the VI tolerance was tightened.
    pub refined_at: Option<usize>,
    /// Approximate bundles were used somewhere in the run.
    pub heuristic: bool,
    pub f_initial: f64,
    pub f_final: f64,
    pub norm_g: f64,
    pub delta_final: f64,
    pub post_check: PostCheck,
    pub x: Vec<f64>,
    pub vi: Option<ViSummary>,
    pub wall_ms: f64,
}

/// Runs a built problem, writes its files into `out`, returns the summary.
pub fn solve_and_write(
    setup: &mut Setup,
    post_delta: Option<f64>,
    out_dir: &Path,
) -> Result<Summary> {
    let start = std::time::Instant::now();
    let params = setup.params.clone();
    output::ensure_dir(out_dir)?;
    let (out, check, vi) = match &mut setup.built {
        Built::Counterexample(p) => {
            let out = nstr_core::trcore::run(p, &params, setup.x0.clone())?;
            let delta = post_delta.unwrap_or_else(|| default_post_delta(&out, &params));
            // The neighbourhood bundle is the model-independent certificate.
            let mut nb = CounterexampleProblem::new(p.params, CounterexampleModel::Neighborhood);
            let check = post_check(&mut nb, &out.state.x, delta, params.tol_stationarity)?;
            output::write_text(
                &out_dir.join("control.dat"),
                &output::grid_text(out.state.x.as_slice(), 1),
            )?;
            (out, check, None)
        }
        Built::Vi { problem, row_len } => {
            let out = nstr_core::trcore::run(problem.as_mut(), &params, setup.x0.clone())?;
            let delta = post_delta.unwrap_or_else(|| default_post_delta(&out, &params));
            let check = post_check(
                problem.as_mut(),
                &out.state.x,
                delta,
                params.tol_stationarity,
            )?;
            let sol = problem.solution(&out.state.x)?;
            let rl = *row_len;
            for (file, v) in [
                ("state.dat", &sol.y),
                ("control.dat", &out.state.x),
                ("dual.dat", &sol.q),
            ] {
                output::write_text(&out_dir.join(file), &output::grid_text(v.as_slice(), rl))?;
            }
            let vi = ViSummary {
                zero_set: sol.sets.active().len(),
                strongly_active: sol.sets.strongly_active.len(),
                biactive: sol.sets.biactive.len(),
                inactive: sol.sets.inactive.len(),
                vi_solves: problem.vi_solves(),
                vi_tolerance: problem.vi_tolerance(),
                vi_residual: sol.residual,
            };
            (out, check, Some(vi))
        }
    };
    output::write_iterates(&out_dir.join("iterates.csv"), &out.records)?;
    let summary = summarize("solve", &setup.name, &out, check, vi, start.elapsed());
    output::write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

pub fn summarize(
    command: &str,
    problem: &str,
    out: &RunOutput,
    post_check: PostCheck,
    vi: Option<ViSummary>,
    elapsed: Duration,
) -> Summary {
    Summary {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        problem: problem.to_string(),
        status: out.state.status.as_str().to_string(),
        exit_code: exit_code(out.state.status),
        iterations: out.iterations(),
        successful_steps: out.count(StepKind::Successful),
        null_steps: out.count(StepKind::Null),
        refined_at: out.refined_at,
        heuristic: out.heuristic,
        f_initial: out.records.first().map_or(out.state.f_x, |r| r.f),
        f_final: out.state.f_x,
        norm_g: out.state.g.norm(),
        delta_final: out.state.delta,
        post_check,
        x: out.state.x.iter().copied().collect(),
        vi,
        wall_ms: elapsed.as_secs_f64() * 1e3,
    }
}
