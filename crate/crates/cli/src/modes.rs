//! Per-mode parameter parsing and execution.

use acp_core::branching::{simulate_progeny, tail_certificate, GWParams, DEFAULT_PROGENY_CAP};
use acp_core::lattice::{run_block_experiment, run_from, BlockGeometry, Boundary, Initial, SimParams};
use acp_core::meanfield::{integrate, interior_fixed_point, threshold_check, MFParams, MFState, DEFAULT_DT, ROOT_TOL};
use acp_core::percolation::{count_directed_sa_paths, sample_field_and_search, FieldExtent};
use acp_core::rng::par_replicas;
use acp_core::stats::wilson_interval;
use acp_core::stats::Z95;
use acp_core::verify::{run_all, Scale};
use serde_json::{json, Map, Value};

use crate::output::{num, Csv};
use crate::{CliError, ExperimentConfig, Mode, Params};

pub struct RunResult {
    pub file_name: String,
    pub body: String,
    pub extra_files: Vec<(String, String)>,
    pub aggregates: Map<String, Value>,
    /// Set when a verification check failed.
    pub failure: Option<String>,
}

impl RunResult {
    fn new(file_name: &str, body: String, aggregates: Value) -> Self {
        let Value::Object(aggregates) = aggregates else {
            unreachable!("aggregates are built with json!({{...}})")
        };
        Self {
            file_name: file_name.to_owned(),
            body,
            extra_files: Vec::new(),
            aggregates,
            failure: None,
        }
    }
}

/// A fully validated experiment, ready to run.
pub struct Plan {
    replicas: u64,
    task: Task,
}

enum Task {
    Simulate { params: SimParams, initial: Initial },
    Branching { params: GWParams, cap: u64 },
    Meanfield { params: MFParams, start: MFState, t_end: f64, dt: f64 },
    PathCounts { d: usize, n_max: u32 },
    Field { epsilon: f64, extent: FieldExtent },
    Block { geom: BlockGeometry, params: SimParams, initial: Initial },
    Verify { scale: Scale },
}

fn bad(key: &str, message: impl Into<String>) -> CliError {
    CliError::Validation {
        key: key.to_owned(),
        message: message.into(),
    }
}

fn boundary(p: &mut Params, default: &str) -> Result<Boundary, CliError> {
    Ok(p.get::<String>("boundary", default.to_owned())?.parse()?)
}

fn initial(p: &mut Params, default: &str) -> Result<Initial, CliError> {
    match p.get::<String>("initial", default.to_owned())?.as_str() {
        "single_symptomatic" => Ok(Initial::SingleSymptomaticAtOrigin),
        "all_symptomatic" => Ok(Initial::AllSymptomatic),
        "all_healthy" => Ok(Initial::AllHealthy),
        other => Err(bad(
            "initial",
            format!("unknown initial condition `{other}` (single_symptomatic, all_symptomatic, all_healthy)"),
        )),
    }
}

fn sim_params(p: &mut Params, default_boundary: &str) -> Result<SimParams, CliError> {
    let defaults = SimParams::default();
    let params = SimParams {
        d: p.get("d", defaults.d)?,
        half_width: p.get("half_width", defaults.half_width)?,
        lambda1: p.get("lambda1", defaults.lambda1)?,
        lambda2: p.get("lambda2", defaults.lambda2)?,
        gamma: p.get("gamma", defaults.gamma)?,
        boundary: boundary(p, default_boundary)?,
        horizon: p.get("horizon", defaults.horizon)?,
        seed: 0,
    };
    Ok(params)
}

/// Reads and validates every parameter of the mode.
pub fn plan(config: &mut ExperimentConfig) -> Result<Plan, CliError> {
    let p = &mut config.parameters;
    let (task, default_replicas) = match config.mode {
        Mode::Simulate => {
            let params = sim_params(p, "healthy_frozen")?;
            params.validate()?;
            if params.boundary == Boundary::SymptomaticFrozen {
                return Err(bad("boundary", "symptomatic_frozen is reserved for block experiments"));
            }
            let initial = initial(p, "single_symptomatic")?;
            (Task::Simulate { params, initial }, 1_000)
        }
        Mode::Branching => {
            let params = GWParams::new(p.get("d", 1)?, p.get("gamma", 0.1)?)?;
            let cap = p.get("cap", DEFAULT_PROGENY_CAP)?;
            if cap == 0 {
                return Err(bad("cap", "must be positive"));
            }
            (Task::Branching { params, cap }, 10_000)
        }
        Mode::Meanfield => {
            let params = MFParams::new(p.get("lambda1", 0.0)?, p.get("lambda2", 3.0)?, p.get("gamma", 1.0)?)?;
            let start = MFState::new(p.get("u1", 0.1)?, p.get("u2", 0.1)?);
            if !start.in_simplex(0.0) {
                return Err(bad("u1", "start (u1, u2) must satisfy u1, u2 >= 0 and u1 + u2 <= 1"));
            }
            let t_end: f64 = p.get("t_end", 200.0)?;
            if !(t_end >= 0.0 && t_end.is_finite()) {
                return Err(bad("t_end", "must be finite and >= 0"));
            }
            let dt: f64 = p.get("dt", DEFAULT_DT)?;
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(bad("dt", "must be positive"));
            }
            (Task::Meanfield { params, start, t_end, dt }, 1)
        }
        Mode::Percolation => match p.get::<String>("task", "paths".into())?.as_str() {
            "paths" => {
                let d: usize = p.get("d", 1)?;
                if d == 0 {
                    return Err(bad("d", "must be at least 1"));
                }
                (Task::PathCounts { d, n_max: p.get("n_max", 6)? }, 1)
            }
            "field" => {
                let epsilon: f64 = p.get("epsilon", 0.1)?;
                if !(0.0..=1.0).contains(&epsilon) {
                    return Err(bad("epsilon", "must lie in [0, 1]"));
                }
                let extent = FieldExtent::new(p.get("d", 1)?, p.get("half_width", 20)?, p.get("levels", 41)?)?;
                (Task::Field { epsilon, extent }, 1_000)
            }
            other => return Err(bad("task", format!("unknown percolation task `{other}` (paths, field)"))),
        },
        Mode::Block => {
            let params = sim_params(p, "symptomatic_frozen")?;
            params.validate()?;
            let geom = BlockGeometry::new(params.d, p.get("k", 4)?)?;
            let initial = initial(p, "all_symptomatic")?;
            (Task::Block { geom, params, initial }, 1_000)
        }
        Mode::Verify => {
            let scale = p.get::<String>("scale", "full".into())?.parse().map_err(|e: String| bad("scale", e))?;
            (Task::Verify { scale }, 1)
        }
    };
    let replicas = *config.replicas.get_or_insert(default_replicas);
    Ok(Plan { replicas, task })
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0u64), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl Plan {
    pub fn run(self, seed: u64) -> Result<RunResult, CliError> {
        let n = self.replicas;
        match self.task {
            Task::Simulate { params, initial } => {
                let lattice = params.lattice()?;
                let rates = params.rates();
                let runs = par_replicas(seed, n, |_, rng| run_from(&lattice, rates, &initial, params.horizon, rng));
                let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
                let mut csv = Csv::new("replica,pi1,pi2,t_cumulative,extinction_time,max_space,max_time,extinct");
                for (r, s) in runs.iter().enumerate() {
                    let ext = s.extinction_time.map(|t| t.to_string()).unwrap_or_default();
                    csv.row(&[&r, &s.pi1, &s.pi2, &s.t_cumulative, &ext, &s.max_space, &s.max_time, &s.extinct]);
                }
                let extinct = runs.iter().filter(|s| s.extinct).count();
                let aggregates = json!({
                    "extinct_fraction": num(extinct as f64 / n as f64),
                    "mean_pi1": mean(runs.iter().map(|s| s.pi1 as f64)),
                    "mean_pi2": mean(runs.iter().map(|s| s.pi2 as f64)),
                    "mean_t_cumulative": mean(runs.iter().map(|s| s.t_cumulative)),
                    "mean_extinction_time": mean(runs.iter().filter_map(|s| s.extinction_time)),
                    "max_space": runs.iter().map(|s| s.max_space).max(),
                    "runs_touching_box_face": runs.iter().filter(|s| s.hit_boundary).count(),
                });
                Ok(RunResult::new("simulate.csv", csv.finish(), aggregates))
            }
            Task::Branching { params, cap } => {
                let runs = par_replicas(seed, n, |_, rng| simulate_progeny(&params, cap, rng));
                let mut csv = Csv::new("replica,progeny,generations,capped");
                for (r, s) in runs.iter().enumerate() {
                    csv.row(&[&r, &s.progeny, &s.generations, &s.capped]);
                }
                let cert = tail_certificate(&params, None).ok();
                let aggregates = json!({
                    "mean_progeny": mean(runs.iter().map(|s| s.progeny as f64)),
                    "capped": runs.iter().filter(|s| s.capped).count(),
                    "subcritical": params.subcritical(),
                    "offspring_mean": num(params.offspring_mean()),
                    "progeny_mean": num(params.progeny_mean()),
                    "tail_certificate": cert.map(|c| json!({ "c": num(c.c), "s": num(c.s) })),
                });
                Ok(RunResult::new("branching.csv", csv.finish(), aggregates))
            }
            Task::Meanfield { params, start, t_end, dt } => {
                let traj = integrate(start, &params, t_end, dt)?;
                let mut csv = Csv::new("t,u1,u2");
                for (t, u) in &traj {
                    csv.row(&[t, &u.u1, &u.u2]);
                }
                let last = traj.last().expect("trajectory includes t = 0").1;
                let fixed = interior_fixed_point(&params, ROOT_TOL)?;
                let target = fixed.point.unwrap_or(MFState::ORIGIN);
                let aggregates = json!({
                    "threshold_exceeded": threshold_check(&params),
                    "interior_fixed_point": fixed.point.map(|s| [num(s.u1), num(s.u2)]),
                    "eigen_real_parts": fixed.point.map(|_| [num(fixed.eigen_real_parts.0), num(fixed.eigen_real_parts.1)]),
                    "stable": fixed.stable,
                    "final_state": [num(last.u1), num(last.u2)],
                    "distance_to_attractor": num(last.distance(&target)),
                });
                Ok(RunResult::new("meanfield.csv", csv.finish(), aggregates))
            }
            Task::PathCounts { d, n_max } => {
                // Largest length first so an over-budget request fails before any work.
                let top = count_directed_sa_paths(n_max, d)?;
                let mut reports = (0..n_max).map(|k| count_directed_sa_paths(k, d)).collect::<Result<Vec<_>, _>>()?;
                reports.push(top);
                let mut csv = Csv::new("n,count,bound");
                for r in &reports {
                    csv.row(&[&r.length, &r.count, &r.bound]);
                }
                let aggregates = json!({ "d": d, "n_max": n_max, "count_at_n_max": top.count });
                Ok(RunResult::new("percolation.csv", csv.finish(), aggregates))
            }
            Task::Field { epsilon, extent } => {
                let runs = par_replicas(seed, n, |_, rng| sample_field_and_search(epsilon, extent, rng));
                let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
                let mut csv = Csv::new("replica,has_closed_path,longest");
                for (r, s) in runs.iter().enumerate() {
                    csv.row(&[&r, &s.has_closed_path_from_level0, &s.longest_closed_path]);
                }
                let aggregates = json!({
                    "closed_path_fraction": num(runs.iter().filter(|s| s.has_closed_path_from_level0).count() as f64 / n as f64),
                    "mean_longest": mean(runs.iter().map(|s| s.longest_closed_path as f64)),
                    "max_longest": runs.iter().map(|s| s.longest_closed_path).max(),
                });
                Ok(RunResult::new("percolation.csv", csv.finish(), aggregates))
            }
            Task::Block { geom, params, initial } => {
                let lattice = geom.lattice(&params);
                let runs = par_replicas(seed, n, |_, rng| run_block_experiment(&geom, &lattice, &params, &initial, rng));
                let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
                let mut csv = Csv::new("replica,healthy_block,card_lambda_minus,card_lambda_plus");
                for (r, o) in runs.iter().enumerate() {
                    csv.row(&[&r, &o.healthy_block, &o.card_lambda_minus, &o.card_lambda_plus]);
                }
                let healthy = runs.iter().filter(|o| o.healthy_block).count() as u64;
                let (lo, hi) = wilson_interval(healthy, n, Z95);
                let over = runs.iter().filter(|o| o.card_union > 3 * geom.m_bound).count();
                let aggregates = json!({
                    "p_healthy": num(healthy as f64 / n as f64),
                    "p_healthy_ci95": [num(lo), num(hi)],
                    "m_bound": geom.m_bound,
                    "bottom_sites": geom.bottom_sites(),
                    "max_card_lambda_minus": runs.iter().map(|o| o.card_lambda_minus).max(),
                    "fraction_entries_above_3m": num(over as f64 / n as f64),
                });
                Ok(RunResult::new("block.csv", csv.finish(), aggregates))
            }
            Task::Verify { scale } => {
                let results = run_all(seed, scale)?;
                let mut csv = Csv::new("criterion,name,passed");
                let mut report = String::new();
                for r in &results {
                    csv.row(&[&r.criterion, &r.name, &r.passed]);
                    report.push_str(&r.render());
                }
                let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.criterion).collect();
                let aggregates = json!({
                    "scale": format!("{scale:?}").to_lowercase(),
                    "passed": results.len() - failed.len(),
                    "failed": failed,
                });
                let mut result = RunResult::new("verify.csv", csv.finish(), aggregates);
                result.extra_files.push(("verify_report.txt".into(), report));
                if !failed.is_empty() {
                    result.failure = Some(format!("criteria {failed:?} failed; see verify_report.txt"));
                }
                Ok(result)
            }
        }
    }
}
