use std::path::{Path, PathBuf};

use rateflow::eris::{incremental_iterates, ErisPath, Jump};
use rateflow::solver::{Solution, SolverParams, SolverRegistry};
use rateflow::SpaceVec;
use serde::Serialize;

use crate::checks::{flow_check, path_check, validate_names, CheckEntry, FlowContext, FLOW_CHECKS, PATH_CHECKS};
use crate::config::{ScenarioConfig, SolverConfig};
use crate::exit::{CliError, Outcome};
use crate::io;

#[derive(Debug, Clone, Serialize)]
pub struct JumpRecord {
    pub t: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl From<&Jump> for JumpRecord {
    fn from(j: &Jump) -> Self {
        Self { t: j.t, left: j.left.coords().to_vec(), right: j.right.coords().to_vec() }
    }
}

pub fn jump_records(path: &ErisPath) -> Vec<JumpRecord> {
    path.jumps().iter().map(JumpRecord::from).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub functional: rateflow::energy::FunctionalDescriptor,
    pub solver: Option<SolverConfig>,
    pub input: Option<PathBuf>,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckEntry>,
    pub jumps: Vec<JumpRecord>,
    pub trajectory: PathBuf,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Solver(e.into()))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Solver(e.into()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Solver(anyhow::anyhow!("writing {}: {e}", path.display())))
}

fn is_flow_solver(name: &str) -> bool {
    name != "eris_incremental"
}

pub fn run_path(config: &Path) -> Result<Outcome, CliError> {
    let cfg = ScenarioConfig::load(config)?;
    run(&cfg).map(|r| if r.pass { Outcome::Pass } else { Outcome::ChecksFailed })
}

/// Runs one scenario, writing its trajectory and report.
pub fn run(cfg: &ScenarioConfig) -> Result<InvariantReport, CliError> {
    let j = cfg.build_functional()?;
    let registry = SolverRegistry::default();

    let (solution, iterates) = match (&cfg.solver, &cfg.input) {
        (Some(sc), _) => {
            let solver = registry.get(&sc.name).map_err(|e| CliError::Config(e.into()))?;
            if is_flow_solver(&sc.name) {
                validate_names(&cfg.checks, FLOW_CHECKS, "flow trajectory")?;
            } else {
                validate_names(&cfg.checks, PATH_CHECKS, "path")?;
            }
            let u0 = initial(cfg, j.space())?;
            let params = SolverParams { h: sc.h, horizon: sc.horizon };
            let sol = solver.solve(j.as_ref(), &u0, &params).map_err(CliError::from_solver)?;
            let iterates = match (&sol, cfg.checks.iter().any(|c| c == "incremental_monotonicity")) {
                (Solution::Eris(_), true) => Some(
                    incremental_iterates(j.as_ref(), &u0, sc.h.unwrap_or(0.0), sc.horizon)
                        .map_err(CliError::from_solver)?,
                ),
                _ => None,
            };
            (sol, iterates)
        }
        (None, Some(input)) => {
            let file = cfg.resolve(input);
            let sol = match io::sniff(&file)? {
                io::CsvKind::Flow => {
                    validate_names(&cfg.checks, FLOW_CHECKS, "flow trajectory")?;
                    Solution::Gs(io::read_flow(&file, j.space())?)
                }
                io::CsvKind::Path => {
                    validate_names(&cfg.checks, PATH_CHECKS, "path")?;
                    Solution::Eris(io::read_path(&file, j.space())?)
                }
            };
            (sol, None)
        }
        (None, None) => unreachable!("validated on load"),
    };

    let trajectory = cfg.trajectory_path();
    let mut checks = Vec::with_capacity(cfg.checks.len());
    let jumps = match &solution {
        Solution::Gs(traj) => {
            let ctx = FlowContext { j: j.as_ref(), desc: &cfg.functional, seed: cfg.seed, probes: cfg.probes };
            for name in &cfg.checks {
                checks.push(CheckEntry::new(name, flow_check(name, traj, &ctx)?, &cfg.tolerances));
            }
            io::write_flow(&trajectory, traj, j.as_ref())?;
            Vec::new()
        }
        Solution::Eris(path) => {
            for name in &cfg.checks {
                let comps = path_check(name, path, j.as_ref(), iterates.as_deref())?;
                checks.push(CheckEntry::new(name, comps, &cfg.tolerances));
            }
            io::write_path(&trajectory, path, j.as_ref())?;
            jump_records(path)
        }
    };

    let report = InvariantReport {
        functional: cfg.functional.clone(),
        solver: cfg.solver.clone(),
        input: cfg.input.clone(),
        seed: cfg.seed,
        pass: checks.iter().all(|c| c.pass),
        checks,
        jumps,
        trajectory,
    };
    write_json(&cfg.report_path(), &report)?;
    for c in &report.checks {
        eprintln!("{} {} worst={:e} tol={:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.worst, c.tolerance);
    }
    Ok(report)
}

pub fn initial(cfg: &ScenarioConfig, space: &rateflow::Space) -> Result<SpaceVec, CliError> {
    let coords = cfg.initial.clone().ok_or_else(|| CliError::config("`initial` is required with a solver"))?;
    space.vec(coords).map_err(|e| CliError::Config(e.into()))
}
