use std::path::{Path, PathBuf};

use rateflow::bridge::gs_to_eris;
use rateflow::eris::{candidate_jumps, incremental_iterates};
use rateflow::gsflow::{sup_distance_nodal, sup_distance_piecewise_constant};
use rateflow::solver::{Solution, SolverParams, SolverRegistry};
use serde::Serialize;

use crate::checks::reference_flow;
use crate::config::ScenarioConfig;
use crate::exit::{CliError, Outcome};
use crate::io::fmt_f64;
use crate::run::{initial, write_json};

#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub h: f64,
    /// Sup-distance to the reference, piecewise-constant interpolant for
    /// flows, paths compared away from jumps otherwise.
    pub error: f64,
    /// Flow: error at the nodes. Path: largest distance of a detected jump
    /// time to the nearest reference jump time.
    pub secondary: f64,
    /// Observed order against the previous row, from the same column as
    /// the fit; absent on the first row.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudySummary {
    pub solver: String,
    pub functional: String,
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of `log error` against `log h` (of `log jump_error`
    /// for paths); absent when some error vanishes.
    pub fitted_order: Option<f64>,
    pub table: PathBuf,
}

pub fn fitted_order(hs: &[f64], errors: &[f64]) -> Option<f64> {
    if errors.iter().any(|&e| !(e > 0.0)) {
        return None;
    }
    let pts: Vec<(f64, f64)> = hs.iter().zip(errors).map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

pub fn validate_steps(hs: &[f64]) -> Result<(), CliError> {
    if hs.len() < 3 {
        return Err(CliError::config(format!("a study needs at least 3 step sizes, got {}", hs.len())));
    }
    if hs.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(CliError::config("step sizes must be positive"));
    }
    for w in hs.windows(2) {
        if (w[1] - 0.5 * w[0]).abs() > 1e-12 * w[0] {
            return Err(CliError::config(format!("each step must halve the previous one ({} -> {})", w[0], w[1])));
        }
    }
    Ok(())
}

/// Solves the scenario at every step size and tabulates the errors against
/// the closed-form reference.
pub fn study(cfg: &ScenarioConfig, hs: &[f64], output: Option<&Path>) -> Result<StudySummary, CliError> {
    validate_steps(hs)?;
    let sc = cfg.solver.as_ref().ok_or_else(|| CliError::config("a study needs a `solver` section"))?;
    let j = cfg.build_functional()?;
    let u0 = initial(cfg, j.space())?;
    let solver = SolverRegistry::default().get(&sc.name).map_err(|e| CliError::Config(e.into()))?;
    let reference = reference_flow(&cfg.functional, j.as_ref(), &u0)?;
    let ref_path = gs_to_eris(&reference).map_err(CliError::from_solver)?;
    let ref_jumps: Vec<f64> = ref_path.jumps().iter().map(|k| k.t).filter(|&t| t <= sc.horizon).collect();

    let mut rows: Vec<StudyRow> = Vec::with_capacity(hs.len());
    for &h in hs {
        let params = SolverParams { h: Some(h), horizon: sc.horizon };
        let sol = solver.solve(j.as_ref(), &u0, &params).map_err(CliError::from_solver)?;
        let (error, secondary) = match sol {
            Solution::Gs(traj) => {
                (sup_distance_piecewise_constant(&traj, &reference), sup_distance_nodal(&traj, &reference))
            }
            Solution::Eris(path) => {
                let error = path.sup_distance(&ref_path, sc.horizon, 2.0 * h);
                let it = incremental_iterates(j.as_ref(), &u0, h, sc.horizon).map_err(CliError::from_solver)?;
                let found: Vec<f64> = candidate_jumps(&it, 5.0).iter().map(|k| k.t).collect();
                let jump_error = ref_jumps
                    .iter()
                    .map(|&r| found.iter().map(|&f| (f - r).abs()).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max);
                (error, jump_error)
            }
        };
        let fit = |e: f64, s: f64| if sc.name == "eris_incremental" { s } else { e };
        let order = rows.last().map(|p| (fit(p.error, p.secondary) / fit(error, secondary)).log2());
        rows.push(StudyRow { h, error, secondary, order });
    }

    let table = match output {
        Some(p) => p.to_path_buf(),
        None => cfg.base.join(format!("{}.study.csv", cfg.stem)),
    };
    let second = if sc.name == "eris_incremental" { "jump_error" } else { "nodal_error" };
    let mut text = format!("h,error,{second},order\n");
    for r in &rows {
        let order = r.order.map(fmt_f64).unwrap_or_default();
        text.push_str(&format!("{},{},{},{}\n", fmt_f64(r.h), fmt_f64(r.error), fmt_f64(r.secondary), order));
    }
    if let Some(dir) = table.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Solver(e.into()))?;
    }
    std::fs::write(&table, text).map_err(|e| CliError::Solver(e.into()))?;

    let errors: Vec<f64> =
        rows.iter().map(|r| if sc.name == "eris_incremental" { r.secondary } else { r.error }).collect();
    let summary = StudySummary {
        solver: sc.name.clone(),
        functional: cfg.functional.kind.clone(),
        fitted_order: fitted_order(hs, &errors),
        rows,
        table: table.clone(),
    };
    write_json(&table.with_extension("json"), &summary)?;
    Ok(summary)
}

pub fn study_path(config: &Path, hs: &[f64], output: Option<&Path>, min_order: Option<f64>) -> Result<Outcome, CliError> {
    let cfg = ScenarioConfig::load(config)?;
    let s = study(&cfg, hs, output)?;
    for r in &s.rows {
        eprintln!("h={:e} error={:e} order={}", r.h, r.error, r.order.map(|o| format!("{o:.3}")).unwrap_or("-".into()));
    }
    match (min_order, s.fitted_order) {
        (Some(m), Some(p)) if p < m => Ok(Outcome::ChecksFailed),
        _ => Ok(Outcome::Pass),
    }
}
