//! Named validators and the grouped report entries they produce.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rateflow::bridge::{eris_to_gs, gs_to_eris};
use rateflow::energy::{EnergyFunctional, FunctionalDescriptor};
use rateflow::eris::{
    check_decay_lemma, check_energetic, check_incremental_monotonicity, check_jump_relations, ErisPath,
};
use rateflow::gsflow::{
    check_constant_speed_affine, check_decay_bounds, check_edb, check_evi, solve_exact, sup_distance,
    sup_distance_nodal, GsTrajectory,
};
use rateflow::oracle::{exact_maxabs_trajectory, exact_weighted_l1_trajectory};
use rateflow::report::Check;
use rateflow::tol;
use rateflow::SpaceVec;
use serde::Serialize;

use crate::exit::CliError;

pub const FLOW_CHECKS: &[&str] =
    &["edb", "evi", "decay", "constant_speed_affine", "oracle", "bridge_energetic", "roundtrip"];
pub const PATH_CHECKS: &[&str] = &["energetic", "jump_relations", "decay_lemma", "incremental_monotonicity", "roundtrip"];

/// One requested check: the verdict over its components, with the component
/// furthest past (or closest to) its tolerance quoted at the top level.
#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    pub worst: f64,
    pub location: Option<f64>,
    pub tolerance: f64,
    pub components: Vec<Check>,
}

impl CheckEntry {
    pub fn new(name: &str, mut components: Vec<Check>, overrides: &BTreeMap<String, f64>) -> Self {
        for c in &mut components {
            if let Some(&t) = overrides.get(&c.name).or_else(|| overrides.get(name)) {
                c.tolerance = t;
                c.pass = c.worst <= t;
            }
        }
        let ratio = |c: &Check| {
            if c.worst.is_nan() {
                f64::INFINITY
            } else if c.tolerance > 0.0 {
                c.worst / c.tolerance
            } else if c.worst > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        };
        let top = components.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))).cloned();
        let (worst, location, tolerance) = top.map(|c| (c.worst, c.location, c.tolerance)).unwrap_or((0.0, None, 0.0));
        Self { name: name.to_string(), pass: components.iter().all(|c| c.pass), worst, location, tolerance, components }
    }
}

pub fn validate_names(requested: &[String], allowed: &[&str], what: &str) -> Result<(), CliError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in requested {
        if !allowed.contains(&n.as_str()) {
            return Err(CliError::config(format!(
                "unknown check `{n}` for a {what}; available: {}",
                allowed.join(", ")
            )));
        }
        if !seen.insert(n) {
            return Err(CliError::config(format!("check `{n}` requested twice")));
        }
    }
    Ok(())
}

/// Closed-form (or exact event-driven) reference flow, when one exists.
pub fn reference_flow(
    desc: &FunctionalDescriptor,
    j: &dyn EnergyFunctional,
    u0: &SpaceVec,
) -> Result<GsTrajectory, CliError> {
    match desc.kind.as_str() {
        "maxabs2d" => Ok(exact_maxabs_trajectory(u0)),
        "weighted_l1" => {
            let a: Vec<f64> = desc.params["a"]
                .as_array()
                .map(|v| v.iter().filter_map(|x| x.as_f64()).collect())
                .unwrap_or_default();
            Ok(exact_weighted_l1_trajectory(u0, &a))
        }
        "tv_steps" => solve_exact(j, u0, f64::INFINITY).map_err(CliError::from_solver),
        other => Err(CliError::config(format!("no oracle available for functional `{other}`"))),
    }
}

pub struct FlowContext<'a> {
    pub j: &'a dyn EnergyFunctional,
    pub desc: &'a FunctionalDescriptor,
    pub seed: u64,
    pub probes: usize,
}

pub fn flow_check(name: &str, traj: &GsTrajectory, ctx: &FlowContext) -> Result<Vec<Check>, CliError> {
    let j = ctx.j;
    Ok(match name {
        "edb" => {
            let mut worst = (0.0, None);
            for w in traj.times().windows(2) {
                let r = check_edb(traj, j, w[0], w[1]);
                if r > worst.0 || r.is_nan() {
                    worst = (r, Some(w[0]));
                }
            }
            vec![
                Check::new("edb_segments", worst.0, worst.1, 1e-9),
                Check::new("edb_total", check_edb(traj, j, traj.start(), traj.end()), Some(traj.end()), 1e-9),
            ]
        }
        "evi" => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let radius = 2.0 * traj.initial().norm() + 1.0;
            let (a, b) = (traj.start(), traj.end());
            let mut worst = (0.0, None);
            for _ in 0..ctx.probes {
                let v = traj.space().zeros().map(|_| rng.gen_range(-radius..=radius));
                let x: f64 = rng.gen_range(a..=b);
                let y: f64 = rng.gen_range(a..=b);
                let (r, s) = (x.min(y), x.max(y));
                let viol = check_evi(traj, j, &v, r, s);
                if viol > worst.0 || viol.is_nan() {
                    worst = (viol, Some(s));
                }
            }
            vec![Check::new("evi", worst.0, worst.1, 1e-9)]
        }
        "decay" => check_decay_bounds(traj, j, 1e-9).checks(),
        "constant_speed_affine" => vec![check_constant_speed_affine(traj, 1e-9)],
        "oracle" => {
            let reference = reference_flow(ctx.desc, j, traj.initial())?;
            vec![
                Check::new("oracle_nodal", sup_distance_nodal(traj, &reference), None, 1e-10),
                Check::new("oracle_sup", sup_distance(traj, &reference), None, 1e-10),
            ]
        }
        "bridge_energetic" => {
            let path = gs_to_eris(traj).map_err(CliError::from_solver)?;
            check_energetic(&path, j).checks()
        }
        "roundtrip" => {
            let path = gs_to_eris(traj).map_err(CliError::from_solver)?;
            let worst = match eris_to_gs(&path, j) {
                Ok(back) => sup_distance(traj, &back),
                Err(_) => f64::INFINITY,
            };
            vec![Check::new("roundtrip", worst, None, 1e-10)]
        }
        other => return Err(CliError::config(format!("unknown check `{other}`"))),
    })
}

/// `iterates` are the raw incremental iterates when the path came from the
/// solver; otherwise the knot values stand in for them.
pub fn path_check(
    name: &str,
    path: &ErisPath,
    j: &dyn EnergyFunctional,
    iterates: Option<&[(f64, SpaceVec)]>,
) -> Result<Vec<Check>, CliError> {
    Ok(match name {
        "energetic" => check_energetic(path, j).checks(),
        "jump_relations" => check_jump_relations(path, j).checks(),
        "decay_lemma" => check_decay_lemma(path, j),
        "incremental_monotonicity" => match iterates {
            Some(it) => check_incremental_monotonicity(j, it),
            None => {
                let it: Vec<(f64, SpaceVec)> = path.knots().iter().map(|k| (k.t, k.right.clone())).collect();
                check_incremental_monotonicity(j, &it)
            }
        },
        "roundtrip" => {
            let worst = match eris_to_gs(path, j).and_then(|gs| gs_to_eris(&gs)) {
                Ok(back) => {
                    let horizon = if path.horizon().is_finite() {
                        path.horizon()
                    } else {
                        2.0 * path.last_knot_time().max(back.last_knot_time()) + 1.0
                    };
                    path.sup_distance(&back, horizon, tol::JUMP_GUARD)
                }
                Err(_) => f64::INFINITY,
            };
            vec![Check::new("roundtrip", worst, None, 1e-10)]
        }
        other => return Err(CliError::config(format!("unknown check `{other}`"))),
    })
}
