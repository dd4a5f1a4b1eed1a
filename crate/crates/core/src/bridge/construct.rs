use serde::{Deserialize, Serialize};

use super::reparam::{isotonic_nonincreasing, MapKnot, Piece, ReparamMap, Side};
use crate::energy::EnergyFunctional;
use crate::eris::{check_energetic, ErisPath, Interpolation, Knot};
use crate::error::{Error, Result};
use crate::gsflow::{solve_exact, sup_distance, GsTrajectory, Method, SpeedProfile};
use crate::tol;

/// Sub-intervals used to follow a continuously moving piece of a path.
const LINEAR_FILL: usize = 32;

/// `S(t) = min{s >= 0 : g(s) <= 1/t}` for a nonincreasing right-continuous
/// speed profile `g`.
///
/// Each interval of constant speed `g_k` becomes a jump of `S` at
/// `t = 1/g_k`, each jump of `g` a plateau. When the profile ends at a finite
/// horizon with positive speed, `S` is only determined up to `1/g_last`.
pub fn build_s(profile: &SpeedProfile) -> ReparamMap {
    let mut p = profile.clone();
    p.merge_equal(0.0);
    let mut knots = vec![MapKnot { x: 0.0, left: 0.0, right: 0.0 }];
    let mut domain_end = f64::INFINITY;
    for (k, &g) in p.speeds.iter().enumerate() {
        if g <= 0.0 {
            break;
        }
        let t = 1.0 / g;
        let s = p.breakpoints[k];
        match p.breakpoints.get(k + 1) {
            Some(&next) => {
                let last = knots.last_mut().unwrap();
                if last.x == t {
                    last.right = next;
                } else {
                    knots.push(MapKnot { x: t, left: s, right: next });
                }
            }
            None if p.end.is_infinite() => break,
            None => {
                domain_end = t;
                break;
            }
        }
    }
    let pieces = vec![Piece::Constant; knots.len() - 1];
    ReparamMap::new(knots, pieces, Side::Left, domain_end)
}

/// Speed profile of `traj`, made nonincreasing by isotonic regression for
/// sampled trajectories. Returns the profile and the largest adjustment.
pub fn monotone_speed_profile(traj: &GsTrajectory) -> (SpeedProfile, f64) {
    let mut profile = traj.speed_profile();
    if traj.method() == Method::Exact {
        return (profile, 0.0);
    }
    let b = &profile.breakpoints;
    let weights: Vec<f64> =
        (0..b.len()).map(|k| b.get(k + 1).map_or(1.0, |next| next - b[k])).collect();
    let (fit, adjust) = isotonic_nonincreasing(&profile.speeds, &weights);
    profile.speeds = fit;
    profile.merge_equal(tol::SPEED_MERGE_REL);
    (profile, adjust)
}

/// The energetic solution `t -> w(S(t))`.
pub fn gs_to_eris(traj: &GsTrajectory) -> Result<ErisPath> {
    let (profile, _) = monotone_speed_profile(traj);
    let map = build_s(&profile);
    let knots = map
        .knots()
        .iter()
        .map(|k| Knot { t: k.x, left: traj.eval(k.left), right: traj.eval(k.right) })
        .collect();
    let path = ErisPath::new(knots, Interpolation::PiecewiseConstant)?;
    if map.domain_end().is_finite() {
        path.with_horizon(map.domain_end())
    } else {
        Ok(path)
    }
}

/// `s_hat(t) = int_0^t tau |du(tau)|`, left-continuous, jumping by
/// `t |u(t+) - u(t)|` at each jump of the path.
pub fn build_s_hat(path: &ErisPath) -> ReparamMap {
    let mut knots = Vec::with_capacity(path.knots().len());
    let mut pieces = Vec::with_capacity(path.knots().len());
    let mut s = 0.0;
    for (k, knot) in path.knots().iter().enumerate() {
        let left = s;
        s += knot.t * knot.left.dist(&knot.right);
        knots.push(MapKnot { x: knot.t, left, right: s });
        if let Some(next) = path.knots().get(k + 1) {
            let speed = knot.right.dist(&next.left) / (next.t - knot.t);
            if speed == 0.0 {
                pieces.push(Piece::Constant);
            } else {
                pieces.push(Piece::Quadratic { rate: speed });
                s += 0.5 * speed * (next.t * next.t - knot.t * knot.t);
            }
        }
    }
    ReparamMap::new(knots, pieces, Side::Left, path.horizon())
}

/// `sigma_hat(s) = s_hat(t_hat(s))`.
pub fn sigma_hat(s_hat: &ReparamMap, s: f64) -> f64 {
    s_hat.eval(s_hat.inverse(s))
}

/// The gradient flow `w(s) = u_theta(t_hat(s))`: jumps of the path are
/// traversed affinely at speed `1/t`, continuous pieces are followed in the
/// flow time `s_hat`.
///
/// The path must be an energetic solution for `j`.
pub fn eris_to_gs(path: &ErisPath, j: &dyn EnergyFunctional) -> Result<GsTrajectory> {
    let report = check_energetic(path, j);
    if !report.pass() {
        let residual = report.checks().iter().filter(|c| !c.pass).map(|c| c.worst).fold(0.0, f64::max);
        return Err(Error::NotEnergetic { residual });
    }
    let knots = path.knots();
    let mut times = vec![0.0];
    let mut values = vec![knots[0].left.clone()];
    let mut velocities = Vec::new();
    let mut s = 0.0;
    let mut push = |ds: f64, from: &crate::space::SpaceVec, to: &crate::space::SpaceVec| {
        if ds > 0.0 {
            s += ds;
            velocities.push((to - from).scale(1.0 / ds));
            times.push(s);
            values.push(to.clone());
        }
    };
    for (k, knot) in knots.iter().enumerate() {
        if knot.is_jump() {
            push(knot.t * knot.left.dist(&knot.right), &knot.left, &knot.right);
        }
        if let Some(next) = knots.get(k + 1) {
            if knot.right != next.left {
                let span = next.t - knot.t;
                let speed = knot.right.dist(&next.left) / span;
                let at = |tau: f64| knot.right.lerp(&next.left, (tau - knot.t) / span);
                for i in 0..LINEAR_FILL {
                    let ta = knot.t + span * i as f64 / LINEAR_FILL as f64;
                    let tb = knot.t + span * (i + 1) as f64 / LINEAR_FILL as f64;
                    push(0.5 * speed * (tb * tb - ta * ta), &at(ta), &at(tb));
                }
            }
        }
    }
    Ok(GsTrajectory::exact(times, values, velocities, path.horizon().is_infinite()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    GsFirst,
    ErisFirst,
}

/// Distance between a solution and its image under both reparametrizations.
///
/// `GsFirst` compares the exact flow with `eris_to_gs(gs_to_eris(.))`;
/// `ErisFirst` compares the energetic solution obtained from the exact flow
/// with `gs_to_eris(eris_to_gs(.))`, away from jump times.
pub fn roundtrip_residual(j: &dyn EnergyFunctional, u0: &crate::space::SpaceVec, direction: Direction) -> Result<f64> {
    let flow = solve_exact(j, u0, f64::INFINITY)?;
    let path = gs_to_eris(&flow)?;
    match direction {
        Direction::GsFirst => Ok(sup_distance(&flow, &eris_to_gs(&path, j)?)),
        Direction::ErisFirst => {
            let back = gs_to_eris(&eris_to_gs(&path, j)?)?;
            let horizon = 2.0 * path.last_knot_time().max(back.last_knot_time()) + 1.0;
            Ok(path.sup_distance(&back, horizon, tol::JUMP_GUARD))
        }
    }
}
