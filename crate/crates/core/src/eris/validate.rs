use serde::Serialize;

use super::path::{integrate, ErisPath};
use crate::energy::{stability_excess, EnergyFunctional};
use crate::error::Result;
use crate::report::{all_pass, Check, Worst};
use crate::space::SpaceVec;

const ENERGY_TOL: f64 = 1e-9;
const JUMP_TOL: f64 = 1e-10;
const MONOTONE_TOL: f64 = 1e-10;
const LINEAR_SUBDIVISIONS: usize = 8;

/// A representative of the path at time `t` together with the running
/// variation and running integral of `J` accumulated up to it.
struct Sample {
    t: f64,
    u: SpaceVec,
    var: f64,
    integral: f64,
}

/// Walks the path, emitting left and right values at every knot, interior
/// points of every piece and one point past the last knot (the horizon when
/// it is finite).
fn samples(path: &ErisPath, j: &dyn EnergyFunctional) -> Vec<Sample> {
    let knots = path.knots();
    let mut out = Vec::new();
    let (mut var, mut integral) = (0.0, 0.0);
    for (k, knot) in knots.iter().enumerate() {
        out.push(Sample { t: knot.t, u: knot.left.clone(), var, integral });
        if knot.is_jump() {
            var += knot.left.dist(&knot.right);
            out.push(Sample { t: knot.t, u: knot.right.clone(), var, integral });
        }
        let (a, next_t, b) = match knots.get(k + 1) {
            Some(next) => (&knot.right, next.t, &next.left),
            None if path.horizon() == knot.t => break,
            None => (&knot.right, path.horizon().min(knot.t + 1.0), &knot.right),
        };
        let span = next_t - knot.t;
        if a == b {
            let mid = knot.t + 0.5 * span;
            out.push(Sample { t: mid, u: a.clone(), var, integral: integral + j.value(a) * 0.5 * span });
            integral += j.value(a) * span;
            if k + 1 == knots.len() {
                out.push(Sample { t: next_t, u: a.clone(), var, integral });
            }
        } else {
            let m = LINEAR_SUBDIVISIONS;
            let along = |tau: f64| a.lerp(b, (tau - knot.t) / span);
            let mut prev = knot.t;
            for i in 1..m {
                let tau = knot.t + span * i as f64 / m as f64;
                integral += integrate(&|x| j.value(&along(x)), prev, tau);
                var += a.dist(b) * (tau - prev) / span;
                out.push(Sample { t: tau, u: along(tau), var, integral });
                prev = tau;
            }
            integral += integrate(&|x| j.value(&along(x)), prev, next_t);
            var += a.dist(b) * (next_t - prev) / span;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergeticReport {
    pub stability: Check,
    pub energy: Check,
    pub initial: Check,
}

impl EnergeticReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![self.stability.clone(), self.energy.clone(), self.initial.clone()]
    }

    pub fn pass(&self) -> bool {
        all_pass(&self.checks())
    }
}

/// Global stability, energy balance and initial attainment.
///
/// Stability is checked through `t |d0 J(u)| <= 1` at every sample and right
/// limit. The energy balance `t J(u(t)) + Var(u; [r, t]) = r J(u(r)) + int_r^t J`
/// holds for all `r < t` iff `F(tau) = tau J(u(tau)) + Var(u; [0, tau]) - int_0^tau J`
/// is constant over all samples, so its oscillation is the worst residual
/// over every pair.
pub fn check_energetic(path: &ErisPath, j: &dyn EnergyFunctional) -> EnergeticReport {
    let samples = samples(path, j);
    let mut stability = Worst::new();
    for s in samples.iter().filter(|s| s.t > 0.0) {
        stability.push(s.t * stability_excess(j, &s.u, s.t), s.t);
    }
    if path.horizon() == f64::INFINITY {
        // Stability for all large t forces a vanishing minimal subgradient.
        let tail = j.min_norm_grad(path.terminal()).map(|g| g.norm()).unwrap_or(f64::INFINITY);
        if tail > 0.0 {
            stability.push(f64::INFINITY, f64::INFINITY);
        }
    }
    let f: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.t * j.value(&s.u) + s.var - s.integral)).collect();
    let scale = samples.iter().map(|s| s.var.max(s.integral)).fold(1.0, f64::max);
    let (lo, hi) = f.iter().fold(((f64::INFINITY, 0.0), (f64::NEG_INFINITY, 0.0)), |(lo, hi), &(t, v)| {
        (if v < lo.0 { (v, t) } else { lo }, if v > hi.0 { (v, t) } else { hi })
    });
    let at = if hi.0 - f[0].1 >= f[0].1 - lo.0 { hi.1 } else { lo.1 };
    let first = &path.knots()[0];
    EnergeticReport {
        stability: stability.check("stability", crate::tol::STABILITY),
        energy: Check::new("energy_balance", hi.0 - lo.0, Some(at), ENERGY_TOL * scale),
        initial: Check::new("initial_attainment", first.left.dist(&first.right), Some(0.0), 1e-12),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpResidual {
    pub t: f64,
    /// `E(t, u(t+)) + |u(t+) - u(t-)| - E(t, u(t-))`.
    pub energy_right: f64,
    /// `E(t, u(t)) + |u(t) - u(t-)| - E(t, u(t-))`.
    pub energy_value: f64,
    /// Distance of `u(t)` from the segment `[u(t-), u(t+)]`.
    pub collinearity: f64,
    /// Worst deviation of `E(t, u_theta)` from linear interpolation.
    pub linearity: f64,
    /// Worst `t |d0 J(u_theta)| - 1`.
    pub stability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JumpReport {
    pub jumps: Vec<JumpResidual>,
}

impl JumpReport {
    pub fn checks(&self) -> Vec<Check> {
        let names = ["jump_energy_right", "jump_energy_value", "jump_collinearity", "jump_linearity", "jump_stability"];
        if self.jumps.is_empty() {
            return names.iter().map(|n| Check::vacuous(*n, JUMP_TOL)).collect();
        }
        let pick: [fn(&JumpResidual) -> f64; 5] = [
            |r| r.energy_right.abs(),
            |r| r.energy_value.abs(),
            |r| r.collinearity,
            |r| r.linearity,
            |r| r.stability,
        ];
        names
            .iter()
            .zip(pick)
            .map(|(name, f)| {
                let mut w = Worst::new();
                self.jumps.iter().for_each(|r| w.push(f(r), r.t));
                w.check(name, JUMP_TOL)
            })
            .collect()
    }

    pub fn pass(&self) -> bool {
        all_pass(&self.checks())
    }
}

/// Jump relations: energy is dissipated exactly along the straight segment
/// joining the one-sided limits, and every point on it is stable.
pub fn check_jump_relations(path: &ErisPath, j: &dyn EnergyFunctional) -> JumpReport {
    let jumps = path
        .jumps()
        .into_iter()
        .map(|jump| {
            let t = jump.t;
            let e = |u: &SpaceVec| t * j.value(u);
            let (minus, plus) = (&jump.left, &jump.right);
            let value = path.eval(t);
            let (e_minus, e_plus) = (e(minus), e(plus));
            let thetas = [0.0, 0.25, 0.5, 0.75, 1.0];
            let linearity = thetas
                .iter()
                .map(|&th| (e(&minus.lerp(plus, th)) - (1.0 - th) * e_minus - th * e_plus).abs())
                .fold(0.0, f64::max);
            let stability = thetas
                .iter()
                .map(|&th| t * stability_excess(j, &minus.lerp(plus, th), t))
                .fold(f64::NEG_INFINITY, f64::max)
                .max(0.0);
            JumpResidual {
                t,
                energy_right: e_plus + plus.dist(minus) - e_minus,
                energy_value: e(&value) + value.dist(minus) - e_minus,
                collinearity: segment_distance(&value, minus, plus),
                linearity,
                stability,
            }
        })
        .collect();
    JumpReport { jumps }
}

fn segment_distance(x: &SpaceVec, a: &SpaceVec, b: &SpaceVec) -> f64 {
    let d = b - a;
    let len = d.norm_sq();
    if len == 0.0 {
        return x.dist(a);
    }
    let th = ((x - a).dot(&d) / len).clamp(0.0, 1.0);
    x.dist(&a.lerp(b, th))
}

/// Decay facts for energetic solutions: `|u(r)| / r >= J(u(r))`, `J(u(.))`
/// and `|u(.)|` nonincreasing, and `Var(u; [0, t]) <= int_0^t J(u)`.
pub fn check_decay_lemma(path: &ErisPath, j: &dyn EnergyFunctional) -> Vec<Check> {
    let samples = samples(path, j);
    let mut bound = Worst::new();
    let mut energy = Worst::new();
    let mut norm = Worst::new();
    let mut variation = Worst::new();
    for (k, s) in samples.iter().enumerate() {
        let ju = j.value(&s.u);
        if s.t > 0.0 {
            bound.push(ju - s.u.norm() / s.t, s.t);
        }
        variation.push(s.var - s.integral, s.t);
        if let Some(prev) = k.checked_sub(1).map(|p| &samples[p]) {
            energy.push(ju - j.value(&prev.u), s.t);
            norm.push(s.u.norm() - prev.u.norm(), s.t);
        }
    }
    vec![
        bound.check("decay_norm_bound", MONOTONE_TOL),
        energy.check("decay_energy_monotone", MONOTONE_TOL),
        norm.check("decay_norm_monotone", MONOTONE_TOL),
        variation.check("variation_bound", MONOTONE_TOL),
    ]
}

/// Residual of `J(u(t)) + int_r^t |du| / tau = J(u(r))` for `0 < r < t`.
pub fn check_weighted_balance(path: &ErisPath, j: &dyn EnergyFunctional, r: f64, t: f64) -> Result<f64> {
    let w = path.weighted_variation(&|tau| 1.0 / tau, r, t)?;
    Ok(j.value(&path.eval(t)) + w - j.value(&path.eval(r)))
}

