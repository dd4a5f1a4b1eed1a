use super::path::{ErisPath, Interpolation, Jump, Knot};
use crate::energy::{is_stable, EnergyFunctional};
use crate::error::{Error, Result};
use crate::report::{Check, Worst};
use crate::space::SpaceVec;
use crate::tol;

/// The minimizer of `|u - u_prev| + t J(u)`.
///
/// Unless `u_prev` is already stable at `t`, the minimizer is
/// `prox(u_prev, lambda t)` where `lambda = |u - u_prev|`; `lambda` is the
/// unique root of `|P_{lambda t K}(u_prev)| = lambda`, found by bisection.
pub fn incremental_step(j: &dyn EnergyFunctional, u_prev: &SpaceVec, t: f64) -> Result<SpaceVec> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("incremental time must be positive, got {t}")));
    }
    if !u_prev.space().same_as(j.space()) {
        return Err(Error::SpaceMismatch);
    }
    if !j.in_domain(u_prev) {
        return Err(Error::Domain("initial value has infinite energy".into()));
    }
    // Fails early for functionals without a projection onto K.
    j.project_k(&j.space().zeros(), 1.0)?;
    if is_stable(j, u_prev, t) {
        return Ok(u_prev.clone());
    }
    let excess = |lambda: f64| -> Result<f64> { Ok(j.project_k(u_prev, lambda * t)?.norm() - lambda) };
    let mut hi = u_prev.norm();
    if excess(hi)? > 0.0 {
        return Err(Error::NoBracket(format!("|P(u_prev)| exceeds lambda at lambda = {hi}")));
    }
    let mut lo = 0.0;
    let width = tol::INCREMENTAL_BISECTION * hi.max(1.0);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // At `hi` the subgradient `P / (hi t)` has norm at most `1/t`.
    j.prox(u_prev, hi * t)
}

/// Variational interpolant `argmin |v - u0| + t J(v)`.
pub fn variational_interpolant(j: &dyn EnergyFunctional, u0: &SpaceVec, t: f64) -> Result<SpaceVec> {
    incremental_step(j, u0, t)
}

/// The iterates `u_k` at `t_k = k h`, `k = 0..=n` with `n h >= t_end`.
pub fn incremental_iterates(
    j: &dyn EnergyFunctional,
    u0: &SpaceVec,
    h: f64,
    t_end: f64,
) -> Result<Vec<(f64, SpaceVec)>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("horizon must be finite and nonnegative, got {t_end}")));
    }
    let n = (t_end / h - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(n + 1);
    out.push((0.0, u0.clone()));
    let mut u = u0.clone();
    for k in 1..=n {
        let t = k as f64 * h;
        u = incremental_step(j, &u, t)?;
        out.push((t, u.clone()));
    }
    Ok(out)
}

/// Piecewise-constant interpolant of the incremental scheme: `u_k` on
/// `((k-1) h, k h]`. Only knots where the iterate changes are kept, so every
/// knot after the first is a jump.
pub fn solve_incremental(j: &dyn EnergyFunctional, u0: &SpaceVec, h: f64, t_end: f64) -> Result<ErisPath> {
    let iterates = incremental_iterates(j, u0, h, t_end)?;
    path_from_iterates(&iterates).with_horizon(iterates.last().unwrap().0)
}

pub(crate) fn path_from_iterates(iterates: &[(f64, SpaceVec)]) -> ErisPath {
    let u0 = iterates[0].1.clone();
    let mut knots = vec![Knot::continuous(0.0, u0)];
    for k in 1..iterates.len() {
        let (prev_t, prev) = (&iterates[k - 1].0, &iterates[k - 1].1);
        let next = &iterates[k].1;
        if next == prev {
            continue;
        }
        if *prev_t == 0.0 {
            knots[0].right = next.clone();
        } else {
            knots.push(Knot { t: *prev_t, left: prev.clone(), right: next.clone() });
        }
    }
    ErisPath::new(knots, Interpolation::PiecewiseConstant).expect("iterate times are increasing")
}

/// Monotonicity along incremental iterates: `J(u_k)`, `|u_k|` and
/// `J(u_k) + |u_k|` never increase, and each `u_k` is stable at `t_k`.
pub fn check_incremental_monotonicity(j: &dyn EnergyFunctional, iterates: &[(f64, SpaceVec)]) -> Vec<Check> {
    let tol = 1e-10;
    let mut energy = Worst::new();
    let mut norm = Worst::new();
    let mut total = Worst::new();
    let mut stable = Worst::new();
    for w in iterates.windows(2) {
        let (t, a, b) = (w[1].0, &w[0].1, &w[1].1);
        let (ja, jb) = (j.value(a), j.value(b));
        energy.push(jb - ja, t);
        norm.push(b.norm() - a.norm(), t);
        total.push(jb + b.norm() - ja - a.norm(), t);
        stable.push(crate::energy::stability_excess(j, b, t) * t, t);
    }
    vec![
        energy.check("incremental_energy_monotone", tol),
        norm.check("incremental_norm_monotone", tol),
        total.check("incremental_g_monotone", tol),
        stable.check("incremental_stability", tol::STABILITY),
    ]
}

/// Steps of the incremental scheme larger than `factor` times the mean step,
/// reported as jumps at the left end of their step interval.
pub fn candidate_jumps(iterates: &[(f64, SpaceVec)], factor: f64) -> Vec<Jump> {
    let steps = iterates.len().saturating_sub(1);
    if steps == 0 {
        return Vec::new();
    }
    let sizes: Vec<f64> = iterates.windows(2).map(|w| w[0].1.dist(&w[1].1)).collect();
    let typical = sizes.iter().sum::<f64>() / steps as f64;
    iterates
        .windows(2)
        .zip(&sizes)
        .filter(|(_, &d)| d > 0.0 && d > factor * typical)
        .map(|(w, _)| Jump { t: w[0].0, left: w[0].1.clone(), right: w[1].1.clone() })
        .collect()
}
