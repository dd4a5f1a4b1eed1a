use super::{GsTrajectory, Method};
use crate::energy::{check_space, EnergyFunctional};
use crate::error::{Error, Result};
use crate::space::SpaceVec;
use crate::tol;

fn check_initial(j: &dyn EnergyFunctional, u0: &SpaceVec) -> Result<()> {
    check_space(j, u0)?;
    if !j.value(u0).is_finite() {
        return Err(Error::Domain(format!("initial value outside the domain of {}", j.kind())));
    }
    Ok(())
}

/// Event-driven solution with velocity `-d0 J(w)`, constant between events.
///
/// Stops when the flow reaches a rest point or at `horizon` (which may be
/// infinite).
pub fn solve_exact(j: &dyn EnergyFunctional, u0: &SpaceVec, horizon: f64) -> Result<GsTrajectory> {
    check_initial(j, u0)?;
    // Functionals without event dynamics refuse here, even at rest points.
    j.next_event(u0, &u0.space().zeros())?;
    let mut times = vec![0.0];
    let mut values = vec![u0.clone()];
    let mut velocities = Vec::new();
    let mut u = u0.clone();
    let mut s = 0.0;
    loop {
        let v = j.min_norm_grad(&u)?.scale(-1.0);
        if v.is_zero() {
            return Ok(GsTrajectory::exact(times, values, velocities, true));
        }
        if velocities.len() >= tol::MAX_EVENTS {
            return Err(Error::EventCascade(tol::MAX_EVENTS));
        }
        let ds = j.next_event(&u, &v)?;
        if s + ds >= horizon {
            let last = u.axpy(horizon - s, &v);
            times.push(horizon);
            values.push(last);
            velocities.push(v);
            return Ok(GsTrajectory::exact(times, values, velocities, false));
        }
        if !ds.is_finite() {
            return Err(Error::Domain("flow has no next event and the horizon is infinite".into()));
        }
        u = j.land(&u, &v, ds);
        s += ds;
        times.push(s);
        values.push(u.clone());
        velocities.push(v);
    }
}

/// Minimizing movements `w^k = prox_{hJ}(w^{k-1})` at `s = kh` up to `s_end`.
pub fn solve_prox(j: &dyn EnergyFunctional, u0: &SpaceVec, h: f64, s_end: f64) -> Result<GsTrajectory> {
    check_initial(j, u0)?;
    check_step(h, s_end)?;
    let n = (s_end / h - 1e-9).ceil().max(0.0) as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    times.push(0.0);
    values.push(u0.clone());
    let mut u = u0.clone();
    for k in 1..=n {
        u = j.prox(&u, h)?;
        times.push(k as f64 * h);
        values.push(u.clone());
    }
    let at_rest = j.min_norm_grad(&u).map(|g| g.is_zero()).unwrap_or(false);
    Ok(GsTrajectory::sampled(times, values, Method::Prox, Some(h), at_rest))
}

fn check_step(h: f64, s_end: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    if !(s_end >= 0.0 && s_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon must be finite and nonnegative, got {s_end}")));
    }
    Ok(())
}

/// Classical RK4 for `w' = -grad J(w)` on the uniform mesh `s = kh`.
pub fn solve_ode(j: &dyn EnergyFunctional, u0: &SpaceVec, h: f64, s_end: f64) -> Result<GsTrajectory> {
    check_step(h, s_end)?;
    let n = (s_end / h - 1e-9).ceil().max(0.0) as usize;
    let mesh: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let mut traj = solve_ode_on_mesh(j, u0, &mesh)?;
    traj.step = Some(h);
    Ok(traj)
}

/// RK4 on an arbitrary increasing mesh starting at 0. A step is halved (up
/// to 20 times) when it leaves the smooth region or changes the conserved
/// quantity by more than `1e-8` relative.
pub fn solve_ode_on_mesh(j: &dyn EnergyFunctional, u0: &SpaceVec, mesh: &[f64]) -> Result<GsTrajectory> {
    check_space(j, u0)?;
    if mesh.is_empty() || mesh.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("mesh must be nonempty and strictly increasing".into()));
    }
    match j.smooth_grad(u0) {
        Err(Error::NotSmoothHere(_)) => return Err(Error::LeftSmoothRegion { s: mesh[0] }),
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let mut values = Vec::with_capacity(mesh.len());
    values.push(u0.clone());
    let mut u = u0.clone();
    for w in mesh.windows(2) {
        u = advance(j, &u, w[0], w[1] - w[0], 0)?;
        values.push(u.clone());
    }
    Ok(GsTrajectory::sampled(mesh.to_vec(), values, Method::Ode, None, false))
}

fn rk4(j: &dyn EnergyFunctional, u: &SpaceVec, h: f64) -> Option<SpaceVec> {
    let f = |x: &SpaceVec| -> Option<SpaceVec> {
        if !x.coords().iter().all(|c| c.is_finite()) || !j.in_smooth_region(x) {
            return None;
        }
        j.smooth_grad(x).ok().map(|g| g.scale(-1.0))
    };
    let k1 = f(u)?;
    let k2 = f(&u.axpy(h / 2.0, &k1))?;
    let k3 = f(&u.axpy(h / 2.0, &k2))?;
    let k4 = f(&u.axpy(h, &k3))?;
    let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
    let next = u.axpy(h / 6.0, &incr);
    (next.coords().iter().all(|c| c.is_finite()) && j.in_smooth_region(&next)).then_some(next)
}

fn advance(j: &dyn EnergyFunctional, u: &SpaceVec, s: f64, h: f64, depth: u32) -> Result<SpaceVec> {
    let accepted = rk4(j, u, h).filter(|next| match (j.conserved_quantity(u), j.conserved_quantity(next)) {
        (Some(a), Some(b)) => (b - a).abs() <= tol::ODE_INVARIANT_REL * a.abs().max(f64::MIN_POSITIVE),
        _ => true,
    });
    match accepted {
        Some(next) => Ok(next),
        None if depth < tol::ODE_MAX_HALVINGS => {
            let mid = advance(j, u, s, h / 2.0, depth + 1)?;
            advance(j, &mid, s + h / 2.0, h / 2.0, depth + 1)
        }
        // Out of halvings: keep the step if it stays in the region.
        None => rk4(j, u, h).ok_or(Error::LeftSmoothRegion { s }),
    }
}
