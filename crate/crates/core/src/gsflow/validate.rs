use super::GsTrajectory;
use crate::energy::EnergyFunctional;
use crate::error::{Error, Result};
use crate::report::{Check, Worst};
use crate::space::SpaceVec;

/// Overlap of `[a, b]` with `[lo, hi]`.
fn overlap(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    (b.min(hi) - a.max(lo)).max(0.0)
}

/// `int_{s1}^{s2} |w'|^2`, exact for piecewise-linear trajectories.
fn dissipation(traj: &GsTrajectory, s1: f64, s2: f64) -> f64 {
    (0..traj.segments())
        .map(|k| {
            let (a, b) = (traj.times()[k], traj.times()[k + 1]);
            let len = overlap(a, b, s1, s2);
            if len == 0.0 {
                0.0
            } else {
                len * traj.segment_velocity(k).norm_sq()
            }
        })
        .sum()
}

/// Energy-dissipation balance `|J(w(s2)) + int |w'|^2 - J(w(s1))|`.
pub fn check_edb(traj: &GsTrajectory, j: &dyn EnergyFunctional, s1: f64, s2: f64) -> f64 {
    (j.value(&traj.eval(s2)) + dissipation(traj, s1, s2) - j.value(&traj.eval(s1))).abs()
}

/// Violation of the evolutionary variational inequality
/// `1/2|w(s)-v|^2 - 1/2|w(r)-v|^2 <= (s-r)(J(v) - J(w(s)))`.
pub fn check_evi(traj: &GsTrajectory, j: &dyn EnergyFunctional, v: &SpaceVec, r: f64, s: f64) -> f64 {
    let ws = traj.eval(s);
    let lhs = 0.5 * ws.dist(v).powi(2) - 0.5 * traj.eval(r).dist(v).powi(2);
    let rhs = (s - r) * (j.value(v) - j.value(&ws));
    (lhs - rhs).max(0.0)
}

/// The decay statements for gradient flows of one-homogeneous energies.
#[derive(Debug, Clone)]
pub struct DecayReport {
    /// `s -> |w'_+(s)|` nonincreasing.
    pub speed_monotone: Check,
    /// `|w'_+(s)| <= sqrt(2) |w(0)| / s`.
    pub apriori_speed: Check,
    /// `1/2|w(s)|^2 + int_0^s J = 1/2|w(0)|^2`.
    pub norm_energy_identity: Check,
    /// `int_0^inf J <= 1/2 |w(0)|^2`.
    pub energy_integrable: Check,
    /// `s -> |w(s)|` nonincreasing.
    pub norm_monotone: Check,
    /// `|w(s)| <= max(0, |w(0)| - beta s)` when `J` is coercive.
    pub extinction: Option<Check>,
}

impl DecayReport {
    pub fn checks(&self) -> Vec<Check> {
        let mut v = vec![
            self.speed_monotone.clone(),
            self.apriori_speed.clone(),
            self.norm_energy_identity.clone(),
            self.energy_integrable.clone(),
            self.norm_monotone.clone(),
        ];
        v.extend(self.extinction.clone());
        v
    }

    pub fn pass(&self) -> bool {
        self.checks().iter().all(|c| c.pass)
    }
}

/// Evaluates the decay statements at the trajectory's breakpoints, with
/// trapezoid quadrature for `int J` (exact on exact trajectories, where `J`
/// is affine on each segment).
pub fn check_decay_bounds(traj: &GsTrajectory, j: &dyn EnergyFunctional, tol: f64) -> DecayReport {
    let times = traj.times();
    let values = traj.values();
    let n0 = traj.initial().norm();

    let profile = traj.speed_profile();
    let mut mono = Worst::new();
    for (w, s) in profile.speeds.windows(2).zip(&profile.breakpoints[1..]) {
        mono.push(w[1] - w[0], *s);
    }

    let mut apriori = Worst::new();
    for k in 0..traj.segments() {
        let s = times[k];
        if s > 0.0 {
            apriori.push(traj.segment_velocity(k).norm() - 2f64.sqrt() * n0 / s, s);
        }
    }

    let energies: Vec<f64> = values.iter().map(|u| j.value(u)).collect();
    let mut integral = 0.0;
    let mut identity = Worst::new();
    let mut norm_mono = Worst::new();
    for k in 0..times.len() {
        if k > 0 {
            integral += 0.5 * (energies[k] + energies[k - 1]) * (times[k] - times[k - 1]);
            norm_mono.push(values[k].norm() - values[k - 1].norm(), times[k]);
        }
        identity.push((0.5 * values[k].norm_sq() + integral - 0.5 * n0 * n0).abs(), times[k]);
    }
    let integrable = Check::new("energy_integrable", (integral - 0.5 * n0 * n0).max(0.0), None, tol);

    let extinction = j.coercivity_beta().map(|beta| {
        let mut w = Worst::new();
        for (s, u) in times.iter().zip(values) {
            w.push(u.norm() - (n0 - beta * s).max(0.0), *s);
        }
        w.check("extinction_bound", tol)
    });

    DecayReport {
        speed_monotone: mono.check("speed_monotone", tol),
        apriori_speed: apriori.check("apriori_speed", tol),
        norm_energy_identity: identity.check("norm_energy_identity", tol),
        energy_integrable: integrable,
        norm_monotone: norm_mono.check("norm_monotone", tol),
        extinction,
    }
}

/// On every maximal interval of constant positive speed (relative tolerance
/// `1e-9`), the distance of the trajectory from the chord, sampled at
/// breakpoints and segment midpoints.
pub fn check_constant_speed_affine(traj: &GsTrajectory, tol: f64) -> Check {
    let times = traj.times();
    let speeds: Vec<f64> = (0..traj.segments()).map(|k| traj.segment_velocity(k).norm()).collect();
    let mut worst = Worst::new();
    let mut k = 0;
    while k < speeds.len() {
        let mut m = k + 1;
        while m < speeds.len() && (speeds[m] - speeds[k]).abs() <= 1e-9 * speeds[k].max(speeds[m]) {
            m += 1;
        }
        if speeds[k] > 0.0 && m - k > 1 {
            let (a, b) = (times[k], times[m]);
            let (wa, wb) = (traj.eval(a), traj.eval(b));
            for i in k..m {
                for s in [times[i], 0.5 * (times[i] + times[i + 1])] {
                    let chord = wa.lerp(&wb, (s - a) / (b - a));
                    worst.push(traj.eval(s).dist(&chord), s);
                }
            }
        }
        k = m;
    }
    worst.check("constant_speed_affine", tol)
}

/// Least-squares slope of `log value` against `log s` over the samples with
/// `s` in `window`.
pub fn fit_decay_exponent(series: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(s, v)| *s >= window.0 && *s <= window.1 && *s > 0.0 && *v > 0.0)
        .map(|(s, v)| (s.ln(), v.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::InsufficientData { needed: 10, found: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Sup over `s` of `|a(s) - b(s)|`. Both are piecewise linear, so the
/// maximum over the union of breakpoints is exact (outside its span each
/// trajectory is held at its end value).
pub fn sup_distance(a: &GsTrajectory, b: &GsTrajectory) -> f64 {
    let mut ts: Vec<f64> = a.times().iter().chain(b.times()).copied().collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.iter().map(|&s| a.eval(s).dist(&b.eval(s))).fold(0.0, f64::max)
}

/// Largest error of the stored values against `reference` at their own times.
pub fn sup_distance_nodal(traj: &GsTrajectory, reference: &GsTrajectory) -> f64 {
    traj.times()
        .iter()
        .zip(traj.values())
        .map(|(&s, u)| u.dist(&reference.eval(s)))
        .fold(0.0, f64::max)
}

/// Sup-distance between `reference` and the left-open piecewise-constant
/// interpolant `w_k` on `(s_{k-1}, s_k]`. Distance to a fixed point is convex
/// along each affine piece of the reference, so endpoints suffice.
pub fn sup_distance_piecewise_constant(traj: &GsTrajectory, reference: &GsTrajectory) -> f64 {
    let times = traj.times();
    let values = traj.values();
    let rt = reference.times();
    let mut worst = values[0].dist(&reference.eval(times[0]));
    for k in 1..times.len() {
        let (a, b) = (times[k - 1], times[k]);
        let lo = rt.partition_point(|&x| x <= a);
        let hi = rt.partition_point(|&x| x < b);
        for s in std::iter::once(a).chain(rt[lo..hi].iter().copied()).chain(std::iter::once(b)) {
            worst = worst.max(values[k].dist(&reference.eval(s)));
        }
    }
    worst
}
