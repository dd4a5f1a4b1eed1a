//! Gradient flow `0 in w'(s) + dJ(w(s))` in flow time `s`.

mod solve;
mod validate;

pub use solve::{solve_exact, solve_ode, solve_ode_on_mesh, solve_prox};
pub use validate::{
    check_constant_speed_affine, check_decay_bounds, check_edb, check_evi, fit_decay_exponent, sup_distance,
    sup_distance_nodal, sup_distance_piecewise_constant, DecayReport,
};

use serde::{Deserialize, Serialize};

use crate::space::{Space, SpaceVec};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Prox,
    Ode,
    /// Read back from a file; treated like a sampled trajectory.
    Imported,
}

/// A gradient-flow solution, piecewise linear in `s` between breakpoints.
#[derive(Debug, Clone)]
pub struct GsTrajectory {
    space: Space,
    times: Vec<f64>,
    values: Vec<SpaceVec>,
    velocities: Option<Vec<SpaceVec>>,
    method: Method,
    step: Option<f64>,
    at_rest: bool,
}

impl GsTrajectory {
    /// Exact trajectory from breakpoints and per-segment velocities
    /// (`velocities.len() == times.len() - 1`). `at_rest` declares the last
    /// value a rest point, so the trajectory extends constantly.
    pub fn exact(times: Vec<f64>, values: Vec<SpaceVec>, velocities: Vec<SpaceVec>, at_rest: bool) -> Self {
        assert_eq!(times.len(), values.len());
        assert_eq!(velocities.len() + 1, times.len());
        let space = values[0].space().clone();
        Self { space, times, values, velocities: Some(velocities), method: Method::Exact, step: None, at_rest }
    }

    /// Sampled trajectory interpreted by linear interpolation.
    pub fn sampled(times: Vec<f64>, values: Vec<SpaceVec>, method: Method, step: Option<f64>, at_rest: bool) -> Self {
        assert_eq!(times.len(), values.len());
        assert!(!times.is_empty());
        let space = values[0].space().clone();
        Self { space, times, values, velocities: None, method, step, at_rest }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[SpaceVec] {
        &self.values
    }

    pub fn velocities(&self) -> Option<&[SpaceVec]> {
        self.velocities.as_deref()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn step(&self) -> Option<f64> {
        self.step
    }

    /// The final value is a rest point of the flow.
    pub fn at_rest(&self) -> bool {
        self.at_rest
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn initial(&self) -> &SpaceVec {
        &self.values[0]
    }

    pub fn last(&self) -> &SpaceVec {
        self.values.last().unwrap()
    }

    pub fn segments(&self) -> usize {
        self.times.len() - 1
    }

    /// Index `k` of the segment `[s_k, s_{k+1})` containing `s`, if any.
    fn segment_of(&self, s: f64) -> Option<usize> {
        if self.segments() == 0 || s < self.times[0] || s >= self.end() {
            return None;
        }
        Some(self.times.partition_point(|&x| x <= s) - 1)
    }

    /// Constant velocity on segment `k`.
    pub fn segment_velocity(&self, k: usize) -> SpaceVec {
        match &self.velocities {
            Some(v) => v[k].clone(),
            None => (&self.values[k + 1] - &self.values[k]).scale(1.0 / (self.times[k + 1] - self.times[k])),
        }
    }

    /// `w(s)`; clamped to the first/last value outside the span.
    pub fn eval(&self, s: f64) -> SpaceVec {
        match self.segment_of(s) {
            None if s < self.times[0] => self.values[0].clone(),
            None => self.last().clone(),
            Some(k) => {
                let ds = s - self.times[k];
                match &self.velocities {
                    Some(v) => self.values[k].axpy(ds, &v[k]),
                    None => {
                        let theta = ds / (self.times[k + 1] - self.times[k]);
                        self.values[k].lerp(&self.values[k + 1], theta)
                    }
                }
            }
        }
    }

    /// Right derivative `w'_+(s)`; zero past the end of a trajectory at rest.
    pub fn right_derivative(&self, s: f64) -> SpaceVec {
        match self.segment_of(s) {
            Some(k) => self.segment_velocity(k),
            None if self.at_rest || self.segments() == 0 => self.space.zeros(),
            None if s < self.times[0] => self.segment_velocity(0),
            None => self.segment_velocity(self.segments() - 1),
        }
    }

    pub fn speed_profile(&self) -> SpeedProfile {
        let mut breakpoints = Vec::with_capacity(self.times.len());
        let mut speeds = Vec::with_capacity(self.times.len());
        for k in 0..self.segments() {
            breakpoints.push(self.times[k]);
            speeds.push(self.segment_velocity(k).norm());
        }
        let terminal = if self.at_rest {
            breakpoints.push(self.end());
            speeds.push(0.0);
            f64::INFINITY
        } else if self.segments() == 0 {
            breakpoints.push(self.end());
            speeds.push(0.0);
            self.end()
        } else {
            self.end()
        };
        let mut p = SpeedProfile { breakpoints, speeds, end: terminal };
        if self.method == Method::Exact {
            p.merge_equal(tol::SPEED_MERGE_REL);
        }
        p
    }
}

/// Right-continuous step function `g(s) = speeds[k]` on
/// `[breakpoints[k], breakpoints[k + 1])`, the last value extending to `end`
/// (`f64::INFINITY` when the flow has come to rest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    pub breakpoints: Vec<f64>,
    pub speeds: Vec<f64>,
    pub end: f64,
}

impl SpeedProfile {
    pub fn new(breakpoints: Vec<f64>, speeds: Vec<f64>, end: f64) -> Self {
        assert_eq!(breakpoints.len(), speeds.len());
        assert!(!speeds.is_empty());
        Self { breakpoints, speeds, end }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&x| x <= s);
        self.speeds[k.saturating_sub(1)]
    }

    /// Largest increase between consecutive speeds (0 if nonincreasing).
    pub fn monotonicity_violation(&self) -> f64 {
        self.speeds.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.monotonicity_violation() <= tol
    }

    /// Merges consecutive intervals whose speeds agree to relative `rel`.
    pub fn merge_equal(&mut self, rel: f64) {
        let mut b = vec![self.breakpoints[0]];
        let mut v = vec![self.speeds[0]];
        for (&s, &g) in self.breakpoints.iter().zip(&self.speeds).skip(1) {
            let last = *v.last().unwrap();
            if (g - last).abs() <= rel * g.abs().max(last.abs()) {
                continue;
            }
            b.push(s);
            v.push(g);
        }
        self.breakpoints = b;
        self.speeds = v;
    }

    /// The profile ends in a rest state rather than at a finite horizon.
    pub fn at_rest(&self) -> bool {
        self.end.is_infinite() && *self.speeds.last().unwrap() == 0.0
    }
}
