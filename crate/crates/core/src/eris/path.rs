use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Space, SpaceVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    PiecewiseConstant,
    PiecewiseLinear,
}

/// Value of a path at `t` (`left = u(t) = u(t-)`) and its right limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub left: SpaceVec,
    pub right: SpaceVec,
}

impl Knot {
    pub fn continuous(t: f64, u: SpaceVec) -> Self {
        Self { t, right: u.clone(), left: u }
    }

    pub fn is_jump(&self) -> bool {
        self.left != self.right
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub left: SpaceVec,
    pub right: SpaceVec,
}

impl Jump {
    pub fn size(&self) -> f64 {
        self.left.dist(&self.right)
    }
}

/// A left-continuous path of bounded variation.
///
/// Between knots `k` and `k + 1` the path runs affinely from `knots[k].right`
/// to `knots[k + 1].left` (a constant piece when these agree), and it stays
/// at the last right limit after the final knot. The first knot is at `t = 0`.
/// The path lives on `[0, horizon]`, by default on the whole half line.
#[derive(Debug, Clone)]
pub struct ErisPath {
    space: Space,
    knots: Vec<Knot>,
    interpolation: Interpolation,
    horizon: f64,
}

impl ErisPath {
    pub fn new(knots: Vec<Knot>, interpolation: Interpolation) -> Result<Self> {
        let first = knots.first().ok_or(Error::InsufficientData { needed: 1, found: 0 })?;
        if first.t != 0.0 {
            return Err(Error::InvalidParameter(format!("path must start at t = 0, starts at {}", first.t)));
        }
        if knots.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidParameter("knot times must be strictly increasing".into()));
        }
        let space = first.left.space().clone();
        for k in &knots {
            if !k.left.space().same_as(&space) || !k.right.space().same_as(&space) {
                return Err(Error::SpaceMismatch);
            }
        }
        if interpolation == Interpolation::PiecewiseConstant && knots.windows(2).any(|w| w[0].right != w[1].left) {
            return Err(Error::InvalidParameter("piecewise-constant path must be constant between knots".into()));
        }
        Ok(Self { space, knots, interpolation, horizon: f64::INFINITY })
    }

    /// Restricts the path to `[0, horizon]`; `horizon` must not precede the
    /// last knot.
    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon >= self.last_knot_time()) {
            return Err(Error::InvalidParameter(format!(
                "horizon {horizon} precedes the last knot at {}",
                self.last_knot_time()
            )));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Left-continuous staircase: `values[0]` on `[0, times[1]]`, then
    /// `values[k]` on `(times[k], times[k + 1]]`. `times[0]` must be 0.
    pub fn staircase(times: &[f64], values: &[SpaceVec]) -> Result<Self> {
        if times.len() != values.len() || times.is_empty() {
            return Err(Error::InvalidParameter("staircase needs matching nonempty times and values".into()));
        }
        let mut knots = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            let left = if k == 0 { values[0].clone() } else { values[k - 1].clone() };
            knots.push(Knot { t: times[k], left, right: values[k].clone() });
        }
        // At t = 0 the value is u(0) and the first piece starts from it.
        knots[0].right = values[0].clone();
        Self::new(knots, Interpolation::PiecewiseConstant)
    }

    pub fn constant(u: SpaceVec) -> Self {
        Self::new(vec![Knot::continuous(0.0, u)], Interpolation::PiecewiseConstant).expect("single knot at 0 is valid")
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn last_knot_time(&self) -> f64 {
        self.knots.last().unwrap().t
    }

    pub fn initial(&self) -> &SpaceVec {
        &self.knots[0].left
    }

    pub fn terminal(&self) -> &SpaceVec {
        &self.knots.last().unwrap().right
    }

    pub fn jumps(&self) -> Vec<Jump> {
        self.knots
            .iter()
            .filter(|k| k.is_jump())
            .map(|k| Jump { t: k.t, left: k.left.clone(), right: k.right.clone() })
            .collect()
    }

    /// Index of the last knot with `knot.t < t`, if any.
    fn piece_of(&self, t: f64) -> Option<usize> {
        let i = self.knots.partition_point(|k| k.t < t);
        i.checked_sub(1)
    }

    /// `u(t) = u(t-)`.
    pub fn eval(&self, t: f64) -> SpaceVec {
        if t <= 0.0 {
            return self.knots[0].left.clone();
        }
        let k = self.piece_of(t).unwrap();
        match self.knots.get(k + 1) {
            Some(next) if next.t == t => next.left.clone(),
            Some(next) => {
                let a = &self.knots[k];
                a.right.lerp(&next.left, (t - a.t) / (next.t - a.t))
            }
            None => self.knots[k].right.clone(),
        }
    }

    /// `u(t+)`.
    pub fn eval_right(&self, t: f64) -> SpaceVec {
        let i = self.knots.partition_point(|k| k.t <= t);
        match i.checked_sub(1) {
            Some(k) if self.knots[k].t == t => self.knots[k].right.clone(),
            _ => self.eval(t),
        }
    }

    /// `Var(u; [r, t])`: the jump at `r` counts, the jump at `t` does not.
    pub fn variation(&self, r: f64, t: f64) -> f64 {
        self.weighted_variation_unchecked(&|_| 1.0, r, t, true)
    }

    /// `int_r^t phi(tau) |du(tau)|`: `phi`-weighted arc length of the affine
    /// pieces plus `phi(t_j)` times each jump in `[r, t)`.
    ///
    /// Fails if `phi` is not positive at a sampled point.
    pub fn weighted_variation(&self, phi: &dyn Fn(f64) -> f64, r: f64, t: f64) -> Result<f64> {
        let probes = self.knots.iter().map(|k| k.t).filter(|&x| x >= r && x <= t).chain([r, t]);
        for x in probes.filter(|&x| x > 0.0) {
            let v = phi(x);
            if !(v > 0.0) {
                return Err(Error::Domain(format!("weight must be positive, phi({x}) = {v}")));
            }
        }
        let total = self.weighted_variation_unchecked(phi, r, t, false);
        if total.is_nan() {
            return Err(Error::Domain("weighted variation is not a number".into()));
        }
        Ok(total)
    }

    fn weighted_variation_unchecked(&self, phi: &dyn Fn(f64) -> f64, r: f64, t: f64, unit: bool) -> f64 {
        if !(t > r) {
            return 0.0;
        }
        let mut total = 0.0;
        for (k, knot) in self.knots.iter().enumerate() {
            if knot.t >= r && knot.t < t && knot.is_jump() {
                total += phi(knot.t) * knot.left.dist(&knot.right);
            }
            if let Some(next) = self.knots.get(k + 1) {
                let (a, b) = (knot.t.max(r), next.t.min(t));
                if b > a {
                    let speed = knot.right.dist(&next.left) / (next.t - knot.t);
                    if speed > 0.0 {
                        total += speed * if unit { b - a } else { integrate(phi, a, b) };
                    }
                }
            }
        }
        total
    }

    /// Sup over `t` in `[0, horizon]` of `|self(t) - other(t)|`, skipping
    /// `guard`-neighbourhoods of either path's jump times. Exact for
    /// piecewise-linear paths: the distance is checked at every knot, at the
    /// guard-band edges, and at `horizon`.
    pub fn sup_distance(&self, other: &ErisPath, horizon: f64, guard: f64) -> f64 {
        let jumps: Vec<f64> = self.jumps().iter().chain(other.jumps().iter()).map(|j| j.t).collect();
        let near_jump = |x: f64| jumps.iter().any(|&j| (x - j).abs() < guard);
        let mut ts: Vec<f64> = vec![0.0, horizon];
        for k in self.knots.iter().chain(other.knots.iter()) {
            ts.extend([k.t, k.t - guard, k.t + guard]);
        }
        ts.retain(|&x| (0.0..=horizon).contains(&x) && !near_jump(x));
        ts.iter().map(|&x| self.eval(x).dist(&other.eval(x))).fold(0.0, f64::max)
    }
}

/// Composite 8-point Gauss-Legendre quadrature, refined until two successive
/// estimates agree to 1e-13 relative.
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
    const W: [f64; 4] = [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
    let rule = |n: usize| {
        let h = (b - a) / n as f64;
        (0..n)
            .map(|i| {
                let c = a + (i as f64 + 0.5) * h;
                X.iter().zip(&W).map(|(x, w)| w * (f(c - 0.5 * h * x) + f(c + 0.5 * h * x))).sum::<f64>() * 0.5 * h
            })
            .sum::<f64>()
    };
    let mut n = 4;
    let mut prev = rule(n);
    while n < 1 << 16 {
        n *= 2;
        let next = rule(n);
        if (next - prev).abs() <= 1e-13 * next.abs().max(1e-300) {
            return next;
        }
        prev = next;
    }
    prev
}
