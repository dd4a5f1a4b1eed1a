use super::path::{ErisPath, Interpolation, Knot};
use crate::energy::WeightedL1;
use crate::error::{Error, Result};
use crate::space::Space;

/// Even, strictly decreasing initial profiles on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    /// `(2|x|)^{-beta}` for `|x| >= 1`, continued inside by the C^1 parabola
    /// `2^{-beta} (1 + beta (1 - x^2) / 2)`.
    Power { beta: f64 },
    /// `|x|^{-1/2} (log |x|)^{-beta}` for `|x| >= x_star`, zero inside.
    Log { beta: f64, x_star: f64 },
}

impl RadialProfile {
    fn validate(&self) -> Result<()> {
        let (beta, hole) = match *self {
            Self::Power { beta } => (beta, 1.0),
            Self::Log { beta, x_star } => (beta, x_star),
        };
        if !(beta > 0.5 && beta <= 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (1/2, 1], got {beta}")));
        }
        if !(hole > 1.0) && matches!(self, Self::Log { .. }) {
            return Err(Error::InvalidParameter(format!("x_star must exceed 1, got {hole}")));
        }
        Ok(())
    }

    /// Half-width of the zero set of the profile.
    pub fn hole(&self) -> f64 {
        match *self {
            Self::Power { .. } => 0.0,
            Self::Log { x_star, .. } => x_star,
        }
    }

    pub fn u0(&self, x: f64) -> f64 {
        let x = x.abs();
        match *self {
            Self::Power { beta } if x >= 1.0 => (2.0 * x).powf(-beta),
            Self::Power { beta } => 2f64.powf(-beta) * (1.0 + 0.5 * beta * (1.0 - x * x)),
            Self::Log { beta, x_star } if x >= x_star => x.powf(-0.5) * x.ln().powf(-beta),
            Self::Log { .. } => 0.0,
        }
    }

    pub fn du0(&self, x: f64) -> f64 {
        let (sign, x) = (x.signum(), x.abs());
        sign * match *self {
            Self::Power { beta } if x >= 1.0 => -beta * 2f64.powf(-beta) * x.powf(-beta - 1.0),
            Self::Power { beta } => -beta * 2f64.powf(-beta) * x,
            Self::Log { beta, x_star } if x >= x_star => {
                let l = x.ln();
                -x.powf(-1.5) * l.powf(-beta) * (0.5 + beta / l)
            }
            Self::Log { .. } => 0.0,
        }
    }

    /// Right end `X(t)` of the support of `u(t)`: the support has measure
    /// `1/t^2`, so that `|d0 J(u(t))| = 1/t`.
    pub fn x_of_t(&self, t: f64) -> f64 {
        self.hole() + 0.5 / (t * t)
    }

    /// The threshold `S(t) = u0(X(t))`.
    pub fn s_of_t(&self, t: f64) -> f64 {
        self.u0(self.x_of_t(t))
    }
}

/// Cells covering `[hole, extent]` on the half line; the even extension
/// doubles every cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialGrid {
    Uniform { dx: f64, extent: f64 },
    /// Cell edges `hole * ratio^k`.
    Geometric { ratio: f64, extent: f64 },
}

/// Discretization of the threshold solution `u(t, x) = max{0, u0(x) - S(t)}`
/// for `J(u) = int |u| dx` on a symmetric grid.
///
/// The discrete solution is the exact energetic solution of the discretized
/// problem: with cumulative support measures `M_k` of the `k` highest cells,
/// it jumps at `t_k = M_k^{-1/2}` from threshold `u0_k` to `u0_{k-1}`.
#[derive(Debug, Clone)]
pub struct RadialExample {
    profile: RadialProfile,
    extent: f64,
    centers: Vec<f64>,
    weights: Vec<f64>,
    u0: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RadialExample {
    pub fn new(profile: RadialProfile, grid: RadialGrid) -> Result<Self> {
        profile.validate()?;
        let hole = profile.hole();
        let edges: Vec<f64> = match grid {
            RadialGrid::Uniform { dx, extent } => {
                if !(dx > 0.0 && extent > hole + dx) {
                    return Err(Error::InvalidParameter(format!("bad uniform grid dx = {dx}, extent = {extent}")));
                }
                let n = ((extent - hole) / dx).round() as usize;
                (0..=n).map(|i| hole + i as f64 * dx).collect()
            }
            RadialGrid::Geometric { ratio, extent } => {
                if !(hole > 0.0 && ratio > 1.0 && extent > hole * ratio) {
                    return Err(Error::InvalidParameter(format!(
                        "geometric grid needs a positive hole, ratio > 1 and room; got ratio {ratio}, extent {extent}"
                    )));
                }
                let n = ((extent / hole).ln() / ratio.ln()).ceil() as usize;
                (0..=n).map(|i| hole * ratio.powi(i as i32)).collect()
            }
        };
        let extent = *edges.last().unwrap();
        let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let weights: Vec<f64> = edges.windows(2).map(|w| 2.0 * (w[1] - w[0])).collect();
        let u0: Vec<f64> = centers.iter().map(|&x| profile.u0(x)).collect();
        let mut cumulative = Vec::with_capacity(weights.len() + 1);
        cumulative.push(0.0);
        for w in &weights {
            cumulative.push(cumulative.last().unwrap() + w);
        }
        Ok(Self { profile, extent, centers, weights, u0, cumulative })
    }

    pub fn profile(&self) -> RadialProfile {
        self.profile
    }

    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn initial(&self) -> &[f64] {
        &self.u0
    }

    fn check_resolved(&self, t: f64) -> Result<()> {
        let x = self.profile.x_of_t(t);
        if !(t > 0.0) || x > self.extent {
            return Err(Error::GridTooCoarse { required: x, available: self.extent });
        }
        Ok(())
    }

    /// The analytic threshold `S(t)`.
    pub fn s_analytic(&self, t: f64) -> Result<f64> {
        self.check_resolved(t)?;
        Ok(self.profile.s_of_t(t))
    }

    /// Number of cells in the support at time `t` for the analytic threshold.
    fn analytic_support(&self, t: f64) -> Result<usize> {
        let s = self.s_analytic(t)?;
        Ok(self.u0.partition_point(|&v| v > s))
    }

    /// `|d0 J(max{0, u0 - S(t)})|` on the grid with the analytic threshold.
    pub fn stability_norm_analytic(&self, t: f64) -> Result<f64> {
        Ok(self.cumulative[self.analytic_support(t)?].sqrt())
    }

    /// Support size `K(t) = max{k : M_k <= 1/t^2}` of the discrete solution.
    fn discrete_support(&self, t: f64) -> usize {
        let bound = 1.0 / (t * t);
        self.cumulative.partition_point(|&m| m <= bound) - 1
    }

    /// Threshold of the discrete solution.
    pub fn s_discrete(&self, t: f64) -> Result<f64> {
        self.check_resolved(t)?;
        Ok(self.u0.get(self.discrete_support(t)).copied().unwrap_or(0.0))
    }

    pub fn state(&self, t: f64) -> Result<Vec<f64>> {
        let s = self.s_discrete(t)?;
        Ok(self.u0.iter().map(|&v| (v - s).max(0.0)).collect())
    }

    /// Jump `k = 1..=n` of the discrete solution: time and size.
    fn jump(&self, k: usize) -> (f64, f64) {
        let m = self.cumulative[k];
        let upper = self.u0[k - 1];
        let lower = self.u0.get(k).copied().unwrap_or(0.0);
        (1.0 / m.sqrt(), (upper - lower) * m.sqrt())
    }

    /// `Var(u; [r, t])` of the discrete solution, summed over its jumps.
    pub fn variation(&self, r: f64, t: f64) -> Result<f64> {
        self.check_resolved(r)?;
        Ok((1..=self.cells()).map(|k| self.jump(k)).filter(|&(tk, _)| tk >= r && tk < t).map(|(_, d)| d).sum())
    }

    /// `int_r^t |du|` for the analytic solution `max{0, u0 - S(t)}`: since
    /// `|du/dt| = S'(t) / t`, this is `int_{S(r)}^{S(t)} sqrt(m(S)) dS` with
    /// `m(S)` the measure of `{u0 > S}`.
    pub fn variation_analytic(&self, r: f64, t: f64) -> Result<f64> {
        self.check_resolved(r)?;
        let p = self.profile;
        let hole = p.hole();
        // With S = u0(X) and m = 2 (X - hole), integrated in z = log(X - hole).
        let f = |z: f64| {
            let e = z.exp();
            (2.0 * e).sqrt() * p.du0(hole + e).abs() * e
        };
        let (za, zb) = ((p.x_of_t(t) - hole).ln(), (p.x_of_t(r) - hole).ln());
        Ok(super::path::integrate(&f, za, zb))
    }

    pub fn functional(&self) -> Result<WeightedL1> {
        WeightedL1::new(Space::new(self.weights.clone())?, vec![1.0; self.cells()])
    }

    /// The discrete solution as a path: `u0` until the outermost cell drops
    /// out of the support, then one jump per cell.
    pub fn to_path(&self) -> Result<ErisPath> {
        let space = Space::new(self.weights.clone())?;
        let value = |s: f64| space.vec(self.u0.iter().map(|&v| (v - s).max(0.0)).collect::<Vec<_>>());
        let mut knots = vec![Knot::continuous(0.0, value(0.0)?)];
        for k in (1..=self.cells()).rev() {
            let (t, _) = self.jump(k);
            let left = value(self.u0.get(k).copied().unwrap_or(0.0))?;
            let right = value(self.u0[k - 1])?;
            knots.push(Knot { t, left, right });
        }
        ErisPath::new(knots, Interpolation::PiecewiseConstant)
    }
}
