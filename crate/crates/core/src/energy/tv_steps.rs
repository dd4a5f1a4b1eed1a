use super::{check_space, check_tau, EnergyFunctional};
use crate::error::{Error, Result};
use crate::space::{sign0, Space, SpaceVec};
use crate::tol;

/// Total variation of the step function `sum_i alpha_i 1_[y_{i-1}, y_i]`
/// on the line, extended by zero:
/// `J(alpha) = |alpha_1| + |alpha_N| + sum_i |alpha_i - alpha_{i-1}|`.
///
/// The metric weights are the cell lengths `d_i = y_i - y_{i-1}`, so `|.|`
/// is the L2 norm of the step function.
///
/// Edges are indexed `j = 0..=N`; edge `j` separates cell `j - 1` from cell
/// `j` (cells `-1` and `N` are the zero exterior) and carries the jump
/// `delta_j = alpha_j - alpha_{j-1}`. A subgradient has the form
/// `g_i = (p_i - p_{i+1}) / d_i` with `p_j` in `Sign(delta_j)`.
#[derive(Debug, Clone)]
pub struct TvSteps {
    space: Space,
    breakpoints: Vec<f64>,
}

/// A maximal run of cells `start..end` with equal values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub start: usize,
    pub end: usize,
    /// Attached to the zero exterior through a vanishing boundary jump.
    pub glued: bool,
    pub p_left: f64,
    pub p_right: f64,
    pub length: f64,
}

impl Facet {
    /// Constant value of the minimal-norm subgradient on the facet.
    pub fn slope(&self) -> f64 {
        if self.glued {
            0.0
        } else {
            (self.p_left - self.p_right) / self.length
        }
    }
}

impl TvSteps {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidParameter("tv_steps needs at least two breakpoints".into()));
        }
        let d: Vec<f64> = breakpoints.windows(2).map(|w| w[1] - w[0]).collect();
        if d.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::InvalidParameter("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { space: Space::new(d)?, breakpoints })
    }

    /// `n` unit cells on `[0, n]`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new((0..=n).map(|i| i as f64).collect())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn cells(&self) -> usize {
        self.space.dim()
    }

    /// The `N + 1` edge jumps `delta_j`.
    pub fn jumps(&self, alpha: &[f64]) -> Vec<f64> {
        let n = alpha.len();
        (0..=n)
            .map(|j| {
                let right = if j < n { alpha[j] } else { 0.0 };
                let left = if j > 0 { alpha[j - 1] } else { 0.0 };
                right - left
            })
            .collect()
    }

    pub fn facets(&self, alpha: &[f64]) -> Vec<Facet> {
        let n = alpha.len();
        let delta = self.jumps(alpha);
        let d = self.space.weights();
        let mut out = Vec::new();
        let mut start = 0;
        for j in 1..=n {
            if j == n || delta[j] != 0.0 {
                out.push(Facet {
                    start,
                    end: j,
                    glued: delta[start] == 0.0 || delta[j] == 0.0,
                    p_left: sign0(delta[start]),
                    p_right: sign0(delta[j]),
                    length: d[start..j].iter().sum(),
                });
                start = j;
            }
        }
        out
    }

    /// Cell velocities `-d0 J` from the facet decomposition.
    fn facet_velocity(&self, alpha: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; alpha.len()];
        for f in self.facets(alpha) {
            let s = -f.slope();
            v[f.start..f.end].iter_mut().for_each(|x| *x = s);
        }
        v
    }

    /// `g = W^{-1} D^T p` scaled by `tau`.
    fn dual_to_primal(&self, p: &[f64], tau: f64) -> Vec<f64> {
        let d = self.space.weights();
        (0..d.len()).map(|i| tau * (p[i] - p[i + 1]) / d[i]).collect()
    }

    /// KKT violation of a dual iterate for the projection of `v` onto `tau K`,
    /// measured on the primal jumps of `r = v - tau W^{-1} D^T p`.
    pub fn projection_kkt_residual(&self, v: &[f64], tau: f64, p: &[f64]) -> f64 {
        let g = self.dual_to_primal(p, tau);
        let r: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a - b).collect();
        let delta = self.jumps(&r);
        delta
            .iter()
            .zip(p)
            .map(|(&dj, &pj)| {
                if pj >= 1.0 {
                    (-dj).max(0.0)
                } else if pj <= -1.0 {
                    dj.max(0.0)
                } else {
                    dj.abs()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Exact solution of the projection problem given which edges sit at a
    /// bound (`Some(sign)`) and which are free (`None`). Returns the dual
    /// vector and the primal residual `v - P(v)` when the guess satisfies the
    /// KKT conditions, `None` otherwise.
    fn polish(&self, v: &[f64], tau: f64, fixed: &[Option<f64>]) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = v.len();
        let d = self.space.weights();
        let mut r = vec![0.0; n];
        let mut p = vec![0.0; n + 1];
        let mut start = 0;
        for j in 1..=n {
            if j < n && fixed[j].is_none() {
                continue;
            }
            let (a, b) = (start, j);
            let left = fixed[a];
            let right = fixed[b];
            match (left, right) {
                (Some(sl), Some(sr)) => {
                    let mass: f64 = (a..b).map(|i| d[i] * v[i]).sum();
                    let len: f64 = d[a..b].iter().sum();
                    let value = (mass - tau * (sl - sr)) / len;
                    r[a..b].iter_mut().for_each(|x| *x = value);
                    p[a] = sl;
                    for i in a..b - 1 {
                        p[i + 1] = p[i] - d[i] * (v[i] - value) / tau;
                    }
                    p[b] = sr;
                }
                (None, Some(sr)) => {
                    p[b] = sr;
                    for i in (a..b).rev() {
                        p[i] = p[i + 1] + d[i] * v[i] / tau;
                    }
                }
                (Some(sl), None) => {
                    p[a] = sl;
                    for i in a..b {
                        p[i + 1] = p[i] - d[i] * v[i] / tau;
                    }
                }
                (None, None) => {
                    p[a] = 0.0;
                    for i in a..b {
                        p[i + 1] = p[i] - d[i] * v[i] / tau;
                    }
                    let hi = p[a..=b].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let lo = p[a..=b].iter().copied().fold(f64::INFINITY, f64::min);
                    let shift = -(hi + lo) / 2.0;
                    p[a..=b].iter_mut().for_each(|x| *x += shift);
                }
            }
            start = j;
        }
        if p.iter().any(|x| x.abs() > 1.0 + 1e-12) {
            return None;
        }
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let delta = self.jumps(&r);
        for (j, s) in fixed.iter().enumerate() {
            if let Some(s) = s {
                if s * delta[j] < -1e-13 * scale {
                    return None;
                }
            }
        }
        p.iter_mut().for_each(|x| *x = x.clamp(-1.0, 1.0));
        Some((p, r))
    }

    /// Projection onto `tau K`: projected gradient on the dual box problem,
    /// with an exact active-set solve attempted along the way.
    fn project_dual(&self, v: &[f64], tau: f64) -> Result<Vec<f64>> {
        let n = v.len();
        let d = self.space.weights();
        let inv = |i: isize| if i < 0 || i >= n as isize { 0.0 } else { 1.0 / d[i as usize] };
        let lip = (0..=n as isize).map(|j| 2.0 * (inv(j - 1) + inv(j))).fold(0.0, f64::max);
        let step = 1.0 / (tau * lip);

        let mut p: Vec<f64> = self.jumps(v).iter().map(|&x| sign0(x)).collect();
        let mut iter = 0usize;
        loop {
            let fixed: Vec<Option<f64>> = p.iter().map(|&x| (x.abs() >= 1.0).then_some(x.signum())).collect();
            if let Some((_p, r)) = self.polish(v, tau, &fixed) {
                return Ok(v.iter().zip(&r).map(|(a, b)| a - b).collect());
            }
            let chunk = if iter < 200 { 1 } else { 25 };
            for _ in 0..chunk {
                let g = self.dual_to_primal(&p, tau);
                let r: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a - b).collect();
                let delta = self.jumps(&r);
                for j in 0..=n {
                    p[j] = (p[j] + step * delta[j]).clamp(-1.0, 1.0);
                }
            }
            iter += chunk;
            if iter >= tol::KKT_MAX_ITER {
                let residual = self.projection_kkt_residual(v, tau, &p);
                if residual <= tol::KKT {
                    return Ok(self.dual_to_primal(&p, tau));
                }
                return Err(Error::NotConverged { iterations: iter, residual });
            }
        }
    }
}

impl EnergyFunctional for TvSteps {
    fn kind(&self) -> &'static str {
        "tv_steps"
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn value(&self, u: &SpaceVec) -> f64 {
        self.jumps(u.coords()).iter().map(|x| x.abs()).sum()
    }

    fn min_norm_grad(&self, u: &SpaceVec) -> Result<SpaceVec> {
        check_space(self, u)?;
        Ok(u.with_coords(self.facet_velocity(u.coords()).into_iter().map(|x| -x).collect()))
    }

    fn project_k(&self, v: &SpaceVec, tau: f64) -> Result<SpaceVec> {
        check_space(self, v)?;
        check_tau(tau)?;
        Ok(v.with_coords(self.project_dual(v.coords(), tau)?))
    }

    fn coercivity_beta(&self) -> Option<f64> {
        // The extreme points of {J <= 1} are +-1/2 times block indicators; the
        // longest block is the whole support.
        let len = self.breakpoints[self.breakpoints.len() - 1] - self.breakpoints[0];
        Some(2.0 / len.sqrt())
    }

    fn next_event(&self, u: &SpaceVec, velocity: &SpaceVec) -> Result<f64> {
        check_space(self, u)?;
        let delta = self.jumps(u.coords());
        let rate = self.jumps(velocity.coords());
        Ok(delta
            .iter()
            .zip(&rate)
            .filter(|(dj, rj)| **dj != 0.0 && **dj * **rj < 0.0)
            .map(|(dj, rj)| -dj / rj)
            .fold(f64::INFINITY, f64::min))
    }

    fn land(&self, u: &SpaceVec, velocity: &SpaceVec, ds: f64) -> SpaceVec {
        let alpha = u.coords();
        let n = alpha.len();
        let delta = self.jumps(alpha);
        let rate = self.jumps(velocity.coords());
        let moved = u.axpy(ds, velocity).into_coords();
        // Edges that are (or become) flat glue cells together.
        let joined: Vec<bool> = delta
            .iter()
            .zip(&rate)
            .map(|(&dj, &rj)| dj == 0.0 || (dj * rj < 0.0 && -dj / rj <= ds + tol::EVENT_TIME))
            .collect();
        let d = self.space.weights();
        let mut out = moved.clone();
        let mut start = 0;
        for j in 1..=n {
            if j < n && joined[j] {
                continue;
            }
            let glued = joined[start] && start == 0 || joined[j] && j == n;
            let value = if glued {
                0.0
            } else {
                let mass: f64 = (start..j).map(|i| d[i] * moved[i]).sum();
                mass / d[start..j].iter().sum::<f64>()
            };
            out[start..j].iter_mut().for_each(|x| *x = value);
            start = j;
        }
        u.with_coords(out)
    }
}
