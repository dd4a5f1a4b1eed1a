use super::{check_space, check_tau, EnergyFunctional};
use crate::error::{Error, Result};
use crate::space::{Space, SpaceVec};
use crate::tol;

/// `J(u) = |u| - u1` on Euclidean R^2.
///
/// Vanishes exactly on the closed ray `{(a, 0) : a >= 0}`; `K` is the closed
/// unit ball centred at `(-1, 0)`. `M(u) = |u| + u1` is conserved by the flow.
#[derive(Debug, Clone)]
pub struct Degenerate2D {
    space: Space,
}

impl Degenerate2D {
    pub fn new() -> Self {
        Self { space: Space::euclidean(2).expect("dimension 2 is valid") }
    }

    pub fn m_invariant(&self, u: &SpaceVec) -> f64 {
        u.norm() + u.coords()[0]
    }
}

impl Default for Degenerate2D {
    fn default() -> Self {
        Self::new()
    }
}

impl EnergyFunctional for Degenerate2D {
    fn kind(&self) -> &'static str {
        "degenerate2d"
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn value(&self, u: &SpaceVec) -> f64 {
        let (x, y) = (u.coords()[0], u.coords()[1]);
        let n = u.norm();
        if x > 0.0 {
            // |u| - u1 cancels near the positive axis.
            y * y / (n + x)
        } else {
            n - x
        }
    }

    fn min_norm_grad(&self, u: &SpaceVec) -> Result<SpaceVec> {
        check_space(self, u)?;
        let n = u.norm();
        if n == 0.0 {
            return Ok(u.with_coords(vec![0.0, 0.0]));
        }
        let c = u.coords();
        Ok(u.with_coords(vec![c[0] / n - 1.0, c[1] / n]))
    }

    fn project_k(&self, v: &SpaceVec, tau: f64) -> Result<SpaceVec> {
        check_space(self, v)?;
        check_tau(tau)?;
        let c = v.coords();
        let (dx, dy) = (c[0] + tau, c[1]);
        let r = (dx * dx + dy * dy).sqrt();
        if r <= tau {
            return Ok(v.clone());
        }
        let s = tau / r;
        Ok(v.with_coords(vec![-tau + s * dx, s * dy]))
    }

    fn coercivity_beta(&self) -> Option<f64> {
        None
    }

    fn smooth_grad(&self, u: &SpaceVec) -> Result<SpaceVec> {
        if !self.in_smooth_region(u) {
            return Err(Error::NotSmoothHere("degenerate2d"));
        }
        self.min_norm_grad(u)
    }

    fn in_smooth_region(&self, u: &SpaceVec) -> bool {
        !u.is_zero()
    }

    fn conserved_quantity(&self, u: &SpaceVec) -> Option<f64> {
        Some(self.m_invariant(u))
    }

    /// Exact dynamics are only piecewise affine on the horizontal axis.
    fn next_event(&self, u: &SpaceVec, _velocity: &SpaceVec) -> Result<f64> {
        check_space(self, u)?;
        let c = u.coords();
        if c[1] != 0.0 {
            return Err(Error::UnsupportedFunctional {
                functional: "degenerate2d (off the horizontal axis)".into(),
                solver: "exact".into(),
            });
        }
        Ok(if c[0] < 0.0 { -c[0] / 2.0 } else { f64::INFINITY })
    }

    fn land(&self, u: &SpaceVec, velocity: &SpaceVec, ds: f64) -> SpaceVec {
        let c = u.coords();
        if c[1] == 0.0 && c[0] < 0.0 && -c[0] / 2.0 <= ds + tol::EVENT_TIME {
            return u.with_coords(vec![0.0, 0.0]);
        }
        u.axpy(ds, velocity)
    }
}
