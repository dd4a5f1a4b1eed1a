use super::{check_space, check_tau, projection, EnergyFunctional};
use crate::error::Result;
use crate::space::{sign0, Space, SpaceVec};
use crate::tol;

/// `J(u) = max{|u1|, 2|u2|}` on Euclidean R^2.
///
/// `K` is the diamond `{2|g1| + |g2| <= 2}` with vertices `(+-1, 0)`, `(0, +-2)`.
#[derive(Debug, Clone)]
pub struct MaxAbs2D {
    space: Space,
}

/// Which piece of the minimal selection applies at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxAbsRegion {
    Origin,
    /// `|u1| > 2|u2|`
    FirstDominant,
    /// `|u1| < 2|u2|`
    SecondDominant,
    /// `|u1| = 2|u2| != 0`
    Diagonal,
}

impl MaxAbs2D {
    pub fn new() -> Self {
        Self { space: Space::euclidean(2).expect("dimension 2 is valid") }
    }

    pub fn region(&self, u: &SpaceVec) -> MaxAbsRegion {
        let (a, b) = (u.coords()[0].abs(), 2.0 * u.coords()[1].abs());
        if a == 0.0 && b == 0.0 {
            MaxAbsRegion::Origin
        } else if (a - b).abs() <= tol::DIAGONAL_REL * a.max(b) {
            MaxAbsRegion::Diagonal
        } else if a > b {
            MaxAbsRegion::FirstDominant
        } else {
            MaxAbsRegion::SecondDominant
        }
    }
}

impl Default for MaxAbs2D {
    fn default() -> Self {
        Self::new()
    }
}

impl EnergyFunctional for MaxAbs2D {
    fn kind(&self) -> &'static str {
        "maxabs2d"
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn value(&self, u: &SpaceVec) -> f64 {
        let c = u.coords();
        c[0].abs().max(2.0 * c[1].abs())
    }

    fn min_norm_grad(&self, u: &SpaceVec) -> Result<SpaceVec> {
        check_space(self, u)?;
        let c = u.coords();
        let g = match self.region(u) {
            MaxAbsRegion::Origin => vec![0.0, 0.0],
            MaxAbsRegion::FirstDominant => vec![sign0(c[0]), 0.0],
            MaxAbsRegion::SecondDominant => vec![0.0, 2.0 * sign0(c[1])],
            MaxAbsRegion::Diagonal => vec![0.8 * sign0(c[0]), 0.4 * sign0(c[1])],
        };
        Ok(u.with_coords(g))
    }

    fn project_k(&self, v: &SpaceVec, tau: f64) -> Result<SpaceVec> {
        check_space(self, v)?;
        check_tau(tau)?;
        Ok(v.with_coords(projection::weighted_l1_ball(v.coords(), &[1.0, 0.5], tau)))
    }

    fn coercivity_beta(&self) -> Option<f64> {
        Some(2.0 / 5f64.sqrt())
    }

    fn next_event(&self, u: &SpaceVec, _velocity: &SpaceVec) -> Result<f64> {
        check_space(self, u)?;
        let (a, b) = (u.coords()[0].abs(), u.coords()[1].abs());
        Ok(match self.region(u) {
            MaxAbsRegion::Origin => f64::INFINITY,
            MaxAbsRegion::FirstDominant => a - 2.0 * b,
            MaxAbsRegion::SecondDominant => (2.0 * b - a) / 4.0,
            MaxAbsRegion::Diagonal => 1.25 * a.max(2.0 * b),
        })
    }

    fn land(&self, u: &SpaceVec, velocity: &SpaceVec, ds: f64) -> SpaceVec {
        let moved = u.axpy(ds, velocity);
        let event = self.next_event(u, velocity).unwrap_or(f64::INFINITY);
        if ds + tol::EVENT_TIME < event {
            return moved;
        }
        let c = moved.coords();
        let snapped = match self.region(u) {
            MaxAbsRegion::Origin | MaxAbsRegion::Diagonal => vec![0.0, 0.0],
            MaxAbsRegion::FirstDominant => vec![sign0(u.coords()[0]) * 2.0 * c[1].abs(), c[1]],
            MaxAbsRegion::SecondDominant => vec![c[0], sign0(u.coords()[1]) * 0.5 * c[0].abs()],
        };
        u.with_coords(snapped.into_iter().map(|x| if x == 0.0 { 0.0 } else { x }).collect())
    }
}
