use super::{check_space, check_tau, projection, EnergyFunctional};
use crate::error::{Error, Result};
use crate::space::{sign0, Space, SpaceVec};
use crate::tol;

/// `J(u) = sum_i d_i a_i |u_i|`: a grid discretization of `int a(x)|u(x)| dx`
/// with cell sizes `d_i` as metric weights.
///
/// `dJ(u)_i = a_i Sign(u_i)` in gradient representation, so `K` is the box
/// `|g_i| <= a_i` and the proximal map is soft-thresholding at `tau a_i`.
#[derive(Debug, Clone)]
pub struct WeightedL1 {
    space: Space,
    a: Vec<f64>,
}

impl WeightedL1 {
    pub fn new(space: Space, a: Vec<f64>) -> Result<Self> {
        if a.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: a.len() });
        }
        if let Some(bad) = a.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidParameter(format!("weight a must be finite and nonnegative, got {bad}")));
        }
        Ok(Self { space, a })
    }

    /// Unit cell sizes.
    pub fn unit(a: Vec<f64>) -> Result<Self> {
        let space = Space::euclidean(a.len())?;
        Self::new(space, a)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    fn hit_time(&self, i: usize, u: f64) -> f64 {
        if u == 0.0 || self.a[i] == 0.0 {
            f64::INFINITY
        } else {
            u.abs() / self.a[i]
        }
    }
}

impl EnergyFunctional for WeightedL1 {
    fn kind(&self) -> &'static str {
        "weighted_l1"
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn value(&self, u: &SpaceVec) -> f64 {
        self.space
            .weights()
            .iter()
            .zip(&self.a)
            .zip(u.coords())
            .map(|((d, a), x)| d * a * x.abs())
            .sum()
    }

    fn min_norm_grad(&self, u: &SpaceVec) -> Result<SpaceVec> {
        check_space(self, u)?;
        Ok(u.with_coords(u.coords().iter().zip(&self.a).map(|(&x, &a)| a * sign0(x)).collect()))
    }

    fn project_k(&self, v: &SpaceVec, tau: f64) -> Result<SpaceVec> {
        check_space(self, v)?;
        check_tau(tau)?;
        let bound: Vec<f64> = self.a.iter().map(|a| tau * a).collect();
        Ok(v.with_coords(projection::box_clamp(v.coords(), &bound)))
    }

    fn coercivity_beta(&self) -> Option<f64> {
        let beta = self
            .a
            .iter()
            .zip(self.space.weights())
            .map(|(a, d)| a * d.sqrt())
            .fold(f64::INFINITY, f64::min);
        (beta > 0.0).then_some(beta)
    }

    fn next_event(&self, u: &SpaceVec, _velocity: &SpaceVec) -> Result<f64> {
        check_space(self, u)?;
        Ok(u.coords().iter().enumerate().map(|(i, &x)| self.hit_time(i, x)).fold(f64::INFINITY, f64::min))
    }

    fn land(&self, u: &SpaceVec, velocity: &SpaceVec, ds: f64) -> SpaceVec {
        let coords = u
            .coords()
            .iter()
            .zip(velocity.coords())
            .enumerate()
            .map(|(i, (&x, &v))| if self.hit_time(i, x) <= ds + tol::EVENT_TIME { 0.0 } else { x + ds * v })
            .collect();
        u.with_coords(coords)
    }
}
