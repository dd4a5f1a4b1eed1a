use super::{check_space, EnergyFunctional};
use crate::error::{Error, Result};
use crate::space::{Space, SpaceVec};

/// `J(u) = |u1|^(alpha+1) / u2^alpha` for `u2 > 0`, `J(0) = 0`, `+inf` elsewhere.
///
/// Not a support function of a usable `K` in this library: flows are
/// integrated through [`smooth_grad`](EnergyFunctional::smooth_grad) on the
/// half-plane `u2 > 0`, where `Phi(u) = alpha/(alpha+1) u1^2 + u2^2` is a
/// first integral.
#[derive(Debug, Clone)]
pub struct SingularAlpha {
    space: Space,
    alpha: f64,
}

impl SingularAlpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 1, got {alpha}")));
        }
        Ok(Self { space: Space::euclidean(2)?, alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self, u: &SpaceVec) -> f64 {
        let c = u.coords();
        self.alpha / (self.alpha + 1.0) * c[0] * c[0] + c[1] * c[1]
    }

    fn grad_unchecked(&self, c: &[f64]) -> [f64; 2] {
        let (x, y) = (c[0], c[1]);
        let a = self.alpha;
        let g1 = (a + 1.0) * x.abs().powf(a - 1.0) * x / y.powf(a);
        let g2 = -a * x.abs().powf(a + 1.0) / y.powf(a + 1.0);
        [g1, g2]
    }
}

impl EnergyFunctional for SingularAlpha {
    fn kind(&self) -> &'static str {
        "singular_alpha"
    }

    fn space(&self) -> &Space {
        &self.space
    }

    fn value(&self, u: &SpaceVec) -> f64 {
        let c = u.coords();
        if c[1] > 0.0 {
            c[0].abs().powf(self.alpha + 1.0) / c[1].powf(self.alpha)
        } else if c[0] == 0.0 && c[1] == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn min_norm_grad(&self, u: &SpaceVec) -> Result<SpaceVec> {
        check_space(self, u)?;
        let c = u.coords();
        if c[1] > 0.0 {
            Ok(u.with_coords(self.grad_unchecked(c).to_vec()))
        } else if c[0] == 0.0 && c[1] == 0.0 {
            // 0 lies in dJ(0) because J >= 0 = J(0).
            Ok(u.with_coords(vec![0.0, 0.0]))
        } else {
            Err(Error::EmptySubdifferential)
        }
    }

    fn project_k(&self, _v: &SpaceVec, _tau: f64) -> Result<SpaceVec> {
        Err(Error::NoKRepresentation("singular_alpha"))
    }

    fn coercivity_beta(&self) -> Option<f64> {
        None
    }

    fn smooth_grad(&self, u: &SpaceVec) -> Result<SpaceVec> {
        check_space(self, u)?;
        if !self.in_smooth_region(u) {
            return Err(Error::NotSmoothHere("singular_alpha"));
        }
        Ok(u.with_coords(self.grad_unchecked(u.coords()).to_vec()))
    }

    fn in_smooth_region(&self, u: &SpaceVec) -> bool {
        u.coords()[1] > 0.0
    }

    fn conserved_quantity(&self, u: &SpaceVec) -> Option<f64> {
        Some(self.phi(u))
    }
}
