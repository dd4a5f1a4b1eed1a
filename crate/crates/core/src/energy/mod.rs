//! One-homogeneous convex energies.
//!
//! Every energy implements [`EnergyFunctional`]. Only the projection onto
//! `K = dJ(0)` is implemented per functional; the proximal map follows from the
//! Moreau decomposition `prox_{tau J}(v) = v - P_{tau K}(v)`, which is exact
//! because `J` is the support function of `K`.
//!
//! Concrete energies are registered by name in a [`FunctionalRegistry`] and
//! built at runtime from a [`FunctionalDescriptor`].

mod degenerate;
mod maxabs;
mod registry;
mod singular;
mod tv_steps;
mod weighted_l1;

pub mod projection;

use std::fmt;

pub use degenerate::Degenerate2D;
pub use maxabs::MaxAbs2D;
pub use registry::{FunctionalConstructor, FunctionalDescriptor, FunctionalRegistry};
pub use singular::SingularAlpha;
pub use tv_steps::TvSteps;
pub use weighted_l1::WeightedL1;

use crate::error::{Error, Result};
use crate::space::{Space, SpaceVec};
use crate::tol;

pub trait EnergyFunctional: Send + Sync + fmt::Debug {
    /// Registry name of the functional.
    fn kind(&self) -> &'static str;

    fn space(&self) -> &Space;

    /// Value in `[0, inf]`; points outside the domain return `f64::INFINITY`.
    fn value(&self, u: &SpaceVec) -> f64;

    fn in_domain(&self, u: &SpaceVec) -> bool {
        self.value(u).is_finite()
    }

    /// The minimal-norm element of `dJ(u)` in gradient representation.
    fn min_norm_grad(&self, u: &SpaceVec) -> Result<SpaceVec>;

    /// Metric projection of `v` onto `tau * K`.
    fn project_k(&self, v: &SpaceVec, tau: f64) -> Result<SpaceVec>;

    fn prox(&self, v: &SpaceVec, tau: f64) -> Result<SpaceVec> {
        let p = self.project_k(v, tau)?;
        Ok(v - &p)
    }

    /// Largest `beta` with `J >= beta |.|`, if positive.
    fn coercivity_beta(&self) -> Option<f64>;

    /// Classical gradient on the smooth region.
    fn smooth_grad(&self, _u: &SpaceVec) -> Result<SpaceVec> {
        Err(Error::UnsupportedFunctional { functional: self.kind().into(), solver: "ode".into() })
    }

    /// Whether `u` lies in the open region where [`smooth_grad`](Self::smooth_grad) applies.
    fn in_smooth_region(&self, _u: &SpaceVec) -> bool {
        false
    }

    /// A first integral of the flow, if the functional has one.
    fn conserved_quantity(&self, _u: &SpaceVec) -> Option<f64> {
        None
    }

    /// Flow time for which the minimal selection at `u` stays constant when
    /// moving with `velocity = -min_norm_grad(u)`. `f64::INFINITY` when no
    /// further event occurs.
    fn next_event(&self, _u: &SpaceVec, _velocity: &SpaceVec) -> Result<f64> {
        Err(Error::UnsupportedFunctional { functional: self.kind().into(), solver: "exact".into() })
    }

    /// State after moving `ds` with constant `velocity`, snapped onto the
    /// event manifold when `ds` is the event time.
    fn land(&self, u: &SpaceVec, velocity: &SpaceVec, ds: f64) -> SpaceVec {
        u.axpy(ds, velocity)
    }
}

/// `|d0 J(u)| - 1/t`; `+inf` for an empty subdifferential, `-inf` at `t = 0`.
pub fn stability_excess(j: &dyn EnergyFunctional, u: &SpaceVec, t: f64) -> f64 {
    if t <= 0.0 {
        return f64::NEG_INFINITY;
    }
    match j.min_norm_grad(u) {
        Ok(g) => g.norm() - 1.0 / t,
        Err(_) => f64::INFINITY,
    }
}

/// Membership in the stability set `S(t) = { u : |d0 J(u)| <= 1/t }`.
pub fn is_stable(j: &dyn EnergyFunctional, u: &SpaceVec, t: f64) -> bool {
    is_stable_with(j, u, t, tol::STABILITY)
}

pub fn is_stable_with(j: &dyn EnergyFunctional, u: &SpaceVec, t: f64, slack: f64) -> bool {
    stability_excess(j, u, t) <= slack
}

/// `|<(v - p)/tau, p> - J(p)|` for `p = prox(v, tau)`.
pub fn prox_optimality_residual(j: &dyn EnergyFunctional, v: &SpaceVec, tau: f64, p: &SpaceVec) -> f64 {
    let eta = (v - p).scale(1.0 / tau);
    (eta.dot(p) - j.value(p)).abs()
}

pub(crate) fn check_space(j: &dyn EnergyFunctional, u: &SpaceVec) -> Result<()> {
    if u.dim() != j.space().dim() {
        return Err(Error::DimensionMismatch { expected: j.space().dim(), found: u.dim() });
    }
    if !u.space().same_as(j.space()) {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("prox parameter must be positive, got {tau}")))
    }
}
