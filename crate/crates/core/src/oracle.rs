//! Closed-form reference solutions and first integrals.

use crate::energy::EnergyFunctional;
use crate::error::{Error, Result};
use crate::gsflow::GsTrajectory;
use crate::space::{sign0, SpaceVec};
use crate::tol;

/// `psi` with `d0 J(psi) = lambda psi`, scaled by `rho`.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub psi: SpaceVec,
    pub lambda: f64,
    pub rho: f64,
}

impl EigenPair {
    pub fn new(j: &dyn EnergyFunctional, psi: SpaceVec, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        let lambda = verify_eigenpair(j, &psi)?;
        if !(lambda > 0.0) {
            return Err(Error::NotEigenvector { residual: f64::INFINITY });
        }
        Ok(Self { psi, lambda, rho })
    }

    /// Jump time `1 / |lambda psi|` of the rate-independent solution.
    pub fn t_star(&self) -> f64 {
        1.0 / (self.lambda * self.psi.norm())
    }

    /// Extinction time `rho / lambda` of the gradient flow.
    pub fn s_extinct(&self) -> f64 {
        self.rho / self.lambda
    }

    pub fn gs(&self, s: f64) -> SpaceVec {
        eigen_gs(self, s)
    }

    pub fn eris(&self, t: f64) -> SpaceVec {
        eigen_eris(self, t)
    }

    /// The flow `max(rho - lambda s, 0) psi` as an exact trajectory.
    pub fn trajectory(&self) -> GsTrajectory {
        let v = self.psi.scale(-self.lambda);
        GsTrajectory::exact(
            vec![0.0, self.s_extinct()],
            vec![self.psi.scale(self.rho), self.psi.space().zeros()],
            vec![v],
            true,
        )
    }
}

/// `lambda = <g, psi> / |psi|^2` for `g = d0 J(psi)`, accepted iff
/// `|g - lambda psi| <= 1e-10 |g|`.
pub fn verify_eigenpair(j: &dyn EnergyFunctional, psi: &SpaceVec) -> Result<f64> {
    if psi.is_zero() {
        return Err(Error::InvalidParameter("eigenvector must be nonzero".into()));
    }
    let g = j.min_norm_grad(psi)?;
    let lambda = g.dot(psi) / psi.norm_sq();
    let residual = g.dist(&psi.scale(lambda));
    if residual <= tol::EIGEN_REL * g.norm() {
        Ok(lambda)
    } else {
        Err(Error::NotEigenvector { residual: residual / g.norm().max(f64::MIN_POSITIVE) })
    }
}

/// `max(rho - lambda s, 0) psi`.
pub fn eigen_gs(pair: &EigenPair, s: f64) -> SpaceVec {
    pair.psi.scale((pair.rho - pair.lambda * s).max(0.0))
}

/// `rho psi` on `[0, t*]`, zero afterwards (left-continuous at `t*`).
pub fn eigen_eris(pair: &EigenPair, t: f64) -> SpaceVec {
    if t <= pair.t_star() {
        pair.psi.scale(pair.rho)
    } else {
        pair.psi.space().zeros()
    }
}

/// Breakpoints of the max-abs flow from `u0`: the time the diagonal
/// `|u1| = 2|u2|` is reached and the extinction time `|u1| + |u2|/2`.
fn maxabs_phases(u0: &[f64]) -> (f64, f64) {
    let (a, b) = (u0[0].abs(), u0[1].abs());
    let diag = if a >= 2.0 * b { a - 2.0 * b } else { (2.0 * b - a) / 4.0 };
    (diag, a + b / 2.0)
}

/// Closed-form flow of `max(|u1|, 2|u2|)` from any `u0` in R^2.
///
/// Off the diagonal the dominant coordinate shrinks (`|u1|` at rate 1, or
/// `|u2|` at rate 2) until `|u1| = 2|u2|`; then `u = c(s)(2 sgn u1, sgn u2)`
/// with `c(s) = max(0, (2|u1| + |u2| - 2s) / 5)`.
pub fn exact_maxabs(u0: &SpaceVec, s: f64) -> SpaceVec {
    let c = u0.coords();
    let (a, b) = (c[0].abs(), c[1].abs());
    let (s1, second) = (sign0(c[0]), sign0(c[1]));
    let (diag, _) = maxabs_phases(c);
    if s < diag {
        return if a > 2.0 * b { u0.with_coords(vec![s1 * (a - s), c[1]]) } else { u0.with_coords(vec![c[0], second * (b - 2.0 * s)]) };
    }
    let level = ((2.0 * a + b - 2.0 * s) / 5.0).max(0.0);
    u0.with_coords(vec![s1 * 2.0 * level, second * level])
}

/// [`exact_maxabs`] as an exact trajectory.
pub fn exact_maxabs_trajectory(u0: &SpaceVec) -> GsTrajectory {
    let (diag, ext) = maxabs_phases(u0.coords());
    let mut times = vec![0.0];
    if diag > 0.0 {
        times.push(diag);
    }
    if ext > diag {
        times.push(ext);
    }
    piecewise_affine(&times, |s| exact_maxabs(u0, s))
}

/// Exact trajectory through the given breakpoints of a piecewise-affine
/// closed form that comes to rest at the last breakpoint.
fn piecewise_affine(times: &[f64], f: impl Fn(f64) -> SpaceVec) -> GsTrajectory {
    let values: Vec<SpaceVec> = times.iter().map(|&s| f(s)).collect();
    let velocities = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (&v[1] - &v[0]).scale(1.0 / (t[1] - t[0])))
        .collect();
    GsTrajectory::exact(times.to_vec(), values, velocities, true)
}

/// `sgn(u0_i) max(|u0_i| - a_i s, 0)`.
pub fn exact_weighted_l1(u0: &SpaceVec, a: &[f64], s: f64) -> SpaceVec {
    u0.with_coords(
        u0.coords()
            .iter()
            .zip(a)
            .map(|(&x, &ai)| {
                let y = sign0(x) * (x.abs() - ai * s).max(0.0);
                if y == 0.0 {
                    0.0
                } else {
                    y
                }
            })
            .collect(),
    )
}

/// [`exact_weighted_l1`] as an exact trajectory with a breakpoint at every
/// coordinate extinction. Coordinates with `a_i = 0` never move.
pub fn exact_weighted_l1_trajectory(u0: &SpaceVec, a: &[f64]) -> GsTrajectory {
    let mut times: Vec<f64> = u0
        .coords()
        .iter()
        .zip(a)
        .filter(|(x, ai)| **x != 0.0 && **ai > 0.0)
        .map(|(x, ai)| x.abs() / ai)
        .collect();
    times.push(0.0);
    times.sort_by(f64::total_cmp);
    times.dedup();
    piecewise_affine(&times, |s| exact_weighted_l1(u0, a, s))
}

/// `alpha/(alpha+1) u1^2 + u2^2`.
pub fn phi_alpha(u: &SpaceVec, alpha: f64) -> f64 {
    let c = u.coords();
    alpha / (alpha + 1.0) * c[0] * c[0] + c[1] * c[1]
}

/// Limit `(0, sqrt(Phi_alpha(u0)))` of the singular flow.
pub fn limit_singular(u0: &SpaceVec, alpha: f64) -> SpaceVec {
    u0.with_coords(vec![0.0, phi_alpha(u0, alpha).sqrt()])
}

/// `|u| + u1`.
pub fn m_invariant(u: &SpaceVec) -> f64 {
    u.norm() + u.coords()[0]
}

/// Limit `(M(u0)/2, 0)` of the degenerate flow.
pub fn limit_degenerate(u0: &SpaceVec) -> SpaceVec {
    u0.with_coords(vec![0.5 * m_invariant(u0), 0.0])
}

/// Flow from `(a, 0)`: `(min(a + 2s, 0), 0)` for `a < 0`, at rest otherwise.
pub fn exact_degenerate_axis(u0: &SpaceVec, s: f64) -> SpaceVec {
    let a = u0.coords()[0];
    if a < 0.0 {
        u0.with_coords(vec![(a + 2.0 * s).min(0.0), 0.0])
    } else {
        u0.with_coords(vec![a, 0.0])
    }
}

/// Distance of `u` from the parabola `u1 = (m^2 - u2^2) / (2m)`.
pub fn degenerate_orbit_residual(u: &SpaceVec, m: f64) -> f64 {
    let c = u.coords();
    (c[0] - (m * m - c[1] * c[1]) / (2.0 * m)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{MaxAbs2D, WeightedL1};
    use crate::space::Space;

    fn e2(x: f64, y: f64) -> SpaceVec {
        Space::euclidean(2).unwrap().vec(vec![x, y]).unwrap()
    }

    #[test]
    fn eigenpair_examples() {
        let j = MaxAbs2D::new();
        assert!((verify_eigenpair(&j, &e2(2.0, 1.0)).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(verify_eigenpair(&j, &e2(1.0, 0.0)).unwrap(), 1.0);
        assert!(matches!(verify_eigenpair(&j, &e2(1.0, 1.0)), Err(Error::NotEigenvector { .. })));
        let l1 = WeightedL1::unit(vec![1.0; 3]).unwrap();
        assert_eq!(verify_eigenpair(&l1, &l1.space().vec(vec![1.0, 0.0, 0.0]).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn eigen_formulas() {
        let pair = EigenPair::new(&MaxAbs2D::new(), e2(2.0, 1.0), 1.0).unwrap();
        let w = pair.gs(1.0);
        assert!((w.coords()[0] - 1.2).abs() < 1e-15 && (w.coords()[1] - 0.6).abs() < 1e-15);
        assert!(pair.gs(2.5).is_zero() && pair.gs(7.0).is_zero());
        let ts = 5f64.sqrt() / 2.0;
        assert!((pair.t_star() - ts).abs() < 1e-15);
        assert_eq!(pair.eris(pair.t_star()).coords(), &[2.0, 1.0]);
        assert!(pair.eris(pair.t_star() + 1e-12).is_zero());
    }

    #[test]
    fn maxabs_examples() {
        let u0 = e2(1.0, 0.25);
        let w = exact_maxabs(&u0, 0.75);
        assert!((w.coords()[0] - 0.3).abs() < 1e-15 && (w.coords()[1] - 0.15).abs() < 1e-15);
        assert!(exact_maxabs(&u0, 9.0 / 8.0).is_zero());
        assert!(exact_maxabs(&u0, 3.0).is_zero());
        let m = exact_maxabs(&e2(-1.0, 0.25), 0.75);
        assert_eq!(m.coords(), &[-w.coords()[0], w.coords()[1]]);
        let traj = exact_maxabs_trajectory(&u0);
        assert_eq!(traj.times(), &[0.0, 0.5, 1.125]);
    }

    #[test]
    fn weighted_l1_examples() {
        let s = Space::euclidean(2).unwrap();
        let u0 = s.vec(vec![1.0, -0.5]).unwrap();
        let w = exact_weighted_l1(&u0, &[1.0, 2.0], 0.3);
        assert!((w.coords()[0] - 0.7).abs() < 1e-15);
        assert_eq!(w.coords()[1], 0.0);
        assert_eq!(exact_weighted_l1(&u0, &[1.0, 2.0], 0.0), u0);
        assert!(exact_weighted_l1(&u0, &[1.0, 2.0], 1.0).is_zero());
    }

    #[test]
    fn invariant_examples() {
        assert!((phi_alpha(&e2(1.0, 1.0), 2.0) - 5.0 / 3.0).abs() < 1e-15);
        assert!((limit_singular(&e2(1.0, 1.0), 2.0).coords()[1] - (5f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(limit_singular(&e2(0.0, 3.0), 2.0).coords(), &[0.0, 3.0]);
        assert_eq!(m_invariant(&e2(0.0, 1.0)), 1.0);
        assert_eq!(limit_degenerate(&e2(0.0, 1.0)).coords(), &[0.5, 0.0]);
        assert_eq!(m_invariant(&e2(3.0, 0.0)), 6.0);
        assert_eq!(limit_degenerate(&e2(3.0, 0.0)).coords(), &[3.0, 0.0]);
        assert_eq!(exact_degenerate_axis(&e2(-1.0, 0.0), 0.25).coords(), &[-0.5, 0.0]);
        assert_eq!(exact_degenerate_axis(&e2(-1.0, 0.0), 0.5).coords(), &[0.0, 0.0]);
        assert_eq!(degenerate_orbit_residual(&e2(0.0, 1.0), 1.0), 0.0);
        assert_eq!(degenerate_orbit_residual(&e2(0.5, 1.0), 1.0), 0.5);
        assert_eq!(degenerate_orbit_residual(&e2(0.5, 0.0), 1.0), 0.0);
    }
}
