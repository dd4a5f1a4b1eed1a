//! Numerical tolerances shared across modules.
//!
//! Every pass/fail comparison in the library reads its threshold from here
//! (or from an explicitly passed override), so reports can echo the value used.

/// Absolute slack on the dual-norm comparison `|d0 J(u)| <= 1/t`.
pub const STABILITY: f64 = 1e-9;

/// Relative band around `|u1| = 2|u2|` treated as the diagonal of the
/// max-abs functional.
pub const DIAGONAL_REL: f64 = 1e-9;

/// Absolute tolerance on event times in flow time `s`.
pub const EVENT_TIME: f64 = 1e-12;

/// Cap on the number of events in the exact solver.
pub const MAX_EVENTS: usize = 1_000_000;

/// Bisection tolerance for the incremental step.
pub const INCREMENTAL_BISECTION: f64 = 1e-11;

/// KKT residual target for the iterative projection onto `K`.
pub const KKT: f64 = 1e-10;

/// Iteration cap for the iterative projection onto `K`.
pub const KKT_MAX_ITER: usize = 1_000_000;

/// Residual accepted for the prox optimality identity `<(v - p)/tau, p> = J(p)`.
pub const PROX_OPTIMALITY: f64 = 1e-9;

/// Eigenpair acceptance: `|g - lambda psi| <= EIGEN_REL * |g|`.
pub const EIGEN_REL: f64 = 1e-10;

/// Guard band excluded around jump times when comparing paths.
pub const JUMP_GUARD: f64 = 1e-9;

/// Relative tolerance for merging equal consecutive speeds.
pub const SPEED_MERGE_REL: f64 = 1e-12;

/// Relative change of a conserved quantity that triggers step halving in the
/// ODE integrator.
pub const ODE_INVARIANT_REL: f64 = 1e-8;

/// Maximum number of step halvings in the ODE integrator.
pub const ODE_MAX_HALVINGS: u32 = 20;

/// Start-up regularization for initial values with infinite energy.
pub const STARTUP_EPSILON: f64 = 1e-6;
