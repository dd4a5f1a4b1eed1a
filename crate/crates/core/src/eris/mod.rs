//! The rate-independent system `0 in dR(u') + t dJ(u)` with `R = |.|`, in
//! process time `t`, and its energetic solutions.

mod radial;
mod path;
mod solve;
mod validate;

pub use radial::{RadialExample, RadialGrid, RadialProfile};
pub use path::{ErisPath, Interpolation, Jump, Knot};
pub use solve::{
    candidate_jumps, check_incremental_monotonicity, incremental_iterates, incremental_step, solve_incremental, variational_interpolant,
};
pub use validate::{
    check_decay_lemma, check_energetic, check_jump_relations, check_weighted_balance, EnergeticReport, JumpReport,
};
