//! Time reparametrizations between gradient flows and energetic
//! rate-independent evolutions.

mod construct;
mod reparam;

pub use construct::{
    build_s, build_s_hat, eris_to_gs, gs_to_eris, monotone_speed_profile, roundtrip_residual, sigma_hat, Direction,
};
pub use reparam::{isotonic_nonincreasing, MapKnot, Piece, ReparamMap, Side};

#[cfg(test)]
mod tests;
