//! Gradient flows of one-homogeneous convex energies, the equivalent
//! rate-independent evolutions, and the time reparametrizations linking them.

pub mod bridge;
pub mod energy;
pub mod eris;
pub mod error;
pub mod gsflow;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod space;
pub mod tol;

pub use error::{Error, Result};
pub use space::{Space, SpaceVec};
