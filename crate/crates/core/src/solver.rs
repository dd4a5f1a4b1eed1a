//! Name-indexed solvers behind a common interface.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::energy::EnergyFunctional;
use crate::eris::{solve_incremental, ErisPath};
use crate::error::{Error, Result};
use crate::gsflow::{solve_exact, solve_ode, solve_prox, GsTrajectory};
use crate::space::SpaceVec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Step size; required by the time-stepping solvers.
    pub h: Option<f64>,
    /// Final flow time `s` for gradient-flow solvers, final process time `t`
    /// for the incremental solver.
    pub horizon: f64,
}

#[derive(Debug, Clone)]
pub enum Solution {
    Gs(GsTrajectory),
    Eris(ErisPath),
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, j: &dyn EnergyFunctional, u0: &SpaceVec, params: &SolverParams) -> Result<Solution>;
}

fn step(params: &SolverParams, solver: &str) -> Result<f64> {
    params.h.ok_or_else(|| Error::InvalidParameter(format!("solver `{solver}` needs a step size h")))
}

struct Exact;
struct Prox;
struct Ode;
struct ErisIncremental;

impl Solver for Exact {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn solve(&self, j: &dyn EnergyFunctional, u0: &SpaceVec, params: &SolverParams) -> Result<Solution> {
        Ok(Solution::Gs(solve_exact(j, u0, params.horizon)?))
    }
}

impl Solver for Prox {
    fn name(&self) -> &'static str {
        "prox"
    }

    fn solve(&self, j: &dyn EnergyFunctional, u0: &SpaceVec, params: &SolverParams) -> Result<Solution> {
        Ok(Solution::Gs(solve_prox(j, u0, step(params, self.name())?, params.horizon)?))
    }
}

impl Solver for Ode {
    fn name(&self) -> &'static str {
        "ode"
    }

    fn solve(&self, j: &dyn EnergyFunctional, u0: &SpaceVec, params: &SolverParams) -> Result<Solution> {
        Ok(Solution::Gs(solve_ode(j, u0, step(params, self.name())?, params.horizon)?))
    }
}

impl Solver for ErisIncremental {
    fn name(&self) -> &'static str {
        "eris_incremental"
    }

    fn solve(&self, j: &dyn EnergyFunctional, u0: &SpaceVec, params: &SolverParams) -> Result<Solution> {
        Ok(Solution::Eris(solve_incremental(j, u0, step(params, self.name())?, params.horizon)?))
    }
}

#[derive(Clone)]
pub struct SolverRegistry {
    entries: BTreeMap<String, Arc<dyn Solver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn register(&mut self, solver: Arc<dyn Solver>) {
        self.entries.insert(solver.name().to_string(), solver);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Solver>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownName { what: "solver", name: name.to_string() })
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Exact));
        r.register(Arc::new(Prox));
        r.register(Arc::new(Ode));
        r.register(Arc::new(ErisIncremental));
        r
    }
}
