use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Degenerate2D, EnergyFunctional, MaxAbs2D, SingularAlpha, TvSteps, WeightedL1};
use crate::error::{Error, Result};
use crate::space::Space;

/// Tagged description of a functional: `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalDescriptor {
    pub kind: String,
    #[serde(default)]
    pub params: Value,
}

impl FunctionalDescriptor {
    pub fn new(kind: impl Into<String>, params: Value) -> Self {
        Self { kind: kind.into(), params }
    }
}

pub type FunctionalConstructor = fn(&Value) -> Result<Arc<dyn EnergyFunctional>>;

/// Name-indexed table of functional constructors.
#[derive(Clone)]
pub struct FunctionalRegistry {
    entries: BTreeMap<String, FunctionalConstructor>,
}

impl FunctionalRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &str, ctor: FunctionalConstructor) {
        self.entries.insert(name.to_string(), ctor);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn build(&self, desc: &FunctionalDescriptor) -> Result<Arc<dyn EnergyFunctional>> {
        let ctor = self
            .entries
            .get(&desc.kind)
            .ok_or_else(|| Error::UnknownName { what: "functional", name: desc.kind.clone() })?;
        ctor(&desc.params)
    }
}

impl Default for FunctionalRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("maxabs2d", |_| Ok(Arc::new(MaxAbs2D::new())));
        r.register("degenerate2d", |_| Ok(Arc::new(Degenerate2D::new())));
        r.register("singular_alpha", |p| Ok(Arc::new(SingularAlpha::new(number(p, "alpha")?)?)));
        r.register("weighted_l1", |p| {
            let a = numbers(p, "a")?;
            let space = match p.get("weights") {
                Some(_) => Space::new(numbers(p, "weights")?)?,
                None => Space::euclidean(a.len())?,
            };
            Ok(Arc::new(WeightedL1::new(space, a)?))
        });
        r.register("tv_steps", |p| Ok(Arc::new(TvSteps::new(numbers(p, "breakpoints")?)?)));
        r
    }
}

fn number(p: &Value, key: &str) -> Result<f64> {
    p.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::InvalidParameter(format!("missing numeric parameter `{key}`")))
}

fn numbers(p: &Value, key: &str) -> Result<Vec<f64>> {
    let arr = p
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidParameter(format!("missing array parameter `{key}`")))?;
    arr.iter()
        .map(|x| x.as_f64().ok_or_else(|| Error::InvalidParameter(format!("non-numeric entry in `{key}`"))))
        .collect()
}
