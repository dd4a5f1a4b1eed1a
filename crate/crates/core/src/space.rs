//! Finite-dimensional Hilbert space with a diagonal metric.
//!
//! A [`Space`] carries the metric weights `d_i`; the inner product is
//! `<a, b> = sum_i d_i a_i b_i`. Subgradients are stored in gradient
//! representation, so the dual norm of a subgradient equals [`SpaceVec::norm`]
//! of the stored vector.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Weights below this value are rejected at construction.
pub const MIN_WEIGHT: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct Space {
    weights: Arc<[f64]>,
}

impl Space {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("space dimension must be at least 1".into()));
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if w < MIN_WEIGHT {
                return Err(Error::DegenerateWeight { index, value: w });
            }
        }
        Ok(Self { weights: weights.into() })
    }

    /// Euclidean space of dimension `dim`.
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn same_as(&self, other: &Space) -> bool {
        Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights
    }

    pub fn vec(&self, coords: Vec<f64>) -> Result<SpaceVec> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coords.len() });
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(SpaceVec { space: self.clone(), coords })
    }

    pub fn zeros(&self) -> SpaceVec {
        SpaceVec { space: self.clone(), coords: vec![0.0; self.dim()] }
    }
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Space").field("weights", &&self.weights[..]).finish()
    }
}

#[derive(Clone)]
pub struct SpaceVec {
    space: Space,
    coords: Vec<f64>,
}

impl SpaceVec {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    /// Builds a vector in the same space from raw coordinates.
    ///
    /// Panics if the length does not match; finiteness is not checked.
    pub fn with_coords(&self, coords: Vec<f64>) -> SpaceVec {
        assert_eq!(coords.len(), self.dim(), "coordinate length mismatch");
        SpaceVec { space: self.space.clone(), coords }
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> SpaceVec {
        self.with_coords(self.coords.iter().copied().map(f).collect())
    }

    pub fn zip_map(&self, other: &SpaceVec, mut f: impl FnMut(f64, f64) -> f64) -> SpaceVec {
        self.assert_same(other);
        self.with_coords(self.coords.iter().zip(&other.coords).map(|(&a, &b)| f(a, b)).collect())
    }

    fn assert_same(&self, other: &SpaceVec) {
        assert!(self.space.same_as(&other.space), "vectors belong to different spaces");
    }

    /// Metric inner product; panics on a space mismatch. See [`inner`] for the
    /// checked variant.
    pub fn dot(&self, other: &SpaceVec) -> f64 {
        self.assert_same(other);
        self.space
            .weights
            .iter()
            .zip(self.coords.iter().zip(&other.coords))
            .map(|(d, (a, b))| d * a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &SpaceVec) -> f64 {
        (self - other).norm()
    }

    pub fn scale(&self, factor: f64) -> SpaceVec {
        self.map(|c| c * factor)
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: f64, other: &SpaceVec) -> SpaceVec {
        self.zip_map(other, |a, b| a + factor * b)
    }

    /// `(1 - theta) * self + theta * other`
    pub fn lerp(&self, other: &SpaceVec, theta: f64) -> SpaceVec {
        self.zip_map(other, |a, b| (1.0 - theta) * a + theta * b)
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &SpaceVec) -> f64 {
        self.assert_same(other);
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for SpaceVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpaceVec{:?}", self.coords)
    }
}

impl PartialEq for SpaceVec {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && self.coords == other.coords
    }
}

impl<'a> Add<&'a SpaceVec> for &'a SpaceVec {
    type Output = SpaceVec;
    fn add(self, rhs: &'a SpaceVec) -> SpaceVec {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a SpaceVec> for &'a SpaceVec {
    type Output = SpaceVec;
    fn sub(self, rhs: &'a SpaceVec) -> SpaceVec {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &SpaceVec {
    type Output = SpaceVec;
    fn mul(self, rhs: f64) -> SpaceVec {
        self.scale(rhs)
    }
}

impl Neg for &SpaceVec {
    type Output = SpaceVec;
    fn neg(self) -> SpaceVec {
        self.map(|c| -c)
    }
}

/// Checked metric inner product.
pub fn inner(a: &SpaceVec, b: &SpaceVec) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    if !a.space.same_as(&b.space) {
        return Err(Error::SpaceMismatch);
    }
    Ok(a.dot(b))
}

pub fn norm(a: &SpaceVec) -> f64 {
    a.norm()
}

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

/// Set-valued sign: `{1}`, `{-1}`, or `[-1, 1]` at zero.
pub fn sign_interval(x: f64) -> Interval {
    if x > 0.0 {
        Interval { lo: 1.0, hi: 1.0 }
    } else if x < 0.0 {
        Interval { lo: -1.0, hi: -1.0 }
    } else {
        Interval { lo: -1.0, hi: 1.0 }
    }
}

/// Single-valued sign with `sign(0) = 0` (the minimal selection of `Sign`).
pub fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
