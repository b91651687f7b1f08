//! Site distributions and per-iteration walk records.

use serde::Serialize;

use crate::analysis;
use crate::error::Result;
use crate::scalar::Real;

/// Probability distribution over consecutive site offsets `first, first+1, …`
/// relative to the walk origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution<T> {
    first: i64,
    probs: Vec<T>,
}

impl<T: Real> Distribution<T> {
    pub fn new(first: i64, probs: Vec<T>) -> Self {
        Distribution { first, probs }
    }

    pub fn point_mass() -> Self {
        Distribution { first: 0, probs: vec![T::one()] }
    }

    /// Builds a distribution from `(offset, probability)` pairs; gaps are zero.
    pub fn from_pairs(pairs: &[(i64, T)]) -> Self {
        let Some(lo) = pairs.iter().map(|p| p.0).min() else {
            return Distribution { first: 0, probs: Vec::new() };
        };
        let hi = pairs.iter().map(|p| p.0).max().unwrap_or(lo);
        let mut probs = vec![T::zero(); (hi - lo + 1) as usize];
        for &(s, p) in pairs {
            probs[(s - lo) as usize] = probs[(s - lo) as usize] + p;
        }
        Distribution { first: lo, probs }
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn last(&self) -> i64 {
        self.first + self.probs.len() as i64 - 1
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability at `offset`, zero outside the stored range.
    pub fn get(&self, offset: i64) -> T {
        let i = offset - self.first;
        if i < 0 || i as usize >= self.probs.len() {
            T::zero()
        } else {
            self.probs[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.first + i as i64, p))
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |acc, &p| acc + p)
    }

    pub fn mean(&self) -> T {
        self.iter().fold(T::zero(), |acc, (s, p)| acc + T::from_offset(s) * p)
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Distribution<U> {
        Distribution { first: self.first, probs: self.probs.iter().map(|&p| f(p)).collect() }
    }

    /// Largest `|p(s) − p(−s)|`.
    pub fn asymmetry(&self) -> T {
        let reach = self.first.abs().max(self.last().abs());
        (0..=reach).fold(T::zero(), |acc, s| acc.max((self.get(s) - self.get(-s)).abs()))
    }
}

/// One recorded iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracePoint<T> {
    /// Superoperator iterations (two walk steps each).
    pub t: usize,
    pub distribution: Distribution<T>,
    /// Variance in sites.
    pub sigma2_raw: T,
    /// Variance in double-site units `ŝ = (s − s₀)/2`, i.e. raw/4.
    pub sigma2_scaled: T,
}

/// Distributions and variances for `t = 0, 1, …`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkTrace<T> {
    pub origin: i64,
    pub ring: Option<usize>,
    pub points: Vec<TracePoint<T>>,
}

impl<T: Real> WalkTrace<T> {
    pub fn new(origin: i64, ring: Option<usize>) -> Self {
        WalkTrace { origin, ring, points: Vec::new() }
    }

    pub fn push(&mut self, t: usize, distribution: Distribution<T>) -> Result<()> {
        let sigma2_raw = analysis::raw_variance(&distribution)?;
        self.points.push(TracePoint { t, distribution, sigma2_raw, sigma2_scaled: sigma2_raw / T::lit(4.0) });
        Ok(())
    }

    pub fn last(&self) -> Option<&TracePoint<T>> {
        self.points.last()
    }

    pub fn at(&self, t: usize) -> Option<&TracePoint<T>> {
        self.points.iter().find(|p| p.t == t)
    }

    /// `(walk steps τ = 2t, raw variance)`: the axes on which the V² walk is
    /// compared with ordinary walks.
    pub fn figure_series(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (2.0 * p.t as f64, p.sigma2_raw.as_f64())).collect()
    }

    /// `(iterations t, scaled variance)`.
    pub fn scaled_series(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.t as f64, p.sigma2_scaled.as_f64())).collect()
    }

    /// `(iterations t, raw variance)`.
    pub fn raw_series(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.t as f64, p.sigma2_raw.as_f64())).collect()
    }
}
