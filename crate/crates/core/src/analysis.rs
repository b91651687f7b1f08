//! Variances, least-squares fits of `σ²(t)` and distribution distances.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::trace::Distribution;

/// Allowed deviation of a distribution's total from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

fn check_normalized<T: Real>(p: &Distribution<T>) -> Result<()> {
    let total = p.total().as_f64();
    let tol = NORMALIZATION_TOLERANCE.max(1e3 * T::epsilon().as_f64());
    if (total - 1.0).abs() > tol {
        return Err(Error::Unnormalized { total });
    }
    Ok(())
}

/// `⟨s²⟩ − ⟨s⟩²` in sites.
pub fn raw_variance<T: Real>(p: &Distribution<T>) -> Result<T> {
    check_normalized(p)?;
    let mean = p.mean();
    Ok(p.iter().fold(T::zero(), |acc, (s, w)| {
        let x = T::from_offset(s) - mean;
        acc + w * x * x
    }))
}

/// Variance in double-site units `ŝ = (s − s₀)/2`.
pub fn scaled_variance<T: Real>(p: &Distribution<T>) -> Result<T> {
    Ok(raw_variance(p)? / T::lit(4.0))
}

/// `½ Σ |p − q|`.
pub fn total_variation<T: Real>(p: &Distribution<T>, q: &Distribution<T>) -> T {
    let lo = p.first().min(q.first());
    let hi = p.last().max(q.last());
    (lo..=hi).fold(T::zero(), |acc, s| acc + (p.get(s) - q.get(s)).abs()) / T::lit(2.0)
}

/// Inclusive range of abscissae used by a fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

impl FitWindow {
    pub fn new(start: f64, end: f64) -> Self {
        FitWindow { start, end }
    }

    pub fn all() -> Self {
        FitWindow { start: f64::NEG_INFINITY, end: f64::INFINITY }
    }

    /// Last half of the series, by abscissa.
    pub fn last_half(series: &[(f64, f64)]) -> Self {
        let end = series.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        FitWindow { start: end / 2.0, end }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start && x <= self.end
    }
}

impl std::str::FromStr for FitWindow {
    type Err = Error;

    /// `a:b`, either side may be empty for an open end.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("window `{s}` is not of the form a:b"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let parse = |v: &str, open: f64| -> Result<f64> {
            if v.trim().is_empty() {
                Ok(open)
            } else {
                v.trim().parse().map_err(|_| bad())
            }
        };
        let window = FitWindow { start: parse(a, f64::NEG_INFINITY)?, end: parse(b, f64::INFINITY)? };
        if window.start > window.end {
            return Err(bad());
        }
        Ok(window)
    }
}

/// Result of fitting `σ² = K₂t² + K₃t (+ K₀)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceFit {
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "K3")]
    pub k3: f64,
    #[serde(rename = "K0", skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    pub window: FitWindow,
    pub points: usize,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Straight line `σ² = slope·t + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: FitWindow,
    pub points: usize,
    pub residual: f64,
}

fn select(series: &[(f64, f64)], window: FitWindow, needed: usize) -> Result<Vec<(f64, f64)>> {
    let pts: Vec<_> = series.iter().copied().filter(|p| window.contains(p.0)).collect();
    if pts.len() < needed {
        return Err(Error::DegenerateWindow { points: pts.len(), needed });
    }
    Ok(pts)
}

/// Least squares on the given basis functions; returns coefficients and RMS residual.
fn least_squares(pts: &[(f64, f64)], basis: &[fn(f64) -> f64]) -> Result<(Vec<f64>, f64)> {
    let design = DMatrix::from_fn(pts.len(), basis.len(), |i, j| basis[j](pts[i].0));
    let rhs = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let svd = design.clone().svd(true, true);
    let smallest = svd.singular_values.min();
    if smallest <= 1e-12 * svd.singular_values.max() {
        return Err(Error::DegenerateWindow { points: pts.len(), needed: basis.len() });
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidConfig(e.to_owned()))?;
    let resid = &design * &coef - rhs;
    let rms = (resid.norm_squared() / pts.len() as f64).sqrt();
    Ok((coef.iter().copied().collect(), rms))
}

/// `σ² = K₂t² + K₃t` without a constant term.
pub fn fit_quadratic(series: &[(f64, f64)], window: FitWindow) -> Result<VarianceFit> {
    let pts = select(series, window, 3)?;
    let (c, residual) = least_squares(&pts, &[|t| t * t, |t| t])?;
    Ok(VarianceFit { k2: c[0], k3: c[1], offset: None, window, points: pts.len(), residual })
}

/// `σ² = K₂t² + K₃t + K₀`, for diagnostics.
pub fn fit_quadratic_with_offset(series: &[(f64, f64)], window: FitWindow) -> Result<VarianceFit> {
    let pts = select(series, window, 4)?;
    let (c, residual) = least_squares(&pts, &[|t| t * t, |t| t, |_| 1.0])?;
    Ok(VarianceFit { k2: c[0], k3: c[1], offset: Some(c[2]), window, points: pts.len(), residual })
}

pub fn fit_linear(series: &[(f64, f64)], window: FitWindow) -> Result<LinearFit> {
    let pts = select(series, window, 2)?;
    let (c, residual) = least_squares(&pts, &[|t| t, |_| 1.0])?;
    Ok(LinearFit { slope: c[0], intercept: c[1], window, points: pts.len(), residual })
}

/// Indices `i` where `σ²` drops by more than `tol` from `i−1` to `i`.
pub fn spreading_violations(series: &[(f64, f64)], tol: f64) -> Vec<usize> {
    series.windows(2).enumerate().filter(|(_, w)| w[1].1 < w[0].1 - tol).map(|(i, _)| i + 1).collect()
}
