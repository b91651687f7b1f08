//! Circulant approximation of the walk: ring-averaged Kraus generators,
//! diagonal in the Fourier basis, and the closed-form Ising distribution.
//!
//! With `|r̂⟩ = N^{−1/2} Σ_s ω^{rs} |s⟩` every shift is diagonal, so one
//! iteration multiplies `ρ̂(r, l)` by
//!
//! `G(r, l) = Σ_xy μ_xy ω^{−rδx} ω^{lδy} / √(ν(r) ν(l))`,
//!
//! where `ν(r) = G`'s numerator at `l = r` is the spectrum of `M = Σ E†E`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::AnyonModel;
use crate::moments::{Band, BandWeights, MomentMode, MIN_AVERAGING_RING};
use crate::scalar::{c_re, expi_pi, Real, C};
use crate::trace::{Distribution, WalkTrace};

/// `min ν` below which the normalization is treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-9;

/// Regularization suggested when `ν` is singular.
pub const DEFAULT_REGULARIZATION: f64 = 1e-8;

/// One-iteration Fourier multiplier of the circulant map on `Z_N`.
#[derive(Clone, Debug)]
pub struct FourierFactor<T> {
    n: usize,
    weights: BandWeights<T>,
    /// `ω^k` for `k ∈ [0, N)`
    roots: Vec<C<T>>,
    nu: Vec<T>,
    regularization: T,
}

impl<T: Real> FourierFactor<T> {
    /// Factor for arbitrary band weights; `regularization` is added to `ν`.
    pub fn from_weights(n: usize, weights: BandWeights<T>, regularization: Option<T>) -> Result<Self> {
        if n < MIN_AVERAGING_RING {
            return Err(Error::RingTooSmall { n, min: MIN_AVERAGING_RING });
        }
        let roots: Vec<C<T>> = (0..n as i64).map(|k| expi_pi(2 * k, n as i64)).collect();
        let mut factor = FourierFactor { n, weights, roots, nu: Vec::new(), regularization: T::zero() };
        let nu: Vec<T> = (0..n).map(|r| factor.numerator(r, r).re).collect();
        if let Some((mode, &value)) = nu.iter().enumerate().min_by(|a, b| a.1.partial_cmp(b.1).expect("finite ν")) {
            if regularization.is_none() && value.as_f64() < SINGULAR_THRESHOLD {
                return Err(Error::SingularNormalization { mode, value: value.as_f64() });
            }
        }
        let eps = regularization.unwrap_or_else(T::zero);
        if eps < T::zero() {
            return Err(Error::InvalidConfig("regularization must be nonnegative".into()));
        }
        factor.nu = nu.into_iter().map(|v| v + eps).collect();
        if let Some(mode) = factor.nu.iter().position(|&v| v <= T::zero()) {
            return Err(Error::SingularNormalization { mode, value: factor.nu[mode].as_f64() });
        }
        factor.regularization = eps;
        Ok(factor)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &BandWeights<T> {
        &self.weights
    }

    pub fn regularization(&self) -> T {
        self.regularization
    }

    fn root(&self, k: i64) -> C<T> {
        self.roots[k.rem_euclid(self.n as i64) as usize]
    }

    fn numerator(&self, r: usize, l: usize) -> C<T> {
        let (r, l) = (r as i64, l as i64);
        let mut acc = c_re(T::zero());
        for x in Band::ALL {
            for y in Band::ALL {
                acc = acc + self.weights.get(x, y) * self.root(-r * x.shift() + l * y.shift());
            }
        }
        acc
    }

    /// Fourier eigenvalue `ν(m)` of `M`, including any regularization.
    pub fn nu(&self, m: usize) -> T {
        self.nu[m % self.n]
    }

    pub fn g(&self, r: usize, l: usize) -> C<T> {
        self.numerator(r % self.n, l % self.n) / (self.nu(r) * self.nu(l)).sqrt()
    }
}

/// Builds the factor from the model's table moments.
pub fn build_fourier_factor<T: Real>(
    model: &AnyonModel<T>,
    n: usize,
    mode: MomentMode,
    regularization: Option<T>,
) -> Result<FourierFactor<T>> {
    if let MomentMode::FiniteN(m) = mode {
        if m != n {
            return Err(Error::InvalidConfig(format!("moments averaged over {m} sites but the ring has {n}")));
        }
    }
    FourierFactor::from_weights(n, BandWeights::new(model, mode)?, regularization)
}

/// Propagates `|s₀⟩⟨s₀|` for `steps` iterations and records the site distributions.
///
/// Offsets are centered residues on the ring. With a nonzero regularization the
/// map loses trace, and each distribution is renormalized.
pub fn evolve_circulant<T: Real>(origin: i64, steps: usize, factor: &FourierFactor<T>) -> Result<WalkTrace<T>> {
    let n = factor.n;
    let g: Vec<C<T>> = (0..n * n).into_par_iter().map(|i| factor.g(i / n, i % n)).collect();
    let mut power = vec![c_re(T::one()); n * n];
    let mut trace = WalkTrace::new(origin, Some(n));
    let renormalize = factor.regularization > T::zero();
    let lo = -((n as i64 - 1) / 2);
    for t in 0..=steps {
        if t > 0 {
            power.par_iter_mut().zip(g.par_iter()).for_each(|(p, &gi)| *p = *p * gi);
        }
        // A(Δ) = Σ_r G(r, r − Δ)^t
        let sums: Vec<C<T>> = (0..n)
            .into_par_iter()
            .map(|delta| {
                (0..n).fold(c_re(T::zero()), |acc, r| acc + power[r * n + (r + n - delta) % n])
            })
            .collect();
        let scale = T::from_count(n * n);
        let mut probs: Vec<T> = (lo..lo + n as i64)
            .into_par_iter()
            .map(|u| {
                let total = (0..n).fold(c_re(T::zero()), |acc, delta| acc + factor.root(u * delta as i64) * sums[delta]);
                total.re / scale
            })
            .collect();
        if renormalize {
            let total = probs.iter().fold(T::zero(), |a, &p| a + p);
            probs.iter_mut().for_each(|p| *p = *p / total);
        }
        trace.push(t, Distribution::new(lo, probs))?;
    }
    Ok(trace)
}

/// `2^{−t} C(t, j)` without overflow.
fn half_binomial<T: Real>(t: u64, j: u64) -> T {
    let j = j.min(t - j);
    let half = T::lit(0.5);
    let mut value = T::one();
    let mut halvings = 0;
    for i in 1..=j {
        value = value * T::from_u64(t - j + i).expect("count") / T::from_u64(i).expect("count");
        while value > T::one() && halvings < t {
            value = value * half;
            halvings += 1;
        }
    }
    value * half.powi((t - halvings) as i32)
}

/// Ising walk probability `2^{−t} C(t, (2t − (s − s₀))/4)`, zero off the lattice.
pub fn ising_closed_form<T: Real>(s: i64, t: usize, origin: i64) -> T {
    let t = t as i64;
    let num = 2 * t - (s - origin);
    if num % 4 != 0 || num < 0 || num / 4 > t {
        return T::zero();
    }
    half_binomial(t as u64, (num / 4) as u64)
}

/// Full closed-form distribution at iteration `t`, over offsets `[−2t, 2t]`.
pub fn ising_distribution<T: Real>(t: usize) -> Distribution<T> {
    let r = 2 * t as i64;
    Distribution::new(-r, (-r..=r).map(|u| ising_closed_form(u, t, 0)).collect())
}

/// Explicit `N × N` construction of the circulant map, for cross-checking the
/// Fourier path on small rings.
pub mod dense {
    use nalgebra::{Complex, DMatrix};

    use super::*;

    pub type CMat = DMatrix<Complex<f64>>;

    fn to_f64<T: Real>(z: C<T>) -> Complex<f64> {
        Complex::new(z.re.as_f64(), z.im.as_f64())
    }

    /// `ĥ = Σ_s |s⟩⟨s+1|`, which `F` maps to `diag(ω^r)`.
    pub fn hop(n: usize) -> CMat {
        CMat::from_fn(n, n, |i, j| if j == (i + 1) % n { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) })
    }

    /// Shift by `δ` sites: `|s⟩ → |s+δ⟩`.
    pub fn shift(n: usize, delta: i64) -> CMat {
        CMat::from_fn(n, n, |i, j| {
            if (j as i64 + delta).rem_euclid(n as i64) as usize == i {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    /// `F_{s r} = ω^{rs} / √N`.
    pub fn fourier(n: usize) -> CMat {
        let norm = (n as f64).sqrt();
        CMat::from_fn(n, n, |s, r| expi_pi::<f64>(2 * (r * s % n) as i64, n as i64) / norm)
    }

    /// `M = Σ_xy μ_xy S_y† S_x`.
    pub fn normalization_matrix<T: Real>(n: usize, weights: &BandWeights<T>) -> CMat {
        let mut m = CMat::zeros(n, n);
        for x in Band::ALL {
            for y in Band::ALL {
                m += (shift(n, y.shift()).adjoint() * shift(n, x.shift())) * to_f64(weights.get(x, y));
            }
        }
        m
    }

    /// `Λ = F (F† M F)^{−1/2} F†`, using that `F† M F` is diagonal.
    pub fn lambda_fourier(m: &CMat) -> CMat {
        let n = m.nrows();
        let f = fourier(n);
        let diag = f.adjoint() * m * &f;
        let inv_sqrt = CMat::from_fn(n, n, |i, j| if i == j { Complex::new(1.0 / diag[(i, i)].re.sqrt(), 0.0) } else { Complex::new(0.0, 0.0) });
        &f * inv_sqrt * f.adjoint()
    }

    /// `Λ = M^{−1/2}` from the Hermitian eigendecomposition.
    pub fn lambda_eigen(m: &CMat) -> CMat {
        let eig = m.clone().symmetric_eigen();
        let inv_sqrt = CMat::from_diagonal(&eig.eigenvalues.map(|v| Complex::new(1.0 / v.sqrt(), 0.0)));
        &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint()
    }

    /// `ρ → Λ (Σ_xy μ_xy S_x ρ S_y†) Λ`.
    pub fn step<T: Real>(rho: &CMat, weights: &BandWeights<T>, lambda: &CMat) -> CMat {
        let n = rho.nrows();
        let mut out = CMat::zeros(n, n);
        for x in Band::ALL {
            for y in Band::ALL {
                let w = to_f64(weights.get(x, y));
                if w.norm() > 0.0 {
                    out += shift(n, x.shift()) * rho * shift(n, y.shift()).adjoint() * w;
                }
            }
        }
        lambda * out * lambda
    }

    /// Frobenius norm of `Λ²M − I`.
    pub fn normalization_defect(lambda: &CMat, m: &CMat) -> f64 {
        let n = m.nrows();
        (lambda * lambda * m - CMat::identity(n, n)).norm()
    }
}
