//! Exact V² walk: the seven-band superoperator on the spatial density matrix.

use nalgebra::{Complex as NaComplex, DMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::{MomentFamily, MomentProvider, TwoStepPath};
use crate::scalar::{c_re, Real, C};
use crate::trace::{Distribution, WalkTrace};

/// Coin amplitudes `C_c^{ab} = ⟨c|P_a H P_b H|c₀⟩`, `c₀ = 0`, and their
/// `c`-summed pair products.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinCoefficients<T> {
    /// `amplitudes[c][path]`
    amplitudes: [[C<T>; 4]; 2],
    /// `products[x][y] = Σ_c C_c^x conj(C_c^y)`
    products: [[C<T>; 4]; 4],
}

type Mat2<T> = [[C<T>; 2]; 2];

fn mat_vec<T: Real>(m: &Mat2<T>, v: [C<T>; 2]) -> [C<T>; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

impl<T: Real> CoinCoefficients<T> {
    pub fn new() -> Self {
        let h = T::FRAC_1_SQRT_2();
        let hadamard: Mat2<T> = [[c_re(h), c_re(h)], [c_re(h), c_re(-h)]];
        let zero = c_re(T::zero());
        let one = c_re(T::one());
        let projector = |a: usize| -> Mat2<T> {
            let mut p = [[zero; 2]; 2];
            p[a][a] = one;
            p
        };
        let mut amplitudes = [[zero; 4]; 2];
        for path in TwoStepPath::ALL {
            let (a, b) = path.coin_labels();
            let mut v = [one, zero];
            for m in [&hadamard, &projector(b), &hadamard, &projector(a)] {
                v = mat_vec(m, v);
            }
            for (c, row) in amplitudes.iter_mut().enumerate() {
                row[path.index()] = v[c];
            }
        }
        let mut products = [[zero; 4]; 4];
        for x in 0..4 {
            for y in 0..4 {
                products[x][y] = amplitudes[0][x] * amplitudes[0][y].conj() + amplitudes[1][x] * amplitudes[1][y].conj();
            }
        }
        CoinCoefficients { amplitudes, products }
    }

    pub fn amplitude(&self, c: usize, path: TwoStepPath) -> C<T> {
        self.amplitudes[c][path.index()]
    }

    /// `Σ_c C_c^{forward} conj(C_c^{backward})`.
    pub fn pair(&self, forward: TwoStepPath, backward: TwoStepPath) -> C<T> {
        self.products[forward.index()][backward.index()]
    }

    /// Coin weight of a superoperator family.
    pub fn family(&self, family: MomentFamily) -> C<T> {
        let (fwd, back) = family.paths();
        self.pair(fwd, back)
    }
}

impl<T: Real> Default for CoinCoefficients<T> {
    fn default() -> Self {
        Self::new()
    }
}

fn tolerance<T: Real>(base: f64) -> f64 {
    base.max(1e4 * T::epsilon().as_f64())
}

/// Trace drift above which a step is rejected.
pub const TRACE_DRIFT_TOLERANCE: f64 = 1e-9;

/// Spatial density matrix stored on the square of offsets `[−R, R]` around
/// the origin `s₀`, where `R` is the support radius.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialDensityMatrix<T> {
    origin: i64,
    ring: Option<usize>,
    radius: usize,
    /// Row-major, `(u + R)·dim + (v + R)`.
    entries: Vec<C<T>>,
}

impl<T: Real> SpatialDensityMatrix<T> {
    /// `|s₀⟩⟨s₀|`, on the infinite line or on a ring of `n` sites.
    pub fn localized(origin: i64, ring: Option<usize>) -> Result<Self> {
        if let Some(n) = ring {
            if origin < 0 || origin as usize >= n {
                return Err(Error::SiteOutOfRange { site: origin.max(0) as usize, n });
            }
        }
        Ok(SpatialDensityMatrix { origin, ring, radius: 0, entries: vec![c_re(T::one())] })
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn ring(&self) -> Option<usize> {
        self.ring
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn dim(&self) -> usize {
        2 * self.radius + 1
    }

    /// Element at offsets `(u, v)` from the origin; zero outside the support.
    pub fn get(&self, u: i64, v: i64) -> C<T> {
        let r = self.radius as i64;
        if u.abs() > r || v.abs() > r {
            return c_re(T::zero());
        }
        self.entries[((u + r) as usize) * self.dim() + (v + r) as usize]
    }

    /// Element `⟨s|ρ|s′⟩` for ring sites `s, s′`, offsets taken as centered residues.
    pub fn element(&self, s: i64, s_prime: i64) -> C<T> {
        let centered = |x: i64| -> i64 {
            match self.ring {
                Some(n) => {
                    let n = n as i64;
                    let u = (x - self.origin).rem_euclid(n);
                    if u > n / 2 {
                        u - n
                    } else {
                        u
                    }
                }
                None => x - self.origin,
            }
        };
        self.get(centered(s), centered(s_prime))
    }

    pub fn trace(&self) -> C<T> {
        let dim = self.dim();
        (0..dim).fold(c_re(T::zero()), |acc, i| acc + self.entries[i * dim + i])
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> T {
        let dim = self.dim();
        let mut worst = T::zero();
        for i in 0..dim {
            for j in i..dim {
                worst = worst.max((self.entries[i * dim + j] - self.entries[j * dim + i].conj()).norm());
            }
        }
        worst
    }

    /// Real diagonal as a distribution over offsets.
    pub fn distribution(&self) -> Distribution<T> {
        let dim = self.dim();
        Distribution::new(-(self.radius as i64), (0..dim).map(|i| self.entries[i * dim + i].re).collect())
    }

    /// Dense double-precision copy of the stored block.
    pub fn to_matrix(&self) -> DMatrix<NaComplex<f64>> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |i, j| {
            let z = self.entries[i * dim + j];
            NaComplex::new(z.re.as_f64(), z.im.as_f64())
        })
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let herm = (&m + m.adjoint()) * NaComplex::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }

    /// One application of the superoperator, with the trace checked.
    pub fn apply_step<P: MomentProvider<T> + ?Sized>(&self, provider: &P, coins: &CoinCoefficients<T>) -> Result<Self> {
        let next = self.step_unchecked(provider, coins)?;
        check_trace(self, &next, 1)?;
        Ok(next)
    }

    fn step_unchecked<P: MomentProvider<T> + ?Sized>(&self, provider: &P, coins: &CoinCoefficients<T>) -> Result<Self> {
        let radius = self.radius + 2;
        let dim = 2 * radius + 1;
        if let Some(n) = self.ring {
            if dim > n {
                return Err(Error::RingTooSmall { n, min: dim });
            }
        }
        let terms: Vec<(MomentFamily, i64, i64, C<T>)> = MomentFamily::ALL
            .iter()
            .map(|&f| {
                let (x, y) = f.paths();
                (f, x.displacement(), y.displacement(), coins.family(f))
            })
            .filter(|t| t.3.norm() > T::zero())
            .collect();
        let r = radius as i64;
        let origin = self.origin;
        let mut entries = vec![c_re(T::zero()); dim * dim];
        // Gather: output (p, q) collects source (p − δx, q − δy) of every family.
        entries.par_chunks_mut(dim).enumerate().for_each(|(i, row)| {
            let p = i as i64 - r;
            for (j, out) in row.iter_mut().enumerate() {
                let q = j as i64 - r;
                let mut acc = c_re(T::zero());
                for &(family, dx, dy, coin) in &terms {
                    let (u, v) = (p - dx, q - dy);
                    let rho = self.get(u, v);
                    if rho.re != T::zero() || rho.im != T::zero() {
                        acc = acc + coin * provider.moment(family, origin + u, origin + v) * rho;
                    }
                }
                *out = acc;
            }
        });
        Ok(SpatialDensityMatrix { origin, ring: self.ring, radius, entries })
    }
}

fn check_trace<T: Real>(before: &SpatialDensityMatrix<T>, after: &SpatialDensityMatrix<T>, step: usize) -> Result<()> {
    let deviation = (after.trace() - before.trace()).norm().as_f64();
    if deviation.is_nan() || deviation > tolerance::<T>(TRACE_DRIFT_TOLERANCE) {
        return Err(Error::TraceDrift { step, deviation });
    }
    Ok(())
}

/// Stepwise exact walk from `|s₀⟩⟨s₀|`.
pub struct ExactWalk<'a, T, P: ?Sized> {
    state: SpatialDensityMatrix<T>,
    provider: &'a P,
    coins: CoinCoefficients<T>,
    t: usize,
}

impl<'a, T: Real, P: MomentProvider<T> + ?Sized> ExactWalk<'a, T, P> {
    pub fn new(origin: i64, provider: &'a P, ring: Option<usize>) -> Result<Self> {
        Ok(ExactWalk { state: SpatialDensityMatrix::localized(origin, ring)?, provider, coins: CoinCoefficients::new(), t: 0 })
    }

    pub fn state(&self) -> &SpatialDensityMatrix<T> {
        &self.state
    }

    pub fn iterations(&self) -> usize {
        self.t
    }

    pub fn step(&mut self) -> Result<&SpatialDensityMatrix<T>> {
        let next = self.state.step_unchecked(self.provider, &self.coins)?;
        check_trace(&self.state, &next, self.t + 1)?;
        self.state = next;
        self.t += 1;
        Ok(&self.state)
    }
}

/// Iterates the superoperator `steps` times from `|s₀⟩⟨s₀|`, recording every iteration.
///
/// On a ring of `n` sites the support must never wrap: `n ≥ 4·steps + 1`.
pub fn evolve<T: Real, P: MomentProvider<T> + ?Sized>(
    origin: i64,
    steps: usize,
    provider: &P,
    ring: Option<usize>,
) -> Result<WalkTrace<T>> {
    if let Some(n) = ring {
        let min = 4 * steps + 1;
        if n < min {
            return Err(Error::RingTooSmall { n, min });
        }
    }
    let mut walk = ExactWalk::new(origin, provider, ring)?;
    let mut trace = WalkTrace::new(origin, ring);
    trace.push(0, walk.state().distribution())?;
    for t in 1..=steps {
        let state = walk.step()?;
        trace.push(t, state.distribution())?;
    }
    Ok(trace)
}
