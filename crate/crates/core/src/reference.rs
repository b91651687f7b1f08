//! Baseline walks: classical random walk, coherent Hadamard walk, the V² walk
//! with trivial statistics, and the V² walk over random Abelian fillings.

use rand::distr::{Bernoulli, Distribution as _};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::evolve;
use crate::moments::{AbelianPhaseProvider, UnitProvider};
use crate::scalar::{c_re, Real, C};
use crate::trace::{Distribution, WalkTrace};

/// Unbiased ±1 random walk after `steps` steps.
pub fn classical_rw<T: Real>(steps: usize) -> Distribution<T> {
    let mut probs = vec![T::one()];
    let half = T::lit(0.5);
    for _ in 0..steps {
        let mut next = vec![T::zero(); probs.len() + 1];
        for (i, &p) in probs.iter().enumerate() {
            next[i] = next[i] + p * half;
            next[i + 1] = next[i + 1] + p * half;
        }
        probs = next;
    }
    // Entry j sits at 2j − steps; expand onto every site.
    let mut sites = vec![T::zero(); 2 * steps + 1];
    for (j, p) in probs.into_iter().enumerate() {
        sites[2 * j] = p;
    }
    Distribution::new(-(steps as i64), sites)
}

/// Coined Hadamard walk on the line from `|0⟩ ⊗ |c=0⟩`: each step applies `H`
/// to the coin and then moves coin `0` left and coin `1` right.
/// Returns the distribution after every step `0..=steps`.
pub fn coherent_hadamard_qw<T: Real>(steps: usize) -> Vec<Distribution<T>> {
    let h = T::FRAC_1_SQRT_2();
    let width = 2 * steps + 1;
    let zero = c_re(T::zero());
    // amps[site][coin], site index = offset + steps
    let mut amps = vec![[zero; 2]; width];
    amps[steps][0] = c_re(T::one());
    let mut out = Vec::with_capacity(steps + 1);
    let record = |amps: &[[C<T>; 2]]| {
        Distribution::new(-(steps as i64), amps.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).collect())
    };
    out.push(record(&amps));
    for _ in 0..steps {
        let mut next = vec![[zero; 2]; width];
        for (i, a) in amps.iter().enumerate() {
            let up = (a[0] + a[1]) * h;
            let down = (a[0] - a[1]) * h;
            if i > 0 {
                next[i - 1][0] = next[i - 1][0] + up;
            }
            if i + 1 < width {
                next[i + 1][1] = next[i + 1][1] + down;
            }
        }
        amps = next;
        out.push(record(&amps));
    }
    out
}

/// Trace of a walk-step distribution sequence sampled every second step.
fn iteration_trace<T: Real>(per_step: impl Fn(usize) -> Distribution<T>, iterations: usize) -> Result<WalkTrace<T>> {
    let mut trace = WalkTrace::new(0, None);
    for t in 0..=iterations {
        trace.push(t, per_step(2 * t))?;
    }
    Ok(trace)
}

/// Classical walk recorded per iteration of two steps.
pub fn classical_rw_trace<T: Real>(iterations: usize) -> Result<WalkTrace<T>> {
    iteration_trace(classical_rw, iterations)
}

/// Hadamard walk recorded per iteration of two steps.
pub fn hadamard_qw_trace<T: Real>(iterations: usize) -> Result<WalkTrace<T>> {
    let all = coherent_hadamard_qw::<T>(2 * iterations);
    iteration_trace(|s| all[s].clone(), iterations)
}

/// V² walk with every braid moment equal to one.
pub fn trivial_v2<T: Real>(origin: i64, iterations: usize) -> Result<WalkTrace<T>> {
    evolve(origin, iterations, &UnitProvider, None)
}

/// Number of Abelian anyons on each island.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Occupation {
    /// Independent fillings, occupied with probability `p`.
    Bernoulli(f64),
    /// Same count on every island.
    Fixed(u32),
}

/// Random filling of the islands with Abelian anyons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DisorderConfig {
    /// Exchange phase `φ`; an island with `n` anyons contributes `θ = nφ/2`.
    pub phase: f64,
    pub occupation: Occupation,
    pub seed: u64,
}

impl Default for DisorderConfig {
    fn default() -> Self {
        DisorderConfig { phase: std::f64::consts::FRAC_PI_2, occupation: Occupation::Bernoulli(0.5), seed: 0 }
    }
}

impl DisorderConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.phase.is_finite() {
            return Err(Error::InvalidConfig("phase must be finite".into()));
        }
        if let Occupation::Bernoulli(p) = self.occupation {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("filling probability {p} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        DisorderConfig { seed, ..self }
    }

    /// Island phases `θ_g = n_g φ/2` for `islands` consecutive islands.
    pub fn island_phases<T: Real>(&self, islands: usize) -> Result<Vec<T>> {
        self.validate()?;
        let counts: Vec<u32> = match self.occupation {
            Occupation::Fixed(n) => vec![n; islands],
            Occupation::Bernoulli(p) => {
                let law = Bernoulli::new(p).map_err(|e| Error::InvalidConfig(e.to_string()))?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..islands).map(|_| u32::from(law.sample(&mut rng))).collect()
            }
        };
        Ok(counts.into_iter().map(|n| T::lit(f64::from(n) * self.phase / 2.0)).collect())
    }
}

/// Islands needed so that the generators reached in `iterations` steps never alias.
fn island_count(iterations: usize) -> usize {
    4 * iterations + 8
}

/// Exact V² walk over one random Abelian filling.
///
/// Island `g` (between sites `g` and `g+1`) takes the phase of entry
/// `g mod L` of a filling of `L` islands large enough never to wrap.
pub fn abelian_disorder_evolve<T: Real>(origin: i64, iterations: usize, config: &DisorderConfig) -> Result<WalkTrace<T>> {
    let phases = config.island_phases::<T>(island_count(iterations))?;
    let provider = AbelianPhaseProvider::new(&phases)?;
    evolve(origin, iterations, &provider, None)
}

/// Seed ensemble of disorder runs.
#[derive(Clone, Debug)]
pub struct DisorderEnsemble<T> {
    pub seeds: Vec<u64>,
    pub runs: Vec<WalkTrace<T>>,
}

impl<T: Real> DisorderEnsemble<T> {
    /// Runs seeds `config.seed .. config.seed + count` in parallel.
    pub fn run(origin: i64, iterations: usize, config: &DisorderConfig, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidConfig("ensemble needs at least one seed".into()));
        }
        let seeds: Vec<u64> = (0..count as u64).map(|i| config.seed.wrapping_add(i)).collect();
        let runs = seeds
            .par_iter()
            .map(|&seed| abelian_disorder_evolve(origin, iterations, &config.with_seed(seed)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DisorderEnsemble { seeds, runs })
    }

    fn len(&self) -> T {
        T::from_count(self.runs.len())
    }

    /// Seed average of the raw variance at every iteration.
    pub fn mean_raw_variance(&self) -> Vec<T> {
        let steps = self.runs[0].points.len();
        (0..steps)
            .map(|i| self.runs.iter().fold(T::zero(), |acc, r| acc + r.points[i].sigma2_raw) / self.len())
            .collect()
    }

    /// Seed-averaged distribution at iteration index `i` and the standard
    /// error of each site's probability.
    pub fn distribution_stats(&self, i: usize) -> (Distribution<T>, Distribution<T>) {
        let reach = self.runs.iter().map(|r| r.points[i].distribution.last()).max().unwrap_or(0);
        let sites: Vec<i64> = (-reach..=reach).collect();
        let n = self.len();
        let mean: Vec<T> = sites
            .iter()
            .map(|&s| self.runs.iter().fold(T::zero(), |acc, r| acc + r.points[i].distribution.get(s)) / n)
            .collect();
        let stderr: Vec<T> = sites
            .iter()
            .zip(&mean)
            .map(|(&s, &m)| {
                if self.runs.len() < 2 {
                    return T::zero();
                }
                let ss = self.runs.iter().fold(T::zero(), |acc, r| {
                    let x = r.points[i].distribution.get(s) - m;
                    acc + x * x
                });
                (ss / (n - T::one())).sqrt() / n.sqrt()
            })
            .collect();
        (Distribution::new(-reach, mean), Distribution::new(-reach, stderr))
    }

    /// Trace whose distributions are the seed averages.
    pub fn mean_trace(&self) -> Result<WalkTrace<T>> {
        let first = &self.runs[0];
        let mut trace = WalkTrace::new(first.origin, first.ring);
        for (i, point) in first.points.iter().enumerate() {
            trace.push(point.t, self.distribution_stats(i).0)?;
        }
        Ok(trace)
    }
}
