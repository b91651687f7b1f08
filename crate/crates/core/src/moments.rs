//! Braid moments `⟨Φ₀|W_y(s′)† W_x(s)|Φ₀⟩` feeding the walk, and their averages.
//!
//! A two-step move of the walker is one of four [`TwoStepPath`]s. Every term of
//! the superoperator pairs a forward path at site `s` with a backward path at
//! `s′`; the eight pairs with a nonzero coin weight are the [`MomentFamily`]s.

use std::fmt;

use serde::Serialize;

use crate::braid::{markov_expectation, BraidWord};
use crate::error::{Error, Result};
use crate::model::AnyonModel;
use crate::scalar::{c_re, Real, C};

/// The four coin-labelled two-step moves out of site `s`.
///
/// Coin labels `(a, b)` refer to `P_a H P_b H`: the walker first moves by
/// `b` (0 = left, 1 = right), then by `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TwoStepPath {
    /// left, left: `s → s−2`, braid `b_{s−2} b_{s−1}`
    Left,
    /// right then left: stays at `s`, braid `b_s²`
    RightBack,
    /// left then right: stays at `s`, braid `b_{s−1}²`
    LeftBack,
    /// right, right: `s → s+2`, braid `b_{s+1} b_s`
    Right,
}

impl TwoStepPath {
    pub const ALL: [TwoStepPath; 4] =
        [TwoStepPath::Left, TwoStepPath::RightBack, TwoStepPath::LeftBack, TwoStepPath::Right];

    /// `(a, b)` in `P_a H P_b H`.
    pub fn coin_labels(self) -> (usize, usize) {
        match self {
            TwoStepPath::Left => (0, 0),
            TwoStepPath::RightBack => (0, 1),
            TwoStepPath::LeftBack => (1, 0),
            TwoStepPath::Right => (1, 1),
        }
    }

    pub fn index(self) -> usize {
        let (a, b) = self.coin_labels();
        2 * a + b
    }

    pub fn band(self) -> Band {
        match self {
            TwoStepPath::Left => Band::Down,
            TwoStepPath::RightBack | TwoStepPath::LeftBack => Band::Stay,
            TwoStepPath::Right => Band::Up,
        }
    }

    pub fn displacement(self) -> i64 {
        self.band().shift()
    }

    /// Generators of the path braid in operator order (rightmost acts first).
    pub fn generators(self, s: i64) -> [i64; 2] {
        match self {
            TwoStepPath::Left => [s - 2, s - 1],
            TwoStepPath::RightBack => [s, s],
            TwoStepPath::LeftBack => [s - 1, s - 1],
            TwoStepPath::Right => [s + 1, s],
        }
    }
}

/// Displacement bands of the superoperator: `a` (−2), `d` (0), `b` (+2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Band {
    Down,
    Stay,
    Up,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Down, Band::Stay, Band::Up];

    pub fn shift(self) -> i64 {
        match self {
            Band::Down => -2,
            Band::Stay => 0,
            Band::Up => 2,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> char {
        match self {
            Band::Down => 'a',
            Band::Stay => 'd',
            Band::Up => 'b',
        }
    }
}

/// The eight expectation values that appear in the superoperator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MomentFamily {
    /// `b†_{s′−1} b†_{s′−2} b_{s−2} b_{s−1}`
    F1,
    /// `b†²_{s′} b_{s−2} b_{s−1}`
    F2,
    /// `b†_{s′−1} b†_{s′−2} b²_s`
    F3,
    /// `b†²_{s′} b²_s`
    F4,
    /// `b†²_{s′−1} b²_{s−1}`
    F5,
    /// `b†_{s′} b†_{s′+1} b²_{s−1}`
    F6,
    /// `b†²_{s′−1} b_{s+1} b_s`
    F7,
    /// `b†_{s′} b†_{s′+1} b_{s+1} b_s`
    F8,
}

impl MomentFamily {
    pub const ALL: [MomentFamily; 8] = [
        MomentFamily::F1,
        MomentFamily::F2,
        MomentFamily::F3,
        MomentFamily::F4,
        MomentFamily::F5,
        MomentFamily::F6,
        MomentFamily::F7,
        MomentFamily::F8,
    ];

    /// `(forward path at s, backward path at s′)`.
    pub fn paths(self) -> (TwoStepPath, TwoStepPath) {
        use TwoStepPath::*;
        match self {
            MomentFamily::F1 => (Left, Left),
            MomentFamily::F2 => (Left, RightBack),
            MomentFamily::F3 => (RightBack, Left),
            MomentFamily::F4 => (RightBack, RightBack),
            MomentFamily::F5 => (LeftBack, LeftBack),
            MomentFamily::F6 => (LeftBack, Right),
            MomentFamily::F7 => (Right, LeftBack),
            MomentFamily::F8 => (Right, Right),
        }
    }

    pub fn from_paths(forward: TwoStepPath, backward: TwoStepPath) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.paths() == (forward, backward))
    }

    /// Operator product `W_y(s′)† W_x(s)` as `(generator, inverse)` pairs.
    pub fn operators(self, s: i64, s_prime: i64) -> [(i64, bool); 4] {
        let (fwd, back) = self.paths();
        let [f1, f2] = fwd.generators(s);
        let [b1, b2] = back.generators(s_prime);
        [(b2, true), (b1, true), (f1, false), (f2, false)]
    }

    pub fn braid_word(self, s: i64, s_prime: i64) -> BraidWord {
        BraidWord::from_operators(&self.operators(s, s_prime))
            .expect("family words are always well formed")
    }
}

impl fmt::Display for MomentFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Source of braid moments for the superoperator.
pub trait MomentProvider<T>: Sync {
    fn moment(&self, family: MomentFamily, s: i64, s_prime: i64) -> C<T>;
}

/// Providers whose moments depend only on `Δ = s′ − s` and are constant for
/// `|Δ| ≥ DISJOINT_OFFSET`.
pub trait OffsetMoments<T>: MomentProvider<T> {
    fn at_offset(&self, family: MomentFamily, delta: i64) -> C<T>;

    /// Value on disjoint links.
    fn disjoint(&self, family: MomentFamily) -> C<T> {
        self.at_offset(family, DISJOINT_OFFSET)
    }
}

/// Forward and backward words touch disjoint strands from this offset on.
pub const DISJOINT_OFFSET: i64 = 4;

/// Closed-form moments in terms of `A` and `d`.
#[derive(Clone, Debug)]
pub struct TableProvider<T> {
    one: C<T>,
    inv_d2: C<T>,
    inv_d4: C<T>,
    /// `−A⁶(A⁴+A⁻⁴)/d³`
    twist_plus: C<T>,
    /// `−A⁻⁶(A⁴+A⁻⁴)/d³`
    twist_minus: C<T>,
    /// `(A⁴+A⁻⁴)²/d²`
    hopf_pair: C<T>,
}

impl<T: Real> TableProvider<T> {
    pub fn new(model: &AnyonModel<T>) -> Self {
        let d = model.d();
        let q = model.quartic_sum();
        let d3 = c_re(d * d * d);
        TableProvider {
            one: c_re(T::one()),
            inv_d2: c_re((d * d).recip()),
            inv_d4: c_re((d * d * d * d).recip()),
            twist_plus: -(model.a_pow(6) * q) / d3,
            twist_minus: -(model.a_pow(-6) * q) / d3,
            hopf_pair: q * q / c_re(d * d),
        }
    }

    fn lookup(&self, family: MomentFamily, delta: i64) -> C<T> {
        use MomentFamily::*;
        match family {
            F1 | F8 => match delta.abs() {
                0 => self.one,
                1 => self.inv_d2,
                _ => self.inv_d4,
            },
            F2 => match delta {
                -2 | -1 => self.inv_d2,
                _ => self.twist_plus,
            },
            F6 => match delta {
                -2 | -1 => self.inv_d2,
                _ => self.twist_minus,
            },
            F4 | F5 => {
                if delta == 0 {
                    self.one
                } else {
                    self.hopf_pair
                }
            }
            F3 => self.lookup(F2, -delta).conj(),
            F7 => self.lookup(F6, -delta).conj(),
        }
    }
}

impl<T: Real> MomentProvider<T> for TableProvider<T> {
    fn moment(&self, family: MomentFamily, s: i64, s_prime: i64) -> C<T> {
        self.lookup(family, s_prime - s)
    }
}

impl<T: Real> OffsetMoments<T> for TableProvider<T> {
    fn at_offset(&self, family: MomentFamily, delta: i64) -> C<T> {
        self.lookup(family, delta)
    }
}

/// Moments evaluated by the bracket state sum, cached on `|Δ| ≤ reach`.
#[derive(Clone, Debug)]
pub struct OracleProvider<T> {
    reach: i64,
    /// `values[family][Δ + reach]`
    values: Vec<Vec<C<T>>>,
}

impl<T: Real> OracleProvider<T> {
    /// Evaluates every family on `|Δ| ≤ reach`; offsets beyond reuse the
    /// boundary value, which is the disjoint-link value once `reach ≥ 4`.
    pub fn new(model: &AnyonModel<T>, reach: i64) -> Result<Self> {
        if reach < DISJOINT_OFFSET {
            return Err(Error::InvalidConfig(format!(
                "oracle reach {reach} does not cover the disjoint offset {DISJOINT_OFFSET}"
            )));
        }
        let values = MomentFamily::ALL
            .iter()
            .map(|&family| {
                (-reach..=reach)
                    .map(|delta| oracle_moment(family, delta, model))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OracleProvider { reach, values })
    }

    pub fn reach(&self) -> i64 {
        self.reach
    }
}

/// One uncached oracle evaluation at `s = 0`, `s′ = Δ`.
pub fn oracle_moment<T: Real>(family: MomentFamily, delta: i64, model: &AnyonModel<T>) -> Result<C<T>> {
    markov_expectation(&family.braid_word(0, delta), model)
}

impl<T: Real> MomentProvider<T> for OracleProvider<T> {
    fn moment(&self, family: MomentFamily, s: i64, s_prime: i64) -> C<T> {
        self.at_offset(family, s_prime - s)
    }
}

impl<T: Real> OffsetMoments<T> for OracleProvider<T> {
    fn at_offset(&self, family: MomentFamily, delta: i64) -> C<T> {
        let clamped = delta.clamp(-self.reach, self.reach);
        self.values[family as usize][(clamped + self.reach) as usize]
    }
}

/// All moments equal to one: trivial exchange statistics.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitProvider;

impl<T: Real> MomentProvider<T> for UnitProvider {
    fn moment(&self, _: MomentFamily, _: i64, _: i64) -> C<T> {
        c_re(T::one())
    }
}

impl<T: Real> OffsetMoments<T> for UnitProvider {
    fn at_offset(&self, _: MomentFamily, _: i64) -> C<T> {
        c_re(T::one())
    }
}

/// Abelian anyons: generator `b_g` multiplies by `e^{iθ_g}`, `b_g†` by `e^{−iθ_g}`.
///
/// Island phases are indexed by generator label modulo their count.
#[derive(Clone, Debug)]
pub struct AbelianPhaseProvider<T> {
    phases: Vec<C<T>>,
}

impl<T: Real> AbelianPhaseProvider<T> {
    pub fn new(thetas: &[T]) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidConfig("no island phases".into()));
        }
        Ok(AbelianPhaseProvider { phases: thetas.iter().map(|&t| C::from_polar(T::one(), t)).collect() })
    }

    /// Same phase on every island.
    pub fn uniform(theta: T, islands: usize) -> Result<Self> {
        Self::new(&vec![theta; islands.max(1)])
    }

    fn phase(&self, generator: i64) -> C<T> {
        self.phases[generator.rem_euclid(self.phases.len() as i64) as usize]
    }
}

impl<T: Real> MomentProvider<T> for AbelianPhaseProvider<T> {
    fn moment(&self, family: MomentFamily, s: i64, s_prime: i64) -> C<T> {
        family.operators(s, s_prime).iter().fold(c_re(T::one()), |acc, &(g, inverse)| {
            let p = self.phase(g);
            acc * if inverse { p.conj() } else { p }
        })
    }
}

/// Ring-averaged moment `(1/N²) Σ_{s,s′} F(s′ − s)` on `Z_N`.
///
/// Each ring offset occurs `N` times; offsets are taken as centered residues.
/// Only `|Δ| < 4` differ from the disjoint value, so the sum is O(1).
pub fn averaged_moment<T: Real, P: OffsetMoments<T> + ?Sized>(
    provider: &P,
    family: MomentFamily,
    n: usize,
) -> Result<C<T>> {
    if n < MIN_AVERAGING_RING {
        return Err(Error::RingTooSmall { n, min: MIN_AVERAGING_RING });
    }
    let near = DISJOINT_OFFSET - 1;
    let mut special = C::new(T::zero(), T::zero());
    for delta in -near..=near {
        special = special + provider.at_offset(family, delta);
    }
    let far = (n as i64 - (2 * near + 1)) as usize;
    let total = special + provider.disjoint(family) * T::from_count(far);
    Ok(total / T::from_count(n))
}

/// Smallest ring on which the near-diagonal offsets do not wrap onto each other.
pub const MIN_AVERAGING_RING: usize = 9;

/// How band averages are formed for the circulant approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MomentMode {
    /// Exact ring averages on `N` sites.
    FiniteN(usize),
    /// Disjoint-link values only (the `N → ∞` limit).
    Asymptotic,
}

/// Coefficients of `M = κ₁ I + κ₂ ĥ² + κ₂* ĥ⁻²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaPair<T> {
    pub kappa1: T,
    pub kappa2: C<T>,
    pub mode: MomentMode,
}

/// Coin weight times averaged moment for every ordered pair of bands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandWeights<T> {
    /// `mu[x][y]`: forward band `x`, backward band `y`.
    pub mu: [[C<T>; 3]; 3],
}

impl<T: Real> BandWeights<T> {
    /// Assembles `μ_xy = Σ coin(x, y) · avg⟨W_y† W_x⟩` from the table moments.
    pub fn new(model: &AnyonModel<T>, mode: MomentMode) -> Result<Self> {
        Self::from_provider(&TableProvider::new(model), mode)
    }

    pub fn from_provider<P: OffsetMoments<T> + ?Sized>(provider: &P, mode: MomentMode) -> Result<Self> {
        let coins = crate::exact::CoinCoefficients::<T>::new();
        let zero = C::new(T::zero(), T::zero());
        let mut mu = [[zero; 3]; 3];
        for family in MomentFamily::ALL {
            let (fwd, back) = family.paths();
            let moment = match mode {
                MomentMode::FiniteN(n) => averaged_moment(provider, family, n)?,
                MomentMode::Asymptotic => provider.disjoint(family),
            };
            let cell = &mut mu[fwd.band().index()][back.band().index()];
            *cell = *cell + coins.pair(fwd, back) * moment;
        }
        Ok(BandWeights { mu })
    }

    pub fn get(&self, forward: Band, backward: Band) -> C<T> {
        self.mu[forward.index()][backward.index()]
    }

    /// `κ₁`: sum of the same-band weights.
    pub fn kappa1(&self) -> C<T> {
        Band::ALL.iter().fold(C::new(T::zero(), T::zero()), |acc, &b| acc + self.get(b, b))
    }

    /// `κ₂`: coefficient of `ĥ²` in `M = Σ μ_xy S_y† S_x`, i.e. the pairs whose
    /// forward shift sits two sites below the backward one.
    pub fn kappa2(&self) -> C<T> {
        self.get(Band::Down, Band::Stay) + self.get(Band::Stay, Band::Up)
    }
}

/// Normalization coefficients of the averaged Kraus generators.
pub fn kappas<T: Real>(model: &AnyonModel<T>, mode: MomentMode) -> Result<KappaPair<T>> {
    let weights = BandWeights::new(model, mode)?;
    Ok(KappaPair { kappa1: weights.kappa1().re, kappa2: weights.kappa2(), mode })
}

/// Closed trigonometric forms of the asymptotic `κ` pair, with `θ = π/(k+2)`:
///
/// `κ₁ = (6cos2θ + 4cos4θ + 2cos6θ + 5) sec⁴θ / 32`
/// `κ₂ = −i sin3θ cos2θ sec³θ / 8`
///
/// An independent route to [`kappas`] in [`MomentMode::Asymptotic`].
pub fn asymptotic_kappas_closed_form<T: Real>(model: &AnyonModel<T>) -> (T, C<T>) {
    // (cos mθ, sin mθ)
    let angle = |m: i64| -> (T, T) {
        match model.level() {
            crate::model::Level::Infinity => (T::one(), T::zero()),
            crate::model::Level::Finite(k) => {
                let q = i64::from(k) + 2;
                (crate::scalar::cos_pi(m, q), crate::scalar::sin_pi(m, q))
            }
        }
    };
    let (c1, _) = angle(1);
    let (c2, _) = angle(2);
    let (c4, _) = angle(4);
    let (c6, _) = angle(6);
    let (_, s3) = angle(3);
    let sec = c1.recip();
    let kappa1 = (T::lit(6.0) * c2 + T::lit(4.0) * c4 + T::lit(2.0) * c6 + T::lit(5.0)) * sec.powi(4) / T::lit(32.0);
    let kappa2 = C::new(T::zero(), -(s3 * c2 * sec.powi(3)) / T::lit(8.0));
    (kappa1, kappa2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Level;

    fn model(k: u32) -> AnyonModel<f64> {
        AnyonModel::new(Level::Finite(k)).unwrap()
    }

    const LEVELS: [u32; 6] = [1, 2, 3, 4, 5, 10];

    #[test]
    fn table_matches_oracle() {
        for k in LEVELS {
            let m = model(k);
            let table = TableProvider::new(&m);
            for family in MomentFamily::ALL {
                for delta in -6..=6 {
                    let oracle = oracle_moment(family, delta, &m).unwrap();
                    let closed = table.at_offset(family, delta);
                    assert!((oracle - closed).norm() < 1e-10, "k={k} {family} Δ={delta}: {oracle} vs {closed}");
                }
            }
        }
    }

    #[test]
    fn abelian_table_is_exactly_one() {
        let table = TableProvider::new(&model(1));
        for family in MomentFamily::ALL {
            for delta in -8..=8 {
                assert_eq!(table.at_offset(family, delta), C::new(1.0, 0.0), "{family} Δ={delta}");
            }
        }
    }

    #[test]
    fn ising_hopf_pair_vanishes() {
        let table = TableProvider::new(&model(2));
        assert_eq!(table.at_offset(MomentFamily::F4, 1), C::new(0.0, 0.0));
        assert_eq!(table.at_offset(MomentFamily::F1, 0), C::new(1.0, 0.0));
    }

    #[test]
    fn family_symmetries() {
        for k in LEVELS {
            let table = TableProvider::new(&model(k));
            for delta in -7..=7 {
                assert_eq!(table.at_offset(MomentFamily::F5, delta), table.at_offset(MomentFamily::F4, delta));
                let f3 = table.at_offset(MomentFamily::F3, delta);
                assert!((f3 - table.at_offset(MomentFamily::F2, -delta).conj()).norm() < 1e-15);
                let f7 = table.at_offset(MomentFamily::F7, delta);
                assert!((f7 - table.at_offset(MomentFamily::F6, -delta).conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn oracle_cache_is_constant_beyond_disjoint_offset() {
        let m = model(3);
        let oracle = OracleProvider::new(&m, 6).unwrap();
        for family in MomentFamily::ALL {
            let far = oracle.at_offset(family, 40);
            for delta in [4, 5, 6, -4, -5, -6, -40] {
                assert!((oracle.at_offset(family, delta) - far).norm() < 1e-12);
            }
        }
        assert!(OracleProvider::new(&m, 3).is_err());
    }

    #[test]
    fn ising_stay_average_is_one_over_n() {
        let table = TableProvider::new(&model(2));
        for n in [9, 16, 101] {
            let avg = averaged_moment(&table, MomentFamily::F4, n).unwrap();
            assert!((avg - C::new(1.0 / n as f64, 0.0)).norm() < 1e-15);
        }
        assert!(averaged_moment(&table, MomentFamily::F4, 8).is_err());
    }

    #[test]
    fn averaged_moment_matches_brute_force_ring_sum() {
        for k in [2, 3, 10] {
            let table = TableProvider::new(&model(k));
            for n in [9usize, 10, 17] {
                for family in MomentFamily::ALL {
                    let mut sum = C::new(0.0, 0.0);
                    for s in 0..n as i64 {
                        for sp in 0..n as i64 {
                            let mut delta = (sp - s).rem_euclid(n as i64);
                            if delta > n as i64 / 2 {
                                delta -= n as i64;
                            }
                            sum += table.at_offset(family, delta);
                        }
                    }
                    let brute = sum / (n * n) as f64;
                    let fast = averaged_moment(&table, family, n).unwrap();
                    assert!((brute - fast).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn kappa_examples() {
        let k2 = kappas(&model(2), MomentMode::Asymptotic).unwrap();
        assert!((k2.kappa1 - 0.125).abs() < 1e-15);
        assert!(k2.kappa2.norm() < 1e-15);
        let inf = kappas(&AnyonModel::<f64>::new(Level::Infinity).unwrap(), MomentMode::Asymptotic).unwrap();
        assert!((inf.kappa1 - 17.0 / 32.0).abs() < 1e-15);
        let k1 = kappas(&model(1), MomentMode::Asymptotic).unwrap();
        assert!((k1.kappa1 - 1.0).abs() < 1e-15);
        assert!(k1.kappa2.norm() < 1e-15);
    }

    #[test]
    fn closed_form_kappas_agree_with_band_assembly() {
        let mut models: Vec<AnyonModel<f64>> = (1..=12).map(model).collect();
        models.push(AnyonModel::new(Level::Infinity).unwrap());
        for m in models {
            let assembled = kappas(&m, MomentMode::Asymptotic).unwrap();
            let (k1, k2) = asymptotic_kappas_closed_form(&m);
            assert!((assembled.kappa1 - k1).abs() < 1e-12, "{:?}", m.level());
            assert!((assembled.kappa2 - k2).norm() < 1e-12, "{:?}", m.level());
        }
    }

    #[test]
    fn finite_kappas_approach_asymptotic_as_one_over_n() {
        for k in [3, 5] {
            let m = model(k);
            let asym = kappas(&m, MomentMode::Asymptotic).unwrap();
            let scaled: Vec<f64> = [64usize, 128, 256, 512]
                .iter()
                .map(|&n| {
                    let fin = kappas(&m, MomentMode::FiniteN(n)).unwrap();
                    (fin.kappa1 - asym.kappa1).abs() * n as f64
                })
                .collect();
            for w in scaled.windows(2) {
                assert!((w[0] - w[1]).abs() < 1e-9 * w[0].max(1.0));
            }
        }
    }

    #[test]
    fn abelian_phases_cancel_for_uniform_filling() {
        let p = AbelianPhaseProvider::<f64>::uniform(0.7, 32).unwrap();
        for family in MomentFamily::ALL {
            for (s, sp) in [(5, 5), (5, 9), (12, 3)] {
                assert!((p.moment(family, s, sp) - C::new(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }
}
