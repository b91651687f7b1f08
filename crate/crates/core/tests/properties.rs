use anyon_walk::braid::{markov_expectation, BraidWord, Letter};
use anyon_walk::circulant::{build_fourier_factor, evolve_circulant};
use anyon_walk::exact::{evolve, CoinCoefficients, ExactWalk};
use anyon_walk::moments::{AbelianPhaseProvider, TableProvider};
use anyon_walk::{AnyonModel, Level, MomentFamily, MomentMode, MomentProvider};
use num_complex::Complex;
use proptest::prelude::*;

fn level_strategy() -> impl Strategy<Value = Level> {
    prop_oneof![(1u32..=12).prop_map(Level::Finite), Just(Level::Infinity)]
}

fn word_strategy() -> impl Strategy<Value = BraidWord> {
    (2usize..=5).prop_flat_map(|strands| {
        prop::collection::vec((1..strands, any::<bool>()), 0..=6).prop_map(move |letters| {
            let letters = letters.into_iter().map(|(i, inv)| if inv { Letter::neg(i) } else { Letter::pos(i) }).collect();
            BraidWord::new(strands, letters).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitarity(word in word_strategy(), level in level_strategy()) {
        let m = AnyonModel::<f64>::new(level).unwrap();
        let v = markov_expectation(&word.then_inverse(), &m).unwrap();
        prop_assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn conjugation(word in word_strategy(), level in level_strategy()) {
        let m = AnyonModel::<f64>::new(level).unwrap();
        let a = markov_expectation(&word, &m).unwrap();
        let b = markov_expectation(&word.dagger(), &m).unwrap();
        prop_assert!((a.conj() - b).norm() < 1e-10);
    }

    #[test]
    fn idle_strands_do_not_change_expectations(word in word_strategy(), extra in 1usize..=3, level in level_strategy()) {
        let m = AnyonModel::<f64>::new(level).unwrap();
        let a = markov_expectation(&word, &m).unwrap();
        let b = markov_expectation(&word.with_extra_strands(extra), &m).unwrap();
        prop_assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn abelian_level_is_trivial(family_index in 0usize..8, s in -5i64..5, sp in -5i64..5) {
        let m = AnyonModel::<f64>::new(Level::Finite(1)).unwrap();
        let family = MomentFamily::ALL[family_index];
        let v = markov_expectation(&family.braid_word(s + 10, sp + 10), &m).unwrap();
        prop_assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn random_phases_preserve_trace_and_hermiticity(thetas in prop::collection::vec(-3.2f64..3.2, 8..24), origin in -20i64..20) {
        let provider = AbelianPhaseProvider::new(&thetas).unwrap();
        let mut walk = ExactWalk::new(origin, &provider, None).unwrap();
        for _ in 0..8 {
            let state = walk.step().unwrap();
            prop_assert!((state.trace() - Complex::new(1.0, 0.0)).norm() < 1e-12);
            prop_assert!(state.hermiticity_error() < 1e-12);
        }
        prop_assert!(walk.state().min_eigenvalue() > -1e-8);
    }

    #[test]
    fn support_and_parity(level in level_strategy(), steps in 1usize..12) {
        let m = AnyonModel::<f64>::new(level).unwrap();
        let trace = evolve(0, steps, &TableProvider::new(&m), None).unwrap();
        for point in &trace.points {
            for (s, p) in point.distribution.iter() {
                if s.rem_euclid(2) == 1 || s.abs() > 2 * point.t as i64 {
                    prop_assert!(p.abs() < 1e-14);
                } else {
                    prop_assert!(p > -1e-14);
                }
            }
        }
    }
}

#[test]
fn table_superoperator_is_trace_preserving_for_every_offset() {
    // Σ over families landing on the diagonal: s+δx = s′+δy.
    let coins = CoinCoefficients::<f64>::new();
    for level in [Level::Finite(2), Level::Finite(3), Level::Finite(7), Level::Infinity] {
        let table = TableProvider::new(&AnyonModel::new(level).unwrap());
        for s in -6i64..=6 {
            for sp in -6i64..=6 {
                let mut total = Complex::new(0.0, 0.0);
                for family in MomentFamily::ALL {
                    let (x, y) = family.paths();
                    if s + x.displacement() == sp + y.displacement() {
                        total += coins.family(family) * table.moment(family, s, sp);
                    }
                }
                let want = if s == sp { 1.0 } else { 0.0 };
                assert!((total - Complex::new(want, 0.0)).norm() < 1e-12, "{level} s={s} s'={sp}");
            }
        }
    }
}

#[test]
fn abelian_circulant_is_exact() {
    let m = AnyonModel::<f64>::new(Level::Finite(1)).unwrap();
    let t = 20;
    let factor = build_fourier_factor(&m, 4 * t + 1, MomentMode::Asymptotic, None).unwrap();
    let circ = evolve_circulant(0, t, &factor).unwrap();
    let exact = evolve(0, t, &TableProvider::new(&m), None).unwrap();
    for (a, b) in circ.points.iter().zip(&exact.points) {
        for (s, p) in b.distribution.iter() {
            assert!((a.distribution.get(s) - p).abs() < 1e-12);
        }
    }
}

#[test]
fn finite_ring_moments_approach_the_disjoint_limit() {
    // min ν sits near 0.007 at k=3, so the O(1/N) moment shift only looks
    // first-order in the variance once it is small against that.
    let m = AnyonModel::<f64>::new(Level::Finite(3)).unwrap();
    let gaps: Vec<(f64, f64)> = [165usize, 329, 657, 1313]
        .iter()
        .map(|&n| {
            let finite = build_fourier_factor(&m, n, MomentMode::FiniteN(n), None).unwrap();
            let limit = build_fourier_factor(&m, n, MomentMode::Asymptotic, None).unwrap();
            let nu_min = |f: &anyon_walk::circulant::FourierFactor<f64>| (0..n).map(|r| f.nu(r)).fold(f64::INFINITY, f64::min);
            let var = |f| evolve_circulant(0, 1, f).unwrap().last().unwrap().sigma2_raw;
            (nu_min(&finite) - nu_min(&limit), var(&limit) - var(&finite))
        })
        .collect();
    let ratios: Vec<(f64, f64)> = gaps.windows(2).map(|w| (w[0].0 / w[1].0, w[0].1 / w[1].1)).collect();
    for &(nu_ratio, _) in &ratios {
        assert!((1.9..2.1).contains(&nu_ratio), "{ratios:?}");
    }
    for w in ratios.windows(2) {
        assert!(w[1].1 > w[0].1 && w[1].1 < 2.0, "{ratios:?}");
    }
    assert!(ratios.last().unwrap().1 > 1.75, "{ratios:?}");
}

#[test]
fn single_precision_tracks_double() {
    let m32 = anyon_walk::Model32::new(Level::Finite(3)).unwrap();
    let m64 = AnyonModel::<f64>::new(Level::Finite(3)).unwrap();
    let a: anyon_walk::Trace32 = evolve(0, 20, &anyon_walk::Table32::new(&m32), None).unwrap();
    let b = evolve(0, 20, &TableProvider::new(&m64), None).unwrap();
    let (va, vb) = (a.last().unwrap().sigma2_raw as f64, b.last().unwrap().sigma2_raw);
    assert!((va - vb).abs() < 1e-4 * vb, "{va} {vb}");
}
