use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nesslsd::eigen::{Spectrum, SpectrumSource};
use nesslsd::rmtstats::{
    classify, generate_synthetic, ks_statistic, number_variance, number_variance_pooled,
    spacing_histogram, surmise_cdf, surmise_pdf, surmise_quantile, unfold, Classification,
    Ensemble, KsReport, SpacingSample, UnfoldedSpectrum,
};

fn spectrum(values: Vec<f64>) -> Spectrum {
    Spectrum::new(values, 0, SpectrumSource::labelled("test"))
}

/// Composite Simpson rule on `[0, b]`.
fn simpson(f: impl Fn(f64) -> f64, b: f64, intervals: usize) -> f64 {
    let h = b / intervals as f64;
    let mut acc = f(0.0) + f(b);
    for i in 1..intervals {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn surmise_densities_are_normalized_with_unit_mean() {
    for e in Ensemble::ALL {
        let norm = simpson(|s| surmise_pdf(e, s).unwrap(), 40.0, 200_000);
        let mean = simpson(|s| s * surmise_pdf(e, s).unwrap(), 40.0, 200_000);
        assert!((norm - 1.0).abs() < 1e-6, "{e}: {norm}");
        assert!((mean - 1.0).abs() < 1e-6, "{e}: {mean}");
    }
}

#[test]
fn cdfs_differentiate_to_densities() {
    let h = 1e-5;
    for e in Ensemble::ALL {
        for i in 1..500 {
            let s = i as f64 * 0.01;
            let fd = (surmise_cdf(e, s + h).unwrap() - surmise_cdf(e, s - h).unwrap()) / (2.0 * h);
            let p = surmise_pdf(e, s).unwrap();
            assert!((fd - p).abs() < 1e-6, "{e} at {s}: {fd} vs {p}");
        }
    }
}

#[test]
fn cdfs_are_monotone() {
    for e in Ensemble::ALL {
        let mut prev = 0.0;
        for i in 0..10_000 {
            let f = surmise_cdf(e, i as f64 * 1e-3).unwrap();
            assert!(f >= prev && (0.0..=1.0).contains(&f));
            prev = f;
        }
    }
}

#[test]
fn gue_density_at_one() {
    assert!((surmise_pdf(Ensemble::Gue, 1.0).unwrap() - 0.9076).abs() < 1e-4);
}

#[test]
fn poisson_gue_supremum_distance() {
    let mut best = (0.0, 0.0);
    for i in 0..=400_000 {
        let s = i as f64 * 1e-5;
        let d = (surmise_cdf(Ensemble::Poisson, s).unwrap() - surmise_cdf(Ensemble::Gue, s).unwrap())
            .abs();
        if d > best.0 {
            best = (d, s);
        }
    }
    assert!((best.0 - 0.28153461941873986).abs() < 1e-9, "{best:?}");
    assert!((best.1 - 0.5076841820048098).abs() < 1e-4);

    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let sample = SpacingSample::new(draws, vec![]).unwrap();
    let ks = ks_statistic(&sample, Ensemble::Gue).unwrap();
    assert!((ks - 0.28153461941873986).abs() < 0.01, "{ks}");
}

#[test]
fn uniform_levels_unfold_to_unit_mean_spacing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let levels: Vec<f64> = (0..5000).map(|_| rng.random::<f64>() * 3.0 - 1.0).collect();
    let u = unfold(&spectrum(levels), 6, 0.02, false).unwrap();
    assert!((u.mean_spacing() - 1.0).abs() < 0.02, "{}", u.mean_spacing());
}

fn stratified(e: Ensemble, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| surmise_quantile(e, (i as f64 + 0.5) / n as f64).unwrap())
        .collect()
}

#[test]
fn gue_histogram_follows_the_density() {
    let sample = SpacingSample::new(stratified(Ensemble::Gue, 100_000), vec![]).unwrap();
    for (center, density) in spacing_histogram(&sample, 0.1, 4.0).unwrap() {
        let p = surmise_pdf(Ensemble::Gue, center).unwrap();
        assert!((density - p).abs() < 0.03, "{center}: {density} vs {p}");
    }
}

#[test]
fn histogram_first_bin_reflects_small_spacing_behaviour() {
    let poisson = SpacingSample::new(stratified(Ensemble::Poisson, 20_000), vec![]).unwrap();
    let gue = SpacingSample::new(stratified(Ensemble::Gue, 20_000), vec![]).unwrap();
    let first = |s: &SpacingSample| spacing_histogram(s, 0.05, 4.0).unwrap()[0].1;
    assert!((first(&poisson) - 1.0).abs() < 0.05);
    assert!(first(&gue) < 0.01);
}

fn poisson_levels(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            x += -(1.0 - rng.random::<f64>()).ln();
            x
        })
        .collect()
}

#[test]
fn poisson_number_variance_is_linear() {
    let u = unfold(&spectrum(poisson_levels(100_000, 3)), 6, 0.02, false).unwrap();
    for l in [1.0, 2.0, 3.0, 4.0, 5.0] {
        let v = number_variance(&u, l, 20_000).unwrap();
        assert!((v / l - 1.0).abs() < 0.1, "L = {l}: {v}");
    }
    assert!(number_variance(&u, 0.01, 20_000).unwrap() < 0.02);
}

#[test]
fn gue_number_variance_is_suppressed() {
    let spectra: Vec<UnfoldedSpectrum> = generate_synthetic(Ensemble::Gue, 200, 20, 9)
        .unwrap()
        .iter()
        .map(|s| unfold(s, 6, 0.05, false).unwrap())
        .collect();
    let refs: Vec<&UnfoldedSpectrum> = spectra.iter().collect();
    let v = number_variance_pooled(&refs, 3.0, 10_000, 1).unwrap();
    assert!(v < 1.0, "{v}");
}

#[test]
fn oversized_window_is_rejected() {
    let u = unfold(&spectrum((0..40).map(f64::from).collect()), 3, 0.0, false).unwrap();
    assert!(number_variance(&u, 20.0, 100).is_err());
}

fn pooled_synthetic(e: Ensemble) -> SpacingSample {
    let spectra = generate_synthetic(e, 200, 50, 2024).unwrap();
    let samples: Vec<SpacingSample> = spectra
        .iter()
        .map(|s| SpacingSample::from_unfolded(&unfold(s, 6, 0.1, false).unwrap(), e.name()))
        .collect();
    SpacingSample::pool(&samples)
}

#[test]
fn synthetic_ensembles_classify_as_themselves() {
    for e in Ensemble::ALL {
        let sample = pooled_synthetic(e);
        let ks = KsReport::compute(&sample).unwrap();
        let (winner, lead) = ks.ranking(&Ensemble::ALL);
        assert_eq!(winner, e, "{ks:?}");
        assert!(ks.get(e) < 0.02, "{e}: {ks:?}");
        assert!(lead >= 0.05, "{e}: {ks:?}");
        assert_eq!(classify(&sample, 0.05).unwrap(), Classification::from(e));
        if e == Ensemble::Poisson {
            assert!(ks.gue > 0.15);
        }
    }
}

#[test]
fn synthetic_spectra_are_reproducible() {
    let a = generate_synthetic(Ensemble::Goe, 60, 4, 1).unwrap();
    let b = generate_synthetic(Ensemble::Goe, 60, 4, 1).unwrap();
    let c = generate_synthetic(Ensemble::Goe, 60, 4, 2).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(generate_synthetic(Ensemble::Gue, 10, 1, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unfolding_is_affine_invariant(
        seed in any::<u64>(),
        scale in 0.01f64..100.0,
        shift in -50.0f64..50.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let levels: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
        let moved: Vec<f64> = levels.iter().map(|x| scale * x + shift).collect();
        let a = unfold(&spectrum(levels), 5, 0.02, false).unwrap();
        let b = unfold(&spectrum(moved), 5, 0.02, false).unwrap();
        for (x, y) in a.spacings().iter().zip(b.spacings()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn ks_ignores_pooling_order(seed in any::<u64>(), parts in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<SpacingSample> = (0..parts)
            .map(|_| {
                let len = rng.random_range(5..50);
                SpacingSample::new((0..len).map(|_| rng.random::<f64>() * 3.0).collect(), vec![])
                    .unwrap()
            })
            .collect();
        let forward = KsReport::compute(&SpacingSample::pool(&samples)).unwrap();
        let backward = KsReport::compute(&SpacingSample::pool(samples.iter().rev())).unwrap();
        prop_assert_eq!(forward, backward);
        let pooled = SpacingSample::pool(&samples);
        if pooled.len() >= 100 {
            let reversed = SpacingSample::pool(samples.iter().rev());
            prop_assert_eq!(classify(&pooled, 0.02).unwrap(), classify(&reversed, 0.02).unwrap());
        }
    }

    #[test]
    fn ks_distance_is_a_probability_gap(seed in any::<u64>(), len in 1usize..300) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample =
            SpacingSample::new((0..len).map(|_| rng.random::<f64>() * 5.0).collect(), vec![])
                .unwrap();
        for e in Ensemble::ALL {
            let d = ks_statistic(&sample, e).unwrap();
            prop_assert!(d >= 0.5 / len as f64 - 1e-12 && d <= 1.0);
        }
    }

    #[test]
    fn unfolded_levels_are_sorted(seed in any::<u64>(), log in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let levels: Vec<f64> = (0..120).map(|_| rng.random::<f64>().powi(3) + 1e-3).collect();
        let u = unfold(&spectrum(levels), 4, 0.05, log).unwrap();
        prop_assert!(u.levels().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(u.spacings().iter().all(|s| *s >= 0.0));
    }
}
