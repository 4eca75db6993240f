use fairteams::datagen::{
    bucket_distribution, generate_dataset, generate_group, read_roster, write_roster, Bucket,
    DatasetConfig, GroupGenSpec, Preset, SkillNoise,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Composite Simpson rule on [lo, hi].
fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    let h = (hi - lo) / intervals as f64;
    let inner: f64 = (1..intervals)
        .map(|i| f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(lo) + inner + f(hi)) * h / 3.0
}

/// Bucket probabilities (A, B, C, D) from the unnormalized Beta density.
fn oracle_masses(alpha: f64, beta: f64) -> [f64; 4] {
    let density = |x: f64| x.powf(alpha - 1.0) * (1.0 - x).powf(beta - 1.0);
    let quarter = |lo: f64| simpson(&density, lo, lo + 0.25, 20_000);
    let parts = [quarter(0.75), quarter(0.5), quarter(0.25), quarter(0.0)];
    let total: f64 = parts.iter().sum();
    parts.map(|p| p / total)
}

const REFERENCE_SHAPES: [(f64, f64); 5] =
    [(6.0, 4.0), (8.0, 3.2), (7.0, 5.5), (7.5, 1.0), (1.0, 7.5)];

#[test]
fn bucket_masses_match_numeric_integration() {
    for (a, b) in REFERENCE_SHAPES {
        let got = bucket_distribution(a, b).unwrap();
        let want = oracle_masses(a, b);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-8, "Beta({a},{b}): {got:?} vs {want:?}");
        }
    }
}

#[test]
fn bucket_distribution_rejects_bad_shapes() {
    assert!(bucket_distribution(0.0, 1.0).is_err());
    assert!(bucket_distribution(1.0, -2.0).is_err());
    assert!(bucket_distribution(f64::NAN, 1.0).is_err());
}

#[test]
fn sampled_bucket_frequencies_track_the_masses() {
    for (alpha, beta) in REFERENCE_SHAPES {
        let spec = GroupGenSpec {
            count: 400,
            alpha,
            beta,
        };
        let mut counts = [0usize; 4];
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in generate_group(&spec, 2, SkillNoise::Variance, &mut rng).unwrap() {
                counts[s.bucket.index()] += 1;
            }
        }
        let expected = bucket_distribution(alpha, beta).unwrap();
        for (c, e) in counts.iter().zip(expected) {
            let pct = 100.0 * *c as f64 / 20_000.0;
            let e = 100.0 * e;
            assert!((pct - e).abs() <= 2.0, "Beta({alpha},{beta}): {pct} vs {e}");
        }
    }
}

#[test]
fn bucket_thresholds() {
    assert_eq!(Bucket::of_sample(0.75), Bucket::A);
    assert_eq!(Bucket::of_sample(0.7499), Bucket::B);
    assert_eq!(Bucket::of_sample(0.5), Bucket::B);
    assert_eq!(Bucket::of_sample(0.25), Bucket::C);
    assert_eq!(Bucket::of_sample(0.1), Bucket::D);
}

#[test]
fn skills_follow_their_bucket() {
    let spec = GroupGenSpec {
        count: 4000,
        alpha: 2.0,
        beta: 2.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let students = generate_group(&spec, 1, SkillNoise::Variance, &mut rng).unwrap();
    for bucket in Bucket::ALL {
        let vals: Vec<f64> = students
            .iter()
            .filter(|s| s.bucket == bucket)
            .map(|s| s.skills[0])
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        // Clamping pulls A and D means inward slightly.
        assert!(
            (mean - bucket.mean_grade() / 4.0).abs() < 0.05,
            "{bucket:?}: {mean}"
        );
    }
}

#[test]
fn preset_parsing_and_shapes() {
    assert_eq!("d3".parse::<Preset>().unwrap(), Preset::D3);
    assert!("D4".parse::<Preset>().is_err());
    assert_eq!(Preset::D3.shapes(2), vec![(7.5, 1.0), (1.0, 7.5)]);
    assert_eq!(Preset::D1.shapes(3).len(), 3);
    let cfg = DatasetConfig::preset(Preset::D2, 11, 3, 2, 0).unwrap();
    assert_eq!(
        cfg.groups.iter().map(|g| g.count).collect::<Vec<_>>(),
        vec![4, 4, 3]
    );
    assert!(DatasetConfig::preset(Preset::D2, 2, 3, 2, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn masses_are_a_distribution(alpha in 0.5f64..12.0, beta in 0.5f64..12.0) {
        let masses = bucket_distribution(alpha, beta).unwrap();
        prop_assert!(masses.iter().all(|&m| (0.0..=1.0).contains(&m)));
        prop_assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        if alpha >= 1.0 && beta >= 1.0 {
            // Simpson converges slowly next to the x^(a-1) cusp when a < 2.
            let tol = if alpha >= 2.0 && beta >= 2.0 { 1e-8 } else { 1e-5 };
            let want = oracle_masses(alpha, beta);
            for (g, w) in masses.iter().zip(want) {
                prop_assert!((g - w).abs() < tol);
            }
        }
    }

    #[test]
    fn generated_datasets_are_valid_and_reproducible(
        preset in prop_oneof![Just(Preset::D1), Just(Preset::D2), Just(Preset::D3)],
        n in 4usize..120, m in 1usize..5, k in 1usize..5, seed in any::<u64>(),
    ) {
        prop_assume!(m <= n);
        let cfg = DatasetConfig::preset(preset, n, m, k, seed).unwrap();
        let inst = generate_dataset(&cfg).unwrap();
        prop_assert_eq!((inst.n(), inst.k(), inst.m()), (n, k, m));
        for i in 0..n {
            prop_assert!(inst.skill(i).iter().all(|v| (0.0..=1.0).contains(v)));
        }
        for q in 0..m {
            prop_assert!(!inst.group_members(q).is_empty());
        }
        prop_assert_eq!(&inst, &generate_dataset(&cfg).unwrap());

        let mut buf = Vec::new();
        write_roster(&inst, &mut buf).unwrap();
        prop_assert_eq!(&read_roster(buf.as_slice()).unwrap(), &inst);
    }
}
