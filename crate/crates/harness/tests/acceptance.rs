//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line to stderr
//! (uncaptured) and then asserts the verdict.

#[path = "../../core/tests/common/mod.rs"]
mod oracle;

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fairteams::datagen::{bucket_distribution, generate_dataset, DatasetConfig, Preset};
use fairteams::initial::{gmbf, random_init};
use fairteams::objective::{meets_requirements, team_skill_sums};
use fairteams::{
    pipeline, Assignment, BenefitMatrix, InitMethod, Instance, RefineConfig, Refiner, SolverState,
    TaskSpec,
};
use fairteams_harness::{
    run_experiment, ExperimentConfig, ExperimentResult, Greedy, Method, TaskParams,
};
use oracle::{
    best_single_move_gain, for_each_partition, naive_f, random_labels, random_problem, Problem, TOL,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, title: &str, pass: bool, detail: String) {
    let line = format!(
        "{} criterion {id}: {title}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    // Written to the raw handle so the line shows even when output is captured.
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} ({title}) failed: {detail}");
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    if s.len().is_multiple_of(2) {
        (s[mid - 1] + s[mid]) / 2.0
    } else {
        s[mid]
    }
}

fn problem_of(instance: &Instance, spec: &TaskSpec) -> Problem {
    Problem {
        skills: instance.skill_rows(),
        groups: instance.groups().to_vec(),
        m: instance.m(),
        req: spec.requirements.clone(),
        eps: spec.benefit_epsilon,
        gamma: spec.gamma,
        delta: spec.delta,
    }
}

fn column(
    result: &ExperimentResult,
    method: Method,
    pick: fn(&fairteams_harness::MetricsRecord) -> f64,
) -> Vec<f64> {
    result.method_rows(&method.to_string()).map(pick).collect()
}

fn experiment(preset: Preset, methods: Vec<Method>, task: TaskParams) -> ExperimentResult {
    let cfg = ExperimentConfig {
        methods,
        task,
        ..ExperimentConfig::new(preset, 100, (0..10).collect())
    };
    let result = run_experiment(&cfg).unwrap();
    assert!(result.failures.is_empty(), "{:?}", result.failures);
    result
}

#[test]
fn criterion_01_gain_matches_naive_difference() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut checked, mut worst) = (0usize, 0.0f64);
    while checked < 1000 {
        let n = rng.random_range(2..=50);
        let k = rng.random_range(1..=4);
        let m = rng.random_range(1..=3.min(n));
        let p = random_problem(&mut rng, n, k, m);
        let teams = rng.random_range(2..=(n / 2).max(2)).min(n);
        let labels = random_labels(&mut rng, n, teams);
        let (instance, spec) = (p.instance(), p.spec());
        let benefit = BenefitMatrix::compute(&instance, p.eps);
        let mut state = SolverState::new(
            &instance,
            &spec,
            &benefit,
            &Assignment::new(labels).unwrap(),
        )
        .unwrap();
        for _ in 0..30 {
            let live: Vec<usize> = (0..state.slots()).filter(|&s| state.is_live(s)).collect();
            if live.len() < 2 {
                break;
            }
            let student = rng.random_range(0..n);
            let others: Vec<usize> = live
                .into_iter()
                .filter(|&s| s != state.team_of(student))
                .collect();
            let dest = others[rng.random_range(0..others.len())];
            let mv = state.make_move(student, dest).unwrap();
            let mut after = state.labels().to_vec();
            after[student] = dest;
            let expected = naive_f(&p, state.labels()) - naive_f(&p, &after);
            worst = worst.max((state.move_gain(mv).unwrap() - expected).abs());
            checked += 1;
            state.apply(mv).unwrap();
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "incremental move gain equals naive objective difference",
        worst <= TOL && within(elapsed, 60),
        format!("{checked} moves, max error {worst:.2e}, {elapsed:.1?}"),
    );
}

#[test]
fn criterion_02_sahc_is_locally_optimal() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut violations = 0;
    let mut best_left = f64::NEG_INFINITY;
    for _ in 0..50 {
        let n = rng.random_range(4..=30);
        let k = rng.random_range(1..=4);
        let m = rng.random_range(1..=3);
        let p = random_problem(&mut rng, n, k, m);
        let teams = rng.random_range(1..=n / 2);
        let labels = random_labels(&mut rng, n, teams);
        let (instance, spec) = (p.instance(), p.spec());
        let benefit = BenefitMatrix::compute(&instance, p.eps);
        let out = Refiner::Sahc
            .run(
                &instance,
                &spec,
                &benefit,
                &Assignment::new(labels).unwrap(),
                &RefineConfig::default(),
            )
            .unwrap();
        let best = best_single_move_gain(&p, out.assignment.labels());
        best_left = best_left.max(best);
        if best > TOL {
            violations += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        2,
        "SAHC output admits no improving single move",
        violations == 0 && within(elapsed, 60),
        format!("50 instances, {violations} with an improving move, best remaining gain {best_left:.2e}, {elapsed:.1?}"),
    );
}

#[test]
fn criterion_03_small_instance_optimality_gap() {
    let start = Instant::now();
    let spec = TaskSpec::standard(2);
    let (mut close, mut above_random) = (0, 0);
    let mut worst_gap = 0.0f64;
    for seed in 0..50u64 {
        let preset = Preset::ALL[seed as usize % 3];
        let instance =
            generate_dataset(&DatasetConfig::preset(preset, 8, 2, 2, seed).unwrap()).unwrap();
        let p = problem_of(&instance, &spec);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for_each_partition(8, 3, &mut |labels| {
            let f = naive_f(&p, labels);
            lo = lo.min(f);
            hi = hi.max(f);
        });
        let benefit = BenefitMatrix::compute(&instance, 0.0);
        let fern = pipeline::fern(&instance, &spec, &benefit).unwrap().refined;
        let f = naive_f(&p, fern.assignment.labels());
        assert!((f - fern.objective.f).abs() < TOL);
        let gap = (f - lo) / (hi - lo);
        worst_gap = worst_gap.max(gap);
        if gap <= 0.05 + TOL {
            close += 1;
        }
        let teams = gmbf(&instance, &spec, &benefit).team_count();
        let random: Vec<f64> = (0..20)
            .map(|s| naive_f(&p, random_init(8, teams, s).unwrap().labels()))
            .collect();
        if f > mean(&random) + TOL {
            above_random += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        3,
        "FERN within 5% of the enumerated optimum range",
        close >= 45 && above_random == 0 && within(elapsed, 120),
        format!(
            "{close}/50 within 5%, worst gap {:.1}%, {above_random} above the random mean, {elapsed:.1?}",
            100.0 * worst_gap
        ),
    );
}

#[test]
fn criterion_04_bucket_masses_match_published_table() {
    // Published bucket percentages (A, B, C, D) per Beta shape.
    const TABLE: [((f64, f64), [f64; 4]); 5] = [
        ((6.0, 4.0), [16.2, 57.0, 25.7, 1.1]),
        ((8.0, 3.2), [42.3, 51.0, 6.6, 0.1]),
        ((7.0, 5.5), [7.4, 59.4, 32.2, 1.0]),
        ((7.5, 1.0), [87.7, 11.8, 0.5, 0.0]),
        ((1.0, 7.5), [0.0, 0.6, 11.1, 88.3]),
    ];
    let integrate = |a: f64, b: f64, lo: f64, hi: f64| {
        let steps = 40_000;
        let h = (hi - lo) / steps as f64;
        let f = |x: f64| x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0);
        let inner: f64 = (1..steps)
            .map(|i| f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
            .sum();
        (f(lo) + inner + f(hi)) * h / 3.0
    };
    let mut misses = Vec::new();
    let mut oracle_gap = 0.0f64;
    for ((a, b), published) in TABLE {
        let masses = bucket_distribution(a, b).unwrap();
        let total = integrate(a, b, 0.0, 1.0);
        let bounds = [(0.75, 1.0), (0.5, 0.75), (0.25, 0.5), (0.0, 0.25)];
        for (i, (lo, hi)) in bounds.into_iter().enumerate() {
            let numeric = 100.0 * integrate(a, b, lo, hi) / total;
            let pct = 100.0 * masses[i];
            oracle_gap = oracle_gap.max((pct - numeric).abs());
            if (pct - published[i]).abs() > 0.5 {
                misses.push(format!(
                    "Beta({a},{b}) {}: {pct:.2} vs {}",
                    "ABCD".as_bytes()[i] as char,
                    published[i]
                ));
            }
        }
    }
    verdict(
        4,
        "bucket masses within 0.5 points of the published table",
        misses.is_empty() && oracle_gap < 1e-4,
        format!(
            "integration agrees to {oracle_gap:.1e} pt; {} of 20 cells off: {}",
            misses.len(),
            misses.join("; ")
        ),
    );
}

#[test]
fn criterion_05_trend_on_mirrored_groups() {
    let start = Instant::now();
    let result = experiment(
        Preset::D3,
        vec![Method::Umeans, Method::Gmbf, Method::FERN],
        TaskParams::default(),
    );
    let y = |m| mean(&column(&result, m, |r| r.y_pct));
    let z = |m| mean(&column(&result, m, |r| r.z_pct));
    let (y_fern, y_umeans, y_gmbf) = (y(Method::FERN), y(Method::Umeans), y(Method::Gmbf));
    let (z_fern, z_umeans) = (z(Method::FERN), z(Method::Umeans));
    let elapsed = start.elapsed();
    verdict(
        5,
        "FERN beats Umeans and GMBF on mean benefit and variance",
        y_fern - y_umeans >= 20.0 && z_fern < z_umeans / 10.0 && y_fern > y_gmbf && within(elapsed, 600),
        format!(
            "Y: FERN {y_fern:.2}, Umeans {y_umeans:.2}, GMBF {y_gmbf:.2}; Z: FERN {z_fern:.2}, Umeans {z_umeans:.2}; {elapsed:.1?}"
        ),
    );
}

#[test]
fn criterion_06_difficulty_ordering() {
    let start = Instant::now();
    let z: Vec<f64> = Preset::ALL
        .iter()
        .map(|&p| {
            let result = experiment(p, vec![Method::Random], TaskParams::default());
            median(&column(&result, Method::Random, |r| r.z_pct))
        })
        .collect();
    let elapsed = start.elapsed();
    verdict(
        6,
        "random-team variance orders the presets",
        z[2] > z[1] && z[1] > z[0] && within(elapsed, 120),
        format!(
            "median Z: D1 {:.2}, D2 {:.2}, D3 {:.2}; {elapsed:.1?}",
            z[0], z[1], z[2]
        ),
    );
}

#[test]
fn criterion_07_fairness_term_lowers_variance() {
    let start = Instant::now();
    let z_with = |delta: f64| {
        let task = TaskParams {
            delta,
            ..TaskParams::default()
        };
        median(&column(
            &experiment(Preset::D3, vec![Method::FERN], task),
            Method::FERN,
            |r| r.z_pct,
        ))
    };
    let (fair, unfair) = (z_with(1.0), z_with(0.0));
    let elapsed = start.elapsed();
    verdict(
        7,
        "fairness weight does not raise group variance",
        fair <= unfair && within(elapsed, 600),
        format!("median Z with fairness {fair:.2}, without {unfair:.2}; {elapsed:.1?}"),
    );
}

#[test]
fn criterion_08_fmhc_not_worse_than_sahc() {
    let start = Instant::now();
    let sahc = Method::Pipeline {
        init: Greedy::Gmbf,
        refiner: Refiner::Sahc,
    };
    let mut pass = true;
    let mut detail = Vec::new();
    for preset in [Preset::D2, Preset::D3] {
        let result = experiment(preset, vec![sahc, Method::FERN], TaskParams::default());
        let f_fmhc = median(&column(&result, Method::FERN, |r| r.objective));
        let f_sahc = median(&column(&result, sahc, |r| r.objective));
        pass &= f_fmhc <= f_sahc;
        detail.push(format!("{preset}: FMHC {f_fmhc:.4}, SAHC {f_sahc:.4}"));
    }
    let elapsed = start.elapsed();
    verdict(
        8,
        "FMHC median objective at most SAHC's",
        pass && within(elapsed, 600),
        format!("{}; {elapsed:.1?}", detail.join("; ")),
    );
}

#[test]
fn criterion_09_structural_postconditions() {
    let start = Instant::now();
    let strategy = (
        any::<u64>(),
        0usize..3,
        2usize..=60,
        1usize..=3,
        1usize..=4,
        0.0f64..3.0,
        (0.0f64..2.0, 0.0f64..2.0),
        0usize..3,
        prop_oneof![Just(Refiner::Sahc), Just(Refiner::Fmhc)],
    );
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    let outcome = runner.run(
        &strategy,
        |(seed, preset, n, m, k, r, (gamma, delta), init, refiner)| {
            let m = m.min(n);
            let cfg = DatasetConfig::preset(Preset::ALL[preset], n, m, k, seed).unwrap();
            let instance = generate_dataset(&cfg).unwrap();
            let spec = TaskSpec::new(vec![r; k], 0.0, gamma, delta).unwrap();
            let benefit = BenefitMatrix::compute(&instance, 0.0);
            let init = [InitMethod::Gmbf, InitMethod::Lmbf, InitMethod::Lmbff][init];
            let out = pipeline::solve(
                &instance,
                &spec,
                &benefit,
                init,
                refiner,
                &RefineConfig::default(),
            )
            .unwrap();
            for a in [&out.initial, &out.refined.assignment] {
                prop_assert_eq!(a.n(), n);
                let sizes = a.team_sizes();
                prop_assert_eq!(sizes.iter().sum::<usize>(), n);
                prop_assert!(sizes.iter().all(|&s| s > 0));
            }
            prop_assert_eq!(out.refined.assignment.singleton_count(), 0);
            let start = gmbf(&instance, &spec, &benefit);
            let sums = team_skill_sums(&instance, &start);
            prop_assert!(sums[..sums.len() - 1]
                .iter()
                .all(|s| meets_requirements(s, &spec.requirements)));
            Ok(())
        },
    );
    let elapsed = start.elapsed();
    let detail = match &outcome {
        Ok(()) => format!("200 random configurations, {elapsed:.1?}"),
        Err(e) => format!("{e}"),
    };
    verdict(
        9,
        "pipeline outputs are total without singletons",
        outcome.is_ok() && within(elapsed, 60),
        detail,
    );
}

fn run_cli(dir: &Path, args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_fairteams"))
        .args(args)
        .current_dir(dir)
        .status()
        .unwrap();
    assert!(status.success(), "fairteams {args:?} exited with {status}");
}

#[test]
fn criterion_10_cli_is_deterministic() {
    let invocations: [&[&str]; 6] = [
        &[
            "generate",
            "--preset",
            "D3",
            "--n",
            "100",
            "--seed",
            "7",
            "--out",
            "roster.csv",
        ],
        &[
            "solve",
            "--roster",
            "roster.csv",
            "--out",
            "fern.csv",
            "--metrics",
            "fern_metrics.csv",
        ],
        &[
            "solve",
            "--roster",
            "roster.csv",
            "--method",
            "umeans",
            "--seed",
            "3",
            "--out",
            "umeans.csv",
            "--metrics",
            "umeans_metrics.csv",
        ],
        &[
            "solve",
            "--roster",
            "roster.csv",
            "--method",
            "ga",
            "--ga-generations",
            "20",
            "--out",
            "ga.csv",
            "--metrics",
            "ga_metrics.csv",
        ],
        &[
            "evaluate",
            "--roster",
            "roster.csv",
            "--assignment",
            "fern.csv",
            "--metrics",
            "eval.csv",
        ],
        &[
            "experiment",
            "--n",
            "40",
            "--runs",
            "3",
            "--reps",
            "2",
            "--ga-generations",
            "10",
            "--out",
            "sweep.csv",
        ],
    ];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        for args in invocations {
            run_cli(dir.path(), args);
        }
    }
    let mut files: Vec<String> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    let differing: Vec<&String> = files
        .iter()
        .filter(|f| {
            std::fs::read(dirs[0].path().join(f)).unwrap()
                != std::fs::read(dirs[1].path().join(f)).unwrap()
        })
        .collect();
    verdict(
        10,
        "repeated CLI runs give byte-identical files",
        files.len() == 9 && differing.is_empty(),
        format!("{} files compared, differing: {differing:?}", files.len()),
    );
}
