//! Seed sweeps over synthetic cohorts.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use fairteams::datagen::{generate_dataset, DatasetConfig, Preset, SkillNoise};
use fairteams::{BenefitMatrix, Instance, TaskSpec};
use rayon::prelude::*;

use crate::error::{HarnessError, Result};
use crate::method::{solve, Method, SolveSettings};
use crate::metrics::{
    evaluate_solution, mean_record, standard_error_record, write_metrics, MetricsRecord,
};

/// Task parameters before the skill count is known.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskParams {
    /// One value per skill, or a single value for all of them. Defaults to 2.
    pub requirement: Option<Vec<f64>>,
    pub gamma: f64,
    pub delta: f64,
    pub benefit_epsilon: f64,
}

impl Default for TaskParams {
    fn default() -> Self {
        Self {
            requirement: None,
            gamma: 1.0,
            delta: 1.0,
            benefit_epsilon: 0.0,
        }
    }
}

impl TaskParams {
    pub fn spec_for(&self, skills: usize) -> Result<TaskSpec> {
        let requirements = match self.requirement.as_deref() {
            None => vec![2.0; skills],
            Some([r]) => vec![*r; skills],
            Some(r) if r.len() == skills => r.to_vec(),
            Some(r) => {
                return Err(HarnessError::Invalid(format!(
                    "{} requirement values given for {skills} skills",
                    r.len()
                )))
            }
        };
        Ok(TaskSpec::new(
            requirements,
            self.benefit_epsilon,
            self.gamma,
            self.delta,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub n: usize,
    pub groups: usize,
    pub skills: usize,
    pub noise: SkillNoise,
    /// One dataset per seed.
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    /// Repetitions averaged into each row of a stochastic method.
    pub reps: usize,
    pub task: TaskParams,
    pub settings: SolveSettings,
    /// Record wall-clock time; otherwise `runtime_ms` is 0.
    pub timing: bool,
}

impl ExperimentConfig {
    /// Two groups, two skills, the standard methods, ten repetitions.
    pub fn new(preset: Preset, n: usize, seeds: Vec<u64>) -> Self {
        Self {
            preset,
            n,
            groups: 2,
            skills: 2,
            noise: SkillNoise::default(),
            seeds,
            methods: Method::STANDARD.to_vec(),
            reps: 10,
            task: TaskParams::default(),
            settings: SolveSettings::default(),
            timing: false,
        }
    }

    fn dataset(&self, seed: u64) -> Result<DatasetConfig> {
        let mut cfg = DatasetConfig::preset(self.preset, self.n, self.groups, self.skills, seed)?;
        cfg.noise = self.noise;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Err(HarnessError::Invalid(msg.to_string()));
        if self.seeds.is_empty() {
            return invalid("no seeds given");
        }
        if self.methods.is_empty() {
            return invalid("no methods given");
        }
        if self.reps == 0 {
            return invalid("reps must be at least 1");
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(HarnessError::Invalid(format!("method {m} listed twice")));
            }
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return invalid("seeds must be distinct");
        }
        self.dataset(0)?;
        self.task.spec_for(self.skills)?;
        self.settings.refine.validate()?;
        Ok(())
    }
}

/// Seed of repetition `rep` of a stochastic method on the dataset drawn with
/// `seed`, decorrelated from the dataset's own stream.
pub fn run_seed(seed: u64, rep: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(rep as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A run that failed; the remaining runs of the batch still complete.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub method: String,
    pub seed: u64,
    pub message: String,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on seed {}: {}", self.method, self.seed, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub group_labels: Vec<String>,
    /// Per-seed rows, sorted by method name then seed.
    pub rows: Vec<MetricsRecord>,
    /// A `mean` and an `se` row per method, in method-name order.
    pub aggregates: Vec<MetricsRecord>,
    pub failures: Vec<RunFailure>,
}

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let all: Vec<MetricsRecord> = self.rows.iter().chain(&self.aggregates).cloned().collect();
        write_metrics(&all, &self.group_labels, writer)
    }

    /// Per-seed rows of one method.
    pub fn method_rows<'a>(
        &'a self,
        method: &'a str,
    ) -> impl Iterator<Item = &'a MetricsRecord> + 'a {
        self.rows.iter().filter(move |r| r.method == method)
    }
}

/// Evaluates one method on one dataset, averaging repetitions if the method
/// is stochastic.
#[allow(clippy::too_many_arguments)]
pub fn run_method(
    method: Method,
    instance: &Instance,
    spec: &TaskSpec,
    benefit: &BenefitMatrix,
    settings: &SolveSettings,
    seed: u64,
    reps: usize,
    timing: bool,
) -> fairteams::Result<MetricsRecord> {
    let reps = if method.is_stochastic() { reps } else { 1 };
    let mut records = Vec::with_capacity(reps);
    for rep in 0..reps {
        let start = Instant::now();
        let assignment = solve(
            method,
            instance,
            spec,
            benefit,
            settings,
            run_seed(seed, rep),
        )?;
        let elapsed = start.elapsed();
        let mut record = evaluate_solution(instance, spec, &assignment);
        if timing {
            record.runtime_ms = elapsed.as_secs_f64() * 1e3;
        }
        records.push(record);
    }
    Ok(mean_record(&records))
}

type SeedOutcome = (Vec<(String, u64, MetricsRecord)>, Vec<RunFailure>);

fn run_dataset(cfg: &ExperimentConfig, spec: &TaskSpec, seed: u64) -> SeedOutcome {
    let dataset = cfg.preset.to_string();
    let instance = match cfg.dataset(seed).and_then(|d| Ok(generate_dataset(&d)?)) {
        Ok(i) => i,
        Err(e) => {
            let failures = cfg
                .methods
                .iter()
                .map(|m| RunFailure {
                    method: m.to_string(),
                    seed,
                    message: e.to_string(),
                })
                .collect();
            return (Vec::new(), failures);
        }
    };
    let benefit = BenefitMatrix::compute(&instance, spec.benefit_epsilon);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &method in &cfg.methods {
        let name = method.to_string();
        match run_method(
            method,
            &instance,
            spec,
            &benefit,
            &cfg.settings,
            seed,
            cfg.reps,
            cfg.timing,
        ) {
            Ok(r) => rows.push((name.clone(), seed, r.with_identity(&dataset, &name, seed))),
            Err(e) => failures.push(RunFailure {
                method: name,
                seed,
                message: e.to_string(),
            }),
        }
    }
    (rows, failures)
}

/// Runs every method on the dataset of every seed. Datasets are processed in
/// parallel; the output does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let spec = cfg.task.spec_for(cfg.skills)?;
    let outcomes: Vec<SeedOutcome> = cfg
        .seeds
        .par_iter()
        .map(|&s| run_dataset(cfg, &spec, s))
        .collect();

    let mut keyed = Vec::new();
    let mut failures = Vec::new();
    for (rows, fails) in outcomes {
        keyed.extend(rows);
        failures.extend(fails);
    }
    keyed.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    failures.sort_by(|a, b| (&a.method, a.seed).cmp(&(&b.method, b.seed)));
    let rows: Vec<MetricsRecord> = keyed.into_iter().map(|(_, _, r)| r).collect();

    let mut names: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    names.dedup();
    let mut aggregates = Vec::new();
    for name in names {
        let group: Vec<MetricsRecord> = rows.iter().filter(|r| r.method == name).cloned().collect();
        aggregates.push(mean_record(&group).with_identity(&group[0].dataset, name, "mean"));
        aggregates.push(standard_error_record(&group).with_identity(&group[0].dataset, name, "se"));
    }

    Ok(ExperimentResult {
        group_labels: (1..=cfg.groups).map(|q| format!("q{q}")).collect(),
        rows,
        aggregates,
        failures,
    })
}
