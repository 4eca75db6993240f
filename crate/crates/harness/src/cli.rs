//! The `fairteams` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use fairteams::datagen::{
    generate_dataset, load_instance, write_roster, DatasetConfig, Preset, SkillNoise,
};
use fairteams::{BenefitMatrix, Instance, RefineConfig};

use crate::assignment::{read_assignment, write_assignment};
use crate::config::FileConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, run_seed, ExperimentConfig, TaskParams};
use crate::method::{solve, GaSettings, Method, SolveSettings};
use crate::metrics::{evaluate_solution, write_metrics};

#[derive(Debug, Parser)]
#[command(
    name = "fairteams",
    version,
    about = "Fair team formation for student cohorts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic roster CSV.
    Generate(GenerateArgs),
    /// Form teams for one cohort and report metrics.
    Solve(SolveArgs),
    /// Score an existing assignment CSV.
    Evaluate(EvaluateArgs),
    /// Run several methods over a sweep of seeds.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args, Default)]
pub struct DatasetArgs {
    /// Synthetic difficulty preset: D1, D2 or D3 [default: D3].
    #[arg(long)]
    pub preset: Option<String>,
    /// Number of students [default: 100].
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of protected groups [default: 2].
    #[arg(long)]
    pub groups: Option<usize>,
    /// Number of skills [default: 2].
    #[arg(long)]
    pub skills: Option<usize>,
    /// Spread of skill draws: `variance` or `stddev` [default: variance].
    #[arg(long)]
    pub noise: Option<String>,
    /// Seed for data generation and stochastic methods [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct TaskArgs {
    /// Skill requirement per team, one value or one per skill [default: 2].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub requirement: Option<Vec<f64>>,
    /// Weight of the mean individual benefit [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Weight of the group-benefit variance [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Margin a teammate's skill must exceed to count as a benefit [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub benefit_epsilon: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct SearchArgs {
    /// Minimum pass gain for FMHC to continue [default: 1e-4].
    #[arg(long, allow_negative_numbers = true)]
    pub gain_epsilon: Option<f64>,
    /// Cap on FMHC passes or SAHC moves.
    #[arg(long)]
    pub max_passes: Option<usize>,
    /// GA population size [default: 200].
    #[arg(long)]
    pub ga_population: Option<usize>,
    /// GA generations [default: 300].
    #[arg(long)]
    pub ga_generations: Option<usize>,
    /// GA per-offspring mutation probability [default: 0.1].
    #[arg(long, allow_negative_numbers = true)]
    pub ga_mutation: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// Output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat TOML file with defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Roster CSV; replaces the synthetic dataset.
    #[arg(long)]
    pub roster: Option<PathBuf>,
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    pub task: TaskArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// fern, random, umeans, ga, gmbf or <gmbf|lmbf|lmbff>+<sahc|fmhc> [default: fern].
    #[arg(long)]
    pub method: Option<String>,
    /// Assignment CSV output [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Metrics CSV output [default: standard output].
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Record wall-clock runtime instead of 0.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub roster: Option<PathBuf>,
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// Assignment CSV to score.
    #[arg(long)]
    pub assignment: Option<PathBuf>,
    #[command(flatten)]
    pub task: TaskArgs,
    /// Metrics CSV output [default: standard output].
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// Explicit seed list; otherwise `--runs` seeds starting at `--seed`.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub seeds: Option<Vec<u64>>,
    /// Number of consecutive seeds [default: 10].
    #[arg(long)]
    pub runs: Option<usize>,
    /// Comma-separated methods [default: random,umeans,ga,gmbf,fern].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub methods: Option<Vec<String>>,
    /// Repetitions averaged per seed for stochastic methods [default: 10].
    #[arg(long)]
    pub reps: Option<usize>,
    #[command(flatten)]
    pub task: TaskArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Metrics CSV output [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    path.map_or_else(|| Ok(FileConfig::default()), FileConfig::load)
}

fn parse_noise(s: &str) -> Result<SkillNoise> {
    match s.to_ascii_lowercase().as_str() {
        "variance" => Ok(SkillNoise::Variance),
        "stddev" | "std" => Ok(SkillNoise::StdDev),
        _ => Err(HarnessError::Invalid(format!(
            "unknown noise {s:?} (expected variance or stddev)"
        ))),
    }
}

struct Dataset {
    preset: Preset,
    n: usize,
    groups: usize,
    skills: usize,
    noise: SkillNoise,
    seed: u64,
    /// Whether any dataset flag or key was set explicitly.
    explicit: bool,
}

impl DatasetArgs {
    fn resolve(&self, file: &FileConfig) -> Result<Dataset> {
        let preset = self.preset.clone().or_else(|| file.preset.clone());
        let noise = self.noise.clone().or_else(|| file.noise.clone());
        let n = self.n.or(file.n);
        let groups = self.groups.or(file.groups);
        let skills = self.skills.or(file.skills);
        let explicit = preset.is_some()
            || noise.is_some()
            || n.is_some()
            || groups.is_some()
            || skills.is_some();
        Ok(Dataset {
            preset: preset.as_deref().unwrap_or("D3").parse()?,
            n: n.unwrap_or(100),
            groups: groups.unwrap_or(2),
            skills: skills.unwrap_or(2),
            noise: noise
                .as_deref()
                .map_or(Ok(SkillNoise::default()), parse_noise)?,
            seed: self.seed.or(file.seed).unwrap_or(0),
            explicit,
        })
    }
}

impl Dataset {
    fn generate(&self) -> Result<Instance> {
        let mut cfg =
            DatasetConfig::preset(self.preset, self.n, self.groups, self.skills, self.seed)?;
        cfg.noise = self.noise;
        Ok(generate_dataset(&cfg)?)
    }
}

impl TaskArgs {
    fn resolve(&self, file: &FileConfig) -> TaskParams {
        let d = TaskParams::default();
        TaskParams {
            requirement: self
                .requirement
                .clone()
                .or_else(|| file.requirement.clone()),
            gamma: self.gamma.or(file.gamma).unwrap_or(d.gamma),
            delta: self.delta.or(file.delta).unwrap_or(d.delta),
            benefit_epsilon: self
                .benefit_epsilon
                .or(file.benefit_epsilon)
                .unwrap_or(d.benefit_epsilon),
        }
    }
}

impl SearchArgs {
    fn resolve(&self, file: &FileConfig) -> Result<SolveSettings> {
        let ga = GaSettings::default();
        let settings = SolveSettings {
            refine: RefineConfig {
                gain_epsilon: self
                    .gain_epsilon
                    .or(file.gain_epsilon)
                    .unwrap_or(RefineConfig::default().gain_epsilon),
                max_passes: self.max_passes.or(file.max_passes),
            },
            ga: GaSettings {
                population: self
                    .ga_population
                    .or(file.ga_population)
                    .unwrap_or(ga.population),
                generations: self
                    .ga_generations
                    .or(file.ga_generations)
                    .unwrap_or(ga.generations),
                mutation_prob: self
                    .ga_mutation
                    .or(file.ga_mutation)
                    .unwrap_or(ga.mutation_prob),
            },
        };
        settings.refine.validate()?;
        Ok(settings)
    }
}

/// Roster file or synthetic cohort, plus the label used in the dataset column.
fn load_source(
    roster: Option<&PathBuf>,
    file: &FileConfig,
    dataset: &Dataset,
) -> Result<(Instance, String)> {
    match roster.or(file.roster.as_ref()) {
        Some(path) => {
            if dataset.explicit {
                return Err(HarnessError::Invalid(
                    "give either a roster or synthetic dataset settings, not both".into(),
                ));
            }
            let instance = load_instance(path).map_err(|source| HarnessError::Roster {
                path: path.clone(),
                source,
            })?;
            let label = path
                .file_stem()
                .map_or_else(|| "roster".into(), |s| s.to_string_lossy().into_owned());
            Ok((instance, label))
        }
        None => Ok((dataset.generate()?, dataset.preset.to_string())),
    }
}

/// Opens `path` for writing, or hands out `stdout`.
fn sink<'a>(path: Option<&PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(
            File::create(p).map_err(|e| HarnessError::io(p, e))?,
        ))),
        None => Ok(Box::new(stdout)),
    }
}

fn generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let file = load_config(args.config.as_deref())?;
    let instance = args.dataset.resolve(&file)?.generate()?;
    let path = args.out.clone().or(file.out.clone());
    let mut w = sink(path.as_ref(), out)?;
    write_roster(&instance, &mut w).map_err(|source| HarnessError::Roster {
        path: path.unwrap_or_else(|| "<stdout>".into()),
        source,
    })?;
    w.flush().map_err(|e| HarnessError::io("<output>", e))
}

fn solve_cmd(args: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let file = load_config(args.config.as_deref())?;
    let dataset = args.dataset.resolve(&file)?;
    let (instance, label) = load_source(args.roster.as_ref(), &file, &dataset)?;
    let spec = args.task.resolve(&file).spec_for(instance.k())?;
    let settings = args.search.resolve(&file)?;
    let method: Method = args
        .method
        .as_deref()
        .or(file.method.as_deref())
        .unwrap_or("fern")
        .parse()?;
    let timing = args.timing || file.timing.unwrap_or(false);

    let benefit = BenefitMatrix::compute(&instance, spec.benefit_epsilon);
    let start = Instant::now();
    let assignment = solve(
        method,
        &instance,
        &spec,
        &benefit,
        &settings,
        run_seed(dataset.seed, 0),
    )?;
    let elapsed = start.elapsed();
    let mut record = evaluate_solution(&instance, &spec, &assignment).with_identity(
        &label,
        &method.to_string(),
        dataset.seed,
    );
    if timing {
        record.runtime_ms = elapsed.as_secs_f64() * 1e3;
    }

    let assignment_path = args.out.clone().or(file.out.clone());
    let metrics_path = args.metrics.clone().or(file.metrics.clone());
    {
        let mut w = sink(assignment_path.as_ref(), out)?;
        write_assignment(&instance, &assignment, &mut w)?;
    }
    if assignment_path.is_none() && metrics_path.is_none() {
        writeln!(out).map_err(|e| HarnessError::io("<stdout>", e))?;
    }
    let mut w = sink(metrics_path.as_ref(), out)?;
    write_metrics(&[record], instance.group_labels(), &mut w)
}

fn evaluate_cmd(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let file = load_config(args.config.as_deref())?;
    let dataset = args.dataset.resolve(&file)?;
    let (instance, label) = load_source(args.roster.as_ref(), &file, &dataset)?;
    let spec = args.task.resolve(&file).spec_for(instance.k())?;
    let path = args
        .assignment
        .clone()
        .or(file.assignment.clone())
        .ok_or_else(|| HarnessError::Invalid("--assignment is required".into()))?;
    let reader = File::open(&path).map_err(|e| HarnessError::io(&path, e))?;
    let assignment = read_assignment(&instance, reader)?;
    let record = evaluate_solution(&instance, &spec, &assignment).with_identity(
        &label,
        "evaluate",
        dataset.seed,
    );
    let mut w = sink(args.metrics.clone().or(file.metrics.clone()).as_ref(), out)?;
    write_metrics(&[record], instance.group_labels(), &mut w)
}

fn experiment_cmd(args: &ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let file = load_config(args.config.as_deref())?;
    let dataset = args.dataset.resolve(&file)?;
    let seeds = match args.seeds.clone().or(file.seeds.clone()) {
        Some(s) => s,
        None => {
            let runs = args.runs.or(file.runs).unwrap_or(10) as u64;
            (dataset.seed..dataset.seed + runs).collect()
        }
    };
    let methods = match args.methods.clone().or(file.methods.clone()) {
        Some(names) => names
            .iter()
            .map(|m| m.parse())
            .collect::<Result<Vec<Method>>>()?,
        None => Method::STANDARD.to_vec(),
    };
    let cfg = ExperimentConfig {
        preset: dataset.preset,
        n: dataset.n,
        groups: dataset.groups,
        skills: dataset.skills,
        noise: dataset.noise,
        seeds,
        methods,
        reps: args.reps.or(file.reps).unwrap_or(10),
        task: args.task.resolve(&file),
        settings: args.search.resolve(&file)?,
        timing: args.timing || file.timing.unwrap_or(false),
    };
    let result = run_experiment(&cfg)?;
    let mut w = sink(args.out.clone().or(file.out.clone()).as_ref(), out)?;
    result.write_csv(&mut w)?;
    for failure in &result.failures {
        let _ = writeln!(err, "run failed: {failure}");
    }
    Ok(result.failures.is_empty())
}

/// Parses `args` and runs the command, returning the process exit status:
/// 0 on success, 1 for invalid input or failed runs, 2 for file-system errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let outcome = match &cli.command {
        Command::Generate(a) => generate(a, out).map(|()| true),
        Command::Solve(a) => solve_cmd(a, out).map(|()| true),
        Command::Evaluate(a) => evaluate_cmd(a, out).map(|()| true),
        Command::Experiment(a) => experiment_cmd(a, out, err),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    run(std::env::args_os(), &mut out, &mut io::stderr())
}
