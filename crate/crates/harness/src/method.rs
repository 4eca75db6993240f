//! Team formation methods available from the command line and experiments.

use std::fmt;
use std::str::FromStr;

use fairteams::baselines::{genetic_algorithm, uniform_kmeans, GaParams};
use fairteams::initial::{gmbf, random_init};
use fairteams::{
    pipeline, Assignment, BenefitMatrix, InitMethod, Instance, RefineConfig, Refiner, TaskSpec,
};

use crate::error::HarnessError;

/// Greedy initializer of a refinement pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Greedy {
    Gmbf,
    Lmbf,
    Lmbff,
}

impl Greedy {
    fn init(self) -> InitMethod {
        match self {
            Greedy::Gmbf => InitMethod::Gmbf,
            Greedy::Lmbf => InitMethod::Lmbf,
            Greedy::Lmbff => InitMethod::Lmbff,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Greedy::Gmbf => "GMBF",
            Greedy::Lmbf => "LMBF",
            Greedy::Lmbff => "LMBFF",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Greedy initialization followed by refinement and singleton cleanup.
    Pipeline { init: Greedy, refiner: Refiner },
    /// Balanced random teams, as many as GMBF builds.
    Random,
    /// Uniform k-means teams, as many as GMBF builds.
    Umeans,
    /// Genetic algorithm with as many team ids as FERN ends up with.
    Ga,
    /// GMBF alone.
    Gmbf,
}

impl Method {
    /// GMBF followed by FMHC.
    pub const FERN: Method = Method::Pipeline {
        init: Greedy::Gmbf,
        refiner: Refiner::Fmhc,
    };

    /// The five methods compared in experiments by default.
    pub const STANDARD: [Method; 5] = [
        Method::Random,
        Method::Umeans,
        Method::Ga,
        Method::Gmbf,
        Method::FERN,
    ];

    /// Whether results depend on the seed.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Method::Random | Method::Umeans | Method::Ga)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            m if m == Method::FERN => f.write_str("FERN"),
            Method::Pipeline { init, refiner } => {
                let r = match refiner {
                    Refiner::Sahc => "SAHC",
                    Refiner::Fmhc => "FMHC",
                };
                write!(f, "{}+{r}", init.name())
            }
            Method::Random => f.write_str("Random"),
            Method::Umeans => f.write_str("Umeans"),
            Method::Ga => f.write_str("GA"),
            Method::Gmbf => f.write_str("GMBF"),
        }
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    /// Case-insensitive: `fern`, `random`, `umeans`, `ga`, `gmbf`, or
    /// `<gmbf|lmbf|lmbff>+<sahc|fmhc>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let simple = match lower.as_str() {
            "fern" => Some(Method::FERN),
            "random" => Some(Method::Random),
            "umeans" => Some(Method::Umeans),
            "ga" => Some(Method::Ga),
            "gmbf" => Some(Method::Gmbf),
            _ => None,
        };
        if let Some(m) = simple {
            return Ok(m);
        }
        let unknown = || {
            HarnessError::Invalid(format!(
            "unknown method {s:?} (expected fern, random, umeans, ga, gmbf or <gmbf|lmbf|lmbff>+<sahc|fmhc>)"
        ))
        };
        let (init, refiner) = lower.split_once('+').ok_or_else(unknown)?;
        let init = match init {
            "gmbf" => Greedy::Gmbf,
            "lmbf" => Greedy::Lmbf,
            "lmbff" => Greedy::Lmbff,
            _ => return Err(unknown()),
        };
        let refiner = match refiner {
            "sahc" => Refiner::Sahc,
            "fmhc" => Refiner::Fmhc,
            _ => return Err(unknown()),
        };
        Ok(Method::Pipeline { init, refiner })
    }
}

/// Knobs of the genetic algorithm other than the team count and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaSettings {
    pub population: usize,
    pub generations: usize,
    pub mutation_prob: f64,
}

impl Default for GaSettings {
    fn default() -> Self {
        let p = GaParams::standard(1, 0);
        Self {
            population: p.population,
            generations: p.generations,
            mutation_prob: p.mutation_prob,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveSettings {
    pub refine: RefineConfig,
    pub ga: GaSettings,
}

/// Runs `method` once. `seed` only matters for stochastic methods.
pub fn solve(
    method: Method,
    instance: &Instance,
    spec: &TaskSpec,
    benefit: &BenefitMatrix,
    settings: &SolveSettings,
    seed: u64,
) -> fairteams::Result<Assignment> {
    spec.validate_for(instance)?;
    let gmbf_teams = || gmbf(instance, spec, benefit).team_count();
    match method {
        Method::Pipeline { init, refiner } => pipeline::solve(
            instance,
            spec,
            benefit,
            init.init(),
            refiner,
            &settings.refine,
        )
        .map(|out| out.refined.assignment),
        Method::Gmbf => Ok(gmbf(instance, spec, benefit)),
        Method::Random => random_init(instance.n(), gmbf_teams(), seed),
        Method::Umeans => uniform_kmeans(instance, gmbf_teams(), seed),
        Method::Ga => {
            let fern = pipeline::solve(
                instance,
                spec,
                benefit,
                InitMethod::Gmbf,
                Refiner::Fmhc,
                &settings.refine,
            )?;
            let params = GaParams {
                population: settings.ga.population,
                generations: settings.ga.generations,
                mutation_prob: settings.ga.mutation_prob,
                ..GaParams::standard(fern.refined.assignment.team_count(), seed)
            };
            genetic_algorithm(instance, spec, benefit, &params).map(|out| out.assignment)
        }
    }
}
