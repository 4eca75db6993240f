//! Fair team formation.
//!
//! Students with skill vectors and protected-group labels are partitioned
//! into teams that jointly meet a task's skill requirements, maximize how
//! many teammates each student can learn from, and keep that benefit even
//! across protected groups. The objective math is generic over [`Scalar`];
//! the aliases below fix it to `f64` (and `f32` with the `32` suffix).

pub mod baselines;
pub mod datagen;
pub mod error;
pub mod initial;
pub mod model;
pub mod objective;
pub mod pipeline;
pub mod refine;
pub mod scalar;

pub use error::{Error, Result};
pub use initial::InitMethod;
pub use model::{Assignment, BenefitMatrix};
pub use refine::{Move, Refiner};
pub use scalar::Scalar;

pub type Instance = model::Instance<f64>;
pub type TaskSpec = model::TaskSpec<f64>;
pub type ObjectiveBreakdown = objective::ObjectiveBreakdown<f64>;
pub type RefineConfig = refine::RefineConfig<f64>;
pub type RefineOutcome = refine::RefineOutcome<f64>;
pub type SolverState<'a> = refine::SolverState<'a, f64>;
pub type PipelineOutcome = pipeline::PipelineOutcome<f64>;

pub type Instance32 = model::Instance<f32>;
pub type TaskSpec32 = model::TaskSpec<f32>;
pub type ObjectiveBreakdown32 = objective::ObjectiveBreakdown<f32>;
pub type RefineConfig32 = refine::RefineConfig<f32>;
