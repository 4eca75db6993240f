//! Initial assignment followed by refinement.

use crate::error::Result;
use crate::initial::InitMethod;
use crate::model::{Assignment, BenefitMatrix, Instance, TaskSpec};
use crate::refine::{RefineConfig, RefineOutcome, Refiner};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct PipelineOutcome<T> {
    /// Output of the initializer, before refinement.
    pub initial: Assignment,
    pub refined: RefineOutcome<T>,
}

/// Builds an initial assignment with `init` and refines it with `refiner`.
/// GMBF followed by FMHC is the default combination.
pub fn solve<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
    init: InitMethod,
    refiner: Refiner,
    config: &RefineConfig<T>,
) -> Result<PipelineOutcome<T>> {
    spec.validate_for(instance)?;
    let initial = init.build(instance, spec, benefit)?;
    let refined = refiner.run(instance, spec, benefit, &initial, config)?;
    Ok(PipelineOutcome { initial, refined })
}

/// GMBF + FMHC with the default refinement settings.
pub fn fern<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
) -> Result<PipelineOutcome<T>> {
    solve(
        instance,
        spec,
        benefit,
        InitMethod::Gmbf,
        Refiner::Fmhc,
        &RefineConfig::default(),
    )
}
