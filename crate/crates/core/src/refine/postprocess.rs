use crate::model::{Assignment, BenefitMatrix, Instance, TaskSpec};
use crate::objective::objective;
use crate::scalar::Scalar;

/// Drops empty teams and moves each singleton's student to the team that
/// yields the lowest objective, until no singleton remains (or one team is left).
///
/// `labels` may use any team ids; gaps are compacted away.
pub fn postprocess<T: Scalar>(
    instance: &Instance<T>,
    spec: &TaskSpec<T>,
    benefit: &BenefitMatrix,
    labels: &[usize],
) -> Assignment {
    let mut current = Assignment::compact(labels);
    while current.team_count() >= 2 {
        let sizes = current.team_sizes();
        let Some(lonely) = sizes.iter().position(|&s| s == 1) else {
            break;
        };
        let student = (0..current.n())
            .find(|&i| current.team_of(i) == lonely)
            .expect("singleton team has a member");
        let mut best: Option<(T, Assignment)> = None;
        for dest in (0..current.team_count()).filter(|&t| t != lonely) {
            let mut moved = current.labels().to_vec();
            moved[student] = dest;
            let candidate = Assignment::compact(&moved);
            let f = objective(instance, &candidate, spec, benefit).f;
            if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                best = Some((f, candidate));
            }
        }
        current = best.expect("at least one other team").1;
    }
    current
}
