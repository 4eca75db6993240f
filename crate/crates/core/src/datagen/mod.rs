//! Synthetic cohorts and roster files.
//!
//! Each student's overall performance is drawn from a Beta distribution and
//! binned into one of four grade buckets; the skills are then sampled around
//! the bucket's grade and scaled to `[0, 1]`.

mod buckets;
mod generator;
mod roster;

pub use buckets::{bucket_distribution, Bucket, BUCKET_MEANS, BUCKET_VARIANCE, GRADE_SCALE_MAX};
pub use generator::{
    generate_dataset, generate_group, DatasetConfig, GeneratedStudent, GroupGenSpec, Preset,
    SkillNoise,
};
pub use roster::{load_instance, read_roster, write_roster, RosterError};
