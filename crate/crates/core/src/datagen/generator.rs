use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal};

use super::buckets::{check_shape, Bucket, BUCKET_VARIANCE, GRADE_SCALE_MAX};
use crate::error::{Error, Result};
use crate::model::Instance;

/// Size and Beta shape of one protected group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupGenSpec {
    pub count: usize,
    pub alpha: f64,
    pub beta: f64,
}

/// How the bucket spread constant is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SkillNoise {
    /// Spread is the variance of the normal draw (std = sqrt(0.1)).
    #[default]
    Variance,
    /// Spread is the standard deviation of the normal draw.
    StdDev,
}

impl SkillNoise {
    fn std_dev(self) -> f64 {
        match self {
            SkillNoise::Variance => BUCKET_VARIANCE.sqrt(),
            SkillNoise::StdDev => BUCKET_VARIANCE,
        }
    }
}

/// Preset difficulty levels: D1 has identical groups, D2 mildly different
/// ones and D3 mirror-image ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    D1,
    D2,
    D3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::D1, Preset::D2, Preset::D3];

    /// `(alpha, beta)` of the first and last group.
    fn endpoints(self) -> ((f64, f64), (f64, f64)) {
        match self {
            Preset::D1 => ((6.0, 4.0), (6.0, 4.0)),
            Preset::D2 => ((8.0, 3.2), (7.0, 5.5)),
            Preset::D3 => ((7.5, 1.0), (1.0, 7.5)),
        }
    }

    /// Beta shapes for `m` groups. Exact for `m <= 2`; for more groups the
    /// shapes are linearly interpolated between the two endpoint groups,
    /// which only approximates the published shapes.
    pub fn shapes(self, m: usize) -> Vec<(f64, f64)> {
        let ((a0, b0), (a1, b1)) = self.endpoints();
        match m {
            0 => Vec::new(),
            1 => vec![(a0, b0)],
            _ => (0..m)
                .map(|q| {
                    let t = q as f64 / (m - 1) as f64;
                    (a0 + t * (a1 - a0), b0 + t * (b1 - b0))
                })
                .collect(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::D1 => "D1",
            Preset::D2 => "D2",
            Preset::D3 => "D3",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "D1" => Ok(Preset::D1),
            "D2" => Ok(Preset::D2),
            "D3" => Ok(Preset::D3),
            _ => Err(Error::Parameter {
                name: "preset",
                reason: format!("unknown preset {s:?} (expected D1, D2 or D3)"),
            }),
        }
    }
}

/// Everything needed to generate a synthetic cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub n_students: usize,
    pub skill_dims: usize,
    pub groups: Vec<GroupGenSpec>,
    pub seed: u64,
    pub noise: SkillNoise,
}

impl DatasetConfig {
    /// Preset cohort with `m` equally sized groups (the first `n % m` groups
    /// get one extra student).
    pub fn preset(preset: Preset, n: usize, m: usize, k: usize, seed: u64) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::Parameter {
                name: "groups",
                reason: format!("need 1 <= groups <= students, got {m} groups for {n} students"),
            });
        }
        let groups = preset
            .shapes(m)
            .into_iter()
            .enumerate()
            .map(|(q, (alpha, beta))| GroupGenSpec {
                count: n / m + usize::from(q < n % m),
                alpha,
                beta,
            })
            .collect();
        Ok(Self {
            n_students: n,
            skill_dims: k,
            groups,
            seed,
            noise: SkillNoise::default(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let total: usize = self.groups.iter().map(|g| g.count).sum();
        if total != self.n_students {
            return Err(Error::Length {
                what: "sum of group counts",
                got: total,
                expected: self.n_students,
            });
        }
        if self.skill_dims == 0 {
            return Err(Error::NoSkills);
        }
        for g in &self.groups {
            check_shape(g.alpha, g.beta)?;
            if g.count == 0 {
                return Err(Error::Parameter {
                    name: "count",
                    reason: "every group needs at least one student".into(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedStudent {
    pub bucket: Bucket,
    pub skills: Vec<f64>,
}

/// Draws the students of one group.
pub fn generate_group<R: Rng + ?Sized>(
    spec: &GroupGenSpec,
    k: usize,
    noise: SkillNoise,
    rng: &mut R,
) -> Result<Vec<GeneratedStudent>> {
    check_shape(spec.alpha, spec.beta)?;
    let perf = Beta::new(spec.alpha, spec.beta).map_err(|e| Error::Parameter {
        name: "alpha/beta",
        reason: e.to_string(),
    })?;
    let normals: Vec<Normal<f64>> = Bucket::ALL
        .iter()
        .map(|b| Normal::new(b.mean_grade(), noise.std_dev()).expect("finite positive spread"))
        .collect();
    Ok((0..spec.count)
        .map(|_| {
            let bucket = Bucket::of_sample(perf.sample(rng));
            let skills = (0..k)
                .map(|_| (normals[bucket.index()].sample(rng) / GRADE_SCALE_MAX).clamp(0.0, 1.0))
                .collect();
            GeneratedStudent { bucket, skills }
        })
        .collect())
}

/// Generates the full cohort; group `q` of the config becomes protected group `q`.
pub fn generate_dataset(config: &DatasetConfig) -> Result<Instance<f64>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut skills = Vec::with_capacity(config.n_students);
    let mut groups = Vec::with_capacity(config.n_students);
    for (q, spec) in config.groups.iter().enumerate() {
        for student in generate_group(spec, config.skill_dims, config.noise, &mut rng)? {
            skills.push(student.skills);
            groups.push(q);
        }
    }
    let ids = (0..config.n_students).map(|i| format!("s{i:04}")).collect();
    let labels = (1..=config.groups.len()).map(|q| format!("q{q}")).collect();
    Instance::new(skills, groups, ids, labels)
}
