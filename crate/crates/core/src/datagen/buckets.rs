use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};

/// Grade bucket means on the 0-4 grade scale, for A, B, C, D.
pub const BUCKET_MEANS: [f64; 4] = [3.85, 3.0, 2.0, 1.15];
/// Variance of the per-skill normal draw around the bucket mean.
pub const BUCKET_VARIANCE: f64 = 0.1;
pub const GRADE_SCALE_MAX: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bucket {
    A,
    B,
    C,
    D,
}

impl Bucket {
    pub const ALL: [Bucket; 4] = [Bucket::A, Bucket::B, Bucket::C, Bucket::D];

    /// Bucket of a performance sample in `[0, 1]`: the top quarter is A.
    pub fn of_sample(x: f64) -> Self {
        if x >= 0.75 {
            Bucket::A
        } else if x >= 0.5 {
            Bucket::B
        } else if x >= 0.25 {
            Bucket::C
        } else {
            Bucket::D
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Mean grade of the bucket on the 0-4 scale.
    pub fn mean_grade(self) -> f64 {
        BUCKET_MEANS[self.index()]
    }
}

pub(crate) fn check_shape(alpha: f64, beta: f64) -> Result<()> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Parameter {
                name,
                reason: format!("beta shape must be finite and > 0, got {v}"),
            });
        }
    }
    Ok(())
}

/// Probability mass of `Beta(alpha, beta)` in each bucket, ordered A, B, C, D.
pub fn bucket_distribution(alpha: f64, beta: f64) -> Result<[f64; 4]> {
    check_shape(alpha, beta)?;
    let dist = Beta::new(alpha, beta).map_err(|e| Error::Parameter {
        name: "alpha/beta",
        reason: e.to_string(),
    })?;
    let (q1, q2, q3) = (dist.cdf(0.25), dist.cdf(0.5), dist.cdf(0.75));
    Ok([1.0 - q3, q3 - q2, q2 - q1, q1])
}
