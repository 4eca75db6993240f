//! Per-run metrics and the metrics CSV.

use std::io::{Read, Write};

use fairteams::objective::{self, group_benefits, meets_requirements, team_skill_sums};
use fairteams::{Assignment, BenefitMatrix, Instance, TaskSpec};

use crate::error::{HarnessError, Result};

/// Fixed leading columns of the metrics CSV; `gben_<group>` columns follow.
pub const METRICS_COLUMNS: [&str; 10] = [
    "dataset",
    "method",
    "seed",
    "n",
    "l_final",
    "pct_teams_met",
    "y_pct",
    "z_pct",
    "objective",
    "runtime_ms",
];

/// One row of the metrics CSV. Benefit terms are reported in percent and
/// the group variance on the squared-percent scale (fraction times 10^4).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsRecord {
    pub dataset: String,
    pub method: String,
    pub seed: String,
    pub n: usize,
    /// Number of teams; a mean over repetitions for stochastic methods.
    pub l_final: f64,
    pub pct_teams_met: f64,
    pub y_pct: f64,
    pub z_pct: f64,
    /// Group benefit per protected group, in percent.
    pub gben_pct: Vec<f64>,
    pub objective: f64,
    pub runtime_ms: f64,
}

impl MetricsRecord {
    pub fn with_identity(mut self, dataset: &str, method: &str, seed: impl ToString) -> Self {
        self.dataset = dataset.to_string();
        self.method = method.to_string();
        self.seed = seed.to_string();
        self
    }

    /// Numeric columns in CSV order, group benefits last. `n` excluded.
    fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.l_final,
            self.pct_teams_met,
            self.y_pct,
            self.z_pct,
            self.objective,
            self.runtime_ms,
        ];
        v.extend(&self.gben_pct);
        v
    }

    fn from_values(template: &MetricsRecord, v: &[f64]) -> Self {
        MetricsRecord {
            l_final: v[0],
            pct_teams_met: v[1],
            y_pct: v[2],
            z_pct: v[3],
            objective: v[4],
            runtime_ms: v[5],
            gben_pct: v[6..].to_vec(),
            ..template.clone()
        }
    }
}

/// Scores `assignment`; identity columns are left empty.
pub fn evaluate_solution(
    instance: &Instance,
    spec: &TaskSpec,
    assignment: &Assignment,
) -> MetricsRecord {
    let benefit = BenefitMatrix::compute(instance, spec.benefit_epsilon);
    let breakdown = objective::objective(instance, assignment, spec, &benefit);
    let teams = assignment.team_count();
    let met = team_skill_sums(instance, assignment)
        .iter()
        .filter(|sums| meets_requirements(sums, &spec.requirements))
        .count();
    MetricsRecord {
        n: instance.n(),
        l_final: teams as f64,
        pct_teams_met: 100.0 * met as f64 / teams as f64,
        y_pct: 100.0 * breakdown.y,
        z_pct: 1e4 * breakdown.z,
        gben_pct: group_benefits::<f64>(&benefit, assignment, instance)
            .into_iter()
            .map(|g| 100.0 * g)
            .collect(),
        objective: breakdown.f,
        ..MetricsRecord::default()
    }
}

/// Field-wise mean of records sharing identity and group count.
pub fn mean_record(records: &[MetricsRecord]) -> MetricsRecord {
    let first = records.first().expect("at least one record");
    let count = records.len() as f64;
    let mut sums = vec![0.0; first.values().len()];
    for r in records {
        for (s, v) in sums.iter_mut().zip(r.values()) {
            *s += v;
        }
    }
    let means: Vec<f64> = sums.into_iter().map(|s| s / count).collect();
    MetricsRecord::from_values(first, &means)
}

/// Standard error of the mean of each numeric column: sample standard
/// deviation over `sqrt(len)`, zero for a single record.
pub fn standard_error_record(records: &[MetricsRecord]) -> MetricsRecord {
    let mean = mean_record(records).values();
    let count = records.len() as f64;
    let se: Vec<f64> = (0..mean.len())
        .map(|c| {
            if records.len() < 2 {
                return 0.0;
            }
            let ss: f64 = records
                .iter()
                .map(|r| (r.values()[c] - mean[c]).powi(2))
                .sum();
            (ss / (count - 1.0)).sqrt() / count.sqrt()
        })
        .collect();
    let mut out = MetricsRecord::from_values(&records[0], &se);
    out.n = 0;
    out
}

fn header(group_labels: &[String]) -> Vec<String> {
    METRICS_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(group_labels.iter().map(|g| format!("gben_{g}")))
        .collect()
}

fn csv_err(context: &str) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        context: context.to_string(),
        source,
    }
}

/// Writes the header and `records`. Every record must carry one group
/// benefit per label.
pub fn write_metrics<W: Write>(
    records: &[MetricsRecord],
    group_labels: &[String],
    writer: W,
) -> Result<()> {
    let err = csv_err("writing metrics");
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header(group_labels)).map_err(&err)?;
    for r in records {
        if r.gben_pct.len() != group_labels.len() {
            return Err(HarnessError::Invalid(format!(
                "record for {} has {} group benefits, expected {}",
                r.method,
                r.gben_pct.len(),
                group_labels.len()
            )));
        }
        let mut row = vec![
            r.dataset.clone(),
            r.method.clone(),
            r.seed.clone(),
            r.n.to_string(),
        ];
        row.extend(r.values().iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(&err)?;
    }
    w.flush()
        .map_err(|e| csv_err("writing metrics")(e.into()))?;
    Ok(())
}

/// Parses a metrics CSV; returns the group labels and the rows.
pub fn read_metrics<R: Read>(reader: R) -> Result<(Vec<String>, Vec<MetricsRecord>)> {
    let err = csv_err("reading metrics");
    let mut rdr = csv::Reader::from_reader(reader);
    let head: Vec<String> = rdr
        .headers()
        .map_err(&err)?
        .iter()
        .map(str::to_string)
        .collect();
    if head.len() < METRICS_COLUMNS.len() || head[..METRICS_COLUMNS.len()] != METRICS_COLUMNS {
        return Err(HarnessError::Invalid(format!(
            "unexpected metrics header {}",
            head.join(",")
        )));
    }
    let mut labels = Vec::new();
    for col in &head[METRICS_COLUMNS.len()..] {
        match col.strip_prefix("gben_") {
            Some(label) => labels.push(label.to_string()),
            None => {
                return Err(HarnessError::Invalid(format!(
                    "unexpected metrics column {col:?}"
                )))
            }
        }
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(&err)?;
        let line = record.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64> {
            record[i].parse().map_err(|_| {
                HarnessError::Invalid(format!(
                    "line {line}: column {} = {:?} is not a number",
                    head[i], &record[i]
                ))
            })
        };
        let n = record[3]
            .parse()
            .map_err(|_| HarnessError::Invalid(format!("line {line}: bad n {:?}", &record[3])))?;
        let values = (4..record.len()).map(num).collect::<Result<Vec<f64>>>()?;
        let template = MetricsRecord {
            dataset: record[0].to_string(),
            method: record[1].to_string(),
            seed: record[2].to_string(),
            n,
            ..MetricsRecord::default()
        };
        rows.push(MetricsRecord::from_values(&template, &values));
    }
    Ok((labels, rows))
}
