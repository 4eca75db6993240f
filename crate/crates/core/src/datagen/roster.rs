//! Roster CSV: `student_id,group,skill_1,...,skill_k`.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::error::Error;
use crate::model::Instance;

#[derive(Debug, Error)]
pub enum RosterError {
    #[error("cannot read roster: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
    #[error("bad header: {0}")]
    Header(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: duplicate student_id {id:?}")]
    DuplicateId { line: u64, id: String },
    #[error("line {line}: missing group label")]
    MissingGroup { line: u64 },
    #[error("line {line}: skill_{dim} = {value} is outside [0, 1]")]
    Range { line: u64, dim: usize, value: f64 },
    #[error("invalid roster: {0}")]
    Instance(#[from] Error),
}

impl RosterError {
    /// Whether the failure came from the file system rather than the content.
    pub fn is_io(&self) -> bool {
        matches!(self, RosterError::Io(_))
    }
}

/// Parses a roster. Group labels get ids in order of first appearance.
pub fn read_roster<R: Read>(reader: R) -> Result<Instance<f64>, RosterError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| RosterError::Header(e.to_string()))?
        .clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 3 || cols[0] != "student_id" || cols[1] != "group" {
        return Err(RosterError::Header(format!(
            "expected student_id,group,skill_1,...; got {}",
            cols.join(",")
        )));
    }
    for (p, name) in cols[2..].iter().enumerate() {
        if *name != format!("skill_{}", p + 1) {
            return Err(RosterError::Header(format!(
                "column {} should be skill_{}, got {name:?}",
                p + 3,
                p + 1
            )));
        }
    }
    let k = cols.len() - 2;

    let mut ids = Vec::new();
    let mut seen = HashSet::new();
    let mut label_ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    let mut skills = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| RosterError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            source: e,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != k + 2 {
            return Err(RosterError::Row {
                line,
                message: format!("expected {} fields, got {}", k + 2, record.len()),
            });
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(RosterError::Row {
                line,
                message: "empty student_id".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(RosterError::DuplicateId { line, id });
        }
        let label = &record[1];
        if label.is_empty() {
            return Err(RosterError::MissingGroup { line });
        }
        let next = label_ids.len();
        let g = *label_ids.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            next
        });
        let mut row = Vec::with_capacity(k);
        for p in 0..k {
            let raw = &record[p + 2];
            let value: f64 = raw.parse().map_err(|_| RosterError::Row {
                line,
                message: format!("skill_{} = {raw:?} is not a number", p + 1),
            })?;
            if !(0.0..=1.0).contains(&value) {
                return Err(RosterError::Range {
                    line,
                    dim: p + 1,
                    value,
                });
            }
            row.push(value);
        }
        ids.push(id);
        groups.push(g);
        skills.push(row);
    }
    Ok(Instance::new(skills, groups, ids, labels)?)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance<f64>, RosterError> {
    read_roster(File::open(path)?)
}

/// Writes `instance` as a roster; values use the shortest exact decimal form.
pub fn write_roster<W: Write>(instance: &Instance<f64>, writer: W) -> Result<(), RosterError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["student_id".to_string(), "group".to_string()];
    header.extend((1..=instance.k()).map(|p| format!("skill_{p}")));
    let csv_err = |e: csv::Error| RosterError::Csv { line: 0, source: e };
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..instance.n() {
        let mut row = vec![
            instance.student_ids()[i].clone(),
            instance.group_labels()[instance.group_of(i)].clone(),
        ];
        row.extend(instance.skill(i).iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
