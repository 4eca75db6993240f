//! Assignment CSV: `student_id,team_id`.

use std::collections::HashMap;
use std::io::{Read, Write};

use fairteams::{Assignment, Instance};

use crate::error::{HarnessError, Result};

pub fn write_assignment<W: Write>(
    instance: &Instance,
    assignment: &Assignment,
    writer: W,
) -> Result<()> {
    let err = |source| HarnessError::Csv {
        context: "writing assignment".into(),
        source,
    };
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["student_id", "team_id"]).map_err(err)?;
    for (id, team) in instance.student_ids().iter().zip(assignment.labels()) {
        w.write_record([id.as_str(), &team.to_string()])
            .map_err(err)?;
    }
    w.flush().map_err(|e| err(e.into()))?;
    Ok(())
}

/// Reads an assignment for `instance`. Every student must appear exactly
/// once; team ids are arbitrary non-negative integers and get compacted.
pub fn read_assignment<R: Read>(instance: &Instance, reader: R) -> Result<Assignment> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|source| HarnessError::Csv {
        context: "reading assignment header".into(),
        source,
    })?;
    if header.iter().collect::<Vec<_>>() != ["student_id", "team_id"] {
        return Err(HarnessError::Assignment {
            line: 1,
            message: format!(
                "expected header student_id,team_id, got {}",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let index: HashMap<&str, usize> = instance
        .student_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut labels: Vec<Option<usize>> = vec![None; instance.n()];
    for record in rdr.records() {
        let record = record.map_err(|source| HarnessError::Csv {
            context: "reading assignment".into(),
            source,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| HarnessError::Assignment { line, message };
        if record.len() != 2 {
            return Err(fail(format!("expected 2 fields, got {}", record.len())));
        }
        let student = *index
            .get(&record[0])
            .ok_or_else(|| fail(format!("unknown student_id {:?}", &record[0])))?;
        let team: usize = record[1].parse().map_err(|_| {
            fail(format!(
                "team_id {:?} is not a non-negative integer",
                &record[1]
            ))
        })?;
        if labels[student].replace(team).is_some() {
            return Err(fail(format!("student_id {:?} listed twice", &record[0])));
        }
    }
    if let Some(missing) = labels.iter().position(Option::is_none) {
        return Err(HarnessError::Invalid(format!(
            "student_id {:?} has no team",
            instance.student_ids()[missing]
        )));
    }
    let labels: Vec<usize> = labels.into_iter().flatten().collect();
    Ok(Assignment::compact(&labels))
}
