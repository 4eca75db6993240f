use thiserror::Error;

/// Validation failures raised by constructors and solver entry points.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("instance needs at least 2 students, got {0}")]
    TooFewStudents(usize),
    #[error("instance needs at least one skill dimension")]
    NoSkills,
    #[error("student {student} has {got} skills, expected {expected}")]
    SkillArity {
        student: usize,
        got: usize,
        expected: usize,
    },
    #[error("skill value {value} of student {student} (dimension {dim}) outside [0, 1]")]
    SkillRange {
        student: usize,
        dim: usize,
        value: f64,
    },
    #[error("group id {group} of student {student} is not below group count {groups}")]
    GroupId {
        student: usize,
        group: usize,
        groups: usize,
    },
    #[error("protected group {0} has no members")]
    EmptyGroup(usize),
    #[error("length mismatch for {what}: got {got}, expected {expected}")]
    Length {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("team count {teams} must be within 1..={students}")]
    TeamCount { teams: usize, students: usize },
    #[error("team {0} has no members")]
    EmptyTeam(usize),
    #[error("invalid move: {0}")]
    InvalidMove(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
