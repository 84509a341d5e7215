use alloc::string::String;

/// Every failure the core library reports. Variants carry enough context to
/// name the violated predicate in CLI output.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("value out of range: {0}")]
    Range(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("kernel interval must be a single arc centered at 0: {0}")]
    AxisMismatch(String),
    #[error("tolerance not reached within {0} steps")]
    MaxStepsExceeded(usize),
    #[error("function is not symmetric nonincreasing: {0}")]
    Shape(String),
    #[error("triple is not admissible: {0}")]
    NotAdmissible(String),
    #[error("eta {eta} exceeds the strict admissibility level {max}")]
    EtaTooLarge { eta: String, max: String },
    #[error("scale out of range: {0}")]
    ScaleOutOfRange(String),
    #[error("no admissible step size at step {0}")]
    ScheduleStall(usize),
    #[error("mixed moduli {0} and {1}")]
    MixedModulus(usize, usize),
    #[error("infeasible search: {0}")]
    Infeasible(String),
}

pub type Result<T> = core::result::Result<T, Error>;
