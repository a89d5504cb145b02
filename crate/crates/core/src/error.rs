use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("barrier angle {0} is outside [0, π/2]")]
    InvalidAngle(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cycle {cycle} is outside the recorded range 1..={available}")]
    CycleOutOfRange { cycle: u32, available: u32 },

    #[error("closed forms assume a full quarter turn of barrier A (N = n_A = {n_a}), trace has N = {cycles}")]
    IncompleteRotation { cycles: u32, n_a: u32 },

    #[error("traces do not describe the same cavity: {0}")]
    MismatchedTraces(String),

    #[error("expected a {expected} trace")]
    WrongTraceKind { expected: &'static str },

    #[error("no registered {kind} named `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("trace document does not match a fresh run of its config: {0}")]
    TraceMismatch(String),

    #[error("sweep row {index} (n_A={n_a}, n_B={n_b}): {source}")]
    Row {
        index: usize,
        n_a: u32,
        n_b: u32,
        #[source]
        source: Box<Error>,
    },
}
