use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },

    #[error("vertex id {vertex} is out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("vertex {vertex} has color {color}, outside the palette of size {q}")]
    ColorOutOfRange { vertex: usize, color: usize, q: usize },

    #[error(
        "palette too small: q = {q} but the maximum degree is {max_degree}; \
         greedy play is only guaranteed to terminate when q >= max_degree + 2"
    )]
    PaletteTooSmall { q: usize, max_degree: usize },

    #[error("state space too large: q^n = {q}^{n} = {states} exceeds the cap of {cap}")]
    StateSpaceTooLarge { q: usize, n: usize, states: f64, cap: usize },

    #[error("dense solve refused: {transient} transient states exceeds the cap of {cap}")]
    DenseSolveTooLarge { transient: usize, cap: usize },

    #[error("I - Q is numerically singular at pivot {pivot}; the chain is malformed")]
    SingularSystem { pivot: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("no convergence after {rounds} rounds")]
    Timeout { rounds: usize, trajectory: Vec<RoundStats> },

    #[error("trial timed out: n = {n}, trial {trial}, seed {seed} ({rounds} rounds)")]
    TrialTimeout { n: usize, trial: usize, seed: u64, rounds: usize },

    #[error("coloring is not proper: edge ({0}, {1}) is monochromatic")]
    ImproperColoring(usize, usize),

    #[error("vertex {vertex}: color {color} is not in its list")]
    ColorNotInList { vertex: usize, color: usize },

    #[error("preference row {row} is not a permutation of 0..{q}")]
    NotPermutation { row: usize, q: usize },

    #[error("vertex {vertex} has an empty available-color list")]
    EmptyAvailableList { vertex: usize },

    #[error("size n = {n} has {trials} trials; at least {required} are required")]
    InsufficientTrials { n: usize, trials: usize, required: usize },

    #[error("target enumeration needs {needed} candidates, above the cap of {cap}")]
    EnumerationTooLarge { needed: f64, cap: usize },

    #[error("invalid temperature schedule: {0}")]
    InvalidSchedule(String),

    #[error("local run exceeded the phase cap of {cap} with {remaining} vertices left")]
    PhaseCapExceeded { cap: usize, remaining: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Errors that indicate a bug or a broken theoretical guarantee rather
    /// than bad user input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolation(_)
                | Error::SingularSystem { .. }
                | Error::Numerical(_)
                | Error::Timeout { .. }
                | Error::TrialTimeout { .. }
                | Error::PhaseCapExceeded { .. }
        )
    }
}

/// Per-round snapshot of a game trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct RoundStats {
    pub round: usize,
    pub satisfied: usize,
    pub conflict_edges: usize,
}
