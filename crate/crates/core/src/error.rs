use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cover pairs contain a directed cycle through element {0}")]
    CycleDetected(usize),
    #[error("element index {index} out of range for a poset with {n} elements")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("{what}: {n} elements exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("lexicographic sum needs {expected} pieces, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("structure is not a partition into antichains: {0}")]
    NotAnAntichainPartition(String),
    #[error("orbit {0:?} of the automorphism group is not an antichain")]
    OrbitNotAntichain(Vec<usize>),
    #[error("block index {0} is not a block of the structure")]
    BlockNotInStructure(usize),
    #[error("structured poset is not a tight interdependent orbit union")]
    NotTightIou,
    #[error("structured poset is not a flexible tight interdependent orbit union")]
    NotFlexibleTightIou,
    #[error("structure has {0} blocks; pruning needs at least 3 with a component of size 2 or more")]
    TooFewBlocks(usize),
    #[error("poset is not max-locked")]
    NotMaxLocked,
    #[error("bad vector {0:?}: entries must be >= 2, sorted nondecreasing, length >= 2")]
    BadVector(Vec<u32>),
    #[error("{k} is not a nontrivial divisor of {n} (need n >= 6, 1 < k < n, k | n)")]
    BadDivisor { n: u64, k: u64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown verification suite {0:?}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
