//! Approximate string alignment kernels at scale.
//!
//! The pipeline has three stages:
//!
//! 1. **Embed** strings into L1 space as sparse characteristic vectors,
//!    either through edit-sensitive parse trees over a shared label
//!    dictionary ([`esp`]) or through a seeded random-walk embedding into
//!    fixed-length Hamming space ([`cgk`]).
//! 2. **Project** characteristic vectors into dense random Fourier
//!    features for the Laplacian kernel `exp(-||x-y||_1 / beta)`, either
//!    with hash-derived Cauchy samples that store only two `u64` words per
//!    input coordinate ([`sfm`]), or with an explicit dense Cauchy matrix
//!    as the memory-hungry baseline.
//! 3. **Evaluate / train**: exact kernels and a brute-force
//!    edit-distance-with-moves oracle ([`kernel`]), plus a linear
//!    classifier and AUC-based cross-validation ([`classify`]).
//!
//! Corpus-level operations are data-parallel via rayon when the default
//! `parallel` feature is enabled; every such operation also has a `_seq`
//! variant that always runs on the calling thread and produces identical
//! output.

pub mod cgk;
pub mod classify;
pub mod dataset;
pub mod esp;
pub mod features;
pub mod io;
pub mod kernel;
mod par;
pub mod seed;
pub mod sfm;

pub use features::CharacteristicVector;

/// Crate-wide error type.
///
/// `exit_code` buckets every variant into the CLI convention: `2` for bad
/// input (I/O, parsing, malformed files), `3` for contract violations
/// (preconditions, dimension mismatches, refused oracle bounds).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input string")]
    EmptyInput,
    #[error("symbol {0:#04x} is not in the leaf alphabet")]
    UnknownSymbol(u8),
    #[error("sequence of length {0} is too short to parse")]
    TooShort(usize),
    #[error("equal adjacent labels at position {0}; reduction requires a repetition-free sequence")]
    AdjacentEqual(usize),
    #[error("alphabet reduction did not terminate")]
    ReductionDiverged,
    #[error("coordinate {index} is out of range for dimension {dim}")]
    IndexOutOfRange { index: u64, dim: u64 },
    #[error("feature dimension {0} must be even and at least 2")]
    BadFeatureDim(usize),
    #[error("bandwidth must be positive and finite, got {0}")]
    BadBandwidth(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input of length {len} exceeds embedding length {limit}")]
    InputTooLong { len: usize, limit: usize },
    #[error("oracle bounds exceeded: {0}")]
    OracleBounds(String),
    #[error("search depth {0} exhausted before reaching the target")]
    DepthExhausted(usize),
    #[error("labels must contain both classes")]
    SingleClass,
    #[error("fold assignment left a fold without both classes")]
    DegenerateFolds,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed {what} file: {detail}")]
    FileFormat { what: &'static str, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_)
            | Error::Parse { .. }
            | Error::FileFormat { .. }
            | Error::UnknownSymbol(_) => 2,
            _ => 3,
        }
    }
}
