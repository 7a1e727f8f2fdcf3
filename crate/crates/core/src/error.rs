use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },
    #[error("dimension {n} outside supported range {min}..={max}")]
    Dimension { n: u32, min: u32, max: u32 },
    #[error("invalid trit {0}: expected 0, 1 or 2")]
    InvalidTrit(u32),
    #[error("transform guard: n = {n} exceeds limit {limit}")]
    TransformGuard { n: u32, limit: u32 },
    #[error("enumeration guard: subspace dimension {dim} exceeds limit {limit}")]
    EnumerationGuard { dim: u32, limit: u32 },
    #[error("exhaustive search guard: n = {n} exceeds limit {limit}")]
    ExhaustiveGuard { n: u32, limit: u32 },
    #[error("codimension {codim} exceeds n/2 for n = {n}")]
    CodimTooLarge { codim: u32, n: u32 },
    #[error("frequency must be nonzero")]
    ZeroFrequency,
    #[error("subspace H is not contained in K")]
    NotContained,
    #[error("sample size {d} exceeds set size {len}")]
    SampleTooLarge { d: usize, len: usize },
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
    #[error("value overflow: {0}")]
    Overflow(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("exact identity violated: {0}")]
    IdentityViolation(String),
}

impl Error {
    /// True for the resource guards (`n`/dimension limits that `--force` lifts).
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::TransformGuard { .. }
                | Error::EnumerationGuard { .. }
                | Error::ExhaustiveGuard { .. }
        )
    }
}
