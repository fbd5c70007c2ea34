use std::fmt;

use thiserror::Error;

use crate::subset::Subset;

/// Polymatroid axiom named in a validation failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Normalization,
    Monotonicity,
    Submodularity,
    Looplessness,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Normalization => "normalization",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Submodularity => "submodularity",
            Axiom::Looplessness => "looplessness",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank table has length {0}, which is not a power of two")]
    TableLength(usize),
    #[error("{axiom} fails at A={a:#b}, B={b:#b}")]
    Axiom { axiom: Axiom, a: Subset, b: Subset },
    #[error("{0:#b} is not a flat")]
    NotAFlat(Subset),
    #[error("building set member {0:#b} is empty")]
    EmptyMember(Subset),
    #[error("building set does not contain the ground set")]
    MissingGround,
    #[error("{0:#b} is not a member of the building set")]
    NotAMember(Subset),
    #[error("size guard exceeded: {what} = {actual}, limit {limit}")]
    SizeGuard { what: &'static str, limit: usize, actual: usize },
    #[error("invalid projection: {0}")]
    Projection(String),
    #[error("c-sequence must be nonnegative and strictly increasing with one entry per fiber")]
    BadCSequence,
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("fan is not pure")]
    NotPure,
    #[error("fan is not complete")]
    NotComplete,
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error("instance: {0}")]
    Instance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn guard(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::SizeGuard { what, limit, actual })
    } else {
        Ok(())
    }
}
