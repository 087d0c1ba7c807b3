use thiserror::Error;

use crate::domain::DomainId;
use crate::guard::Fragment;
use crate::term::Name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable `{0}` inside a ground instance")]
    NonGround(Name),
    #[error("labeled null inside a database")]
    NullInDatabase,
    #[error("guard is outside the supported fragments")]
    NotNormalizable,
    #[error("variable `{0}` is not bound by the substitution")]
    UnboundVariable(Name),
    #[error("{fragment} guard is not licensed by the {domain} domain")]
    FragmentViolation { domain: DomainId, fragment: Fragment },
    #[error("abstraction of an empty set of databases")]
    EmptyInput,
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(DomainId, DomainId),
    #[error("action `{0}` is not enabled under the given substitution")]
    NotEnabled(Name),
    #[error("extension leaves `{0}` unbound or bound to a null")]
    IncompleteExtension(Name),
    #[error("unknown action `{0}`")]
    UnknownAction(Name),
    #[error("homomorphism search exceeded its step budget")]
    Timeout,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
