use thiserror::Error;

use crate::exactmath::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cyclotomic order must be positive, got {0}")]
    NonPositiveOrder(i64),

    #[error("a root sum needs at least one exponent")]
    EmptyRootSum,

    #[error("invalid stage pair (b={b}, p={p}, t={t}): {reason}")]
    InvalidStage {
        b: i64,
        p: u64,
        t: i64,
        reason: &'static str,
    },

    #[error("a configuration needs at least one stage pair")]
    EmptyConfig,

    #[error("the period of a symbolic word must be nonempty")]
    EmptyPeriod,

    #[error("letter {letter} is outside the alphabet 1..={alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },

    #[error("truncation would need {needed} atoms, above the cap of {cap}")]
    AtomCapExceeded { needed: u128, cap: u64 },

    #[error("support hull needs positive b and t on every letter; normalize signs first")]
    SignsNotNormalized,

    #[error("scaling factor must be nonzero")]
    ZeroScale,

    #[error("stage (b={b}, p={p}, t={t}) is not admissible")]
    NotAdmissible { b: i64, p: u64, t: i64 },

    #[error("size mismatch: {left} digits against {right} spectrum points")]
    SizeMismatch { left: usize, right: usize },

    #[error("tower spectrum produced the point {0} twice")]
    DuplicateTowerPoint(Rational),

    #[error("spectrum points must be pairwise distinct; {0} repeats")]
    DuplicatePoint(Rational),

    #[error("q/b1 * lambda is not an integer for lambda = {0}")]
    NotOnLattice(Rational),

    #[error("t2 = {t2} does not divide t1 = {t1}")]
    NotDivisible { t1: i64, t2: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("search space too large: {0}")]
    SearchTooLarge(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("{0}")]
    Config(String),
}
