use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be an odd positive integer, got {0}")]
    InvalidModulus(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("{value} has cofactor {cofactor} outside the prime basis")]
    CofactorNotOne { value: String, cofactor: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid prime basis: {0}")]
    InvalidBasis(String),
    #[error("invalid Lehmer pair (A, B) = ({a}, {b}): {reason}")]
    InvalidLehmerPair { a: String, b: String, reason: &'static str },
    #[error("{q} divides {d}, so it cannot be a primitive divisor")]
    SymbolVanishes { q: u64, d: u64 },
    #[error("p = {p} shares a factor with h(-{d}) = {h}; the descent lemma does not apply")]
    ClassNumberNotCoprime { p: u64, d: u64, h: u64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("non-integral division: {0}")]
    NonIntegralDivision(String),
    #[error("search cost {cost} exceeds budget {budget}")]
    BudgetExceeded { cost: u128, budget: u128 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
