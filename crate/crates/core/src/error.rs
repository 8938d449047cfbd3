use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("size cap exceeded: {what} is {value}, cap {cap}")]
    SizeCapExceeded { what: &'static str, value: u128, cap: u128 },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not preserve the form")]
    FormViolation,
    #[error("element is not in the group")]
    NotInGroup,
    #[error("not a subgroup: a generator is outside the ambient group")]
    NotASubgroup,
    #[error("bad group spec: {0}")]
    BadSpec(String),
    #[error("steinberg character not identified: {0}")]
    SteinbergNotIdentified(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("invalid permutation: {0}")]
    InvalidPerm(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(what: &'static str, value: u128, cap: u128) -> Result<()> {
    if value > cap {
        Err(Error::SizeCapExceeded { what, value, cap })
    } else {
        Ok(())
    }
}
