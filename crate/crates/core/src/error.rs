use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expansion exceeded {limit} monomials")]
    ResourceLimit { limit: usize },
    #[error("division by zero in {0}")]
    DivisionByZero(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("cyclic binding through `{0}`")]
    CyclicBinding(String),
    #[error("cannot evaluate: {0}")]
    NotNumeric(String),
    #[error("leading variable `{0}` does not appear linearly")]
    NotLinear(String),
    #[error("all {0} sample points were singular")]
    AllSingular(usize),
    #[error("flow of the field has no recognised closed form: {0}")]
    NonClosedForm(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("pole proximity at {0}")]
    Pole(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
