use std::fmt;

use explograph_core::Error;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NERVE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_NON_GENERIC: i32 = 5;
pub const EXIT_NON_PLANAR: i32 = 6;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

impl Failure {
    pub fn new(code: i32, msg: impl Into<String>) -> Self {
        Self { code, msg: msg.into() }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        Self::new(EXIT_SCHEMA, msg)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidNerve(_) => EXIT_NERVE,
            Error::NonGeneric(_) => EXIT_NON_GENERIC,
            Error::Parse(_)
            | Error::Dimension(_)
            | Error::InvalidConstraint(_)
            | Error::InvalidProblem(_)
            | Error::InvalidCurve(_)
            | Error::InvalidComplex(_)
            | Error::MalformedSubdivision(_) => EXIT_SCHEMA,
            _ => EXIT_OTHER,
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new(EXIT_OTHER, e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;
