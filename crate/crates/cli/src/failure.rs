use std::fmt;

use cmv_scattering::Error;

/// Command failure mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable input or unwritable output: exit 1.
    Io(String),
    /// Malformed input, out-of-range parameters or degeneracy: exit 2.
    Invalid(String),
    /// Refused inverse for a non-canonical or undecided symbol: exit 3.
    Guard(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Guard(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Io(m) => write!(f, "I/O error: {m}"),
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Guard(m) => write!(f, "inverse refused: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonCanonical(_) | Error::Undecided(_) => Failure::Guard(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}
