use thiserror::Error;

/// Errors raised by the toolkit. Each variant maps to one exit class of the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("usage error: {0}")]
    Usage(String),

    /// An element needs a larger ball than the one computed.
    #[error("element {element} lies outside the computed ball of radius {radius}; a ball of radius {required_radius} contains it")]
    OutOfRange {
        element: String,
        radius: u32,
        required_radius: u64,
    },

    /// A size guard was exceeded.
    #[error("resource cap exceeded: {what} needs {projected} but the cap is {cap}")]
    Resource {
        what: String,
        projected: u64,
        cap: u64,
    },

    /// A function was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
