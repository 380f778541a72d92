use thiserror::Error;

/// Errors raised by the group, coset and chain layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    /// An element or subgroup was used with a context of another family or rank.
    #[error("structural mismatch: {0}")]
    Structure(String),

    /// Invalid input data: a subgroup that is not closed, a chain that does not
    /// descend, bad catalog parameters and so on.
    #[error("validation error: {0}")]
    Validation(String),

    /// A computation exceeded one of the configured caps.
    #[error("resource cap exceeded: {what} exceeds cap {cap}{}", level_suffix(*.level))]
    Resource {
        what: String,
        cap: usize,
        level: Option<usize>,
    },

    /// A result exists but cannot be expressed in the family's subgroup shape.
    #[error("unrepresentable subgroup: {0}")]
    Unrepresentable(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

fn level_suffix(level: Option<usize>) -> String {
    match level {
        Some(l) => format!(" at level {l}"),
        None => String::new(),
    }
}

impl ChainError {
    pub fn validation(msg: impl Into<String>) -> Self {
        ChainError::Validation(msg.into())
    }

    pub fn structure(msg: impl Into<String>) -> Self {
        ChainError::Structure(msg.into())
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, ChainError::Resource { .. })
    }

    /// Attach a chain level to a resource error that does not carry one yet.
    pub fn at_level(self, level: usize) -> Self {
        match self {
            ChainError::Resource {
                what,
                cap,
                level: None,
            } => ChainError::Resource {
                what,
                cap,
                level: Some(level),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, ChainError>;
