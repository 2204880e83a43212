//! Crate-wide error type.

#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("placement ({x}, {y}) lies outside the free space")]
    OutsideFreeSpace { x: f64, y: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("precondition violated: point is only {measured}-far, {required}-far required")]
    NotFarEnough { required: f64, measured: f64 },

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("plan is not {rho}-robust: {violations} violating leg check(s), first at leg {first_leg}")]
    NotRobust { rho: f64, violations: usize, first_leg: usize },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
