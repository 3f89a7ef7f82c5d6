//! CLI error type carrying the exit-code contract:
//! 0 success, 1 property violation, 2 usage, 3 budget, 4 escalated warning.

use std::fmt;

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { message: message.into(), exit_code: 2 }
    }

    pub fn property(message: impl Into<String>) -> Self {
        CliError { message: message.into(), exit_code: 1 }
    }

    pub fn budget(message: impl Into<String>) -> Self {
        CliError { message: message.into(), exit_code: 3 }
    }

    pub fn warning(message: impl Into<String>) -> Self {
        CliError { message: message.into(), exit_code: 4 }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<macmod::Error> for CliError {
    fn from(e: macmod::Error) -> Self {
        let code = match &e {
            macmod::Error::PropertyViolation(_) => 1,
            macmod::Error::BudgetExceeded(_) => 3,
            _ => 2,
        };
        CliError { message: e.to_string(), exit_code: code }
    }
}
