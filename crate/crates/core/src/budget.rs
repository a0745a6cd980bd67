//! Work metering for potentially explosive searches (exact expansion
//! verification, game-tree minimax, exhaustive fooling-set enumeration).
//! The default limit can be overridden with the `SLK_WORK_BUDGET`
//! environment variable.

use crate::error::Error;

pub const DEFAULT_WORK_BUDGET: u64 = 50_000_000;

/// Effective default: `SLK_WORK_BUDGET` when set and parseable, else
/// [`DEFAULT_WORK_BUDGET`].
pub fn default_work_budget() -> u64 {
    std::env::var("SLK_WORK_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_WORK_BUDGET)
}

#[derive(Debug, Clone)]
pub struct WorkMeter {
    limit: u64,
    used: u64,
}

impl WorkMeter {
    pub fn new(limit: u64) -> Self {
        WorkMeter { limit, used: 0 }
    }

    pub fn with_default() -> Self {
        WorkMeter::new(default_work_budget())
    }

    pub fn charge(&mut self, units: u64) -> Result<(), Error> {
        self.used = self.used.saturating_add(units);
        if self.used > self.limit {
            Err(Error::WorkBudgetExceeded {
                used: self.used,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}
