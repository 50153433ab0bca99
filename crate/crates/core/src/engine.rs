//! Search limits, cancellation and the errors shared by the enumeration
//! routines.

use core::sync::atomic::{AtomicBool, Ordering};

use thiserror::Error;

/// Counters reported by long searches, also attached to failures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Candidate tuples visited.
    pub explored: u64,
    /// Configurations accepted so far.
    pub found: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("alphabet has {size} labels, the engine supports at most {max}")]
    AlphabetTooLarge { size: usize, max: usize },
    #[error("blow-up: more than {limit} {what} (explored {}, found {})", stats.explored, stats.found)]
    BlowUp {
        what: &'static str,
        limit: usize,
        stats: Stats,
    },
    #[error("cancelled after exploring {} candidates", stats.explored)]
    Cancelled { stats: Stats },
    #[error("restricted search disagrees with brute force: {0}")]
    BruteForceMismatch(&'static str),
}

/// Caps on the size of intermediate and final objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_labels: usize,
    pub max_configs: usize,
    /// Cap on plain configurations materialized when expanding a constraint.
    pub max_expansion: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_labels: 10_000,
            max_configs: 100_000,
            max_expansion: 5_000_000,
        }
    }
}

/// Knobs for [`crate::round_elim`] and the analyses built on it.
#[derive(Clone, Copy, Default)]
pub struct Options<'a> {
    pub limits: Limits,
    /// Polled at every cancellation point; `true` aborts the search.
    pub cancel: Option<&'a AtomicBool>,
    /// Called every few thousand candidates.
    pub progress: Option<&'a dyn Fn(Stats)>,
    /// Re-run the maximal-configuration search over all subsets of the
    /// alphabet and compare (alphabets of at most six labels).
    pub verify_brute_force: bool,
}

impl<'a> Options<'a> {
    pub fn with_limits(limits: Limits) -> Self {
        Options {
            limits,
            ..Options::default()
        }
    }

    pub(crate) fn checkpoint(&self, stats: Stats) -> Result<(), EngineError> {
        if let Some(flag) = self.cancel {
            if flag.load(Ordering::Relaxed) {
                return Err(EngineError::Cancelled { stats });
            }
        }
        if let Some(report) = self.progress {
            report(stats);
        }
        Ok(())
    }
}

impl core::fmt::Debug for Options<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Options")
            .field("limits", &self.limits)
            .field("cancel", &self.cancel.is_some())
            .field("progress", &self.progress.is_some())
            .field("verify_brute_force", &self.verify_brute_force)
            .finish()
    }
}
