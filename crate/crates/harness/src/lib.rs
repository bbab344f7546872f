//! Command-line front end for `cubic-ist`: run configuration, built-in
//! potentials, λ-grids, verification suites and CSV report emission.
//!
//! Every suite returns an [`Outcome`]: pass/fail [`ReportRecord`]s (pass iff
//! `residual <= tolerance`), numeric tables and free-form diagnostics.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod config;
pub mod error;
pub mod grid;
pub mod potentials;
pub mod report;
pub mod suites;

pub use config::{Command, InverseData, PotentialSpec, RunConfig};
pub use error::{HarnessError, Result};
pub use report::{Outcome, ReportRecord, Table};
pub use suites::run;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "CUBIC_IST_THREADS";

/// Parses the thread cap; `None` when unset.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::usage(THREADS_ENV, format!("expected a positive integer, got {s:?}"))),
        },
    }
}

/// Writes the primary table to `cfg.out` (secondary tables next to it) and
/// the records to `cfg.report`, or to `stdout` when no report path is set.
pub fn emit(cfg: &RunConfig, outcome: &Outcome, stdout: &mut dyn std::io::Write) -> Result<()> {
    if let Some(out) = &cfg.out {
        for (i, t) in outcome.tables.iter().enumerate() {
            let path = if i == 0 { out.clone() } else { report::sibling(out, t.name) };
            report::write_file(&path, t)?;
        }
    }
    let records = outcome.records_table();
    match &cfg.report {
        Some(p) => report::write_file(p, &records),
        None => records.write(stdout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_cap_parsing() {
        assert_eq!(thread_cap(None).unwrap(), None);
        assert_eq!(thread_cap(Some("4")).unwrap(), Some(4));
        assert!(matches!(thread_cap(Some("0")), Err(HarnessError::Usage { path, .. }) if path == THREADS_ENV));
        assert!(thread_cap(Some("many")).is_err());
    }
}
