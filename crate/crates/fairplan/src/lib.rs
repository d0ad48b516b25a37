#![forbid(unsafe_code)]

//! Deterministic capacity planning for accelerator research facilities.
//!
//! `fairplan` models the chain from detector readout to multi-year facility
//! requirements: per-event payload sizes, beam-schedule rate profiles, trigger
//! and filtering chains, online and offline compute sizing, storage retention
//! ledgers, and the roll-up of several experiments into facility-level compute
//! and storage evolution figures. Everything is plain arithmetic on explicit
//! inputs; given the same scenario the engine produces byte-identical reports.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantities`]: unit-carrying scalars (bytes, rates, compute power) with
//!   explicit decimal/binary byte conventions.
//! - [`beamline`]: machine plans, annual beam seconds, peak/average/sustained
//!   rate profiles.
//! - [`detector`]: per-detector payload contributions, event sizes, in-spill
//!   data rates, uplink bandwidth with noise and contingency headroom.
//! - [`trigger`]: trigger branches, annual storage plans, archival bandwidth,
//!   transient buffers for delayed filtering.
//! - [`compute`]: reference machines, online reconstruction sizing, campaign
//!   and simulation requirements, offline totals.
//! - [`ledger`]: storage classes with retention windows, reprocessing
//!   accumulation, disk and archive series over the years.
//! - [`facility`]: multi-experiment scenarios, compute class aggregation,
//!   online scheduling profiles, shared-resource minimums, storage evolution.
//! - [`scenario`]: the JSON interchange format with located validation errors.
//! - [`report`]: deterministic table rendering to markdown, CSV, and JSON.
//!
//! # Runnable examples
//!
//! Each major capability has a standalone example under `examples/`:
//!
//! | Area | Example | Run with |
//! |------|---------|----------|
//! | Payloads | `event_sizes` | `cargo run -p fairplan --example event_sizes` |
//! | Beam schedule | `beam_schedule` | `cargo run -p fairplan --example beam_schedule` |
//! | Readout rates | `data_rates` | `cargo run -p fairplan --example data_rates` |
//! | Trigger storage | `storage_plan` | `cargo run -p fairplan --example storage_plan` |
//! | Delayed filtering | `transient_buffer` | `cargo run -p fairplan --example transient_buffer` |
//! | Online farm | `online_compute` | `cargo run -p fairplan --example online_compute` |
//! | Campaigns | `offline_campaigns` | `cargo run -p fairplan --example offline_campaigns` |
//! | Retention | `retention_ledger` | `cargo run -p fairplan --example retention_ledger` |
//! | Facility roll-up | `facility_rollup` | `cargo run -p fairplan --example facility_rollup` |
//! | Storage horizon | `storage_horizon` | `cargo run -p fairplan --example storage_horizon` |
//! | What-if studies | `what_if` | `cargo run -p fairplan --example what_if` |
//! | Interchange | `scenario_io` | `cargo run -p fairplan --example scenario_io` |
//!
//! The same functionality is reachable through the thin `fairplan` binary
//! (`validate`, `tables`, `timeline`, `aggregate`, `report` subcommands).
//!
//! # Quick taste
//!
//! ```
//! use fairplan::detector::{DetectorContribution, Setup};
//!
//! let setup = Setup::new(
//!     "tracker-only",
//!     vec![
//!         DetectorContribution::new("STS", 5_395.0, 4.0).unwrap(),
//!         DetectorContribution::new("TOF", 670.0, 8.0).unwrap(),
//!     ],
//! );
//! let size = setup.event_size();
//! assert_eq!(size.bytes(), 26_940.0);
//! ```

pub mod beamline;
pub mod compute;
pub mod detector;
pub mod facility;
pub mod ledger;
pub mod quantities;
pub mod report;
pub mod scenario;
pub mod trigger;

/// Errors produced by domain constructors and operations.
///
/// Scenario-file parsing has its own located issue type
/// ([`scenario::Issue`]); this enum covers the in-memory model.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A value or combination of values violates a domain invariant.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },
    /// A required configuration value is absent and has no safe default.
    #[error("missing configuration: {0}")]
    MissingConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Error {
    Error::Invalid {
        what,
        why: why.into(),
    }
}

/// Rejects NaN, infinities, and negative values in one place so every
/// constructor reports the same wording.
pub(crate) fn finite_nonneg(what: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(invalid(what, format!("must be finite, got {value}")));
    }
    if value < 0.0 {
        return Err(invalid(what, format!("must be >= 0, got {value}")));
    }
    Ok(value)
}

pub(crate) fn finite_positive(what: &'static str, value: f64) -> Result<f64> {
    let value = finite_nonneg(what, value)?;
    if value == 0.0 {
        return Err(invalid(what, "must be > 0"));
    }
    Ok(value)
}

/// Validates a fraction in `[0, 1]`.
pub(crate) fn unit_fraction(what: &'static str, value: f64) -> Result<f64> {
    let value = finite_nonneg(what, value)?;
    if value > 1.0 {
        return Err(invalid(what, format!("must be <= 1, got {value}")));
    }
    Ok(value)
}
