//! Beam schedules and interaction-rate profiles.
//!
//! A [`MachinePlan`] captures how much beam a cave actually sees in a year
//! (accelerator hours, the share delivered to this cave, time lost to a
//! competing experiment in the same cave) together with the spill structure
//! (duty cycle) and the in-spill peak-to-average ratio. From a requested peak
//! interaction rate the plan derives the three rates every downstream sizing
//! step needs:
//!
//! - peak: instantaneous, what front-end electronics must absorb,
//! - average: mean rate while the spill is on, what readout links carry,
//! - sustained: duty-cycle weighted long-term mean, what storage integrates.
//!
//! Detector-specific ceilings (a slow detector capping the average rate, or
//! an instantaneous limit from a counting detector) are applied through
//! [`RateCaps`].

use crate::quantities::{Duration, EventRate};
use crate::{finite_nonneg, finite_positive, invalid, unit_fraction, Result};

/// A year of accelerator operation as seen from one experimental cave.
#[derive(Debug, Clone, PartialEq)]
pub struct MachinePlan {
    machine_hours_per_year: f64,
    cave_share: f64,
    competing_days: f64,
    duty_cycle: f64,
    peak_to_average: f64,
    operational_efficiency: f64,
}

impl MachinePlan {
    /// Builds a plan; rejects plans where the competing experiment's days
    /// exceed the cave's total allocation, so the beam-seconds remainder can
    /// never go negative.
    pub fn new(
        machine_hours_per_year: f64,
        cave_share: f64,
        competing_days: f64,
        duty_cycle: f64,
        peak_to_average: f64,
    ) -> Result<Self> {
        let machine_hours_per_year = finite_nonneg("machine hours", machine_hours_per_year)?;
        let cave_share = unit_fraction("cave share", cave_share)?;
        let competing_days = finite_nonneg("competing days", competing_days)?;
        let duty_cycle = finite_positive("duty cycle", duty_cycle)?;
        if duty_cycle > 1.0 {
            return Err(invalid("duty cycle", format!("must be <= 1, got {duty_cycle}")));
        }
        let peak_to_average = finite_positive("peak-to-average ratio", peak_to_average)?;
        if peak_to_average < 1.0 {
            return Err(invalid(
                "peak-to-average ratio",
                format!("must be >= 1, got {peak_to_average}"),
            ));
        }
        let cave_hours = machine_hours_per_year * cave_share;
        if competing_days * 24.0 > cave_hours {
            return Err(invalid(
                "machine plan",
                format!(
                    "competing use ({competing_days} days) exceeds the cave allocation \
                     ({cave_hours} hours)"
                ),
            ));
        }
        Ok(Self {
            machine_hours_per_year,
            cave_share,
            competing_days,
            duty_cycle,
            peak_to_average,
            operational_efficiency: 1.0,
        })
    }

    /// Fraction of scheduled beam time actually delivered; defaults to 1.
    pub fn with_operational_efficiency(mut self, efficiency: f64) -> Result<Self> {
        let efficiency = finite_positive("operational efficiency", efficiency)?;
        if efficiency > 1.0 {
            return Err(invalid(
                "operational efficiency",
                format!("must be <= 1, got {efficiency}"),
            ));
        }
        self.operational_efficiency = efficiency;
        Ok(self)
    }

    pub fn duty_cycle(&self) -> f64 {
        self.duty_cycle
    }

    pub fn peak_to_average(&self) -> f64 {
        self.peak_to_average
    }

    pub fn operational_efficiency(&self) -> f64 {
        self.operational_efficiency
    }

    /// Beam seconds the cave gets per year: the cave's share of machine
    /// hours, minus the competing experiment's days, scaled by delivery
    /// efficiency.
    pub fn annual_beam_seconds(&self) -> Duration {
        let hours = self.machine_hours_per_year * self.cave_share - self.competing_days * 24.0;
        // non-negative by construction
        Duration::from_seconds(hours * 3600.0 * self.operational_efficiency)
            .expect("plan invariants keep beam seconds finite and non-negative")
    }

    /// Derives the rate profile for a requested peak interaction rate.
    ///
    /// The peak is clamped to an instantaneous cap first; the in-spill
    /// average is the clamped peak over the peak-to-average ratio, further
    /// limited by an average-rate cap; sustained is the average scaled by
    /// the duty cycle. The ordering peak >= average >= sustained always
    /// holds.
    pub fn rate_profile(&self, requested_peak: EventRate, caps: &RateCaps) -> RateProfile {
        let peak = match caps.peak {
            Some(cap) => requested_peak.min(cap),
            None => requested_peak,
        };
        let uncapped_average = EventRate::per_second(peak.get() / self.peak_to_average)
            .expect("ratio >= 1 keeps the average finite");
        let average = match caps.average {
            Some(cap) => uncapped_average.min(cap),
            None => uncapped_average,
        };
        let sustained = average
            .scale(self.duty_cycle)
            .expect("duty cycle is a valid fraction");
        RateProfile {
            peak,
            average,
            sustained,
        }
    }
}

/// Optional ceilings imposed by the slowest detector in a setup.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RateCaps {
    /// Ceiling on the in-spill average rate (readout bandwidth bound).
    pub average: Option<EventRate>,
    /// Ceiling on the instantaneous rate (counting or pile-up bound).
    pub peak: Option<EventRate>,
}

impl RateCaps {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn average_limit(rate: EventRate) -> Self {
        Self {
            average: Some(rate),
            peak: None,
        }
    }

    pub fn peak_limit(rate: EventRate) -> Self {
        Self {
            average: None,
            peak: Some(rate),
        }
    }
}

/// The three operationally distinct interaction rates of a running setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateProfile {
    peak: EventRate,
    average: EventRate,
    sustained: EventRate,
}

impl RateProfile {
    pub fn peak(&self) -> EventRate {
        self.peak
    }

    pub fn average(&self) -> EventRate {
        self.average
    }

    pub fn sustained(&self) -> EventRate {
        self.sustained
    }
}
