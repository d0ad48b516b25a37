//! Detector payloads, event sizes, and readout bandwidth.
//!
//! In a free-streaming readout every detector ships self-describing messages
//! and an "event" is just the slice of the stream a collision leaves behind.
//! Event size is therefore modeled per detector as messages per event times
//! bytes per message; varying counts with collision energy is a single
//! multiplicative factor on the total.

use crate::beamline::{RateCaps, RateProfile};
use crate::quantities::{Convention, DataRate, DataVolume};
use crate::{finite_nonneg, finite_positive, invalid, Result};

/// Fallback noise allowance for readout links when no setup-specific value
/// is configured: the measured dark-signal share of the silicon tracker's
/// in-spill data rate under nominal operating conditions.
pub const DEFAULT_NOISE_FRACTION: f64 = 9.6 / 244.0;

/// One detector's share of an event.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorContribution {
    name: String,
    messages_per_event: f64,
    bytes_per_message: f64,
}

impl DetectorContribution {
    pub fn new(
        name: impl Into<String>,
        messages_per_event: f64,
        bytes_per_message: f64,
    ) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            messages_per_event: finite_nonneg("messages per event", messages_per_event)?,
            bytes_per_message: finite_nonneg("bytes per message", bytes_per_message)?,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn messages_per_event(&self) -> f64 {
        self.messages_per_event
    }

    pub fn bytes_per_message(&self) -> f64 {
        self.bytes_per_message
    }

    /// Bytes this detector adds to one event, before any energy scaling.
    pub fn bytes_per_event(&self) -> f64 {
        self.messages_per_event * self.bytes_per_message
    }
}

/// A detector combination running as one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    name: String,
    contributions: Vec<DetectorContribution>,
    energy_scale_factor: f64,
    rate_caps: RateCaps,
    convention: Convention,
}

impl Setup {
    pub fn new(name: impl Into<String>, contributions: Vec<DetectorContribution>) -> Self {
        Self {
            name: name.into(),
            contributions,
            energy_scale_factor: 1.0,
            rate_caps: RateCaps::none(),
            convention: Convention::Decimal,
        }
    }

    /// Multiplier on the total event size for running at a different beam
    /// energy than the one the message counts were simulated at.
    pub fn with_energy_scale(mut self, factor: f64) -> Result<Self> {
        self.energy_scale_factor = finite_positive("energy scale factor", factor)?;
        Ok(self)
    }

    /// Rate ceilings imposed by the slowest detector in this combination.
    pub fn with_rate_caps(mut self, caps: RateCaps) -> Self {
        self.rate_caps = caps;
        self
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contributions(&self) -> &[DetectorContribution] {
        &self.contributions
    }

    pub fn energy_scale_factor(&self) -> f64 {
        self.energy_scale_factor
    }

    pub fn rate_caps(&self) -> &RateCaps {
        &self.rate_caps
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Total bytes per event: sum over contributions, scaled by the energy
    /// factor. An empty setup has a zero event size.
    pub fn event_size(&self) -> DataVolume {
        let bytes: f64 = self
            .contributions
            .iter()
            .map(DetectorContribution::bytes_per_event)
            .sum();
        DataVolume::from_bytes(bytes * self.energy_scale_factor, self.convention)
            .expect("validated contributions keep the size finite")
    }

    /// Data rate while the spill is on: the profile's average interaction
    /// rate times the event size. This is what the readout network and the
    /// uplink to the compute center must carry.
    pub fn inspill_data_rate(&self, profile: &RateProfile) -> DataRate {
        profile.average() * self.event_size()
    }

    /// Long-term data rate with the spill structure folded in.
    pub fn sustained_data_rate(&self, profile: &RateProfile) -> DataRate {
        profile.sustained() * self.event_size()
    }
}

/// Sizing of the uplink from the experiment to the compute center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthRequirement {
    /// Physics payload alone.
    pub base: DataRate,
    /// Payload plus the noise allowance; the planning upper limit before
    /// headroom.
    pub upper_limit: DataRate,
    /// Upper limit times the contingency factor; what gets installed.
    pub required: DataRate,
}

/// Adds a noise allowance and contingency headroom on top of a base rate.
///
/// `noise_fraction` is the extra share of the base rate expected from dark
/// signals and electronics noise (see [`DEFAULT_NOISE_FRACTION`]);
/// `contingency` is the installation headroom factor and must be at least 1.
pub fn gc_bandwidth_requirement(
    base: DataRate,
    noise_fraction: f64,
    contingency: f64,
) -> Result<BandwidthRequirement> {
    let noise_fraction = finite_nonneg("noise fraction", noise_fraction)?;
    let contingency = finite_positive("contingency factor", contingency)?;
    if contingency < 1.0 {
        return Err(invalid(
            "contingency factor",
            format!("must be >= 1, got {contingency}"),
        ));
    }
    let upper_limit = base.scale(1.0 + noise_fraction)?;
    let required = upper_limit.scale(contingency)?;
    Ok(BandwidthRequirement {
        base,
        upper_limit,
        required,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamline::MachinePlan;
    use crate::quantities::{EventRate, Prefix};

    fn plan() -> MachinePlan {
        MachinePlan::new(6000.0, 0.5, 30.0, 0.75, 2.0).unwrap()
    }

    fn hadron_setup() -> Setup {
        Setup::new(
            "hadron",
            vec![
                DetectorContribution::new("STS", 5395.0, 4.0).unwrap(),
                DetectorContribution::new("TRD", 1810.0, 12.0).unwrap(),
                DetectorContribution::new("TOF", 670.0, 8.0).unwrap(),
            ],
        )
    }

    fn electron_setup() -> Setup {
        Setup::new(
            "electron",
            vec![
                DetectorContribution::new("MVD", 3156.0, 4.0).unwrap(),
                DetectorContribution::new("STS", 4779.0, 4.0).unwrap(),
                DetectorContribution::new("RICH", 425.0, 4.0).unwrap(),
                DetectorContribution::new("TRD", 2487.0, 12.0).unwrap(),
                DetectorContribution::new("TOF", 1079.0, 8.0).unwrap(),
                DetectorContribution::new("PSD", 403.0, 4.0).unwrap(),
            ],
        )
        .with_rate_caps(RateCaps::average_limit(EventRate::per_second(1.0e5).unwrap()))
    }

    fn muon_setup() -> Setup {
        Setup::new(
            "muon",
            vec![
                DetectorContribution::new("STS", 5668.0, 4.0).unwrap(),
                DetectorContribution::new("MUCH", 926.0, 4.0).unwrap(),
                DetectorContribution::new("TRD", 55.0, 12.0).unwrap(),
                DetectorContribution::new("TOF", 126.0, 8.0).unwrap(),
            ],
        )
    }

    #[test]
    fn event_sizes_sum_message_payloads() {
        assert_eq!(hadron_setup().event_size().bytes(), 48_660.0);
        assert_eq!(electron_setup().event_size().bytes(), 73_528.0);
        assert_eq!(muon_setup().event_size().bytes(), 28_044.0);
    }

    #[test]
    fn empty_setup_has_zero_size() {
        let empty = Setup::new("bare", vec![]);
        assert_eq!(empty.event_size().bytes(), 0.0);
    }

    #[test]
    fn energy_scale_shrinks_the_event() {
        // lower collision energy produces fewer messages across the board
        let low = hadron_setup().with_energy_scale(0.70).unwrap();
        assert_eq!(low.event_size().bytes(), 48_660.0 * 0.70);
    }

    #[test]
    fn inspill_rates_for_the_three_setups() {
        let plan = plan();
        let fast = plan.rate_profile(EventRate::per_second(1.0e7).unwrap(), &RateCaps::none());

        let hadron = hadron_setup().inspill_data_rate(&fast);
        assert!((hadron.value_in(Prefix::Giga) - 243.3).abs() < 0.01);

        let electron_profile =
            plan.rate_profile(EventRate::per_second(1.0e7).unwrap(), electron_setup().rate_caps());
        let electron = electron_setup().inspill_data_rate(&electron_profile);
        assert!((electron.value_in(Prefix::Giga) - 7.3528).abs() < 1e-4);

        let muon = muon_setup().inspill_data_rate(&fast);
        assert!((muon.value_in(Prefix::Giga) - 140.22).abs() < 0.01);
    }

    #[test]
    fn sustained_rate_folds_in_the_duty_cycle() {
        let plan = plan();
        let profile = plan.rate_profile(EventRate::per_second(1.0e7).unwrap(), &RateCaps::none());
        let rate = hadron_setup().sustained_data_rate(&profile);
        assert!((rate.value_in(Prefix::Giga) - 182.475).abs() < 1e-3);
    }

    #[test]
    fn bandwidth_requirement_stacks_noise_then_contingency() {
        let base = DataRate::from_bytes_per_second(243.3e9, Convention::Decimal).unwrap();
        let req = gc_bandwidth_requirement(base, 0.10, 1.5).unwrap();
        assert!((req.upper_limit.value_in(Prefix::Giga) - 267.63).abs() < 0.01);
        assert!((req.required.value_in(Prefix::Giga) - 401.445).abs() < 0.01);
    }

    #[test]
    fn default_noise_fraction_reflects_the_dark_rate_share() {
        assert!((DEFAULT_NOISE_FRACTION - 0.03934).abs() < 1e-4);
        let base = DataRate::from_bytes_per_second(244.0e9, Convention::Decimal).unwrap();
        let req = gc_bandwidth_requirement(base, DEFAULT_NOISE_FRACTION, 1.0).unwrap();
        assert!((req.upper_limit.value_in(Prefix::Giga) - 253.6).abs() < 0.01);
    }

    #[test]
    fn zero_base_rate_is_fine_but_bad_factors_are_not() {
        let zero = DataRate::from_bytes_per_second(0.0, Convention::Decimal).unwrap();
        let req = gc_bandwidth_requirement(zero, 0.10, 1.5).unwrap();
        assert_eq!(req.required.bytes_per_second(), 0.0);

        assert!(gc_bandwidth_requirement(zero, -0.1, 1.5).is_err());
        assert!(gc_bandwidth_requirement(zero, 0.1, 0.9).is_err());
    }
}
