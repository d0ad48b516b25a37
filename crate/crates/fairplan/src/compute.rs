//! Compute sizing: online farms, reprocessing campaigns, simulation.
//!
//! All capacity figures are expressed in HEPSpec06 (HS06) benchmark units so
//! machines of different generations can be compared. Per-event processing
//! times measured on a reference machine convert to HS06 seconds per event
//! through that machine's per-core rating; dividing by the wall-clock budget
//! of a campaign gives the standing capacity it needs.

use crate::quantities::{ComputePower, Duration, EventRate};
use crate::{finite_nonneg, finite_positive, invalid, Result};

/// A benchmark reference: a machine with a known core count, per-core HS06
/// rating, and clock.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMachine {
    name: String,
    cores: f64,
    hs06_per_core: f64,
    clock_mhz: f64,
}

impl ReferenceMachine {
    pub fn new(
        name: impl Into<String>,
        cores: f64,
        hs06_per_core: f64,
        clock_mhz: f64,
    ) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            cores: finite_positive("core count", cores)?,
            hs06_per_core: finite_positive("HS06 per core", hs06_per_core)?,
            clock_mhz: finite_positive("clock", clock_mhz)?,
        })
    }

    /// Builds from a whole-machine rating instead of a per-core one.
    pub fn from_total(
        name: impl Into<String>,
        cores: f64,
        hs06_total: ComputePower,
        clock_mhz: f64,
    ) -> Result<Self> {
        let cores = finite_positive("core count", cores)?;
        Self::new(name, cores, hs06_total.get() / cores, clock_mhz)
    }

    /// Checks a redundantly specified machine: per-core times cores must
    /// agree with the quoted total within 2%.
    pub fn check_total(&self, quoted_total: ComputePower) -> Result<()> {
        let derived = self.hs06_total().get();
        let quoted = quoted_total.get();
        if quoted == 0.0 && derived == 0.0 {
            return Ok(());
        }
        let rel = (derived - quoted).abs() / quoted.max(f64::MIN_POSITIVE);
        if rel > 0.02 {
            return Err(invalid(
                "reference machine",
                format!(
                    "per-core rating x cores gives {derived:.1} HS06 but the quoted total \
                     is {quoted:.1} (off by {:.1}%)",
                    rel * 100.0
                ),
            ));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cores(&self) -> f64 {
        self.cores
    }

    pub fn hs06_per_core(&self) -> f64 {
        self.hs06_per_core
    }

    pub fn clock_mhz(&self) -> f64 {
        self.clock_mhz
    }

    pub fn hs06_total(&self) -> ComputePower {
        ComputePower::hs06(self.hs06_per_core * self.cores).expect("validated fields")
    }

    /// Events per second one machine sustains at `seconds_per_event` per
    /// core.
    pub fn events_per_second(&self, seconds_per_event: Duration) -> f64 {
        if seconds_per_event.seconds() == 0.0 {
            return f64::INFINITY;
        }
        self.cores / seconds_per_event.seconds()
    }
}

/// One step of a processing chain with its measured per-event time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessingStage {
    pub name: String,
    pub seconds_per_event: f64,
}

impl ProcessingStage {
    pub fn new(name: impl Into<String>, seconds_per_event: f64) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            seconds_per_event: finite_nonneg("seconds per event", seconds_per_event)?,
        })
    }
}

/// Total per-event time of a pipeline built from stages.
pub fn stage_sum(stages: &[ProcessingStage]) -> Duration {
    let total: f64 = stages.iter().map(|s| s.seconds_per_event).sum();
    Duration::from_seconds(total).expect("validated stages")
}

/// Per-event time of the full online chain, extrapolated from a measured
/// first-level step.
///
/// `full_chain_factor` scales the first-level time to the complete
/// reconstruction; `momentum_factor` divides it back out where a magnetic
/// field measurement shortens tracking. Both must be at least 1.
pub fn online_reco_time(
    first_level: Duration,
    full_chain_factor: f64,
    momentum_factor: f64,
) -> Result<Duration> {
    let full_chain_factor = finite_positive("full-chain factor", full_chain_factor)?;
    if full_chain_factor < 1.0 {
        return Err(invalid(
            "full-chain factor",
            format!("must be >= 1, got {full_chain_factor}"),
        ));
    }
    let momentum_factor = finite_positive("momentum factor", momentum_factor)?;
    if momentum_factor < 1.0 {
        return Err(invalid(
            "momentum factor",
            format!("must be >= 1, got {momentum_factor}"),
        ));
    }
    Duration::from_seconds(first_level.seconds() * full_chain_factor / momentum_factor)
}

/// Size of an online farm that keeps up with a sustained event rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineRequirement {
    /// Concurrently busy cores (rate times per-event time).
    pub cores: f64,
    /// Fractional machine count at the reference machine's core count.
    pub machines: f64,
    /// Machines rounded up to whole boxes for procurement.
    pub machines_ceiled: u64,
    /// Capacity of the fractional machine count.
    pub hs06: ComputePower,
}

/// Cores and capacity needed to reconstruct `sustained` events per second at
/// `per_event` seconds each on the given reference machine.
pub fn online_compute_requirement(
    sustained: EventRate,
    per_event: Duration,
    machine: &ReferenceMachine,
) -> OnlineRequirement {
    let cores = sustained.get() * per_event.seconds();
    let machines = cores / machine.cores();
    OnlineRequirement {
        cores,
        machines,
        machines_ceiled: machines.ceil() as u64,
        hs06: machine
            .hs06_total()
            .scale(machines)
            .expect("machine count is finite and non-negative"),
    }
}

/// HS06 seconds one event costs at `per_event` seconds on a core rated
/// `hs06_per_core`.
pub fn hs06_per_event(per_event: Duration, hs06_per_core: f64) -> Result<f64> {
    let rating = finite_nonneg("HS06 per core", hs06_per_core)?;
    Ok(per_event.seconds() * rating)
}

/// A processing campaign: a yearly event sample pushed through a chain a
/// fixed number of times.
#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    name: String,
    events: f64,
    hs06_per_event: f64,
    active_days: f64,
    cpu_efficiency: f64,
    generations: u32,
}

impl Campaign {
    pub fn new(
        name: impl Into<String>,
        events: f64,
        hs06_per_event: f64,
        active_days: f64,
        cpu_efficiency: f64,
        generations: u32,
    ) -> Result<Self> {
        let active_days = finite_positive("active days", active_days)?;
        if active_days > 366.0 {
            return Err(invalid("active days", format!("must be <= 366, got {active_days}")));
        }
        let cpu_efficiency = finite_positive("CPU efficiency", cpu_efficiency)?;
        if cpu_efficiency > 1.0 {
            return Err(invalid(
                "CPU efficiency",
                format!("must be <= 1, got {cpu_efficiency}"),
            ));
        }
        if generations == 0 {
            return Err(invalid("generations", "must be >= 1"));
        }
        Ok(Self {
            name: name.into(),
            events: finite_nonneg("events", events)?,
            hs06_per_event: finite_nonneg("HS06 per event", hs06_per_event)?,
            active_days,
            cpu_efficiency,
            generations,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn events(&self) -> f64 {
        self.events
    }

    pub fn hs06_per_event(&self) -> f64 {
        self.hs06_per_event
    }

    pub fn active_days(&self) -> f64 {
        self.active_days
    }

    pub fn cpu_efficiency(&self) -> f64 {
        self.cpu_efficiency
    }

    pub fn generations(&self) -> u32 {
        self.generations
    }

    /// Standing capacity for one pass and for all passes in a year. The
    /// efficiency divides the usable wall clock: a farm that is 85% busy
    /// needs proportionally more installed capacity.
    pub fn requirement(&self) -> CampaignRequirement {
        let usable_seconds = self.active_days * 86_400.0 * self.cpu_efficiency;
        let per_generation = ComputePower::hs06(self.events * self.hs06_per_event / usable_seconds)
            .expect("validated campaign fields");
        let per_year = per_generation
            .scale(self.generations as f64)
            .expect("generation count is small");
        CampaignRequirement {
            per_generation,
            per_year,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignRequirement {
    pub per_generation: ComputePower,
    pub per_year: ComputePower,
}

/// Capacity to produce `events` simulated events at `per_event` seconds each
/// within a wall-clock budget on the given reference machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationRequirement {
    pub cores: f64,
    pub hs06: ComputePower,
}

pub fn simulation_compute_requirement(
    events: f64,
    per_event: Duration,
    machine: &ReferenceMachine,
    wall: Duration,
) -> Result<SimulationRequirement> {
    let events = finite_nonneg("events", events)?;
    if wall.seconds() == 0.0 {
        return Err(invalid("wall clock", "must be > 0"));
    }
    let cores = events * per_event.seconds() / wall.seconds();
    Ok(SimulationRequirement {
        cores,
        hs06: ComputePower::hs06(cores * machine.hs06_per_core())?,
    })
}

/// Total offline capacity: simulation plus reconstruction plus an analysis
/// share proportional to simulation.
///
/// The proportionality follows the common planning rule that analysis load
/// tracks the simulated sample size.
pub fn offline_total(
    simulation: ComputePower,
    reconstruction: ComputePower,
    analysis_fraction_of_simulation: f64,
) -> Result<ComputePower> {
    let fraction = finite_nonneg("analysis fraction", analysis_fraction_of_simulation)?;
    Ok(simulation + reconstruction + simulation.scale(fraction)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn online_machine() -> ReferenceMachine {
        // 40 cores, whole-box rating 616 HS06 at 2260 MHz
        ReferenceMachine::from_total("online-box", 40.0, ComputePower::hs06(616.0).unwrap(), 2260.0)
            .unwrap()
    }

    fn offline_core() -> ReferenceMachine {
        ReferenceMachine::new("batch-node", 28.0, 22.0, 2400.0).unwrap()
    }

    #[test]
    fn redundant_totals_must_agree_within_two_percent() {
        let m = offline_core();
        assert!(m.check_total(ComputePower::hs06(616.0).unwrap()).is_ok());
        assert!(m.check_total(ComputePower::hs06(620.0).unwrap()).is_ok());
        assert!(m.check_total(ComputePower::hs06(700.0).unwrap()).is_err());
    }

    #[test]
    fn online_time_extrapolates_from_the_first_level() {
        // 8.5 ms first level, 3x for the full chain, 1.5x faster with a
        // momentum measurement
        let t = online_reco_time(Duration::from_seconds(0.0085).unwrap(), 3.0, 1.5).unwrap();
        assert!((t.seconds() - 0.017).abs() < 1e-12);
        assert!(online_reco_time(Duration::from_seconds(0.0085).unwrap(), 0.5, 1.0).is_err());
    }

    #[test]
    fn online_farm_for_a_sustained_interaction_rate() {
        let t = online_reco_time(Duration::from_seconds(0.0085).unwrap(), 3.0, 1.5).unwrap();
        let req = online_compute_requirement(
            EventRate::per_second(3.75e6).unwrap(),
            t,
            &online_machine(),
        );
        assert!((req.cores - 63_750.0).abs() < 1e-6);
        assert!((req.machines - 1593.75).abs() < 1e-9);
        assert_eq!(req.machines_ceiled, 1594);
        assert!((req.hs06.get() - 981_750.0).abs() < 1.0);
    }

    #[test]
    fn one_machine_throughput_matches_its_core_count() {
        let m = online_machine();
        let t = Duration::from_seconds(0.017).unwrap();
        // 40 cores at 17 ms each
        assert!((m.events_per_second(t) - 2352.9).abs() < 0.1);
    }

    #[test]
    fn zero_rate_needs_no_farm() {
        let req = online_compute_requirement(
            EventRate::per_second(0.0).unwrap(),
            Duration::from_seconds(0.017).unwrap(),
            &online_machine(),
        );
        assert_eq!(req.cores, 0.0);
        assert_eq!(req.machines_ceiled, 0);
        assert_eq!(req.hs06.get(), 0.0);
    }

    #[test]
    fn stage_sums_build_pipeline_times() {
        let stages = vec![
            ProcessingStage::new("reco", 0.05).unwrap(),
            ProcessingStage::new("tracking", 0.06).unwrap(),
            ProcessingStage::new("pid", 0.12).unwrap(),
            ProcessingStage::new("filter", 0.01).unwrap(),
        ];
        let online = stage_sum(&stages);
        // the quoted figure 0.23 rounds the same sum; stay within 5%
        assert!((online.seconds() - 0.24).abs() < 1e-12);
        assert!((online.seconds() - 0.23).abs() / 0.23 < 0.05);

        let offline = stage_sum(&[
            ProcessingStage::new("reco", 0.05).unwrap(),
            ProcessingStage::new("tracking-kalman", 0.64).unwrap(),
            ProcessingStage::new("pid", 0.12).unwrap(),
        ]);
        assert!((offline.seconds() - 0.81).abs() < 1e-12);

        let simulation = stage_sum(&[
            ProcessingStage::new("sim", 2.86).unwrap(),
            ProcessingStage::new("digi", 0.07).unwrap(),
            ProcessingStage::new("reco", 0.05).unwrap(),
            ProcessingStage::new("tracking-kalman", 0.64).unwrap(),
            ProcessingStage::new("pid", 0.12).unwrap(),
        ]);
        assert!((simulation.seconds() - 3.74).abs() < 1e-12);
        assert!((simulation.seconds() - 3.7).abs() / 3.7 < 0.05);
    }

    #[test]
    fn hs06_per_event_converts_through_the_core_rating() {
        let v = hs06_per_event(Duration::from_seconds(0.23).unwrap(), 22.0).unwrap();
        assert!((v - 5.06).abs() < 1e-12);
        let v = hs06_per_event(Duration::from_seconds(0.81).unwrap(), 22.0).unwrap();
        assert!((v - 17.82).abs() < 1e-12);
        let v = hs06_per_event(Duration::from_seconds(3.7).unwrap(), 22.0).unwrap();
        assert!((v - 81.4).abs() < 1e-12);
        assert_eq!(hs06_per_event(Duration::from_seconds(0.0).unwrap(), 22.0).unwrap(), 0.0);
    }

    #[test]
    fn campaign_requirements_for_three_processing_chains() {
        let online = Campaign::new("online", 7.0e11, 5.06, 100.0, 0.85, 1).unwrap();
        let req = online.requirement();
        assert!((req.per_generation.get() - 482_298.7).abs() < 1.0);
        assert_eq!(req.per_year.get(), req.per_generation.get());

        let offline = Campaign::new("offline", 7.0e10, 17.82, 365.0, 0.85, 4).unwrap();
        let req = offline.requirement();
        assert!((req.per_generation.get() - 46_535.0).abs() < 1.0);
        assert!((req.per_year.get() - 186_140.2).abs() < 1.0);

        let sim = Campaign::new("simulation", 1.4e11, 81.4, 365.0, 0.95, 4).unwrap();
        let req = sim.requirement();
        assert!((req.per_generation.get() - 380_383.8).abs() < 1.0);
        assert!((req.per_year.get() - 1_521_535.3).abs() < 1.0);
    }

    #[test]
    fn campaign_scales_linearly_with_events_and_generations() {
        let base = Campaign::new("c", 1.0e10, 10.0, 100.0, 1.0, 1).unwrap();
        let double = Campaign::new("c", 2.0e10, 10.0, 100.0, 1.0, 1).unwrap();
        assert!(
            (double.requirement().per_year.get() - 2.0 * base.requirement().per_year.get()).abs()
                < 1e-6
        );
        let four_gen = Campaign::new("c", 1.0e10, 10.0, 100.0, 1.0, 4).unwrap();
        assert_eq!(
            four_gen.requirement().per_year.get(),
            4.0 * base.requirement().per_generation.get()
        );
    }

    #[test]
    fn simulation_requirement_over_a_year() {
        let req = simulation_compute_requirement(
            1.775e11,
            Duration::from_seconds(4.0).unwrap(),
            &offline_core(),
            Duration::from_days(365.0).unwrap(),
        )
        .unwrap();
        assert!((req.cores - 22_514.0).abs() < 1.0);
        assert!((req.hs06.get() - 495_306.0).abs() < 10.0);
    }

    #[test]
    fn reconstruction_burst_over_a_week() {
        // a year's 1.1e11 triggered events reprocessed within 7 days
        let req = simulation_compute_requirement(
            1.1e11,
            Duration::from_seconds(0.017).unwrap(),
            &offline_core(),
            Duration::from_days(7.0).unwrap(),
        )
        .unwrap();
        assert!((req.cores - 3_091.9).abs() < 0.1);
    }

    #[test]
    fn offline_total_adds_an_analysis_share() {
        let total = offline_total(
            ComputePower::hs06(500_000.0).unwrap(),
            ComputePower::hs06(22_000.0).unwrap(),
            0.5,
        )
        .unwrap();
        assert_eq!(total.get(), 772_000.0);
    }

    #[test]
    fn analysis_fraction_from_a_capacity_split() {
        // planning rule of thumb: simulation ends up at 70% of the total
        // when analysis is weighted against it and reconstruction is small.
        // solving sim / (sim + f x sim) = 0.70 gives f = 3/7.
        let f = (1.0 - 0.70) / 0.70;
        let sim = ComputePower::hs06(700_000.0).unwrap();
        let total = offline_total(sim, ComputePower::zero(), f).unwrap();
        assert!((sim.get() / total.get() - 0.70).abs() < 1e-12);
        assert!((f - 0.43).abs() < 0.005);
    }
}
