//! Trigger chains, annual storage plans, and transient filtering buffers.
//!
//! Event selection is modeled as parallel branches on one stream. A branch
//! keeps one event in `selectivity` by physics content and then one in
//! `random_reduction` of those by downscaling, so its stored share is the
//! product of the two factors. Branches are additive: a physics branch and a
//! downscaled minimum-bias branch both write to storage.

use crate::detector::Setup;
use crate::beamline::RateProfile;
use crate::quantities::{DataRate, DataVolume, Duration};
use crate::{finite_nonneg, finite_positive, invalid, Result};

/// One selection branch of a run's trigger chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerBranch {
    name: String,
    selectivity: f64,
    random_reduction: f64,
    equivalent_events: Option<f64>,
}

impl TriggerBranch {
    /// Both factors are "keep one in N" and must be at least 1.
    pub fn new(name: impl Into<String>, selectivity: f64, random_reduction: f64) -> Result<Self> {
        let selectivity = finite_positive("selectivity", selectivity)?;
        let random_reduction = finite_positive("random reduction", random_reduction)?;
        if selectivity < 1.0 {
            return Err(invalid("selectivity", format!("must be >= 1, got {selectivity}")));
        }
        if random_reduction < 1.0 {
            return Err(invalid(
                "random reduction",
                format!("must be >= 1, got {random_reduction}"),
            ));
        }
        Ok(Self {
            name: name.into(),
            selectivity,
            random_reduction,
            equivalent_events: None,
        })
    }

    /// Physics bookkeeping figure carried through to reports verbatim: how
    /// many minimum-bias collisions the stored sample is worth for analysis.
    /// Never derived by the engine.
    pub fn with_equivalent_events(mut self, events: f64) -> Result<Self> {
        self.equivalent_events = Some(finite_nonneg("equivalent events", events)?);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn selectivity(&self) -> f64 {
        self.selectivity
    }

    pub fn random_reduction(&self) -> f64 {
        self.random_reduction
    }

    pub fn equivalent_events(&self) -> Option<f64> {
        self.equivalent_events
    }

    /// Combined reduction: stored events are `1 / total_reduction` of the
    /// sustained stream.
    pub fn total_reduction(&self) -> f64 {
        self.selectivity * self.random_reduction
    }
}

/// A data-taking run: one setup at one rate profile for a stretch of beam
/// seconds, selecting with a set of trigger branches.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    name: String,
    setup: Setup,
    profile: RateProfile,
    run_seconds: Duration,
    branches: Vec<TriggerBranch>,
}

impl RunPlan {
    pub fn new(
        name: impl Into<String>,
        setup: Setup,
        profile: RateProfile,
        run_seconds: Duration,
        branches: Vec<TriggerBranch>,
    ) -> Self {
        Self {
            name: name.into(),
            setup,
            profile,
            run_seconds,
            branches,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn setup(&self) -> &Setup {
        &self.setup
    }

    pub fn profile(&self) -> &RateProfile {
        &self.profile
    }

    pub fn run_seconds(&self) -> Duration {
        self.run_seconds
    }

    pub fn branches(&self) -> &[TriggerBranch] {
        &self.branches
    }

    /// Raw data rate while the spill is on.
    pub fn inspill_data_rate(&self) -> DataRate {
        self.setup.inspill_data_rate(&self.profile)
    }

    /// Long-term raw data rate with the spill structure folded in; the rate
    /// the trigger chain actually sees integrated over the run.
    pub fn sustained_data_rate(&self) -> DataRate {
        self.setup.sustained_data_rate(&self.profile)
    }

    /// What one branch writes over the whole run.
    pub fn branch_storage(&self, branch: &TriggerBranch) -> BranchStorage {
        let reduction = branch.total_reduction();
        let raw = self.sustained_data_rate() * self.run_seconds;
        let volume = raw
            .scale(1.0 / reduction)
            .expect("reduction >= 1 keeps the share a valid fraction");
        let stored_events =
            self.profile.sustained().get() * self.run_seconds.seconds() / reduction;
        BranchStorage {
            volume,
            stored_events,
        }
    }

    /// Total stored volume across all branches.
    pub fn stored_volume(&self) -> DataVolume {
        self.branches
            .iter()
            .map(|b| self.branch_storage(b).volume)
            .fold(DataVolume::zero(self.setup.convention()), |acc, v| acc + v)
    }

    /// Bandwidth into permanent storage: the sum of all branch write rates,
    /// plus a peak figure with contingency headroom for catching up after
    /// interruptions.
    pub fn archival_bandwidth(&self, contingency: f64) -> Result<ArchivalBandwidth> {
        let contingency = finite_positive("contingency factor", contingency)?;
        if contingency < 1.0 {
            return Err(invalid(
                "contingency factor",
                format!("must be >= 1, got {contingency}"),
            ));
        }
        let sustained = self.sustained_data_rate();
        let average = self
            .branches
            .iter()
            .map(|b| {
                sustained
                    .scale(1.0 / b.total_reduction())
                    .expect("reduction >= 1")
            })
            .fold(
                DataRate::from_bytes_per_second(0.0, sustained.convention()).unwrap(),
                |acc, r| acc + r,
            );
        let peak = average.scale(contingency)?;
        Ok(ArchivalBandwidth { average, peak })
    }

    /// Buffer sizing for delayed software filtering: raw data is staged for
    /// `holding` after a first-level reduction, so selection software can be
    /// refined while the data waits.
    ///
    /// The buffer volume is driven by the in-spill rate (data arrives at
    /// spill speed and must fit whatever the spill structure delivers in the
    /// holding window at worst), while the write bandwidth into the buffer
    /// follows the sustained rate. Reads are budgeted equal to writes since
    /// every staged byte is read back at least once for filtering.
    pub fn transient_filter_requirements(
        &self,
        first_level_reduction: f64,
        holding: Duration,
    ) -> Result<TransientRequirements> {
        let reduction = finite_positive("first-level reduction", first_level_reduction)?;
        if reduction < 1.0 {
            return Err(invalid(
                "first-level reduction",
                format!("must be >= 1, got {reduction}"),
            ));
        }
        let volume = (self.inspill_data_rate() * holding).scale(1.0 / reduction)?;
        let write_bandwidth = self.sustained_data_rate().scale(1.0 / reduction)?;
        Ok(TransientRequirements {
            volume,
            write_bandwidth,
            read_bandwidth: write_bandwidth,
        })
    }
}

/// Stored outcome of one trigger branch over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchStorage {
    pub volume: DataVolume,
    pub stored_events: f64,
}

/// Write path into permanent storage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchivalBandwidth {
    pub average: DataRate,
    pub peak: DataRate,
}

/// Staging buffer for delayed filtering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientRequirements {
    pub volume: DataVolume,
    pub write_bandwidth: DataRate,
    pub read_bandwidth: DataRate,
}

/// One line of the annual storage plan: a branch of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageRow {
    pub run: String,
    pub setup: String,
    pub branch: String,
    pub selectivity: f64,
    pub random_reduction: f64,
    pub sustained_rate: DataRate,
    pub run_seconds: Duration,
    pub volume: DataVolume,
    pub stored_events: f64,
    pub equivalent_events: Option<f64>,
}

/// The year's storage demand across all runs.
#[derive(Debug, Clone, PartialEq)]
pub struct StoragePlan {
    pub rows: Vec<StorageRow>,
    pub total_volume: DataVolume,
    pub total_run_seconds: Duration,
}

/// Expands runs into per-branch rows and totals. Row order follows the input
/// run order, branches in declaration order, so output is reproducible.
pub fn annual_storage_plan(runs: &[RunPlan]) -> StoragePlan {
    let mut rows = Vec::new();
    let mut total_bytes = 0.0;
    let mut total_seconds = 0.0;
    for run in runs {
        total_seconds += run.run_seconds().seconds();
        for branch in run.branches() {
            let stored = run.branch_storage(branch);
            total_bytes += stored.volume.bytes();
            rows.push(StorageRow {
                run: run.name().to_string(),
                setup: run.setup().name().to_string(),
                branch: branch.name().to_string(),
                selectivity: branch.selectivity(),
                random_reduction: branch.random_reduction(),
                sustained_rate: run.sustained_data_rate(),
                run_seconds: run.run_seconds(),
                volume: stored.volume,
                stored_events: stored.stored_events,
                equivalent_events: branch.equivalent_events(),
            });
        }
    }
    StoragePlan {
        rows,
        total_volume: DataVolume::from_bytes(total_bytes, crate::quantities::Convention::Decimal)
            .expect("branch volumes are finite"),
        total_run_seconds: Duration::from_seconds(total_seconds)
            .expect("run durations are finite"),
    }
}
