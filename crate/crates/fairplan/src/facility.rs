//! Facility-level roll-up of several experiments.
//!
//! Each experiment declares its compute needs as a matrix over six classes:
//!
//! - I.a, I.b, I.c, I.d: capacity tied to the experiment site (controls,
//!   detector services, local buffers). Carried through reports but never
//!   pooled, since it cannot be reassigned.
//! - II.a: general-purpose batch capacity used year-round (reconstruction,
//!   simulation, analysis).
//! - II.b: online capacity needed only while the experiment takes beam.
//!
//! A [`Scenario`] combines experiments with a nominal-year beam schedule.
//! From it the engine derives the aggregate class matrix, the day-by-day
//! online load profile, the minimum capacity the shared facility core must
//! host, and the multi-year storage evolution.

use std::collections::BTreeSet;

use crate::ledger::{archive_series, ledger_series, DiskSeries, StorageClass};
use crate::quantities::{ComputePower, Convention, DataRate, DataVolume};
use crate::{invalid, unit_fraction, Error, Result};

pub const DAYS_PER_YEAR: u16 = 365;

/// The six requirement classes, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComputeClass {
    Ia,
    Ib,
    Ic,
    Id,
    IIa,
    IIb,
}

impl ComputeClass {
    pub const ALL: [ComputeClass; 6] = [
        ComputeClass::Ia,
        ComputeClass::Ib,
        ComputeClass::Ic,
        ComputeClass::Id,
        ComputeClass::IIa,
        ComputeClass::IIb,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ComputeClass::Ia => "I.a",
            ComputeClass::Ib => "I.b",
            ComputeClass::Ic => "I.c",
            ComputeClass::Id => "I.d",
            ComputeClass::IIa => "II.a",
            ComputeClass::IIb => "II.b",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == label)
    }

    /// Experiment-local classes stay out of pooled facility totals.
    pub fn is_experiment_local(self) -> bool {
        !matches!(self, ComputeClass::IIa | ComputeClass::IIb)
    }

    fn index(self) -> usize {
        match self {
            ComputeClass::Ia => 0,
            ComputeClass::Ib => 1,
            ComputeClass::Ic => 2,
            ComputeClass::Id => 3,
            ComputeClass::IIa => 4,
            ComputeClass::IIb => 5,
        }
    }
}

/// HS06 per requirement class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassMatrix([f64; 6]);

impl ClassMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, class: ComputeClass, hs06: f64) -> Result<Self> {
        crate::finite_nonneg("class capacity", hs06)?;
        self.0[class.index()] = hs06;
        Ok(self)
    }

    pub fn get(&self, class: ComputeClass) -> f64 {
        self.0[class.index()]
    }

    pub fn add(&mut self, other: &ClassMatrix) {
        for i in 0..6 {
            self.0[i] += other.0[i];
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (ComputeClass, f64)> + '_ {
        ComputeClass::ALL.into_iter().map(|c| (c, self.get(c)))
    }
}

/// Days of the nominal year an experiment is online, 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnlineWindow {
    start_day: u16,
    days: u16,
}

impl OnlineWindow {
    pub fn new(start_day: u16, days: u16) -> Result<Self> {
        if start_day == 0 || start_day > DAYS_PER_YEAR {
            return Err(invalid(
                "online window",
                format!("start day must be in 1..={DAYS_PER_YEAR}, got {start_day}"),
            ));
        }
        if days == 0 {
            return Err(invalid("online window", "must cover at least one day"));
        }
        let last = u32::from(start_day) + u32::from(days) - 1;
        if last > u32::from(DAYS_PER_YEAR) {
            return Err(invalid(
                "online window",
                format!("window ends on day {last}, beyond day {DAYS_PER_YEAR}"),
            ));
        }
        Ok(Self { start_day, days })
    }

    pub fn start_day(&self) -> u16 {
        self.start_day
    }

    pub fn days(&self) -> u16 {
        self.days
    }

    pub fn last_day(&self) -> u16 {
        self.start_day + self.days - 1
    }

    pub fn contains(&self, day: u16) -> bool {
        day >= self.start_day && day <= self.last_day()
    }
}

/// Bandwidth figures an experiment quotes for its links; pure annotation
/// carried into reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSummary {
    pub fibers: u32,
    pub to_compute_center: DataRate,
    pub to_permanent_peak: DataRate,
    pub to_permanent_average: DataRate,
}

/// One experiment's declared requirements within a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRequirement {
    name: String,
    classes: ClassMatrix,
    online: Option<OnlineWindow>,
    data_intensive_offline_fraction: Option<f64>,
    storage: Vec<StorageClass>,
    bandwidth: Option<BandwidthSummary>,
}

impl ExperimentRequirement {
    pub fn new(name: impl Into<String>, classes: ClassMatrix) -> Self {
        Self {
            name: name.into(),
            classes,
            online: None,
            data_intensive_offline_fraction: None,
            storage: Vec::new(),
            bandwidth: None,
        }
    }

    pub fn with_online_window(mut self, window: OnlineWindow) -> Self {
        self.online = Some(window);
        self
    }

    /// Share of this experiment's II.a work that is too IO-heavy to run at
    /// partner sites and must stay at the facility core.
    pub fn with_data_intensive_offline_fraction(mut self, fraction: f64) -> Result<Self> {
        self.data_intensive_offline_fraction =
            Some(unit_fraction("data-intensive offline fraction", fraction)?);
        Ok(self)
    }

    pub fn with_storage(mut self, classes: Vec<StorageClass>) -> Self {
        self.storage = classes;
        self
    }

    pub fn with_bandwidth(mut self, bandwidth: BandwidthSummary) -> Self {
        self.bandwidth = Some(bandwidth);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn classes(&self) -> &ClassMatrix {
        &self.classes
    }

    pub fn online(&self) -> Option<&OnlineWindow> {
        self.online.as_ref()
    }

    pub fn data_intensive_offline_fraction(&self) -> Option<f64> {
        self.data_intensive_offline_fraction
    }

    pub fn storage(&self) -> &[StorageClass] {
        &self.storage
    }

    pub fn bandwidth(&self) -> Option<&BandwidthSummary> {
        self.bandwidth.as_ref()
    }

    /// II.b amortized over the year: online capacity counts toward annual
    /// totals only for the days it is scheduled.
    pub fn amortized_online_hs06(&self) -> f64 {
        match &self.online {
            Some(window) => {
                self.classes.get(ComputeClass::IIb) * f64::from(window.days())
                    / f64::from(DAYS_PER_YEAR)
            }
            None => 0.0,
        }
    }
}

/// A set of experiments operating together in a nominal year.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    name: String,
    start_year: i32,
    experiments: Vec<ExperimentRequirement>,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        start_year: i32,
        experiments: Vec<ExperimentRequirement>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for experiment in &experiments {
            if !seen.insert(experiment.name().to_string()) {
                return Err(invalid(
                    "scenario",
                    format!("duplicate experiment {}", experiment.name()),
                ));
            }
        }
        Ok(Self {
            name: name.into(),
            start_year,
            experiments,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn experiments(&self) -> &[ExperimentRequirement] {
        &self.experiments
    }

    /// Sums the class matrices and derives the annual total: all of II.a
    /// plus II.b weighted by scheduled days. Class I capacity is reported
    /// but kept out of the total.
    pub fn aggregate_compute(&self) -> ComputeAggregate {
        let mut totals = ClassMatrix::new();
        for experiment in &self.experiments {
            totals.add(experiment.classes());
        }
        let amortized_online: f64 = self
            .experiments
            .iter()
            .map(ExperimentRequirement::amortized_online_hs06)
            .sum();
        let annual_total =
            ComputePower::hs06(totals.get(ComputeClass::IIa) + amortized_online)
                .expect("validated matrices");
        ComputeAggregate {
            totals,
            amortized_online: ComputePower::hs06(amortized_online).expect("validated matrices"),
            annual_total,
        }
    }

    /// Stacks II.b over the nominal year's days.
    pub fn online_profile(&self) -> OnlineProfile {
        let mut daily = vec![0.0f64; usize::from(DAYS_PER_YEAR)];
        for experiment in &self.experiments {
            if let Some(window) = experiment.online() {
                let online = experiment.classes().get(ComputeClass::IIb);
                for day in window.start_day()..=window.last_day() {
                    daily[usize::from(day) - 1] += online;
                }
            }
        }
        let (peak_day, max) = daily
            .iter()
            .enumerate()
            .fold((1u16, 0.0f64), |(best_day, best), (i, &load)| {
                if load > best {
                    (i as u16 + 1, load)
                } else {
                    (best_day, best)
                }
            });
        OnlineProfile {
            daily,
            max: ComputePower::hs06(max).expect("validated matrices"),
            peak_day,
        }
    }

    /// Minimum capacity the tier-0 site (the facility's own data center)
    /// must host: the worst simultaneous online load plus every
    /// experiment's data-intensive share of II.a. Online work cannot leave
    /// the site at all, and IO-heavy batch work is cheaper to host next to
    /// the data than to ship.
    ///
    /// Errors when an experiment with II.a capacity has no fraction
    /// configured; there is no defensible default and silently assuming one
    /// would skew the result.
    pub fn tier0_minimum(&self) -> Result<Tier0Minimum> {
        let online = self.online_profile().max;
        let mut data_intensive = 0.0f64;
        for experiment in &self.experiments {
            let offline = experiment.classes().get(ComputeClass::IIa);
            if offline == 0.0 {
                continue;
            }
            match experiment.data_intensive_offline_fraction() {
                Some(fraction) => data_intensive += fraction * offline,
                None => {
                    return Err(Error::MissingConfig(format!(
                        "experiment {} declares II.a capacity but no data-intensive \
                         offline fraction",
                        experiment.name()
                    )))
                }
            }
        }
        let aggregate = self.aggregate_compute();
        let hs06 = ComputePower::hs06(online.get() + data_intensive)?;
        let share_of_annual_total = if aggregate.annual_total.get() > 0.0 {
            hs06.get() / aggregate.annual_total.get()
        } else {
            0.0
        };
        Ok(Tier0Minimum {
            online_component: online,
            data_intensive_component: ComputePower::hs06(data_intensive)?,
            hs06,
            annual_total: aggregate.annual_total,
            share_of_annual_total,
        })
    }

    /// Disk and archive evolution across `first..=last`, per experiment and
    /// stacked for the whole facility.
    pub fn storage_evolution(&self, first: i32, last: i32) -> Result<StorageEvolution> {
        if last < first {
            return Err(invalid("storage horizon", "last year precedes first year"));
        }
        let years: Vec<i32> = (first..=last).collect();
        let per_experiment: Vec<(String, DiskSeries)> = self
            .experiments
            .iter()
            .map(|e| (e.name().to_string(), ledger_series(e.storage(), first..=last)))
            .collect();
        let facility: Vec<DataVolume> = years
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let bytes: f64 = per_experiment
                    .iter()
                    .map(|(_, series)| series.stacked[i].bytes())
                    .sum();
                DataVolume::from_bytes(bytes, Convention::Decimal).expect("finite volumes")
            })
            .collect();
        let all_classes: Vec<StorageClass> = self
            .experiments
            .iter()
            .flat_map(|e| e.storage().iter().cloned())
            .collect();
        let archive = archive_series(&all_classes, first..=last);
        let (saturation_year, saturation) = years
            .iter()
            .zip(&facility)
            .fold((first, DataVolume::zero(Convention::Decimal)), |acc, (&y, &v)| {
                if v.bytes() > acc.1.bytes() {
                    (y, v)
                } else {
                    acc
                }
            });
        Ok(StorageEvolution {
            years,
            per_experiment,
            facility,
            archive,
            saturation,
            saturation_year,
        })
    }
}

/// Summed compute requirements of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeAggregate {
    pub totals: ClassMatrix,
    /// Sum of II.b weighted by scheduled days over the year.
    pub amortized_online: ComputePower,
    /// II.a total plus amortized II.b; the figure yearly procurement runs on.
    pub annual_total: ComputePower,
}

/// Day-by-day online load over the nominal year.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineProfile {
    /// HS06 per day, index 0 is day 1.
    pub daily: Vec<f64>,
    pub max: ComputePower,
    /// First day the maximum occurs on (1-based).
    pub peak_day: u16,
}

/// Capacity floor for the tier-0 site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tier0Minimum {
    pub online_component: ComputePower,
    pub data_intensive_component: ComputePower,
    pub hs06: ComputePower,
    pub annual_total: ComputePower,
    /// hs06 over the annual total; how much of the yearly demand must sit
    /// at the core site.
    pub share_of_annual_total: f64,
}

/// Storage curves over a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageEvolution {
    pub years: Vec<i32>,
    pub per_experiment: Vec<(String, DiskSeries)>,
    /// Stacked disk usage across experiments.
    pub facility: Vec<DataVolume>,
    /// Cumulative archive across experiments.
    pub archive: Vec<(i32, DataVolume)>,
    /// Largest stacked disk usage in the horizon and the year it occurs.
    pub saturation: DataVolume,
    pub saturation_year: i32,
}
