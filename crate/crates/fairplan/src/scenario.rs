//! JSON scenario documents: parsing, validation, and resolution.
//!
//! A [`ScenarioDocument`] is the on-disk form of a complete planning model.
//! It is organised as named sections (machines, setups, runs, experiments,
//! scenarios, ...) whose entries cross-reference each other by name, so one
//! file can describe everything from per-detector message counts up to
//! multi-experiment facility scenarios.
//!
//! Parsing is strict and two-staged. Syntax problems (malformed JSON,
//! unknown keys, wrong value types) fail immediately with a line and column.
//! Semantic validation then collects *every* problem it finds, each tagged
//! with the document path of the offending value ("runs.hadron.setup"), so
//! one round trip surfaces all mistakes. [`ScenarioDocument::to_model`]
//! performs that validation while resolving the document into the typed
//! in-memory [`Model`].
//!
//! [`ScenarioDocument::to_canonical_json`] emits a canonical form (sorted
//! keys, pretty-printed, trailing newline); re-parsing and re-emitting a
//! canonical document reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::beamline::MachinePlan;
use crate::compute::{online_reco_time, Campaign, ReferenceMachine};
use crate::detector::{DetectorContribution, Setup, DEFAULT_NOISE_FRACTION};
use crate::facility::{
    BandwidthSummary, ClassMatrix, ComputeClass, ExperimentRequirement, OnlineWindow, Scenario,
};
use crate::ledger::{Retention, StorageClass, StorageKind};
use crate::quantities::{ComputePower, Convention, DataRate, Duration, EventRate};
use crate::trigger::{annual_storage_plan, RunPlan, StoragePlan, TriggerBranch};

/// Document schema version this library reads and writes.
pub const SCHEMA_VERSION: &str = "1";

/// Headroom factor applied to archival write bandwidth when a run does not
/// set its own.
pub const DEFAULT_ARCHIVAL_CONTINGENCY: f64 = 1.5;

/// One located problem in a scenario document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    /// Dotted path of the offending value, e.g. `runs.hadron.setup`;
    /// `$` for whole-document problems.
    pub path: String,
    pub message: String,
    /// Line and column for syntax-level problems; semantic issues carry
    /// a path instead.
    pub line: Option<(usize, usize)>,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)?;
        if let Some((line, column)) = self.line {
            write!(f, " (line {line}, column {column})")?;
        }
        Ok(())
    }
}

fn issue(issues: &mut Vec<Issue>, path: String, message: impl Into<String>) {
    issues.push(Issue {
        path,
        message: message.into(),
        line: None,
    });
}

fn is_false(flag: &bool) -> bool {
    !*flag
}

/// The on-disk planning model: named sections of entries that reference
/// each other by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reference_machines: BTreeMap<String, MachineEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub machine_plans: BTreeMap<String, MachinePlanEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub setups: BTreeMap<String, SetupEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub runs: BTreeMap<String, RunEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub uplinks: BTreeMap<String, UplinkEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub online_systems: BTreeMap<String, OnlineSystemEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub offline_plans: BTreeMap<String, OfflinePlanEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub campaigns: BTreeMap<String, CampaignEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub experiments: BTreeMap<String, ExperimentEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scenarios: BTreeMap<String, ScenarioEntry>,
}

/// A benchmark reference machine. Give `hs06_per_core`, `hs06_total`, or
/// both; when both are present they must agree within 2%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineEntry {
    pub cores: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs06_per_core: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs06_total: Option<f64>,
    pub clock_mhz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A year of accelerator operation as seen from one cave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachinePlanEntry {
    pub machine_hours_per_year: f64,
    pub cave_share: f64,
    #[serde(default)]
    pub competing_days: f64,
    pub duty_cycle: f64,
    pub peak_to_average: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operational_efficiency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A detector combination with its per-detector payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupEntry {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub contributions: Vec<ContributionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_caps: Option<RateCapsEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_scale_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContributionEntry {
    pub name: String,
    pub messages_per_event: f64,
    pub bytes_per_message: f64,
}

/// Rate ceilings from the slowest detector in a setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateCapsEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub average_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_per_s: Option<f64>,
}

/// A data-taking run: a setup on a machine plan, with its trigger chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub setup: String,
    pub machine_plan: String,
    pub peak_per_s: f64,
    pub run_seconds: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient: Option<TransientEntry>,
    /// Defaults to [`DEFAULT_ARCHIVAL_CONTINGENCY`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archival_contingency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchEntry {
    pub name: String,
    pub selectivity: f64,
    pub random_reduction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalent_events: Option<f64>,
}

/// Delayed-filtering buffer parameters of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransientEntry {
    pub first_level_reduction: f64,
    pub holding_days: f64,
}

/// An uplink from an experiment to the compute center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UplinkEntry {
    pub run: String,
    /// Defaults to the library-wide measured dark-rate share.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_fraction: Option<f64>,
    pub contingency: f64,
    pub fibers: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// An online reconstruction farm fed by a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnlineSystemEntry {
    pub run: String,
    pub machine: String,
    /// Measured first-level per-event time in seconds.
    pub l1_seconds: f64,
    pub full_reco_factor: f64,
    pub momentum_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Offline sizing: simulation production, reconstruction bursts, and the
/// budget figures that enter facility totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfflinePlanEntry {
    pub machine: String,
    pub simulation: JobEntry,
    pub reconstruction: JobEntry,
    pub budget: BudgetEntry,
    pub analysis_fraction_of_simulation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobEntry {
    pub events: f64,
    pub seconds_per_event: f64,
    pub wall_days: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetEntry {
    pub simulation_hs06: f64,
    pub reconstruction_hs06: f64,
}

/// A yearly processing campaign in benchmark units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignEntry {
    pub events: f64,
    pub hs06_per_event: f64,
    pub active_days: f64,
    pub cpu_efficiency: f64,
    pub generations: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// One experiment's requirement declarations: compute matrices keyed by
/// column name and storage/bandwidth profiles keyed by profile name.
/// Scenario members pick a column and a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentEntry {
    /// Default byte convention for this experiment's storage figures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    /// column name -> class label ("I.a".."II.b") -> HS06.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub compute: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub profiles: BTreeMap<String, ProfileEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<BandwidthEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub storage: Vec<StorageClassEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Link figures an experiment quotes; annotation carried into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthEntry {
    pub fibers: u32,
    pub to_compute_center_gb_per_s: f64,
    pub to_permanent_peak_gb_per_s: f64,
    pub to_permanent_average_gb_per_s: f64,
}

/// One storage class. Exactly one of `inflow_tb_per_year`, `inflow_by_year`,
/// or `pool_tb` must be given; inflow classes also need `retention_years`
/// (a year count or `"permanent"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageClassEntry {
    pub name: String,
    pub kind: StorageKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inflow_tb_per_year: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inflow_by_year: Option<BTreeMap<i32, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_tb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retention_years: Option<RetentionEntry>,
    pub start_year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_year: Option<i32>,
    /// Keep every yearly reprocessing generation; needs `end_year` and
    /// permanent retention.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reprocess_generations: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsite_copies: Option<u32>,
    /// Also write this class to the permanent archive (implied for
    /// archive-kind classes).
    #[serde(default, skip_serializing_if = "is_false")]
    pub archive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Retention in the document: a year count or the string `"permanent"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RetentionEntry {
    Years(u32),
    Named(String),
}

/// A facility scenario: a set of experiments with chosen compute columns,
/// profiles, and online windows in a nominal year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub start_year: i32,
    /// Which compute column of each member experiment applies.
    pub compute_column: String,
    /// Scenario-wide default; members may override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_intensive_offline_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<MemberEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberEntry {
    pub experiment: String,
    pub profile: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub online: Option<OnlineWindowEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_intensive_offline_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnlineWindowEntry {
    pub start_day: u16,
    pub days: u16,
}

impl ScenarioDocument {
    /// Parses a document from JSON text. Syntax problems (including unknown
    /// keys and wrong types) are reported with line and column.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> std::result::Result<Self, Issue> {
        serde_json::from_str(text).map_err(|e| Issue {
            path: "$".to_string(),
            message: e.to_string(),
            line: Some((e.line(), e.column())),
        })
    }

    /// Reads and parses a document file.
    pub fn from_path(path: &Path) -> std::result::Result<Self, Issue> {
        let text = std::fs::read_to_string(path).map_err(|e| Issue {
            path: "$".to_string(),
            message: format!("cannot read {}: {e}", path.display()),
            line: None,
        })?;
        Self::from_str(&text)
    }

    /// Canonical JSON: sorted keys (maps are ordered), two-space pretty
    /// printing, trailing newline. Parsing and re-emitting a canonical
    /// document is the identity.
    pub fn to_canonical_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("document serialization is total");
        text.push('\n');
        text
    }

    /// Runs full semantic validation, returning every issue found.
    pub fn validate(&self) -> Vec<Issue> {
        match self.to_model() {
            Ok(_) => Vec::new(),
            Err(issues) => issues,
        }
    }

    /// Resolves the document into the typed model, collecting all issues
    /// instead of stopping at the first.
    pub fn to_model(&self) -> std::result::Result<Model, Vec<Issue>> {
        let mut issues = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            issue(
                &mut issues,
                "schema_version".to_string(),
                format!(
                    "unsupported version {:?}, this library reads {:?}",
                    self.schema_version, SCHEMA_VERSION
                ),
            );
        }
        let machines = self.resolve_machines(&mut issues);
        let machine_plans = self.resolve_machine_plans(&mut issues);
        let setups = self.resolve_setups(&mut issues);
        let campaigns = self.resolve_campaigns(&mut issues);
        let runs = self.resolve_runs(&setups, &machine_plans, &mut issues);
        let uplinks = self.resolve_uplinks(&mut issues);
        let online_systems = self.resolve_online_systems(&machines, &mut issues);
        let offline_plans = self.resolve_offline_plans(&machines, &mut issues);
        let experiments = self.resolve_experiments(&mut issues);
        let scenarios = self.resolve_scenarios(&experiments, &mut issues);
        if issues.is_empty() {
            Ok(Model {
                machines,
                machine_plans,
                setups,
                runs,
                uplinks,
                online_systems,
                offline_plans,
                campaigns,
                scenarios,
            })
        } else {
            Err(issues)
        }
    }

    fn resolve_machines(&self, issues: &mut Vec<Issue>) -> BTreeMap<String, ReferenceMachine> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.reference_machines {
            let path = format!("reference_machines.{name}");
            let machine = match (entry.hs06_per_core, entry.hs06_total) {
                (None, None) => {
                    issue(
                        issues,
                        path,
                        "one of hs06_per_core or hs06_total is required",
                    );
                    continue;
                }
                (Some(per_core), total) => {
                    let machine =
                        match ReferenceMachine::new(name, entry.cores, per_core, entry.clock_mhz) {
                            Ok(m) => m,
                            Err(e) => {
                                issue(issues, path, e.to_string());
                                continue;
                            }
                        };
                    if let Some(total) = total {
                        let quoted = match ComputePower::hs06(total) {
                            Ok(q) => q,
                            Err(e) => {
                                issue(issues, format!("{path}.hs06_total"), e.to_string());
                                continue;
                            }
                        };
                        if let Err(e) = machine.check_total(quoted) {
                            issue(issues, format!("{path}.hs06_total"), e.to_string());
                            continue;
                        }
                    }
                    machine
                }
                (None, Some(total)) => {
                    let quoted = match ComputePower::hs06(total) {
                        Ok(q) => q,
                        Err(e) => {
                            issue(issues, format!("{path}.hs06_total"), e.to_string());
                            continue;
                        }
                    };
                    match ReferenceMachine::from_total(name, entry.cores, quoted, entry.clock_mhz)
                    {
                        Ok(m) => m,
                        Err(e) => {
                            issue(issues, path, e.to_string());
                            continue;
                        }
                    }
                }
            };
            out.insert(name.clone(), machine);
        }
        out
    }

    fn resolve_machine_plans(&self, issues: &mut Vec<Issue>) -> BTreeMap<String, MachinePlan> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.machine_plans {
            let path = format!("machine_plans.{name}");
            let plan = MachinePlan::new(
                entry.machine_hours_per_year,
                entry.cave_share,
                entry.competing_days,
                entry.duty_cycle,
                entry.peak_to_average,
            );
            let plan = match plan {
                Ok(p) => p,
                Err(e) => {
                    issue(issues, path, e.to_string());
                    continue;
                }
            };
            let plan = match entry.operational_efficiency {
                Some(eff) => match plan.with_operational_efficiency(eff) {
                    Ok(p) => p,
                    Err(e) => {
                        issue(issues, format!("{path}.operational_efficiency"), e.to_string());
                        continue;
                    }
                },
                None => plan,
            };
            out.insert(name.clone(), plan);
        }
        out
    }

    fn resolve_setups(&self, issues: &mut Vec<Issue>) -> BTreeMap<String, Setup> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.setups {
            let path = format!("setups.{name}");
            let mut contributions = Vec::with_capacity(entry.contributions.len());
            let mut broken = false;
            for (i, c) in entry.contributions.iter().enumerate() {
                match DetectorContribution::new(&c.name, c.messages_per_event, c.bytes_per_message)
                {
                    Ok(c) => contributions.push(c),
                    Err(e) => {
                        issue(issues, format!("{path}.contributions[{i}]"), e.to_string());
                        broken = true;
                    }
                }
            }
            let mut caps = crate::beamline::RateCaps::none();
            if let Some(entry_caps) = &entry.rate_caps {
                let mut parse = |value: Option<f64>, field: &str| match value {
                    Some(v) => match EventRate::per_second(v) {
                        Ok(r) => Some(r),
                        Err(e) => {
                            issue(issues, format!("{path}.rate_caps.{field}"), e.to_string());
                            broken = true;
                            None
                        }
                    },
                    None => None,
                };
                caps.average = parse(entry_caps.average_per_s, "average_per_s");
                caps.peak = parse(entry_caps.peak_per_s, "peak_per_s");
            }
            if broken {
                continue;
            }
            let mut setup = Setup::new(name, contributions).with_rate_caps(caps);
            if let Some(factor) = entry.energy_scale_factor {
                setup = match setup.with_energy_scale(factor) {
                    Ok(s) => s,
                    Err(e) => {
                        issue(issues, format!("{path}.energy_scale_factor"), e.to_string());
                        continue;
                    }
                };
            }
            if let Some(convention) = entry.convention {
                setup = setup.with_convention(convention);
            }
            out.insert(name.clone(), setup);
        }
        out
    }

    fn resolve_campaigns(&self, issues: &mut Vec<Issue>) -> BTreeMap<String, Campaign> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.campaigns {
            match Campaign::new(
                name,
                entry.events,
                entry.hs06_per_event,
                entry.active_days,
                entry.cpu_efficiency,
                entry.generations,
            ) {
                Ok(c) => {
                    out.insert(name.clone(), c);
                }
                Err(e) => issue(issues, format!("campaigns.{name}"), e.to_string()),
            }
        }
        out
    }

    fn resolve_runs(
        &self,
        setups: &BTreeMap<String, Setup>,
        plans: &BTreeMap<String, MachinePlan>,
        issues: &mut Vec<Issue>,
    ) -> BTreeMap<String, RunConfig> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.runs {
            let path = format!("runs.{name}");
            let mut broken = false;
            if !self.setups.contains_key(&entry.setup) {
                issue(
                    issues,
                    format!("{path}.setup"),
                    format!("unknown setup {:?}", entry.setup),
                );
                broken = true;
            }
            if !self.machine_plans.contains_key(&entry.machine_plan) {
                issue(
                    issues,
                    format!("{path}.machine_plan"),
                    format!("unknown machine plan {:?}", entry.machine_plan),
                );
                broken = true;
            }
            let peak = match EventRate::per_second(entry.peak_per_s) {
                Ok(r) => Some(r),
                Err(e) => {
                    issue(issues, format!("{path}.peak_per_s"), e.to_string());
                    broken = true;
                    None
                }
            };
            let run_seconds = match Duration::from_seconds(entry.run_seconds) {
                Ok(d) => Some(d),
                Err(e) => {
                    issue(issues, format!("{path}.run_seconds"), e.to_string());
                    broken = true;
                    None
                }
            };
            let mut branches = Vec::with_capacity(entry.branches.len());
            for (i, b) in entry.branches.iter().enumerate() {
                let branch = TriggerBranch::new(&b.name, b.selectivity, b.random_reduction)
                    .and_then(|branch| match b.equivalent_events {
                        Some(events) => branch.with_equivalent_events(events),
                        None => Ok(branch),
                    });
                match branch {
                    Ok(b) => branches.push(b),
                    Err(e) => {
                        issue(issues, format!("{path}.branches[{i}]"), e.to_string());
                        broken = true;
                    }
                }
            }
            let transient = match &entry.transient {
                Some(t) => {
                    let holding = Duration::from_days(t.holding_days);
                    match holding {
                        Ok(holding) if t.first_level_reduction >= 1.0 => Some(TransientConfig {
                            first_level_reduction: t.first_level_reduction,
                            holding,
                        }),
                        Ok(_) => {
                            issue(
                                issues,
                                format!("{path}.transient.first_level_reduction"),
                                format!("must be >= 1, got {}", t.first_level_reduction),
                            );
                            broken = true;
                            None
                        }
                        Err(e) => {
                            issue(issues, format!("{path}.transient.holding_days"), e.to_string());
                            broken = true;
                            None
                        }
                    }
                }
                None => None,
            };
            let contingency = entry
                .archival_contingency
                .unwrap_or(DEFAULT_ARCHIVAL_CONTINGENCY);
            if !contingency.is_finite() || contingency < 1.0 {
                issue(
                    issues,
                    format!("{path}.archival_contingency"),
                    format!("must be >= 1, got {contingency}"),
                );
                broken = true;
            }
            if broken {
                continue;
            }
            let (Some(setup), Some(plan)) = (setups.get(&entry.setup), plans.get(&entry.machine_plan))
            else {
                // the referenced entries exist but failed to resolve; their
                // own issues already explain why
                continue;
            };
            let profile = plan.rate_profile(peak.expect("checked above"), setup.rate_caps());
            let plan = RunPlan::new(
                name,
                setup.clone(),
                profile,
                run_seconds.expect("checked above"),
                branches,
            );
            out.insert(
                name.clone(),
                RunConfig {
                    plan,
                    transient,
                    archival_contingency: contingency,
                },
            );
        }
        out
    }

    fn resolve_uplinks(&self, issues: &mut Vec<Issue>) -> BTreeMap<String, UplinkConfig> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.uplinks {
            let path = format!("uplinks.{name}");
            let mut broken = false;
            if !self.runs.contains_key(&entry.run) {
                issue(
                    issues,
                    format!("{path}.run"),
                    format!("unknown run {:?}", entry.run),
                );
                broken = true;
            }
            let noise = entry.noise_fraction.unwrap_or(DEFAULT_NOISE_FRACTION);
            if !noise.is_finite() || noise < 0.0 {
                issue(
                    issues,
                    format!("{path}.noise_fraction"),
                    format!("must be >= 0, got {noise}"),
                );
                broken = true;
            }
            if !entry.contingency.is_finite() || entry.contingency < 1.0 {
                issue(
                    issues,
                    format!("{path}.contingency"),
                    format!("must be >= 1, got {}", entry.contingency),
                );
                broken = true;
            }
            if broken {
                continue;
            }
            out.insert(
                name.clone(),
                UplinkConfig {
                    run: entry.run.clone(),
                    noise_fraction: noise,
                    contingency: entry.contingency,
                    fibers: entry.fibers,
                },
            );
        }
        out
    }

    fn resolve_online_systems(
        &self,
        machines: &BTreeMap<String, ReferenceMachine>,
        issues: &mut Vec<Issue>,
    ) -> BTreeMap<String, OnlineSystemConfig> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.online_systems {
            let path = format!("online_systems.{name}");
            let mut broken = false;
            if !self.runs.contains_key(&entry.run) {
                issue(
                    issues,
                    format!("{path}.run"),
                    format!("unknown run {:?}", entry.run),
                );
                broken = true;
            }
            if !self.reference_machines.contains_key(&entry.machine) {
                issue(
                    issues,
                    format!("{path}.machine"),
                    format!("unknown reference machine {:?}", entry.machine),
                );
                broken = true;
            }
            let first_level = match Duration::from_seconds(entry.l1_seconds) {
                Ok(d) => Some(d),
                Err(e) => {
                    issue(issues, format!("{path}.l1_seconds"), e.to_string());
                    broken = true;
                    None
                }
            };
            let per_event = first_level.and_then(|first_level| {
                match online_reco_time(first_level, entry.full_reco_factor, entry.momentum_factor) {
                    Ok(d) => Some(d),
                    Err(e) => {
                        issue(issues, path.clone(), e.to_string());
                        broken = true;
                        None
                    }
                }
            });
            if broken || !machines.contains_key(&entry.machine) {
                continue;
            }
            out.insert(
                name.clone(),
                OnlineSystemConfig {
                    run: entry.run.clone(),
                    machine: entry.machine.clone(),
                    per_event: per_event.expect("checked above"),
                },
            );
        }
        out
    }

    fn resolve_offline_plans(
        &self,
        machines: &BTreeMap<String, ReferenceMachine>,
        issues: &mut Vec<Issue>,
    ) -> BTreeMap<String, OfflinePlanConfig> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.offline_plans {
            let path = format!("offline_plans.{name}");
            let mut broken = false;
            if !self.reference_machines.contains_key(&entry.machine) {
                issue(
                    issues,
                    format!("{path}.machine"),
                    format!("unknown reference machine {:?}", entry.machine),
                );
                broken = true;
            }
            let mut job = |spec: &JobEntry, field: &str| -> Option<ProcessingJob> {
                let mut parse_err = |sub: &str, e: crate::Error| {
                    issue(issues, format!("{path}.{field}.{sub}"), e.to_string());
                    broken = true;
                };
                let events = match crate::finite_nonneg("events", spec.events) {
                    Ok(v) => v,
                    Err(e) => {
                        parse_err("events", e);
                        return None;
                    }
                };
                let seconds = match Duration::from_seconds(spec.seconds_per_event) {
                    Ok(v) => v,
                    Err(e) => {
                        parse_err("seconds_per_event", e);
                        return None;
                    }
                };
                if !(spec.wall_days > 0.0 && spec.wall_days.is_finite()) {
                    issue(
                        issues,
                        format!("{path}.{field}.wall_days"),
                        format!("must be > 0, got {}", spec.wall_days),
                    );
                    broken = true;
                    return None;
                }
                let wall = Duration::from_days(spec.wall_days).expect("checked above");
                Some(ProcessingJob {
                    events,
                    seconds_per_event: seconds,
                    wall,
                })
            };
            let simulation = job(&entry.simulation, "simulation");
            let reconstruction = job(&entry.reconstruction, "reconstruction");
            let budget_value = |v: f64, field: &str, issues: &mut Vec<Issue>, broken: &mut bool| {
                match ComputePower::hs06(v) {
                    Ok(p) => Some(p),
                    Err(e) => {
                        issue(issues, format!("{path}.budget.{field}"), e.to_string());
                        *broken = true;
                        None
                    }
                }
            };
            let sim_budget = budget_value(entry.budget.simulation_hs06, "simulation_hs06", issues, &mut broken);
            let reco_budget = budget_value(
                entry.budget.reconstruction_hs06,
                "reconstruction_hs06",
                issues,
                &mut broken,
            );
            let fraction = entry.analysis_fraction_of_simulation;
            if !fraction.is_finite() || fraction < 0.0 {
                issue(
                    issues,
                    format!("{path}.analysis_fraction_of_simulation"),
                    format!("must be >= 0, got {fraction}"),
                );
                broken = true;
            }
            if broken || !machines.contains_key(&entry.machine) {
                continue;
            }
            out.insert(
                name.clone(),
                OfflinePlanConfig {
                    machine: entry.machine.clone(),
                    simulation: simulation.expect("checked above"),
                    reconstruction: reconstruction.expect("checked above"),
                    budget: OfflineBudget {
                        simulation: sim_budget.expect("checked above"),
                        reconstruction: reco_budget.expect("checked above"),
                    },
                    analysis_fraction_of_simulation: fraction,
                },
            );
        }
        out
    }

    fn resolve_experiments(&self, issues: &mut Vec<Issue>) -> BTreeMap<String, ResolvedExperiment> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.experiments {
            let path = format!("experiments.{name}");
            let default_convention = entry.convention.unwrap_or(Convention::Decimal);
            let mut broken = false;
            let mut columns = BTreeMap::new();
            for (column, classes) in &entry.compute {
                let mut matrix = ClassMatrix::new();
                for (label, hs06) in classes {
                    match ComputeClass::from_label(label) {
                        Some(class) => match matrix.set(class, *hs06) {
                            Ok(m) => matrix = m,
                            Err(e) => {
                                issue(
                                    issues,
                                    format!("{path}.compute.{column}.{label}"),
                                    e.to_string(),
                                );
                                broken = true;
                            }
                        },
                        None => {
                            issue(
                                issues,
                                format!("{path}.compute.{column}"),
                                format!("unknown compute class {label:?}"),
                            );
                            broken = true;
                        }
                    }
                }
                columns.insert(column.clone(), matrix);
            }
            let mut profiles = BTreeMap::new();
            for (profile_name, profile) in &entry.profiles {
                let ppath = format!("{path}.profiles.{profile_name}");
                let bandwidth = profile.bandwidth.as_ref().and_then(|bw| {
                    match resolve_bandwidth(bw) {
                        Ok(b) => Some(b),
                        Err(e) => {
                            issue(issues, format!("{ppath}.bandwidth"), e.to_string());
                            broken = true;
                            None
                        }
                    }
                });
                let mut storage = Vec::with_capacity(profile.storage.len());
                for (i, class) in profile.storage.iter().enumerate() {
                    match resolve_storage_class(
                        class,
                        default_convention,
                        &format!("{ppath}.storage[{i}]"),
                        issues,
                    ) {
                        Some(c) => storage.push(c),
                        None => broken = true,
                    }
                }
                profiles.insert(
                    profile_name.clone(),
                    ResolvedProfile { storage, bandwidth },
                );
            }
            if broken {
                continue;
            }
            out.insert(name.clone(), ResolvedExperiment { columns, profiles });
        }
        out
    }

    fn resolve_scenarios(
        &self,
        experiments: &BTreeMap<String, ResolvedExperiment>,
        issues: &mut Vec<Issue>,
    ) -> BTreeMap<String, Scenario> {
        let mut out = BTreeMap::new();
        for (name, entry) in &self.scenarios {
            let path = format!("scenarios.{name}");
            let mut members = Vec::with_capacity(entry.members.len());
            let mut broken = false;
            for (i, member) in entry.members.iter().enumerate() {
                let mpath = format!("{path}.members[{i}]");
                if !self.experiments.contains_key(&member.experiment) {
                    issue(
                        issues,
                        format!("{mpath}.experiment"),
                        format!("unknown experiment {:?}", member.experiment),
                    );
                    broken = true;
                    continue;
                }
                let Some(resolved) = experiments.get(&member.experiment) else {
                    // the experiment exists but failed to resolve
                    broken = true;
                    continue;
                };
                let Some(classes) = resolved.columns.get(&entry.compute_column) else {
                    issue(
                        issues,
                        format!("{mpath}.experiment"),
                        format!(
                            "experiment {:?} has no compute column {:?}",
                            member.experiment, entry.compute_column
                        ),
                    );
                    broken = true;
                    continue;
                };
                let Some(profile) = resolved.profiles.get(&member.profile) else {
                    issue(
                        issues,
                        format!("{mpath}.profile"),
                        format!(
                            "experiment {:?} has no profile {:?}",
                            member.experiment, member.profile
                        ),
                    );
                    broken = true;
                    continue;
                };
                let mut requirement = ExperimentRequirement::new(&member.experiment, *classes)
                    .with_storage(profile.storage.clone());
                if let Some(bandwidth) = profile.bandwidth {
                    requirement = requirement.with_bandwidth(bandwidth);
                }
                if let Some(online) = &member.online {
                    match OnlineWindow::new(online.start_day, online.days) {
                        Ok(window) => requirement = requirement.with_online_window(window),
                        Err(e) => {
                            issue(issues, format!("{mpath}.online"), e.to_string());
                            broken = true;
                            continue;
                        }
                    }
                }
                let fraction = member
                    .data_intensive_offline_fraction
                    .or(entry.data_intensive_offline_fraction);
                if let Some(fraction) = fraction {
                    match requirement.with_data_intensive_offline_fraction(fraction) {
                        Ok(r) => requirement = r,
                        Err(e) => {
                            issue(
                                issues,
                                format!("{mpath}.data_intensive_offline_fraction"),
                                e.to_string(),
                            );
                            broken = true;
                            continue;
                        }
                    }
                }
                members.push(requirement);
            }
            if broken {
                continue;
            }
            match Scenario::new(name, entry.start_year, members) {
                Ok(s) => {
                    out.insert(name.clone(), s);
                }
                Err(e) => issue(issues, path, e.to_string()),
            }
        }
        out
    }
}

fn resolve_bandwidth(entry: &BandwidthEntry) -> crate::Result<BandwidthSummary> {
    let rate = |gb_per_s: f64| {
        DataRate::from_bytes_per_second(gb_per_s * 1e9, Convention::Decimal)
    };
    Ok(BandwidthSummary {
        fibers: entry.fibers,
        to_compute_center: rate(entry.to_compute_center_gb_per_s)?,
        to_permanent_peak: rate(entry.to_permanent_peak_gb_per_s)?,
        to_permanent_average: rate(entry.to_permanent_average_gb_per_s)?,
    })
}

fn resolve_storage_class(
    entry: &StorageClassEntry,
    default_convention: Convention,
    path: &str,
    issues: &mut Vec<Issue>,
) -> Option<StorageClass> {
    let inflow_forms = usize::from(entry.inflow_tb_per_year.is_some())
        + usize::from(entry.inflow_by_year.is_some())
        + usize::from(entry.pool_tb.is_some());
    if inflow_forms != 1 {
        issue(
            issues,
            path.to_string(),
            "exactly one of inflow_tb_per_year, inflow_by_year, pool_tb is required",
        );
        return None;
    }
    let retention = if entry.pool_tb.is_some() {
        if entry.retention_years.is_some() {
            issue(
                issues,
                format!("{path}.retention_years"),
                "pool classes take no retention; they stand while active",
            );
            return None;
        }
        Retention::Permanent // unused by pools
    } else {
        match &entry.retention_years {
            Some(RetentionEntry::Years(years)) => Retention::Years(*years),
            Some(RetentionEntry::Named(name)) if name == "permanent" => Retention::Permanent,
            Some(RetentionEntry::Named(name)) => {
                issue(
                    issues,
                    format!("{path}.retention_years"),
                    format!("unknown retention {name:?}, expected a year count or \"permanent\""),
                );
                return None;
            }
            None => {
                issue(
                    issues,
                    format!("{path}.retention_years"),
                    "required for inflow classes (a year count or \"permanent\")",
                );
                return None;
            }
        }
    };
    let base = if let Some(tb) = entry.pool_tb {
        StorageClass::pool(&entry.name, entry.kind, tb, entry.start_year)
    } else if let Some(tb) = entry.inflow_tb_per_year {
        StorageClass::recurring(&entry.name, entry.kind, tb, retention, entry.start_year)
    } else {
        let inflows = entry.inflow_by_year.clone().expect("one form is present");
        StorageClass::scheduled(&entry.name, entry.kind, inflows, retention, entry.start_year)
    };
    let mut class = match base {
        Ok(c) => c,
        Err(e) => {
            issue(issues, path.to_string(), e.to_string());
            return None;
        }
    };
    class = class.with_convention(entry.convention.unwrap_or(default_convention));
    if let Some(generations) = entry.reprocess_generations {
        let Some(end_year) = entry.end_year else {
            issue(
                issues,
                format!("{path}.reprocess_generations"),
                "requires end_year (the last production year)",
            );
            return None;
        };
        class = match class.with_reprocessing(generations, end_year) {
            Ok(c) => c,
            Err(e) => {
                issue(issues, format!("{path}.reprocess_generations"), e.to_string());
                return None;
            }
        };
    } else if let Some(end_year) = entry.end_year {
        class = match class.with_end_year(end_year) {
            Ok(c) => c,
            Err(e) => {
                issue(issues, format!("{path}.end_year"), e.to_string());
                return None;
            }
        };
    }
    if let Some(copies) = entry.offsite_copies {
        class = match class.with_offsite_copies(copies) {
            Ok(c) => c,
            Err(e) => {
                issue(issues, format!("{path}.offsite_copies"), e.to_string());
                return None;
            }
        };
    }
    if entry.archive {
        class = class.with_archival();
    }
    Some(class)
}

struct ResolvedExperiment {
    columns: BTreeMap<String, ClassMatrix>,
    profiles: BTreeMap<String, ResolvedProfile>,
}

struct ResolvedProfile {
    storage: Vec<StorageClass>,
    bandwidth: Option<BandwidthSummary>,
}

/// The fully resolved in-memory model of a document.
#[derive(Debug, Clone)]
pub struct Model {
    pub machines: BTreeMap<String, ReferenceMachine>,
    pub machine_plans: BTreeMap<String, MachinePlan>,
    pub setups: BTreeMap<String, Setup>,
    pub runs: BTreeMap<String, RunConfig>,
    pub uplinks: BTreeMap<String, UplinkConfig>,
    pub online_systems: BTreeMap<String, OnlineSystemConfig>,
    pub offline_plans: BTreeMap<String, OfflinePlanConfig>,
    pub campaigns: BTreeMap<String, Campaign>,
    pub scenarios: BTreeMap<String, Scenario>,
}

impl Model {
    /// The annual storage plan across every run, rows in run-name order.
    pub fn storage_plan(&self) -> StoragePlan {
        let plans: Vec<RunPlan> = self.runs.values().map(|r| r.plan.clone()).collect();
        annual_storage_plan(&plans)
    }
}

/// A resolved run with its sizing knobs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub plan: RunPlan,
    pub transient: Option<TransientConfig>,
    pub archival_contingency: f64,
}

/// Delayed-filtering parameters of a run.
#[derive(Debug, Clone, Copy)]
pub struct TransientConfig {
    pub first_level_reduction: f64,
    pub holding: Duration,
}

/// A resolved uplink.
#[derive(Debug, Clone)]
pub struct UplinkConfig {
    pub run: String,
    pub noise_fraction: f64,
    pub contingency: f64,
    pub fibers: u32,
}

/// A resolved online farm: the run it serves, the machine it is built from,
/// and the extrapolated full-chain per-event time.
#[derive(Debug, Clone)]
pub struct OnlineSystemConfig {
    pub run: String,
    pub machine: String,
    pub per_event: Duration,
}

/// A resolved offline plan.
#[derive(Debug, Clone)]
pub struct OfflinePlanConfig {
    pub machine: String,
    pub simulation: ProcessingJob,
    pub reconstruction: ProcessingJob,
    pub budget: OfflineBudget,
    pub analysis_fraction_of_simulation: f64,
}

/// An event sample pushed through a chain within a wall-clock budget.
#[derive(Debug, Clone, Copy)]
pub struct ProcessingJob {
    pub events: f64,
    pub seconds_per_event: Duration,
    pub wall: Duration,
}

/// Budgeted capacities that enter facility totals directly.
#[derive(Debug, Clone, Copy)]
pub struct OfflineBudget {
    pub simulation: ComputePower,
    pub reconstruction: ComputePower,
}
