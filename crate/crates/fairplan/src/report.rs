//! Deterministic table rendering.
//!
//! Reports are built as tables of pre-typed cells and rendered to markdown,
//! CSV (RFC 4180 quoting, LF line endings, UTF-8), or JSON. Derived values
//! are rounded to four significant digits at render time; inputs pass
//! through exactly. Rendering the same report twice yields identical bytes.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::compute::{offline_total, online_compute_requirement, simulation_compute_requirement};
use crate::detector::gc_bandwidth_requirement;
use crate::facility::{ComputeClass, Scenario as FacilityScenario};
use crate::quantities::{ComputePower, Prefix};
use crate::scenario::Model;

/// Significant digits used for derived figures.
pub const DERIVED_DIGITS: u32 = 4;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    /// A number with an optional significant-digit limit. `None` renders
    /// the exact shortest round-trip form (for inputs), `Some(n)` rounds
    /// first (for derived values).
    Num { value: f64, sig: Option<u32> },
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    /// An input value: rendered exactly.
    pub fn input(value: f64) -> Self {
        Cell::Num { value, sig: None }
    }

    /// A derived value: rounded to [`DERIVED_DIGITS`] significant digits.
    pub fn derived(value: f64) -> Self {
        Cell::Num {
            value,
            sig: Some(DERIVED_DIGITS),
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num { value, sig } => match sig {
                None => format_exact(*value),
                Some(digits) => format_sig(*value, *digits),
            },
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Text(s) => serializer.serialize_str(s),
            Cell::Num { value, sig } => {
                let rendered = match sig {
                    None => *value,
                    Some(digits) => round_sig(*value, *digits),
                };
                serializer.serialize_f64(rendered)
            }
            Cell::Empty => serializer.serialize_none(),
        }
    }
}

/// Shortest exact decimal form of an input value.
fn format_exact(value: f64) -> String {
    let mut s = format!("{value}");
    // keep a consistent plain form for integral floats
    if s.ends_with(".0") {
        s.truncate(s.len() - 2);
    }
    s
}

/// Rounds to `digits` significant digits.
pub fn round_sig(value: f64, digits: u32) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let magnitude = value.abs().log10().floor() as i32;
    let shift = digits as i32 - 1 - magnitude;
    let scale = 10f64.powi(shift);
    (value * scale).round() / scale
}

/// Renders `value` rounded to `digits` significant digits, switching to
/// exponent form outside comfortable magnitudes.
pub fn format_sig(value: f64, digits: u32) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return format!("{value}");
    }
    let rounded = round_sig(value, digits);
    let magnitude = rounded.abs().log10().floor() as i32;
    if !(-5..=9).contains(&magnitude) {
        let mantissa = rounded / 10f64.powi(magnitude);
        let mantissa = format_exact(round_sig(mantissa, digits));
        return format!("{mantissa}e{magnitude}");
    }
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.truncate(s.len() - 1);
        }
        if s.ends_with('.') {
            s.truncate(s.len() - 1);
        }
    }
    s
}

/// A titled table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("## {}\n\n", self.title));
        out.push_str(&format!("| {} |\n", self.columns.join(" | ")));
        out.push_str(&format!(
            "|{}\n",
            self.columns.iter().map(|_| "---|").collect::<String>()
        ));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        out
    }
}

/// A report: an ordered list of tables under one title.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub title: String,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            tables: Vec::new(),
        }
    }

    pub fn push(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        for table in &self.tables {
            out.push('\n');
            out.push_str(&table.to_markdown());
        }
        out
    }

    /// RFC 4180 CSV: each table emitted as a title record, a header record,
    /// and data records, with a blank line between tables. LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&csv_record(std::slice::from_ref(&table.title)));
            out.push_str(&csv_record(&table.columns));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::render).collect();
                out.push_str(&csv_record(&cells));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization is total");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Markdown => self.to_markdown(),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("title", &self.title)?;
        map.serialize_entry("tables", &TableList(&self.tables))?;
        map.end()
    }
}

struct TableList<'a>(&'a [Table]);

impl Serialize for TableList<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for table in self.0 {
            seq.serialize_element(table)?;
        }
        seq.end()
    }
}

/// Output format of a rendered report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

/// Quotes one CSV record per RFC 4180: fields containing commas, quotes, or
/// line breaks are wrapped in double quotes with inner quotes doubled.
fn csv_record(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|field| {
            if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r')
            {
                format!("\"{}\"", field.replace('"', "\"\""))
            } else {
                field.clone()
            }
        })
        .collect();
    let mut record = quoted.join(",");
    record.push('\n');
    record
}

/// Per-detector payloads and the resulting event size for every setup.
pub fn event_sizes_table(model: &Model) -> Table {
    let mut table = Table::new(
        "Event sizes",
        &[
            "setup",
            "detector",
            "messages per event",
            "bytes per message",
            "kB per event",
        ],
    );
    for (name, setup) in &model.setups {
        for c in setup.contributions() {
            table.push(vec![
                Cell::text(name),
                Cell::text(c.name()),
                Cell::input(c.messages_per_event()),
                Cell::input(c.bytes_per_message()),
                Cell::Empty,
            ]);
        }
        table.push(vec![
            Cell::text(name),
            Cell::text("total"),
            Cell::Empty,
            Cell::Empty,
            Cell::derived(setup.event_size().value_in(Prefix::Kilo)),
        ]);
    }
    table
}

/// Interaction and data rates for every run.
pub fn data_rates_table(model: &Model) -> Table {
    let mut table = Table::new(
        "Data rates",
        &[
            "run",
            "peak (1/s)",
            "in-spill (1/s)",
            "sustained (1/s)",
            "in-spill (GB/s)",
            "sustained (GB/s)",
        ],
    );
    for (name, run) in &model.runs {
        let profile = run.plan.profile();
        table.push(vec![
            Cell::text(name),
            Cell::derived(profile.peak().get()),
            Cell::derived(profile.average().get()),
            Cell::derived(profile.sustained().get()),
            Cell::derived(run.plan.inspill_data_rate().value_in(Prefix::Giga)),
            Cell::derived(run.plan.sustained_data_rate().value_in(Prefix::Giga)),
        ]);
    }
    table
}

/// The annual storage plan, one row per trigger branch plus a total.
pub fn storage_plan_table(model: &Model) -> Table {
    let mut table = Table::new(
        "Annual storage plan",
        &[
            "setup",
            "run time (s)",
            "rate (GB/s)",
            "trigger",
            "selectivity",
            "downscaling",
            "stored (PB)",
            "stored events",
            "equivalent events",
        ],
    );
    let plan = model.storage_plan();
    for row in &plan.rows {
        table.push(vec![
            Cell::text(&row.setup),
            Cell::input(row.run_seconds.seconds()),
            Cell::derived(row.sustained_rate.value_in(Prefix::Giga)),
            Cell::text(&row.branch),
            Cell::input(row.selectivity),
            Cell::input(row.random_reduction),
            Cell::derived(row.volume.value_in(Prefix::Peta)),
            Cell::derived(row.stored_events),
            match row.equivalent_events {
                Some(events) => Cell::input(events),
                None => Cell::Empty,
            },
        ]);
    }
    table.push(vec![
        Cell::text("total"),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::derived(plan.total_volume.value_in(Prefix::Peta)),
        Cell::Empty,
        Cell::Empty,
    ]);
    table
}

/// Online farms, simulation productions, reconstruction bursts, and budget
/// totals, all in cores and kHS06.
pub fn compute_table(model: &Model) -> Table {
    let mut table = Table::new("Compute", &["item", "cores", "machines", "kHS06"]);
    for (name, system) in &model.online_systems {
        let run = &model.runs[&system.run];
        let machine = &model.machines[&system.machine];
        let req = online_compute_requirement(
            run.plan.profile().sustained(),
            system.per_event,
            machine,
        );
        table.push(vec![
            Cell::text(format!("online {name}")),
            Cell::derived(req.cores),
            Cell::derived(req.machines),
            Cell::derived(req.hs06.kilo()),
        ]);
    }
    for (name, plan) in &model.offline_plans {
        let machine = &model.machines[&plan.machine];
        for (label, job) in [
            ("simulation", &plan.simulation),
            ("reconstruction burst", &plan.reconstruction),
        ] {
            if let Ok(req) =
                simulation_compute_requirement(job.events, job.seconds_per_event, machine, job.wall)
            {
                table.push(vec![
                    Cell::text(format!("{label} {name}")),
                    Cell::derived(req.cores),
                    Cell::Empty,
                    Cell::derived(req.hs06.kilo()),
                ]);
            }
        }
        if let Ok(total) = offline_total(
            plan.budget.simulation,
            plan.budget.reconstruction,
            plan.analysis_fraction_of_simulation,
        ) {
            table.push(vec![
                Cell::text(format!("offline budget {name}")),
                Cell::Empty,
                Cell::Empty,
                Cell::derived(total.kilo()),
            ]);
        }
    }
    table
}

/// Yearly processing campaigns in benchmark units, with a capacity total.
pub fn campaigns_table(model: &Model) -> Table {
    let mut table = Table::new(
        "Processing campaigns",
        &[
            "campaign",
            "events per year",
            "HS06 per event",
            "active days",
            "CPU efficiency",
            "generations",
            "kHS06 per pass",
            "kHS06 per year",
        ],
    );
    let mut total = ComputePower::zero();
    for (name, campaign) in &model.campaigns {
        let req = campaign.requirement();
        total = total + req.per_year;
        table.push(vec![
            Cell::text(name),
            Cell::input(campaign.events()),
            Cell::input(campaign.hs06_per_event()),
            Cell::input(campaign.active_days()),
            Cell::input(campaign.cpu_efficiency()),
            Cell::input(f64::from(campaign.generations())),
            Cell::derived(req.per_generation.kilo()),
            Cell::derived(req.per_year.kilo()),
        ]);
    }
    table.push(vec![
        Cell::text("total"),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::derived(total.kilo()),
    ]);
    table
}

/// Installed uplink bandwidth per experiment link.
pub fn uplinks_table(model: &Model) -> Table {
    let mut table = Table::new(
        "Uplinks",
        &[
            "uplink",
            "run",
            "fibers",
            "payload (GB/s)",
            "with noise (GB/s)",
            "installed (GB/s)",
        ],
    );
    for (name, uplink) in &model.uplinks {
        let run = &model.runs[&uplink.run];
        let Ok(req) = gc_bandwidth_requirement(
            run.plan.inspill_data_rate(),
            uplink.noise_fraction,
            uplink.contingency,
        ) else {
            continue;
        };
        table.push(vec![
            Cell::text(name),
            Cell::text(&uplink.run),
            Cell::input(f64::from(uplink.fibers)),
            Cell::derived(req.base.value_in(Prefix::Giga)),
            Cell::derived(req.upper_limit.value_in(Prefix::Giga)),
            Cell::derived(req.required.value_in(Prefix::Giga)),
        ]);
    }
    table
}

/// Compute roll-up for one scenario: the class matrix per experiment with
/// facility totals, then the annual figures and the core-site minimum.
pub fn aggregate_report(scenario: &FacilityScenario) -> crate::Result<Report> {
    let mut report = Report::new(format!("Scenario {}", scenario.name()));
    let mut matrix = Table::new(
        "Compute classes (kHS06)",
        &["experiment", "I.a", "I.b", "I.c", "I.d", "II.a", "II.b"],
    );
    for experiment in scenario.experiments() {
        let mut row = vec![Cell::text(experiment.name())];
        for (_, hs06) in experiment.classes().entries() {
            row.push(if hs06 == 0.0 {
                Cell::Empty
            } else {
                Cell::derived(hs06 / 1e3)
            });
        }
        matrix.push(row);
    }
    let aggregate = scenario.aggregate_compute();
    let mut row = vec![Cell::text("facility")];
    for (_, hs06) in aggregate.totals.entries() {
        row.push(Cell::derived(hs06 / 1e3));
    }
    matrix.push(row);
    report.push(matrix);

    let minimum = scenario.tier0_minimum()?;
    let mut summary = Table::new("Annual roll-up", &["quantity", "value"]);
    summary.push(vec![
        Cell::text("pooled year-round capacity (kHS06)"),
        Cell::derived(aggregate.totals.get(ComputeClass::IIa) / 1e3),
    ]);
    summary.push(vec![
        Cell::text("online capacity amortized over the year (kHS06)"),
        Cell::derived(aggregate.amortized_online.kilo()),
    ]);
    summary.push(vec![
        Cell::text("annual total (kHS06)"),
        Cell::derived(aggregate.annual_total.kilo()),
    ]);
    summary.push(vec![
        Cell::text("core-site minimum (kHS06)"),
        Cell::derived(minimum.hs06.kilo()),
    ]);
    summary.push(vec![
        Cell::text("core-site share of annual total (%)"),
        Cell::derived(minimum.share_of_annual_total * 100.0),
    ]);
    report.push(summary);
    Ok(report)
}

/// Disk and archive evolution for one scenario over a span of years.
pub fn timeline_report(
    scenario: &FacilityScenario,
    from: i32,
    to: i32,
    archive: bool,
) -> crate::Result<Report> {
    let evolution = scenario.storage_evolution(from, to)?;
    let mut report = Report::new(format!("Scenario {} storage timeline", scenario.name()));

    let mut columns: Vec<&str> = vec!["year"];
    for (name, _) in &evolution.per_experiment {
        columns.push(name);
    }
    columns.push("facility");
    let mut disk = Table::new("Disk usage (PB)", &columns);
    for (i, year) in evolution.years.iter().enumerate() {
        let mut row = vec![Cell::input(f64::from(*year))];
        for (_, series) in &evolution.per_experiment {
            row.push(Cell::derived(series.stacked[i].value_in(Prefix::Peta)));
        }
        row.push(Cell::derived(evolution.facility[i].value_in(Prefix::Peta)));
        disk.push(row);
    }
    report.push(disk);

    if archive {
        let mut tape = Table::new("Cumulative archive (PB)", &["year", "archive"]);
        for (year, volume) in &evolution.archive {
            tape.push(vec![
                Cell::input(f64::from(*year)),
                Cell::derived(volume.value_in(Prefix::Peta)),
            ]);
        }
        report.push(tape);
    }

    let mut summary = Table::new("Saturation", &["quantity", "value"]);
    summary.push(vec![
        Cell::text("largest stacked disk usage (PB)"),
        Cell::derived(evolution.saturation.value_in(Prefix::Peta)),
    ]);
    summary.push(vec![
        Cell::text("year of largest usage"),
        Cell::input(f64::from(evolution.saturation_year)),
    ]);
    report.push(summary);
    Ok(report)
}

/// Everything the model can say, as one report: sizes, rates, the storage
/// plan, uplinks, compute, campaigns, and a class table per scenario.
pub fn full_report(model: &Model) -> Report {
    let mut report = Report::new("Capacity plan");
    report.push(event_sizes_table(model));
    report.push(data_rates_table(model));
    report.push(storage_plan_table(model));
    if !model.uplinks.is_empty() {
        report.push(uplinks_table(model));
    }
    if !model.online_systems.is_empty() || !model.offline_plans.is_empty() {
        report.push(compute_table(model));
    }
    if !model.campaigns.is_empty() {
        report.push(campaigns_table(model));
    }
    for scenario in model.scenarios.values() {
        match aggregate_report(scenario) {
            Ok(sub) => report.tables.extend(sub.tables),
            // roll-up needs offline fractions; without them report the
            // class matrix alone
            Err(_) => {
                if let Ok(sub) = class_matrix_only(scenario) {
                    report.tables.extend(sub.tables);
                }
            }
        }
    }
    report
}

fn class_matrix_only(scenario: &FacilityScenario) -> crate::Result<Report> {
    let mut report = Report::new(format!("Scenario {}", scenario.name()));
    let mut matrix = Table::new(
        "Compute classes (kHS06)",
        &["experiment", "I.a", "I.b", "I.c", "I.d", "II.a", "II.b"],
    );
    for experiment in scenario.experiments() {
        let mut row = vec![Cell::text(experiment.name())];
        for (_, hs06) in experiment.classes().entries() {
            row.push(if hs06 == 0.0 {
                Cell::Empty
            } else {
                Cell::derived(hs06 / 1e3)
            });
        }
        matrix.push(row);
    }
    report.push(matrix);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(format_sig(981_750.0, 4), "981800");
        assert_eq!(format_sig(243.3, 4), "243.3");
        assert_eq!(format_sig(7.3528, 4), "7.353");
        assert_eq!(format_sig(0.03934, 4), "0.03934");
        assert_eq!(format_sig(22_500.0, 4), "22500");
        assert_eq!(format_sig(2.50906e15, 4), "2.509e15");
        assert_eq!(format_sig(1.0e-7, 4), "1e-7");
        assert_eq!(format_sig(0.0, 4), "0");
        assert_eq!(format_sig(-13.456, 4), "-13.46");
    }

    #[test]
    fn exact_formatting_round_trips() {
        for value in [0.0, 1.0, 0.5, 2.75e6, 1.775e11, 22.0, 0.194] {
            let text = format_exact(value);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, value, "{text}");
        }
        assert_eq!(format_exact(3.0), "3");
        assert_eq!(format_exact(0.25), "0.25");
    }

    #[test]
    fn rendered_numbers_reparse_close_to_the_rendered_value() {
        for value in [981_750.0, 7.3528, 2.50906e15, 1.4464, 0.0001234] {
            let text = format_sig(value, 4);
            let back: f64 = text.parse().unwrap();
            let rounded = round_sig(value, 4);
            assert!((back - rounded).abs() <= 1e-9 * rounded.abs().max(1.0), "{text}");
        }
    }

    fn sample() -> Report {
        let mut table = Table::new("Rates", &["setup", "rate (GB/s)"]);
        table.push(vec![Cell::text("hadron"), Cell::derived(243.3)]);
        table.push(vec![Cell::text("a,b \"c\""), Cell::input(7.0)]);
        let mut report = Report::new("Demo");
        report.push(table);
        report
    }

    #[test]
    fn markdown_layout() {
        let md = sample().to_markdown();
        assert!(md.starts_with("# Demo\n"));
        assert!(md.contains("| setup | rate (GB/s) |"));
        assert!(md.contains("| hadron | 243.3 |"));
    }

    #[test]
    fn csv_quoting_and_line_endings() {
        let csv = sample().to_csv();
        assert!(csv.contains("\"a,b \"\"c\"\"\",7\n"));
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn json_cells_are_typed() {
        let json = sample().to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["tables"][0]["rows"][0][1], serde_json::json!(243.3));
        assert_eq!(value["tables"][0]["rows"][1][0], serde_json::json!("a,b \"c\""));
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = sample();
        let b = sample();
        assert_eq!(a.to_markdown(), b.to_markdown());
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_json(), b.to_json());
    }
}
