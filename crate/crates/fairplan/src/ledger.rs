//! Multi-year storage ledgers with retention windows.
//!
//! A [`StorageClass`] describes one pool of data an experiment keeps: raw
//! data on disk for a couple of years, simulated data for the lifetime of
//! its analysis, a standing transient buffer, or a tape archive that only
//! ever grows. Evaluating a set of classes over a span of years yields the
//! disk usage curve and the archive curve that facility planning needs.
//!
//! Disk usage of a recurring class in year `y` is the sum of its inflows
//! over the retention window `[y - retention + 1, y]`, clipped to the years
//! the class is actually producing. A class that writes `r` TB/yr and keeps
//! each year's data for `k` years therefore plateaus at `k x r` TB once the
//! window is full.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::quantities::{Convention, DataVolume, Prefix};
use crate::{finite_nonneg, invalid, Result};

/// What kind of data a storage class holds. Planning semantics only depend
/// on this through [`StorageKind::is_archive`]; the rest is reporting
/// taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageKind {
    /// Raw data staged on disk for prompt processing.
    RawDisk,
    /// Raw data written to the long-term archive.
    RawArchive,
    /// Simulated data (detector response, MC transport).
    Simulation,
    /// Reconstruction output and analysis objects.
    Derived,
    /// Short-lived staging buffers (delayed filtering, calibration passes).
    Transient,
    /// Scratch space with no retention promise.
    Volatile,
}

impl StorageKind {
    pub fn is_archive(self) -> bool {
        matches!(self, StorageKind::RawArchive)
    }

    pub fn label(self) -> &'static str {
        match self {
            StorageKind::RawDisk => "raw (disk)",
            StorageKind::RawArchive => "raw (archive)",
            StorageKind::Simulation => "simulation",
            StorageKind::Derived => "derived",
            StorageKind::Transient => "transient",
            StorageKind::Volatile => "volatile",
        }
    }
}

/// How long each year's inflow stays on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retention {
    /// Kept for this many years including the production year.
    Years(u32),
    /// Never deleted.
    Permanent,
}

/// How data arrives in a class.
#[derive(Debug, Clone, PartialEq)]
enum Inflow {
    /// The same amount every production year, in TB.
    PerYear(f64),
    /// Explicit amounts for specific years, in TB.
    Schedule(BTreeMap<i32, f64>),
    /// A standing pool: constant usage while the class is active, no
    /// per-year accounting.
    Pool(f64),
}

/// One pool of data with its production window and retention policy.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageClass {
    name: String,
    kind: StorageKind,
    convention: Convention,
    inflow: Inflow,
    retention: Retention,
    start_year: i32,
    end_year: Option<i32>,
    reprocess_generations: Option<u32>,
    offsite_copies: u32,
    archived: bool,
}

impl StorageClass {
    /// A class producing `tb_per_year` every year from `start_year` on.
    pub fn recurring(
        name: impl Into<String>,
        kind: StorageKind,
        tb_per_year: f64,
        retention: Retention,
        start_year: i32,
    ) -> Result<Self> {
        let tb_per_year = finite_nonneg("inflow", tb_per_year)?;
        if let Retention::Years(0) = retention {
            return Err(invalid("retention", "must be >= 1 year"));
        }
        Ok(Self {
            name: name.into(),
            kind,
            convention: Convention::Decimal,
            inflow: Inflow::PerYear(tb_per_year),
            retention,
            start_year,
            end_year: None,
            reprocess_generations: None,
            offsite_copies: 1,
            archived: kind.is_archive(),
        })
    }

    /// A class with explicit per-year inflows. Keys outside the production
    /// window are rejected when an end year is set later.
    pub fn scheduled(
        name: impl Into<String>,
        kind: StorageKind,
        inflows_tb: BTreeMap<i32, f64>,
        retention: Retention,
        start_year: i32,
    ) -> Result<Self> {
        for (&year, &tb) in &inflows_tb {
            finite_nonneg("inflow", tb)?;
            if year < start_year {
                return Err(invalid(
                    "inflow schedule",
                    format!("year {year} precedes the start year {start_year}"),
                ));
            }
        }
        if let Retention::Years(0) = retention {
            return Err(invalid("retention", "must be >= 1 year"));
        }
        Ok(Self {
            name: name.into(),
            kind,
            convention: Convention::Decimal,
            inflow: Inflow::Schedule(inflows_tb),
            retention,
            start_year,
            end_year: None,
            reprocess_generations: None,
            offsite_copies: 1,
            archived: kind.is_archive(),
        })
    }

    /// A standing pool of `tb` occupied while the class is active.
    pub fn pool(
        name: impl Into<String>,
        kind: StorageKind,
        tb: f64,
        start_year: i32,
    ) -> Result<Self> {
        let tb = finite_nonneg("pool size", tb)?;
        Ok(Self {
            name: name.into(),
            kind,
            convention: Convention::Decimal,
            inflow: Inflow::Pool(tb),
            retention: Retention::Permanent,
            start_year,
            end_year: None,
            reprocess_generations: None,
            offsite_copies: 1,
            archived: false,
        })
    }

    /// Last production year (inclusive). Data already on disk keeps aging
    /// out through the retention window; pools vanish after this year.
    pub fn with_end_year(mut self, end_year: i32) -> Result<Self> {
        if end_year < self.start_year {
            return Err(invalid(
                "end year",
                format!("{end_year} precedes the start year {}", self.start_year),
            ));
        }
        if let Inflow::Schedule(map) = &self.inflow {
            if let Some((&last, _)) = map.iter().next_back() {
                if last > end_year {
                    return Err(invalid(
                        "inflow schedule",
                        format!("year {last} exceeds the end year {end_year}"),
                    ));
                }
            }
        }
        self.end_year = Some(end_year);
        Ok(self)
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    /// Marks each year's dataset as regenerated `generations` times in
    /// total, one generation per following year, with every generation kept.
    /// Requires a constant inflow, permanent retention, and a last
    /// production year, since the accumulation is open-ended otherwise.
    pub fn with_reprocessing(mut self, generations: u32, last_production_year: i32) -> Result<Self> {
        if generations == 0 {
            return Err(invalid("reprocess generations", "must be >= 1"));
        }
        if !matches!(self.inflow, Inflow::PerYear(_)) {
            return Err(invalid(
                "reprocess generations",
                "requires a constant per-year inflow",
            ));
        }
        if !matches!(self.retention, Retention::Permanent) {
            return Err(invalid("reprocess generations", "requires permanent retention"));
        }
        self = self.with_end_year(last_production_year)?;
        self.reprocess_generations = Some(generations);
        Ok(self)
    }

    /// Number of geographically separate copies the archive policy demands.
    /// Annotation only: capacity sums never multiply by it, since the extra
    /// copies live at partner sites.
    pub fn with_offsite_copies(mut self, copies: u32) -> Result<Self> {
        if copies == 0 {
            return Err(invalid("offsite copies", "must be >= 1"));
        }
        self.offsite_copies = copies;
        Ok(self)
    }

    /// Includes a non-archive class in the archive series (derived data
    /// that is additionally written to tape).
    pub fn with_archival(mut self) -> Self {
        self.archived = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> StorageKind {
        self.kind
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn retention(&self) -> Retention {
        self.retention
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> Option<i32> {
        self.end_year
    }

    pub fn offsite_copies(&self) -> u32 {
        self.offsite_copies
    }

    pub fn is_archived(&self) -> bool {
        self.archived
    }

    pub fn reprocess_generations(&self) -> Option<u32> {
        self.reprocess_generations
    }

    fn tb_to_volume(&self, tb: f64) -> DataVolume {
        DataVolume::new(tb, Prefix::Tera, self.convention).expect("validated inflows")
    }

    fn inflow_tb(&self, year: i32) -> f64 {
        let end = self.end_year.unwrap_or(i32::MAX);
        if year < self.start_year || year > end {
            return 0.0;
        }
        match &self.inflow {
            Inflow::PerYear(tb) => *tb,
            Inflow::Schedule(map) => map.get(&year).copied().unwrap_or(0.0),
            Inflow::Pool(_) => 0.0,
        }
    }

    /// Disk usage at the end of `year`. Archive-kind classes live on tape
    /// and report zero disk; their growth shows up in
    /// [`archived_through`](Self::archived_through) instead.
    pub fn usage(&self, year: i32) -> DataVolume {
        if self.kind.is_archive() {
            return self.tb_to_volume(0.0);
        }
        match &self.inflow {
            Inflow::Pool(tb) => {
                let end = self.end_year.unwrap_or(i32::MAX);
                let tb = if year >= self.start_year && year <= end {
                    *tb
                } else {
                    0.0
                };
                self.tb_to_volume(tb)
            }
            Inflow::PerYear(tb) => {
                if let Some(generations) = self.reprocess_generations {
                    let end = self.end_year.expect("reprocessing requires an end year");
                    let n = i64::from(year) - i64::from(self.start_year) + 1;
                    let production_years = i64::from(end) - i64::from(self.start_year) + 1;
                    let copies = reprocess_copies(n, production_years, i64::from(generations));
                    return self.tb_to_volume(tb * copies as f64);
                }
                let window = self.retention_window(year);
                self.tb_to_volume(tb * window as f64)
            }
            Inflow::Schedule(map) => {
                let (first, last) = match self.window_bounds(year) {
                    Some(bounds) => bounds,
                    None => return self.tb_to_volume(0.0),
                };
                let total: f64 = map.range(first..=last).map(|(_, tb)| tb).sum();
                self.tb_to_volume(total)
            }
        }
    }

    /// Number of production years still on disk at the end of `year`.
    fn retention_window(&self, year: i32) -> i64 {
        match self.window_bounds(year) {
            Some((first, last)) => i64::from(last) - i64::from(first) + 1,
            None => 0,
        }
    }

    /// Inclusive bounds of production years whose data is still held in
    /// `year`, or `None` when the window is empty.
    fn window_bounds(&self, year: i32) -> Option<(i32, i32)> {
        let newest = year.min(self.end_year.unwrap_or(year));
        let oldest = match self.retention {
            Retention::Permanent => self.start_year,
            Retention::Years(k) => {
                let k = i64::from(k);
                let lower = i64::from(year) - k + 1;
                lower.max(i64::from(self.start_year)) as i32
            }
        };
        if oldest > newest || year < self.start_year {
            None
        } else {
            Some((oldest, newest))
        }
    }

    /// Cumulative archival volume written by the end of `year`. Zero for
    /// classes that are neither archive-kind nor flagged archived, and for
    /// pools.
    pub fn archived_through(&self, year: i32) -> DataVolume {
        if !self.archived {
            return self.tb_to_volume(0.0);
        }
        let total: f64 = (self.start_year..=year).map(|y| self.inflow_tb(y)).sum();
        self.tb_to_volume(total)
    }
}

/// Dataset copies on disk `n` years into a reprocessing plan (1-based):
/// every production year's dataset gains one generation per year up to
/// `generations`, and all generations are kept.
///
/// Closed form of sum over datasets `j = 1..min(n, production_years)` of
/// `min(n - j + 1, generations)`, split into the saturated head and the
/// arithmetic tail.
fn reprocess_copies(n: i64, production_years: i64, generations: i64) -> i64 {
    if n <= 0 || production_years <= 0 || generations <= 0 {
        return 0;
    }
    let started = n.min(production_years);
    let saturated = started.min((n - generations + 1).max(0));
    let remaining = started - saturated;
    let tail = if remaining > 0 {
        // ages n - started + 1 ..= n - saturated, each below `generations`
        let lo = n - started + 1;
        let hi = n - saturated;
        (lo + hi) * remaining / 2
    } else {
        0
    };
    saturated * generations + tail
}

/// Disk accumulation of a reprocessing plan, as plain TB per year over
/// `horizon_years` starting with the first production year.
///
/// Year 1 holds one generation of one dataset; growth accelerates until
/// every live dataset carries `generations` copies, then the curve goes
/// flat at `annual_tb x generations x production_years`.
pub fn reprocessed_accumulation(
    annual_tb: f64,
    generations: u32,
    production_years: u32,
    horizon_years: u32,
) -> Result<Vec<f64>> {
    let annual_tb = finite_nonneg("annual inflow", annual_tb)?;
    if generations == 0 {
        return Err(invalid("generations", "must be >= 1"));
    }
    if production_years == 0 {
        return Err(invalid("production years", "must be >= 1"));
    }
    Ok((1..=i64::from(horizon_years))
        .map(|n| {
            annual_tb
                * reprocess_copies(n, i64::from(production_years), i64::from(generations)) as f64
        })
        .collect())
}

/// Per-class and stacked disk usage over a span of years.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskSeries {
    pub years: Vec<i32>,
    /// One usage series per class, in input order.
    pub per_class: Vec<(String, Vec<DataVolume>)>,
    /// Sum over classes for each year.
    pub stacked: Vec<DataVolume>,
}

impl DiskSeries {
    /// Largest stacked usage and the year it occurs (first year on ties).
    pub fn peak(&self) -> Option<(i32, DataVolume)> {
        let mut best: Option<(i32, DataVolume)> = None;
        for (&year, &usage) in self.years.iter().zip(&self.stacked) {
            match best {
                Some((_, b)) if usage.bytes() <= b.bytes() => {}
                _ => best = Some((year, usage)),
            }
        }
        best
    }
}

/// Evaluates disk usage for every class across `years`. The stacked series
/// is exactly the per-year sum of the per-class series.
pub fn ledger_series(classes: &[StorageClass], years: RangeInclusive<i32>) -> DiskSeries {
    let years: Vec<i32> = years.collect();
    let per_class: Vec<(String, Vec<DataVolume>)> = classes
        .iter()
        .map(|class| {
            (
                class.name().to_string(),
                years.iter().map(|&y| class.usage(y)).collect(),
            )
        })
        .collect();
    let stacked = years
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let bytes: f64 = per_class.iter().map(|(_, series)| series[i].bytes()).sum();
            DataVolume::from_bytes(bytes, Convention::Decimal).expect("finite usages")
        })
        .collect();
    DiskSeries {
        years,
        per_class,
        stacked,
    }
}

/// Cumulative archive volume across `years`, summing every class that
/// writes to the archive. Monotone non-decreasing by construction.
pub fn archive_series(classes: &[StorageClass], years: RangeInclusive<i32>) -> Vec<(i32, DataVolume)> {
    years
        .map(|year| {
            let bytes: f64 = classes
                .iter()
                .map(|class| class.archived_through(year).bytes())
                .sum();
            (
                year,
                DataVolume::from_bytes(bytes, Convention::Decimal).expect("finite volumes"),
            )
        })
        .collect()
}

/// Average yearly archive growth between two years of a series, in bytes
/// per year.
pub fn archive_growth(series: &[(i32, DataVolume)], from: i32, to: i32) -> Result<f64> {
    if to <= from {
        return Err(invalid("archive growth window", "end must be after start"));
    }
    let find = |year: i32| {
        series
            .iter()
            .find(|(y, _)| *y == year)
            .map(|(_, v)| v.bytes())
            .ok_or_else(|| invalid("archive growth window", format!("year {year} not in series")))
    };
    let start = find(from)?;
    let end = find(to)?;
    Ok((end - start) / f64::from(to - from))
}
