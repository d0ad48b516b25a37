//! Disk usage over the years from retention rules: rolling windows,
//! permanent archives, pools, and reprocessing generations.

use fairplan::ledger::{
    archive_growth, archive_series, ledger_series, reprocessed_accumulation, Retention,
    StorageClass, StorageKind,
};
use fairplan::quantities::Prefix;

fn main() {
    let classes = vec![
        // raw data stays hot for two years, then only the tape copy remains
        StorageClass::recurring("raw-disk", StorageKind::RawDisk, 22_500.0, Retention::Years(2), 2028)
            .unwrap(),
        StorageClass::recurring(
            "raw-archive",
            StorageKind::RawArchive,
            22_500.0,
            Retention::Permanent,
            2028,
        )
        .unwrap()
        .with_offsite_copies(2)
        .unwrap(),
        StorageClass::recurring("simulation", StorageKind::Simulation, 11_000.0, Retention::Years(4), 2028)
            .unwrap(),
        StorageClass::recurring("aod", StorageKind::Derived, 4_500.0, Retention::Years(5), 2028)
            .unwrap(),
        StorageClass::pool("filter-buffer", StorageKind::Transient, 14_000.0, 2028).unwrap(),
    ];

    let series = ledger_series(&classes, 2028..=2036);
    println!("year   disk (PB)");
    for (i, year) in series.years.iter().enumerate() {
        println!("{year}   {:>8.1}", series.stacked[i].value_in(Prefix::Peta));
    }
    let (year, peak) = series.peak().unwrap();
    println!("steady state {:.1} PB from {year}\n", peak.value_in(Prefix::Peta));

    // tape is cumulative; archive-kind classes hold no disk
    let tape = archive_series(&classes, 2028..=2036);
    let growth = archive_growth(&tape, 2028, 2031).unwrap();
    println!("archive grows {:.2} PB/yr", growth / 1e15);

    // each reprocessing pass adds a copy of every live dataset until the
    // generation cap bites
    let accumulation = reprocessed_accumulation(560.0, 4, 10, 13).unwrap();
    println!("\nreprocessed AOD accumulation (TB):");
    for (i, tb) in accumulation.iter().enumerate() {
        println!("  year {:>2}: {:>8.0}", i + 1, tb);
    }
}
