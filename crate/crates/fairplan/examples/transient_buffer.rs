//! Staging buffer for delayed filtering: hold a week of first-level
//! output so the final selection can run offline.

use fairplan::beamline::{MachinePlan, RateCaps};
use fairplan::detector::{DetectorContribution, Setup};
use fairplan::quantities::{Duration, EventRate, Prefix};
use fairplan::trigger::{RunPlan, TriggerBranch};

fn main() {
    let setup = Setup::new(
        "hadron",
        vec![
            DetectorContribution::new("STS", 5395.0, 4.0).unwrap(),
            DetectorContribution::new("TRD", 1810.0, 12.0).unwrap(),
            DetectorContribution::new("TOF", 670.0, 8.0).unwrap(),
        ],
    );
    let plan = MachinePlan::new(6000.0, 0.5, 30.0, 0.75, 2.0).unwrap();
    let profile = plan.rate_profile(EventRate::per_second(1e7).unwrap(), &RateCaps::none());
    let run = RunPlan::new(
        "hadron",
        setup,
        profile,
        Duration::from_seconds(2.75e6).unwrap(),
        vec![TriggerBranch::new("physics", 200.0, 1.0).unwrap()],
    );

    for days in [1.0, 3.0, 7.0, 14.0] {
        let req = run
            .transient_filter_requirements(10.0, Duration::from_days(days).unwrap())
            .unwrap();
        println!(
            "{days:>4.0} d holding: {:>7.3} PB, write {:.2} GB/s, read {:.2} GB/s",
            req.volume.value_in(Prefix::Peta),
            req.write_bandwidth.value_in(Prefix::Giga),
            req.read_bandwidth.value_in(Prefix::Giga)
        );
    }

    // the buffer sizes with the in-spill rate: spills must never stall,
    // while the drain runs on the sustained average
    let week = run
        .transient_filter_requirements(10.0, Duration::from_days(7.0).unwrap())
        .unwrap();
    println!(
        "\nvolume follows in-spill bursts, bandwidth the sustained drain: {:.3} PB vs {:.4} GB/s",
        week.volume.value_in(Prefix::Peta),
        week.write_bandwidth.value_in(Prefix::Giga)
    );
}
