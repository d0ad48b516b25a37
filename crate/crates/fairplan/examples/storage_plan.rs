//! Annual permanent-storage demand across runs and trigger branches.

use fairplan::beamline::MachinePlan;
use fairplan::detector::{DetectorContribution, Setup};
use fairplan::quantities::{Duration, EventRate, Prefix};
use fairplan::trigger::{annual_storage_plan, RunPlan, TriggerBranch};

fn main() {
    let plan = MachinePlan::new(6000.0, 0.5, 30.0, 0.75, 2.0).unwrap();
    let run_seconds = Duration::from_seconds(2.75e6).unwrap();
    let requested = EventRate::per_second(1e7).unwrap();

    let hadron = Setup::new(
        "hadron",
        vec![
            DetectorContribution::new("STS", 5395.0, 4.0).unwrap(),
            DetectorContribution::new("TRD", 1810.0, 12.0).unwrap(),
            DetectorContribution::new("TOF", 670.0, 8.0).unwrap(),
        ],
    );
    let profile = plan.rate_profile(requested, hadron.rate_caps());

    let run = RunPlan::new(
        "hadron",
        hadron,
        profile,
        run_seconds,
        vec![
            // selective physics trigger keeps one event in 200
            TriggerBranch::new("physics", 200.0, 1.0)
                .unwrap()
                .with_equivalent_events(1e12)
                .unwrap(),
            // unbiased reference sample, downscaled by the same factor
            TriggerBranch::new("min-bias", 1.0, 200.0)
                .unwrap()
                .with_equivalent_events(5e11)
                .unwrap(),
        ],
    );

    for branch in run.branches() {
        let stored = run.branch_storage(branch);
        println!(
            "{:<9} reduction {:>5}: {:.3} PB, {:.2e} events stored",
            branch.name(),
            branch.total_reduction(),
            stored.volume.value_in(Prefix::Peta),
            stored.stored_events
        );
    }

    let totals = annual_storage_plan(std::slice::from_ref(&run));
    println!(
        "run total {:.3} PB over {:.2e} s",
        totals.total_volume.value_in(Prefix::Peta),
        totals.total_run_seconds.seconds()
    );

    let archival = run.archival_bandwidth(1.5).unwrap();
    println!(
        "archival write path: {:.2} GB/s average, {:.2} GB/s installed",
        archival.average.value_in(Prefix::Giga),
        archival.peak.value_in(Prefix::Giga)
    );
}
