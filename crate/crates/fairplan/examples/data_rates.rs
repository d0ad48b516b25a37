//! Readout bandwidth for a setup under a beam schedule, and the uplink
//! that has to carry it.

use fairplan::beamline::{MachinePlan, RateCaps};
use fairplan::detector::{gc_bandwidth_requirement, DetectorContribution, Setup};
use fairplan::quantities::{EventRate, Prefix};

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

    let inspill = setup.inspill_data_rate(&profile);
    let sustained = setup.sustained_data_rate(&profile);
    println!(
        "in-spill {:.1} GB/s, sustained {:.3} GB/s",
        inspill.value_in(Prefix::Giga),
        sustained.value_in(Prefix::Giga)
    );

    // dark messages ride along; headroom buys room to grow
    let uplink = gc_bandwidth_requirement(inspill, 0.10, 1.5).unwrap();
    println!(
        "uplink: payload {:.1} GB/s, with noise {:.1} GB/s, installed {:.1} GB/s",
        uplink.base.value_in(Prefix::Giga),
        uplink.upper_limit.value_in(Prefix::Giga),
        uplink.required.value_in(Prefix::Giga)
    );
    println!(
        "per fiber over 120 fibers: {:.2} GB/s",
        uplink.required.value_in(Prefix::Giga) / 120.0
    );
}
