//! Sizing the online reconstruction farm from a measured per-event time.

use fairplan::compute::{online_compute_requirement, online_reco_time, ReferenceMachine};
use fairplan::quantities::{ComputePower, Duration, EventRate};

fn main() {
    // benchmark host: 40 cores, 616 HS06 total after clock-ratio transfer
    let machine = ReferenceMachine::from_total(
        "e7-4860",
        40.0,
        ComputePower::hs06(616.0).unwrap(),
        2260.0,
    )
    .unwrap();
    println!(
        "reference machine: {} cores, {:.0} HS06, {:.1} HS06/core",
        machine.cores(),
        machine.hs06_total().get(),
        machine.hs06_per_core()
    );

    // measured first-level time, extrapolated to the full chain
    let per_event = online_reco_time(
        Duration::from_seconds(0.0085).unwrap(),
        3.0,
        1.5,
    )
    .unwrap();
    println!("full-chain reconstruction: {:.1} ms/event", per_event.seconds() * 1e3);

    let sustained = EventRate::per_second(3.75e6).unwrap();
    let farm = online_compute_requirement(sustained, per_event, &machine);
    println!(
        "farm for {:.2e}/s sustained: {:.0} cores = {} machines = {:.0} kHS06",
        sustained.get(),
        farm.cores,
        farm.machines_ceiled,
        farm.hs06.kilo()
    );

    // sensitivity: what a faster chain buys
    for speedup in [1.25, 1.5, 2.0] {
        let t = Duration::from_seconds(per_event.seconds() / speedup).unwrap();
        let req = online_compute_requirement(sustained, t, &machine);
        println!("  {speedup:.2}x faster chain: {:.0} cores", req.cores);
    }
}
