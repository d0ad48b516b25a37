//! Offline processing: yearly campaigns in benchmark units, simulation
//! production under a wall-clock budget, and the associated totals.

use fairplan::compute::{
    offline_total, simulation_compute_requirement, Campaign, ReferenceMachine,
};
use fairplan::quantities::{ComputePower, Duration};

fn main() {
    // campaigns quoted directly in HS06 per event
    let campaigns = [
        Campaign::new("online reco", 7e11, 5.06, 100.0, 0.85, 1).unwrap(),
        Campaign::new("offline passes", 7e10, 17.82, 365.0, 0.85, 4).unwrap(),
        Campaign::new("simulation", 1.4e11, 81.4, 365.0, 0.95, 4).unwrap(),
    ];
    let mut total = ComputePower::zero();
    for campaign in &campaigns {
        let req = campaign.requirement();
        total = total + req.per_year;
        println!(
            "{:<14} {:>8.1} kHS06/pass x {} = {:>8.1} kHS06/yr",
            campaign.name(),
            req.per_generation.kilo(),
            campaign.generations(),
            req.per_year.kilo()
        );
    }
    println!("{:<14} {:>30.1} kHS06/yr\n", "total", total.kilo());

    // simulation sized from per-event seconds on a reference machine
    let machine = ReferenceMachine::new("e5-2680v4", 28.0, 22.0, 2400.0).unwrap();
    let sim = simulation_compute_requirement(
        1.775e11,
        Duration::from_seconds(4.0).unwrap(),
        &machine,
        Duration::from_days(365.0).unwrap(),
    )
    .unwrap();
    println!(
        "simulating 1.775e11 events in a year: {:.0} cores, {:.0} kHS06",
        sim.cores,
        sim.hs06.kilo()
    );

    // reconstruction of one run's sample within a week
    let reco = simulation_compute_requirement(
        1.1e11,
        Duration::from_seconds(0.017).unwrap(),
        &machine,
        Duration::from_days(7.0).unwrap(),
    )
    .unwrap();
    println!("one-week reconstruction burst: {:.0} cores", reco.cores);

    // budget roll-up with analysis tracking the simulation sample
    let budget = offline_total(
        ComputePower::hs06(500_000.0).unwrap(),
        ComputePower::hs06(22_000.0).unwrap(),
        0.5,
    )
    .unwrap();
    println!("offline budget incl. analysis: {:.0} kHS06", budget.kilo());
}
