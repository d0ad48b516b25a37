//! From machine hours to peak, in-spill, and sustained interaction rates.

use fairplan::beamline::{MachinePlan, RateCaps};
use fairplan::quantities::EventRate;

fn main() {
    // 6000 machine hours a year, half of them to this cave, 30 days lost
    // to a competing program, 75% spill duty, peak twice the average
    let plan = MachinePlan::new(6000.0, 0.5, 30.0, 0.75, 2.0).unwrap();
    println!(
        "beam seconds per year: {:.3e} ({:.1} days)",
        plan.annual_beam_seconds().seconds(),
        plan.annual_beam_seconds().days()
    );

    let requested = EventRate::per_second(1e7).unwrap();

    let free = plan.rate_profile(requested, &RateCaps::none());
    println!(
        "unconstrained: peak {:.1e}/s, in-spill {:.1e}/s, sustained {:.2e}/s",
        free.peak().get(),
        free.average().get(),
        free.sustained().get()
    );

    // a slow detector caps the average rate two orders below the peak
    let capped = plan.rate_profile(
        requested,
        &RateCaps::average_limit(EventRate::per_second(1e5).unwrap()),
    );
    println!(
        "average-capped: peak {:.1e}/s, in-spill {:.1e}/s, sustained {:.2e}/s",
        capped.peak().get(),
        capped.average().get(),
        capped.sustained().get()
    );
}
