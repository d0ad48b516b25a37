//! Per-detector payloads summed into event sizes for three setups.

use fairplan::detector::{DetectorContribution, Setup};
use fairplan::quantities::Prefix;

fn main() {
    let setups = vec![
        Setup::new(
            "hadron",
            vec![
                DetectorContribution::new("STS", 5395.0, 4.0).unwrap(),
                DetectorContribution::new("TRD", 1810.0, 12.0).unwrap(),
                DetectorContribution::new("TOF", 670.0, 8.0).unwrap(),
            ],
        ),
        Setup::new(
            "electron",
            vec![
                DetectorContribution::new("MVD", 3156.0, 4.0).unwrap(),
                DetectorContribution::new("STS", 4779.0, 4.0).unwrap(),
                DetectorContribution::new("RICH", 425.0, 4.0).unwrap(),
                DetectorContribution::new("TRD", 2487.0, 12.0).unwrap(),
                DetectorContribution::new("TOF", 1079.0, 8.0).unwrap(),
                DetectorContribution::new("PSD", 403.0, 4.0).unwrap(),
            ],
        ),
        Setup::new(
            "muon",
            vec![
                DetectorContribution::new("STS", 5668.0, 4.0).unwrap(),
                DetectorContribution::new("MUCH", 926.0, 4.0).unwrap(),
                DetectorContribution::new("TRD", 55.0, 12.0).unwrap(),
                DetectorContribution::new("TOF", 126.0, 8.0).unwrap(),
            ],
        ),
    ];

    for setup in &setups {
        println!("{:<10} {:>8.3} kB/event", setup.name(), setup.event_size().value_in(Prefix::Kilo));
        for c in setup.contributions() {
            println!(
                "  {:<6} {:>6} messages x {:>2} B = {:>6} B",
                c.name(),
                c.messages_per_event(),
                c.bytes_per_message(),
                c.bytes_per_event()
            );
        }
    }

    // a higher beam energy scales every contribution
    let dense = setups[0].clone().with_energy_scale(1.3).unwrap();
    println!(
        "\n{} at full energy: {:.3} kB/event",
        dense.name(),
        dense.event_size().value_in(Prefix::Kilo)
    );
}
