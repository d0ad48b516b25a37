//! Facility-wide compute roll-up from the shipped scenario document.

use fairplan::report::aggregate_report;
use fairplan::scenario::ScenarioDocument;
use std::path::Path;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fsplus.json");
    let doc = ScenarioDocument::from_path(Path::new(path)).unwrap();
    let model = doc.to_model().unwrap();

    for (name, scenario) in &model.scenarios {
        let aggregate = scenario.aggregate_compute();
        let minimum = scenario.tier0_minimum().unwrap();
        let profile = scenario.online_profile();
        println!(
            "{name}: annual {:.0} kHS06, online peak {:.0} kHS06 on day {}, core site {:.0} kHS06 ({:.1}%)",
            aggregate.annual_total.kilo(),
            profile.max.kilo(),
            profile.peak_day,
            minimum.hs06.kilo(),
            minimum.share_of_annual_total * 100.0
        );
    }

    println!("\n{}", aggregate_report(&model.scenarios["FS+"]).unwrap().to_markdown());
}
