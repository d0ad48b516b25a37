//! Multi-year storage evolution for every scenario in the shipped document.

use fairplan::quantities::Prefix;
use fairplan::scenario::ScenarioDocument;
use std::path::Path;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fsplus.json");
    let doc = ScenarioDocument::from_path(Path::new(path)).unwrap();
    let model = doc.to_model().unwrap();

    for (name, scenario) in &model.scenarios {
        let evolution = scenario.storage_evolution(2028, 2040).unwrap();
        println!("{name}:");
        println!(
            "  disk saturates at {:.1} PB in {}",
            evolution.saturation.value_in(Prefix::Peta),
            evolution.saturation_year
        );
        let (_, last_archive) = evolution.archive.last().unwrap();
        println!(
            "  archive reaches {:.1} PB by 2040",
            last_archive.value_in(Prefix::Peta)
        );
        for (experiment, series) in &evolution.per_experiment {
            let final_disk = series.stacked.last().unwrap();
            println!("    {experiment:<8} {:>7.2} PB", final_disk.value_in(Prefix::Peta));
        }
    }
}
