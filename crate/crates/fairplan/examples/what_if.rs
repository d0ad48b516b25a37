//! What-if studies: mutate a parsed document and re-resolve it.

use fairplan::quantities::Prefix;
use fairplan::scenario::{RetentionEntry, ScenarioDocument};
use std::path::Path;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fsplus.json");
    let doc = ScenarioDocument::from_path(Path::new(path)).unwrap();

    let baseline = doc.to_model().unwrap();
    println!(
        "baseline stored volume: {:.2} PB/yr",
        baseline.storage_plan().total_volume.value_in(Prefix::Peta)
    );

    let saturation = |doc: &ScenarioDocument| {
        let model = doc.to_model().unwrap();
        let evolution = model.scenarios["FS+"].storage_evolution(2028, 2040).unwrap();
        evolution.saturation.value_in(Prefix::Peta)
    };

    // double the raw-data retention and watch the disk peak move
    let mut longer = doc.clone();
    for profile in longer.experiments.get_mut("CBM").unwrap().profiles.values_mut() {
        for class in &mut profile.storage {
            if class.name == "raw-disk" {
                class.retention_years = Some(RetentionEntry::Years(4));
            }
        }
    }
    println!(
        "FS+ saturation: {:.1} PB baseline, {:.1} PB with raw data held twice as long",
        saturation(&doc),
        saturation(&longer)
    );

    // halve the hadron trigger selectivity
    let mut looser = doc.clone();
    looser.runs.get_mut("hadron").unwrap().branches[0].selectivity = 100.0;
    let model = looser.to_model().unwrap();
    let physics = model
        .storage_plan()
        .rows
        .into_iter()
        .find(|row| row.run == "hadron" && row.branch == "physics")
        .unwrap();
    println!(
        "hadron physics branch at selectivity 100: {:.3} PB/yr (was 2.509)",
        physics.volume.value_in(Prefix::Peta)
    );
}
