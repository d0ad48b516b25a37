//! Document round trips: parse, canonicalize, validate, and render reports.

use fairplan::report::{full_report, Format};
use fairplan::scenario::ScenarioDocument;
use std::path::Path;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fsplus.json");
    let doc = ScenarioDocument::from_path(Path::new(path)).unwrap();

    // canonical emission is a fixpoint: parse(emit(x)) == x
    let canonical = doc.to_canonical_json();
    let reparsed = ScenarioDocument::from_str(&canonical).unwrap();
    assert_eq!(doc, reparsed);
    assert_eq!(reparsed.to_canonical_json(), canonical);
    println!("canonical form: {} bytes, stable under reparse", canonical.len());

    // validation collects every problem with its document path
    let mut broken = doc.clone();
    broken.runs.get_mut("hadron").unwrap().setup = "hadrn".to_string();
    broken.scenarios.get_mut("FS+").unwrap().members[0].experiment = "CMB".to_string();
    for issue in broken.validate() {
        println!("  {issue}");
    }

    // reports render to markdown, CSV, and JSON with identical numbers
    let model = doc.to_model().unwrap();
    let report = full_report(&model);
    for format in [Format::Markdown, Format::Csv, Format::Json] {
        let rendered = report.render(format);
        println!("{format:?}: {} bytes", rendered.len());
    }
    print!("{}", report.tables[1].to_markdown());
}
