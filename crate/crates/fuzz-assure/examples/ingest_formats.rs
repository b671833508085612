//! One campaign, three formats, one snapshot.
//!
//! Incidence data arrives in whatever shape the harness produced:
//! canonical JSONL (one record per line), paired CSV
//! (`input_id,species_id` rows, grouped contiguously), or a directory of
//! per-input coverage maps (`EDGEID:COUNT` lines; counts are ignored
//! because incidence cares who saw what, not how often).
//!
//! The repository ships one golden campaign in all three formats under
//! `testdata/`; this example ingests each and checks they build the
//! identical snapshot. It then demonstrates namespace filtering: the
//! same file analyzed for its edge species only.
//!
//! Run with:
//!
//! ```text
//! cargo run --example ingest_formats
//! ```

use std::path::Path;

use fuzz_assure::estimators::full_report;
use fuzz_assure::ingest::{snapshot_from_path, IngestOptions};

fn main() {
    let testdata = Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata");
    let opts = IngestOptions::default();

    let (from_jsonl, _) =
        snapshot_from_path(&testdata.join("campaign.jsonl"), None, &opts).expect("golden JSONL");
    let (from_csv, _) =
        snapshot_from_path(&testdata.join("campaign.csv"), None, &opts).expect("golden CSV");
    let (from_maps, _) =
        snapshot_from_path(&testdata.join("showmap"), None, &opts).expect("golden map dir");

    assert_eq!(from_jsonl, from_csv);
    assert_eq!(from_jsonl, from_maps);
    println!("JSONL, CSV, and coverage-map directory agree on the snapshot:");
    println!(
        "  n = {}, s_obs = {}, f1 = {}, f2 = {}",
        from_jsonl.n(),
        from_jsonl.s_obs(),
        from_jsonl.f1(),
        from_jsonl.f2()
    );
    println!();

    println!("per-species incidence counts:");
    let mut counts: Vec<(&String, &u64)> = from_jsonl.species_counts().iter().collect();
    counts.sort();
    for (species, count) in counts {
        println!("  {species}: seen in {count} input(s)");
    }
    println!();

    let report = full_report(&from_jsonl).expect("non-empty campaign");
    println!(
        "analysis: u_hat = {:.3}, s_hat = {:.2}, g_hat = {:.3}",
        report.u_hat, report.s_hat, report.g_hat
    );
    println!();

    // Namespace filtering: keep only species under a prefix. Inputs left
    // with no species still count toward n; an input that found nothing
    // relevant is still evidence of no discovery.
    let filtered_opts = IngestOptions {
        species_filter: Some("edge:0001".to_string()),
        ..IngestOptions::default()
    };
    let (filtered, _) = snapshot_from_path(&testdata.join("campaign.jsonl"), None, &filtered_opts)
        .expect("golden JSONL");
    println!(
        "filtered to edge:0001*: n = {} (unchanged), s_obs = {}",
        filtered.n(),
        filtered.s_obs()
    );
}
