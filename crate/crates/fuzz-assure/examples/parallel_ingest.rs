//! Sharded ingestion: accumulate in parallel, merge exactly.
//!
//! A `CampaignSnapshot` is a pair of counters (inputs seen, incidence
//! count per species), so snapshots of disjoint record shards merge by
//! addition into exactly the snapshot a sequential pass would have
//! built. That makes ingestion embarrassingly parallel: shard the
//! records, fold each shard on its own thread, merge.
//!
//! The example builds a 100k-input campaign, ingests it sequentially and
//! sharded-in-parallel, and asserts the two snapshots are equal (not
//! approximately: equal).
//!
//! Run with:
//!
//! ```text
//! cargo run --example parallel_ingest --release
//! ```

use std::time::Instant;

use fuzz_assure::simulator::{build_model, simulate, Distribution, Mode};
use fuzz_assure::CampaignSnapshot;
use rayon::prelude::*;

fn main() {
    let model =
        build_model(5000, Distribution::Zipf { alpha: 1.2 }, Mode::Abundance).expect("valid model");
    let campaign = simulate(&model, 100_000, 3).expect("n >= 1");
    println!("campaign: {} records", campaign.records.len());

    let start = Instant::now();
    let mut sequential = CampaignSnapshot::new();
    for record in &campaign.records {
        sequential.observe(record);
    }
    let sequential_time = start.elapsed();

    let start = Instant::now();
    let sharded = campaign
        .records
        .par_chunks(4096)
        .map(|shard| {
            let mut snap = CampaignSnapshot::new();
            for record in shard {
                snap.observe(record);
            }
            snap
        })
        .reduce(CampaignSnapshot::new, |mut left, right| {
            left.merge(&right);
            left
        });
    let sharded_time = start.elapsed();

    assert_eq!(sequential, sharded);
    println!("sequential fold and parallel shard-merge built equal snapshots.");
    println!(
        "  n = {}, s_obs = {}, f1 = {}, f2 = {}",
        sharded.n(),
        sharded.s_obs(),
        sharded.f1(),
        sharded.f2()
    );
    println!(
        "  sequential: {:?}, sharded over {} threads: {:?}",
        sequential_time,
        rayon::current_num_threads(),
        sharded_time
    );
    println!();
    println!("merge is addition on counters, so shard boundaries cannot change any");
    println!("statistic; the same identity is what lets directory ingestion fan out.");
}
