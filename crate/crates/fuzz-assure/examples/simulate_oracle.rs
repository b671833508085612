//! The simulation oracle: campaigns with known ground truth.
//!
//! Every estimator in this crate can be wrong; the simulator is how you
//! find out by how much. It draws synthetic campaigns from a fully
//! specified species pool, so the quantities the estimators guess at
//! (true residual risk, true richness) are known exactly at every
//! checkpoint.
//!
//! This example builds a Zipf-shaped pool (a few hot species, a long
//! cold tail, the shape real coverage data tends to have), simulates one
//! campaign, prints the estimate-versus-truth table, and finally
//! re-derives the truth from the emitted records alone to show the
//! sidecar is redundant with the data.
//!
//! Run with:
//!
//! ```text
//! cargo run --example simulate_oracle
//! ```

use fuzz_assure::estimators::full_report;
use fuzz_assure::simulator::{build_model, recompute_truth, simulate, Distribution, Mode};
use fuzz_assure::CampaignSnapshot;

fn main() {
    let model = build_model(200, Distribution::Zipf { alpha: 1.0 }, Mode::Abundance)
        .expect("valid model parameters");
    println!(
        "model: {} species, zipf(alpha=1), abundance sampling (one species per input)",
        model.s_true
    );
    let p = model.probabilities();
    println!(
        "hottest species carries p = {:.4}; coldest carries p = {:.6}",
        p[0],
        p[p.len() - 1]
    );
    println!();

    let campaign = simulate(&model, 2000, 42).expect("n >= 1");

    // Walk the records once, reporting estimates next to the truth at
    // each checkpoint of the default log-spaced grid.
    println!(
        "{:>6}  {:>6}  {:>9}  {:>9}  {:>10}",
        "n", "seen", "u_hat", "u_true", "|error|"
    );
    let mut snapshot = CampaignSnapshot::new();
    let mut truth_iter = campaign.truth.iter().peekable();
    for (pos, record) in campaign.records.iter().enumerate() {
        snapshot.observe(record);
        let i = pos as u64 + 1;
        if truth_iter.peek().is_some_and(|t| t.n == i) {
            let truth = truth_iter.next().expect("peeked");
            let report = full_report(&snapshot).expect("non-empty");
            println!(
                "{:>6}  {:>6}  {:>9.5}  {:>9.5}  {:>10.5}",
                i,
                truth.species_seen,
                report.u_hat,
                truth.u_true,
                (report.u_hat - truth.u_true).abs()
            );
        }
    }
    println!();

    // The truth table is a pure function of (model, records): recompute
    // it from the records and check it matches what simulate() reported.
    let checkpoints: Vec<u64> = campaign.truth.iter().map(|t| t.n).collect();
    let recomputed =
        recompute_truth(&model, &campaign.records, &checkpoints).expect("valid checkpoints");
    assert_eq!(recomputed, campaign.truth);
    println!("recomputed truth from records alone: bit-identical to the simulator's table.");
}
