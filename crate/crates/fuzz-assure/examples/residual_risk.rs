//! Residual risk from a finished campaign.
//!
//! The probability that the *next* input would exhibit a behavior the
//! campaign has never seen is estimated by the Good-Turing statistic
//! `f1 / n`: the fraction of inputs whose discoveries were never
//! replicated. Species seen exactly once are the shadow of species seen
//! zero times.
//!
//! This example accumulates a small campaign record by record, prints
//! the frequency-of-frequencies histogram that drives every estimator in
//! the crate, and then reads off the full assurance report.
//!
//! Run with:
//!
//! ```text
//! cargo run --example residual_risk
//! ```

use fuzz_assure::estimators::full_report;
use fuzz_assure::{CampaignSnapshot, IncidenceRecord};

fn main() {
    // Twelve fuzzer inputs. Species ids follow the namespace convention:
    // edge coverage ("edge:"), killed mutants ("mutant:"), and crash
    // signatures ("crash:") coexist in one campaign.
    let campaign = [
        IncidenceRecord::new("t0001", ["edge:0001", "edge:0002"]),
        IncidenceRecord::new("t0002", ["edge:0001"]),
        IncidenceRecord::new("t0003", ["edge:0001", "edge:0003"]),
        IncidenceRecord::new("t0004", ["edge:0002", "mutant:m17"]),
        IncidenceRecord::new("t0005", ["edge:0001"]),
        IncidenceRecord::new("t0006", ["edge:0004"]),
        IncidenceRecord::new("t0007", ["edge:0001", "edge:0003"]),
        IncidenceRecord::new("t0008", ["crash:SIGSEGV_0x41"]),
        IncidenceRecord::new("t0009", ["edge:0002"]),
        IncidenceRecord::new("t0010", Vec::<String>::new()), // found nothing new
        IncidenceRecord::new("t0011", ["edge:0005", "edge:0001"]),
        IncidenceRecord::new("t0012", ["edge:0002"]),
    ];

    let mut snapshot = CampaignSnapshot::new();
    for record in &campaign {
        snapshot.observe(record);
    }

    println!(
        "campaign: n = {} inputs, {} species observed",
        snapshot.n(),
        snapshot.s_obs()
    );
    println!();
    println!("frequency of frequencies (f_k = species seen in exactly k inputs):");
    for (k, f_k) in snapshot.freq_histogram() {
        println!("  f_{k} = {f_k}");
    }
    println!();

    let report = full_report(&snapshot).expect("campaign is non-empty");
    println!("assurance report:");
    println!(
        "  residual risk  u_hat  = {:.4}   (f1/n = {}/{})",
        report.u_hat, report.f1, report.n
    );
    println!("  unseen species f0_hat = {:.4}", report.f0_hat);
    println!(
        "  richness       s_hat  = {:.4}   (observed {})",
        report.s_hat, report.s_obs
    );
    println!(
        "  coverage       g_hat  = {:.4}   (share of discoverable species found)",
        report.g_hat
    );
    println!();
    println!(
        "reading: roughly {:.0}% odds that one more input would show a brand-new behavior;",
        100.0 * report.u_hat
    );
    println!(
        "the campaign has found about {:.0}% of what this fuzzer setup can ever find.",
        100.0 * report.g_hat
    );
}
