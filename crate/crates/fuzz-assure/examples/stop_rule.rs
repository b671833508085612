//! Stop rules: how much more fuzzing buys a given residual risk.
//!
//! Inverting the risk extrapolation answers the budgeting question
//! directly: for a threshold `theta`, the stop rule returns the smallest
//! number `m*` of additional inputs after which the extrapolated
//! residual risk is at or below `theta`. The answer is verified by
//! forward evaluation, so `risk(m*) <= theta < risk(m* - 1)` holds
//! exactly (whenever `m* >= 1`).
//!
//! The example prints the budget table for one campaign across a ladder
//! of thresholds, from "stop now" to "absurdly strict".
//!
//! Run with:
//!
//! ```text
//! cargo run --example stop_rule
//! ```

use fuzz_assure::estimators::{extrapolate_risk, full_report, stop_rule};
use fuzz_assure::{CampaignSnapshot, IncidenceRecord};

fn main() {
    // A mid-flight campaign: 400 inputs, a tail of unreplicated species.
    let mut snapshot = CampaignSnapshot::new();
    for i in 0..400u32 {
        let mut species = vec![format!("edge:hot{:02}", i % 40)];
        if i % 16 == 0 {
            species.push(format!("edge:cold{i:04}"));
        }
        snapshot.observe(&IncidenceRecord::new(format!("t{i:04}"), species));
    }

    let report = full_report(&snapshot).expect("campaign is non-empty");
    println!(
        "campaign: n = {}, f1 = {}, f0_hat = {:.3}, current risk u_hat = {:.5}",
        report.n, report.f1, report.f0_hat, report.u_hat
    );
    println!();
    println!(
        "{:>10}  {:>12}  {:>14}  verdict",
        "theta", "m_star", "risk(m_star)"
    );

    for theta in [0.1, 0.05, 0.02, 0.01, 0.001, 1e-6] {
        let rule = stop_rule(report.n, report.f1, report.f0_hat, theta).expect("valid threshold");
        let verdict = if rule.m_star == 0 {
            "already below threshold: stop now"
        } else if rule.capped {
            "unreachable within a u64 horizon"
        } else {
            "keep fuzzing this much longer"
        };
        println!(
            "{:>10}  {:>12}  {:>14.3e}  {}",
            theta, rule.m_star, rule.risk_at_m_star, verdict
        );

        // The minimality guarantee, shown once for a non-trivial row.
        if rule.m_star >= 1 && !rule.capped && theta == 0.01 {
            let just_before = extrapolate_risk(report.n, report.f1, report.f0_hat, rule.m_star - 1)
                .expect("valid inputs");
            println!(
                "{:>10}  {:>12}  {:>14.3e}  (one input fewer is not enough)",
                "",
                rule.m_star - 1,
                just_before
            );
        }
    }
}
