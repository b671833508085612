//! Joint species/risk extrapolation curve.
//!
//! Given a campaign's `(n, s_obs, f1, f0_hat)`, the crate predicts for
//! any hypothetical budget of `m*` additional inputs:
//!
//! - `s_pred`: how many species the extended campaign would have seen,
//! - `u_pred`: the residual risk remaining after those inputs.
//!
//! Both come from the same survival factor `(1 - x)^m` with
//! `x = f1 / (n * f0_hat + f1)`, so the curve is internally consistent:
//! discovery flattens exactly as fast as risk decays.
//!
//! The output is the same `m_star,s_pred,u_pred` CSV the `extrapolate`
//! subcommand emits, plus a crude terminal plot to make the shape
//! visible.
//!
//! Run with:
//!
//! ```text
//! cargo run --example extrapolation_curve
//! ```

use fuzz_assure::estimators::extrapolation_curve;
use fuzz_assure::{CampaignSnapshot, IncidenceRecord};

/// A campaign with plenty of singletons: discovery is far from done.
fn build_snapshot() -> CampaignSnapshot {
    let mut snapshot = CampaignSnapshot::new();
    for i in 0..100u32 {
        // Five heavily-replicated species plus a drizzle of rare ones.
        let mut species = vec![format!("edge:common{:01}", i % 5)];
        if i % 10 == 0 {
            species.push(format!("edge:rare{i:04}"));
        }
        if i % 25 == 0 {
            species.push(format!("edge:veryrare{i:04}"));
        }
        snapshot.observe(&IncidenceRecord::new(format!("t{i:04}"), species));
    }
    snapshot
}

fn main() {
    let snapshot = build_snapshot();
    let curve = extrapolation_curve(&snapshot, 2000, 12).expect("valid grid");
    let base = curve.base;

    println!(
        "base campaign: n = {}, s_obs = {}, f1 = {}, f0_hat = {:.3}, u_hat = {:.4}",
        base.n, base.s_obs, base.f1, base.f0_hat, base.u_hat
    );
    println!();
    println!("m_star,s_pred,u_pred");
    for p in &curve.points {
        println!("{},{},{}", p.m_star, p.s_pred, p.u_pred);
    }
    println!();

    // Terminal sketch: risk decay on a log-spaced grid.
    println!("residual risk vs extra inputs:");
    let u_max = curve.points.first().map(|p| p.u_pred).unwrap_or(0.0);
    for p in &curve.points {
        let bar = if u_max > 0.0 {
            ((p.u_pred / u_max) * 50.0).round() as usize
        } else {
            0
        };
        println!(
            "  m*={:>5}  {:>8.5}  {}",
            p.m_star,
            p.u_pred,
            "#".repeat(bar)
        );
    }
    println!();
    println!(
        "the curve flattens toward s_obs + f0_hat = {:.3}: the feasible-species ceiling.",
        base.s_obs as f64 + base.f0_hat
    );
}
