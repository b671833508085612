//! Percentile-bootstrap uncertainty bands for the point estimators.
//!
//! A point estimate without a width invites overconfidence. The
//! bootstrap resamples the campaign's *inputs* with replacement,
//! re-accumulates a snapshot per resample, re-estimates, and reports the
//! central percentile interval of the resampled estimates.
//!
//! The example simulates one campaign with known truth, then prints the
//! 95% interval for each named estimator next to the true value the
//! simulator knows. Intervals are deterministic for a fixed seed.
//!
//! A caution worth keeping: resampling inputs cannot manufacture unseen
//! species, so bootstrap intervals for frequency-of-frequencies
//! statistics are approximate at best. Richness intervals sit low (a
//! resample can only lose species, never find new ones) and may even
//! exclude the point estimate itself. Treat them as honest widths, not
//! exact coverage guarantees.
//!
//! Run with:
//!
//! ```text
//! cargo run --example bootstrap_intervals --release
//! ```

use fuzz_assure::estimators::{bootstrap_ci, EstimatorKind};
use fuzz_assure::simulator::{build_model, simulate, Distribution, Mode};

fn main() {
    let model = build_model(300, Distribution::Uniform, Mode::Abundance).expect("valid model");
    let campaign = simulate(&model, 800, 7).expect("n >= 1");
    let final_truth = campaign.truth.last().expect("truth grid ends at n");

    let true_unseen = model.s_true - final_truth.species_seen;
    println!(
        "campaign: n = {}, species seen = {} of {}, true residual risk = {:.4}",
        campaign.n, final_truth.species_seen, model.s_true, final_truth.u_true
    );
    println!();
    println!(
        "{:<18}  {:>10}  {:>22}  {:>10}",
        "estimator", "point", "95% interval", "truth"
    );

    let targets = [
        (EstimatorKind::GoodTuring, final_truth.u_true),
        (EstimatorKind::UnseenCount, true_unseen as f64),
        (EstimatorKind::Chao1Richness, model.s_true as f64),
        (
            EstimatorKind::FeasibleCoverage,
            final_truth.species_seen as f64 / model.s_true as f64,
        ),
    ];
    for (kind, truth) in targets {
        let ci = bootstrap_ci(&campaign.records, kind, 500, 0.95, 99)
            .expect("valid bootstrap parameters");
        println!(
            "{:<18}  {:>10.4}  [{:>9.4}, {:>9.4}]  {:>10.4}",
            format!("{kind:?}"),
            ci.point,
            ci.lower,
            ci.upper,
            truth
        );
    }
}
