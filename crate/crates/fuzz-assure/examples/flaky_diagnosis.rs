//! Diagnosing flakiness: is a discovery series IID noise or a trend?
//!
//! Repeated executions of a flaky test yield a series of outcomes (or of
//! any numeric proxy: runtimes, coverage counts, retry tallies). If the
//! flakiness is pure nondeterminism, the series is IID and the number of
//! turning points (interior strict local extrema) concentrates around
//! `2(k-2)/3`. Statefulness shows up as too few turning points (drift:
//! each run leaks state into the next) or too many (oscillation: e.g. a
//! resource toggling between exhausted and recovered).
//!
//! The example runs the turning point test on three series: a drifting
//! one, an oscillating one, and genuine IID noise from the crate's own
//! uniform source.
//!
//! Run with:
//!
//! ```text
//! cargo run --example flaky_diagnosis
//! ```

use fuzz_assure::flakiness::turning_point_test;
use fuzz_assure::simulator::uniform_series;

fn diagnose(name: &str, series: &[f64], alpha: f64) {
    match turning_point_test(series) {
        Ok(result) => {
            let verdict = if result.p_value < alpha {
                if result.z < 0.0 {
                    "NOT IID: too few turning points (stateful drift)"
                } else {
                    "NOT IID: too many turning points (oscillation)"
                }
            } else {
                "consistent with IID noise"
            };
            println!("{name}:");
            println!(
                "  t = {} turning points over {} values (collapsed {}), expected {:.2}",
                result.t, result.raw_len, result.collapsed_len, result.expected_t
            );
            println!(
                "  z = {:+.3}, p = {:.3e}{} -> {verdict}",
                result.z,
                result.p_value,
                if result.low_power {
                    " (low power: short series)"
                } else {
                    ""
                },
            );
        }
        Err(err) => println!("{name}: cannot test: {err}"),
    }
    println!();
}

fn main() {
    let alpha = 0.05;

    // Stateful drift: a leaking resource makes each run a little slower.
    let drifting: Vec<f64> = (0..120).map(|i| 100.0 + 0.8 * i as f64).collect();
    diagnose("drifting runtimes", &drifting, alpha);

    // Oscillation: a cache alternating between cold and warm.
    let oscillating: Vec<f64> = (0..120)
        .map(|i| if i % 2 == 0 { 250.0 } else { 40.0 })
        .collect();
    diagnose("alternating runtimes", &oscillating, alpha);

    // Honest nondeterminism: IID noise should pass at level alpha.
    let iid = uniform_series(120, 20260819);
    diagnose("IID noise", &iid, alpha);

    // Degenerate series are reported, not silently scored.
    diagnose("constant series", &[5.0; 50], alpha);
}
