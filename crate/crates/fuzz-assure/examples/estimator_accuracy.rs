//! Monte-Carlo accuracy of the estimators against the oracle.
//!
//! `evaluate_estimators` runs many independent replicate campaigns of
//! one model and tabulates estimates next to truth at every checkpoint.
//! This example aggregates those rows into bias and root-mean-square
//! error for the two headline estimators:
//!
//! - Good-Turing residual risk `u_hat` versus true residual risk, and
//! - Chao1 richness `s_hat` versus the true species count.
//!
//! Replicates run in parallel (one RNG stream per replicate), yet the
//! table is bit-identical for a fixed seed whatever the thread count.
//!
//! Run with:
//!
//! ```text
//! cargo run --example estimator_accuracy --release
//! ```

use fuzz_assure::simulator::{build_model, evaluate_estimators, Distribution, EvalRow, Mode};

/// Mean, bias, and RMSE of (estimate - truth) pairs.
fn summarize(rows: &[&EvalRow], pick: impl Fn(&EvalRow) -> (f64, f64)) -> (f64, f64) {
    let errs: Vec<f64> = rows
        .iter()
        .map(|r| {
            let (est, truth) = pick(r);
            est - truth
        })
        .collect();
    let bias = errs.iter().sum::<f64>() / errs.len() as f64;
    let rmse = (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt();
    (bias, rmse)
}

fn main() {
    let model = build_model(1000, Distribution::Uniform, Mode::Abundance).expect("valid model");
    let n = 1000;
    let reps = 100;
    let rows = evaluate_estimators(&model, n, reps, 20260819).expect("valid harness parameters");
    println!(
        "uniform model, S = {}, {} replicates, log-spaced checkpoints up to n = {}",
        model.s_true, reps, n
    );
    println!();
    println!(
        "{:>6}  {:>10} {:>10}  {:>12} {:>12}",
        "n", "risk bias", "risk RMSE", "chao1 bias", "chao1 RMSE"
    );

    let mut checkpoints: Vec<u64> = rows.iter().map(|r| r.n).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();

    for cp in checkpoints {
        let at_cp: Vec<&EvalRow> = rows.iter().filter(|r| r.n == cp).collect();
        let (risk_bias, risk_rmse) = summarize(&at_cp, |r| (r.u_hat, r.u_true));
        let (s_bias, s_rmse) = summarize(&at_cp, |r| (r.s_hat, r.s_true as f64));
        println!(
            "{:>6}  {:>+10.5} {:>10.5}  {:>+12.2} {:>12.2}",
            cp, risk_bias, risk_rmse, s_bias, s_rmse
        );
    }

    println!();
    println!("reading: Good-Turing risk tracks truth within a fraction of a percent");
    println!("once n is past a few hundred; Chao1 needs sampling deep enough to");
    println!("replicate rare species (watch its bias shrink as n approaches S).");
}
