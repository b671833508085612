//! Statistical assurance for fuzzing campaigns.
//!
//! A fuzzing campaign watches which test inputs exhibit which *species* of
//! program behavior: branches covered, mutants killed, crash signatures, or
//! any mix of those. This crate turns the resulting incidence data into the
//! numbers an assessor actually needs:
//!
//! - **Residual risk** `u_hat`: the probability that the *next* input
//!   exhibits a species never seen before (singleton frequency ratio).
//! - **Asymptotic richness** `s_hat` and the **unseen count** `f0_hat`:
//!   how many species exist in total, estimated from singleton/doubleton
//!   counts.
//! - **Feasible coverage** `g_hat = s_obs / s_hat`: how much of what is
//!   discoverable has been discovered.
//! - **Extrapolation curves**: predicted species count and residual risk
//!   after `m_star` additional inputs, and the inverse **stop rule**: how
//!   many more inputs until risk drops below a threshold.
//! - **Flakiness diagnosis**: a turning point test on any observation
//!   series, gating the IID assumption behind all of the above.
//!
//! Every estimator is validated against a built-in simulator with known
//! ground truth, and uncertainty is quantified by input-level bootstrap
//! resampling.
//!
//! # Quick start
//!
//! ```
//! use fuzz_assure::incidence::CampaignSnapshot;
//! use fuzz_assure::estimators::{full_report, stop_rule};
//!
//! let mut snap = CampaignSnapshot::new();
//! snap.observe_species(["edge:0a", "edge:4f"]);
//! snap.observe_species(["edge:0a"]);
//! snap.observe_species(["edge:91", "edge:4f"]);
//!
//! let report = full_report(&snap).unwrap();
//! assert_eq!(report.n, 3);
//! assert!(report.u_hat > 0.0);
//!
//! let plan = stop_rule(report.n, report.f1, report.f0_hat, 0.05).unwrap();
//! println!("run {} more inputs to push risk below 5%", plan.m_star);
//! ```
//!
//! # Runnable examples
//!
//! The `examples/` directory is the primary tour of the crate; each file is
//! a focused, runnable demonstration of one capability:
//!
//! ```text
//! cargo run --example residual_risk        # snapshot -> full assurance report
//! cargo run --example extrapolation_curve  # predicted species/risk vs. future effort
//! cargo run --example stop_rule            # invert risk thresholds into budgets
//! cargo run --example simulate_oracle      # estimates vs. exact simulator truth
//! cargo run --example estimator_accuracy   # Monte-Carlo bias/RMSE table
//! cargo run --example bootstrap_intervals  # percentile CIs for every estimator
//! cargo run --example flaky_diagnosis      # turning point test on run series
//! cargo run --example ingest_formats       # JSONL, CSV, showmap-dir equivalence
//! cargo run --example parallel_ingest      # shard-and-merge snapshot building
//! ```
//!
//! A thin binary (`fuzz-assure`) wraps the same operations for shell
//! pipelines; see the `cli` module and the repository README.
//!
//! # Modules
//!
//! - [`incidence`]: streaming sufficient statistics (`n`, species counts,
//!   frequency-of-frequencies histogram) with mergeable snapshots.
//! - [`estimators`]: the point estimators, extrapolations, stop rule, and
//!   bootstrap confidence intervals.
//! - [`flakiness`]: turning point test for IID plausibility.
//! - [`simulator`]: ground-truth campaign generator and the Monte-Carlo
//!   estimator evaluation harness.
//! - [`ingest`]: JSONL / CSV / showmap-directory parsers and the canonical
//!   JSONL writer.
//! - [`report`]: audit envelope (tool version, command echo, input digest,
//!   assumption caveats) around JSON results.
//! - [`cli`]: argument parsing and subcommand drivers for the binary.
//!
//! # Determinism
//!
//! All randomized paths (simulation, bootstrap, evaluation replicates) use
//! an explicitly pinned ChaCha8 generator with documented stream splitting;
//! identical seeds yield byte-identical outputs. The `FUZZ_ASSURE_SEED`
//! environment variable supplies a default seed to the CLI.

pub mod cli;
pub mod estimators;
pub mod flakiness;
pub mod incidence;
pub mod ingest;
pub mod report;
pub mod simulator;

mod special;

pub use estimators::{AssuranceReport, ExtrapolationCurve};
pub use incidence::{CampaignSnapshot, IncidenceRecord};
