//! Audit-ready report envelopes.
//!
//! Every JSON report this crate emits is wrapped in a [`ReportEnvelope`]
//! carrying, besides the results themselves:
//!
//! - the tool name and version,
//! - an echo of the command line that produced the report,
//! - a content digest of the input (`sha256:<hex>`), so a report can be
//!   tied to the exact campaign bytes it was computed from,
//! - an [`Assumptions`] block that is always present.
//!
//! The assumptions block exists because the numbers are conditional in
//! three ways that are easy to forget and dangerous to drop:
//!
//! 1. **IID sampling**: the estimators assume inputs are drawn
//!    independently from a fixed generator. Feedback-driven fuzzers adapt
//!    their generator to past observations, which turns the guarantees
//!    into heuristics. The flag records which situation the user declared.
//! 2. **Oracle scope**: a campaign can only witness behaviors its oracles
//!    recognize. Residual risk is risk of *detectable* surprise, nothing
//!    more.
//! 3. **Search space**: species outside what the generator can produce
//!    contribute nothing to any statistic here; completeness claims stop
//!    at the generator's reach.
//!
//! Envelopes contain no timestamps, host names, or other ambient state:
//! the same command on the same input produces byte-identical reports.

use std::io;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::estimators::{AssuranceReport, StopRule};
use crate::flakiness::TurningPointResult;
use crate::simulator::{Distribution, Mode};

/// Identity of the emitting tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToolInfo {
    /// Crate name.
    pub name: &'static str,
    /// Crate version.
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// The IID caveat: a flag plus prose, because it is the one assumption
/// the user can actually declare false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IidCaveat {
    /// True when the campaign is declared to draw inputs independently
    /// from a fixed generator.
    pub assumed: bool,
    /// What the flag means for interpretation.
    pub note: String,
}

/// A fixed scope caveat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScopeCaveat {
    /// What the estimates are conditional on.
    pub note: String,
}

/// The three caveats every report carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assumptions {
    /// Independence of input draws.
    pub iid_sampling: IidCaveat,
    /// Estimates cover only oracle-recognizable behaviors.
    pub oracle_scope: ScopeCaveat,
    /// Estimates cover only the generator's reachable inputs.
    pub search_space: ScopeCaveat,
}

impl Assumptions {
    /// Builds the standard assumptions block. `iid_assumed = false`
    /// records that the campaign was feedback-driven.
    pub fn new(iid_assumed: bool) -> Self {
        let iid_note = if iid_assumed {
            "estimates assume inputs are drawn independently from a fixed generator"
        } else {
            "campaign declared feedback-driven; adaptive input generation violates the \
             independence assumption, so treat estimates as heuristics, not guarantees"
        };
        Self {
            iid_sampling: IidCaveat {
                assumed: iid_assumed,
                note: iid_note.to_string(),
            },
            oracle_scope: ScopeCaveat {
                note: "assurances cover only behaviors the campaign's oracles can recognize; \
                       failures invisible to every oracle are outside every estimate here"
                    .to_string(),
            },
            search_space: ScopeCaveat {
                note: "assurances cover only inputs the generator can produce; species beyond \
                       the search space contribute nothing to these statistics"
                    .to_string(),
            },
        }
    }
}

/// Analysis results: the full report plus ingestion tallies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisResults {
    /// Point estimates.
    #[serde(flatten)]
    pub report: AssuranceReport,
    /// Malformed records tolerated during ingestion.
    pub records_skipped: u64,
    /// Duplicate pairs collapsed during ingestion.
    pub duplicate_pairs: u64,
}

/// Stop-rule results: the verdict plus the statistics it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopRuleResults {
    /// Inputs observed.
    pub n: u64,
    /// Singleton count.
    pub f1: u64,
    /// Undiscovered-species estimate used.
    pub f0_hat: f64,
    /// Current residual risk estimate.
    pub u_hat: f64,
    /// Risk threshold requested.
    pub theta: f64,
    /// The verdict.
    #[serde(flatten)]
    pub rule: StopRule,
}

/// Turning-point results: the statistic plus the decision at a level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPointResults {
    /// The test outcome.
    #[serde(flatten)]
    pub result: TurningPointResult,
    /// Significance level the decision used.
    pub alpha: f64,
    /// True when `p_value < alpha`: the IID hypothesis is rejected.
    pub iid_rejected: bool,
}

/// Simulation summary: where the files went and what the truth was.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResults {
    /// Path the JSONL campaign was written to.
    pub records_path: String,
    /// Path the truth sidecar was written to.
    pub truth_path: String,
    /// Inputs simulated.
    pub n: u64,
    /// True species count of the model.
    pub s_true: u64,
    /// Sampling mode.
    pub mode: Mode,
    /// Abundance shape.
    pub descriptor: Distribution,
    /// Seed used.
    pub seed: u64,
    /// Species discovered by the end of the campaign.
    pub species_seen: u64,
    /// True residual risk at the end of the campaign.
    pub u_true_final: f64,
}

/// Results payload, discriminated by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultsPayload {
    /// Full campaign analysis.
    Analysis(AnalysisResults),
    /// Stop-rule verdict.
    StopRule(StopRuleResults),
    /// Flakiness diagnosis.
    TurningPoint(TurningPointResults),
    /// Simulation summary.
    Simulation(SimulationResults),
}

/// The envelope around every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEnvelope {
    /// Emitting tool.
    pub tool: ToolInfo,
    /// Echo of the command line (arguments after the binary name).
    pub command: String,
    /// Content digest of the input campaign, when there was one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    /// The caveats, always present.
    pub assumptions: Assumptions,
    /// Command-specific results.
    pub results: ResultsPayload,
}

impl ReportEnvelope {
    /// Wraps results with the standard envelope fields.
    pub fn new(
        command: String,
        input_digest: Option<String>,
        iid_assumed: bool,
        results: ResultsPayload,
    ) -> Self {
        Self {
            tool: ToolInfo::default(),
            command,
            input_digest,
            assumptions: Assumptions::new(iid_assumed),
            results,
        }
    }

    /// Renders the envelope as pretty JSON with a trailing newline.
    /// Field order is fixed by the struct definitions, so output is
    /// byte-deterministic.
    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes infallibly");
        s.push('\n');
        s
    }
}

/// Content digest of a file, or of a directory as the lexicographic
/// sequence of (file name, file bytes) pairs: `sha256:<hex>`.
///
/// # Errors
/// Propagates filesystem failures.
pub fn digest_path(path: &Path) -> io::Result<String> {
    let mut hasher = Sha256::new();
    if path.is_dir() {
        let mut files = Vec::new();
        for entry in std::fs::read_dir(path)? {
            let p = entry?.path();
            if p.is_file() {
                files.push(p);
            }
        }
        files.sort_by_key(|p| p.file_name().map(|n| n.to_os_string()));
        for file in files {
            let name = file
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
            hasher.update(std::fs::read(&file)?);
            hasher.update([0u8]);
        }
    } else {
        hasher.update(std::fs::read(path)?);
    }
    Ok(format!("sha256:{}", to_hex(&hasher.finalize())))
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    /// Classic SHA-256 vectors: empty input and "abc".
    #[test]
    fn file_digest_matches_known_vectors() {
        let tmp = tempfile::tempdir().unwrap();
        let empty = tmp.path().join("empty");
        std::fs::write(&empty, b"").unwrap();
        assert_eq!(
            digest_path(&empty).unwrap(),
            "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        let abc = tmp.path().join("abc");
        std::fs::write(&abc, b"abc").unwrap();
        assert_eq!(
            digest_path(&abc).unwrap(),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn directory_digest_covers_names_and_contents() {
        let tmp = tempfile::tempdir().unwrap();
        let d1 = tmp.path().join("d1");
        let d2 = tmp.path().join("d2");
        let d3 = tmp.path().join("d3");
        for d in [&d1, &d2, &d3] {
            std::fs::create_dir(d).unwrap();
        }
        std::fs::write(d1.join("a"), b"x").unwrap();
        std::fs::write(d2.join("a"), b"x").unwrap();
        std::fs::write(d3.join("b"), b"x").unwrap();
        // Same file set: same digest.
        assert_eq!(digest_path(&d1).unwrap(), digest_path(&d2).unwrap());
        // Same bytes under another name: different digest.
        assert_ne!(digest_path(&d1).unwrap(), digest_path(&d3).unwrap());
        // Content change: different digest.
        std::fs::write(d2.join("a"), b"y").unwrap();
        assert_ne!(digest_path(&d1).unwrap(), digest_path(&d2).unwrap());
    }

    #[test]
    fn directory_digest_is_insensitive_to_creation_order() {
        let tmp = tempfile::tempdir().unwrap();
        let d1 = tmp.path().join("d1");
        let d2 = tmp.path().join("d2");
        std::fs::create_dir(&d1).unwrap();
        std::fs::create_dir(&d2).unwrap();
        std::fs::write(d1.join("a"), b"1").unwrap();
        std::fs::write(d1.join("b"), b"2").unwrap();
        std::fs::write(d2.join("b"), b"2").unwrap();
        std::fs::write(d2.join("a"), b"1").unwrap();
        assert_eq!(digest_path(&d1).unwrap(), digest_path(&d2).unwrap());
    }

    fn sample_envelope(iid: bool) -> ReportEnvelope {
        let report = AssuranceReport {
            n: 100,
            s_obs: 50,
            f1: 10,
            f2: 5,
            u_hat: 0.1,
            f0_hat: 10.0,
            s_hat: 60.0,
            g_hat: 50.0 / 60.0,
        };
        ReportEnvelope::new(
            "analyze campaign.jsonl".to_string(),
            Some("sha256:deadbeef".to_string()),
            iid,
            ResultsPayload::Analysis(AnalysisResults {
                report,
                records_skipped: 0,
                duplicate_pairs: 0,
            }),
        )
    }

    #[test]
    fn envelope_always_carries_the_three_caveats() {
        let v: Value = serde_json::from_str(&sample_envelope(true).to_json_pretty()).unwrap();
        assert_eq!(
            v["assumptions"]["iid_sampling"]["assumed"],
            Value::Bool(true)
        );
        assert!(v["assumptions"]["iid_sampling"]["note"].is_string());
        assert!(v["assumptions"]["oracle_scope"]["note"].is_string());
        assert!(v["assumptions"]["search_space"]["note"].is_string());
        let v: Value = serde_json::from_str(&sample_envelope(false).to_json_pretty()).unwrap();
        assert_eq!(
            v["assumptions"]["iid_sampling"]["assumed"],
            Value::Bool(false)
        );
        assert!(v["assumptions"]["iid_sampling"]["note"]
            .as_str()
            .unwrap()
            .contains("heuristics"));
    }

    #[test]
    fn envelope_results_are_kind_discriminated_and_flattened() {
        let v: Value = serde_json::from_str(&sample_envelope(true).to_json_pretty()).unwrap();
        assert_eq!(v["results"]["kind"], Value::String("analysis".to_string()));
        assert_eq!(v["results"]["u_hat"], Value::from(0.1));
        assert_eq!(v["results"]["n"], Value::from(100));
        assert_eq!(v["tool"]["name"], Value::String("fuzz-assure".to_string()));
        assert!(!v["tool"]["version"].as_str().unwrap().is_empty());
    }

    #[test]
    fn payload_kinds_serialize_to_snake_case_tags() {
        let stop = ResultsPayload::StopRule(StopRuleResults {
            n: 100,
            f1: 10,
            f0_hat: 10.0,
            u_hat: 0.1,
            theta: 0.01,
            rule: StopRule {
                m_star: 231,
                risk_at_m_star: 0.0099,
                capped: false,
            },
        });
        let v: Value = serde_json::to_value(&stop).unwrap();
        assert_eq!(v["kind"], "stop_rule");
        assert_eq!(v["m_star"], 231);

        let tp = ResultsPayload::TurningPoint(TurningPointResults {
            result: crate::flakiness::turning_point_test(&[1.0, 3.0, 2.0, 4.0]).unwrap(),
            alpha: 0.05,
            iid_rejected: false,
        });
        let v: Value = serde_json::to_value(&tp).unwrap();
        assert_eq!(v["kind"], "turning_point");
        assert!(v["p_value"].is_number());
        assert_eq!(v["alpha"], Value::from(0.05));
    }

    #[test]
    fn rendering_is_byte_deterministic() {
        let a = sample_envelope(true).to_json_pretty();
        let b = sample_envelope(true).to_json_pretty();
        assert_eq!(a, b);
        assert!(a.ends_with('\n'));
    }
}
