//! Simulation oracle: campaigns drawn from known ground truth.
//!
//! Every estimator in this crate makes a claim about quantities nobody
//! can observe in a real campaign (undiscovered species, residual risk).
//! The simulator makes those quantities exactly computable: it draws
//! synthetic campaigns from a fully specified species model, records the
//! true values alongside, and lets the validation suite measure estimator
//! error instead of asserting folklore.
//!
//! A [`GroundTruthModel`] is `s_true` species with an explicit
//! probability vector, sampled in one of two modes:
//!
//! - [`Mode::Abundance`]: each input exhibits exactly one species, drawn
//!   categorically. The classical species-sampling regime; the true
//!   residual risk after observing a set `O` is `sum of p_i for i not in O`.
//! - [`Mode::Incidence`]: each input triggers each species independently
//!   with its own probability, so inputs exhibit zero or more species.
//!   The true residual risk is `1 - product of (1 - p_i) for i not in O`.
//!
//! Four descriptor families cover the abundance shapes that matter for
//! fuzzing: near-uniform (block coverage of a flat parser), Zipf
//! (path frequencies are famously heavy-tailed), geometric (per-edge
//! reachability decays with depth), and endemic (a well-exercised core
//! plus a thin archipelago of hard-to-reach species).
//!
//! Determinism contract: a campaign is a pure function of
//! `(model, n, seed)`. Replicate `r` of an evaluation uses ChaCha8 stream
//! `r` of the same seed, so replicate 0 is bit-identical to a plain
//! [`simulate`] call. Each input consumes a fixed number of draws (one in
//! abundance mode, `s_true` in incidence mode), which makes simulations
//! prefix-stable: the first `n` records of a longer run equal the records
//! of a shorter run with the same seed. [`compare_extrapolation`] relies
//! on exactly this to score predictions against a genuine continuation of
//! the same campaign.
//!
//! True-risk values are accumulated in species-index order, so
//! [`recompute_truth`] reproduces emitted truth bit-for-bit from the
//! records alone.

use std::collections::{BTreeSet, HashMap};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::estimators::{extrapolate_risk, extrapolate_species, full_report};
use crate::incidence::{CampaignSnapshot, IncidenceRecord};

/// Abundance shape of the ground-truth species pool.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Distribution {
    /// All species equally likely.
    Uniform,
    /// `p_i` proportional to `i^-alpha` for `i = 1..=s_true`; `alpha = 0`
    /// degenerates to uniform.
    Zipf { alpha: f64 },
    /// `p_i` proportional to `ratio^i` for `i = 1..=s_true`.
    Geometric { ratio: f64 },
    /// A core of `s_true - island_count` species sharing `core_mass`
    /// uniformly, plus `island_count` rare species sharing the rest.
    Endemic { core_mass: f64, island_count: u64 },
}

/// How inputs map to species observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One categorical draw per input: exactly one species each.
    Abundance,
    /// One Bernoulli draw per species per input: zero or more species.
    Incidence,
}

/// Invalid model or simulation parameters.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// At least one species is required.
    #[error("species count must be at least 1")]
    InvalidSpeciesCount,
    /// Zipf exponent must be finite and non-negative.
    #[error("invalid zipf exponent alpha={alpha}; must be finite and >= 0")]
    InvalidZipfExponent { alpha: f64 },
    /// Geometric ratio must lie strictly between 0 and 1.
    #[error("invalid geometric ratio {ratio}; must satisfy 0 < ratio < 1")]
    InvalidGeometricRatio { ratio: f64 },
    /// Endemic parameters out of range.
    #[error(
        "invalid endemic parameters: core_mass={core_mass}, island_count={island_count}, s_true={s_true}"
    )]
    InvalidEndemicParams {
        core_mass: f64,
        island_count: u64,
        s_true: u64,
    },
    /// Simulation budget must be at least 1 input.
    #[error("simulation budget must be at least 1 input")]
    InvalidBudget,
    /// At least one replicate is required.
    #[error("replicate count must be at least 1")]
    InvalidReplicates,
    /// Checkpoints must be non-empty, strictly increasing, and within
    /// `1..=n`.
    #[error("invalid checkpoints: must be non-empty, strictly increasing, and within 1..=n")]
    InvalidCheckpoints,
}

/// Fully specified species pool to sample campaigns from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruthModel {
    /// True number of species.
    pub s_true: u64,
    /// Sampling mode.
    pub mode: Mode,
    /// Abundance shape the probabilities were built from.
    pub descriptor: Distribution,
    /// Normalized species probabilities in index order; serialized so a
    /// truth sidecar is self-contained.
    probabilities: Vec<f64>,
}

/// True discovery state at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruthPoint {
    /// Inputs processed so far.
    pub n: u64,
    /// Distinct species observed so far.
    pub species_seen: u64,
    /// True residual risk given the species observed so far.
    pub u_true: f64,
}

/// One simulated campaign with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulatedCampaign {
    /// Seed the campaign was drawn from.
    pub seed: u64,
    /// Total inputs simulated.
    pub n: u64,
    /// Per-input incidence records, in simulation order.
    pub records: Vec<IncidenceRecord>,
    /// Ground truth at each requested checkpoint.
    pub truth: Vec<TruthPoint>,
}

/// Estimates next to truth at one checkpoint of one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalRow {
    /// Replicate index (equals the ChaCha8 stream used).
    pub replicate: u64,
    /// Checkpoint budget.
    pub n: u64,
    /// Observed species at the checkpoint.
    pub s_obs: u64,
    /// Singleton count.
    pub f1: u64,
    /// Doubleton count.
    pub f2: u64,
    /// Estimated residual risk.
    pub u_hat: f64,
    /// True residual risk.
    pub u_true: f64,
    /// Estimated asymptotic richness.
    pub s_hat: f64,
    /// True richness.
    pub s_true: u64,
    /// Estimated feasible coverage.
    pub g_hat: f64,
    /// True coverage `s_obs / s_true`.
    pub g_true: f64,
}

/// Prediction scored against the realized continuation of the same
/// campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtrapolationComparison {
    /// Replicate index.
    pub replicate: u64,
    /// Budget the prediction was made at.
    pub n: u64,
    /// Horizon that was predicted.
    pub m_star: u64,
    /// Species observed at budget `n`.
    pub s_obs_at_n: u64,
    /// Predicted cumulative species at `n + m_star`.
    pub s_pred: f64,
    /// Species actually observed at `n + m_star`.
    pub s_realized: u64,
    /// Predicted residual risk at `n + m_star`.
    pub u_pred: f64,
    /// True residual risk at `n + m_star`.
    pub u_true_at_horizon: f64,
}

/// Builds a normalized ground-truth model.
///
/// # Errors
/// One of the [`ModelError`] parameter variants.
pub fn build_model(
    s_true: u64,
    descriptor: Distribution,
    mode: Mode,
) -> Result<GroundTruthModel, ModelError> {
    if s_true == 0 {
        return Err(ModelError::InvalidSpeciesCount);
    }
    let s = s_true as usize;
    let weights: Vec<f64> = match descriptor {
        Distribution::Uniform => vec![1.0; s],
        Distribution::Zipf { alpha } => {
            if !alpha.is_finite() || alpha < 0.0 {
                return Err(ModelError::InvalidZipfExponent { alpha });
            }
            (1..=s).map(|i| (i as f64).powf(-alpha)).collect()
        }
        Distribution::Geometric { ratio } => {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(ModelError::InvalidGeometricRatio { ratio });
            }
            (1..=s).map(|i| ratio.powi(i as i32)).collect()
        }
        Distribution::Endemic {
            core_mass,
            island_count,
        } => {
            if !(core_mass > 0.0 && core_mass < 1.0) || island_count == 0 || island_count >= s_true
            {
                return Err(ModelError::InvalidEndemicParams {
                    core_mass,
                    island_count,
                    s_true,
                });
            }
            let core = (s_true - island_count) as f64;
            let island_p = (1.0 - core_mass) / island_count as f64;
            let core_p = core_mass / core;
            (0..s)
                .map(|i| {
                    if (i as u64) < s_true - island_count {
                        core_p
                    } else {
                        island_p
                    }
                })
                .collect()
        }
    };
    let total: f64 = weights.iter().sum();
    let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
    debug_assert!((probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    Ok(GroundTruthModel {
        s_true,
        mode,
        descriptor,
        probabilities,
    })
}

impl GroundTruthModel {
    /// Normalized species probabilities in index order.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Stable species identifier for model index `i`.
    pub fn species_id(i: usize) -> String {
        format!("sp{i:06}")
    }
}

/// Default validation grid: twenty log-spaced checkpoints
/// `round(n^(j/20))`, deduplicated, ending exactly at `n`.
pub fn default_checkpoints(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let ln_n = (n as f64).ln();
    let mut cps: Vec<u64> = (1..=20u32)
        .map(|j| (ln_n * f64::from(j) / 20.0).exp().round() as u64)
        .map(|c| c.clamp(1, n))
        .collect();
    *cps.last_mut().expect("twenty points") = n;
    cps.dedup();
    cps
}

/// Uniform unit interval draw: 53 random bits mapped to [0, 1).
///
/// Spelled out rather than delegated so the draw stream is pinned by this
/// crate, not by a dependency's implementation detail.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (rng.next_u64() >> 11) as f64 * SCALE
}

/// Reference uniform series for turning-point calibration and examples:
/// `len` IID draws from the simulator's random source.
pub fn uniform_series(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| unit(&mut rng)).collect()
}

fn validate_checkpoints(n: u64, checkpoints: &[u64]) -> Result<(), ModelError> {
    let increasing = checkpoints.windows(2).all(|w| w[0] < w[1]);
    let in_range = checkpoints.iter().all(|&c| c >= 1 && c <= n);
    if checkpoints.is_empty() || !increasing || !in_range {
        return Err(ModelError::InvalidCheckpoints);
    }
    Ok(())
}

/// True residual risk given the seen-species mask, accumulated in index
/// order so recomputation is bit-exact.
fn true_risk(model: &GroundTruthModel, seen: &[bool]) -> f64 {
    match model.mode {
        Mode::Abundance => model
            .probabilities
            .iter()
            .zip(seen)
            .filter(|&(_, &s)| !s)
            .map(|(p, _)| p)
            .sum(),
        Mode::Incidence => {
            let miss: f64 = model
                .probabilities
                .iter()
                .zip(seen)
                .filter(|&(_, &s)| !s)
                .map(|(p, _)| 1.0 - p)
                .product();
            1.0 - miss
        }
    }
}

fn simulate_stream(
    model: &GroundTruthModel,
    n: u64,
    seed: u64,
    stream: u64,
    checkpoints: &[u64],
) -> SimulatedCampaign {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let s = model.probabilities.len();
    let cumulative: Vec<f64> = model
        .probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let mut seen = vec![false; s];
    let mut seen_count = 0u64;
    let mut records = Vec::with_capacity(usize::try_from(n).unwrap_or(0));
    let mut truth = Vec::with_capacity(checkpoints.len());
    let mut next_cp = 0usize;
    for i in 1..=n {
        let mut species = BTreeSet::new();
        match model.mode {
            Mode::Abundance => {
                let u = unit(&mut rng);
                let idx = cumulative.partition_point(|&c| c <= u).min(s - 1);
                species.insert(GroundTruthModel::species_id(idx));
                if !seen[idx] {
                    seen[idx] = true;
                    seen_count += 1;
                }
            }
            Mode::Incidence => {
                // One draw per species, unconditionally, to keep the draw
                // count per input fixed (prefix stability).
                for (idx, &p) in model.probabilities.iter().enumerate() {
                    if unit(&mut rng) < p {
                        species.insert(GroundTruthModel::species_id(idx));
                        if !seen[idx] {
                            seen[idx] = true;
                            seen_count += 1;
                        }
                    }
                }
            }
        }
        records.push(IncidenceRecord {
            id: format!("t{i:08}"),
            species,
            order: Some(i),
        });
        while next_cp < checkpoints.len() && checkpoints[next_cp] == i {
            truth.push(TruthPoint {
                n: i,
                species_seen: seen_count,
                u_true: true_risk(model, &seen),
            });
            next_cp += 1;
        }
    }
    SimulatedCampaign {
        seed,
        n,
        records,
        truth,
    }
}

/// Simulates one campaign with the default checkpoint grid.
///
/// # Errors
/// [`ModelError::InvalidBudget`] when `n = 0`.
pub fn simulate(
    model: &GroundTruthModel,
    n: u64,
    seed: u64,
) -> Result<SimulatedCampaign, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidBudget);
    }
    simulate_with_checkpoints(model, n, seed, &default_checkpoints(n))
}

/// Simulates one campaign with caller-chosen truth checkpoints.
///
/// # Errors
/// [`ModelError::InvalidBudget`] when `n = 0`;
/// [`ModelError::InvalidCheckpoints`] for an empty, unsorted, or
/// out-of-range grid.
pub fn simulate_with_checkpoints(
    model: &GroundTruthModel,
    n: u64,
    seed: u64,
    checkpoints: &[u64],
) -> Result<SimulatedCampaign, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidBudget);
    }
    validate_checkpoints(n, checkpoints)?;
    Ok(simulate_stream(model, n, seed, 0, checkpoints))
}

/// Recomputes ground truth from emitted records alone.
///
/// Matches the truth a [`simulate`] call emitted bit-for-bit: species ids
/// are mapped back to model indices and accumulation order is identical.
/// Species ids that do not belong to the model are ignored.
///
/// # Errors
/// [`ModelError::InvalidCheckpoints`] as in [`simulate_with_checkpoints`]
/// (with `n` the record count).
pub fn recompute_truth(
    model: &GroundTruthModel,
    records: &[IncidenceRecord],
    checkpoints: &[u64],
) -> Result<Vec<TruthPoint>, ModelError> {
    validate_checkpoints(records.len() as u64, checkpoints)?;
    let index_of: HashMap<String, usize> = (0..model.probabilities.len())
        .map(|i| (GroundTruthModel::species_id(i), i))
        .collect();
    let mut seen = vec![false; model.probabilities.len()];
    let mut seen_count = 0u64;
    let mut truth = Vec::with_capacity(checkpoints.len());
    let mut next_cp = 0usize;
    for (pos, record) in records.iter().enumerate() {
        let i = pos as u64 + 1;
        for sp in &record.species {
            if let Some(&idx) = index_of.get(sp) {
                if !seen[idx] {
                    seen[idx] = true;
                    seen_count += 1;
                }
            }
        }
        while next_cp < checkpoints.len() && checkpoints[next_cp] == i {
            truth.push(TruthPoint {
                n: i,
                species_seen: seen_count,
                u_true: true_risk(model, &seen),
            });
            next_cp += 1;
        }
    }
    Ok(truth)
}

/// Runs `reps` independent campaigns and tabulates estimates against
/// truth at every default checkpoint.
///
/// Replicate `r` uses ChaCha8 stream `r`; rows appear in (replicate,
/// checkpoint) order and are bit-identical for a fixed seed regardless of
/// thread count.
///
/// # Errors
/// [`ModelError::InvalidBudget`] when `n = 0`;
/// [`ModelError::InvalidReplicates`] when `reps = 0`.
pub fn evaluate_estimators(
    model: &GroundTruthModel,
    n: u64,
    reps: u64,
    seed: u64,
) -> Result<Vec<EvalRow>, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidBudget);
    }
    if reps == 0 {
        return Err(ModelError::InvalidReplicates);
    }
    let checkpoints = default_checkpoints(n);
    let rows: Vec<Vec<EvalRow>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let sim = simulate_stream(model, n, seed, r, &checkpoints);
            let mut snap = CampaignSnapshot::new();
            let mut rows = Vec::with_capacity(checkpoints.len());
            let mut next_cp = 0usize;
            for (pos, record) in sim.records.iter().enumerate() {
                snap.observe(record);
                let i = pos as u64 + 1;
                while next_cp < checkpoints.len() && checkpoints[next_cp] == i {
                    let report = full_report(&snap)
                        .expect("snapshot holds at least one input at a checkpoint");
                    let truth = sim.truth[next_cp];
                    rows.push(EvalRow {
                        replicate: r,
                        n: i,
                        s_obs: report.s_obs,
                        f1: report.f1,
                        f2: report.f2,
                        u_hat: report.u_hat,
                        u_true: truth.u_true,
                        s_hat: report.s_hat,
                        s_true: model.s_true,
                        g_hat: report.g_hat,
                        g_true: report.s_obs as f64 / model.s_true as f64,
                    });
                    next_cp += 1;
                }
            }
            rows
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Predicts at budget `n`, then continues the same campaigns to
/// `n + m_star` and reports predictions next to realizations.
///
/// The continuation is a genuine extension of the prefix (prefix-stable
/// draws), not a fresh campaign, so each row is a paired comparison.
///
/// # Errors
/// [`ModelError::InvalidBudget`] when `n = 0` or `m_star = 0`;
/// [`ModelError::InvalidReplicates`] when `reps = 0`.
pub fn compare_extrapolation(
    model: &GroundTruthModel,
    n: u64,
    m_star: u64,
    reps: u64,
    seed: u64,
) -> Result<Vec<ExtrapolationComparison>, ModelError> {
    if n == 0 || m_star == 0 {
        return Err(ModelError::InvalidBudget);
    }
    if reps == 0 {
        return Err(ModelError::InvalidReplicates);
    }
    let horizon = n + m_star;
    let checkpoints = [n, horizon];
    let rows: Vec<ExtrapolationComparison> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let sim = simulate_stream(model, horizon, seed, r, &checkpoints);
            let mut snap = CampaignSnapshot::new();
            for record in &sim.records[..n as usize] {
                snap.observe(record);
            }
            let report = full_report(&snap).expect("prefix holds n >= 1 inputs");
            let s_pred =
                extrapolate_species(report.s_obs, report.n, report.f1, report.f0_hat, m_star)
                    .expect("report carries valid statistics");
            let u_pred = extrapolate_risk(report.n, report.f1, report.f0_hat, m_star)
                .expect("report carries valid statistics");
            ExtrapolationComparison {
                replicate: r,
                n,
                m_star,
                s_obs_at_n: report.s_obs,
                s_pred,
                s_realized: sim.truth[1].species_seen,
                u_pred,
                u_true_at_horizon: sim.truth[1].u_true,
            }
        })
        .collect();
    Ok(rows)
}
