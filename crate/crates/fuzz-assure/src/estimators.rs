//! Point estimators, extrapolations, stop rule, and bootstrap intervals.
//!
//! All operations are pure functions of the campaign's sufficient
//! statistics `(n, s_obs, f1, f2)`:
//!
//! - **Residual risk** (Good-Turing): `u_hat = f1 / n`, the classical
//!   missing-mass estimate of the probability that the next input exhibits
//!   an unseen species. With error species in scope this upper-bounds the
//!   chance the next input uncovers a new failure mode.
//! - **Asymptotic richness** (Chao1): `s_hat = s_obs + f1^2 / (2 f2)` when
//!   doubletons exist, else the bias-corrected `s_obs + f1 (f1 - 1) / 2`.
//!   `f0_hat = s_hat - s_obs` estimates the undiscovered species count.
//! - **Species extrapolation**: after `m_star` further inputs,
//!   `s_pred = s_obs + f0_hat * (1 - (1 - f1 / (n f0_hat + f1))^m_star)`.
//! - **Risk extrapolation**:
//!   `u_pred = (f1 / n) * (n f0_hat / (n f0_hat + f1))^(m_star + 1)`.
//! - **Feasible coverage**: `g_hat = s_obs / s_hat`.
//! - **Stop rule**: smallest `m_star` with `u_pred <= theta`, found in
//!   closed form and then verified by forward evaluation, so the returned
//!   budget is minimal by construction.
//!
//! Power terms are evaluated as `exp(m * ln_1p(-x))`; horizons of 1e9+
//! inputs are routine in fuzzing and the naive `powf(1 - x, m)` loses the
//! entire signal when `x` is tiny.
//!
//! `f0_hat` is an explicit parameter of every extrapolation so richness
//! sources other than Chao1 (for example a known total mutant count) can
//! be plugged in.
//!
//! Uncertainty is quantified by [`bootstrap_ci`]: percentile intervals
//! from resampling whole inputs with replacement, the exchangeable
//! sampling unit of a campaign.
//!
//! References: I. J. Good, Biometrika 40 (1953); A. Chao, Scand. J.
//! Statist. 11 (1984); Shen, Chao & Lin, Ecology 84 (2003).

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::incidence::{CampaignSnapshot, IncidenceRecord};

/// Largest representable stop-rule budget, `2^63 - 1`.
pub const STOP_RULE_CAP: u64 = (1u64 << 63) - 1;

/// Failure modes of the estimator operations.
#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    /// `n = 0`: the estimate is undefined, not zero.
    #[error("empty campaign: no test inputs observed")]
    EmptyCampaign,
    /// Counts violate `s_obs >= f1 + f2`.
    #[error("inconsistent counts: s_obs={s_obs} but f1={f1}, f2={f2}")]
    InconsistentCounts { s_obs: u64, f1: u64, f2: u64 },
    /// `f0_hat` must be finite and non-negative.
    #[error("invalid unseen-species estimate f0_hat={f0_hat}")]
    InvalidUnseen { f0_hat: f64 },
    /// `s_hat` must be finite and at least `s_obs`.
    #[error("invalid richness estimate s_hat={s_hat} for s_obs={s_obs}")]
    InvalidRichness { s_obs: u64, s_hat: f64 },
    /// Stop-rule threshold outside the open interval (0, 1).
    #[error("invalid risk threshold theta={theta}; must satisfy 0 < theta < 1")]
    InvalidThreshold { theta: f64 },
    /// Extrapolation grid parameters must be at least 1.
    #[error("invalid extrapolation grid: horizon={horizon}, steps={steps}")]
    InvalidGrid { horizon: u64, steps: u64 },
    /// Bootstrap confidence level outside the open interval (0, 1).
    #[error("invalid confidence level {level}; must satisfy 0 < level < 1")]
    InvalidLevel { level: f64 },
    /// Percentile intervals need a minimum number of resamples.
    #[error("too few bootstrap resamples ({reps}); at least 100 required")]
    TooFewResamples { reps: u64 },
    /// Every bootstrap resample left the estimator undefined.
    #[error("estimator undefined on all bootstrap resamples")]
    DegenerateResamples,
}

/// All point estimates of one campaign, inputs echoed for audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssuranceReport {
    /// Inputs processed.
    pub n: u64,
    /// Distinct species observed.
    pub s_obs: u64,
    /// Singleton count.
    pub f1: u64,
    /// Doubleton count.
    pub f2: u64,
    /// Residual risk `f1 / n`, clamped to [0, 1].
    pub u_hat: f64,
    /// Estimated undiscovered species count, `s_hat - s_obs`.
    pub f0_hat: f64,
    /// Estimated asymptotic species richness.
    pub s_hat: f64,
    /// Feasible coverage `s_obs / s_hat` in [0, 1].
    pub g_hat: f64,
}

/// Chao1 richness estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chao1Estimate {
    /// Estimated asymptotic species count, always `>= s_obs`.
    pub s_hat: f64,
    /// Estimated undiscovered species count, always `>= 0`.
    pub f0_hat: f64,
}

/// One point of an extrapolation curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Additional inputs beyond the observed campaign.
    pub m_star: u64,
    /// Predicted cumulative species count at `n + m_star`.
    pub s_pred: f64,
    /// Predicted residual risk at `n + m_star`.
    pub u_pred: f64,
}

/// Joint species/risk extrapolation over a horizon grid.
///
/// `points` is strictly increasing in `m_star`; `s_pred` is non-decreasing
/// and `u_pred` non-increasing along it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrapolationCurve {
    /// The report the curve extrapolates from.
    pub base: AssuranceReport,
    /// Grid points, last one exactly at the requested horizon.
    pub points: Vec<CurvePoint>,
}

/// Stop-rule verdict: the minimal additional-input budget for a risk
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopRule {
    /// Smallest `m_star` with extrapolated risk at or below the threshold
    /// (capped at [`STOP_RULE_CAP`]).
    pub m_star: u64,
    /// Forward-evaluated risk at `m_star`.
    pub risk_at_m_star: f64,
    /// True when the threshold is unreachable within the representable
    /// horizon; `m_star` then holds the cap, not a sufficient budget.
    pub capped: bool,
}

/// Which scalar statistic a bootstrap interval targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Residual risk `u_hat`.
    GoodTuring,
    /// Asymptotic richness `s_hat`.
    Chao1Richness,
    /// Undiscovered species count `f0_hat`.
    UnseenCount,
    /// Feasible coverage `g_hat`.
    FeasibleCoverage,
}

/// Percentile bootstrap interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapInterval {
    /// Statistic the interval covers.
    pub estimator: EstimatorKind,
    /// Point estimate on actual records.
    pub point: f64,
    /// Lower percentile bound.
    pub lower: f64,
    /// Upper percentile bound.
    pub upper: f64,
    /// Nominal coverage level.
    pub level: f64,
    /// Resamples requested.
    pub reps: u64,
    /// Resamples on which the estimator was undefined and skipped.
    pub skipped: u64,
    /// Seed the resampling streams were derived from.
    pub seed: u64,
}

/// Residual risk `f1 / n`, clamped to [0, 1].
///
/// The clamp binds only when `f1 > n`, which is possible because one
/// input may exhibit several singleton species.
///
/// # Errors
/// [`EstimateError::EmptyCampaign`] when `n = 0`.
pub fn good_turing(n: u64, f1: u64) -> Result<f64, EstimateError> {
    if n == 0 {
        return Err(EstimateError::EmptyCampaign);
    }
    Ok((f1 as f64 / n as f64).clamp(0.0, 1.0))
}

/// Chao1 asymptotic richness from singleton/doubleton counts.
///
/// `s_hat = s_obs + f1^2 / (2 f2)` when `f2 > 0`, else the bias-corrected
/// `s_obs + f1 (f1 - 1) / 2`. Always `s_hat >= s_obs`.
///
/// # Errors
/// [`EstimateError::InconsistentCounts`] when `s_obs < f1 + f2`.
pub fn chao1(s_obs: u64, f1: u64, f2: u64) -> Result<Chao1Estimate, EstimateError> {
    if f1.checked_add(f2).is_none_or(|t| t > s_obs) {
        return Err(EstimateError::InconsistentCounts { s_obs, f1, f2 });
    }
    let f1f = f1 as f64;
    let f0_hat = if f2 > 0 {
        (f1f * f1f) / (2.0 * f2 as f64)
    } else {
        (f1f * (f1f - 1.0)) / 2.0
    };
    Ok(Chao1Estimate {
        s_hat: s_obs as f64 + f0_hat,
        f0_hat,
    })
}

/// `ln(1 - x)` for the shared decay base `x = f1 / (n f0_hat + f1)`.
///
/// Caller guarantees `n >= 1`, `f1 >= 1`, `f0_hat > 0`, so `x` lies in
/// (0, 1) and the result is strictly negative.
fn log_keep(n: u64, f1: u64, f0_hat: f64) -> f64 {
    let f1f = f1 as f64;
    let x = f1f / (n as f64 * f0_hat + f1f);
    (-x).ln_1p()
}

/// Predicted cumulative species count after `m_star` additional inputs.
///
/// Returns `s_obs` when `m_star = 0`, `f1 = 0`, or `f0_hat = 0` (no
/// evidence of anything unseen), otherwise
/// `s_obs + f0_hat * (1 - (1 - f1/(n f0_hat + f1))^m_star)`. The result
/// always lies in `[s_obs, s_obs + f0_hat]` and approaches the upper end
/// as `m_star` grows.
///
/// # Errors
/// [`EstimateError::EmptyCampaign`] when `n = 0`;
/// [`EstimateError::InvalidUnseen`] when `f0_hat` is negative or not
/// finite.
pub fn extrapolate_species(
    s_obs: u64,
    n: u64,
    f1: u64,
    f0_hat: f64,
    m_star: u64,
) -> Result<f64, EstimateError> {
    if n == 0 {
        return Err(EstimateError::EmptyCampaign);
    }
    if !f0_hat.is_finite() || f0_hat < 0.0 {
        return Err(EstimateError::InvalidUnseen { f0_hat });
    }
    if m_star == 0 || f1 == 0 || f0_hat == 0.0 {
        return Ok(s_obs as f64);
    }
    let missed = (m_star as f64 * log_keep(n, f1, f0_hat)).exp();
    Ok(s_obs as f64 + f0_hat * (1.0 - missed))
}

/// Predicted residual risk after `m_star` additional inputs.
///
/// `(f1 / n) * (n f0_hat / (n f0_hat + f1))^(m_star + 1)`, clamped to at
/// most 1. Zero when `f1 = 0` (no singletons) or `f0_hat = 0` (nothing
/// left to discover). Strictly decreasing in `m_star` when both are
/// positive, and already at `m_star = 0` strictly below the Good-Turing
/// point estimate.
///
/// # Errors
/// Same as [`extrapolate_species`].
pub fn extrapolate_risk(n: u64, f1: u64, f0_hat: f64, m_star: u64) -> Result<f64, EstimateError> {
    if n == 0 {
        return Err(EstimateError::EmptyCampaign);
    }
    if !f0_hat.is_finite() || f0_hat < 0.0 {
        return Err(EstimateError::InvalidUnseen { f0_hat });
    }
    if f1 == 0 || f0_hat == 0.0 {
        return Ok(0.0);
    }
    let keep = ((m_star as f64 + 1.0) * log_keep(n, f1, f0_hat)).exp();
    Ok((f1 as f64 / n as f64 * keep).min(1.0))
}

/// Feasible coverage `s_obs / s_hat`.
///
/// # Errors
/// [`EstimateError::EmptyCampaign`] when `s_hat = 0` (nothing observed,
/// nothing estimated); [`EstimateError::InvalidRichness`] when `s_hat` is
/// not finite or below `s_obs`.
pub fn feasible_coverage(s_obs: u64, s_hat: f64) -> Result<f64, EstimateError> {
    if !s_hat.is_finite() || s_hat < s_obs as f64 {
        return Err(EstimateError::InvalidRichness { s_obs, s_hat });
    }
    if s_hat == 0.0 {
        return Err(EstimateError::EmptyCampaign);
    }
    Ok(s_obs as f64 / s_hat)
}

/// Smallest `m_star` whose extrapolated risk is at or below `theta`.
///
/// A closed-form inversion of the risk decay seeds a bracket; the exact
/// minimal budget is then pinned by bisection over forward evaluations of
/// [`extrapolate_risk`], so `risk(m_star) <= theta < risk(m_star - 1)`
/// holds by construction whenever `m_star >= 1`. When even the capped
/// horizon [`STOP_RULE_CAP`] cannot reach `theta`, the result carries
/// `capped = true` and the forward-evaluated risk at the cap.
///
/// # Errors
/// [`EstimateError::InvalidThreshold`] unless `0 < theta < 1`;
/// [`EstimateError::EmptyCampaign`] when `n = 0`;
/// [`EstimateError::InvalidUnseen`] for invalid `f0_hat`.
pub fn stop_rule(n: u64, f1: u64, f0_hat: f64, theta: f64) -> Result<StopRule, EstimateError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(EstimateError::InvalidThreshold { theta });
    }
    let risk_now = extrapolate_risk(n, f1, f0_hat, 0)?;
    if risk_now <= theta {
        return Ok(StopRule {
            m_star: 0,
            risk_at_m_star: risk_now,
            capped: false,
        });
    }
    // risk_now > theta implies f1 >= 1 and f0_hat > 0.
    let risk_cap = extrapolate_risk(n, f1, f0_hat, STOP_RULE_CAP)?;
    if risk_cap > theta {
        return Ok(StopRule {
            m_star: STOP_RULE_CAP,
            risk_at_m_star: risk_cap,
            capped: true,
        });
    }
    // Closed-form seed: (m + 1) * ln(1 - x) <= ln(theta n / f1).
    let c = log_keep(n, f1, f0_hat);
    let seed = (theta * n as f64 / f1 as f64).ln() / c - 1.0;
    let mut hi = if seed >= STOP_RULE_CAP as f64 {
        STOP_RULE_CAP
    } else {
        (seed.ceil().max(1.0)) as u64
    };
    while extrapolate_risk(n, f1, f0_hat, hi)? > theta {
        hi = hi.saturating_mul(2).min(STOP_RULE_CAP);
    }
    // Invariants: risk(lo) > theta, risk(hi) <= theta.
    let mut lo = 0u64;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if extrapolate_risk(n, f1, f0_hat, mid)? <= theta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(StopRule {
        m_star: hi,
        risk_at_m_star: extrapolate_risk(n, f1, f0_hat, hi)?,
        capped: false,
    })
}

/// All point estimates from one snapshot.
///
/// Uses Chao1 as the richness source. A campaign that observed inputs but
/// no species at all reports `g_hat = 1`: there is no evidence that a
/// non-empty feasible set exists, so coverage of it is vacuously complete.
///
/// # Errors
/// [`EstimateError::EmptyCampaign`] when the snapshot holds no inputs.
pub fn full_report(snapshot: &CampaignSnapshot) -> Result<AssuranceReport, EstimateError> {
    let st = snapshot.snapshot_stats();
    if st.n == 0 {
        return Err(EstimateError::EmptyCampaign);
    }
    let u_hat = good_turing(st.n, st.f1)?;
    let chao = chao1(st.s_obs, st.f1, st.f2)?;
    let g_hat = if chao.s_hat == 0.0 {
        1.0
    } else {
        feasible_coverage(st.s_obs, chao.s_hat)?
    };
    Ok(AssuranceReport {
        n: st.n,
        s_obs: st.s_obs,
        f1: st.f1,
        f2: st.f2,
        u_hat,
        f0_hat: chao.f0_hat,
        s_hat: chao.s_hat,
        g_hat,
    })
}

/// Joint species/risk extrapolation at `steps` evenly spaced integer
/// horizons in `(0, horizon]`.
///
/// Grid points that collapse to the same integer are deduplicated; the
/// final point sits exactly at `horizon`.
///
/// # Errors
/// [`EstimateError::InvalidGrid`] when `horizon` or `steps` is zero, plus
/// anything [`full_report`] raises.
pub fn extrapolation_curve(
    snapshot: &CampaignSnapshot,
    horizon: u64,
    steps: u64,
) -> Result<ExtrapolationCurve, EstimateError> {
    if horizon == 0 || steps == 0 {
        return Err(EstimateError::InvalidGrid { horizon, steps });
    }
    let base = full_report(snapshot)?;
    let mut points = Vec::with_capacity(steps.min(horizon) as usize);
    let mut last_m = 0u64;
    for j in 1..=steps {
        let m = ((j as u128 * horizon as u128) / steps as u128) as u64;
        if m == 0 || m == last_m {
            continue;
        }
        last_m = m;
        points.push(CurvePoint {
            m_star: m,
            s_pred: extrapolate_species(base.s_obs, base.n, base.f1, base.f0_hat, m)?,
            u_pred: extrapolate_risk(base.n, base.f1, base.f0_hat, m)?,
        });
    }
    Ok(ExtrapolationCurve { base, points })
}

/// Applies one estimator to a snapshot's statistics.
fn apply_estimator(kind: EstimatorKind, snap: &CampaignSnapshot) -> Result<f64, EstimateError> {
    let st = snap.snapshot_stats();
    match kind {
        EstimatorKind::GoodTuring => good_turing(st.n, st.f1),
        EstimatorKind::Chao1Richness => chao1(st.s_obs, st.f1, st.f2).map(|e| e.s_hat),
        EstimatorKind::UnseenCount => chao1(st.s_obs, st.f1, st.f2).map(|e| e.f0_hat),
        EstimatorKind::FeasibleCoverage => {
            let e = chao1(st.s_obs, st.f1, st.f2)?;
            feasible_coverage(st.s_obs, e.s_hat)
        }
    }
}

/// Percentile bootstrap interval for one estimator.
///
/// Resamples whole inputs with replacement (`records.len()` draws per
/// resample), re-accumulates a snapshot, and re-estimates. Resample `j`
/// draws from a ChaCha8 stream derived as `(seed, stream = j)`, so results
/// are bit-identical for a fixed seed regardless of thread count.
/// Resamples on which the estimator is undefined (for example feasible
/// coverage when a resample contains only speciesless inputs) are skipped
/// and counted in [`BootstrapInterval::skipped`].
///
/// Index draws use `next_u64() % len`; the modulo bias is below 1e-15 for
/// any realistic record count.
///
/// # Errors
/// [`EstimateError::EmptyCampaign`] on empty input,
/// [`EstimateError::TooFewResamples`] below 100 reps,
/// [`EstimateError::InvalidLevel`] outside (0, 1),
/// [`EstimateError::DegenerateResamples`] if every resample was skipped,
/// plus any error of the point estimate itself.
pub fn bootstrap_ci(
    records: &[IncidenceRecord],
    estimator: EstimatorKind,
    reps: u64,
    level: f64,
    seed: u64,
) -> Result<BootstrapInterval, EstimateError> {
    if records.is_empty() {
        return Err(EstimateError::EmptyCampaign);
    }
    if reps < 100 {
        return Err(EstimateError::TooFewResamples { reps });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(EstimateError::InvalidLevel { level });
    }
    let point = apply_estimator(estimator, &CampaignSnapshot::from_records(records))?;
    let len = records.len() as u64;
    let estimates: Vec<Option<f64>> = (0..reps)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j);
            let mut snap = CampaignSnapshot::new();
            for _ in 0..len {
                let idx = (rng.next_u64() % len) as usize;
                snap.observe(&records[idx]);
            }
            apply_estimator(estimator, &snap).ok()
        })
        .collect();
    let mut kept: Vec<f64> = estimates.into_iter().flatten().collect();
    let skipped = reps - kept.len() as u64;
    if kept.is_empty() {
        return Err(EstimateError::DegenerateResamples);
    }
    kept.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(BootstrapInterval {
        estimator,
        point,
        lower: percentile(&kept, tail),
        upper: percentile(&kept, 1.0 - tail),
        level,
        reps,
        skipped,
        seed,
    })
}

/// Linear-interpolation quantile of a sorted sample, `q` in [0, 1].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if frac == 0.0 || i + 1 >= sorted.len() {
        sorted[i.min(sorted.len() - 1)]
    } else {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    }
}

#[cfg(test)]
// Reference values below are quoted digit for digit from the oracle
// runs that produced them; they are deliberately longer than f64.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // -- good_turing ------------------------------------------------------

    #[test]
    fn good_turing_direct_substitution() {
        assert_eq!(good_turing(100, 10).unwrap(), 0.1);
        assert_eq!(good_turing(500, 0).unwrap(), 0.0);
    }

    #[test]
    fn good_turing_empty_campaign_is_an_error_not_zero() {
        assert_eq!(good_turing(0, 0), Err(EstimateError::EmptyCampaign));
    }

    #[test]
    fn good_turing_clamps_multi_species_singleton_excess() {
        // One input exhibiting two singleton species: f1 = 2 > n = 1.
        assert_eq!(good_turing(1, 2).unwrap(), 1.0);
    }

    // -- chao1 -------------------------------------------------------------

    #[test]
    fn chao1_doubleton_branch() {
        let e = chao1(50, 10, 5).unwrap();
        assert_eq!(e.s_hat, 60.0);
        assert_eq!(e.f0_hat, 10.0);
    }

    #[test]
    fn chao1_bias_corrected_branch_without_doubletons() {
        let e = chao1(50, 4, 0).unwrap();
        assert_eq!(e.s_hat, 56.0);
        assert_eq!(e.f0_hat, 6.0);
    }

    #[test]
    fn chao1_saturated_campaign_infers_nothing_unseen() {
        let e = chao1(50, 0, 0).unwrap();
        assert_eq!(e.s_hat, 50.0);
        assert_eq!(e.f0_hat, 0.0);
    }

    #[test]
    fn chao1_rejects_inconsistent_counts() {
        assert!(matches!(
            chao1(3, 2, 2),
            Err(EstimateError::InconsistentCounts { .. })
        ));
    }

    // -- extrapolate_species ----------------------------------------------

    #[test]
    fn species_extrapolation_zero_horizon_is_identity() {
        assert_eq!(extrapolate_species(50, 100, 10, 10.0, 0).unwrap(), 50.0);
        assert_eq!(extrapolate_species(7, 3, 0, 4.0, 99).unwrap(), 7.0);
        assert_eq!(extrapolate_species(7, 3, 2, 0.0, 99).unwrap(), 7.0);
    }

    /// Expected values computed independently with 50-digit arithmetic
    /// (mpmath), frozen before the fast path was written.
    #[test]
    fn species_extrapolation_matches_high_precision_reference() {
        let cases: &[(u64, u64, u64, f64, u64, f64)] = &[
            (50, 100, 10, 10.0, 100, 56.302887876708807388),
            (3, 4, 1, 2.0, 5, 3.890142085386712730106),
            (632, 1000, 368, 368.0, 1000, 864.5527040217300406533),
            (50, 100, 10, 10.0, 1, 50.0990099009900990099),
            (10, 7, 5, 3.0, 12, 12.76875485904771781276),
        ];
        for &(s_obs, n, f1, f0, m, want) in cases {
            let got = extrapolate_species(s_obs, n, f1, f0, m).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn species_extrapolation_reaches_its_bound_in_the_limit() {
        let v = extrapolate_species(50, 100, 10, 10.0, 1_000_000_000).unwrap();
        assert!(v <= 60.0);
        assert!((60.0 - v).abs() < 1e-6, "limit value {v}");
    }

    #[test]
    fn species_extrapolation_rejects_bad_inputs() {
        assert_eq!(
            extrapolate_species(5, 0, 1, 1.0, 1),
            Err(EstimateError::EmptyCampaign)
        );
        assert!(matches!(
            extrapolate_species(5, 10, 1, -0.5, 1),
            Err(EstimateError::InvalidUnseen { .. })
        ));
        assert!(matches!(
            extrapolate_species(5, 10, 1, f64::NAN, 1),
            Err(EstimateError::InvalidUnseen { .. })
        ));
    }

    // -- extrapolate_risk ---------------------------------------------------

    /// Same oracle provenance as the species grid.
    #[test]
    fn risk_extrapolation_matches_high_precision_reference() {
        let cases: &[(u64, u64, f64, u64, f64)] = &[
            (100, 10, 10.0, 0, 0.099009900990099009901),
            (4, 1, 2.0, 5, 0.1233175460681430299883),
            (1000, 368, 368.0, 1000, 0.1353119839942756836631),
            (100, 10, 10.0, 231, 0.009941256568821173913321),
            (7, 5, 3.0, 12, 0.04447021941390042062219),
        ];
        for &(n, f1, f0, m, want) in cases {
            let got = extrapolate_risk(n, f1, f0, m).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn risk_extrapolation_zero_cases() {
        for m in [0, 1, 17, 1_000_000_007] {
            assert_eq!(extrapolate_risk(500, 0, 25.0, m).unwrap(), 0.0);
            assert_eq!(extrapolate_risk(500, 10, 0.0, m).unwrap(), 0.0);
        }
    }

    #[test]
    fn risk_extrapolation_clamps_to_one() {
        // n=1 input exhibiting 10 singleton species, huge unseen pool.
        assert_eq!(extrapolate_risk(1, 10, 10.0, 0).unwrap(), 1.0);
    }

    #[test]
    fn risk_at_zero_horizon_is_strictly_below_good_turing() {
        for (n, f1, f0) in [(100u64, 10u64, 10.0), (1000, 368, 368.0), (7, 5, 3.0)] {
            let gt = good_turing(n, f1).unwrap();
            let r0 = extrapolate_risk(n, f1, f0, 0).unwrap();
            assert!(r0 < gt, "risk {r0} must be strictly below u_hat {gt}");
        }
    }

    // -- stop_rule -----------------------------------------------------------

    #[test]
    fn stop_rule_nothing_to_do_when_already_satisfied() {
        let r = stop_rule(1000, 10, 50.0, 0.5).unwrap();
        assert_eq!(r.m_star, 0);
        assert!(!r.capped);
        assert!(r.risk_at_m_star <= 0.5);
    }

    /// m* = 231 verified independently: risk(230) = 0.010040669... > 0.01
    /// and risk(231) = 0.009941256... <= 0.01 at 50-digit precision.
    #[test]
    fn stop_rule_matches_forward_verified_reference() {
        let r = stop_rule(100, 10, 10.0, 0.01).unwrap();
        assert_eq!(r.m_star, 231);
        assert!(!r.capped);
        assert!(r.risk_at_m_star <= 0.01);
        assert!(extrapolate_risk(100, 10, 10.0, 230).unwrap() > 0.01);
        assert_relative_eq!(
            r.risk_at_m_star,
            0.009941256568821173913321,
            max_relative = 1e-13
        );
    }

    #[test]
    fn stop_rule_zero_singletons_or_zero_unseen_need_no_budget() {
        assert_eq!(stop_rule(100, 0, 10.0, 0.01).unwrap().m_star, 0);
        assert_eq!(stop_rule(100, 10, 0.0, 0.01).unwrap().m_star, 0);
    }

    #[test]
    fn stop_rule_rejects_bad_thresholds() {
        for theta in [0.0, 1.0, -0.3, 1.7, f64::NAN] {
            assert!(matches!(
                stop_rule(100, 10, 10.0, theta),
                Err(EstimateError::InvalidThreshold { .. })
            ));
        }
    }

    #[test]
    fn stop_rule_empty_campaign() {
        assert_eq!(stop_rule(0, 0, 1.0, 0.5), Err(EstimateError::EmptyCampaign));
    }

    #[test]
    fn stop_rule_caps_unreachable_thresholds() {
        // Decay per input ~1e-18: even 2^63 - 1 more inputs leave risk
        // far above 1e-300.
        let r = stop_rule(1_000_000_000_000, 1, 1e6, 1e-300).unwrap();
        assert!(r.capped);
        assert_eq!(r.m_star, STOP_RULE_CAP);
        assert!(r.risk_at_m_star > 1e-300);
    }

    // -- feasible_coverage ----------------------------------------------------

    #[test]
    fn feasible_coverage_division_and_saturation() {
        assert_relative_eq!(
            feasible_coverage(50, 60.0).unwrap(),
            50.0 / 60.0,
            max_relative = 1e-15
        );
        assert_eq!(feasible_coverage(42, 42.0).unwrap(), 1.0);
    }

    #[test]
    fn feasible_coverage_rejects_degenerate_and_inconsistent_inputs() {
        assert_eq!(feasible_coverage(0, 0.0), Err(EstimateError::EmptyCampaign));
        assert!(matches!(
            feasible_coverage(10, 5.0),
            Err(EstimateError::InvalidRichness { .. })
        ));
        assert!(matches!(
            feasible_coverage(10, f64::NAN),
            Err(EstimateError::InvalidRichness { .. })
        ));
    }

    // -- full_report ------------------------------------------------------------

    /// Builds a snapshot with exactly (n=100, s_obs=50, f1=10, f2=5):
    /// 10 singleton species, 5 doubleton species, 35 tripleton species
    /// spread over 100 inputs.
    fn snapshot_100_50_10_5() -> CampaignSnapshot {
        let mut per_input: Vec<Vec<String>> = vec![Vec::new(); 100];
        for (i, input) in per_input.iter_mut().enumerate().take(10) {
            input.push(format!("single{i}"));
        }
        for j in 0..5 {
            per_input[10 + j].push(format!("double{j}"));
            per_input[40 + j].push(format!("double{j}"));
        }
        for k in 0..35 {
            for off in [0usize, 33, 66] {
                per_input[(k + off) % 100].push(format!("triple{k}"));
            }
        }
        let mut snap = CampaignSnapshot::new();
        for species in &per_input {
            snap.observe_species(species.iter().map(String::as_str));
        }
        snap
    }

    #[test]
    fn full_report_composes_the_individual_estimators() {
        let snap = snapshot_100_50_10_5();
        let st = snap.snapshot_stats();
        assert_eq!((st.n, st.s_obs, st.f1, st.f2), (100, 50, 10, 5));
        let r = full_report(&snap).unwrap();
        assert_eq!(r.u_hat, 0.1);
        assert_eq!(r.s_hat, 60.0);
        assert_eq!(r.f0_hat, 10.0);
        assert_relative_eq!(r.g_hat, 50.0 / 60.0, max_relative = 1e-15);
    }

    #[test]
    fn full_report_saturated_campaign() {
        let mut snap = CampaignSnapshot::new();
        for _ in 0..3 {
            snap.observe_species(["a", "b", "c"]);
        }
        let r = full_report(&snap).unwrap();
        assert_eq!(r.u_hat, 0.0);
        assert_eq!(r.s_hat, r.s_obs as f64);
        assert_eq!(r.g_hat, 1.0);
    }

    #[test]
    fn full_report_speciesless_campaign_is_vacuously_covered() {
        let mut snap = CampaignSnapshot::new();
        snap.observe_species(Vec::<&str>::new());
        let r = full_report(&snap).unwrap();
        assert_eq!((r.n, r.s_obs), (1, 0));
        assert_eq!(r.u_hat, 0.0);
        assert_eq!(r.s_hat, 0.0);
        assert_eq!(r.g_hat, 1.0);
    }

    #[test]
    fn full_report_empty_campaign_is_an_error() {
        assert_eq!(
            full_report(&CampaignSnapshot::new()),
            Err(EstimateError::EmptyCampaign)
        );
    }

    // -- extrapolation_curve -------------------------------------------------------

    #[test]
    fn curve_degenerate_grid_is_a_single_point_at_the_horizon() {
        let curve = extrapolation_curve(&snapshot_100_50_10_5(), 500, 1).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.points[0].m_star, 500);
    }

    #[test]
    fn curve_dedupes_collapsing_grid_points() {
        let curve = extrapolation_curve(&snapshot_100_50_10_5(), 3, 10).unwrap();
        let ms: Vec<u64> = curve.points.iter().map(|p| p.m_star).collect();
        assert_eq!(ms, vec![1, 2, 3]);
    }

    #[test]
    fn curve_rejects_zero_grid_parameters() {
        let snap = snapshot_100_50_10_5();
        assert!(matches!(
            extrapolation_curve(&snap, 0, 5),
            Err(EstimateError::InvalidGrid { .. })
        ));
        assert!(matches!(
            extrapolation_curve(&snap, 5, 0),
            Err(EstimateError::InvalidGrid { .. })
        ));
    }

    #[test]
    fn curve_is_monotone_and_matches_scalar_operations() {
        let snap = snapshot_100_50_10_5();
        let base = full_report(&snap).unwrap();
        let curve = extrapolation_curve(&snap, 10_000, 37).unwrap();
        assert_eq!(curve.points.last().unwrap().m_star, 10_000);
        let mut last_m = 0;
        let mut last_s = base.s_obs as f64;
        let mut last_u = f64::INFINITY;
        for p in &curve.points {
            assert!(p.m_star > last_m);
            assert!(p.s_pred >= last_s);
            assert!(p.u_pred <= last_u);
            assert_eq!(
                p.s_pred,
                extrapolate_species(base.s_obs, base.n, base.f1, base.f0_hat, p.m_star).unwrap()
            );
            assert_eq!(
                p.u_pred,
                extrapolate_risk(base.n, base.f1, base.f0_hat, p.m_star).unwrap()
            );
            (last_m, last_s, last_u) = (p.m_star, p.s_pred, p.u_pred);
        }
    }

    // -- bootstrap_ci -----------------------------------------------------------------

    fn simple_records(k: usize) -> Vec<IncidenceRecord> {
        (0..k)
            .map(|i| {
                IncidenceRecord::new(
                    format!("t{i}"),
                    [format!("sp{}", i % 5), format!("sp{}", i % 3)],
                )
            })
            .collect()
    }

    #[test]
    fn bootstrap_identical_records_give_zero_width_interval() {
        let records: Vec<IncidenceRecord> = (0..40)
            .map(|i| IncidenceRecord::new(format!("t{i}"), ["a", "b"]))
            .collect();
        let ci = bootstrap_ci(&records, EstimatorKind::GoodTuring, 150, 0.95, 7).unwrap();
        assert_eq!(ci.lower, ci.point);
        assert_eq!(ci.upper, ci.point);
        assert_eq!(ci.skipped, 0);
    }

    #[test]
    fn bootstrap_is_bit_identical_for_a_fixed_seed() {
        // One unique species per record maximizes resample-to-resample
        // variance, so distinct seeds cannot coincide by digitization.
        let records: Vec<IncidenceRecord> = (0..60)
            .map(|i| IncidenceRecord::new(format!("t{i}"), [format!("sp{i}")]))
            .collect();
        let a = bootstrap_ci(&records, EstimatorKind::Chao1Richness, 120, 0.9, 42).unwrap();
        let b = bootstrap_ci(&records, EstimatorKind::Chao1Richness, 120, 0.9, 42).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_ci(&records, EstimatorKind::Chao1Richness, 120, 0.9, 43).unwrap();
        assert!(a.lower != c.lower || a.upper != c.upper, "seed must matter");
    }

    #[test]
    fn bootstrap_orders_bounds_around_a_covered_point() {
        let records = simple_records(80);
        for kind in [
            EstimatorKind::GoodTuring,
            EstimatorKind::Chao1Richness,
            EstimatorKind::UnseenCount,
            EstimatorKind::FeasibleCoverage,
        ] {
            let ci = bootstrap_ci(&records, kind, 200, 0.95, 3).unwrap();
            assert!(ci.lower <= ci.upper, "{kind:?}");
            assert!(ci.point.is_finite());
        }
    }

    #[test]
    fn bootstrap_skips_and_counts_undefined_resamples() {
        // Half the inputs found nothing; resamples drawing only those make
        // feasible coverage undefined and must be skipped, not faked.
        let mut records = vec![
            IncidenceRecord::new("t0", ["a"]),
            IncidenceRecord::new("t1", Vec::<String>::new()),
        ];
        records.push(IncidenceRecord::new("t2", Vec::<String>::new()));
        let ci = bootstrap_ci(&records, EstimatorKind::FeasibleCoverage, 200, 0.9, 11).unwrap();
        assert!(ci.skipped > 0);
        assert!((ci.reps - ci.skipped) > 0);
        assert!(ci.lower.is_finite() && ci.upper.is_finite());
    }

    #[test]
    fn bootstrap_rejects_bad_parameters() {
        let records = simple_records(10);
        assert_eq!(
            bootstrap_ci(&[], EstimatorKind::GoodTuring, 200, 0.95, 1),
            Err(EstimateError::EmptyCampaign)
        );
        assert_eq!(
            bootstrap_ci(&records, EstimatorKind::GoodTuring, 99, 0.95, 1),
            Err(EstimateError::TooFewResamples { reps: 99 })
        );
        assert!(matches!(
            bootstrap_ci(&records, EstimatorKind::GoodTuring, 100, 1.0, 1),
            Err(EstimateError::InvalidLevel { .. })
        ));
    }

    // -- property tests ------------------------------------------------------------

    proptest! {
        /// Scale-free identity: both ratios are the same real number, and
        /// IEEE division rounds identical reals identically.
        #[test]
        fn good_turing_is_scale_free(n in 1u64..1_000_000, f1_frac in 0.0f64..=1.0, k in 1u64..1000) {
            let f1 = (n as f64 * f1_frac) as u64;
            prop_assume!(n.checked_mul(k).is_some_and(|kn| kn < (1 << 53)));
            prop_assert_eq!(
                good_turing(n, f1).unwrap(),
                good_turing(k * n, k * f1).unwrap()
            );
        }

        #[test]
        fn good_turing_stays_in_unit_interval(n in 1u64..u64::MAX, f1 in 0u64..u64::MAX) {
            let u = good_turing(n, f1).unwrap();
            prop_assert!((0.0..=1.0).contains(&u));
            prop_assert_eq!(u == 0.0, f1 == 0);
        }

        #[test]
        fn chao1_never_estimates_below_observed(s_extra in 0u64..10_000, f1 in 0u64..10_000, f2 in 0u64..10_000) {
            let s_obs = f1 + f2 + s_extra;
            let e = chao1(s_obs, f1, f2).unwrap();
            // IEEE addition is monotone, so the bound is exact even
            // though s_hat = s_obs + f0_hat rounds once.
            prop_assert!(e.s_hat >= s_obs as f64);
            prop_assert!(e.f0_hat >= 0.0);
            let diff = (e.s_hat - s_obs as f64 - e.f0_hat).abs();
            prop_assert!(diff <= 1e-9 * e.f0_hat.max(1.0), "diff {diff}");
        }

        #[test]
        fn species_extrapolation_is_bounded_and_monotone(
            s_obs in 1u64..100_000,
            n in 1u64..1_000_000,
            f1_frac in 0.0f64..=1.0,
            f0 in 0.0f64..100_000.0,
            m1 in 0u64..1_000_000_000,
            m2 in 0u64..1_000_000_000,
        ) {
            let f1 = ((n.min(s_obs)) as f64 * f1_frac) as u64;
            let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
            let v_lo = extrapolate_species(s_obs, n, f1, f0, lo).unwrap();
            let v_hi = extrapolate_species(s_obs, n, f1, f0, hi).unwrap();
            prop_assert!(v_lo >= s_obs as f64);
            prop_assert!(v_hi <= s_obs as f64 + f0);
            prop_assert!(v_lo <= v_hi);
        }

        /// Strict decrease needs the decay base bounded away from 1 and the
        /// horizon short of underflow; the generator keeps
        /// x = f1/(n f0 + f1) >= 1e-10 and the exponent above -690.
        #[test]
        fn risk_extrapolation_strictly_decreases(
            n in 1u64..1_000_000,
            f1_frac in 0.0f64..=1.0,
            f0 in 0.5f64..10_000.0,
            m_seed in 0u64..10_000,
        ) {
            let f1 = ((n as f64 * f1_frac) as u64).clamp(1, 10_000).min(n);
            let c = log_keep(n, f1, f0);
            let m_max = ((-690.0 / c) - 2.0).clamp(0.0, 10_000.0) as u64;
            let m = m_seed.min(m_max);
            let r0 = extrapolate_risk(n, f1, f0, m).unwrap();
            let r1 = extrapolate_risk(n, f1, f0, m + 1).unwrap();
            prop_assert!(r1 < r0, "risk must strictly decrease: {r0} -> {r1} at m={m}");
            prop_assert!(r0 <= 1.0);
            let gt = good_turing(n, f1).unwrap();
            prop_assert!(extrapolate_risk(n, f1, f0, 0).unwrap() < gt);
        }

        /// Forward consistency on random valid tuples: the returned budget
        /// is exactly minimal.
        #[test]
        fn stop_rule_is_forward_consistent(
            n in 1u64..1_000_000,
            f1_frac in 0.0f64..=1.0,
            f0 in 0.0f64..10_000.0,
            theta in 1e-6f64..0.999,
        ) {
            let f1 = (n as f64 * f1_frac) as u64;
            let r = stop_rule(n, f1, f0, theta).unwrap();
            prop_assume!(!r.capped);
            prop_assert!(r.risk_at_m_star <= theta);
            prop_assert_eq!(
                r.risk_at_m_star,
                extrapolate_risk(n, f1, f0, r.m_star).unwrap()
            );
            if r.m_star >= 1 {
                prop_assert!(extrapolate_risk(n, f1, f0, r.m_star - 1).unwrap() > theta);
            }
        }

        /// Random snapshots: the composed report equals the individual ops.
        #[test]
        fn full_report_agrees_with_individual_estimators(
            sets in prop::collection::vec(prop::collection::btree_set("[a-j]", 0..4), 1..40)
        ) {
            let mut snap = CampaignSnapshot::new();
            for set in &sets {
                snap.observe_species(set.iter().map(|s| s.as_str()));
            }
            let st = snap.snapshot_stats();
            let r = full_report(&snap).unwrap();
            prop_assert_eq!(r.u_hat, good_turing(st.n, st.f1).unwrap());
            let chao = chao1(st.s_obs, st.f1, st.f2).unwrap();
            prop_assert_eq!(r.s_hat, chao.s_hat);
            prop_assert_eq!(r.f0_hat, chao.f0_hat);
            if chao.s_hat > 0.0 {
                prop_assert_eq!(r.g_hat, feasible_coverage(st.s_obs, chao.s_hat).unwrap());
            } else {
                prop_assert_eq!(r.g_hat, 1.0);
            }
            prop_assert!(r.s_hat >= r.s_obs as f64);
            prop_assert!((0.0..=1.0).contains(&r.g_hat));
            prop_assert!((0.0..=1.0).contains(&r.u_hat));
        }

        /// Curve values equal pointwise scalar calls on arbitrary grids.
        #[test]
        fn curve_equals_pointwise_scalar_calls(
            horizon in 1u64..100_000,
            steps in 1u64..60,
            sets in prop::collection::vec(prop::collection::btree_set("[a-j]", 0..4), 1..30)
        ) {
            let mut snap = CampaignSnapshot::new();
            for set in &sets {
                snap.observe_species(set.iter().map(|s| s.as_str()));
            }
            let base = full_report(&snap).unwrap();
            let curve = extrapolation_curve(&snap, horizon, steps).unwrap();
            prop_assert_eq!(curve.points.last().map(|p| p.m_star), Some(horizon));
            for p in &curve.points {
                prop_assert_eq!(
                    p.s_pred,
                    extrapolate_species(base.s_obs, base.n, base.f1, base.f0_hat, p.m_star).unwrap()
                );
                prop_assert_eq!(
                    p.u_pred,
                    extrapolate_risk(base.n, base.f1, base.f0_hat, p.m_star).unwrap()
                );
            }
        }
    }
}
