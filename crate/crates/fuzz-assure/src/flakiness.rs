//! Flakiness diagnosis via the turning point test for randomness.
//!
//! A fuzzing campaign's per-interval discovery series (new species per
//! hour, crash counts per batch, and so on) should look exchangeable if
//! the harness is stable. Systematic drift (a warming-up target, a leaky
//! corpus schedule) or oscillation (alternating good/bad scheduling,
//! thermal throttling) both leave a signature in the count of *turning
//! points*: interior values that are strict local maxima or minima.
//!
//! For an IID series of length `k` with no ties the count `T` has
//!
//! ```text
//! E[T]   = 2 (k - 2) / 3
//! Var[T] = (16 k - 29) / 90
//! ```
//!
//! and `(T - E[T]) / sqrt(Var[T])` is asymptotically standard normal.
//! Too few turning points (z strongly negative) indicates trend; too many
//! (z strongly positive) indicates oscillation. The verdict is a
//! two-sided p-value.
//!
//! Ties are handled by collapsing runs of equal adjacent values to a
//! single value before counting; the moments then use the collapsed
//! length. Discovery counts are small integers, so ties are the norm
//! rather than the exception, and skipping this step silently deflates
//! `T`. The statistic depends only on the ordering of values, so any
//! strictly monotone transformation of the series leaves the result
//! unchanged, as does reversal.
//!
//! The normal approximation is considered trustworthy from roughly 30
//! collapsed values; below that the result carries `low_power = true`
//! and should be read as descriptive, not inferential.

use serde::Serialize;
use thiserror::Error;

use crate::special::two_sided_normal_p;

/// Minimum collapsed length for a trustworthy normal approximation.
const LOW_POWER_CUTOFF: usize = 30;

/// Failure modes of the turning point test.
#[derive(Debug, Error, PartialEq)]
pub enum FlakinessError {
    /// Fewer than three raw values: no interior point can exist.
    #[error("series too short for a turning point test: {len} values, need at least 3")]
    SeriesTooShort { len: usize },
    /// After tie collapsing fewer than three values remain, so the
    /// statistic is undefined (a constant series is the extreme case).
    #[error(
        "degenerate series: only {collapsed_len} distinct adjacent values after tie collapsing, need at least 3"
    )]
    DegenerateSeries { collapsed_len: usize },
    /// NaN or infinity in the series; order comparisons would be
    /// meaningless.
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
}

/// Outcome of a turning point test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPointResult {
    /// Observed turning points in the collapsed series.
    pub t: u64,
    /// Expected turning points under the IID hypothesis.
    pub expected_t: f64,
    /// Variance of the count under the IID hypothesis.
    pub variance_t: f64,
    /// Standardized statistic; negative means trending, positive means
    /// oscillating.
    pub z: f64,
    /// Two-sided normal p-value of `z`.
    pub p_value: f64,
    /// Raw series length.
    pub raw_len: usize,
    /// Length after collapsing runs of equal adjacent values.
    pub collapsed_len: usize,
    /// True when the collapsed series is too short for the normal
    /// approximation to be reliable.
    pub low_power: bool,
}

/// Runs the turning point test on a discovery series.
///
/// # Errors
/// [`FlakinessError::SeriesTooShort`] for fewer than three raw values,
/// [`FlakinessError::NonFiniteValue`] on NaN or infinity, and
/// [`FlakinessError::DegenerateSeries`] when tie collapsing leaves fewer
/// than three values.
pub fn turning_point_test(series: &[f64]) -> Result<TurningPointResult, FlakinessError> {
    if series.len() < 3 {
        return Err(FlakinessError::SeriesTooShort { len: series.len() });
    }
    if let Some(index) = series.iter().position(|v| !v.is_finite()) {
        return Err(FlakinessError::NonFiniteValue { index });
    }
    let collapsed: Vec<f64> = series.iter().copied().fold(Vec::new(), |mut acc, v| {
        if acc.last() != Some(&v) {
            acc.push(v);
        }
        acc
    });
    let k = collapsed.len();
    if k < 3 {
        return Err(FlakinessError::DegenerateSeries { collapsed_len: k });
    }
    let t = collapsed
        .windows(3)
        .filter(|w| (w[1] > w[0]) != (w[2] > w[1]))
        .count() as u64;
    let kf = k as f64;
    let expected_t = 2.0 * (kf - 2.0) / 3.0;
    let variance_t = (16.0 * kf - 29.0) / 90.0;
    let z = (t as f64 - expected_t) / variance_t.sqrt();
    Ok(TurningPointResult {
        t,
        expected_t,
        variance_t,
        z,
        p_value: two_sided_normal_p(z),
        raw_len: series.len(),
        collapsed_len: k,
        low_power: k < LOW_POWER_CUTOFF,
    })
}
