//! Numerical limits of model quantities along processor schedules.
//!
//! Scaled-problem analysis keeps asking the same question: as `p` grows with
//! `n = g(p)`, where does some sequence — the time ratio, the second-order
//! exponent, `g(p)/p` — settle? This module answers it with a fixed
//! geometric [`Schedule`] of processor counts, Aitken Δ² acceleration for
//! finite limits, and an explicit divergence test for infinite ones.
//!
//! The divergence test runs *before* acceleration on purpose. Aitken's
//! transform maps a pure geometric blow-up like `x_k = 2^k` to a constant
//! (the fixed point of the extrapolated line), so feeding a divergent tail
//! to the accelerator can manufacture a confident, wrong, finite limit.
//! A tail whose last five values are strictly monotone with non-shrinking
//! steps is declared infinite instead.

use std::fmt;

use crate::expr::EvalError;
use crate::model::{CostModel, GrowthFunction, ModelError};

/// Default smallest scheduled processor count, as an exponent of two.
pub const DEFAULT_MIN_EXP: u32 = 4;
/// Default largest scheduled processor count, as an exponent of two.
pub const DEFAULT_MAX_EXP: u32 = 40;
/// Default convergence tolerance on accelerated deltas.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default number of consecutive small deltas required to accept a limit.
pub const DEFAULT_MIN_CONSECUTIVE: usize = 3;

/// Ratios this far above `1/2` still count as sitting on the
/// minimal-condition boundary.
///
/// The second-order exponent is continuous at the boundary (it tends to
/// `-1` as the ratio tends to `1/2`), but models whose ratio approaches
/// `1/2` *from above* — per-processor overhead that never amortizes, as in
/// the dense matrix–vector product — would otherwise have no usable point at
/// any finite processor count. The slack is deliberately tight: a ratio of
/// `0.5 + 7e-7` (a fixed-size problem at small `p`) is still a violation.
pub const MINIMAL_CONDITION_SLACK: f64 = 1e-9;

/// Errors from schedule construction or limit estimation.
#[derive(Debug, Clone, PartialEq)]
pub enum AsymptoticsError {
    ScheduleTooShort { got: usize },
    ScheduleNotIncreasing { index: usize },
    ScheduleBelowTwo { value: f64 },
    InvalidTolerance { tol: f64 },
    InvalidMinConsecutive,
    InvalidExponentRange { min_exp: u32, max_exp: u32 },
    /// The sequence failed to evaluate at a scheduled point.
    Eval { p: f64, source: EvalError },
    /// The model failed to evaluate at a scheduled point.
    Model { p: f64, source: ModelError },
    /// Overflow truncation left nothing to estimate from.
    NoSamples,
}

impl fmt::Display for AsymptoticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsymptoticsError::ScheduleTooShort { got } => {
                write!(f, "schedule needs at least 6 points, got {got}")
            }
            AsymptoticsError::ScheduleNotIncreasing { index } => {
                write!(f, "schedule must be strictly increasing (violated at index {index})")
            }
            AsymptoticsError::ScheduleBelowTwo { value } => {
                write!(f, "scheduled processor counts must be at least 2, got {value}")
            }
            AsymptoticsError::InvalidTolerance { tol } => {
                write!(f, "tolerance must be positive and finite, got {tol}")
            }
            AsymptoticsError::InvalidMinConsecutive => {
                write!(f, "at least one consecutive small delta must be required")
            }
            AsymptoticsError::InvalidExponentRange { min_exp, max_exp } => {
                write!(
                    f,
                    "exponent range 2^{min_exp}..2^{max_exp} does not give a valid schedule"
                )
            }
            AsymptoticsError::Eval { p, source } => {
                write!(f, "sequence failed at p = {p}: {source}")
            }
            AsymptoticsError::Model { p, source } => {
                write!(f, "model failed at p = {p}: {source}")
            }
            AsymptoticsError::NoSamples => {
                write!(f, "no scheduled point produced a finite sample")
            }
        }
    }
}

impl std::error::Error for AsymptoticsError {}

/// A strictly increasing set of processor counts plus convergence policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    p_values: Vec<f64>,
    tol: f64,
    min_consecutive: usize,
}

impl Schedule {
    /// Build from explicit processor counts. Needs at least 6 strictly
    /// increasing values, all at least 2.
    pub fn new(p_values: Vec<f64>, tol: f64, min_consecutive: usize) -> Result<Self, AsymptoticsError> {
        if p_values.len() < 6 {
            return Err(AsymptoticsError::ScheduleTooShort { got: p_values.len() });
        }
        for (i, &p) in p_values.iter().enumerate() {
            if !p.is_finite() || p < 2.0 {
                return Err(AsymptoticsError::ScheduleBelowTwo { value: p });
            }
            if i > 0 && p <= p_values[i - 1] {
                return Err(AsymptoticsError::ScheduleNotIncreasing { index: i });
            }
        }
        if !tol.is_finite() || tol <= 0.0 {
            return Err(AsymptoticsError::InvalidTolerance { tol });
        }
        if min_consecutive == 0 {
            return Err(AsymptoticsError::InvalidMinConsecutive);
        }
        Ok(Schedule { p_values, tol, min_consecutive })
    }

    /// Powers of two from `2^min_exp` through `2^max_exp` inclusive.
    pub fn geometric(
        min_exp: u32,
        max_exp: u32,
        tol: f64,
        min_consecutive: usize,
    ) -> Result<Self, AsymptoticsError> {
        if min_exp < 1 || max_exp <= min_exp || max_exp > 1023 || max_exp - min_exp + 1 < 6 {
            return Err(AsymptoticsError::InvalidExponentRange { min_exp, max_exp });
        }
        let p_values = (min_exp..=max_exp).map(|e| 2f64.powi(e as i32)).collect();
        Schedule::new(p_values, tol, min_consecutive)
    }

    /// The default schedule with its top end moved to `2^max_exp`.
    pub fn with_max_exp(max_exp: u32) -> Result<Self, AsymptoticsError> {
        Schedule::geometric(DEFAULT_MIN_EXP, max_exp, DEFAULT_TOL, DEFAULT_MIN_CONSECUTIVE)
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn min_consecutive(&self) -> usize {
        self.min_consecutive
    }
}

impl Default for Schedule {
    /// `2^4` through `2^40`, tolerance `1e-6`, three consecutive small deltas.
    fn default() -> Self {
        Schedule::geometric(DEFAULT_MIN_EXP, DEFAULT_MAX_EXP, DEFAULT_TOL, DEFAULT_MIN_CONSECUTIVE)
            .unwrap()
    }
}

/// Where a sequence is headed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitValue {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl LimitValue {
    /// The finite value, if there is one.
    pub fn finite(self) -> Option<f64> {
        match self {
            LimitValue::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for LimitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitValue::Finite(v) => write!(f, "{v}"),
            LimitValue::PlusInfinity => f.write_str("+inf"),
            LimitValue::MinusInfinity => f.write_str("-inf"),
        }
    }
}

/// The outcome of a limit estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: LimitValue,
    /// Did the accelerated tail (or the divergence test) actually settle?
    /// When false, `value` is only the last estimate, not a limit.
    pub converged: bool,
    /// Last accelerated delta; `0.0` for detected divergence, infinite when
    /// there were too few samples to measure anything.
    pub residual: f64,
    /// The `(p, value)` samples the estimate was computed from.
    pub samples: Vec<(f64, f64)>,
}

/// Aitken Δ² transform of a sequence. Triples with no usable curvature
/// (numerically constant or linear) fall back to their raw last element
/// rather than dividing by noise.
fn aitken(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len().saturating_sub(2));
    for k in 0..xs.len().saturating_sub(2) {
        let (x0, x1, x2) = (xs[k], xs[k + 1], xs[k + 2]);
        let d1 = x1 - x0;
        let d2 = x2 - x1;
        let denom = d2 - d1;
        let scale = x0.abs().max(x1.abs()).max(x2.abs()).max(f64::MIN_POSITIVE);
        if denom.abs() <= 1e-13 * scale {
            out.push(x2);
        } else {
            out.push(x2 - d2 * d2 / denom);
        }
    }
    out
}

/// Monotone tail with non-shrinking steps: declare the sequence infinite.
/// See the module docs for why this must run before acceleration.
fn detect_divergence(xs: &[f64], tol: f64) -> Option<LimitValue> {
    if xs.len() < 5 {
        return None;
    }
    let w = &xs[xs.len() - 5..];
    let increasing = w.windows(2).all(|ab| ab[1] > ab[0]);
    let decreasing = w.windows(2).all(|ab| ab[1] < ab[0]);
    if !increasing && !decreasing {
        return None;
    }
    let deltas: Vec<f64> = w.windows(2).map(|ab| (ab[1] - ab[0]).abs()).collect();
    let steps_not_shrinking = deltas.windows(2).all(|dd| dd[1] >= dd[0] * (1.0 - 1e-9));
    if !steps_not_shrinking {
        return None;
    }
    let last = *w.last().unwrap();
    let last_delta = *deltas.last().unwrap();
    // Divergent either by magnitude (left any range the tolerance could
    // resolve) or by pace (steps stuck at a size convergence could never
    // tolerate, which catches logarithmic growth long before its values
    // get large).
    let escaped = last.abs() >= 1.0 / tol;
    let steps_stuck = last_delta >= tol.max(1e-3 * last.abs());
    if escaped || steps_stuck {
        Some(if increasing { LimitValue::PlusInfinity } else { LimitValue::MinusInfinity })
    } else {
        None
    }
}

/// Estimate the limit of an already-sampled sequence.
///
/// `samples` are `(p, value)` pairs in schedule order. Convergence means
/// `min_consecutive` consecutive accelerated deltas at or below `tol`; the
/// reported value is the accelerated estimate at the end of the last such
/// run. Fewer than three samples can never converge.
pub fn estimate_from_samples(
    samples: &[(f64, f64)],
    tol: f64,
    min_consecutive: usize,
) -> Result<LimitEstimate, AsymptoticsError> {
    if samples.is_empty() {
        return Err(AsymptoticsError::NoSamples);
    }
    let xs: Vec<f64> = samples.iter().map(|&(_, x)| x).collect();

    if let Some(infinite) = detect_divergence(&xs, tol) {
        return Ok(LimitEstimate {
            value: infinite,
            converged: true,
            residual: 0.0,
            samples: samples.to_vec(),
        });
    }

    let accel = aitken(&xs);
    let mut run = 0usize;
    let mut accepted: Option<(f64, f64)> = None;
    for i in 1..accel.len() {
        let delta = (accel[i] - accel[i - 1]).abs();
        if delta <= tol {
            run += 1;
            if run >= min_consecutive {
                accepted = Some((accel[i], delta));
            }
        } else {
            run = 0;
        }
    }

    let estimate = match accepted {
        Some((value, residual)) => LimitEstimate {
            value: LimitValue::Finite(value),
            converged: true,
            residual,
            samples: samples.to_vec(),
        },
        None => {
            let value = *accel.last().unwrap_or_else(|| xs.last().unwrap());
            let residual = if accel.len() >= 2 {
                (accel[accel.len() - 1] - accel[accel.len() - 2]).abs()
            } else {
                f64::INFINITY
            };
            LimitEstimate {
                value: LimitValue::Finite(value),
                converged: false,
                residual,
                samples: samples.to_vec(),
            }
        }
    };
    Ok(estimate)
}

/// Estimate the limit of `seq(p)` over a schedule.
///
/// A non-finite value truncates the schedule there — the tail of a blowing-up
/// sequence is still evidence about its limit — while any other evaluation
/// failure is reported with the offending `p`.
pub fn estimate_limit<F>(mut seq: F, sched: &Schedule) -> Result<LimitEstimate, AsymptoticsError>
where
    F: FnMut(f64) -> Result<f64, EvalError>,
{
    let mut samples = Vec::with_capacity(sched.p_values().len());
    for &p in sched.p_values() {
        match seq(p) {
            Ok(x) if x.is_finite() => samples.push((p, x)),
            Ok(_) | Err(EvalError::NonFinite) => break,
            Err(source) => return Err(AsymptoticsError::Eval { p, source }),
        }
    }
    estimate_from_samples(&samples, sched.tol(), sched.min_consecutive())
}

/// Limit of the time ratio `t_par(p, g(p)) / t_ser(g(p))`.
pub fn ratio_limit(
    m: &CostModel,
    g: &GrowthFunction,
    sched: &Schedule,
) -> Result<LimitEstimate, AsymptoticsError> {
    let mut samples = Vec::with_capacity(sched.p_values().len());
    for &p in sched.p_values() {
        match scaled_ratio(m, g, p) {
            Ok(Some(r)) => samples.push((p, r)),
            Ok(None) => break,
            Err(e) => return Err(e),
        }
    }
    estimate_from_samples(&samples, sched.tol(), sched.min_consecutive())
}

/// Time ratio at `(p, g(p))`; `None` means the point overflowed.
fn scaled_ratio(m: &CostModel, g: &GrowthFunction, p: f64) -> Result<Option<f64>, AsymptoticsError> {
    let n = match g.value_at(p) {
        Ok(n) if n.is_finite() => n,
        Ok(_) | Err(EvalError::NonFinite) => return Ok(None),
        Err(source) => return Err(AsymptoticsError::Eval { p, source }),
    };
    match m.time_ratio(p, n) {
        Ok(r) => Ok(Some(r)),
        Err(ModelError::Eval { source: EvalError::NonFinite }) => Ok(None),
        Err(source) => Err(AsymptoticsError::Model { p, source }),
    }
}

/// Second-order exponent along a ratio, with the boundary clamp applied:
/// ratios at or just above `1/2` (within [`MINIMAL_CONDITION_SLACK`]) give
/// exactly `-1`.
pub(crate) fn exponent_from_ratio_clamped(ratio: f64) -> f64 {
    let rc = ratio.min(0.5);
    // Rationalized form of sqrt(1 - 2r) - 1: no cancellation as r -> 0.
    -2.0 * rc / (1.0 + (1.0 - 2.0 * rc).max(0.0).sqrt())
}

/// Limit of the second-order exponent along a growth, keeping track of
/// scheduled points where the minimal condition failed outright.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentLimit {
    /// `None` when every scheduled point violated the minimal condition:
    /// the exponent is simply not applicable along this growth.
    pub estimate: Option<LimitEstimate>,
    /// Processor counts whose ratio exceeded `1/2` beyond the boundary slack.
    pub violations: Vec<f64>,
}

/// Estimate the limit of the second-order exponent along `n = g(p)`.
///
/// Points with ratio in `(1/2, 1/2 + slack]` count as boundary points with
/// exponent exactly `-1`; points beyond the slack are recorded in
/// `violations` and excluded from the estimate.
pub fn exponent_limit(
    m: &CostModel,
    g: &GrowthFunction,
    sched: &Schedule,
) -> Result<ExponentLimit, AsymptoticsError> {
    let mut samples = Vec::with_capacity(sched.p_values().len());
    let mut violations = Vec::new();
    for &p in sched.p_values() {
        match scaled_ratio(m, g, p)? {
            Some(r) if r > 0.5 + MINIMAL_CONDITION_SLACK => violations.push(p),
            Some(r) => samples.push((p, exponent_from_ratio_clamped(r))),
            None => break,
        }
    }
    if samples.is_empty() {
        return Ok(ExponentLimit { estimate: None, violations });
    }
    let estimate = estimate_from_samples(&samples, sched.tol(), sched.min_consecutive())?;
    Ok(ExponentLimit { estimate: Some(estimate), violations })
}

/// Limit of `g(p) / p` — the quantity a linear-in-`p` constraint cares about.
pub fn growth_ratio_limit(
    g: &GrowthFunction,
    sched: &Schedule,
) -> Result<LimitEstimate, AsymptoticsError> {
    estimate_limit(
        |p| {
            let n = g.value_at(p)?;
            Ok(n / p)
        },
        sched,
    )
}
