//! Scalar speedup algebra: conversions between a program's serial fraction,
//! its speedup on `p` processors, and its exponent of parallelism.
//!
//! The model: a program with parallelizable fraction `f` run on `p`
//! processors speeds up by `S = p / (f*(1-p) + p)`, which approaches the
//! ceiling `1/(1-f)` as `p` grows. When the fraction is allowed to depend on
//! `p` and `n` it is convenient to write it as `f = (p/(p-1)) * exp(F)` for a
//! non-positive exponent `F`; `F` close to zero means the program keeps
//! scaling, large negative `F` means it is effectively serial-bound. The
//! conversions here move between these three views:
//!
//! * exact: `F = log(1 - 1/S)` and back `S = 1/(1 - exp(F))`;
//! * second-order: `F = -1 + sqrt(1 - 2/S)` and back `S = -1/(F + F^2/2)`,
//!   valid once the minimal speedup condition `S >= 2` holds.
//!
//! Superlinear values (`S > p`, equivalently `f > 1`) are representable and
//! flagged, never silently rejected; see the `superlinear` module for the
//! threshold tests.

use std::fmt;

/// Errors from the conversion routines; each names the violated domain rule.
#[derive(Debug, Clone, PartialEq)]
pub enum AmdahlError {
    /// A speedup, fraction, or measured time must be positive and finite.
    NonPositiveValue { what: &'static str, value: f64 },
    /// An exponent must be a finite real.
    NonFiniteExponent { value: f64 },
    /// The conversion needs more than one processor.
    ProcessorCountTooSmall { p: f64 },
    /// `f*(1-p) + p <= 0`: the speedup formula has no positive value there.
    NonPositiveDenominator { fraction: f64, p: f64 },
    /// The limit `1/(1-f)` grows without bound as `f -> 1`.
    UnboundedLimit,
    /// `f > 1` has no finite serial-fraction ceiling.
    SuperunitaryFraction { fraction: f64 },
    /// `S <= 1`: no parallel gain, so no fraction/exponent represents it.
    NoParallelGain { speedup: f64 },
    /// The second-order forms need the minimal condition `S >= 2`.
    MinimalConditionViolated { speedup: f64 },
    /// `F >= 0` encodes a superlinear or unbounded regime with no finite
    /// speedup under the exact inverse.
    ExponentNotNegative { exponent: f64 },
    /// The second-order inverse is only defined on `-2 < F < 0`.
    ExponentOutOfRange { exponent: f64 },
}

impl fmt::Display for AmdahlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmdahlError::NonPositiveValue { what, value } => {
                write!(f, "{what} must be positive and finite, got {value}")
            }
            AmdahlError::NonFiniteExponent { value } => {
                write!(f, "exponent must be finite, got {value}")
            }
            AmdahlError::ProcessorCountTooSmall { p } => {
                write!(f, "processor count must exceed 1, got {p}")
            }
            AmdahlError::NonPositiveDenominator { fraction, p } => {
                write!(f, "f*(1-p) + p is not positive for f = {fraction}, p = {p}")
            }
            AmdahlError::UnboundedLimit => {
                write!(f, "the speedup limit is unbounded at f = 1")
            }
            AmdahlError::SuperunitaryFraction { fraction } => {
                write!(f, "no finite limit for fraction {fraction} > 1")
            }
            AmdahlError::NoParallelGain { speedup } => {
                write!(f, "speedup {speedup} <= 1 leaves nothing to convert")
            }
            AmdahlError::MinimalConditionViolated { speedup } => {
                write!(f, "speedup {speedup} < 2 violates the minimal condition")
            }
            AmdahlError::ExponentNotNegative { exponent } => {
                write!(f, "exponent {exponent} >= 0: superlinear or unbounded regime")
            }
            AmdahlError::ExponentOutOfRange { exponent } => {
                write!(f, "exponent {exponent} outside (-2, 0)")
            }
        }
    }
}

impl std::error::Error for AmdahlError {}

/// Ratio of serial to parallel execution time; positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Speedup(f64);

impl Speedup {
    pub fn new(value: f64) -> Result<Self, AmdahlError> {
        if value.is_finite() && value > 0.0 {
            Ok(Speedup(value))
        } else {
            Err(AmdahlError::NonPositiveValue { what: "speedup", value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Speedup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parallelizable fraction of the work; positive, finite, and allowed to
/// exceed 1 so that superlinear measurements stay representable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fraction(f64);

impl Fraction {
    pub fn new(value: f64) -> Result<Self, AmdahlError> {
        if value.is_finite() && value > 0.0 {
            Ok(Fraction(value))
        } else {
            Err(AmdahlError::NonPositiveValue { what: "fraction", value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `f > 1` can only come from a superlinear measurement.
    pub fn is_superlinear(self) -> bool {
        self.0 > 1.0
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exponent of parallelism `F`, with `f = (p/(p-1)) * exp(F)`. Ordinary
/// sublinear scaling gives `F < 0`; values at or above zero are kept
/// representable so superlinear regimes can be reported.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(value: f64) -> Result<Self, AmdahlError> {
        if value.is_finite() {
            Ok(Exponent(value))
        } else {
            Err(AmdahlError::NonFiniteExponent { value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_p(p: f64) -> Result<(), AmdahlError> {
    if !p.is_finite() || p <= 1.0 {
        Err(AmdahlError::ProcessorCountTooSmall { p })
    } else {
        Ok(())
    }
}

/// Speedup on `p` processors of a program with parallelizable fraction `f`:
/// `S = p / (f*(1-p) + p)`.
pub fn speedup_from_fraction(f: Fraction, p: f64) -> Result<Speedup, AmdahlError> {
    check_p(p)?;
    let denom = f.value() * (1.0 - p) + p;
    if denom <= 0.0 {
        return Err(AmdahlError::NonPositiveDenominator { fraction: f.value(), p });
    }
    Speedup::new(p / denom)
}

/// The `p -> infinity` ceiling of the speedup: `1/(1-f)` for `f < 1`.
///
/// `f = 1` is reported as the distinguished unbounded outcome rather than a
/// number, and `f > 1` has no ceiling at all.
pub fn amdahl_limit(f: Fraction) -> Result<Speedup, AmdahlError> {
    if f.value() == 1.0 {
        return Err(AmdahlError::UnboundedLimit);
    }
    if f.value() > 1.0 {
        return Err(AmdahlError::SuperunitaryFraction { fraction: f.value() });
    }
    Speedup::new(1.0 / (1.0 - f.value()))
}

/// Invert the speedup formula for the fraction: `f = (p/(p-1)) * (1 - 1/S)`.
///
/// Needs `S > 1`; a program that does not speed up has no positive
/// parallelizable fraction to recover.
pub fn fraction_from_speedup(s: Speedup, p: f64) -> Result<Fraction, AmdahlError> {
    check_p(p)?;
    if s.value() <= 1.0 {
        return Err(AmdahlError::NoParallelGain { speedup: s.value() });
    }
    Fraction::new(p / (p - 1.0) * (1.0 - 1.0 / s.value()))
}

/// Exact exponent of parallelism: `F = log(1 - 1/S)`, defined for `S > 1`.
pub fn exponent_exact(s: Speedup) -> Result<Exponent, AmdahlError> {
    if s.value() <= 1.0 {
        return Err(AmdahlError::NoParallelGain { speedup: s.value() });
    }
    // ln_1p keeps full precision when 1/S is tiny.
    Exponent::new((-1.0 / s.value()).ln_1p())
}

/// Exact inverse of [`exponent_exact`]: `S = 1/(1 - exp(F))` for `F < 0`.
///
/// `F >= 0` is reported as the distinguished superlinear/unbounded outcome.
pub fn speedup_from_exponent(f: Exponent) -> Result<Speedup, AmdahlError> {
    if f.value() >= 0.0 {
        return Err(AmdahlError::ExponentNotNegative { exponent: f.value() });
    }
    // 1 - exp(F) computed as -exp_m1(F) to avoid cancellation near F = 0.
    Speedup::new(-1.0 / f.value().exp_m1())
}

/// Second-order exponent of parallelism: `F = -1 + sqrt(1 - 2/S)`.
///
/// Only the root that keeps `F` in `[-1, 0)` solves the quadratic
/// truncation of the exact relation, and it needs the minimal condition
/// `S >= 2`; smaller speedups are reported as a minimal-condition violation.
pub fn exponent_approx(s: Speedup) -> Result<Exponent, AmdahlError> {
    if s.value() < 2.0 {
        return Err(AmdahlError::MinimalConditionViolated { speedup: s.value() });
    }
    // Rationalized form of -1 + sqrt(1 - 2/S): identical value, no
    // cancellation when S is large.
    let root = (1.0 - 2.0 / s.value()).sqrt();
    Exponent::new(-2.0 / (s.value() * (1.0 + root)))
}

/// Second-order fraction: `f = (p/(p-1)) * (1 + F + F^2/2)`.
pub fn fraction_approx_from_exponent(f: Exponent, p: f64) -> Result<Fraction, AmdahlError> {
    check_p(p)?;
    let e = f.value();
    Fraction::new(p / (p - 1.0) * (1.0 + e + e * e / 2.0))
}

/// Inverse of [`exponent_approx`]: `S = -1/(F + F^2/2)` on `-2 < F < 0`.
pub fn speedup_from_exponent_approx(f: Exponent) -> Result<Speedup, AmdahlError> {
    let e = f.value();
    if e <= -2.0 || e >= 0.0 {
        return Err(AmdahlError::ExponentOutOfRange { exponent: e });
    }
    Speedup::new(-1.0 / (e + e * e / 2.0))
}

/// The minimal condition of parallelism: running on `p` processors at least
/// halves the single-processor parallel-form time, `T(p) <= T(1)/2`.
/// Equivalent to `S >= 2`.
pub fn minimal_condition(t_par_p: f64, t_par_1: f64) -> Result<bool, AmdahlError> {
    if !t_par_p.is_finite() || t_par_p <= 0.0 {
        return Err(AmdahlError::NonPositiveValue { what: "parallel time", value: t_par_p });
    }
    if !t_par_1.is_finite() || t_par_1 <= 0.0 {
        return Err(AmdahlError::NonPositiveValue { what: "baseline time", value: t_par_1 });
    }
    Ok(t_par_p <= t_par_1 / 2.0)
}
