//! Superlinearity tests and bounds.
//!
//! A speedup is superlinear when `S > p` — each processor is somehow worth
//! more than one processor, which with a smooth cost model can only come
//! from the problem growing as the machine does. In exponent terms the
//! frontier sits at `F = log(1 - 1/p)`: exponents above it are superlinear.
//! Three equivalent-by-construction forms of the test live here:
//!
//! * **exact**: `F > log(1 - 1/p)`, the frontier itself;
//! * **approximate**: `F > -1/(2p^2) - 1/p`, the frontier's second-order
//!   expansion, slightly conservative (the approximate threshold sits just
//!   above the exact one, so passing it implies passing the exact test);
//! * **speedup form**: `1/(2S^2) + 1/S < 1/(2p^2) + 1/p`, which avoids
//!   computing `F` at all and is exactly equivalent to `S > p` because
//!   `x -> 1/(2x^2) + 1/x` is strictly decreasing.
//!
//! For the in-place FFT with `n = k*p` rows the speedup form turns into a
//! quadratic in `p`, giving a closed-form largest processor count
//! [`fft_superlinear_pmax`]; [`fft_superlinear_pmax_scan`] re-derives it by
//! brute force for cross-checking.

use std::fmt;

use crate::amdahl::{Exponent, Speedup};

/// Errors from the superlinearity operations.
#[derive(Debug, Clone, PartialEq)]
pub enum SuperlinearError {
    /// Thresholds are only defined for more than one processor.
    ProcessorCountTooSmall { p: f64 },
    NonPositiveParameter { what: &'static str, value: f64 },
}

impl fmt::Display for SuperlinearError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuperlinearError::ProcessorCountTooSmall { p } => {
                write!(f, "superlinearity needs p > 1, got {p}")
            }
            SuperlinearError::NonPositiveParameter { what, value } => {
                write!(f, "{what} must be positive, got {value}")
            }
        }
    }
}

impl std::error::Error for SuperlinearError {}

fn check_p(p: f64) -> Result<(), SuperlinearError> {
    if !p.is_finite() || p <= 1.0 {
        return Err(SuperlinearError::ProcessorCountTooSmall { p });
    }
    Ok(())
}

/// The exact superlinearity frontier `log(1 - 1/p)`.
pub fn superlinear_threshold_exact(p: f64) -> Result<f64, SuperlinearError> {
    check_p(p)?;
    Ok((-1.0 / p).ln_1p())
}

/// The second-order frontier `-1/(2p^2) - 1/p`; strictly above the exact
/// one, so it is the conservative test.
pub fn superlinear_threshold_approx(p: f64) -> Result<f64, SuperlinearError> {
    check_p(p)?;
    Ok(-1.0 / (2.0 * p * p) - 1.0 / p)
}

/// Exact test: is the exponent above the frontier? Equivalent to `S > p`.
pub fn superlinear_exact(f: Exponent, p: f64) -> Result<bool, SuperlinearError> {
    Ok(f.value() > superlinear_threshold_exact(p)?)
}

/// Conservative second-order test; passing it implies [`superlinear_exact`].
pub fn superlinear_approx(f: Exponent, p: f64) -> Result<bool, SuperlinearError> {
    Ok(f.value() > superlinear_threshold_approx(p)?)
}

/// The speedup-form test `1/(2S^2) + 1/S < 1/(2p^2) + 1/p`, exactly
/// equivalent to `S > p`.
pub fn superlinear_speedup_condition(s: Speedup, p: f64) -> Result<bool, SuperlinearError> {
    check_p(p)?;
    let phi = |x: f64| 1.0 / (2.0 * x * x) + 1.0 / x;
    Ok(phi(s.value()) < phi(p))
}

/// Everything the three tests say about one `(F, p)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperlinearReport {
    pub p: f64,
    pub exponent: f64,
    pub threshold_exact: f64,
    pub threshold_approx: f64,
    pub exact_holds: bool,
    pub approx_holds: bool,
    /// The speedup-form test applied to the speedup this exponent implies.
    /// A non-negative exponent has no finite speedup; it counts as
    /// superlinear outright.
    pub speedup_form_holds: bool,
}

/// Run all three tests for an exponent at a processor count.
pub fn report(f: Exponent, p: f64) -> Result<SuperlinearReport, SuperlinearError> {
    let threshold_exact = superlinear_threshold_exact(p)?;
    let threshold_approx = superlinear_threshold_approx(p)?;
    let speedup_form_holds = if f.value() < 0.0 {
        let s = Speedup::new(-1.0 / f.value().exp_m1()).expect("negative exponent gives a speedup");
        superlinear_speedup_condition(s, p)?
    } else {
        true
    };
    Ok(SuperlinearReport {
        p,
        exponent: f.value(),
        threshold_exact,
        threshold_approx,
        exact_holds: f.value() > threshold_exact,
        approx_holds: f.value() > threshold_approx,
        speedup_form_holds,
    })
}

fn check_fft_params(c: f64, n: f64) -> Result<(), SuperlinearError> {
    if !c.is_finite() || c <= 0.0 {
        return Err(SuperlinearError::NonPositiveParameter { what: "cost ratio C", value: c });
    }
    if !n.is_finite() || n < 1.0 {
        return Err(SuperlinearError::NonPositiveParameter { what: "problem dimension", value: n });
    }
    Ok(())
}

/// Closed-form supremum of processor counts where the FFT speedup form
/// holds: `p < (n + sqrt(n^2 + 2*C*n)) / (2*C)`. The bound itself is
/// excluded — when it lands exactly on an integer, that integer no longer
/// satisfies the strict condition.
pub fn fft_superlinear_pmax(c: f64, n: f64) -> Result<f64, SuperlinearError> {
    check_fft_params(c, n)?;
    Ok((n + (n * n + 2.0 * c * n).sqrt()) / (2.0 * c))
}

/// Brute-force cross-check of [`fft_superlinear_pmax`]: the largest integer
/// `p >= 1` with `1/(2p^2) + 1/p > C/n`, found by linear scan (so `O(n/C)`
/// time), or `0` when even `p = 1` fails.
pub fn fft_superlinear_pmax_scan(c: f64, n: f64) -> Result<u64, SuperlinearError> {
    check_fft_params(c, n)?;
    let target = c / n;
    let mut best = 0u64;
    let mut p = 1u64;
    loop {
        let pf = p as f64;
        if 1.0 / (2.0 * pf * pf) + 1.0 / pf > target {
            best = p;
            p += 1;
        } else {
            return Ok(best);
        }
    }
}
