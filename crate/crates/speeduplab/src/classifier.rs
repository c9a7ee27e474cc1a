//! Classification of a cost model's parallelism from scaled-problem limits.
//!
//! The question answered here: if the problem is allowed to grow with the
//! machine, does the speedup keep up? Each candidate [`GrowthFunction`]
//! `n = g(p)` contributes one piece of [`GrowthEvidence`]:
//!
//! * the growth's *kind* — whether `g(p)/p` tends to a finite positive
//!   ratio or blows up (growths that shrink relative to `p`, stop
//!   increasing, or fail to settle are `Rejected`);
//! * whether the model's own [`GrowthConstraint`] admits the growth;
//! * the limit of the second-order exponent along it.
//!
//! The verdict then reads off the evidence. An exponent that vanishes along
//! an unbounded-ratio growth means the speedup tracks an unbounded problem:
//! [`Verdict::Strong`]. Vanishing only along finite-ratio growths:
//! [`Verdict::Weak`]. A strictly negative limit along every usable growth
//! means a hard ceiling no amount of problem growth escapes:
//! [`Verdict::AmdahlLike`]. Anything else is [`Verdict::Inconclusive`].

use std::fmt;

use crate::asymptotics::{
    self, ExponentLimit, LimitEstimate, LimitValue, Schedule, MINIMAL_CONDITION_SLACK,
};
use crate::expr::EvalError;
use crate::model::{
    growth_prefix, is_strictly_increasing, CostModel, ExponentOutcome, GrowthConstraint,
    GrowthFunction, ModelError,
};

/// Exponent limits within this distance of zero count as vanishing, and
/// limits below its negation count as strictly negative.
pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-3;

/// Errors from the pointwise diagnostics (curves and monotonicity scans).
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierError {
    InvalidProcessorRange { p_min: f64, p_max: f64 },
    InvalidStepCount { steps: usize },
    InvalidZeroTolerance { tol: f64 },
    /// The growth failed to evaluate at a grid point.
    Growth { p: f64, source: EvalError },
    /// The model failed to evaluate at a grid point.
    Model { p: f64, source: ModelError },
}

impl fmt::Display for ClassifierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierError::InvalidProcessorRange { p_min, p_max } => {
                write!(f, "need 1 <= p_min < p_max, got [{p_min}, {p_max}]")
            }
            ClassifierError::InvalidStepCount { steps } => {
                write!(f, "need at least 4 grid points, got {steps}")
            }
            ClassifierError::InvalidZeroTolerance { tol } => {
                write!(f, "zero tolerance must be positive and finite, got {tol}")
            }
            ClassifierError::Growth { p, source } => {
                write!(f, "growth failed at p = {p}: {source}")
            }
            ClassifierError::Model { p, source } => {
                write!(f, "model failed at p = {p}: {source}")
            }
        }
    }
}

impl std::error::Error for ClassifierError {}

/// How `g(p)` compares to `p` in the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthKind {
    /// `g(p)/p` settles at a finite positive ratio.
    FiniteRatio,
    /// `g(p)/p` grows without bound.
    InfiniteRatio,
    /// Not usable as scaling evidence: non-increasing, vanishing relative
    /// to `p`, or numerically unresolved.
    Rejected,
}

impl fmt::Display for GrowthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrowthKind::FiniteRatio => "finite_ratio",
            GrowthKind::InfiniteRatio => "infinite_ratio",
            GrowthKind::Rejected => "rejected",
        })
    }
}

/// The classification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The exponent vanishes along a growth that outpaces the machine.
    Strong,
    /// The exponent vanishes, but only along finite-ratio growths.
    Weak,
    /// Every usable growth leaves a strictly negative exponent: the model
    /// has a speedup ceiling that problem growth cannot lift.
    AmdahlLike,
    /// The evidence does not support any of the above.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Strong => "strong",
            Verdict::Weak => "weak",
            Verdict::AmdahlLike => "amdahl_like",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// What one growth function contributed to the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEvidence {
    pub growth: String,
    pub kind: GrowthKind,
    /// Whether the model's constraint admits this growth.
    pub admissible: bool,
    /// The exponent limit, computed only for admissible, non-rejected
    /// growths. Inside, `estimate` is `None` when the minimal condition
    /// failed at every scheduled point.
    pub exponent: Option<ExponentLimit>,
    /// True when `g(p) < p` somewhere on the schedule — more processors
    /// than problem elements, worth flagging even when otherwise usable.
    pub below_processor_count: bool,
}

impl GrowthEvidence {
    /// The converged finite exponent limit, when there is one.
    pub fn exponent_value(&self) -> Option<f64> {
        let est = self.exponent.as_ref()?.estimate.as_ref()?;
        if est.converged {
            est.value.finite()
        } else {
            None
        }
    }
}

/// A verdict together with the per-growth evidence it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub zero_tolerance: f64,
    pub evidence: Vec<GrowthEvidence>,
}

impl ClassificationResult {
    /// The evidence entry for a growth, by name.
    pub fn evidence_for(&self, growth: &str) -> Option<&GrowthEvidence> {
        self.evidence.iter().find(|e| e.growth == growth)
    }
}

/// Classify `m` against a family of growths over a schedule.
///
/// Failures along individual growths (evaluation errors, unresolved limits)
/// downgrade that growth to `Rejected` rather than aborting: a verdict is
/// always produced, if only `Inconclusive`.
pub fn classify(
    m: &CostModel,
    family: &[GrowthFunction],
    sched: &Schedule,
    zero_tolerance: f64,
) -> ClassificationResult {
    let zero_tolerance = if zero_tolerance.is_finite() && zero_tolerance > 0.0 {
        zero_tolerance
    } else {
        DEFAULT_ZERO_TOLERANCE
    };
    let mut evidence = Vec::with_capacity(family.len());
    for g in family {
        evidence.push(weigh(m, g, sched, zero_tolerance));
    }

    let near_zero = |est: &LimitEstimate| {
        est.converged && matches!(est.value, LimitValue::Finite(v) if v.abs() <= zero_tolerance)
    };
    let negative = |est: &LimitEstimate| {
        est.converged && matches!(est.value, LimitValue::Finite(v) if v < -zero_tolerance)
    };
    let usable: Vec<&GrowthEvidence> = evidence
        .iter()
        .filter(|e| e.admissible && e.kind != GrowthKind::Rejected)
        .collect();
    fn estimate_of(e: &GrowthEvidence) -> Option<&LimitEstimate> {
        e.exponent.as_ref().and_then(|el| el.estimate.as_ref())
    }

    let strong = usable.iter().any(|e| {
        e.kind == GrowthKind::InfiniteRatio && estimate_of(e).is_some_and(near_zero)
    });
    let weak = usable.iter().any(|e| {
        e.kind == GrowthKind::FiniteRatio && estimate_of(e).is_some_and(near_zero)
    });
    let amdahl_like =
        !usable.is_empty() && usable.iter().all(|e| estimate_of(e).is_some_and(negative));

    let verdict = if strong {
        Verdict::Strong
    } else if weak {
        Verdict::Weak
    } else if amdahl_like {
        Verdict::AmdahlLike
    } else {
        Verdict::Inconclusive
    };

    ClassificationResult { verdict, zero_tolerance, evidence }
}

/// Classify with the default schedule, family, and tolerance.
pub fn classify_default(m: &CostModel) -> ClassificationResult {
    classify(m, &GrowthFunction::default_family(), &Schedule::default(), DEFAULT_ZERO_TOLERANCE)
}

fn weigh(
    m: &CostModel,
    g: &GrowthFunction,
    sched: &Schedule,
    zero_tolerance: f64,
) -> GrowthEvidence {
    let rejected = |below| GrowthEvidence {
        growth: g.name().to_string(),
        kind: GrowthKind::Rejected,
        admissible: false,
        exponent: None,
        below_processor_count: below,
    };

    let prefix = match growth_prefix(g, sched.p_values()) {
        Ok(prefix) if prefix.len() >= 3 => prefix,
        _ => return rejected(false),
    };
    let below = prefix.iter().any(|&(p, n)| n < p);
    let values: Vec<f64> = prefix.iter().map(|&(_, n)| n).collect();
    if !is_strictly_increasing(&values) {
        return rejected(below);
    }

    let mut kind = match asymptotics::growth_ratio_limit(g, sched) {
        Ok(est) if est.converged => match est.value {
            LimitValue::PlusInfinity => GrowthKind::InfiniteRatio,
            LimitValue::Finite(v) if v > zero_tolerance => GrowthKind::FiniteRatio,
            _ => GrowthKind::Rejected,
        },
        _ => GrowthKind::Rejected,
    };

    let admissible = kind != GrowthKind::Rejected
        && match m.constraint() {
            GrowthConstraint::Free => true,
            GrowthConstraint::LinearInP { .. } => kind == GrowthKind::FiniteRatio,
        };

    let exponent = if admissible && kind != GrowthKind::Rejected {
        match asymptotics::exponent_limit(m, g, sched) {
            Ok(el) => {
                if matches!(
                    el.estimate,
                    Some(LimitEstimate { value: LimitValue::MinusInfinity, .. })
                ) {
                    kind = GrowthKind::Rejected;
                }
                Some(el)
            }
            Err(_) => {
                kind = GrowthKind::Rejected;
                None
            }
        }
    } else {
        None
    };

    GrowthEvidence {
        growth: g.name().to_string(),
        kind,
        admissible,
        exponent,
        below_processor_count: below,
    }
}

/// One scheduled point of an exponent curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub p: f64,
    pub n: f64,
    pub outcome: ExponentOutcome,
}

/// The pointwise second-order exponent along `n = g(p)` over a schedule.
///
/// Points past the minimal-condition boundary come back as
/// [`ExponentOutcome::NotApplicable`] with the offending ratio instead of a
/// value; overflow truncates the curve.
pub fn exponent_curve(
    m: &CostModel,
    g: &GrowthFunction,
    sched: &Schedule,
) -> Result<Vec<CurvePoint>, ClassifierError> {
    let mut curve = Vec::with_capacity(sched.p_values().len());
    for &p in sched.p_values() {
        let n = match g.value_at(p) {
            Ok(n) if n.is_finite() => n,
            Ok(_) | Err(EvalError::NonFinite) => break,
            Err(source) => return Err(ClassifierError::Growth { p, source }),
        };
        let ratio = match m.time_ratio(p, n) {
            Ok(r) => r,
            Err(ModelError::Eval { source: EvalError::NonFinite }) => break,
            Err(source) => return Err(ClassifierError::Model { p, source }),
        };
        let outcome = if ratio > 0.5 + MINIMAL_CONDITION_SLACK {
            ExponentOutcome::NotApplicable { ratio }
        } else {
            ExponentOutcome::Value(asymptotics::exponent_from_ratio_clamped(ratio))
        };
        curve.push(CurvePoint { p, n, outcome });
    }
    Ok(curve)
}

/// A speedup sample that decreased beyond numerical noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation {
    pub p: f64,
    /// How far the speedup fell across this point's neighbors.
    pub drop: f64,
    /// The largest drop that would still have been attributed to noise.
    pub allowance: f64,
}

/// Result of a speedup monotonicity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub passed: bool,
    pub violations: Vec<MonotonicityViolation>,
    /// The `(p, speedup)` samples scanned.
    pub samples: Vec<(f64, f64)>,
}

/// Scan `p -> speedup(p, g(p))` on a geometric grid and flag any decrease
/// larger than numerical noise (`1e-9` relative, centered differences).
pub fn monotonicity_check(
    m: &CostModel,
    g: &GrowthFunction,
    p_min: f64,
    p_max: f64,
    steps: usize,
) -> Result<MonotonicityReport, ClassifierError> {
    if !(p_min.is_finite() && p_max.is_finite()) || p_min < 1.0 || p_max <= p_min {
        return Err(ClassifierError::InvalidProcessorRange { p_min, p_max });
    }
    if steps < 4 {
        return Err(ClassifierError::InvalidStepCount { steps });
    }
    let grid = geometric_grid(p_min, p_max, steps);
    let mut samples = Vec::with_capacity(steps);
    for &p in &grid {
        let n = g.value_at(p).map_err(|source| ClassifierError::Growth { p, source })?;
        let s = m.speedup(p, n).map_err(|source| ClassifierError::Model { p, source })?;
        samples.push((p, s.value()));
    }
    let mut violations = Vec::new();
    for i in 1..samples.len() - 1 {
        let drop = samples[i - 1].1 - samples[i + 1].1;
        let allowance = 1e-9 * samples[i].1.abs();
        if drop > allowance {
            violations.push(MonotonicityViolation { p: samples[i].0, drop, allowance });
        }
    }
    Ok(MonotonicityReport { passed: violations.is_empty(), violations, samples })
}

/// `steps` points from `p_min` to `p_max`, geometrically spaced, endpoints
/// exact.
pub(crate) fn geometric_grid(p_min: f64, p_max: f64, steps: usize) -> Vec<f64> {
    let ratio = (p_max / p_min).powf(1.0 / (steps as f64 - 1.0));
    let mut grid = Vec::with_capacity(steps);
    grid.push(p_min);
    for i in 1..steps - 1 {
        grid.push(p_min * ratio.powi(i as i32));
    }
    grid.push(p_max);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bundled_models_get_their_textbook_verdicts() {
        assert_eq!(classify_default(&CostModel::trapezoid()).verdict, Verdict::Strong);
        assert_eq!(classify_default(&CostModel::matvec()).verdict, Verdict::AmdahlLike);
        assert_eq!(classify_default(&CostModel::fft()).verdict, Verdict::Weak);
    }

    #[test]
    fn strong_verdict_names_an_unbounded_witness() {
        let result = classify_default(&CostModel::trapezoid());
        let ev = result.evidence_for("p^2").unwrap();
        assert_eq!(ev.kind, GrowthKind::InfiniteRatio);
        assert!(ev.admissible);
        let v = ev.exponent_value().unwrap();
        assert!(v.abs() <= result.zero_tolerance, "exponent limit {v}");
    }

    #[test]
    fn quadrature_model_is_only_weak_along_linear_growth() {
        let family = [GrowthFunction::identity()];
        let result = classify(
            &CostModel::trapezoid(),
            &family,
            &Schedule::default(),
            DEFAULT_ZERO_TOLERANCE,
        );
        assert_eq!(result.verdict, Verdict::Weak);
        assert_eq!(result.evidence[0].kind, GrowthKind::FiniteRatio);
    }

    #[test]
    fn refining_the_family_never_weakens_the_verdict() {
        let families: Vec<Vec<GrowthFunction>> = vec![
            vec![GrowthFunction::identity()],
            vec![GrowthFunction::identity(), GrowthFunction::p_log_p()],
            vec![GrowthFunction::identity(), GrowthFunction::p_log_p(), GrowthFunction::p_squared()],
            GrowthFunction::default_family(),
        ];
        let sched = Schedule::default();
        let expect = |m: &CostModel| -> Vec<Verdict> {
            families
                .iter()
                .map(|f| classify(m, f, &sched, DEFAULT_ZERO_TOLERANCE).verdict)
                .collect()
        };
        // p*log(p) already has g/p -> infinity, so it upgrades the verdict
        // on its own; p^2 keeps it there.
        assert_eq!(
            expect(&CostModel::trapezoid()),
            vec![Verdict::Weak, Verdict::Strong, Verdict::Strong, Verdict::Strong]
        );
        assert_eq!(expect(&CostModel::matvec()), vec![Verdict::AmdahlLike; 4]);
        assert_eq!(expect(&CostModel::fft()), vec![Verdict::Weak; 4]);
    }

    #[test]
    fn verdicts_are_invariant_under_uniform_constant_scaling() {
        for lambda in [0.01, 100.0] {
            let trapezoid = CostModel::trapezoid()
                .with_constant("a", lambda)
                .unwrap()
                .with_constant("b", lambda)
                .unwrap();
            assert_eq!(classify_default(&trapezoid).verdict, Verdict::Strong);
            let matvec = CostModel::matvec()
                .with_constant("a", lambda)
                .unwrap()
                .with_constant("b", 2.0 * lambda)
                .unwrap();
            assert_eq!(classify_default(&matvec).verdict, Verdict::AmdahlLike);
            let fft = CostModel::fft()
                .with_constant("A", lambda)
                .unwrap()
                .with_constant("B", lambda)
                .unwrap();
            assert_eq!(classify_default(&fft).verdict, Verdict::Weak);
        }
    }

    #[test]
    fn matvec_exponent_limit_is_minus_one_along_every_usable_growth() {
        let result = classify_default(&CostModel::matvec());
        let usable: Vec<_> = result
            .evidence
            .iter()
            .filter(|e| e.admissible && e.kind != GrowthKind::Rejected)
            .collect();
        assert_eq!(usable.len(), 5);
        for ev in usable {
            assert_eq!(ev.exponent_value(), Some(-1.0), "growth {}", ev.growth);
        }
    }

    #[test]
    fn linear_constraint_rules_out_superlinear_growths() {
        let result = classify_default(&CostModel::fft());
        for name in ["p*log(p)", "p^2", "p^3"] {
            let ev = result.evidence_for(name).unwrap();
            assert_eq!(ev.kind, GrowthKind::InfiniteRatio);
            assert!(!ev.admissible);
            assert!(ev.exponent.is_none());
        }
        for name in ["p", "100*p"] {
            let ev = result.evidence_for(name).unwrap();
            assert_eq!(ev.kind, GrowthKind::FiniteRatio);
            assert!(ev.admissible);
        }
    }

    #[test]
    fn degenerate_growths_are_rejected() {
        let sched = Schedule::default();
        let family = [
            GrowthFunction::constant(1e6).unwrap(),           // not increasing
            GrowthFunction::parse("sqrt(p)", "sqrt(p)").unwrap(), // vanishing ratio
        ];
        let result = classify(&CostModel::trapezoid(), &family, &sched, DEFAULT_ZERO_TOLERANCE);
        assert_eq!(result.verdict, Verdict::Inconclusive);
        for ev in &result.evidence {
            assert_eq!(ev.kind, GrowthKind::Rejected, "growth {}", ev.growth);
            assert!(ev.exponent.is_none());
        }
        // sqrt(p) < p on the whole schedule.
        assert!(result.evidence[1].below_processor_count);
    }

    #[test]
    fn exponent_curve_along_quadratic_growth() {
        let curve = exponent_curve(
            &CostModel::trapezoid(),
            &GrowthFunction::p_squared(),
            &Schedule::default(),
        )
        .unwrap();
        assert_eq!(curve.len(), 37);
        let point = curve.iter().find(|c| c.p == 1024.0).unwrap();
        assert_eq!(point.n, 1024.0 * 1024.0);
        let ExponentOutcome::Value(f) = point.outcome else {
            panic!("expected a value at p = 1024");
        };
        // Independent plain-form check: ratio = (p + ln p) / p^2.
        let ratio: f64 = (1024.0 + 1024f64.ln()) / (1024.0 * 1024.0);
        assert_relative_eq!(f, (1.0 - 2.0 * ratio).sqrt() - 1.0, max_relative = 1e-12);
        assert_relative_eq!(f, -9.8366e-4, max_relative = 1e-4);
    }

    #[test]
    fn exponent_curve_marks_the_matvec_knee() {
        let curve = exponent_curve(
            &CostModel::matvec(),
            &GrowthFunction::identity(),
            &Schedule::default(),
        )
        .unwrap();
        let knee = 2f64.powi(30);
        for point in &curve {
            if point.p < knee {
                assert!(
                    matches!(point.outcome, ExponentOutcome::NotApplicable { ratio } if ratio > 0.5),
                    "p = {} should violate the minimal condition",
                    point.p
                );
            } else {
                assert_eq!(point.outcome, ExponentOutcome::Value(-1.0), "p = {}", point.p);
            }
        }
    }

    #[test]
    fn exponent_curve_on_a_fixed_problem_flags_small_p() {
        let sched = Schedule::geometric(1, 20, 1e-6, 3).unwrap();
        let g = GrowthFunction::constant(1e6).unwrap();
        let curve = exponent_curve(&CostModel::trapezoid(), &g, &sched).unwrap();
        // At p = 2 the ratio is 0.5000007: past the boundary, and further
        // out than the boundary slack is allowed to forgive.
        assert!(
            matches!(curve[0].outcome, ExponentOutcome::NotApplicable { ratio } if ratio > 0.5)
        );
        for point in &curve[1..] {
            assert!(matches!(point.outcome, ExponentOutcome::Value(_)), "p = {}", point.p);
        }
    }

    #[test]
    fn monotonicity_holds_for_scaled_problems() {
        let report = monotonicity_check(
            &CostModel::trapezoid(),
            &GrowthFunction::p_squared(),
            2.0,
            1e4,
            64,
        )
        .unwrap();
        assert!(report.passed, "violations: {:?}", report.violations);

        let report =
            monotonicity_check(&CostModel::matvec(), &GrowthFunction::identity(), 2.0, 1e4, 64)
                .unwrap();
        assert!(report.passed);
    }

    #[test]
    fn monotonicity_fails_for_a_fixed_problem_past_its_peak() {
        // With n fixed at 1000, t_par = n/p + ln p bottoms out at p = n and
        // the speedup decreases beyond it.
        let g = GrowthFunction::constant(1000.0).unwrap();
        let report =
            monotonicity_check(&CostModel::trapezoid(), &g, 2.0, 1e5, 64).unwrap();
        assert!(!report.passed);
        assert!(!report.violations.is_empty());
        assert!(report.violations.iter().all(|v| v.p > 900.0));
        assert!(report.violations.iter().any(|v| v.p < 1e5));
    }

    #[test]
    fn diagnostics_validate_their_inputs() {
        let m = CostModel::trapezoid();
        let g = GrowthFunction::identity();
        assert!(matches!(
            monotonicity_check(&m, &g, 10.0, 2.0, 64),
            Err(ClassifierError::InvalidProcessorRange { .. })
        ));
        assert!(matches!(
            monotonicity_check(&m, &g, 2.0, 100.0, 3),
            Err(ClassifierError::InvalidStepCount { .. })
        ));
    }

    #[test]
    fn geometric_grid_hits_both_endpoints() {
        let grid = geometric_grid(2.0, 1024.0, 10);
        assert_eq!(grid.len(), 10);
        assert_eq!(grid[0], 2.0);
        assert_eq!(grid[9], 1024.0);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        let ratio = grid[1] / grid[0];
        for w in grid.windows(2) {
            assert_relative_eq!(w[1] / w[0], ratio, max_relative = 1e-9);
        }
    }
}
