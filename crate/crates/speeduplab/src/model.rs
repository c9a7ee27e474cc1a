//! Parametric cost models and problem-growth functions.
//!
//! A [`CostModel`] describes the parallel running time of an algorithm as an
//! expression `t_par(p, n)` over processor count and problem dimension, with
//! named constants bound from a table. The serial baseline defaults to
//! `t_par` evaluated at `p = 1`; models whose serial algorithm differs from
//! the parallel one run on a single processor (the FFT is the classic case)
//! carry an explicit `t_ser(n)`.
//!
//! A [`GrowthFunction`] `g` ties the problem dimension to the processor
//! count, `n = g(p)`, which is how "scale the problem with the machine"
//! scenarios are expressed. Models can restrict which growths make sense for
//! them through a [`GrowthConstraint`]: an in-place FFT over `n = k*p` rows,
//! for example, only admits growths with `n/p` tending to a finite positive
//! ratio.
//!
//! Model files are JSON:
//!
//! ```json
//! {
//!   "name": "trapezoid",
//!   "t_par": "a*n/p + b*log(p)",
//!   "t_ser": null,
//!   "constants": { "a": 1.0, "b": 1.0 },
//!   "constraint": { "kind": "free" }
//! }
//! ```
//!
//! `constraint` is `{"kind": "free"}` or `{"kind": "linear_in_p", "k": 100.0}`;
//! unknown fields anywhere in the file are rejected.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;

use crate::amdahl::{self, AmdahlError, Exponent, Speedup};
use crate::asymptotics::{self, LimitValue, Schedule};
use crate::classifier::DEFAULT_ZERO_TOLERANCE;
use crate::expr::{self, Bindings, EvalError, Expr, ParseError, Var};

/// Errors from constructing, loading, or evaluating a cost model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// The file was not valid JSON for the model schema.
    Json { message: String },
    /// One of the expressions failed to parse.
    Parse { field: &'static str, source: ParseError },
    /// `t_ser` must be an expression in `n` alone.
    SerialDependsOnP,
    /// An expression names a constant missing from the constant table.
    UnknownConstant { name: String },
    /// `linear_in_p` needs a positive finite scale.
    NonPositiveConstraintScale { k: f64 },
    /// A validation probe failed to evaluate.
    ProbeEval { p: f64, n: f64, source: EvalError },
    /// A running time came out zero or negative.
    NonPositiveTime { p: f64, n: f64, value: f64 },
    /// Evaluation failed at runtime.
    Eval { source: EvalError },
    /// The point sits past the minimal-condition boundary: the parallel
    /// time is more than half the serial time, so no second-order exponent
    /// exists there.
    MinimalConditionViolated { ratio: f64 },
    /// A conversion in the speedup algebra failed.
    Amdahl { source: AmdahlError },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Json { message } => write!(f, "invalid model file: {message}"),
            ModelError::Parse { field, source } => write!(f, "in `{field}`: {source}"),
            ModelError::SerialDependsOnP => {
                write!(f, "`t_ser` must be an expression in n only")
            }
            ModelError::UnknownConstant { name } => {
                write!(f, "expression names `{name}` but the constant table does not define it")
            }
            ModelError::NonPositiveConstraintScale { k } => {
                write!(f, "linear_in_p scale must be positive, got {k}")
            }
            ModelError::ProbeEval { p, n, source } => {
                write!(f, "model does not evaluate at p = {p}, n = {n}: {source}")
            }
            ModelError::NonPositiveTime { p, n, value } => {
                write!(f, "running time at p = {p}, n = {n} is {value}, expected positive")
            }
            ModelError::Eval { source } => write!(f, "{source}"),
            ModelError::MinimalConditionViolated { ratio } => {
                write!(
                    f,
                    "parallel/serial time ratio {ratio} exceeds 1/2: minimal condition violated"
                )
            }
            ModelError::Amdahl { source } => write!(f, "{source}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<EvalError> for ModelError {
    fn from(source: EvalError) -> Self {
        ModelError::Eval { source }
    }
}

/// Pointwise outcome of a second-order exponent evaluation: either a value,
/// or a marker that the point violates the minimal condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExponentOutcome {
    Value(f64),
    NotApplicable { ratio: f64 },
}

/// Which problem growths a model admits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthConstraint {
    /// Any (numerically) increasing growth function.
    Free,
    /// Only growths with `n/p` tending to a finite positive ratio; `k` is
    /// the nominal rows-per-processor scale of the model.
    LinearInP { k: f64 },
}

impl GrowthConstraint {
    /// Does the constraint admit `g`? `Free` admits every increasing growth;
    /// `LinearInP` additionally requires `g(p)/p` to converge to a finite
    /// positive limit (beyond the default zero tolerance) over the schedule.
    /// Growths that fail to evaluate are not admitted; overflow merely
    /// truncates the schedule, as it does for limit estimation.
    pub fn admits(&self, g: &GrowthFunction, sched: &Schedule) -> bool {
        let Ok(prefix) = growth_prefix(g, sched.p_values()) else {
            return false;
        };
        if prefix.len() < 3 {
            return false;
        }
        let values: Vec<f64> = prefix.iter().map(|&(_, n)| n).collect();
        if !is_strictly_increasing(&values) {
            return false;
        }
        match self {
            GrowthConstraint::Free => true,
            GrowthConstraint::LinearInP { .. } => {
                match asymptotics::growth_ratio_limit(g, sched) {
                    Ok(est) => {
                        est.converged
                            && matches!(est.value, LimitValue::Finite(v) if v > DEFAULT_ZERO_TOLERANCE)
                    }
                    Err(_) => false,
                }
            }
        }
    }
}

pub(crate) fn is_strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

/// Evaluate a growth over increasing `p` values, truncating at the first
/// overflow; only hard evaluation failures are errors.
pub(crate) fn growth_prefix(
    g: &GrowthFunction,
    ps: &[f64],
) -> Result<Vec<(f64, f64)>, EvalError> {
    let mut out = Vec::with_capacity(ps.len());
    for &p in ps {
        match g.value_at(p) {
            Ok(n) if n.is_finite() => out.push((p, n)),
            Ok(_) | Err(EvalError::NonFinite) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Why a growth function was rejected at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthError {
    Parse { source: ParseError },
    /// Growth functions map `p` to `n`; they cannot themselves mention `n`.
    UsesDimensionVariable,
    /// Growth expressions are closed formulas over `p`; no named constants.
    UnknownIdentifier { name: String },
    NonPositiveParameter { what: &'static str, value: f64 },
}

impl fmt::Display for GrowthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthError::Parse { source } => write!(f, "{source}"),
            GrowthError::UsesDimensionVariable => {
                write!(f, "growth functions map p to n and cannot mention n")
            }
            GrowthError::UnknownIdentifier { name } => {
                write!(f, "growth expressions cannot name constants, found `{name}`")
            }
            GrowthError::NonPositiveParameter { what, value } => {
                write!(f, "{what} must be positive, got {value}")
            }
        }
    }
}

impl std::error::Error for GrowthError {}

/// A problem-growth function `n = g(p)`, an expression in `p` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFunction {
    name: String,
    g: Expr,
}

impl GrowthFunction {
    /// Build from an expression tree, enforcing that it is closed over `p`.
    pub fn from_expr(name: impl Into<String>, g: Expr) -> Result<Self, GrowthError> {
        if g.references_var(Var::N) {
            return Err(GrowthError::UsesDimensionVariable);
        }
        if let Some(name) = g.constants().into_iter().next() {
            return Err(GrowthError::UnknownIdentifier { name: name.to_string() });
        }
        Ok(GrowthFunction { name: name.into(), g })
    }

    /// Parse a growth expression such as `"p*log(p)"`.
    pub fn parse(name: impl Into<String>, src: &str) -> Result<Self, GrowthError> {
        let g = expr::parse(src).map_err(|source| GrowthError::Parse { source })?;
        GrowthFunction::from_expr(name, g)
    }

    /// `g(p) = p`.
    pub fn identity() -> Self {
        GrowthFunction::parse("p", "p").unwrap()
    }

    /// `g(p) = p*log(p)` (natural logarithm).
    pub fn p_log_p() -> Self {
        GrowthFunction::parse("p*log(p)", "p*log(p)").unwrap()
    }

    /// `g(p) = p^2`.
    pub fn p_squared() -> Self {
        GrowthFunction::parse("p^2", "p^2").unwrap()
    }

    /// `g(p) = p^3`.
    pub fn p_cubed() -> Self {
        GrowthFunction::parse("p^3", "p^3").unwrap()
    }

    /// `g(p) = k*p` for a positive scale `k`.
    pub fn linear(k: f64) -> Result<Self, GrowthError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(GrowthError::NonPositiveParameter { what: "linear scale", value: k });
        }
        let g = Expr::Bin(
            expr::BinOp::Mul,
            Box::new(Expr::Num(k)),
            Box::new(Expr::Var(Var::P)),
        );
        Ok(GrowthFunction { name: format!("{k}*p"), g })
    }

    /// `g(p) = p^alpha` for a positive exponent `alpha`.
    pub fn power(alpha: f64) -> Result<Self, GrowthError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(GrowthError::NonPositiveParameter { what: "exponent", value: alpha });
        }
        let g = Expr::Bin(
            expr::BinOp::Pow,
            Box::new(Expr::Var(Var::P)),
            Box::new(Expr::Num(alpha)),
        );
        Ok(GrowthFunction { name: format!("p^{alpha}"), g })
    }

    /// A fixed problem dimension, `g(p) = n0`. Not an increasing growth, so
    /// classification will reject it, but speedup curves, monotonicity
    /// checks, and exponent curves accept it.
    pub fn constant(n0: f64) -> Result<Self, GrowthError> {
        if !n0.is_finite() || n0 < 1.0 {
            return Err(GrowthError::NonPositiveParameter { what: "dimension", value: n0 });
        }
        Ok(GrowthFunction { name: format!("{n0}"), g: Expr::Num(n0) })
    }

    /// The standard family used when the caller does not pick one:
    /// `p`, `p*log(p)`, `p^2`, `100*p`, `p^3`.
    pub fn default_family() -> Vec<GrowthFunction> {
        vec![
            GrowthFunction::identity(),
            GrowthFunction::p_log_p(),
            GrowthFunction::p_squared(),
            GrowthFunction::linear(100.0).unwrap(),
            GrowthFunction::p_cubed(),
        ]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expr(&self) -> &Expr {
        &self.g
    }

    /// Evaluate `g(p)`.
    pub fn value_at(&self, p: f64) -> Result<f64, EvalError> {
        self.g.evaluate(&Bindings::new(p.max(1.0), 1.0)?)
    }

    /// Evaluate over a set of points.
    pub fn values_on(&self, ps: &[f64]) -> Result<Vec<f64>, EvalError> {
        ps.iter().map(|&p| self.value_at(p)).collect()
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

// Validation probes: every model must produce positive finite times here.
// A probe is a cheap soundness check, not a proof of positivity everywhere.
const PROBE_P: [f64; 4] = [1.0, 2.0, 16.0, 1024.0];
const PROBE_N: [f64; 3] = [2.0, 64.0, 4096.0];

/// A parametric cost model.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    name: String,
    t_par: Expr,
    t_ser: Option<Expr>,
    constants: BTreeMap<String, f64>,
    constraint: GrowthConstraint,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: String,
    t_par: String,
    #[serde(default)]
    t_ser: Option<String>,
    #[serde(default)]
    constants: BTreeMap<String, f64>,
    constraint: ConstraintFile,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ConstraintFile {
    Free,
    LinearInP { k: f64 },
}

impl CostModel {
    /// Build and validate a model from parsed parts.
    pub fn new(
        name: impl Into<String>,
        t_par: Expr,
        t_ser: Option<Expr>,
        constants: BTreeMap<String, f64>,
        constraint: GrowthConstraint,
    ) -> Result<Self, ModelError> {
        let model = CostModel { name: name.into(), t_par, t_ser, constants, constraint };
        model.validate()?;
        Ok(model)
    }

    /// Load a model from its JSON representation (see the module docs for
    /// the schema). Unknown fields are rejected.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ModelError::Json { message: e.to_string() })?;
        let t_par = expr::parse(&file.t_par)
            .map_err(|source| ModelError::Parse { field: "t_par", source })?;
        let t_ser = file
            .t_ser
            .as_deref()
            .map(|src| expr::parse(src).map_err(|source| ModelError::Parse { field: "t_ser", source }))
            .transpose()?;
        let constraint = match file.constraint {
            ConstraintFile::Free => GrowthConstraint::Free,
            ConstraintFile::LinearInP { k } => GrowthConstraint::LinearInP { k },
        };
        CostModel::new(file.name, t_par, t_ser, file.constants, constraint)
    }

    fn validate(&self) -> Result<(), ModelError> {
        if let GrowthConstraint::LinearInP { k } = self.constraint {
            if !k.is_finite() || k <= 0.0 {
                return Err(ModelError::NonPositiveConstraintScale { k });
            }
        }
        if let Some(t_ser) = &self.t_ser {
            if t_ser.references_var(Var::P) {
                return Err(ModelError::SerialDependsOnP);
            }
        }
        for name in self.t_par.constants() {
            if !self.constants.contains_key(name) {
                return Err(ModelError::UnknownConstant { name: name.to_string() });
            }
        }
        if let Some(t_ser) = &self.t_ser {
            for name in t_ser.constants() {
                if !self.constants.contains_key(name) {
                    return Err(ModelError::UnknownConstant { name: name.to_string() });
                }
            }
        }
        for &p in &PROBE_P {
            for &n in &PROBE_N {
                self.t_par_at(p, n).map_err(|e| match e {
                    ModelError::Eval { source } => ModelError::ProbeEval { p, n, source },
                    other => other,
                })?;
            }
        }
        for &n in &PROBE_N {
            self.t_ser_at(n).map_err(|e| match e {
                ModelError::Eval { source } => ModelError::ProbeEval { p: 1.0, n, source },
                other => other,
            })?;
        }
        Ok(())
    }

    /// The trapezoid-rule quadrature model: `t_par = a*n/p + b*log(p)`,
    /// defaults `a = 1`, `b = 1`. The logarithmic term is the reduction of
    /// the partial sums.
    pub fn trapezoid() -> Self {
        CostModel::new(
            "trapezoid",
            expr::parse("a*n/p + b*log(p)").unwrap(),
            None,
            [("a".to_string(), 1.0), ("b".to_string(), 1.0)].into(),
            GrowthConstraint::Free,
        )
        .unwrap()
    }

    /// The dense matrix–vector product model:
    /// `t_par = a*(2*n^2 - n)/p + b*(n^2 + n)`, defaults `a = 1`, `b = 2`.
    /// The second term is per-processor traffic that does not shrink with
    /// `p`, which is what caps the speedup.
    pub fn matvec() -> Self {
        CostModel::new(
            "matvec",
            expr::parse("a*(2*n^2 - n)/p + b*(n^2 + n)").unwrap(),
            None,
            [("a".to_string(), 1.0), ("b".to_string(), 2.0)].into(),
            GrowthConstraint::Free,
        )
        .unwrap()
    }

    /// The in-place FFT model over `n = k*p` rows per processor:
    /// `t_par = A*log2(n)` against an explicit serial `t_ser = B*n*log2(n)`,
    /// defaults `A = 1`, `B = 1`, `k = 100`. The serial algorithm differs
    /// from the parallel one run on one processor, hence the explicit
    /// baseline, and only linear-in-`p` growths make sense for it.
    pub fn fft() -> Self {
        CostModel::new(
            "fft",
            expr::parse("A*log2(n)").unwrap(),
            Some(expr::parse("B*n*log2(n)").unwrap()),
            [("A".to_string(), 1.0), ("B".to_string(), 1.0)].into(),
            GrowthConstraint::LinearInP { k: 100.0 },
        )
        .unwrap()
    }

    /// Look up a bundled model by name.
    pub fn bundled(name: &str) -> Option<Self> {
        match name {
            "trapezoid" => Some(CostModel::trapezoid()),
            "matvec" => Some(CostModel::matvec()),
            "fft" => Some(CostModel::fft()),
            _ => None,
        }
    }

    /// Override one constant, revalidating the model.
    pub fn with_constant(mut self, name: &str, value: f64) -> Result<Self, ModelError> {
        match self.constants.get_mut(name) {
            Some(slot) => *slot = value,
            None => return Err(ModelError::UnknownConstant { name: name.to_string() }),
        }
        self.validate()?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn t_par(&self) -> &Expr {
        &self.t_par
    }

    pub fn t_ser(&self) -> Option<&Expr> {
        self.t_ser.as_ref()
    }

    pub fn constants(&self) -> &BTreeMap<String, f64> {
        &self.constants
    }

    pub fn constraint(&self) -> GrowthConstraint {
        self.constraint
    }

    /// Parallel running time at `(p, n)`; must be positive.
    pub fn t_par_at(&self, p: f64, n: f64) -> Result<f64, ModelError> {
        let b = Bindings::with_constants(p, n, &self.constants)?;
        let t = self.t_par.evaluate(&b)?;
        if t <= 0.0 {
            return Err(ModelError::NonPositiveTime { p, n, value: t });
        }
        Ok(t)
    }

    /// Serial baseline at `n`: the explicit `t_ser` when the model has one,
    /// otherwise `t_par` at `p = 1`.
    pub fn t_ser_at(&self, n: f64) -> Result<f64, ModelError> {
        match &self.t_ser {
            Some(t_ser) => {
                let b = Bindings::with_constants(1.0, n, &self.constants)?;
                let t = t_ser.evaluate(&b)?;
                if t <= 0.0 {
                    return Err(ModelError::NonPositiveTime { p: 1.0, n, value: t });
                }
                Ok(t)
            }
            None => self.t_par_at(1.0, n),
        }
    }

    /// `t_par(p, n) / t_ser(n)`, the reciprocal of the speedup.
    pub fn time_ratio(&self, p: f64, n: f64) -> Result<f64, ModelError> {
        Ok(self.t_par_at(p, n)? / self.t_ser_at(n)?)
    }

    /// Speedup of the model at `(p, n)`: serial time over parallel time.
    pub fn speedup(&self, p: f64, n: f64) -> Result<Speedup, ModelError> {
        let s = self.t_ser_at(n)? / self.t_par_at(p, n)?;
        Speedup::new(s).map_err(|source| ModelError::Amdahl { source })
    }

    /// Second-order exponent of parallelism at `(p, n)`.
    ///
    /// Defined only where the minimal condition holds, i.e. where the time
    /// ratio is at most `1/2`; past that boundary the error carries the
    /// offending ratio so callers can report it.
    pub fn exponent(&self, p: f64, n: f64) -> Result<Exponent, ModelError> {
        let ratio = self.time_ratio(p, n)?;
        if ratio > 0.5 {
            return Err(ModelError::MinimalConditionViolated { ratio });
        }
        let s = Speedup::new(1.0 / ratio).map_err(|source| ModelError::Amdahl { source })?;
        amdahl::exponent_approx(s).map_err(|source| match source {
            AmdahlError::MinimalConditionViolated { .. } => {
                ModelError::MinimalConditionViolated { ratio }
            }
            other => ModelError::Amdahl { source: other },
        })
    }
}
