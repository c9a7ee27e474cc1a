//! Fitting cost-model templates to measured timings.
//!
//! A [`ModelTemplate`] is a cost model with its constants left blank:
//! `t_par` is a linear combination `c_1*basis_1(p, n) + ... + c_k*basis_k(p, n)`
//! whose coefficients are recovered from [`TimingSample`]s by linear least
//! squares (singular-value decomposition, so rank problems are detected
//! rather than silently absorbed). The fitted constants plug back into a
//! [`CostModel`], which makes the whole analysis pipeline — speedups,
//! exponents, classification — available for measured data via
//! [`fit_then_classify`].
//!
//! Timings travel as CSV with the exact header `p,n,time_seconds`.
//!
//! Fitting only sees parallel running times, so template parts that cancel
//! out of every sample — the serial baseline of a model whose parallel time
//! does not depend on it — cannot be recovered and stay pinned at their
//! template defaults.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::classifier::{classify, ClassificationResult};
use crate::expr::{self, Bindings, EvalError, Expr, Var};
use crate::model::{CostModel, ExponentOutcome, GrowthConstraint, GrowthFunction, ModelError};
use crate::asymptotics::{exponent_from_ratio_clamped, Schedule};

/// Condition numbers above this trip [`FitResult::condition_warning`].
pub const CONDITION_WARNING_THRESHOLD: f64 = 1e8;

/// Errors from template construction, fitting, or timing ingestion.
#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    ZeroProcessors,
    ZeroDimension,
    NonPositiveTime { value: f64 },
    EmptyTemplate,
    MismatchedTemplate { basis: usize, names: usize },
    DuplicateConstantName { name: String },
    /// Basis expressions must be pure in `p` and `n`.
    ConstantInBasis { name: String },
    NoSamples,
    Underdetermined { samples: usize, coefficients: usize },
    /// The sample set does not distinguish the basis functions.
    RankDeficient { rank: usize, coefficients: usize },
    NonFiniteSolution,
    BasisEval { p: u64, n: u64, source: EvalError },
    /// Empirical exponents need a `p = 1` baseline for every dimension.
    MissingBaselines { ns: Vec<u64> },
    CsvHeader { found: String },
    CsvRows { errors: Vec<(usize, String)> },
    Model { source: ModelError },
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::ZeroProcessors => write!(f, "processor count must be at least 1"),
            FitError::ZeroDimension => write!(f, "problem dimension must be at least 1"),
            FitError::NonPositiveTime { value } => {
                write!(f, "time must be positive and finite, got {value}")
            }
            FitError::EmptyTemplate => write!(f, "template needs at least one basis function"),
            FitError::MismatchedTemplate { basis, names } => {
                write!(f, "{basis} basis functions but {names} constant names")
            }
            FitError::DuplicateConstantName { name } => {
                write!(f, "constant name `{name}` appears more than once")
            }
            FitError::ConstantInBasis { name } => {
                write!(f, "basis functions must not name constants, found `{name}`")
            }
            FitError::NoSamples => write!(f, "no timing samples"),
            FitError::Underdetermined { samples, coefficients } => {
                write!(f, "{samples} samples cannot determine {coefficients} coefficients")
            }
            FitError::RankDeficient { rank, coefficients } => {
                write!(
                    f,
                    "samples span rank {rank} but the template has {coefficients} coefficients; \
                     vary p and n so the basis functions differ"
                )
            }
            FitError::NonFiniteSolution => write!(f, "least squares produced non-finite values"),
            FitError::BasisEval { p, n, source } => {
                write!(f, "basis failed at p = {p}, n = {n}: {source}")
            }
            FitError::MissingBaselines { ns } => {
                let list: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                write!(f, "no p = 1 baseline for n = {}", list.join(", "))
            }
            FitError::CsvHeader { found } => {
                write!(f, "expected header `p,n,time_seconds`, found `{found}`")
            }
            FitError::CsvRows { errors } => {
                write!(f, "{} invalid row(s):", errors.len())?;
                for (line, message) in errors {
                    write!(f, " line {line}: {message};")?;
                }
                Ok(())
            }
            FitError::Model { source } => write!(f, "{source}"),
        }
    }
}

impl std::error::Error for FitError {}

impl From<ModelError> for FitError {
    fn from(source: ModelError) -> Self {
        FitError::Model { source }
    }
}

/// One timing measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSample {
    pub p: u64,
    pub n: u64,
    pub time_seconds: f64,
}

impl TimingSample {
    pub fn new(p: u64, n: u64, time_seconds: f64) -> Result<Self, FitError> {
        if p == 0 {
            return Err(FitError::ZeroProcessors);
        }
        if n == 0 {
            return Err(FitError::ZeroDimension);
        }
        if !time_seconds.is_finite() || time_seconds <= 0.0 {
            return Err(FitError::NonPositiveTime { value: time_seconds });
        }
        Ok(TimingSample { p, n, time_seconds })
    }
}

/// A cost model with unknown coefficients on a fixed set of basis functions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTemplate {
    name: String,
    basis: Vec<Expr>,
    constant_names: Vec<String>,
    /// Fixed serial part (expression and pinned constants); not fitted.
    serial: Option<(Expr, BTreeMap<String, f64>)>,
    constraint: GrowthConstraint,
}

impl ModelTemplate {
    pub fn new(
        name: impl Into<String>,
        basis: Vec<Expr>,
        constant_names: Vec<String>,
        serial: Option<(Expr, BTreeMap<String, f64>)>,
        constraint: GrowthConstraint,
    ) -> Result<Self, FitError> {
        if basis.is_empty() {
            return Err(FitError::EmptyTemplate);
        }
        if basis.len() != constant_names.len() {
            return Err(FitError::MismatchedTemplate {
                basis: basis.len(),
                names: constant_names.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for name in &constant_names {
            if name.is_empty() || !seen.insert(name.as_str()) {
                return Err(FitError::DuplicateConstantName { name: name.clone() });
            }
        }
        for b in &basis {
            if let Some(c) = b.constants().into_iter().next() {
                return Err(FitError::ConstantInBasis { name: c.to_string() });
            }
        }
        if let Some((expr, pinned)) = &serial {
            if expr.references_var(Var::P) {
                return Err(FitError::Model { source: ModelError::SerialDependsOnP });
            }
            for c in expr.constants() {
                if !pinned.contains_key(c) {
                    return Err(FitError::Model {
                        source: ModelError::UnknownConstant { name: c.to_string() },
                    });
                }
            }
            for pinned_name in pinned.keys() {
                if !seen.insert(pinned_name.as_str()) {
                    return Err(FitError::DuplicateConstantName { name: pinned_name.clone() });
                }
            }
        }
        Ok(ModelTemplate { name: name.into(), basis, constant_names, serial, constraint })
    }

    /// Template of the trapezoid-rule model: `a*(n/p) + b*log(p)`.
    pub fn trapezoid() -> Self {
        ModelTemplate::new(
            "trapezoid",
            vec![expr::parse("n/p").unwrap(), expr::parse("log(p)").unwrap()],
            vec!["a".to_string(), "b".to_string()],
            None,
            GrowthConstraint::Free,
        )
        .unwrap()
    }

    /// Template of the matrix–vector model: `a*((2*n^2-n)/p) + b*(n^2+n)`.
    pub fn matvec() -> Self {
        ModelTemplate::new(
            "matvec",
            vec![expr::parse("(2*n^2 - n)/p").unwrap(), expr::parse("n^2 + n").unwrap()],
            vec!["a".to_string(), "b".to_string()],
            None,
            GrowthConstraint::Free,
        )
        .unwrap()
    }

    /// Template of the FFT model: `A*log2(n)` with the serial baseline
    /// `B*n*log2(n)` pinned at `B = 1`.
    ///
    /// Parallel timings carry no information about `B` — it cancels out of
    /// every sample — and the classification verdict is invariant to any
    /// positive value of it.
    pub fn fft() -> Self {
        ModelTemplate::new(
            "fft",
            vec![expr::parse("log2(n)").unwrap()],
            vec!["A".to_string()],
            Some((expr::parse("B*n*log2(n)").unwrap(), [("B".to_string(), 1.0)].into())),
            GrowthConstraint::LinearInP { k: 100.0 },
        )
        .unwrap()
    }

    /// Look up a bundled template by name.
    pub fn bundled(name: &str) -> Option<Self> {
        match name {
            "trapezoid" => Some(ModelTemplate::trapezoid()),
            "matvec" => Some(ModelTemplate::matvec()),
            "fft" => Some(ModelTemplate::fft()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constant_names(&self) -> &[String] {
        &self.constant_names
    }

    pub fn constraint(&self) -> GrowthConstraint {
        self.constraint
    }

    /// Instantiate a full cost model from fitted constants.
    pub fn to_cost_model(&self, fitted: &BTreeMap<String, f64>) -> Result<CostModel, ModelError> {
        let mut t_par: Option<Expr> = None;
        for (name, basis) in self.constant_names.iter().zip(&self.basis) {
            let term = Expr::Bin(
                expr::BinOp::Mul,
                Box::new(Expr::Const(name.clone())),
                Box::new(basis.clone()),
            );
            t_par = Some(match t_par {
                None => term,
                Some(acc) => Expr::Bin(expr::BinOp::Add, Box::new(acc), Box::new(term)),
            });
        }
        let t_par = t_par.expect("templates have at least one basis function");

        let mut constants = BTreeMap::new();
        for name in &self.constant_names {
            let value = fitted
                .get(name)
                .ok_or_else(|| ModelError::UnknownConstant { name: name.clone() })?;
            constants.insert(name.clone(), *value);
        }
        let t_ser = match &self.serial {
            Some((expr, pinned)) => {
                constants.extend(pinned.iter().map(|(k, v)| (k.clone(), *v)));
                Some(expr.clone())
            }
            None => None,
        };
        CostModel::new(self.name.clone(), t_par, t_ser, constants, self.constraint)
    }
}

/// What a least-squares fit produced.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub constants: BTreeMap<String, f64>,
    /// Euclidean norm of the residual vector.
    pub residual_norm: f64,
    /// Coefficient of determination against the sample mean.
    pub r_squared: f64,
    /// The design matrix was usable but nearly rank-deficient.
    pub condition_warning: bool,
    /// Fitted constants that came out negative — legal algebra, but a sign
    /// the template does not describe the measurements.
    pub negative_constants: Vec<String>,
}

/// Fit a template's coefficients to timing samples by linear least squares.
pub fn fit(template: &ModelTemplate, samples: &[TimingSample]) -> Result<FitResult, FitError> {
    let m = samples.len();
    let k = template.basis.len();
    if m == 0 {
        return Err(FitError::NoSamples);
    }
    if m < k {
        return Err(FitError::Underdetermined { samples: m, coefficients: k });
    }

    let mut design = Vec::with_capacity(m * k);
    for s in samples {
        let b = Bindings::new(s.p as f64, s.n as f64)
            .map_err(|source| FitError::BasisEval { p: s.p, n: s.n, source })?;
        for basis in &template.basis {
            design.push(
                basis
                    .evaluate(&b)
                    .map_err(|source| FitError::BasisEval { p: s.p, n: s.n, source })?,
            );
        }
    }
    let x = DMatrix::from_row_slice(m, k, &design);
    let y = DVector::from_iterator(m, samples.iter().map(|s| s.time_seconds));

    let svd = x.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let rank_tol = sigma_max * f64::EPSILON * (m.max(k) as f64);
    let rank = svd.singular_values.iter().filter(|&&s| s > rank_tol).count();
    if rank < k {
        return Err(FitError::RankDeficient { rank, coefficients: k });
    }
    let sigma_min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition_warning = sigma_max / sigma_min > CONDITION_WARNING_THRESHOLD;

    let coeffs = svd.solve(&y, rank_tol).map_err(|_| FitError::NonFiniteSolution)?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(FitError::NonFiniteSolution);
    }

    let residual_norm = (&x * &coeffs - &y).norm();
    let mean = y.iter().sum::<f64>() / m as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - residual_norm * residual_norm / ss_tot
    } else if residual_norm <= 1e-9 * y.norm().max(f64::MIN_POSITIVE) {
        1.0
    } else {
        0.0
    };

    let mut constants = BTreeMap::new();
    let mut negative_constants = Vec::new();
    for (name, &c) in template.constant_names.iter().zip(coeffs.iter()) {
        constants.insert(name.clone(), c);
        if c < 0.0 {
            negative_constants.push(name.clone());
        }
    }

    Ok(FitResult { constants, residual_norm, r_squared, condition_warning, negative_constants })
}

/// One measured point of an empirical exponent curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalPoint {
    pub p: u64,
    pub n: u64,
    pub outcome: ExponentOutcome,
}

/// Second-order exponents straight from measurements, no model involved.
///
/// Every dimension that appears at `p > 1` must also have a `p = 1`
/// baseline; when a dimension has several baselines the first one in the
/// input wins. Points whose time ratio exceeds `1/2` come back as
/// [`ExponentOutcome::NotApplicable`] — measured data gets no boundary
/// slack.
pub fn empirical_exponent(samples: &[TimingSample]) -> Result<Vec<EmpiricalPoint>, FitError> {
    let mut baselines: BTreeMap<u64, f64> = BTreeMap::new();
    for s in samples {
        if s.p == 1 {
            baselines.entry(s.n).or_insert(s.time_seconds);
        }
    }
    let missing: Vec<u64> = samples
        .iter()
        .filter(|s| s.p > 1 && !baselines.contains_key(&s.n))
        .map(|s| s.n)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !missing.is_empty() {
        return Err(FitError::MissingBaselines { ns: missing });
    }

    let mut points = Vec::new();
    for s in samples.iter().filter(|s| s.p > 1) {
        let ratio = s.time_seconds / baselines[&s.n];
        let outcome = if ratio > 0.5 {
            ExponentOutcome::NotApplicable { ratio }
        } else {
            ExponentOutcome::Value(exponent_from_ratio_clamped(ratio))
        };
        points.push(EmpiricalPoint { p: s.p, n: s.n, outcome });
    }
    Ok(points)
}

/// Fit a template, instantiate the model, and classify it in one step.
pub fn fit_then_classify(
    template: &ModelTemplate,
    samples: &[TimingSample],
    family: &[GrowthFunction],
    sched: &Schedule,
    zero_tolerance: f64,
) -> Result<(FitResult, ClassificationResult), FitError> {
    let result = fit(template, samples)?;
    let model = template.to_cost_model(&result.constants)?;
    let classification = classify(&model, family, sched, zero_tolerance);
    Ok((result, classification))
}

/// Parse timings CSV: exact header `p,n,time_seconds`, then one sample per
/// line. Row problems are collected with their line numbers (the header is
/// line 1) and reported together.
pub fn parse_timings_csv(text: &str) -> Result<Vec<TimingSample>, FitError> {
    let mut lines = text.split('\n');
    let header = lines.next().unwrap_or("").trim_end_matches('\r');
    if header != "p,n,time_seconds" {
        return Err(FitError::CsvHeader { found: header.to_string() });
    }

    let mut samples = Vec::new();
    let mut errors: Vec<(usize, String)> = Vec::new();
    for (i, raw) in lines.enumerate() {
        let line_no = i + 2;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            errors.push((line_no, format!("expected 3 fields, got {}", fields.len())));
            continue;
        }
        let p = match fields[0].trim().parse::<u64>() {
            Ok(p) if p >= 1 => p,
            _ => {
                errors.push((line_no, format!("p must be a positive integer, got `{}`", fields[0])));
                continue;
            }
        };
        let n = match fields[1].trim().parse::<u64>() {
            Ok(n) if n >= 1 => n,
            _ => {
                errors.push((line_no, format!("n must be a positive integer, got `{}`", fields[1])));
                continue;
            }
        };
        let t = match fields[2].trim().parse::<f64>() {
            Ok(t) => t,
            Err(_) => {
                errors.push((line_no, format!("time_seconds must be a number, got `{}`", fields[2])));
                continue;
            }
        };
        match TimingSample::new(p, n, t) {
            Ok(sample) => samples.push(sample),
            Err(e) => errors.push((line_no, e.to_string())),
        }
    }
    if !errors.is_empty() {
        return Err(FitError::CsvRows { errors });
    }
    Ok(samples)
}

/// Render samples back to the same CSV dialect `parse_timings_csv` reads.
pub fn timings_to_csv(samples: &[TimingSample]) -> String {
    let mut out = String::from("p,n,time_seconds\n");
    for s in samples {
        out.push_str(&format!("{},{},{}\n", s.p, s.n, s.time_seconds));
    }
    out
}
