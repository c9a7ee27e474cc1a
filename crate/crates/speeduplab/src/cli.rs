//! Command-line front end.
//!
//! Five subcommands, each a thin shell over one library capability:
//!
//! * `speedup` — speedup curve for a model along a growth (or for a bare
//!   parallel fraction), emitted as CSV `p,speedup`;
//! * `classify` — growth-family classification of a model, as JSON;
//! * `superlinear` — superlinearity thresholds at a processor count, or the
//!   largest superlinear processor count for FFT parameters `C`, `n`, as JSON;
//! * `fit` — least-squares template fit from a timings CSV, as JSON,
//!   optionally classifying the fitted model;
//! * `fig4` — the approximate superlinearity threshold curve, as CSV
//!   `p,threshold`.
//!
//! Exit codes: `0` success, `2` usage errors, `3` model or evaluation
//! errors, `4` data errors (unreadable or malformed timings). The
//! `SPEEDUPLAB_SCHEDULE_MAX_EXP` environment variable (an integer in
//! `9..=300`) moves the top of the limit-estimation schedule for `classify`
//! and `fit --classify`.
//!
//! All output is deterministic: constants are kept in sorted maps, floats
//! print in Rust's shortest round-trip form, and every CSV this module
//! emits is parseable by [`CurveSeries::from_csv`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::amdahl::{self, Fraction};
use crate::asymptotics::Schedule;
use crate::classifier::{
    classify, geometric_grid, ClassificationResult, GrowthEvidence, DEFAULT_ZERO_TOLERANCE,
};
use crate::fitting::{
    self, fit, fit_then_classify, parse_timings_csv, FitError, FitResult, ModelTemplate,
};
use crate::model::{CostModel, GrowthFunction};
use crate::superlinear::{
    fft_superlinear_pmax, fft_superlinear_pmax_scan, superlinear_threshold_approx,
    superlinear_threshold_exact,
};

/// Environment variable moving the top of the default schedule (`2^exp`).
pub const SCHEDULE_MAX_EXP_VAR: &str = "SPEEDUPLAB_SCHEDULE_MAX_EXP";

#[derive(Parser)]
#[command(
    name = "speeduplab",
    version,
    about = "Parallel cost-model toolkit: speedup curves, scaling classification, superlinearity bounds, timing fits"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a speedup curve as CSV (p,speedup)
    Speedup(SpeedupArgs),
    /// Classify a model's parallelism over a growth family (JSON)
    Classify(ClassifyArgs),
    /// Superlinearity thresholds at p, or the largest superlinear p for C and n (JSON)
    Superlinear(SuperlinearArgs),
    /// Fit a model template to a timings CSV (JSON)
    Fit(FitArgs),
    /// Emit the approximate superlinearity threshold curve as CSV (p,threshold)
    #[command(name = "fig4")]
    Fig4(Fig4Args),
}

#[derive(Args)]
struct SpeedupArgs {
    /// Bundled model name (trapezoid, matvec, fft) or path to a model JSON file
    model: Option<String>,
    /// Parallel fraction in (0, 1] for a model-free reference curve
    #[arg(long, conflicts_with = "model")]
    fraction: Option<f64>,
    /// Growth expression n = g(p), e.g. "p^2" or "100*p"
    #[arg(long, value_name = "EXPR")]
    g: Option<String>,
    /// Fixed problem dimension instead of a growth expression
    #[arg(long, conflicts_with = "g")]
    n: Option<f64>,
    /// Smallest processor count on the grid
    #[arg(long, default_value_t = 2.0)]
    p_min: f64,
    /// Largest processor count on the grid
    #[arg(long, default_value_t = 1_048_576.0)]
    p_max: f64,
    /// Number of geometrically spaced grid points
    #[arg(long, default_value_t = 64)]
    points: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Bundled model name (trapezoid, matvec, fft) or path to a model JSON file
    model: String,
    /// Comma-separated growth expressions (default: p,p*log(p),p^2,100*p,p^3)
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<String>>,
    /// Exponent limits within this distance of zero count as vanishing
    #[arg(long, default_value_t = DEFAULT_ZERO_TOLERANCE)]
    zero_tol: f64,
}

#[derive(Args)]
struct SuperlinearArgs {
    /// Processor count: report the exact and approximate thresholds at p
    #[arg(long)]
    p: Option<f64>,
    /// FFT cost ratio C (use together with --n)
    #[arg(long = "C", value_name = "C")]
    c: Option<f64>,
    /// FFT problem dimension n (use together with --C)
    #[arg(long)]
    n: Option<f64>,
}

#[derive(Args)]
struct FitArgs {
    /// Bundled template name (trapezoid, matvec, fft)
    template: String,
    /// Path to a timings CSV with the exact header p,n,time_seconds
    csv: std::path::PathBuf,
    /// Also classify the fitted model
    #[arg(long)]
    classify: bool,
    /// Growth family for --classify (comma-separated expressions)
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<String>>,
    /// Zero tolerance for --classify
    #[arg(long, default_value_t = DEFAULT_ZERO_TOLERANCE)]
    zero_tol: f64,
}

#[derive(Args)]
struct Fig4Args {
    /// Smallest processor count on the grid (must exceed 1)
    #[arg(long, default_value_t = 2.0)]
    p_min: f64,
    /// Largest processor count on the grid
    #[arg(long, default_value_t = 100.0)]
    p_max: f64,
    /// Number of geometrically spaced grid points
    #[arg(long, default_value_t = 64)]
    points: usize,
}

enum CliError {
    Usage(String),
    Model(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(_) => 3,
            CliError::Data(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Model(m) | CliError::Data(m) => m,
        }
    }
}

/// Run the CLI against explicit arguments and output streams; returns the
/// process exit code. `args` must include the program name.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Cmd::Speedup(args) => cmd_speedup(args),
        Cmd::Classify(args) => cmd_classify(args),
        Cmd::Superlinear(args) => cmd_superlinear(args),
        Cmd::Fit(args) => cmd_fit(args),
        Cmd::Fig4(args) => cmd_fig4(args),
    };
    match result {
        Ok(payload) => {
            let _ = out.write_all(payload.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

// ---------------------------------------------------------------------------
// Curve emission

/// Errors from curve CSV construction or parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveError {
    BadLabel { label: String },
    NoPoints,
    NonFinite { index: usize },
    NotIncreasing { index: usize },
    Header { found: String },
    Row { line: usize, message: String },
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::BadLabel { label } => {
                write!(f, "curve label `{label}` must be non-empty without commas or newlines")
            }
            CurveError::NoPoints => write!(f, "a curve needs at least one point"),
            CurveError::NonFinite { index } => {
                write!(f, "curve point {index} is not finite")
            }
            CurveError::NotIncreasing { index } => {
                write!(f, "curve p values must be strictly increasing (violated at point {index})")
            }
            CurveError::Header { found } => {
                write!(f, "expected header `p,<label>`, found `{found}`")
            }
            CurveError::Row { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

impl std::error::Error for CurveError {}

/// A labeled `(p, value)` curve with its CSV form. Emission and parsing are
/// exact inverses: floats print in shortest round-trip form.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    label: String,
    points: Vec<(f64, f64)>,
}

impl CurveSeries {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self, CurveError> {
        let label = label.into();
        if label.is_empty() || label.contains(',') || label.contains('\n') || label.contains('\r') {
            return Err(CurveError::BadLabel { label });
        }
        if points.is_empty() {
            return Err(CurveError::NoPoints);
        }
        for (i, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(CurveError::NonFinite { index: i });
            }
            if i > 0 && x <= points[i - 1].0 {
                return Err(CurveError::NotIncreasing { index: i });
            }
        }
        Ok(CurveSeries { label, points })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Render as CSV: header `p,<label>`, one `x,y` row per point, LF line
    /// endings.
    pub fn to_csv(&self) -> String {
        let mut out = format!("p,{}\n", self.label);
        for &(x, y) in &self.points {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }

    /// Parse the CSV dialect `to_csv` emits.
    pub fn from_csv(text: &str) -> Result<Self, CurveError> {
        let mut lines = text.split('\n');
        let header = lines.next().unwrap_or("").trim_end_matches('\r');
        let label = header
            .strip_prefix("p,")
            .ok_or_else(|| CurveError::Header { found: header.to_string() })?;
        let mut points = Vec::new();
        for (i, raw) in lines.enumerate() {
            let line_no = i + 2;
            let line = raw.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let Some((xs, ys)) = line.split_once(',') else {
                return Err(CurveError::Row {
                    line: line_no,
                    message: "expected 2 fields".to_string(),
                });
            };
            let x: f64 = xs.parse().map_err(|_| CurveError::Row {
                line: line_no,
                message: format!("bad p value `{xs}`"),
            })?;
            let y: f64 = ys.parse().map_err(|_| CurveError::Row {
                line: line_no,
                message: format!("bad value `{ys}`"),
            })?;
            points.push((x, y));
        }
        CurveSeries::new(label.to_string(), points)
    }
}

// ---------------------------------------------------------------------------
// JSON report shapes

#[derive(Serialize)]
struct EvidenceOut {
    growth: String,
    kind: String,
    admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent_limit: Option<f64>,
    converged: bool,
    /// The minimal condition failed at every scheduled point.
    not_applicable: bool,
    minimal_condition_violations: usize,
    below_processor_count: bool,
}

impl EvidenceOut {
    fn from_evidence(ev: &GrowthEvidence) -> Self {
        let (exponent_limit, converged, not_applicable, violations) = match &ev.exponent {
            None => (None, false, false, 0),
            Some(el) => match &el.estimate {
                None => (None, false, true, el.violations.len()),
                Some(est) => (est.value.finite(), est.converged, false, el.violations.len()),
            },
        };
        EvidenceOut {
            growth: ev.growth.clone(),
            kind: ev.kind.to_string(),
            admissible: ev.admissible,
            exponent_limit,
            converged,
            not_applicable,
            minimal_condition_violations: violations,
            below_processor_count: ev.below_processor_count,
        }
    }
}

#[derive(Serialize)]
struct ClassifyOut {
    model: String,
    verdict: String,
    zero_tolerance: f64,
    evidence: Vec<EvidenceOut>,
}

impl ClassifyOut {
    fn from_result(model: &str, result: &ClassificationResult) -> Self {
        ClassifyOut {
            model: model.to_string(),
            verdict: result.verdict.to_string(),
            zero_tolerance: result.zero_tolerance,
            evidence: result.evidence.iter().map(EvidenceOut::from_evidence).collect(),
        }
    }
}

#[derive(Serialize)]
struct FitOut {
    template: String,
    constants: BTreeMap<String, f64>,
    residual_norm: f64,
    r_squared: f64,
    condition_warning: bool,
    negative_constants: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<ClassifyOut>,
}

impl FitOut {
    fn from_fit(template: &str, fit: &FitResult, classification: Option<ClassifyOut>) -> Self {
        FitOut {
            template: template.to_string(),
            constants: fit.constants.clone(),
            residual_norm: fit.residual_norm,
            r_squared: fit.r_squared,
            condition_warning: fit.condition_warning,
            negative_constants: fit.negative_constants.clone(),
            classification,
        }
    }
}

#[derive(Serialize)]
struct ThresholdsOut {
    p: f64,
    threshold_exact: f64,
    threshold_approx: f64,
}

#[derive(Serialize)]
struct FftBoundOut {
    #[serde(rename = "C")]
    c: f64,
    n: f64,
    p_max: f64,
    /// Omitted when the scan range would be unreasonably large.
    #[serde(skip_serializing_if = "Option::is_none")]
    p_max_scan: Option<u64>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports are serializable");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Shared argument handling

fn load_model(name_or_path: &str) -> Result<CostModel, CliError> {
    if let Some(m) = CostModel::bundled(name_or_path) {
        return Ok(m);
    }
    let text = std::fs::read_to_string(name_or_path)
        .map_err(|e| CliError::Model(format!("cannot read model file `{name_or_path}`: {e}")))?;
    CostModel::from_json(&text)
        .map_err(|e| CliError::Model(format!("`{name_or_path}`: {e}")))
}

fn parse_family(exprs: &Option<Vec<String>>) -> Result<Vec<GrowthFunction>, CliError> {
    match exprs {
        None => Ok(GrowthFunction::default_family()),
        Some(list) => list
            .iter()
            .map(|src| {
                GrowthFunction::parse(src.clone(), src)
                    .map_err(|e| CliError::Usage(format!("--family `{src}`: {e}")))
            })
            .collect(),
    }
}

fn check_zero_tol(tol: f64) -> Result<f64, CliError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(CliError::Usage(format!(
            "--zero-tol must be positive and finite, got {tol}"
        )));
    }
    Ok(tol)
}

fn schedule_from_env() -> Result<Schedule, CliError> {
    match std::env::var(SCHEDULE_MAX_EXP_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(Schedule::default()),
        Err(std::env::VarError::NotUnicode(_)) => Err(CliError::Usage(format!(
            "{SCHEDULE_MAX_EXP_VAR} must be an integer in 9..=300"
        ))),
        Ok(s) => match s.trim().parse::<u32>() {
            Ok(exp) if (9..=300).contains(&exp) => {
                Schedule::with_max_exp(exp).map_err(|e| CliError::Usage(e.to_string()))
            }
            _ => Err(CliError::Usage(format!(
                "{SCHEDULE_MAX_EXP_VAR} must be an integer in 9..=300, got `{s}`"
            ))),
        },
    }
}

fn check_grid(p_min: f64, p_max: f64, points: usize) -> Result<(), CliError> {
    if !p_min.is_finite() || !p_max.is_finite() || p_min < 1.0 || p_max <= p_min {
        return Err(CliError::Usage(format!(
            "need 1 <= p-min < p-max, got [{p_min}, {p_max}]"
        )));
    }
    if !(2..=1_000_000).contains(&points) {
        return Err(CliError::Usage(format!(
            "--points must be in 2..=1000000, got {points}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_speedup(args: SpeedupArgs) -> Result<String, CliError> {
    check_grid(args.p_min, args.p_max, args.points)?;
    let grid = geometric_grid(args.p_min, args.p_max, args.points);

    let points: Vec<(f64, f64)> = match (&args.model, args.fraction) {
        (Some(model), None) => {
            let m = load_model(model)?;
            let g = match (&args.g, args.n) {
                (Some(src), None) => GrowthFunction::parse(src.clone(), src)
                    .map_err(|e| CliError::Usage(format!("--g `{src}`: {e}")))?,
                (None, Some(n)) => GrowthFunction::constant(n)
                    .map_err(|e| CliError::Usage(format!("--n: {e}")))?,
                (None, None) => {
                    return Err(CliError::Usage(
                        "pick a problem scale: --g EXPR or --n N".to_string(),
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap rejects --g with --n"),
            };
            let mut points = Vec::with_capacity(grid.len());
            for &p in &grid {
                let n = g
                    .value_at(p)
                    .map_err(|e| CliError::Model(format!("growth failed at p = {p}: {e}")))?;
                let s = m
                    .speedup(p, n)
                    .map_err(|e| CliError::Model(format!("model failed at p = {p}: {e}")))?;
                points.push((p, s.value()));
            }
            points
        }
        (None, Some(f)) => {
            if args.g.is_some() || args.n.is_some() {
                return Err(CliError::Usage(
                    "--fraction curves take no --g or --n".to_string(),
                ));
            }
            if args.p_min <= 1.0 {
                return Err(CliError::Usage(
                    "--fraction curves need p-min > 1".to_string(),
                ));
            }
            let fraction = if f.is_finite() && f > 0.0 && f <= 1.0 {
                Fraction::new(f).expect("validated")
            } else {
                return Err(CliError::Usage(format!(
                    "--fraction must be in (0, 1], got {f}"
                )));
            };
            let mut points = Vec::with_capacity(grid.len());
            for &p in &grid {
                let s = amdahl::speedup_from_fraction(fraction, p)
                    .map_err(|e| CliError::Model(format!("at p = {p}: {e}")))?;
                points.push((p, s.value()));
            }
            points
        }
        _ => {
            return Err(CliError::Usage(
                "pick a curve source: a model name/path, or --fraction F".to_string(),
            ))
        }
    };

    let series = CurveSeries::new("speedup", points)
        .map_err(|e| CliError::Model(e.to_string()))?;
    Ok(series.to_csv())
}

fn cmd_classify(args: ClassifyArgs) -> Result<String, CliError> {
    let m = load_model(&args.model)?;
    let family = parse_family(&args.family)?;
    let zero_tol = check_zero_tol(args.zero_tol)?;
    let sched = schedule_from_env()?;
    let result = classify(&m, &family, &sched, zero_tol);
    Ok(to_json(&ClassifyOut::from_result(m.name(), &result)))
}

fn cmd_superlinear(args: SuperlinearArgs) -> Result<String, CliError> {
    match (args.p, args.c, args.n) {
        (Some(p), None, None) => {
            let threshold_exact =
                superlinear_threshold_exact(p).map_err(|e| CliError::Usage(e.to_string()))?;
            let threshold_approx =
                superlinear_threshold_approx(p).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(to_json(&ThresholdsOut { p, threshold_exact, threshold_approx }))
        }
        (None, Some(c), Some(n)) => {
            let p_max = fft_superlinear_pmax(c, n).map_err(|e| CliError::Usage(e.to_string()))?;
            let p_max_scan = if p_max <= 1e7 {
                Some(fft_superlinear_pmax_scan(c, n).map_err(|e| CliError::Usage(e.to_string()))?)
            } else {
                None
            };
            Ok(to_json(&FftBoundOut { c, n, p_max, p_max_scan }))
        }
        _ => Err(CliError::Usage(
            "pick a mode: --p P for thresholds, or --C C --n N for the FFT bound".to_string(),
        )),
    }
}

fn cmd_fit(args: FitArgs) -> Result<String, CliError> {
    let template = ModelTemplate::bundled(&args.template).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown template `{}` (expected trapezoid, matvec, or fft)",
            args.template
        ))
    })?;
    let path = args.csv.display().to_string();
    let text = std::fs::read_to_string(&args.csv)
        .map_err(|e| CliError::Data(format!("cannot read timings `{path}`: {e}")))?;
    let samples = parse_timings_csv(&text).map_err(|e| CliError::Data(e.to_string()))?;

    let map_fit_error = |e: FitError| match e {
        FitError::Model { source } => CliError::Model(source.to_string()),
        other => CliError::Data(other.to_string()),
    };

    let report = if args.classify {
        let family = parse_family(&args.family)?;
        let zero_tol = check_zero_tol(args.zero_tol)?;
        let sched = schedule_from_env()?;
        let (fit_result, classification) =
            fit_then_classify(&template, &samples, &family, &sched, zero_tol)
                .map_err(map_fit_error)?;
        let classify_out = ClassifyOut::from_result(template.name(), &classification);
        FitOut::from_fit(template.name(), &fit_result, Some(classify_out))
    } else {
        let fit_result = fit(&template, &samples).map_err(map_fit_error)?;
        FitOut::from_fit(template.name(), &fit_result, None)
    };
    Ok(to_json(&report))
}

fn cmd_fig4(args: Fig4Args) -> Result<String, CliError> {
    check_grid(args.p_min, args.p_max, args.points)?;
    if args.p_min <= 1.0 {
        return Err(CliError::Usage("threshold curves need p-min > 1".to_string()));
    }
    let grid = geometric_grid(args.p_min, args.p_max, args.points);
    let mut points = Vec::with_capacity(grid.len());
    for &p in &grid {
        let t = superlinear_threshold_approx(p).map_err(|e| CliError::Model(e.to_string()))?;
        points.push((p, t));
    }
    let series =
        CurveSeries::new("threshold", points).map_err(|e| CliError::Model(e.to_string()))?;
    Ok(series.to_csv())
}

// Re-exported for the thin binary.
pub use fitting::timings_to_csv;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let full: Vec<String> =
            std::iter::once("speeduplab".to_string()).chain(args.iter().map(|s| s.to_string())).collect();
        let code = run_from(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn temp_path(tag: &str) -> std::path::PathBuf {
        std::env::temp_dir().join(format!("speeduplab-cli-test-{}-{tag}", std::process::id()))
    }

    #[test]
    fn speedup_curve_is_deterministic_and_round_trips() {
        let (code, out, err) = run(&["speedup", "trapezoid", "--g", "p^2"]);
        assert_eq!(code, 0, "stderr: {err}");
        assert!(out.starts_with("p,speedup\n"));
        assert_eq!(out.lines().count(), 65);

        let again = run(&["speedup", "trapezoid", "--g", "p^2"]);
        assert_eq!(out, again.1);

        let series = CurveSeries::from_csv(&out).unwrap();
        assert_eq!(series.to_csv(), out);
        assert_eq!(series.points().len(), 64);
        assert_eq!(series.points()[0].0, 2.0);
        assert_eq!(series.points()[63].0, 1_048_576.0);
    }

    #[test]
    fn fraction_curves_match_the_closed_form() {
        let (code, out, _) = run(&["speedup", "--fraction", "0.9", "--p-max", "1024", "--points", "11"]);
        assert_eq!(code, 0);
        let series = CurveSeries::from_csv(&out).unwrap();
        let (p0, s0) = series.points()[0];
        assert_eq!(p0, 2.0);
        assert_relative_eq!(s0, 2.0 / (0.9 * (1.0 - 2.0) + 2.0), max_relative = 1e-15);
        // The whole curve stays below the serial-fraction ceiling.
        assert!(series.points().iter().all(|&(_, s)| s < 10.0));
    }

    #[test]
    fn classify_reports_the_bundled_verdicts() {
        let (code, out, _) = run(&["classify", "trapezoid"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"verdict\": \"strong\""));
        assert!(out.contains("\"growth\": \"p^2\""));

        let (code, out, _) = run(&["classify", "matvec"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"verdict\": \"amdahl_like\""));
        assert!(out.contains("\"exponent_limit\": -1.0"));

        let (code, out, _) = run(&["classify", "fft"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"verdict\": \"weak\""));
        assert!(out.contains("\"admissible\": false"));
    }

    #[test]
    fn classify_accepts_a_custom_family() {
        let (code, out, _) = run(&["classify", "trapezoid", "--family", "p"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"verdict\": \"weak\""));
    }

    #[test]
    fn superlinear_threshold_mode() {
        let (code, out, _) = run(&["superlinear", "--p", "10"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"threshold_exact\": -0.10536051565782631"));
        assert!(out.contains("\"threshold_approx\": -0.10500000000000001"));
    }

    #[test]
    fn superlinear_fft_mode() {
        let (code, out, _) = run(&["superlinear", "--C", "1", "--n", "100"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"p_max\": 100.49752469181038"));
        assert!(out.contains("\"p_max_scan\": 100"));
    }

    #[test]
    fn fit_recovers_constants_from_csv() {
        let path = temp_path("fit-ok.csv");
        let mut csv = String::from("p,n,time_seconds\n");
        for p in [1u64, 2, 4, 8, 16] {
            for n in [64u64, 512, 4096] {
                let t = 2.0 * (n as f64) / (p as f64) + 3.0 * (p as f64).ln();
                csv.push_str(&format!("{p},{n},{t}\n"));
            }
        }
        std::fs::write(&path, csv).unwrap();
        let (code, out, err) = run(&["fit", "trapezoid", path.to_str().unwrap()]);
        std::fs::remove_file(&path).ok();
        assert_eq!(code, 0, "stderr: {err}");
        let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_relative_eq!(parsed["constants"]["a"].as_f64().unwrap(), 2.0, max_relative = 1e-9);
        assert_relative_eq!(parsed["constants"]["b"].as_f64().unwrap(), 3.0, max_relative = 1e-9);
        assert!(parsed.get("classification").is_none());
    }

    #[test]
    fn fit_with_classify_appends_a_verdict() {
        let path = temp_path("fit-classify.csv");
        let mut csv = String::from("p,n,time_seconds\n");
        for p in [1u64, 2, 4, 8] {
            for n in [256u64, 1024, 4096] {
                let t = (n as f64) / (p as f64) + (p as f64).ln();
                csv.push_str(&format!("{p},{n},{t}\n"));
            }
        }
        std::fs::write(&path, csv).unwrap();
        let (code, out, _) = run(&["fit", "trapezoid", path.to_str().unwrap(), "--classify"]);
        std::fs::remove_file(&path).ok();
        assert_eq!(code, 0);
        assert!(out.contains("\"verdict\": \"strong\""));
    }

    #[test]
    fn fig4_emits_the_threshold_curve() {
        let (code, out, _) = run(&["fig4", "--points", "16"]);
        assert_eq!(code, 0);
        let series = CurveSeries::from_csv(&out).unwrap();
        assert_eq!(series.label(), "threshold");
        assert_eq!(series.points().len(), 16);
        // Thresholds rise towards zero as p grows but never reach it.
        assert!(series.points().windows(2).all(|w| w[1].1 > w[0].1));
        assert!(series.points().iter().all(|&(_, t)| t < 0.0));
        assert_relative_eq!(series.points()[0].1, -0.625, max_relative = 1e-15);
    }

    #[test]
    fn usage_errors_exit_2() {
        for args in [
            &["speedup"][..],
            &["speedup", "trapezoid"][..],
            &["speedup", "trapezoid", "--g", "p^"][..],
            &["speedup", "--fraction", "1.5"][..],
            &["speedup", "trapezoid", "--g", "p", "--p-min", "10", "--p-max", "2"][..],
            &["classify", "trapezoid", "--family", "p*q"][..],
            &["classify", "trapezoid", "--zero-tol", "0"][..],
            &["superlinear"][..],
            &["superlinear", "--p", "1"][..],
            &["superlinear", "--C", "1"][..],
            &["fit", "nosuchtemplate", "/dev/null"][..],
            &["nosuchcommand"][..],
        ] {
            let (code, _, err) = run(args);
            assert_eq!(code, 2, "args {args:?} gave stderr: {err}");
        }
    }

    #[test]
    fn model_errors_exit_3() {
        let bad_model = temp_path("bad-model.json");
        std::fs::write(&bad_model, r#"{ "name": "x" }"#).unwrap();
        let cases: Vec<Vec<String>> = vec![
            vec!["classify".into(), "/no/such/model.json".into()],
            vec!["classify".into(), bad_model.to_str().unwrap().into()],
            vec!["speedup".into(), "/no/such/model.json".into(), "--g".into(), "p".into()],
        ];
        for args in &cases {
            let full: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
            let (code, _, err) = run(&full);
            assert_eq!(code, 3, "args {args:?} gave stderr: {err}");
            assert!(err.starts_with("error: "));
        }
        std::fs::remove_file(&bad_model).ok();
    }

    #[test]
    fn data_errors_exit_4() {
        let bad_header = temp_path("bad-header.csv");
        std::fs::write(&bad_header, "processors,n,time\n1,10,1.0\n").unwrap();
        let bad_rows = temp_path("bad-rows.csv");
        std::fs::write(&bad_rows, "p,n,time_seconds\n0,10,1.0\n1,10,-2.0\n").unwrap();
        let underdetermined = temp_path("underdetermined.csv");
        std::fs::write(&underdetermined, "p,n,time_seconds\n2,10,1.0\n").unwrap();

        for path in [&bad_header, &bad_rows, &underdetermined] {
            let (code, _, err) = run(&["fit", "trapezoid", path.to_str().unwrap()]);
            assert_eq!(code, 4, "path {path:?} gave stderr: {err}");
        }
        let (code, _, _) = run(&["fit", "trapezoid", "/no/such/timings.csv"]);
        assert_eq!(code, 4);

        for path in [&bad_header, &bad_rows, &underdetermined] {
            std::fs::remove_file(path).ok();
        }
    }

    #[test]
    fn row_errors_name_their_lines() {
        let path = temp_path("line-numbers.csv");
        std::fs::write(&path, "p,n,time_seconds\n1,10,1.0\nx,10,1.0\n").unwrap();
        let (code, _, err) = run(&["fit", "trapezoid", path.to_str().unwrap()]);
        std::fs::remove_file(&path).ok();
        assert_eq!(code, 4);
        assert!(err.contains("line 3"), "stderr: {err}");
    }

    #[test]
    fn help_and_version_exit_0() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        for sub in ["speedup", "classify", "superlinear", "fit", "fig4"] {
            assert!(out.contains(sub), "help should mention `{sub}`");
        }
        let (code, out, _) = run(&["--version"]);
        assert_eq!(code, 0);
        assert!(out.contains("speeduplab"));
    }

    #[test]
    fn custom_model_files_work_end_to_end() {
        let path = temp_path("custom-model.json");
        std::fs::write(
            &path,
            r#"{
                "name": "pipeline",
                "t_par": "a*n/p + b*sqrt(p)",
                "constants": { "a": 1.0, "b": 0.5 },
                "constraint": { "kind": "free" }
            }"#,
        )
        .unwrap();
        let (code, out, err) = run(&["classify", path.to_str().unwrap()]);
        std::fs::remove_file(&path).ok();
        assert_eq!(code, 0, "stderr: {err}");
        assert!(out.contains("\"model\": \"pipeline\""));
        assert!(out.contains("\"verdict\""));
    }

    #[test]
    fn curve_series_rejects_malformed_input() {
        assert!(matches!(
            CurveSeries::from_csv("x,speedup\n2,1.5\n"),
            Err(CurveError::Header { .. })
        ));
        assert!(matches!(
            CurveSeries::from_csv("p,speedup\n2,abc\n"),
            Err(CurveError::Row { line: 2, .. })
        ));
        assert!(matches!(
            CurveSeries::from_csv("p,speedup\n4,1.0\n2,2.0\n"),
            Err(CurveError::NotIncreasing { .. })
        ));
        assert!(matches!(
            CurveSeries::new("spee,dup", vec![(2.0, 1.0)]),
            Err(CurveError::BadLabel { .. })
        ));
    }
}
