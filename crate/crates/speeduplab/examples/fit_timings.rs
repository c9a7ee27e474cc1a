//! Fit a cost-model template to noisy timing measurements, then classify
//! the fitted model.
//!
//! Run with: `cargo run --example fit_timings`

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use speeduplab::asymptotics::Schedule;
use speeduplab::fitting::{fit_then_classify, timings_to_csv, ModelTemplate, TimingSample};
use speeduplab::model::{CostModel, GrowthFunction};

fn main() {
    // Pretend these came from a benchmark harness: the "machine" follows the
    // trapezoid cost shape, communication included, with a = 1 and b = 50,
    // plus 1% multiplicative noise. Both cost terms matter at these sizes,
    // so both constants are identifiable from the measurements.
    let truth = CostModel::trapezoid().with_constant("b", 50.0).unwrap();
    let mut rng = StdRng::seed_from_u64(0xBEEF_CAFE);
    let noise = Normal::new(0.0, 0.01).unwrap();

    let mut samples = Vec::new();
    for &p in &[1u64, 2, 4, 8, 16, 32, 64, 128, 256] {
        for &n in &[1u64 << 10, 1 << 12, 1 << 14] {
            let ideal = truth.t_par_at(p as f64, n as f64).unwrap();
            let observed = ideal * (1.0 + noise.sample(&mut rng));
            samples.push(TimingSample::new(p, n, observed).unwrap());
        }
    }

    let csv = timings_to_csv(&samples);
    println!("measurements (first rows of the CSV the CLI would ingest):");
    for line in csv.lines().take(5) {
        println!("  {line}");
    }
    println!("  ... {} samples total\n", samples.len());

    let template = ModelTemplate::trapezoid();
    let (fit, classification) = fit_then_classify(
        &template,
        &samples,
        &GrowthFunction::default_family(),
        &Schedule::default(),
        1e-3,
    )
    .unwrap();

    println!("fitted `{}` template (truth: a = 1, b = 50):", template.name());
    for (name, value) in &fit.constants {
        println!("  {name} = {value:.6}");
    }
    println!("  residual norm = {:.6e}", fit.residual_norm);
    println!("  r^2           = {:.6}", fit.r_squared);
    if fit.condition_warning {
        println!("  warning: design matrix nearly rank-deficient");
    }
    if !fit.negative_constants.is_empty() {
        println!("  warning: negative constants {:?}", fit.negative_constants);
    }

    println!("\nverdict for the fitted model: {}", classification.verdict);
    if let Some(ev) = classification.evidence.iter().find(|e| e.exponent_value().is_some()) {
        println!(
            "  e.g. along g = {}: exponent limit {:+.6}",
            ev.growth,
            ev.exponent_value().unwrap()
        );
    }
}
