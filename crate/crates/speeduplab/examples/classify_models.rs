//! Classify the bundled cost models over the default growth family.
//!
//! A model's class is read off the limit of its exponent along each growth
//! path n = g(p): strong means some admissible growth with g(p)/p -> infinity
//! drives the exponent to zero (speedup unbounded); weak means only growths
//! with a finite n/p ratio manage that; a saturating model has a strictly
//! negative exponent limit along every tested growth.
//!
//! Run with: `cargo run --example classify_models`

use speeduplab::classifier::classify_default;
use speeduplab::model::CostModel;

fn main() {
    for model in [CostModel::trapezoid(), CostModel::matvec(), CostModel::fft()] {
        let result = classify_default(&model);
        println!("model `{}`: verdict = {}", model.name(), result.verdict);
        println!(
            "  {:<10}  {:<14}  {:<10}  {}",
            "growth", "ratio kind", "admissible", "exponent limit"
        );
        for ev in &result.evidence {
            let exponent = match ev.exponent_value() {
                Some(v) => format!("{v:+.6}"),
                None => "(none)".to_string(),
            };
            println!(
                "  {:<10}  {:<14}  {:<10}  {}",
                ev.growth,
                ev.kind.to_string(),
                ev.admissible,
                exponent
            );
        }
        println!();
    }

    println!("verdicts:");
    println!("  strong      — a growth with g(p)/p -> inf drives the exponent to 0");
    println!("  weak        — only growths with finite g(p)/p drive the exponent to 0");
    println!("  amdahl_like — every usable growth leaves a negative exponent: speedup saturates");
    println!("  inconclusive — no growth produced usable evidence");
}
