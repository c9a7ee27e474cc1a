//! Define a cost model of your own — as JSON, exactly what the CLI accepts
//! in a file — and analyze it with a custom growth family.
//!
//! Run with: `cargo run --example custom_model`

use speeduplab::asymptotics::Schedule;
use speeduplab::classifier::classify;
use speeduplab::model::{CostModel, GrowthFunction};

const STENCIL: &str = r#"{
    "name": "stencil",
    "t_par": "a*n/p + c*sqrt(n) + b*log2(p)",
    "constants": { "a": 1.0, "b": 0.05, "c": 0.01 },
    "constraint": { "kind": "free" }
}"#;

fn main() {
    // The same JSON could live in a file and be passed to the CLI:
    //   speeduplab classify stencil.json --family "p,p^1.5,p^2"
    let m = CostModel::from_json(STENCIL).unwrap();
    println!("model `{}`:", m.name());
    println!("  t_par = {}", m.t_par());
    println!("  constants = {:?}", m.constants());

    // A few raw numbers first. speedup(p, n) = t_ser(n) / t_par(p, n); with
    // no explicit serial expression, t_ser(n) = t_par(1, n).
    println!("\nspeedup samples:");
    for (p, n) in [(4.0, 1e4), (64.0, 1e6), (1024.0, 1e8)] {
        let s = m.speedup(p, n).unwrap();
        println!("  p = {p:>6}, n = {n:>6e}: speedup = {:.3}", s.value());
    }

    // Classify against a handpicked growth family. Growth expressions parse
    // from the same little language as the model formulas.
    let family = vec![
        GrowthFunction::identity(),
        GrowthFunction::parse("p^1.5", "p^1.5").unwrap(),
        GrowthFunction::p_squared(),
    ];
    let result = classify(&m, &family, &Schedule::default(), 1e-3);
    println!("\nverdict with family {{p, p^1.5, p^2}}: {}", result.verdict);
    for ev in &result.evidence {
        match ev.exponent_value() {
            Some(v) => println!("  g = {:<6}: kind {}, exponent limit {v:+.6}", ev.growth, ev.kind),
            None => println!("  g = {:<6}: kind {}, no settled exponent", ev.growth, ev.kind),
        }
    }

    // The growth constraint is part of the model. Re-declaring the stencil
    // as "dimension may only grow linearly with p" changes its class: the
    // square-root term can no longer be outrun.
    let constrained = r#"{
        "name": "stencil-linear-only",
        "t_par": "a*n/p + c*sqrt(n) + b*log2(p)",
        "constants": { "a": 1.0, "b": 0.05, "c": 0.01 },
        "constraint": { "kind": "linear_in_p", "k": 100 }
    }"#;
    let m2 = CostModel::from_json(constrained).unwrap();
    let result2 = classify(&m2, &family, &Schedule::default(), 1e-3);
    println!("\nsame formula, growth constrained to linear in p: {}", result2.verdict);
}
