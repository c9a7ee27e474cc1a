//! Pointwise exponent curves along growth paths, and what breaks when the
//! problem dimension stops growing.
//!
//! Run with: `cargo run --example exponent_curves`

use speeduplab::asymptotics::Schedule;
use speeduplab::classifier::{exponent_curve, monotonicity_check};
use speeduplab::model::{CostModel, ExponentOutcome, GrowthFunction};

fn main() {
    let m = CostModel::trapezoid();

    // Along n = g(p), the exponent of the trapezoid model climbs toward 0
    // when the data grows fast enough, and stalls otherwise.
    let sched = Schedule::geometric(2, 26, 1e-6, 3).unwrap();
    println!("trapezoid exponent along n = g(p):");
    for g in [GrowthFunction::identity(), GrowthFunction::p_squared()] {
        println!("  g = {}", g.name());
        let curve = exponent_curve(&m, &g, &sched).unwrap();
        for point in curve.iter().step_by(6) {
            match point.outcome {
                ExponentOutcome::Value(v) => {
                    println!("    p = {:>10}: F = {v:+.6}", point.p);
                }
                ExponentOutcome::NotApplicable { ratio } => {
                    println!(
                        "    p = {:>10}: not applicable (t_par/t_ser = {ratio:.7} > 1/2)",
                        point.p
                    );
                }
            }
        }
    }

    // Pin the dimension at n = 10^6 and the picture changes. At p = 2 the
    // two processors miss the halve-the-serial-time bar by a hair, so the
    // exponent is not even defined there.
    let fixed = GrowthFunction::constant(1e6).unwrap();
    let sched = Schedule::geometric(1, 26, 1e-6, 3).unwrap();
    println!("\ntrapezoid with the dimension pinned at n = 10^6:");
    let curve = exponent_curve(&m, &fixed, &sched).unwrap();
    for point in curve.iter().step_by(5) {
        match point.outcome {
            ExponentOutcome::Value(v) => println!("    p = {:>10}: F = {v:+.9}", point.p),
            ExponentOutcome::NotApplicable { ratio } => {
                println!(
                    "    p = {:>10}: not applicable (t_par/t_ser = {ratio:.7} > 1/2)",
                    point.p
                )
            }
        }
    }

    // And past p = n, extra processors only add coordination time: the
    // speedup curve turns downhill, which the monotonicity scan flags.
    let report = monotonicity_check(&m, &fixed, 2.0, 1e9, 64).unwrap();
    println!("\nmonotonicity scan with n pinned at 10^6, p in [2, 10^9]:");
    println!("  passed: {}", report.passed);
    if let Some(v) = report.violations.first() {
        println!(
            "  first decrease near p = {:.0} (speedup fell by {:.3} across its neighbors)",
            v.p, v.drop
        );
    }
    let peak = report
        .samples
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan");
    println!("  best sampled point: p = {:.0}, speedup = {:.1}", peak.0, peak.1);
}
