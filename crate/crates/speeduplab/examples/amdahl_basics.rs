//! Fractions, speedups, saturation limits, and the exponent linking them.
//!
//! Run with: `cargo run --example amdahl_basics`

use speeduplab::amdahl::{self, Fraction, Speedup};

fn main() {
    // A program whose statements are 80% parallelizable: the speedup climbs
    // with the processor count but saturates at 1/(1 - f) = 5.
    let f = Fraction::new(0.8).unwrap();
    println!("parallel fraction f = {}", f.value());
    for p in [2.0, 8.0, 64.0, 1024.0, 1e6] {
        let s = amdahl::speedup_from_fraction(f, p).unwrap();
        println!("  p = {p:>9}: speedup = {:.6}", s.value());
    }
    let cap = amdahl::amdahl_limit(f).unwrap();
    println!("  p -> infinity: speedup = {}", cap.value());

    // Going the other way: a measured speedup on p processors pins the
    // fraction that must have been parallel.
    let measured = Speedup::new(3.5).unwrap();
    let implied = amdahl::fraction_from_speedup(measured, 8.0).unwrap();
    println!("\nspeedup 3.5 on 8 processors implies f = {:.6}", implied.value());

    // The exponent view: writing f = (p/(p-1)) * e^F turns the same
    // measurement into a single number F <= 0. F near 0 means the run
    // scales freely; F near -1 means it sits at the minimal useful
    // speedup of 2; in between interpolates. The quadratic approximation
    // only exists from S = 2 upward — below that, p processors do not even
    // halve the serial time.
    println!("\nexponent of a measured speedup (exact vs quadratic approximation)");
    println!("  {:>8}  {:>12}  {:>12}  {:>12}", "S", "F exact", "F approx", "S(F exact)");
    for s in [1.5, 2.0, 5.0, 20.0, 500.0] {
        let s = Speedup::new(s).unwrap();
        let exact = amdahl::exponent_exact(s).unwrap();
        let approx = match amdahl::exponent_approx(s) {
            Ok(f) => format!("{:>12.6}", f.value()),
            Err(_) => format!("{:>12}", "(S < 2)"),
        };
        let back = amdahl::speedup_from_exponent(exact).unwrap();
        println!(
            "  {:>8}  {:>12.6}  {approx}  {:>12.6}",
            s.value(),
            exact.value(),
            back.value()
        );
    }

    // The minimal condition of parallelism: p processors are only worth
    // using if they at least halve the serial running time.
    println!("\nminimal condition (t_par <= t_ser / 2)");
    for (t_par, t_ser) in [(40.0, 100.0), (51.0, 100.0)] {
        let ok = amdahl::minimal_condition(t_par, t_ser).unwrap();
        println!("  t_par = {t_par}, t_ser = {t_ser}: {}", if ok { "met" } else { "not met" });
    }
}
