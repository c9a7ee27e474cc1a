//! Superlinear speedups: the exponent threshold that characterizes S > p,
//! and the largest processor count an FFT-style model can stay above it.
//!
//! Run with: `cargo run --example superlinear_frontier`

use speeduplab::amdahl::{self, Speedup};
use speeduplab::superlinear::{
    self, fft_superlinear_pmax, fft_superlinear_pmax_scan,
};

fn main() {
    // A speedup is superlinear exactly when its exponent exceeds
    // log(1 - 1/p); the quadratic approximation -1/(2p^2) - 1/p sits just
    // above that and is easier to evaluate.
    println!("thresholds the exponent must exceed for S > p:");
    println!("  {:>8}  {:>15}  {:>15}", "p", "exact", "approximate");
    for p in [2.0, 10.0, 100.0, 1e4] {
        let exact = superlinear::superlinear_threshold_exact(p).unwrap();
        let approx = superlinear::superlinear_threshold_approx(p).unwrap();
        println!("  {p:>8}  {exact:>15.10}  {approx:>15.10}");
    }

    // A measured point: 12 processors running 12.5x faster than serial.
    let s = Speedup::new(12.5).unwrap();
    let f = amdahl::exponent_exact(s).unwrap();
    let report = superlinear::report(f, 12.0).unwrap();
    println!("\nmeasured S = 12.5 on p = 12:");
    println!("  exponent           = {:+.8}", report.exponent);
    println!("  exact threshold    = {:+.8} -> superlinear: {}", report.threshold_exact, report.exact_holds);
    println!("  approx threshold   = {:+.8} -> superlinear: {}", report.threshold_approx, report.approx_holds);
    println!("  speedup-form check = {}", report.speedup_form_holds);

    // For a model with t_par = A*log2(n) and t_ser = B*n*log2(n), the
    // superlinear region is a finite range of processor counts with a
    // closed-form right edge. A brute-force integer scan agrees with it.
    println!("\nFFT-style superlinear processor bound (C = A/B):");
    println!("  {:>6} {:>10}  {:>18}  {:>10}", "C", "n", "closed-form bound", "scan");
    for (c, n) in [(1.0, 100.0), (2.0, 50.0), (1.0, 4096.0), (1.0, 1_000_000.0)] {
        let bound = fft_superlinear_pmax(c, n).unwrap();
        let scan = fft_superlinear_pmax_scan(c, n).unwrap();
        println!("  {c:>6} {n:>10}  {bound:>18.6}  {scan:>10}");
    }
    println!("  (the bound is an open frontier: integers strictly below it qualify)");
}
