//! Tools for reasoning about parallel speedup with parametric cost models.
//!
//! The core quantities: a **speedup** `S = t_ser / t_par`, the **serial
//! fraction** picture behind Amdahl-style ceilings, and a **second-order
//! exponent of parallelism** `F` that compresses "how close is this run to
//! its ceiling" into one number (`F -> 0`: scaling freely; `F -> -1`:
//! pinned at the minimal useful speedup of 2; in between: somewhere on the
//! ridge). On top of those sit:
//!
//! * [`expr`] — a tiny expression language over `p` (processors) and `n`
//!   (problem dimension) in which cost models are written;
//! * [`amdahl`] — conversions between speedups, serial fractions, and
//!   exponents, exact and second-order;
//! * [`model`] — validated cost models `t_par(p, n)` with bundled examples
//!   (`trapezoid`, `matvec`, `fft`) and a JSON file format;
//! * [`asymptotics`] — numerical limits along processor schedules (Aitken
//!   acceleration plus explicit divergence detection);
//! * [`classifier`] — verdicts about scaled-problem parallelism: does
//!   growing the problem with the machine rescue the speedup?
//! * [`superlinear`] — the `S > p` frontier in its exact, second-order, and
//!   speedup forms, plus the FFT processor bound;
//! * [`fitting`] — least-squares recovery of model constants from measured
//!   timings;
//! * [`cli`] — the `speeduplab` command-line front end.
//!
//! ```
//! use speeduplab::{classifier, CostModel};
//!
//! let model = CostModel::trapezoid();
//! // Near-ideal speedup while the problem dwarfs the machine...
//! let s = model.speedup(64.0, 1e6).unwrap();
//! assert!(s.value() > 63.9);
//! // ...and the classifier confirms the problem can keep it that way.
//! let result = classifier::classify_default(&model);
//! assert_eq!(result.verdict, classifier::Verdict::Strong);
//! ```

pub mod amdahl;
pub mod asymptotics;
pub mod classifier;
pub mod cli;
pub mod expr;
pub mod fitting;
pub mod model;
pub mod superlinear;

pub use amdahl::{Exponent, Fraction, Speedup};
pub use classifier::{ClassificationResult, Verdict};
pub use model::{CostModel, GrowthConstraint, GrowthFunction};
