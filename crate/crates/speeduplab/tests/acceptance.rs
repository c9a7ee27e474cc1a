//! Acceptance checks, one test per numbered criterion, so the harness prints
//! exactly one pass/fail line for each. Every tolerance is pinned inline.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use speeduplab::amdahl::{self, Fraction, Speedup};
use speeduplab::asymptotics::{self, Schedule};
use speeduplab::classifier::{self, GrowthKind, Verdict};
use speeduplab::cli::{self, CurveSeries};
use speeduplab::fitting::{self, ModelTemplate, TimingSample};
use speeduplab::model::{CostModel, ExponentOutcome, GrowthConstraint, GrowthFunction};
use speeduplab::superlinear;

/// `count` geometrically spaced values from `lo` to `hi`.
fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (count as f64 - 1.0));
    (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
}

/// Run the command-line entry point in-process and capture its output.
fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["speeduplab"];
    argv.extend_from_slice(args);
    let code = cli::run_from(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// An 80% parallel fraction caps the speedup at 5: the curve is within 1e-2
/// of the cap by p = 10^6, and the cap itself is exact to 1e-12.
#[test]
fn criterion_01_eighty_percent_parallel_saturates_at_five() {
    let f = Fraction::new(0.8).unwrap();
    let s = amdahl::speedup_from_fraction(f, 1e6).unwrap().value();
    assert!((s - 5.0).abs() <= 1e-2, "speedup(0.8, p = 1e6) = {s}, expected 5 within 1e-2");
    let cap = amdahl::amdahl_limit(f).unwrap().value();
    assert!((cap - 5.0).abs() <= 1e-12, "saturation limit = {cap}, expected 5 within 1e-12");
    println!("criterion 01: PASS (speedup {s:.6}, limit {cap})");
}

/// The bundled trapezoid model over the default growth family is strongly
/// parallel, witnessed by quadratic data growth whose exponent limit is zero.
#[test]
fn criterion_02_trapezoid_is_strong_with_quadratic_witness() {
    let m = CostModel::trapezoid();
    let result =
        classifier::classify(&m, &GrowthFunction::default_family(), &Schedule::default(), 1e-3);
    assert_eq!(result.verdict, Verdict::Strong, "verdict was {}", result.verdict);

    let ev = result.evidence_for("p^2").expect("evidence for p^2");
    assert_eq!(ev.kind, GrowthKind::InfiniteRatio, "p^2 should outpace p");
    assert!(ev.admissible, "p^2 should be admissible for an unconstrained model");
    let est = ev.exponent.as_ref().and_then(|e| e.estimate.as_ref()).expect("exponent estimate");
    assert!(est.converged, "exponent along p^2 did not settle: {est:?}");
    let v = est.value.finite().expect("finite exponent limit");
    assert!(v.abs() < 1e-3, "exponent limit along p^2 = {v}, expected |value| < 1e-3");
    println!("criterion 02: PASS (strong; exponent along p^2 = {v:e})");
}

/// Restricting the same trapezoid model to linear data growth only leaves a
/// weakly parallel verdict.
#[test]
fn criterion_03_trapezoid_with_linear_growth_only_is_weak() {
    let m = CostModel::trapezoid();
    let family = [GrowthFunction::identity()];
    let result = classifier::classify(&m, &family, &Schedule::default(), 1e-3);
    assert_eq!(result.verdict, Verdict::Weak, "verdict was {}", result.verdict);
    println!("criterion 03: PASS (weak with family {{p}})");
}

/// The bundled FFT model carries an explicit serial time and a linear-in-p
/// growth constraint; it classifies as weakly parallel, and its time ratio
/// along g = 100p vanishes.
#[test]
fn criterion_04_fft_is_weak_and_its_ratio_vanishes_along_100p() {
    let m = CostModel::fft();
    assert!(
        matches!(m.constraint(), GrowthConstraint::LinearInP { k } if k == 100.0),
        "fft should constrain growths to linear in p with k = 100"
    );
    assert!(m.t_ser().is_some(), "fft should bundle an explicit serial time");

    let result = classifier::classify_default(&m);
    assert_eq!(result.verdict, Verdict::Weak, "verdict was {}", result.verdict);

    let g = GrowthFunction::linear(100.0).unwrap();
    let est = asymptotics::ratio_limit(&m, &g, &Schedule::default()).unwrap();
    assert!(est.converged, "ratio limit along 100*p did not settle: {est:?}");
    let v = est.value.finite().expect("finite ratio limit");
    assert!(v.abs() <= 1e-9, "ratio limit along 100*p = {v}, expected 0 within 1e-9");
    println!("criterion 04: PASS (weak; ratio limit along 100*p = {v:e})");
}

/// The bundled matvec model saturates: the time ratio tends to 1/2 and the
/// exponent to -1 along every default growth, the speedup at p = 2^30 is
/// already 2 within 1e-2, and the verdict comes out saturating.
#[test]
fn criterion_05_matvec_saturates_at_two_and_is_amdahl_like() {
    let m = CostModel::matvec();
    let sched = Schedule::default();
    let p_probe = (1u64 << 30) as f64;

    for g in GrowthFunction::default_family() {
        let ratio = asymptotics::ratio_limit(&m, &g, &sched).unwrap();
        assert!(ratio.converged, "ratio limit along {} did not settle", g.name());
        let r = ratio.value.finite().expect("finite ratio limit");
        assert!(
            (r - 0.5).abs() <= 1e-6,
            "ratio limit along {} = {r}, expected 0.5 within 1e-6",
            g.name()
        );

        let el = asymptotics::exponent_limit(&m, &g, &sched).unwrap();
        let est = el.estimate.expect("exponent estimate");
        assert!(est.converged, "exponent along {} did not settle", g.name());
        let f = est.value.finite().expect("finite exponent limit");
        assert!(
            (f + 1.0).abs() <= 1e-3,
            "exponent limit along {} = {f}, expected -1 within 1e-3",
            g.name()
        );

        let n = g.value_at(p_probe).unwrap();
        let s = m.speedup(p_probe, n).unwrap().value();
        assert!(
            (s - 2.0).abs() <= 1e-2,
            "speedup along {} at p = 2^30 is {s}, expected 2 within 1e-2",
            g.name()
        );
    }

    let verdict = classifier::classify_default(&m).verdict;
    assert_eq!(verdict, Verdict::AmdahlLike, "verdict was {verdict}");
    println!("criterion 05: PASS (ratio 1/2, exponent -1, speedup 2, amdahl_like)");
}

/// Holding the dimension fixed at n = 10^6 while processors grow: the speedup
/// curve turns downhill (the monotonicity scan must flag it), the pointwise
/// exponent is marked not-applicable at p = 2 where parallel time exceeds
/// half the serial time, and the speedup at p = 2^30 is required to have
/// collapsed below 0.1.
///
/// The last clause cannot hold in f64 arithmetic. With t_par = n/p + log(p),
/// speedup(p, 10^6) = 10^6 / (10^6/p + log p), and log p <= log(f64::MAX)
/// ~= 709.8 for every representable p, so the speedup stays above ~1409
/// everywhere; the collapse toward zero is real but logarithmically slow.
/// The clause is asserted as stated and fails honestly.
#[test]
fn criterion_06_fixed_dimension_collapse() {
    let m = CostModel::trapezoid();
    let n0 = 1e6;
    let g = GrowthFunction::constant(n0).unwrap();
    let p_probe = (1u64 << 30) as f64;

    let report = classifier::monotonicity_check(&m, &g, 2.0, p_probe, 64).unwrap();
    assert!(!report.passed, "expected speedup decreases past p = n, found none");

    let sched = Schedule::geometric(1, 30, 1e-6, 3).unwrap();
    let curve = classifier::exponent_curve(&m, &g, &sched).unwrap();
    let first = curve.first().expect("non-empty exponent curve");
    assert_eq!(first.p, 2.0);
    match first.outcome {
        ExponentOutcome::NotApplicable { ratio } => {
            assert!(ratio > 0.5, "flagged ratio {ratio} should exceed 1/2");
        }
        ExponentOutcome::Value(v) => {
            panic!("expected the exponent to be not-applicable at p = 2, got {v}")
        }
    }

    let s = m.speedup(p_probe, n0).unwrap().value();
    assert!(
        s < 0.1,
        "speedup(2^30, 10^6) = {s:.1}, not < 0.1: with t_par = n/p + log(p) the \
         speedup is n/(n/p + log p), and log p never exceeds log(f64::MAX) ~= 709.8, \
         so no representable p brings it below ~1409; the collapse to zero is \
         logarithmic in p and unreachable in finite f64 arithmetic"
    );
    println!("criterion 06: PASS");
}

/// The exact superlinearity threshold lies strictly below its quadratic
/// approximation, both negative; and the exact threshold test agrees with
/// the plain s > p comparison across a 50x50 grid.
#[test]
fn criterion_07_superlinear_threshold_ordering_and_grid_equivalence() {
    for &p in &[2.0f64, 10.0, 100.0, 1e4] {
        let te = superlinear::superlinear_threshold_exact(p).unwrap();
        let ta = superlinear::superlinear_threshold_approx(p).unwrap();
        assert!(te < ta, "exact threshold {te} should lie below approximate {ta} at p = {p}");
        assert!(ta < 0.0, "approximate threshold {ta} should be negative at p = {p}");
    }

    let speedups = log_spaced(1.5, 1.5e6, 50);
    let processors = log_spaced(2.0, 1e6, 50);
    for &s in &speedups {
        let f = amdahl::exponent_exact(Speedup::new(s).unwrap()).unwrap();
        for &p in &processors {
            let via_threshold = superlinear::superlinear_exact(f, p).unwrap();
            assert_eq!(
                via_threshold,
                s > p,
                "threshold test and s > p disagree at s = {s}, p = {p}"
            );
        }
    }
    println!("criterion 07: PASS (ordering at 4 processor counts; 50x50 grid equivalence)");
}

/// The closed-form processor bound for the FFT model matches a brute-force
/// integer scan of the underlying strict inequality.
#[test]
fn criterion_08_fft_processor_bound_and_integer_scan_agree() {
    let bound = superlinear::fft_superlinear_pmax(1.0, 100.0).unwrap();
    assert!(
        (bound - 100.4975).abs() <= 1e-4,
        "closed-form bound = {bound}, expected 100.4975 within 1e-4"
    );
    let scan = superlinear::fft_superlinear_pmax_scan(1.0, 100.0).unwrap();
    assert_eq!(scan, 100, "integer scan at C = 1, n = 100");

    let mut rng = StdRng::seed_from_u64(0xACCE_5508);
    let mut checked = 0u32;
    while checked < 100 {
        let c = rng.gen_range(1u64..=20) as f64;
        let n = rng.gen_range((100.0 * c) as u64..=1_000_000) as f64;
        let bound = superlinear::fft_superlinear_pmax(c, n).unwrap();
        // The bound is an open frontier: if it lands exactly on an integer,
        // floor and the strict scan legitimately differ by one. Skip ties.
        if (bound - bound.round()).abs() < 1e-9 {
            continue;
        }
        let scan = superlinear::fft_superlinear_pmax_scan(c, n).unwrap();
        assert_eq!(bound.floor() as u64, scan, "floor(bound) != scan at C = {c}, n = {n}");
        checked += 1;
    }
    println!("criterion 08: PASS (bound ~100.4975, scan 100; 100 random agreements)");
}

/// Round trips: fraction -> speedup -> fraction at 1e-12, speedup -> exact
/// exponent -> speedup at 1e-12 relative, and the quadratic exponent
/// approximation within 1e-3 relative of the exact one for all s >= 20.
#[test]
fn criterion_09_round_trips_and_approximation_accuracy() {
    let mut rng = StdRng::seed_from_u64(0xACCE_5509);

    for i in 0..10_000 {
        let f = if i == 0 { 1.0 } else { rng.gen_range(1e-9f64..1.0) };
        let p = rng.gen_range(2.0f64..1e6);
        let s = amdahl::speedup_from_fraction(Fraction::new(f).unwrap(), p).unwrap();
        let back = amdahl::fraction_from_speedup(s, p).unwrap().value();
        assert!(
            (back - f).abs() <= 1e-12,
            "fraction round trip drifted: {f} -> {back} at p = {p}"
        );
    }

    for _ in 0..10_000 {
        let s = 10f64.powf(rng.gen_range(1e-7f64..12.0));
        let f = amdahl::exponent_exact(Speedup::new(s).unwrap()).unwrap();
        let back = amdahl::speedup_from_exponent(f).unwrap().value();
        assert!(
            ((back - s) / s).abs() <= 1e-12,
            "speedup round trip drifted: {s} -> {back}"
        );
    }

    let log10_20 = 20f64.log10();
    for i in 0..10_000 {
        let s = if i == 0 { 20.0 } else { 10f64.powf(rng.gen_range(log10_20..12.0)) };
        let exact = amdahl::exponent_exact(Speedup::new(s).unwrap()).unwrap().value();
        let approx = amdahl::exponent_approx(Speedup::new(s).unwrap()).unwrap().value();
        assert!(
            ((approx - exact) / exact).abs() <= 1e-3,
            "approximation off at s = {s}: exact {exact}, approximate {approx}"
        );
    }
    println!("criterion 09: PASS (3 x 10^4 randomized checks)");
}

/// Noise-free synthetic timings from each bundled model are fitted with a
/// tiny residual, the constants are recovered to 1e-9 relative, and fitting
/// followed by classification reproduces each model's verdict, all in < 5 s.
#[test]
fn criterion_10_noise_free_fits_recover_constants_and_verdicts() {
    let started = Instant::now();
    let cases = [
        (ModelTemplate::trapezoid(), CostModel::trapezoid(), Verdict::Strong),
        (ModelTemplate::fft(), CostModel::fft(), Verdict::Weak),
        (ModelTemplate::matvec(), CostModel::matvec(), Verdict::AmdahlLike),
    ];

    for (template, truth, expected) in cases {
        let mut samples = Vec::new();
        for &p in &[1u64, 2, 4, 8, 16, 32] {
            for &n in &[4u64, 8, 16, 32] {
                let t = truth.t_par_at(p as f64, n as f64).unwrap();
                samples.push(TimingSample::new(p, n, t).unwrap());
            }
        }

        let fit = fitting::fit(&template, &samples).unwrap();
        assert!(
            fit.residual_norm < 1e-9,
            "{}: residual norm {} on exact data",
            template.name(),
            fit.residual_norm
        );
        for (name, &value) in &fit.constants {
            let truth_value = truth.constants()[name.as_str()];
            assert!(
                ((value - truth_value) / truth_value).abs() <= 1e-9,
                "{}: constant {name} fitted as {value}, truth {truth_value}",
                template.name()
            );
        }

        let (_, classification) = fitting::fit_then_classify(
            &template,
            &samples,
            &GrowthFunction::default_family(),
            &Schedule::default(),
            1e-3,
        )
        .unwrap();
        assert_eq!(
            classification.verdict,
            expected,
            "{}: verdict after fitting",
            template.name()
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "fitting suite took {elapsed:?}");
    println!("criterion 10: PASS ({elapsed:?})");
}

/// Emitted speedup curves have the expected shape: for the trapezoid model,
/// faster-growing data strictly dominates at every grid point p >= 8; for
/// matvec, the growth choice moves the curve by less than 5% once p >= 100.
#[test]
fn criterion_11_emitted_curves_have_expected_shape() {
    let series = |model: &str, g: &str| -> CurveSeries {
        let (code, out, err) = run_cli(&["speedup", model, "--g", g]);
        assert_eq!(code, 0, "speedup {model} --g {g} exited {code}: {err}");
        CurveSeries::from_csv(&out).expect("emitted CSV parses back")
    };

    let quad = series("trapezoid", "p^2");
    let plogp = series("trapezoid", "p*log(p)");
    let lin = series("trapezoid", "p");
    let mut compared = 0;
    for ((&(p, s_quad), &(p2, s_plogp)), &(p3, s_lin)) in
        quad.points().iter().zip(plogp.points()).zip(lin.points())
    {
        assert_eq!(p, p2);
        assert_eq!(p, p3);
        if p >= 8.0 {
            assert!(
                s_quad > s_plogp && s_plogp > s_lin,
                "dominance broken at p = {p}: {s_quad} vs {s_plogp} vs {s_lin}"
            );
            compared += 1;
        }
    }
    assert!(compared >= 50, "only {compared} grid points at p >= 8");

    let matvec: Vec<CurveSeries> =
        ["p", "p*log(p)", "p^2"].iter().map(|g| series("matvec", g)).collect();
    let mut compared = 0;
    for i in 0..matvec[0].points().len() {
        let p = matvec[0].points()[i].0;
        if p < 100.0 {
            continue;
        }
        let values =
            [matvec[0].points()[i].1, matvec[1].points()[i].1, matvec[2].points()[i].1];
        for a in 0..3 {
            for b in a + 1..3 {
                let rel = (values[a] - values[b]).abs() / values[a].max(values[b]);
                assert!(
                    rel < 0.05,
                    "matvec curves differ by {:.3}% at p = {p}",
                    rel * 100.0
                );
            }
        }
        compared += 1;
    }
    assert!(compared >= 20, "only {compared} grid points at p >= 100");
    println!("criterion 11: PASS");
}
