//! Acceptance checks. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use plpoly::asymptotics::{cauchy_reference, default_alpha, estimate_r1, estimate_r2};
use plpoly::exact::{enumerate_by_trace, evaluate_adaptive, PlanePartitionTable, ENUMERATION_LIMIT};
use plpoly::phase::{circle_crossing, real_crossing};
use plpoly::verify::{bounds_suite, default_saddle_cases, dominance_suite, factorization_suite, saddle_suite};
use plpoly::zeros::{match_zeros, predicted_interval_zeros, roots};

const SEED: u64 = 7;

type Outcome = (bool, String);

fn exact_value(table: &PlanePartitionTable, n: usize, x: Complex64) -> Complex64 {
    evaluate_adaptive(table.get(n).expect("table covers n"), x, 256)
        .expect("evaluation converges")
        .to_complex64()
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn phase_constants() -> Outcome {
    let start = Instant::now();
    let xs = real_crossing(1e-12).unwrap();
    let ts = circle_crossing(1e-10).unwrap() / PI;
    let elapsed = start.elapsed();
    let ok = (xs + 0.825_003_052_9).abs() <= 1e-8 && (ts - 0.951_703_125_1).abs() <= 1e-6 && within(elapsed, 10);
    (ok, format!("x* = {xs:.12}, theta*/pi = {ts:.10}, {:.2?}", elapsed))
}

fn exact_oracle() -> Outcome {
    let start = Instant::now();
    let table = PlanePartitionTable::build(100).unwrap();
    let mut mismatch = None;
    for n in 1..=ENUMERATION_LIMIT {
        if table.get(n).unwrap() != &enumerate_by_trace(n).unwrap() {
            mismatch = Some(n);
            break;
        }
    }
    let totals: Vec<_> = table.iter().map(|p| p.total()).collect();
    let increasing = totals.windows(2).skip(1).all(|w| w[0] < w[1]);
    let elapsed = start.elapsed();
    let ok = mismatch.is_none() && increasing && within(elapsed, 60);
    (
        ok,
        format!(
            "recurrence = enumeration for n <= {ENUMERATION_LIMIT}: {}, Q_n(1) increasing for 1 <= n <= 100: {increasing}, {:.2?}",
            mismatch.is_none(),
            elapsed
        ),
    )
}

fn factorization() -> Outcome {
    let r = factorization_suite(100, SEED).unwrap();
    (r.max_residual < 1e-9, format!("max residual {:.3e} over 100 samples", r.max_residual))
}

fn cauchy() -> Outcome {
    let cases = [(20u64, Complex64::new(0.3, 0.0)), (40, Complex64::new(-0.5, 0.2)), (60, Complex64::new(0.5, 0.0))];
    let table = PlanePartitionTable::build(60).unwrap();
    let mut worst: f64 = 0.0;
    for (n, x) in cases {
        let alpha = default_alpha(x, n).unwrap();
        let c = cauchy_reference(x, n, alpha, 16 * n as usize).unwrap();
        let q = exact_value(&table, n as usize, x);
        worst = worst.max((c / q - 1.0).norm());
    }
    (worst < 1e-8, format!("max relative difference {worst:.3e}"))
}

fn r1_convergence() -> Outcome {
    let start = Instant::now();
    let table = PlanePartitionTable::build(1000).unwrap();
    let x = Complex64::new(0.5, 0.0);
    let err = |n: usize| {
        let q = exact_value(&table, n, x);
        (estimate_r1(x, n as u64).unwrap().value / q - 1.0).norm()
    };
    let e125 = err(125);
    let e1000 = err(1000);
    let ratio = e1000 / e125;
    let elapsed = start.elapsed();
    let ok = e1000 < 0.15 && (0.4..=0.6).contains(&ratio) && within(elapsed, 300);
    (
        ok,
        format!("e(125) = {e125:.5}, e(1000) = {e1000:.5}, e(1000)/e(125) = {ratio:.4} (required in [0.4, 0.6]), {elapsed:.2?}"),
    )
}

fn r2_main_term() -> Outcome {
    let table = PlanePartitionTable::build(800).unwrap();
    let x = Complex64::new(-0.9, 0.0);
    let q = exact_value(&table, 800, x);
    let rel = (estimate_r2(x, 800).unwrap().value / q - 1.0).norm();
    let signs_match = (791..=800).all(|n| {
        let est = estimate_r2(x, n as u64).unwrap().value.re;
        let ex = exact_value(&table, n, x).re;
        est.signum() == ex.signum()
    });
    (
        rel < 0.2 && signs_match,
        format!("relative error at n = 800: {rel:.4}, signs agree for n = 791..800: {signs_match}"),
    )
}

fn saddle() -> Outcome {
    let rows = saddle_suite(&default_saddle_cases()).unwrap();
    let ok = rows.iter().all(|r| r.holds());
    let detail: Vec<String> = rows
        .iter()
        .map(|r| format!("x={} n={}: {:.2e}<={:.2e}", r.x.re, r.n, r.relative_error, r.tolerance))
        .collect();
    (ok, detail.join(", "))
}

fn oscillatory_zeros() -> Outcome {
    let set = roots(100, 256).unwrap();
    let report = match_zeros(&set, &predicted_interval_zeros(100).unwrap(), 1e-3);
    let ok = set.converged && !report.pairs.is_empty() && report.mean_distance < 1e-2 && report.max_distance < 5e-2;
    (
        ok,
        format!(
            "{} pairs, mean distance {:.2e}, max distance {:.2e}, unmatched actual {}, unmatched predicted {}",
            report.pairs.len(),
            report.mean_distance,
            report.max_distance,
            report.unmatched_actual.len(),
            report.unmatched_predicted.len()
        ),
    )
}

fn dominance() -> Outcome {
    let r = dominance_suite(1000, SEED, 50).unwrap();
    (
        r.violations == 0,
        format!("{} violations over 1000 samples, smallest gap {:.3e}", r.violations, r.min_gap),
    )
}

fn bounds() -> Outcome {
    let r = bounds_suite(200, 100, SEED).unwrap();
    (
        r.holds(),
        format!(
            "M = {:.5}, min margins: g {:.3e}, A {:.3e}, B {:.3e}, omega {:.3e}",
            r.m, r.g_bound.min_margin, r.a_difference.min_margin, r.b_remainder.min_margin, r.omega.min_margin
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("phase constants", phase_constants),
        ("exact oracle equivalence", exact_oracle),
        ("factorization identity", factorization),
        ("Cauchy oracle", cauchy),
        ("R(1) convergence", r1_convergence),
        ("R(2) main term", r2_main_term),
        ("saddle closed form", saddle),
        ("oscillatory zeros", oscillatory_zeros),
        ("dominance audit", dominance),
        ("bound margins", bounds),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        if !ok {
            failures += 1;
        }
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
