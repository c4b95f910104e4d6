//! Seeded numerical audits of the identities and inequalities the library
//! relies on. Samples are drawn sequentially from a `ChaCha8` stream so a
//! seed fixes them exactly; evaluation then fans out over the current rayon
//! pool and results are gathered in sample order.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{arc_sum, cauchy_reference, default_alpha, default_delta, saddle_closed, saddle_numeric};
use crate::circle::{
    a_difference_margin, b_remainder_margin, calibrated_m, factorization_residual, g_bound_margin,
    omega_bound_margin,
};
use crate::error::Result;
use crate::phase::{re_l, strongest_higher_phase};
use crate::quad::QuadratureOptions;
use crate::special::SeriesTolerance;
use crate::ComplexValue;

/// One point of a circle-method audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcSample {
    pub h: u64,
    pub k: u64,
    pub n: u64,
    pub x: ComplexValue,
    pub w: ComplexValue,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn disk_point(rng: &mut ChaCha8Rng, max_abs: f64) -> Complex64 {
    let r = max_abs * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(-PI..PI))
}

fn coprime_numerator(rng: &mut ChaCha8Rng, k: u64) -> u64 {
    if k == 1 {
        return 0;
    }
    loop {
        let h = rng.gen_range(1..k);
        if h.gcd(&k) == 1 {
            return h;
        }
    }
}

/// `|x| <= 0.9`, `Re w` in `[0.05, 1]`, `|Im w| <= 1`, `k <= 5`, `n <= 20`.
pub fn factorization_samples(count: usize, seed: u64) -> Vec<ArcSample> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=5u64);
            let h = coprime_numerator(&mut rng, k);
            let n = rng.gen_range(0..=20u64);
            let x = disk_point(&mut rng, 0.9);
            let w = Complex64::new(rng.gen_range(0.05..=1.0), rng.gen_range(-1.0..=1.0));
            ArcSample { h, k, n, x, w }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub samples: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub worst: Option<ArcSample>,
    pub residuals: Vec<f64>,
}

/// Factorisation residuals on seeded samples.
pub fn factorization_suite(count: usize, seed: u64) -> Result<FactorizationReport> {
    let tol = SeriesTolerance::default();
    let samples = factorization_samples(count, seed);
    let residuals = samples
        .par_iter()
        .map(|s| factorization_residual(s.h, s.k, s.n, s.x, s.w, tol))
        .collect::<Result<Vec<f64>>>()?;
    let (worst, max_residual) = argmax(&samples, &residuals);
    Ok(FactorizationReport {
        samples: count,
        seed,
        max_residual,
        worst,
        residuals,
    })
}

fn argmax<T: Copy>(items: &[T], values: &[f64]) -> (Option<T>, f64) {
    let mut best: Option<(T, f64)> = None;
    for (&item, &v) in items.iter().zip(values) {
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((item, v));
        }
    }
    match best {
        Some((t, v)) => (Some(t), v),
        None => (None, 0.0),
    }
}

fn argmin<T: Copy>(items: &[T], values: &[f64]) -> (Option<T>, f64) {
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    let (t, v) = argmax(items, &neg);
    (t, -v)
}

/// Samples for the `g` bounds: `0 < |x| <= 0.9`, `Re w` in `[0.05, 1]`,
/// `|Im w| <= 1`, `k <= 5`; every fourth sample has real `w`.
pub fn bound_samples(count: usize, seed: u64) -> Vec<ArcSample> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let k = rng.gen_range(1..=5u64);
            let h = coprime_numerator(&mut rng, k);
            let mut x = disk_point(&mut rng, 0.9);
            if x.norm() < 1e-3 {
                x = Complex64::new(1e-3, 0.0);
            }
            let re = rng.gen_range(0.05..=1.0);
            let im = rng.gen_range(-1.0..=1.0);
            let w = Complex64::new(re, if i % 4 == 3 { 0.0 } else { im });
            ArcSample { h, k, n: 0, x, w }
        })
        .collect()
}

/// Samples for the `omega` bound: `|x| < 0.95`, `k <= 8`, `n <= 50`.
pub fn omega_samples(count: usize, seed: u64) -> Vec<ArcSample> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=8u64);
            let h = coprime_numerator(&mut rng, k);
            let n = rng.gen_range(0..=50u64);
            let x = disk_point(&mut rng, 0.95);
            ArcSample {
                h,
                k,
                n,
                x,
                w: Complex64::new(0.0, 0.0),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginSummary {
    pub samples: usize,
    pub min_margin: f64,
    pub worst: Option<ArcSample>,
}

impl MarginSummary {
    fn from(samples: &[ArcSample], margins: &[f64]) -> Self {
        let (worst, min_margin) = argmin(samples, margins);
        Self {
            samples: samples.len(),
            min_margin,
            worst,
        }
    }

    pub fn holds(&self) -> bool {
        self.min_margin >= 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub seed: u64,
    pub m: f64,
    pub g_bound: MarginSummary,
    pub a_difference: MarginSummary,
    pub b_remainder: MarginSummary,
    pub omega: MarginSummary,
}

impl BoundsReport {
    pub fn holds(&self) -> bool {
        self.g_bound.holds() && self.a_difference.holds() && self.b_remainder.holds() && self.omega.holds()
    }
}

/// Margins (bound minus value) of the `g`, `A`-difference, `B`-remainder and
/// `omega` bounds on seeded samples, with the calibrated `M`.
pub fn bounds_suite(count: usize, omega_count: usize, seed: u64) -> Result<BoundsReport> {
    let tol = SeriesTolerance::default();
    let m = calibrated_m();
    let samples = bound_samples(count, seed);
    let g_margins = samples
        .par_iter()
        .map(|s| g_bound_margin(s.h, s.k, s.x, s.w, m, tol))
        .collect::<Result<Vec<f64>>>()?;
    let a_samples: Vec<ArcSample> = samples.iter().copied().filter(|s| s.k >= 2).collect();
    let a_margins = a_samples
        .par_iter()
        .map(|s| a_difference_margin(s.h, s.k, s.x, s.w, tol))
        .collect::<Result<Vec<f64>>>()?;
    let b_margins = samples
        .par_iter()
        .map(|s| b_remainder_margin(s.k, s.x, s.w, m, tol))
        .collect::<Result<Vec<f64>>>()?;
    let om_samples = omega_samples(omega_count, seed.wrapping_add(1));
    let om_margins = om_samples
        .par_iter()
        .map(|s| omega_bound_margin(s.h, s.k, s.n, s.x, tol))
        .collect::<Result<Vec<f64>>>()?;
    Ok(BoundsReport {
        seed,
        m,
        g_bound: MarginSummary::from(&samples, &g_margins),
        a_difference: MarginSummary::from(&a_samples, &a_margins),
        b_remainder: MarginSummary::from(&samples, &b_margins),
        omega: MarginSummary::from(&om_samples, &om_margins),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub samples: usize,
    pub seed: u64,
    pub k_max: u32,
    /// Smallest `max(Re L_1, Re L_2) - max_{3<=k<=k_max} Re L_k`.
    pub min_gap: f64,
    pub worst: Option<ComplexValue>,
    pub violations: usize,
}

/// Points uniform in the open unit disk.
pub fn disk_samples(count: usize, seed: u64) -> Vec<ComplexValue> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| loop {
            let x = disk_point(&mut rng, 1.0);
            if x.norm() > 0.0 && x.norm() < 1.0 {
                break x;
            }
        })
        .collect()
}

/// Checks that no `L_k` with `3 <= k <= k_max` catches up with `L_1`, `L_2`.
pub fn dominance_suite(count: usize, seed: u64, k_max: u32) -> Result<DominanceReport> {
    let points = disk_samples(count, seed);
    let gaps = points
        .par_iter()
        .map(|&x| {
            let top = re_l(1, x)?.max(re_l(2, x)?);
            Ok(match strongest_higher_phase(x, k_max)? {
                Some((_, v)) => top - v,
                None => f64::INFINITY,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst, min_gap) = argmin(&points, &gaps);
    Ok(DominanceReport {
        samples: count,
        seed,
        k_max,
        min_gap,
        worst,
        violations: gaps.iter().filter(|&&g| g <= 0.0).count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleRow {
    pub m: u32,
    pub x: ComplexValue,
    pub n: u64,
    pub numeric: ComplexValue,
    pub closed: ComplexValue,
    /// `|numeric / closed - 1|`.
    pub relative_error: f64,
    /// `5 n^{-2/3}`.
    pub tolerance: f64,
}

impl SaddleRow {
    pub fn holds(&self) -> bool {
        self.relative_error <= self.tolerance
    }
}

/// Quadrature against the saddle-point closed form at `(m, x, n)` triples.
pub fn saddle_suite(cases: &[(u32, ComplexValue, u64)]) -> Result<Vec<SaddleRow>> {
    cases
        .par_iter()
        .map(|&(m, x, n)| {
            let numeric = saddle_numeric(m, n, x, default_delta())?;
            let closed = saddle_closed(m, n, x)?;
            Ok(SaddleRow {
                m,
                x,
                n,
                numeric,
                closed,
                relative_error: (numeric / closed - 1.0).norm(),
                tolerance: 5.0 * (n as f64).powf(-2.0 / 3.0),
            })
        })
        .collect()
}

/// The default saddle cases: `m = 1` at `x = 0.5` and `x = -0.4` for
/// `n = 200, 1600`.
pub fn default_saddle_cases() -> Vec<(u32, ComplexValue, u64)> {
    let mut v = Vec::new();
    for x in [Complex64::new(0.5, 0.0), Complex64::new(-0.4, 0.0)] {
        for n in [200u64, 1600] {
            v.push((1, x, n));
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcSumReport {
    pub x: ComplexValue,
    pub n: u64,
    pub order: u64,
    pub alpha: f64,
    pub arc_total: ComplexValue,
    pub cauchy: ComplexValue,
    pub relative_difference: f64,
    /// Sum of the non-major arcs' moduli over the major arc's modulus.
    pub minor_to_major: f64,
}

/// Sums the Farey-arc integrals of order `order` and compares with the
/// trapezoidal Cauchy integral on the same circle (`16 n` nodes).
pub fn arcsum_suite(x: ComplexValue, n: u64, order: u64) -> Result<ArcSumReport> {
    let alpha = default_alpha(x, n)?;
    let sum = arc_sum(x, n, order, alpha, QuadratureOptions::default())?;
    let cauchy = cauchy_reference(x, n, alpha, (16 * n as usize).max(16))?;
    Ok(ArcSumReport {
        x,
        n,
        order,
        alpha,
        arc_total: sum.total,
        cauchy,
        relative_difference: (sum.total / cauchy - 1.0).norm(),
        minor_to_major: sum.minor_to_major_ratio(),
    })
}
