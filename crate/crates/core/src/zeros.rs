//! Zeros of `Q_n` and the real zeros predicted on `(x*, 0)` by the
//! oscillatory main term.
//!
//! `Q_n(0) = 0` always, so the root at the origin is split off exactly and the
//! remaining `n - 1` roots of `Q_n(x) / x` are found by Aberth-Ehrlich
//! iteration in [`HighPrecComplex`] arithmetic. The coefficients are scaled
//! by a power of two so the largest has magnitude below one; this keeps the
//! scaled polynomial exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{plane_partition_polynomial, PlanePartitionPolynomial, MIN_PRECISION_BITS};
use crate::hp::HighPrecComplex;
use crate::phase::x_star;
use crate::special::{trilog, SeriesTolerance};
use crate::ComplexValue;

/// Largest `n` accepted by [`roots`].
pub const MAX_ROOT_DEGREE: usize = 400;
/// Iteration cap for the simultaneous iteration.
pub const MAX_ITERATIONS: usize = 2000;
/// Default distance kept from `x*` and `0` when matching real zeros.
pub const DEFAULT_MATCH_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct RootSet {
    pub n: usize,
    pub precision_bits: u32,
    /// Sorted by real part, then imaginary part.
    pub roots: Vec<ComplexValue>,
    /// `|Q_n(r) / Q_n'(r)|`, the size of the Newton step left at each root.
    pub residuals: Vec<f64>,
    /// Whether `|Q_n(r)| < 2^{-p/4} sum_k |c_k| |r|^k`.
    pub accepted: Vec<bool>,
    pub converged: bool,
    pub iterations: usize,
    #[serde(skip)]
    hp_roots: Vec<HighPrecComplex>,
}

impl RootSet {
    /// The roots at full working precision, in the same order as `roots`.
    pub fn high_precision_roots(&self) -> &[HighPrecComplex] {
        &self.hp_roots
    }

    /// `|(-1)^{n-1} prod_{r != 0} r - n| / n`: the product of the nonzero
    /// roots must equal the coefficient of `x`, which is `n`.
    pub fn product_check(&self) -> f64 {
        let prec = self.precision_bits;
        let mut prod = HighPrecComplex::from_i64(1);
        for r in self.hp_roots.iter().filter(|r| !r.is_zero()) {
            prod = prod.mul_round(r, prec);
        }
        if self.n % 2 == 0 {
            prod = prod.neg();
        }
        let target = HighPrecComplex::from_i64(self.n as i64);
        prod.sub(&target).abs_f64() / self.n as f64
    }

    /// Roots with `|Im r| <= tol`, as real numbers in increasing order.
    pub fn real_roots(&self, tol: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.roots.iter().filter(|r| r.im.abs() <= tol).map(|r| r.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// CSV with header `re,im,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,residual\n");
        for (r, res) in self.roots.iter().zip(&self.residuals) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", r.re, r.im, res));
        }
        out
    }
}

struct Horner {
    value: HighPrecComplex,
    derivative: HighPrecComplex,
}

fn horner(coeffs: &[HighPrecComplex], z: &HighPrecComplex, prec: u32) -> Horner {
    let m = coeffs.len() - 1;
    let mut p = coeffs[m].clone();
    let mut dp = HighPrecComplex::zero();
    for c in coeffs[..m].iter().rev() {
        dp = dp.mul_round(z, prec).add(&p).round(prec);
        p = p.mul_round(z, prec).add(c).round(prec);
    }
    Horner {
        value: p,
        derivative: dp,
    }
}

/// All `n` zeros of `Q_n`, iterating at `precision_bits` of mantissa.
pub fn roots(n: usize, precision_bits: u32) -> Result<RootSet> {
    if n == 0 || n > MAX_ROOT_DEGREE {
        return Err(Error::OutOfRange(format!(
            "roots needs 1 <= n <= {MAX_ROOT_DEGREE}, got {n}"
        )));
    }
    roots_of(&plane_partition_polynomial(n)?, precision_bits)
}

/// All zeros of a plane partition polynomial.
pub fn roots_of(poly: &PlanePartitionPolynomial, precision_bits: u32) -> Result<RootSet> {
    if precision_bits < MIN_PRECISION_BITS {
        return Err(Error::OutOfRange(format!(
            "precision must be at least {MIN_PRECISION_BITS} bits, got {precision_bits}"
        )));
    }
    let n = poly.n();
    let prec = precision_bits;
    let c = poly.coeffs();
    if n == 0 || c.len() != n + 1 || c[n] != 1u32.into() {
        return Err(Error::OutOfRange("expected a monic polynomial of degree n >= 1".into()));
    }
    let m = n - 1;
    if m == 0 {
        return Ok(RootSet {
            n,
            precision_bits: prec,
            roots: vec![Complex64::new(0.0, 0.0)],
            residuals: vec![0.0],
            accepted: vec![true],
            converged: true,
            iterations: 0,
            hp_roots: vec![HighPrecComplex::zero()],
        });
    }

    // Q_n(x) / x, scaled by 2^-e so that every coefficient is below one.
    let e = c.iter().map(|v| v.bits()).max().unwrap_or(0) as i64;
    let coeffs: Vec<HighPrecComplex> = c[1..].iter().map(|v| HighPrecComplex::from_integer(v).scale_pow2(-e)).collect();
    let abs_coeffs: Vec<f64> = coeffs.iter().map(HighPrecComplex::abs_f64).collect();

    let radius = (n as f64).powf(1.0 / m as f64);
    let mut z: Vec<HighPrecComplex> = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64 + PI / (2.0 * m as f64);
            HighPrecComplex::from_complex64(Complex64::from_polar(radius, t)).round(prec)
        })
        .collect();
    let threshold = 2f64.powf(-(prec as f64) / 2.0);
    let mut active = vec![true; m];
    let mut iterations = 0;
    let mut converged = false;
    let one = HighPrecComplex::from_i64(1);
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut max_step: f64 = 0.0;
        for i in 0..m {
            if !active[i] {
                continue;
            }
            let h = horner(&coeffs, &z[i], prec);
            if h.value.is_zero() {
                active[i] = false;
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i].sub(zj).to_complex64();
                    s += 1.0 / d;
                }
            }
            let step = match h.value.div(&h.derivative, prec) {
                Some(newton) => {
                    let corr = one.sub(&newton.mul_round(&HighPrecComplex::from_complex64(s), prec));
                    newton.div(&corr, prec).unwrap_or(newton)
                }
                // Derivative vanished: nudge the estimate off the critical point.
                None => HighPrecComplex::from_complex64(Complex64::new(threshold.sqrt(), threshold.sqrt())),
            };
            let size = step.abs_f64();
            max_step = max_step.max(size);
            z[i] = z[i].sub(&step).round(prec);
            if size < threshold {
                active[i] = false;
            }
        }
        if max_step < threshold {
            converged = true;
            break;
        }
        if !active.iter().any(|&a| a) {
            converged = true;
            break;
        }
    }

    let mut entries: Vec<(HighPrecComplex, Complex64, f64, bool)> = z
        .into_iter()
        .map(|r| {
            let h = horner(&coeffs, &r, prec);
            let residual = match h.value.div(&h.derivative, 64) {
                Some(q) => q.abs_f64(),
                None => f64::INFINITY,
            };
            let rf = r.to_complex64();
            let ar = rf.norm();
            let scale: f64 = abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * ar + a);
            let accepted = h.value.abs_f64() < 2f64.powf(-(prec as f64) / 4.0) * scale;
            (r, rf, residual, accepted)
        })
        .collect();
    entries.push((HighPrecComplex::zero(), Complex64::new(0.0, 0.0), 0.0, true));
    entries.sort_by(|a, b| a.1.re.total_cmp(&b.1.re).then(a.1.im.total_cmp(&b.1.im)));

    Ok(RootSet {
        n,
        precision_bits: prec,
        roots: entries.iter().map(|e| e.1).collect(),
        residuals: entries.iter().map(|e| e.2).collect(),
        accepted: entries.iter().map(|e| e.3).collect(),
        converged,
        iterations,
        hp_roots: entries.into_iter().map(|e| e.0).collect(),
    })
}

/// The real zeros on `(x*, 0)` predicted by the cosine factor of the
/// oscillatory main term: solutions of
/// `(3 sqrt 3 / 4) 2^{1/3} n^{2/3} |Li3(x)|^{1/3} + pi/6 = pi/2 + j pi`,
/// listed for `j = 0, 1, ...` (so moving away from 0).
pub fn predicted_interval_zeros(n: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::OutOfRange("predicted zeros need n >= 1".into()));
    }
    let tol = SeriesTolerance::default();
    let abs_li = |x: f64| -> Result<f64> { Ok(trilog(Complex64::new(x, 0.0), tol)?.re.abs()) };
    let xs = x_star();
    let top = abs_li(xs)?;
    let c = 3.0 * 3f64.sqrt() / 4.0 * 2f64.cbrt() * (n as f64).powf(2.0 / 3.0);
    let mut out = Vec::new();
    for j in 0.. {
        let target = ((PI / 3.0 + j as f64 * PI) / c).powi(3);
        if target >= top {
            break;
        }
        // |Li3| increases as x moves from 0 towards x*.
        let (mut lo, mut hi) = (xs, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if abs_li(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroPair {
    pub actual: f64,
    pub predicted: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroMatchReport {
    pub window: (f64, f64),
    pub pairs: Vec<ZeroPair>,
    pub unmatched_actual: Vec<f64>,
    pub unmatched_predicted: Vec<f64>,
    pub max_distance: f64,
    pub mean_distance: f64,
    /// True when the two lists inside the window have different lengths.
    pub cardinality_mismatch: bool,
}

/// Greedy nearest pairing of the real roots of `actual` lying in
/// `(x* + margin, -margin)` with the predictions in the same window.
pub fn match_zeros(actual: &RootSet, predicted: &[f64], margin: f64) -> ZeroMatchReport {
    let window = (x_star() + margin, -margin);
    let inside = |x: f64| x > window.0 && x < window.1;
    let imag_tol = 2f64.powf(-(actual.precision_bits as f64) / 4.0);
    let real: Vec<f64> = actual.real_roots(imag_tol).into_iter().filter(|&x| inside(x)).collect();
    let pred: Vec<f64> = predicted.iter().copied().filter(|&x| inside(x)).collect();

    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(real.len() * pred.len());
    for (i, &a) in real.iter().enumerate() {
        for (j, &p) in pred.iter().enumerate() {
            candidates.push(((a - p).abs(), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_a = vec![false; real.len()];
    let mut used_p = vec![false; pred.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in candidates {
        if !used_a[i] && !used_p[j] {
            used_a[i] = true;
            used_p[j] = true;
            pairs.push(ZeroPair {
                actual: real[i],
                predicted: pred[j],
                distance: d,
            });
        }
    }
    pairs.sort_by(|a, b| a.actual.total_cmp(&b.actual));
    let max_distance = pairs.iter().map(|p| p.distance).fold(0.0, f64::max);
    let mean_distance = if pairs.is_empty() {
        0.0
    } else {
        pairs.iter().map(|p| p.distance).sum::<f64>() / pairs.len() as f64
    };
    ZeroMatchReport {
        window,
        unmatched_actual: real.iter().zip(&used_a).filter(|(_, &u)| !u).map(|(&x, _)| x).collect(),
        unmatched_predicted: pred.iter().zip(&used_p).filter(|(_, &u)| !u).map(|(&x, _)| x).collect(),
        cardinality_mismatch: real.len() != pred.len(),
        pairs,
        max_distance,
        mean_distance,
    }
}
