//! The trilogarithm on the closed unit disk and the phase functions
//!
//! ```text
//! L_k(x) = (1/k) * (2 Li3(x^k))^(1/3)
//! ```
//!
//! `Li3` is summed directly from its power series. The truncation point is
//! chosen from a certified tail bound, so every value returned carries an
//! absolute error of at most the requested tolerance (up to floating-point
//! rounding in the partial sum itself).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ComplexValue;

/// `zeta(3)`, the value of `Li3(1)`.
pub const ZETA3: f64 = 1.202_056_903_159_594_2;

/// Truncation policy for the series in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl SeriesTolerance {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return Err(Error::OutOfRange(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::OutOfRange("max_terms must be at least 1".into()));
        }
        Ok(Self { abs_tol, max_terms })
    }

    /// Same term budget, different tolerance.
    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }
}

impl Default for SeriesTolerance {
    /// `1e-14` with a budget of `10^7` terms, enough for `1e-10` on the unit
    /// circle where only the `1/(2N^2)` tail bound is available.
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            max_terms: 10_000_000,
        }
    }
}

/// Certified bound on `sum_{n>N} |x|^n / n^3`.
fn trilog_tail(abs_x: f64, abs_x_pow_next: f64, n_summed: usize) -> f64 {
    let n = n_summed as f64;
    let p_series = 1.0 / (2.0 * n * n);
    if abs_x < 1.0 {
        let m = n + 1.0;
        let geometric = abs_x_pow_next / (m * m * m * (1.0 - abs_x));
        geometric.min(p_series)
    } else {
        p_series
    }
}

/// `Li3(x) = sum_{n>=1} x^n / n^3` for `|x| <= 1`.
pub fn trilog(x: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    let abs_x = x.norm();
    if !abs_x.is_finite() || abs_x > 1.0 + 1e-12 {
        return Err(Error::OutOfRange(format!(
            "trilogarithm series needs |x| <= 1, got |x| = {abs_x}"
        )));
    }
    if abs_x == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let abs_x = abs_x.min(1.0);

    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut abs_pow_next = abs_x;
    let mut bound = f64::INFINITY;
    for n in 1..=tol.max_terms {
        power *= x;
        let nf = n as f64;
        sum += power / (nf * nf * nf);
        abs_pow_next *= abs_x;
        bound = trilog_tail(abs_x, abs_pow_next, n);
        if bound <= tol.abs_tol {
            return Ok(sum);
        }
    }
    Err(Error::Truncation {
        terms: tol.max_terms,
        achieved_bound: bound,
        requested: tol.abs_tol,
    })
}

/// `x^k` by repeated multiplication, never through a logarithm.
pub fn int_power(x: ComplexValue, k: u32) -> ComplexValue {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// Cube root with argument in `(-pi/3, pi/3]`.
///
/// Points on the negative real axis (with either sign of zero in the
/// imaginary part) map to argument exactly `pi/3`.
pub fn principal_cuberoot(z: ComplexValue) -> ComplexValue {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let arg = if z.im == 0.0 && z.re < 0.0 {
        PI
    } else {
        z.im.atan2(z.re)
    };
    let r = z.norm().cbrt();
    if arg == 0.0 {
        return Complex64::new(r, 0.0);
    }
    Complex64::from_polar(r, arg / 3.0)
}

/// The phase function `L_k(x) = (1/k) (2 Li3(x^k))^(1/3)`, principal branch.
pub fn phase_l(k: u32, x: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    if k == 0 {
        return Err(Error::OutOfRange("L_k needs k >= 1".into()));
    }
    let li = trilog(int_power(x, k), tol)?;
    Ok(principal_cuberoot(li * 2.0) / k as f64)
}
