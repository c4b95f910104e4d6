//! Farey dissection and the factorisation of the generating function near
//! the roots of unity `e^{2 pi i h/k}`.
//!
//! With `u = e^{-w + 2 pi i h/k}` and `Re w > 0`,
//!
//! ```text
//! ln P(x, u) = sum_l (x^l / l) u^l / (1 - u^l)^2 = A_{h,k}(x, w) + B_{h,k}(x, w)
//! ```
//!
//! where `A` collects the indices `k ∤ l` and `B` the multiples of `k`. The
//! pieces
//!
//! ```text
//! Psi     = Li3(x^k) / (k^3 w^2)
//! ln omega = ln(1 - x^k) / (12k) + A_{h,k}(x, 0) - 2 pi i n h/k     (k >= 2)
//! g       = [A(x, w) - A(x, 0)] + [B - Psi - ln(1 - x^k) / (12k)]
//! ```
//!
//! satisfy `P = omega * e^{2 pi i n h/k} * e^Psi * e^g`. The bounds on `g`
//! are exposed as margins (bound minus observed value) so that they can be
//! audited numerically.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::special::{int_power, trilog, SeriesTolerance, ZETA3};
use crate::ComplexValue;

/// A reduced fraction `h/k` of the Farey sequence together with its
/// neighbours. The arc runs between the two mediants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FareyArc {
    pub h: u64,
    pub k: u64,
    /// Left neighbour `h'/k'`; for `0/1` this is the last fraction shifted
    /// down by one.
    pub left: (i64, u64),
    /// Right neighbour `h''/k''`; for the last fraction this is `1/1`.
    pub right: (i64, u64),
}

impl FareyArc {
    pub fn value(&self) -> f64 {
        self.h as f64 / self.k as f64
    }

    /// `(h + h') / (k + k')` as an exact fraction.
    pub fn left_mediant(&self) -> (i64, u64) {
        (self.h as i64 + self.left.0, self.k + self.left.1)
    }

    pub fn right_mediant(&self) -> (i64, u64) {
        (self.h as i64 + self.right.0, self.k + self.right.1)
    }

    /// Arc offsets relative to `h/k`: `[-1/(k(k+k')), 1/(k(k+k''))]`.
    pub fn offsets(&self) -> (f64, f64) {
        let k = self.k as f64;
        (
            -1.0 / (k * (k + self.left.1 as f64)),
            1.0 / (k * (k + self.right.1 as f64)),
        )
    }

    pub fn bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.offsets();
        (self.value() + lo, self.value() + hi)
    }
}

/// All reduced `h/k` in `[0, 1)` with `k <= order`, increasing.
pub fn farey(order: u64) -> Result<Vec<FareyArc>> {
    if order == 0 {
        return Err(Error::OutOfRange("Farey order must be at least 1".into()));
    }
    let mut fracs: Vec<(u64, u64)> = vec![(0, 1)];
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, order);
    while c < d {
        fracs.push((c, d));
        let t = (order + b) / d;
        let (nc, nd) = (t * c - a, t * d - b);
        a = c;
        b = d;
        c = nc;
        d = nd;
    }
    let len = fracs.len();
    let arcs = fracs
        .iter()
        .enumerate()
        .map(|(i, &(h, k))| {
            let left = if i == 0 {
                let (lh, lk) = fracs[len - 1];
                (lh as i64 - lk as i64, lk)
            } else {
                (fracs[i - 1].0 as i64, fracs[i - 1].1)
            };
            let right = if i + 1 == len {
                (1, 1)
            } else {
                (fracs[i + 1].0 as i64, fracs[i + 1].1)
            };
            FareyArc { h, k, left, right }
        })
        .collect();
    Ok(arcs)
}

fn check_inside(x: ComplexValue, what: &str) -> Result<()> {
    let r = x.norm();
    if !r.is_finite() || r >= 1.0 {
        return Err(Error::OutOfRange(format!("{what} needs |x| < 1, got |x| = {r}")));
    }
    Ok(())
}

fn check_coprime(h: u64, k: u64) -> Result<()> {
    if k == 0 || h.gcd(&k) != 1 {
        return Err(Error::OutOfRange(format!("need gcd(h, k) = 1 with k >= 1, got {h}/{k}")));
    }
    Ok(())
}

fn truncation(terms: usize, bound: f64, tol: SeriesTolerance) -> Error {
    Error::Truncation {
        terms,
        achieved_bound: bound,
        requested: tol.abs_tol,
    }
}

/// `e^{-z} / (1 - e^{-z})^2 = 1 / (4 sinh^2(z/2))`.
fn kernel(z: Complex64) -> Complex64 {
    if z.re > 20.0 {
        let e = (-z).exp();
        e / ((1.0 - e) * (1.0 - e))
    } else {
        let s = (z * 0.5).sinh();
        1.0 / (4.0 * s * s)
    }
}

/// `q / (1 - q)^2` with `q = e^{-t}`: the envelope of `|kernel(z)|` when
/// `Re z >= t`.
fn kernel_envelope(t: f64) -> f64 {
    if t <= 0.0 {
        return f64::INFINITY;
    }
    let q = (-t).exp();
    q / ((1.0 - q) * (1.0 - q))
}

/// Coefficients of `f(z) = kernel(z) - 1/z^2 + 1/12 = sum_{m>=2} c_m z^{2m-2}`,
/// `c_m = -B_{2m} (2m - 1) / (2m)!`.
fn remainder_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        // B_4 .. B_26 as exact fractions.
        let bernoulli: [(f64, f64); 12] = [
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
            (854513.0, 138.0),
            (-236364091.0, 2730.0),
            (8553103.0, 6.0),
        ];
        bernoulli
            .iter()
            .enumerate()
            .map(|(i, &(num, den))| {
                let m = (i + 2) as i32;
                let two_m = 2 * m;
                let fact: f64 = (1..=two_m).map(f64::from).product();
                -(num / den) * f64::from(two_m - 1) / fact
            })
            .collect()
    })
}

/// `e^{-z}/(1-e^{-z})^2 - 1/z^2 + 1/12`, accurate for small `|z|`.
pub fn kernel_remainder(z: Complex64) -> Complex64 {
    if z.norm() < 1.0 {
        let z2 = z * z;
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in remainder_coefficients().iter().rev() {
            acc = acc * z2 + c;
        }
        acc * z2
    } else {
        kernel(z) - 1.0 / (z * z) + 1.0 / 12.0
    }
}

/// `ln P(x, u) = sum_{l>=1} (x^l / l) u^l / (1 - u^l)^2`.
pub fn log_gen_fn(x: ComplexValue, u: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    check_inside(x, "ln P")?;
    check_inside(u, "ln P")?;
    let ax = x.norm();
    let au = u.norm();
    let axu = ax * au;
    if axu == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut xp = Complex64::new(1.0, 0.0);
    let mut up = Complex64::new(1.0, 0.0);
    let mut axu_next = axu;
    let mut au_next = au;
    let mut bound = f64::INFINITY;
    for l in 1..=tol.max_terms {
        xp *= x;
        up *= u;
        let one_minus = 1.0 - up;
        sum += xp / l as f64 * up / (one_minus * one_minus);
        axu_next *= axu;
        au_next *= au;
        let m = (l + 1) as f64;
        bound = axu_next / (m * (1.0 - axu) * (1.0 - au_next) * (1.0 - au_next));
        if bound <= tol.abs_tol {
            return Ok(sum);
        }
    }
    Err(truncation(tol.max_terms, bound, tol))
}

/// `-(1/4) csc^2(pi l h / k)` for `k ∤ l`, with the argument reduced mod `k`.
fn a_zero_factor(l: u64, h: u64, k: u64) -> f64 {
    let r = (l % k) * (h % k) % k;
    let s = (PI * r as f64 / k as f64).sin();
    -0.25 / (s * s)
}

/// `e^{2 pi i l h / k}` with the argument reduced mod `k`.
fn root_of_unity(l: u64, h: u64, k: u64) -> Complex64 {
    let r = (l % k) * (h % k) % k;
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / k as f64)
}

/// `A_{h,k}(x, w) = sum_{k ∤ l} (x^l / l) e^{-lw + 2 pi i l h/k} / (1 - e^{-lw + 2 pi i l h/k})^2`.
///
/// `w = 0` is allowed and gives `-(1/4) sum_{k ∤ l} (x^l / l) csc^2(pi l h/k)`.
/// The sum is empty for `k = 1`.
pub fn a_series(h: u64, k: u64, x: ComplexValue, w: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    check_coprime(h, k)?;
    check_inside(x, "A_{h,k}")?;
    if k == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let at_zero = w.re == 0.0 && w.im == 0.0;
    if !at_zero && !(w.re > 0.0) {
        return Err(Error::OutOfRange(format!("A_{{h,k}} needs Re w > 0 or w = 0, got {w}")));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kf = k as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut xp = Complex64::new(1.0, 0.0);
    let mut ax_next = ax;
    let mut bound = f64::INFINITY;
    for l in 1..=tol.max_terms {
        xp *= x;
        ax_next *= ax;
        let lu = l as u64;
        if lu % k != 0 {
            let lf = l as f64;
            let factor = if at_zero {
                Complex64::new(a_zero_factor(lu, h, k), 0.0)
            } else {
                let e = (-w * lf).exp() * root_of_unity(lu, h, k);
                e / ((1.0 - e) * (1.0 - e))
            };
            sum += xp / lf * factor;
        }
        let m = (l + 1) as f64;
        let envelope = if at_zero {
            kf * kf / 16.0
        } else {
            kernel_envelope(m * w.re).min(f64::MAX)
        };
        bound = envelope * ax_next / (m * (1.0 - ax));
        if bound <= tol.abs_tol {
            return Ok(sum);
        }
    }
    Err(truncation(tol.max_terms, bound, tol))
}

/// `B_{h,k}(x, w) = sum_{l>=1} (x^{kl} / (kl)) e^{-lkw} / (1 - e^{-lkw})^2`.
pub fn b_series(k: u64, x: ComplexValue, w: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    if k == 0 {
        return Err(Error::OutOfRange("B_{h,k} needs k >= 1".into()));
    }
    check_inside(x, "B_{h,k}")?;
    if !(w.re > 0.0) {
        return Err(Error::OutOfRange(format!("B_{{h,k}} needs Re w > 0, got {w}")));
    }
    let xk = int_power(x, k as u32);
    let axk = xk.norm();
    if axk == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kf = k as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut xp = Complex64::new(1.0, 0.0);
    let mut ax_next = axk;
    let mut bound = f64::INFINITY;
    for l in 1..=tol.max_terms {
        xp *= xk;
        ax_next *= axk;
        let kl = kf * l as f64;
        sum += xp / kl * kernel(w * kl);
        let m = kf * (l + 1) as f64;
        bound = kernel_envelope(m * w.re) * ax_next / (m * (1.0 - axk));
        if bound <= tol.abs_tol {
            return Ok(sum);
        }
    }
    Err(truncation(tol.max_terms, bound, tol))
}

/// `Psi_{h,k}(x, w) = Li3(x^k) / (k^3 w^2)`.
pub fn psi(k: u64, x: ComplexValue, w: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    if k == 0 {
        return Err(Error::OutOfRange("Psi needs k >= 1".into()));
    }
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::OutOfRange("Psi is singular at w = 0".into()));
    }
    let kf = k as f64;
    Ok(trilog(int_power(x, k as u32), tol)? / (kf * kf * kf * w * w))
}

/// `ln omega_{h,k,n}(x)` before exponentiation (principal logarithms).
pub fn log_omega(h: u64, k: u64, n: u64, x: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    check_coprime(h, k)?;
    check_inside(x, "omega")?;
    let kf = k as f64;
    let log_term = (1.0 - int_power(x, k as u32)).ln() / (12.0 * kf);
    if k == 1 {
        return Ok(log_term);
    }
    let a0 = a_series(h, k, x, Complex64::new(0.0, 0.0), tol)?;
    let r = ((n % k) * (h % k) % k) as f64;
    Ok(log_term + a0 - Complex64::new(0.0, 2.0 * PI * r / kf))
}

/// `omega_{h,k,n}(x)`; equals `(1 - x)^{1/12}` for `k = 1`.
pub fn omega(h: u64, k: u64, n: u64, x: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    Ok(log_omega(h, k, n, x, tol)?.exp())
}

/// `A_{h,k}(x, w) - A_{h,k}(x, 0)`, summed termwise.
pub fn a_difference(h: u64, k: u64, x: ComplexValue, w: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    check_coprime(h, k)?;
    check_inside(x, "A_{h,k}")?;
    if k == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if !(w.re > 0.0) {
        return Err(Error::OutOfRange(format!("A_{{h,k}} needs Re w > 0, got {w}")));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kf = k as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut xp = Complex64::new(1.0, 0.0);
    let mut ax_next = ax;
    let mut bound = f64::INFINITY;
    for l in 1..=tol.max_terms {
        xp *= x;
        ax_next *= ax;
        let lu = l as u64;
        if lu % k != 0 {
            let lf = l as f64;
            let e = (-w * lf).exp() * root_of_unity(lu, h, k);
            let t = e / ((1.0 - e) * (1.0 - e)) - a_zero_factor(lu, h, k);
            sum += xp / lf * t;
        }
        let m = (l + 1) as f64;
        let envelope = kernel_envelope(m * w.re).min(f64::MAX) + kf * kf / 16.0;
        bound = envelope * ax_next / (m * (1.0 - ax));
        if bound <= tol.abs_tol {
            return Ok(sum);
        }
    }
    Err(truncation(tol.max_terms, bound, tol))
}

/// `B_{h,k}(x, w) - Psi_{h,k}(x, w) - ln(1 - x^k) / (12k)`, summed termwise as
/// `sum_l (x^{kl} / (kl)) f(klw)` with `f` from [`kernel_remainder`].
pub fn b_remainder(k: u64, x: ComplexValue, w: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    if k == 0 {
        return Err(Error::OutOfRange("B_{h,k} needs k >= 1".into()));
    }
    check_inside(x, "B_{h,k}")?;
    if !(w.re > 0.0) {
        return Err(Error::OutOfRange(format!("B_{{h,k}} needs Re w > 0, got {w}")));
    }
    let xk = int_power(x, k as u32);
    let axk = xk.norm();
    if axk == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kf = k as f64;
    let aw = w.norm();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut xp = Complex64::new(1.0, 0.0);
    let mut ax_next = axk;
    let mut bound = f64::INFINITY;
    for l in 1..=tol.max_terms {
        xp *= xk;
        ax_next *= axk;
        let kl = kf * l as f64;
        sum += xp / kl * kernel_remainder(w * kl);
        let m = kf * (l + 1) as f64;
        let envelope = kernel_envelope(m * w.re).min(f64::MAX) + 1.0 / (m * aw).powi(2) + 1.0 / 12.0;
        bound = envelope * ax_next / (m * (1.0 - axk));
        if bound <= tol.abs_tol {
            return Ok(sum);
        }
    }
    Err(truncation(tol.max_terms, bound, tol))
}

/// `g_{h,k}(x, w)`: the part of `ln P` left after `omega`, the root-of-unity
/// phase and `Psi` are taken out.
pub fn g(h: u64, k: u64, x: ComplexValue, w: ComplexValue, tol: SeriesTolerance) -> Result<ComplexValue> {
    Ok(a_difference(h, k, x, w, tol)? + b_remainder(k, x, w, tol)?)
}

/// The four pieces of the factorisation at one arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationParts {
    /// `A_{h,k}(x, 0)`; zero for `k = 1`.
    pub a0: ComplexValue,
    pub psi: ComplexValue,
    pub log_omega: ComplexValue,
    pub g: ComplexValue,
}

pub fn factorization_parts(
    h: u64,
    k: u64,
    n: u64,
    x: ComplexValue,
    w: ComplexValue,
    tol: SeriesTolerance,
) -> Result<FactorizationParts> {
    Ok(FactorizationParts {
        a0: a_series(h, k, x, Complex64::new(0.0, 0.0), tol)?,
        psi: psi(k, x, w, tol)?,
        log_omega: log_omega(h, k, n, x, tol)?,
        g: g(h, k, x, w, tol)?,
    })
}

/// Reduces the imaginary part into `(-pi, pi]`.
fn reduce_mod_2pi_i(z: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    let mut im = z.im.rem_euclid(two_pi);
    if im > PI {
        im -= two_pi;
    }
    Complex64::new(z.re, im)
}

/// `|ln P(x, e^{-w + 2 pi i h/k}) - (ln omega + 2 pi i n h/k + Psi + g)|`,
/// imaginary part taken modulo `2 pi`.
pub fn factorization_residual(
    h: u64,
    k: u64,
    n: u64,
    x: ComplexValue,
    w: ComplexValue,
    tol: SeriesTolerance,
) -> Result<f64> {
    check_coprime(h, k)?;
    if !(w.re > 0.0) {
        return Err(Error::OutOfRange(format!("factorisation needs Re w > 0, got {w}")));
    }
    let u = (-w).exp() * root_of_unity(1, h, k);
    let lhs = log_gen_fn(x, u, tol)?;
    let parts = factorization_parts(h, k, n, x, w, tol)?;
    let r = ((n % k) * (h % k) % k) as f64;
    let phase = Complex64::new(0.0, 2.0 * PI * r / k as f64);
    let rhs = parts.log_omega + phase + parts.psi + parts.g;
    Ok(reduce_mod_2pi_i(lhs - rhs).norm())
}

/// `M = 1.05 * max_{|z| <= pi} |f(z)| / |z|^2` over a 100 x 100 polar grid,
/// where `f(z) = e^{-z}/(1-e^{-z})^2 - 1/z^2 + 1/12` (limit `1/240` at 0).
pub fn calibrated_m() -> f64 {
    static M: OnceLock<f64> = OnceLock::new();
    *M.get_or_init(|| {
        let mut best: f64 = 1.0 / 240.0;
        for i in 1..=100 {
            let r = PI * i as f64 / 100.0;
            for j in 0..100 {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / 100.0);
                best = best.max(kernel_remainder(z).norm() / (r * r));
            }
        }
        1.05 * best
    })
}

/// The `A(x, w) - A(x, 0)` bound:
/// `2|w|/(1-|x|) [k^3 + |x|^{pi/(k|Im w|)} / (1 - e^{-pi Re w/(k|Im w|)})]`,
/// with the bracket reduced to `k^3` for real `w`.
pub fn a_difference_bound(k: u64, x: ComplexValue, w: ComplexValue) -> f64 {
    let kf = k as f64;
    let ax = x.norm();
    let k3 = kf * kf * kf;
    let bracket = if w.im == 0.0 {
        k3
    } else {
        let t = PI / (kf * w.im.abs());
        k3 + ax.powf(t) / (1.0 - (-t * w.re).exp())
    };
    2.0 * w.norm() / (1.0 - ax) * bracket
}

/// The `B` remainder bound
/// `[M |w|^2 k + (2/(1 - e^{-pi Re w/|w|})^3 + 1) |x|^{pi/|w|}] / (1-|x|)^2`.
pub fn b_remainder_bound(k: u64, x: ComplexValue, w: ComplexValue, m: f64) -> f64 {
    let ax = x.norm();
    (1.0 / ((1.0 - ax) * (1.0 - ax))) * b_bracket(k, ax, w, m)
}

fn b_bracket(k: u64, ax: f64, w: ComplexValue, m: f64) -> f64 {
    let aw = w.norm();
    let q = 1.0 - (-w.re * PI / aw).exp();
    m * aw * aw * k as f64 + (2.0 / (q * q * q) + 1.0) * ax.powf(PI / aw)
}

/// Right-hand side of the bound on `|g_{h,k}(x, w)|` (complex `w` and real
/// `w` variants).
pub fn g_bound(k: u64, x: ComplexValue, w: ComplexValue, m: f64) -> f64 {
    let ax = x.norm();
    a_difference_bound(k, x, w) + b_bracket(k, ax, w, m) / (1.0 - ax * ax)
}

/// `g_bound - |g|`; nonnegative when the bound holds.
pub fn g_bound_margin(h: u64, k: u64, x: ComplexValue, w: ComplexValue, m: f64, tol: SeriesTolerance) -> Result<f64> {
    if x.norm() == 0.0 {
        return Err(Error::OutOfRange("the g bound needs 0 < |x| < 1".into()));
    }
    Ok(g_bound(k, x, w, m) - g(h, k, x, w, tol)?.norm())
}

/// `a_difference_bound - |A(x, w) - A(x, 0)|` for `k >= 2`.
pub fn a_difference_margin(h: u64, k: u64, x: ComplexValue, w: ComplexValue, tol: SeriesTolerance) -> Result<f64> {
    if k < 2 {
        return Err(Error::OutOfRange("the A bound needs k >= 2".into()));
    }
    Ok(a_difference_bound(k, x, w) - a_difference(h, k, x, w, tol)?.norm())
}

/// `b_remainder_bound - |B - Psi - ln(1 - x^k)/(12k)|`.
pub fn b_remainder_margin(k: u64, x: ComplexValue, w: ComplexValue, m: f64, tol: SeriesTolerance) -> Result<f64> {
    Ok(b_remainder_bound(k, x, w, m) - b_remainder(k, x, w, tol)?.norm())
}

/// `2^{1/12} exp((k^2/16) (zeta(3) - ln(1 - M_X)))`, a bound on
/// `|omega_{h,k,n}(x)|` for `|x| <= M_X`.
pub fn omega_bound(k: u64, max_abs_x: f64) -> f64 {
    let kf = k as f64;
    2f64.powf(1.0 / 12.0) * (kf * kf / 16.0 * (ZETA3 - (1.0 - max_abs_x).ln())).exp()
}

/// `omega_bound(k, |x|) - |omega_{h,k,n}(x)|`.
pub fn omega_bound_margin(h: u64, k: u64, n: u64, x: ComplexValue, tol: SeriesTolerance) -> Result<f64> {
    Ok(omega_bound(k, x.norm()) - omega(h, k, n, x, tol)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> SeriesTolerance {
        SeriesTolerance::default()
    }

    #[test]
    fn farey_examples() {
        let f1 = farey(1).unwrap();
        assert_eq!(f1.len(), 1);
        assert_eq!((f1[0].h, f1[0].k), (0, 1));
        assert_eq!(f1[0].bounds(), (-0.5, 0.5));

        let f3 = farey(3).unwrap();
        let fr: Vec<(u64, u64)> = f3.iter().map(|a| (a.h, a.k)).collect();
        assert_eq!(fr, vec![(0, 1), (1, 3), (1, 2), (2, 3)]);
        let half = f3[2];
        assert_eq!(half.left_mediant(), (2, 5));
        assert_eq!(half.right_mediant(), (3, 5));
        let (lo, hi) = half.offsets();
        assert!((lo + 0.1).abs() < 1e-15 && (hi - 0.1).abs() < 1e-15);
        assert!(farey(0).is_err());
    }

    #[test]
    fn farey_neighbours_and_tiling() {
        for order in 1..=200u64 {
            let arcs = farey(order).unwrap();
            for (i, a) in arcs.iter().enumerate() {
                // h k' - h' k = 1 and h'' k - h k'' = 1
                assert_eq!(a.h as i64 * a.left.1 as i64 - a.left.0 * a.k as i64, 1);
                assert_eq!(a.right.0 * a.k as i64 - a.h as i64 * a.right.1 as i64, 1);
                if i + 1 < arcs.len() {
                    assert_eq!(a.right_mediant(), arcs[i + 1].left_mediant());
                }
            }
            let first = arcs[0].left_mediant();
            let last = arcs[arcs.len() - 1].right_mediant();
            // Wrap-around: the arcs cover exactly one period.
            assert_eq!(first.1, last.1);
            assert_eq!(last.0 - first.0, last.1 as i64);
        }
    }

    #[test]
    fn log_gen_fn_examples() {
        assert_eq!(log_gen_fn(c(0.3, 0.0), c(0.0, 0.0), tol()).unwrap(), c(0.0, 0.0));
        let v = log_gen_fn(c(0.5, 0.0), c(0.5, 0.0), tol()).unwrap();
        assert!(v.re > 0.0 && v.im == 0.0);
    }

    #[test]
    fn log_gen_fn_matches_exact_partial_sum() {
        use crate::exact::{evaluate, PlanePartitionTable};
        let table = PlanePartitionTable::build(120).unwrap();
        let (x, u) = (c(0.3, 0.0), 0.4f64);
        let mut partial = 0.0;
        for n in 0..=120 {
            let q = evaluate(table.get(n).unwrap(), x, 128).unwrap().to_complex64().re;
            partial += q * u.powi(n as i32);
        }
        let v = log_gen_fn(x, c(u, 0.0), tol()).unwrap().exp();
        assert!((v.re - partial).abs() < 1e-10 * partial, "{v} vs {partial}");
    }

    #[test]
    fn a_series_examples() {
        let x = c(0.5, 0.2);
        assert_eq!(a_series(0, 1, x, c(0.3, 0.1), tol()).unwrap(), c(0.0, 0.0));
        // Odd-l logarithmic series: -(1/8) ln((1+x)/(1-x)).
        let v = a_series(1, 2, c(0.5, 0.0), c(0.0, 0.0), tol()).unwrap();
        let closed = -(3.0f64.ln()) / 8.0;
        assert!((v.re - closed).abs() < 1e-14);
        assert!((v.re - (-0.137_326_536_083_514_3)).abs() < 1e-14);
        let v = a_series(1, 2, x, c(0.0, 0.0), tol()).unwrap();
        let closed = -((1.0 + x) / (1.0 - x)).ln() / 8.0;
        assert!((v - closed).norm() < 1e-14);
        assert!(a_series(2, 4, x, c(0.0, 0.0), tol()).is_err());
    }

    #[test]
    fn b_series_examples() {
        assert_eq!(b_series(1, c(0.0, 0.0), c(1.0, 0.0), tol()).unwrap(), c(0.0, 0.0));
        // 200-term brute sum with the textbook kernel.
        let brute: f64 = (1..=200)
            .map(|l| {
                let lf = l as f64;
                let e = (-lf).exp();
                0.5f64.powi(l) / lf * e / ((1.0 - e) * (1.0 - e))
            })
            .sum();
        let v = b_series(1, c(0.5, 0.0), c(1.0, 0.0), tol()).unwrap();
        assert!((v.re - brute).abs() < 1e-12);
        // Index substitution: B_k(x, w) = B_1(x^k, k w) / k.
        let (x, w) = (c(0.6, -0.3), c(0.2, 0.7));
        let lhs = b_series(2, x, w, tol()).unwrap();
        let rhs = b_series(1, x * x, w * 2.0, tol()).unwrap() / 2.0;
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(1, c(0.0, 0.0), c(0.4, 0.1), tol()).unwrap(), c(0.0, 0.0));
        let v = psi(1, c(0.5, 0.0), c(1.0, 0.0), tol()).unwrap();
        assert!((v.re - 0.537_213_193_608_040_2).abs() < 1e-13);
        // 2 k^3 w^2 Psi = (k L_k)^3
        let (x, w) = (c(-0.3, 0.6), c(0.3, -0.2));
        for k in 1..=4u64 {
            let p = psi(k, x, w, tol()).unwrap();
            let l = crate::special::phase_l(k as u32, x, tol()).unwrap() * k as f64;
            let lhs = p * 2.0 * (k * k * k) as f64 * w * w;
            assert!((lhs - l * l * l).norm() < 1e-12);
        }
        assert!(psi(1, c(0.5, 0.0), c(0.0, 0.0), tol()).is_err());
    }

    #[test]
    fn omega_examples() {
        let x = c(0.3, -0.4);
        let v = omega(1, 1, 7, x, tol()).unwrap();
        assert!((v - (1.0 - x).powf(1.0 / 12.0)).norm() < 1e-15);
        assert!((omega(1, 1, 7, c(0.0, 0.0), tol()).unwrap() - 1.0).norm() < 1e-15);
        for n in 0..6u64 {
            let v = omega(1, 2, n, c(0.0, 0.0), tol()).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - sign).norm() < 1e-15);
        }
        // omega_{1,2,n} = (-1)^n (1-x^2)^{1/24} ((1-x)/(1+x))^{1/8}
        for n in 3..5u64 {
            let v = omega(1, 2, n, x, tol()).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let closed = (1.0 - x * x).powf(1.0 / 24.0) * ((1.0 - x) / (1.0 + x)).powf(1.0 / 8.0) * sign;
            assert!((v - closed).norm() < 1e-14);
        }
        let bound = 2f64.powf(1.0 / 12.0) * (9.0 / 16.0 * (ZETA3 - 0.5f64.ln())).exp();
        let v = omega(1, 3, 4, c(0.5, 0.0), tol()).unwrap();
        assert!(v.norm() <= bound);
        assert!((omega_bound(3, 0.5) - bound).abs() < 1e-12);
    }

    #[test]
    fn kernel_remainder_series_matches_direct() {
        for &z in &[c(0.9, 0.1), c(-0.5, 0.7), c(0.0, 0.95), c(0.3, 0.0)] {
            let direct = kernel(z) - 1.0 / (z * z) + 1.0 / 12.0;
            let series = kernel_remainder(z);
            assert!((direct - series).norm() < 1e-13, "{z}: {direct} vs {series}");
        }
        let z = c(1e-3, 0.0);
        assert!((kernel_remainder(z).re / 1e-6 - 1.0 / 240.0).abs() < 1e-9);
    }

    #[test]
    fn g_examples() {
        assert_eq!(g(0, 1, c(0.0, 0.0), c(0.3, 0.1), tol()).unwrap(), c(0.0, 0.0));
        let mut prev = f64::INFINITY;
        for m in 1..=4 {
            let v = g(0, 1, c(0.5, 0.0), c(10f64.powi(-m), 0.0), tol()).unwrap().norm();
            assert!(v < prev, "m = {m}: {v} !< {prev}");
            prev = v;
        }
        let mm = calibrated_m();
        let (x, w) = (c(0.5, 0.0), c(0.1, 0.0));
        let v = g(1, 2, x, w, tol()).unwrap().norm();
        assert!(v <= g_bound(2, x, w, mm));
    }

    #[test]
    fn g_brackets_agree_with_separate_series() {
        let (x, w) = (c(0.4, 0.3), c(0.35, -0.6));
        for (h, k) in [(0u64, 1u64), (1, 2), (1, 3), (2, 5)] {
            let a = a_series(h, k, x, w, tol()).unwrap() - a_series(h, k, x, c(0.0, 0.0), tol()).unwrap();
            let b = b_series(k, x, w, tol()).unwrap()
                - psi(k, x, w, tol()).unwrap()
                - (1.0 - int_power(x, k as u32)).ln() / (12.0 * k as f64);
            let gv = g(h, k, x, w, tol()).unwrap();
            assert!((gv - (a + b)).norm() < 1e-12, "{h}/{k}");
        }
    }

    #[test]
    fn factorization_examples() {
        let r = factorization_residual(0, 1, 5, c(0.4, 0.0), c(0.3, 0.0), tol()).unwrap();
        assert!(r < 1e-10, "{r}");
        let r = factorization_residual(1, 2, 7, c(0.3, 0.2), c(0.2, 0.0), tol()).unwrap();
        assert!(r < 1e-10, "{r}");
        let r = factorization_residual(1, 3, 2, c(0.0, 0.0), c(0.2, 0.5), tol()).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn wrong_omega_sign_is_detected() {
        // With -A(x, 0) in ln omega the residual would be 2|A(x, 0)|.
        let (x, w) = (c(0.5, 0.1), c(0.2, 0.3));
        let a0 = a_series(1, 3, x, c(0.0, 0.0), tol()).unwrap();
        assert!(2.0 * a0.norm() > 1e-2);
        assert!(factorization_residual(1, 3, 4, x, w, tol()).unwrap() < 1e-10);
    }

    #[test]
    fn calibrated_m_exceeds_limit() {
        let m = calibrated_m();
        assert!(m > 1.05 / 240.0);
        assert!(m < 0.01);
    }

    #[test]
    fn margins_at_spec_points() {
        let m = calibrated_m();
        assert!(g_bound_margin(1, 2, c(0.5, 0.0), c(0.1, 0.05), m, tol()).unwrap() >= 0.0);
        assert!(g_bound_margin(0, 1, c(0.9, 0.0), c(0.01, 0.0), m, tol()).unwrap() >= 0.0);
        // |g| -> 0 as x -> 0, so the margin tends to the bound itself.
        let w = c(0.3, 0.2);
        let x = c(1e-6, 0.0);
        let margin = g_bound_margin(1, 2, x, w, m, tol()).unwrap();
        assert!((margin - g_bound(2, x, w, m)).abs() < 1e-5);
    }
}
