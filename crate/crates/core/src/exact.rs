//! Exact plane partition polynomials.
//!
//! `Q_n(x) = sum_k pp_k(n) x^k`, where `pp_k(n)` counts plane partitions of `n`
//! with trace `k`. Coefficients come from the logarithmic derivative of the
//! generating function `prod_m (1 - x u^m)^(-m)`:
//!
//! ```text
//! n Q_n(x) = sum_{j=1}^{n} a_j(x) Q_{n-j}(x),    a_j(x) = sum_{d | j} (j/d)^2 x^d
//! ```
//!
//! The recurrence is run on fixed-width little-endian `u64` limb vectors. The
//! width for step `n` is sized from `n * PL(n)`, which bounds every partial
//! sum because all terms are nonnegative, so the inner kernel never
//! reallocates. The division by `n` is checked to leave no remainder.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::HighPrecComplex;
use crate::ComplexValue;

/// Sparse `a_j(x)`: pairs `(degree d, coefficient (j/d)^2)` over the divisors
/// `d` of `j`, in increasing degree.
pub fn log_derivative_weights(j: usize) -> Vec<(usize, u64)> {
    assert!(j >= 1, "weights are defined for j >= 1");
    divisors(j)
        .into_iter()
        .map(|d| {
            let q = (j / d) as u64;
            (d, q * q)
        })
        .collect()
}

fn divisors(j: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= j {
        if j % d == 0 {
            small.push(d);
            if d * d != j {
                large.push(j / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Exact coefficient vector of `Q_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanePartitionPolynomial {
    n: usize,
    coeffs: Vec<BigUint>,
}

/// JSON form: coefficients as decimal strings, since they exceed 64 bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientsJson {
    pub n: usize,
    pub coeffs: Vec<String>,
}

impl PlanePartitionPolynomial {
    pub fn new(n: usize, coeffs: Vec<BigUint>) -> Self {
        assert_eq!(coeffs.len(), n + 1, "Q_n has n + 1 coefficients");
        Self { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// `c_0 .. c_n` with `c_k = pp_k(n)`.
    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// `PL(n) = Q_n(1)`, the number of plane partitions of `n`.
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    pub fn to_json(&self) -> CoefficientsJson {
        CoefficientsJson {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c.to_str_radix(10)).collect(),
        }
    }

    pub fn from_json(json: &CoefficientsJson) -> Result<Self> {
        if json.coeffs.len() != json.n + 1 {
            return Err(Error::OutOfRange(format!(
                "expected {} coefficients, found {}",
                json.n + 1,
                json.coeffs.len()
            )));
        }
        let coeffs = json
            .coeffs
            .iter()
            .map(|s| {
                BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| Error::OutOfRange(format!("not a decimal integer: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(json.n, coeffs))
    }

    /// `sum_k c_k |x|^k` in double precision (inflated slightly to stay an
    /// upper bound despite its own rounding).
    pub fn abs_sum(&self, abs_x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * abs_x + c.to_f64().unwrap_or(f64::INFINITY);
        }
        acc * (1.0 + 4.0 * (self.n as f64 + 2.0) * f64::EPSILON)
    }
}

/// Coefficients of one `Q_m` in limb form: `(m + 1) * width` words.
struct LimbPoly {
    width: usize,
    data: Vec<u64>,
}

impl LimbPoly {
    fn coeff(&self, k: usize) -> &[u64] {
        &self.data[k * self.width..(k + 1) * self.width]
    }

    fn to_biguints(&self) -> Vec<BigUint> {
        self.data
            .chunks(self.width)
            .map(|limbs| {
                let digits: Vec<u32> = limbs
                    .iter()
                    .flat_map(|&l| [l as u32, (l >> 32) as u32])
                    .collect();
                BigUint::new(digits)
            })
            .collect()
    }
}

/// `acc += src * s`; `acc` is wide enough by construction.
#[inline]
fn mul_add(acc: &mut [u64], src: &[u64], s: u64) {
    let s = s as u128;
    let mut carry: u128 = 0;
    for (a, &b) in acc.iter_mut().zip(src) {
        let t = *a as u128 + b as u128 * s + carry;
        *a = t as u64;
        carry = t >> 64;
    }
    let mut i = src.len();
    while carry != 0 {
        let t = acc[i] as u128 + carry;
        acc[i] = t as u64;
        carry = t >> 64;
        i += 1;
    }
}

/// In-place division by a small divisor; returns the remainder.
fn div_small(limbs: &mut [u64], d: u64) -> u64 {
    let d = d as u128;
    let mut rem: u128 = 0;
    for l in limbs.iter_mut().rev() {
        let cur = (rem << 64) | *l as u128;
        *l = (cur / d) as u64;
        rem = cur % d;
    }
    rem as u64
}

fn limbs_for(v: &BigUint) -> usize {
    (v.bits() as usize).div_ceil(64).max(1)
}

/// Below this degree the accumulation runs on one thread.
const PARALLEL_THRESHOLD: usize = 160;
const K_CHUNK: usize = 16;

/// Immutable table of `Q_0 .. Q_N`.
pub struct PlanePartitionTable {
    polys: Vec<PlanePartitionPolynomial>,
}

impl PlanePartitionTable {
    /// Runs the recurrence up to `n_max`.
    pub fn build(n_max: usize) -> Result<Self> {
        let weights: Vec<Vec<(usize, u64)>> = std::iter::once(Vec::new())
            .chain((1..=n_max).map(log_derivative_weights))
            .collect();

        // PL(n) from the one-variable specialisation x = 1; it sizes the limbs.
        let sigma2: Vec<BigUint> = weights
            .iter()
            .map(|w| w.iter().map(|&(_, s)| BigUint::from(s)).sum())
            .collect();
        let mut pl: Vec<BigUint> = vec![BigUint::from(1u32)];
        for n in 1..=n_max {
            let total: BigUint = (1..=n).map(|j| &sigma2[j] * &pl[n - j]).sum();
            pl.push(total / n);
        }

        let mut limb_polys: Vec<LimbPoly> = Vec::with_capacity(n_max + 1);
        limb_polys.push(LimbPoly {
            width: 1,
            data: vec![1],
        });
        for n in 1..=n_max {
            let width = limbs_for(&(&pl[n] * n)) + 1;
            let mut acc = vec![0u64; (n + 1) * width];
            let accumulate = |k0: usize, chunk: &mut [u64]| {
                let k1 = k0 + chunk.len() / width;
                for j in 1..=n {
                    let src = &limb_polys[n - j];
                    let src_deg = n - j;
                    for &(d, s) in &weights[j] {
                        if d >= k1 {
                            break;
                        }
                        let lo = k0.max(d);
                        let hi = k1.min(d + src_deg + 1);
                        for k in lo..hi {
                            let off = (k - k0) * width;
                            mul_add(&mut chunk[off..off + width], src.coeff(k - d), s);
                        }
                    }
                }
            };
            if n < PARALLEL_THRESHOLD {
                accumulate(0, &mut acc);
            } else {
                acc.par_chunks_mut(width * K_CHUNK)
                    .enumerate()
                    .for_each(|(ci, chunk)| accumulate(ci * K_CHUNK, chunk));
            }

            let mut new_width = 1;
            for (k, limbs) in acc.chunks_mut(width).enumerate() {
                if div_small(limbs, n as u64) != 0 {
                    return Err(Error::InexactDivision { n, k });
                }
                let used = limbs.iter().rposition(|&l| l != 0).map_or(1, |p| p + 1);
                new_width = new_width.max(used);
            }
            let data = acc
                .chunks(width)
                .flat_map(|limbs| limbs[..new_width].iter().copied())
                .collect();
            limb_polys.push(LimbPoly {
                width: new_width,
                data,
            });
        }

        let polys: Vec<PlanePartitionPolynomial> = limb_polys
            .par_iter()
            .enumerate()
            .map(|(n, lp)| PlanePartitionPolynomial::new(n, lp.to_biguints()))
            .collect();
        for (n, p) in polys.iter().enumerate() {
            if p.total() != pl[n] {
                return Err(Error::Numerical(format!(
                    "coefficient sum of Q_{n} disagrees with PL({n})"
                )));
            }
        }
        Ok(Self { polys })
    }

    pub fn max_n(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<&PlanePartitionPolynomial> {
        self.polys.get(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PlanePartitionPolynomial> {
        self.polys.iter()
    }
}

/// `Q_n` from the log-derivative recurrence.
pub fn plane_partition_polynomial(n: usize) -> Result<PlanePartitionPolynomial> {
    let table = PlanePartitionTable::build(n)?;
    Ok(table.polys.into_iter().next_back().expect("table holds Q_0..Q_n"))
}

/// Largest `n` accepted by [`enumerate_by_trace`].
pub const ENUMERATION_LIMIT: usize = 12;

/// Brute-force oracle: generates every plane partition of `n` (rows are
/// partitions, weakly decreasing down each column) and tallies the trace.
pub fn enumerate_by_trace(n: usize) -> Result<PlanePartitionPolynomial> {
    if !(1..=ENUMERATION_LIMIT).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "enumeration supports 1 <= n <= {ENUMERATION_LIMIT}, got {n}"
        )));
    }
    let mut tally = vec![0u64; n + 1];
    let first_bound = vec![n; n];
    let mut rows: Vec<Vec<usize>> = Vec::new();
    place_rows(n, &first_bound, &mut rows, &mut tally);
    Ok(PlanePartitionPolynomial::new(
        n,
        tally.into_iter().map(BigUint::from).collect(),
    ))
}

fn place_rows(remaining: usize, bound: &[usize], rows: &mut Vec<Vec<usize>>, tally: &mut [u64]) {
    if remaining == 0 {
        let trace: usize = rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.get(i).copied().unwrap_or(0))
            .sum();
        tally[trace] += 1;
        return;
    }
    let mut row = Vec::new();
    fill_row(remaining, bound, &mut row, rows, tally);
}

/// Extends `row` one entry at a time; every nonempty prefix with sum up to
/// `remaining` is a candidate row.
fn fill_row(
    remaining: usize,
    bound: &[usize],
    row: &mut Vec<usize>,
    rows: &mut Vec<Vec<usize>>,
    tally: &mut [u64],
) {
    let used: usize = row.iter().sum();
    if !row.is_empty() {
        rows.push(row.clone());
        place_rows(remaining - used, row, rows, tally);
        rows.pop();
    }
    let j = row.len();
    if j >= bound.len() {
        return;
    }
    let cap = bound[j].min(remaining - used);
    let cap = row.last().map_or(cap, |&prev| cap.min(prev));
    for v in 1..=cap {
        row.push(v);
        fill_row(remaining, bound, row, rows, tally);
        row.pop();
    }
}

/// A high-precision value with a rigorous bound on its rounding error.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: HighPrecComplex,
    pub abs_error_bound: f64,
    pub precision_bits: u32,
}

impl EvalResult {
    pub fn to_complex64(&self) -> ComplexValue {
        self.value.to_complex64()
    }
}

/// Smallest precision accepted by [`evaluate`].
pub const MIN_PRECISION_BITS: u32 = 64;
/// Starting precision of [`evaluate_adaptive`].
pub const DEFAULT_PRECISION_BITS: u32 = 256;
const MAX_PRECISION_BITS: u32 = 1 << 20;

/// Horner evaluation on exact coefficients at `precision_bits`.
///
/// `x` is converted exactly and additions of the integer coefficients are
/// exact, so only the rounding after each multiplication contributes. The
/// reported bound is the Horner envelope
/// `(3n + 2) 2^-p sum_k c_k |x|^k`.
pub fn evaluate(p: &PlanePartitionPolynomial, x: ComplexValue, precision_bits: u32) -> Result<EvalResult> {
    if precision_bits < MIN_PRECISION_BITS {
        return Err(Error::OutOfRange(format!(
            "precision must be at least {MIN_PRECISION_BITS} bits, got {precision_bits}"
        )));
    }
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(Error::OutOfRange(format!("non-finite evaluation point {x}")));
    }
    let hx = HighPrecComplex::from_complex64(x);
    let mut acc = HighPrecComplex::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul_round(&hx, precision_bits);
        if !c.is_zero() {
            acc = acc.add(&HighPrecComplex::from_integer(c));
        }
    }
    let envelope = (3 * p.n() + 2) as f64 * p.abs_sum(x.norm());
    let abs_error_bound = envelope * 2f64.powi(-(precision_bits as i32).min(1074));
    Ok(EvalResult {
        value: acc.round(precision_bits),
        abs_error_bound: abs_error_bound + relative_floor(&acc, precision_bits),
        precision_bits,
    })
}

/// Error introduced by the final rounding to `prec` bits.
fn relative_floor(v: &HighPrecComplex, prec: u32) -> f64 {
    if v.mantissa_bits() <= prec as u64 {
        0.0
    } else {
        std::f64::consts::SQRT_2 * v.abs_f64() * 2f64.powi(-(prec as i32).min(1074))
    }
}

/// Evaluation under the cancellation-aware precision policy: start at
/// `start_bits` and double until the bound is below
/// `1e-8 * max(|value|, 1e-300)`.
pub fn evaluate_adaptive(p: &PlanePartitionPolynomial, x: ComplexValue, start_bits: u32) -> Result<EvalResult> {
    let mut bits = start_bits.max(MIN_PRECISION_BITS);
    loop {
        let r = evaluate(p, x, bits)?;
        let scale = r.value.abs_f64().max(1e-300);
        if r.abs_error_bound < 1e-8 * scale {
            return Ok(r);
        }
        if bits >= MAX_PRECISION_BITS {
            return Err(Error::Numerical(format!(
                "Q_{}({x}) not resolved at {bits} bits",
                p.n()
            )));
        }
        bits *= 2;
    }
}
