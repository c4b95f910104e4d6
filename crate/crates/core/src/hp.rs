//! Binary floating-point complex numbers with big-integer mantissas.
//!
//! A value is `(re + i*im) * 2^exp` with `re`, `im` arbitrary integers sharing
//! one exponent. Addition, subtraction and multiplication are exact; only
//! [`HighPrecComplex::round`] and [`HighPrecComplex::div`] lose information.
//! Rounding is to nearest on each component with the mantissa length capped
//! at `prec` bits, so one rounding step perturbs the value by at most
//! `sqrt(2) * 2^-prec * |z|`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct HighPrecComplex {
    re: BigInt,
    im: BigInt,
    exp: i64,
}

/// Splits a finite double into `(mantissa, exponent)` with `v = m * 2^e` exactly.
fn decompose_f64(v: f64) -> (BigInt, i64) {
    assert!(v.is_finite(), "non-finite input {v}");
    if v == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let tz = mant.trailing_zeros() as i64;
    (BigInt::from(sign * (mant >> tz) as i64), e + tz)
}

/// `m * 2^e` as a double, saturating to infinity or zero.
fn scaled_to_f64(m: &BigInt, e: i64) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let bits = m.bits() as i64;
    let (top, e) = if bits > 64 {
        let shift = bits - 64;
        ((m >> shift as usize), e + shift)
    } else {
        (m.clone(), e)
    };
    let t = top.to_i128().expect("at most 64 significant bits") as f64;
    ldexp(t, e)
}

fn ldexp(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

/// Round-to-nearest right shift.
fn shift_round(m: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    let half = BigInt::one() << (s - 1) as usize;
    (m + half) >> s as usize
}

impl HighPrecComplex {
    pub fn zero() -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_parts(re: BigInt, im: BigInt, exp: i64) -> Self {
        Self { re, im, exp }.normalized()
    }

    pub fn from_integer(v: &BigUint) -> Self {
        Self::from_parts(BigInt::from_biguint(Sign::Plus, v.clone()), BigInt::zero(), 0)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_parts(BigInt::from(v), BigInt::zero(), 0)
    }

    /// Exact conversion: every finite double is a dyadic rational.
    pub fn from_complex64(z: Complex64) -> Self {
        let (mr, er) = decompose_f64(z.re);
        let (mi, ei) = decompose_f64(z.im);
        if mr.is_zero() {
            return Self::from_parts(mr, mi, ei);
        }
        if mi.is_zero() {
            return Self::from_parts(mr, mi, er);
        }
        let e = er.min(ei);
        Self::from_parts(mr << (er - e) as usize, mi << (ei - e) as usize, e)
    }

    /// Strips common trailing zero bits so equal values compare equal.
    fn normalized(mut self) -> Self {
        if self.re.is_zero() && self.im.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = match (self.re.trailing_zeros(), self.im.trailing_zeros()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => 0,
        };
        if tz > 0 {
            self.re >>= tz as usize;
            self.im >>= tz as usize;
            self.exp += tz as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Bit length of the larger mantissa component.
    pub fn mantissa_bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }

    /// Rounds both components to nearest so the mantissa fits in `prec` bits.
    pub fn round(&self, prec: u32) -> Self {
        let bits = self.mantissa_bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        Self::from_parts(
            shift_round(&self.re, s),
            shift_round(&self.im, s),
            self.exp + s as i64,
        )
    }

    fn aligned(a: &Self, b: &Self) -> (BigInt, BigInt, BigInt, BigInt, i64) {
        let e = a.exp.min(b.exp);
        let sa = (a.exp - e) as usize;
        let sb = (b.exp - e) as usize;
        (
            &a.re << sa,
            &a.im << sa,
            &b.re << sb,
            &b.im << sb,
            e,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let (ar, ai, br, bi, e) = Self::aligned(self, other);
        Self::from_parts(ar + br, ai + bi, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            re: -&self.re,
            im: -&self.im,
            exp: self.exp,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
            exp: self.exp,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        Self::from_parts(re, im, self.exp + other.exp)
    }

    /// Multiplication followed by rounding to `prec` bits.
    pub fn mul_round(&self, other: &Self, prec: u32) -> Self {
        self.mul(other).round(prec)
    }

    /// Quotient with roughly `prec` correct bits. Returns `None` when dividing
    /// by zero.
    pub fn div(&self, other: &Self, prec: u32) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let num = self.mul(&other.conj());
        let den = &other.re * &other.re + &other.im * &other.im;
        let den_exp = 2 * other.exp;
        let want = prec as i64 + den.bits() as i64 + 2 - num.mantissa_bits() as i64;
        let shift = want.max(0);
        let nr = &num.re << shift as usize;
        let ni = &num.im << shift as usize;
        let qr = nr.div_floor(&den);
        let qi = ni.div_floor(&den);
        Some(Self::from_parts(qr, qi, num.exp - shift - den_exp).round(prec))
    }

    pub fn scale_pow2(&self, e: i64) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.clone(),
            exp: self.exp + e,
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            scaled_to_f64(&self.re, self.exp),
            scaled_to_f64(&self.im, self.exp),
        )
    }

    /// `|z|` as a double; saturates for huge values.
    pub fn abs_f64(&self) -> f64 {
        let (m, e) = self.top_bits();
        ldexp(m.norm(), e)
    }

    /// `log2 |z|`, finite for every nonzero value regardless of magnitude.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.top_bits();
        m.norm().log2() + e as f64
    }

    /// Principal complex logarithm, usable far outside double range.
    pub fn ln(&self) -> Complex64 {
        let (m, _) = self.top_bits();
        Complex64::new(self.log2_abs() * std::f64::consts::LN_2, m.im.atan2(m.re))
    }

    /// Leading bits of both components as doubles, with a shared exponent.
    fn top_bits(&self) -> (Complex64, i64) {
        let bits = self.mantissa_bits() as i64;
        let shift = (bits - 60).max(0);
        let r = (&self.re >> shift as usize).to_f64().unwrap_or(0.0);
        let i = (&self.im >> shift as usize).to_f64().unwrap_or(0.0);
        (Complex64::new(r, i), self.exp + shift)
    }

    /// Exact comparison of real parts.
    pub fn cmp_re(&self, other: &Self) -> Ordering {
        let (a, _, b, _, _) = Self::aligned(self, other);
        a.cmp(&b)
    }

    /// The real part as an integer, when the value is a real integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        if !self.im.is_zero() || self.exp < 0 {
            if self.re.is_zero() && self.im.is_zero() {
                return Some(BigInt::zero());
            }
            return None;
        }
        Some(&self.re << self.exp as usize)
    }

    pub fn re_is_negative(&self) -> bool {
        self.re.is_negative()
    }
}

impl fmt::Debug for HighPrecComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i) * 2^{}", self.re, self.im, self.exp)
    }
}

impl fmt::Display for HighPrecComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_complex64();
        write!(f, "{z}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_double_roundtrip() {
        for v in [0.5, -0.9, 0.3, 1e-300, -3.75, 5e-324, 1.0] {
            let z = HighPrecComplex::from_complex64(Complex64::new(v, -v / 3.0));
            assert_eq!(z.to_complex64(), Complex64::new(v, -v / 3.0));
        }
    }

    #[test]
    fn division_matches_double() {
        let a = HighPrecComplex::from_complex64(Complex64::new(1.5, -2.25));
        let b = HighPrecComplex::from_complex64(Complex64::new(-0.75, 0.5));
        let q = a.div(&b, 200).unwrap().to_complex64();
        let expect = Complex64::new(1.5, -2.25) / Complex64::new(-0.75, 0.5);
        assert!((q - expect).norm() < 1e-15 * expect.norm());
        assert!(a.div(&HighPrecComplex::zero(), 64).is_none());
    }

    #[test]
    fn huge_values_keep_logarithm() {
        let big = BigUint::one() << 5000usize;
        let z = HighPrecComplex::from_integer(&big);
        assert!(z.to_complex64().re.is_infinite());
        assert!((z.log2_abs() - 5000.0).abs() < 1e-12);
        assert!((z.ln().re - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn rounding_error_bound() {
        // 1/3 to 300 bits, then rounded to 64 bits.
        let third = HighPrecComplex::from_i64(1)
            .div(&HighPrecComplex::from_i64(3), 300)
            .unwrap();
        let r = third.round(64);
        let err = r.sub(&third).abs_f64();
        assert!(err <= 2f64.powi(-64) * third.abs_f64());
    }

    proptest! {
        #[test]
        fn mul_is_exact(a in -1e6f64..1e6, b in -1e6f64..1e6, c in -1e6f64..1e6, d in -1e6f64..1e6) {
            let x = HighPrecComplex::from_complex64(Complex64::new(a, b));
            let y = HighPrecComplex::from_complex64(Complex64::new(c, d));
            let p = x.mul(&y);
            // (a+bi)(c+di) recomputed from the exact product minus one factor
            let back = p.div(&y, 400);
            if c != 0.0 || d != 0.0 {
                let back = back.unwrap().to_complex64();
                prop_assert!((back - Complex64::new(a, b)).norm() <= 1e-15 * (a.abs() + b.abs() + 1e-300));
            }
        }
    }
}
