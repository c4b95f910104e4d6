//! Main-term asymptotics of `Q_n(x)` inside the unit disk, the saddle-point
//! integrals behind them, and two quadrature oracles: the trapezoidal Cauchy
//! integral and the Farey-arc decomposition.
//!
//! In `R(m)` the main term is
//!
//! ```text
//! omega_{1,m,n}(x) sqrt(L_m(x) / (6 pi n^{4/3})) exp((3/2) n^{2/3} L_m(x))
//! ```
//!
//! with `omega_{1,1,n} = (1-x)^{1/12}` and
//! `omega_{1,2,n} = (-1)^n (1-x^2)^{1/24} ((1-x)/(1+x))^{1/8}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{farey, g, log_gen_fn, omega, psi, FareyArc};
use crate::error::{Error, Result};
use crate::phase::{classify, x_star, PhaseLabel, BOUNDARY_TOL, DEFAULT_K_MAX};
use crate::quad::{integrate, QuadratureOptions};
use crate::special::{int_power, phase_l, trilog, SeriesTolerance, ZETA3};
use crate::ComplexValue;

/// The relative error the main term is claimed to carry.
pub const ERROR_CLASS: &str = "O(n^-1/3)";

/// `0.5 pi / (2 zeta(3))^{1/3}`, half the largest admissible `delta`.
pub fn default_delta() -> f64 {
    0.5 * max_delta()
}

fn max_delta() -> f64 {
    PI / (2.0 * ZETA3).cbrt()
}

fn tol() -> SeriesTolerance {
    SeriesTolerance::default()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub value: ComplexValue,
    /// `omega_{1,m,n}(x) sqrt(L_m(x) / (6 pi n^{4/3}))`.
    pub prefactor: ComplexValue,
    /// `(3/2) n^{2/3} L_m(x)`.
    pub exponent: ComplexValue,
    pub m: u32,
    pub error_class: &'static str,
}

impl AsymptoticEstimate {
    /// `ln(prefactor) + exponent`, usable when `value` over- or underflows.
    pub fn ln_value(&self) -> ComplexValue {
        self.prefactor.ln() + self.exponent
    }
}

fn n23(n: u64) -> f64 {
    (n as f64).powf(2.0 / 3.0)
}

/// `omega_{1,m,n}(x)` in closed form.
fn major_omega(m: u32, n: u64, x: ComplexValue) -> ComplexValue {
    match m {
        1 => ((1.0 - x).ln() / 12.0).exp(),
        _ => {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let v = ((1.0 - x * x).ln() / 24.0 + ((1.0 - x) / (1.0 + x)).ln() / 8.0).exp();
            v * sign
        }
    }
}

/// The phase-`m` main term without any region check.
pub fn main_term(m: u32, x: ComplexValue, n: u64) -> Result<AsymptoticEstimate> {
    if m != 1 && m != 2 {
        return Err(Error::OutOfRange(format!("main term needs m in {{1, 2}}, got {m}")));
    }
    if n == 0 {
        return Err(Error::OutOfRange("main term needs n >= 1".into()));
    }
    let r = x.norm();
    if r >= 1.0 {
        return Err(Error::OutOfRange(format!("main term needs |x| < 1, got |x| = {r}")));
    }
    let l = phase_l(m, x, tol())?;
    let nf = n as f64;
    let prefactor = major_omega(m, n, x) * (l / (6.0 * PI * nf.powf(4.0 / 3.0))).sqrt();
    let exponent = l * (1.5 * n23(n));
    Ok(AsymptoticEstimate {
        value: prefactor * exponent.exp(),
        prefactor,
        exponent,
        m,
        error_class: ERROR_CLASS,
    })
}

fn on_oscillatory_interval(x: ComplexValue) -> bool {
    x.im == 0.0 && x.re < 0.0 && x.re >= x_star()
}

fn region_error(operation: &'static str, x: ComplexValue, reason: String, suggestion: &'static str) -> Error {
    Error::Region {
        operation,
        x: x.to_string(),
        reason,
        suggestion,
    }
}

fn check_disk(operation: &'static str, x: ComplexValue, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange(format!("{operation} needs n >= 1")));
    }
    if x.re == 0.0 && x.im == 0.0 {
        return Err(region_error(operation, x, "the main term degenerates at x = 0".into(), "exact evaluation"));
    }
    let r = x.norm();
    if !(r < 1.0) {
        return Err(Error::OutOfRange(format!("{operation} needs |x| < 1, got |x| = {r}")));
    }
    Ok(())
}

fn suggestion_for(label: PhaseLabel) -> &'static str {
    match label {
        PhaseLabel::R1 => "estimate_r1",
        PhaseLabel::R2 => "estimate_r2",
        PhaseLabel::Boundary => "estimate_boundary",
    }
}

/// Main term in `R(1)` away from the segment `[x*, 0]`.
pub fn estimate_r1(x: ComplexValue, n: u64) -> Result<AsymptoticEstimate> {
    check_disk("estimate_r1", x, n)?;
    if on_oscillatory_interval(x) {
        return Err(region_error(
            "estimate_r1",
            x,
            "x lies on [x*, 0], where two saddles contribute".into(),
            "estimate_oscillatory",
        ));
    }
    let label = classify(x, DEFAULT_K_MAX, BOUNDARY_TOL)?;
    if label != PhaseLabel::R1 {
        return Err(region_error("estimate_r1", x, format!("x is in phase {label}"), suggestion_for(label)));
    }
    main_term(1, x, n)
}

/// Main term in `R(2)`, including the sign `(-1)^n`.
pub fn estimate_r2(x: ComplexValue, n: u64) -> Result<AsymptoticEstimate> {
    check_disk("estimate_r2", x, n)?;
    if on_oscillatory_interval(x) {
        return Err(region_error(
            "estimate_r2",
            x,
            "x lies on [x*, 0], inside phase R1".into(),
            "estimate_oscillatory",
        ));
    }
    let label = classify(x, DEFAULT_K_MAX, BOUNDARY_TOL)?;
    if label != PhaseLabel::R2 {
        return Err(region_error("estimate_r2", x, format!("x is in phase {label}"), suggestion_for(label)));
    }
    main_term(2, x, n)
}

/// `(3 sqrt 3 / 4) 2^{1/3} n^{2/3} |Li3(x)|^{1/3} + pi/6`, the argument of the
/// cosine in the oscillatory main term.
pub fn oscillatory_phase(x: f64, n: u64) -> Result<f64> {
    let li = trilog(Complex64::new(x, 0.0), tol())?.re.abs();
    Ok(3.0 * 3f64.sqrt() / 4.0 * 2f64.cbrt() * n23(n) * li.cbrt() + PI / 6.0)
}

/// The real main term on `(x*, 0)`: the two conjugate saddles of `R(1)`
/// combined,
/// `2^{7/6} (1-x)^{1/12} |Li3(x)|^{1/6} / sqrt(6 pi n^{4/3})
///  * exp((3/4) 2^{1/3} n^{2/3} |Li3(x)|^{1/3}) * cos(phase)`.
pub fn estimate_oscillatory(x: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("estimate_oscillatory needs n >= 1".into()));
    }
    let xs = x_star();
    if !(x > xs && x < 0.0) {
        let xc = Complex64::new(x, 0.0);
        let suggestion = if x > -1.0 && x < xs { "estimate_r2" } else { "estimate_r1" };
        return Err(region_error(
            "estimate_oscillatory",
            xc,
            format!("x must lie in (x*, 0) = ({xs}, 0)"),
            suggestion,
        ));
    }
    let li = trilog(Complex64::new(x, 0.0), tol())?.re.abs();
    let nf = n as f64;
    let amplitude = 2f64.powf(7.0 / 6.0) * (1.0 - x).powf(1.0 / 12.0) * li.powf(1.0 / 6.0)
        / (6.0 * PI * nf.powf(4.0 / 3.0)).sqrt();
    let growth = (0.75 * 2f64.cbrt() * n23(n) * li.cbrt()).exp();
    Ok(amplitude * growth * oscillatory_phase(x, n)?.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryEstimate {
    pub value: ComplexValue,
    pub term1: AsymptoticEstimate,
    pub term2: AsymptoticEstimate,
}

/// Sum of the phase-1 and phase-2 main terms, for points on the boundary
/// curve where both saddles have the same weight.
pub fn estimate_boundary(x: ComplexValue, n: u64) -> Result<BoundaryEstimate> {
    let term1 = main_term(1, x, n)?;
    let term2 = main_term(2, x, n)?;
    Ok(BoundaryEstimate {
        value: term1.value + term2.value,
        term1,
        term2,
    })
}

/// The estimate chosen by the phase of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "region")]
pub enum RegionEstimate {
    R1(AsymptoticEstimate),
    R2(AsymptoticEstimate),
    Oscillatory { value: f64 },
    Boundary(BoundaryEstimate),
}

impl RegionEstimate {
    pub fn value(&self) -> ComplexValue {
        match self {
            RegionEstimate::R1(e) | RegionEstimate::R2(e) => e.value,
            RegionEstimate::Oscillatory { value } => Complex64::new(*value, 0.0),
            RegionEstimate::Boundary(b) => b.value,
        }
    }

    pub fn region(&self) -> &'static str {
        match self {
            RegionEstimate::R1(_) => "r1",
            RegionEstimate::R2(_) => "r2",
            RegionEstimate::Oscillatory { .. } => "osc",
            RegionEstimate::Boundary(_) => "boundary",
        }
    }
}

/// Oscillatory on `(x*, 0)`, two-term on the boundary, single term otherwise.
pub fn estimate_auto(x: ComplexValue, n: u64) -> Result<RegionEstimate> {
    check_disk("estimate_auto", x, n)?;
    if x.im == 0.0 && x.re < 0.0 && x.re > x_star() {
        return Ok(RegionEstimate::Oscillatory {
            value: estimate_oscillatory(x.re, n)?,
        });
    }
    match classify(x, DEFAULT_K_MAX, BOUNDARY_TOL)? {
        PhaseLabel::R1 => Ok(RegionEstimate::R1(main_term(1, x, n)?)),
        PhaseLabel::R2 => Ok(RegionEstimate::R2(main_term(2, x, n)?)),
        PhaseLabel::Boundary => Ok(RegionEstimate::Boundary(estimate_boundary(x, n)?)),
    }
}

/// The saddle-point integrand divided by its peak modulus
/// `exp((3/2) n^{2/3} Re L)`:
/// `exp[n^{2/3} (L^3 / (2 (Re L - iz)^2) + (Re L - iz) - (3/2) Re L)]`.
fn scaled_saddle_integrand(l: Complex64, nn: f64, z: f64) -> Complex64 {
    let a = l.re;
    let s = Complex64::new(a, -z);
    (nn * (l * l * l / (2.0 * s * s) + s - 1.5 * a)).exp()
}

fn saddle_l(m: u32, x: ComplexValue) -> Result<Complex64> {
    if m != 1 && m != 2 {
        return Err(Error::OutOfRange(format!("saddle integrals need m in {{1, 2}}, got {m}")));
    }
    let l = phase_l(m, x, tol())?;
    if l.re <= 0.0 {
        return Err(Error::OutOfRange(format!("saddle integrals need Re L_m(x) > 0, got {l}")));
    }
    Ok(l)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < max_delta()) {
        return Err(Error::OutOfRange(format!(
            "delta must lie in (0, {}), got {delta}",
            max_delta()
        )));
    }
    Ok(())
}

/// `(1 / (2 pi n^{1/3})) int_{-pi/(m delta)}^{pi/(m delta)}
///  exp[n^{2/3} (L_m^3 / (2 (Re L_m - iz)^2) + (Re L_m - iz))] dz`
/// by adaptive quadrature.
pub fn saddle_numeric(m: u32, n: u64, x: ComplexValue, delta: f64) -> Result<ComplexValue> {
    check_delta(delta)?;
    if n == 0 {
        return Err(Error::OutOfRange("saddle integrals need n >= 1".into()));
    }
    let l = saddle_l(m, x)?;
    let nn = n23(n);
    let half = PI / (m as f64 * delta);
    let q = integrate(
        |z| scaled_saddle_integrand(l, nn, z),
        -half,
        half,
        &[-l.im, 0.0, l.im],
        QuadratureOptions::default(),
    )?;
    let nf = n as f64;
    Ok(q.value * (1.5 * nn * l.re).exp() / (2.0 * PI * nf.cbrt()))
}

/// `sqrt(L_m / 3) exp((3/2) n^{2/3} L_m) / sqrt(2 pi n^{4/3})`; when `x^m` is a
/// negative real the two conjugate saddles are added, giving twice the real
/// part.
pub fn saddle_closed(m: u32, n: u64, x: ComplexValue) -> Result<ComplexValue> {
    if x.re == 0.0 && x.im == 0.0 {
        return Err(Error::OutOfRange("the saddle closed form degenerates at x = 0".into()));
    }
    if n == 0 {
        return Err(Error::OutOfRange("saddle integrals need n >= 1".into()));
    }
    let l = saddle_l(m, x)?;
    let nf = n as f64;
    let term = (l / 3.0).sqrt() * (l * (1.5 * n23(n))).exp() / (2.0 * PI * nf.powf(4.0 / 3.0)).sqrt();
    let xm = int_power(x, m);
    if xm.im == 0.0 && xm.re < 0.0 {
        Ok(Complex64::new(2.0 * term.re, 0.0))
    } else {
        Ok(term)
    }
}

/// Local maxima of the saddle integrand's modulus on a uniform grid of
/// `grid` points, keeping those within a factor two of the global maximum.
pub fn saddle_peaks(m: u32, n: u64, x: ComplexValue, delta: f64, grid: usize) -> Result<Vec<f64>> {
    check_delta(delta)?;
    if grid < 3 {
        return Err(Error::OutOfRange("peak search needs at least 3 grid points".into()));
    }
    let l = saddle_l(m, x)?;
    let nn = n23(n);
    let half = PI / (m as f64 * delta);
    let zs: Vec<f64> = (0..grid).map(|i| -half + 2.0 * half * i as f64 / (grid - 1) as f64).collect();
    let vals: Vec<f64> = zs.iter().map(|&z| scaled_saddle_integrand(l, nn, z).norm()).collect();
    let top = vals.iter().cloned().fold(0.0, f64::max);
    let peaks = (1..grid - 1)
        .filter(|&i| vals[i] >= vals[i - 1] && vals[i] > vals[i + 1] && vals[i] >= 0.5 * top)
        .map(|i| zs[i])
        .collect();
    Ok(peaks)
}

/// `(Re L)^3 / alpha^2 - Re(L^3 / (alpha - iv)^2)`; nonnegative whenever
/// `|arg L| <= pi/3` and `alpha > 0`.
pub fn basic_inequality_gap(l: Complex64, alpha: f64, v: f64) -> f64 {
    let s = Complex64::new(alpha, -v);
    l.re.powi(3) / (alpha * alpha) - (l * l * l / (s * s)).re
}

/// `alpha = Re L_m(x) / (2 pi n^{1/3})` for the dominant `m` at `x`.
pub fn default_alpha(x: ComplexValue, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("default alpha needs n >= 1".into()));
    }
    let r = x.norm();
    if r == 0.0 || r >= 1.0 {
        return Err(Error::OutOfRange(format!("default alpha needs 0 < |x| < 1, got |x| = {r}")));
    }
    let a = phase_l(1, x, tol())?.re.max(phase_l(2, x, tol())?.re);
    Ok(a / (2.0 * PI * (n as f64).cbrt()))
}

/// Trapezoidal rule for the coefficient of `u^n` in `P(x, u)` on the circle
/// `|u| = e^{-2 pi alpha}` with `m_points` nodes.
pub fn cauchy_reference(x: ComplexValue, n: u64, alpha: f64, m_points: usize) -> Result<ComplexValue> {
    let r = x.norm();
    if !(r < 1.0) {
        return Err(Error::OutOfRange(format!("Cauchy reference needs |x| < 1, got |x| = {r}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange(format!("Cauchy reference needs alpha > 0, got {alpha}")));
    }
    if m_points < (4 * n as usize).max(1) {
        return Err(Error::OutOfRange(format!(
            "Cauchy reference needs at least 4n = {} nodes, got {m_points}",
            4 * n
        )));
    }
    let radius = (-2.0 * PI * alpha).exp();
    let shift = 2.0 * PI * alpha * n as f64;
    let mf = m_points as f64;
    let terms: Vec<Result<Complex64>> = (0..m_points)
        .into_par_iter()
        .map(|j| {
            let t = 2.0 * PI * j as f64 / mf;
            let u = Complex64::from_polar(radius, t);
            let lp = log_gen_fn(x, u, tol())?;
            let nt = 2.0 * PI * ((j as u128 * n as u128) % m_points as u128) as f64 / mf;
            Ok((lp + Complex64::new(shift, -nt)).exp())
        })
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for t in terms {
        sum += t?;
    }
    Ok(sum / mf)
}

/// One Farey arc's share of `Q_n(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcContribution {
    pub h: u64,
    pub k: u64,
    pub omega: ComplexValue,
    /// `I_{h,k,n}(x) = int_arc exp(Psi + g + 2 pi n (alpha - iv)) dv` with
    /// `w = 2 pi (alpha - iv)`.
    pub integral: ComplexValue,
    pub error_estimate: f64,
}

impl ArcContribution {
    pub fn product(&self) -> ComplexValue {
        self.omega * self.integral
    }
}

/// `omega_{h,k,n}(x) I_{h,k,n}(x)` over one arc.
pub fn arc_integral(
    arc: &FareyArc,
    n: u64,
    x: ComplexValue,
    alpha: f64,
    opts: QuadratureOptions,
) -> Result<ArcContribution> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange(format!("arc integrals need alpha > 0, got {alpha}")));
    }
    let (h, k) = (arc.h, arc.k);
    let om = omega(h, k, n, x, tol())?;
    let nf = n as f64;
    let mut failure: Option<Error> = None;
    let integrand = |v: f64| {
        let w = Complex64::new(2.0 * PI * alpha, -2.0 * PI * v);
        let e = psi(k, x, w, tol()).and_then(|p| Ok(p + g(h, k, x, w, tol())?));
        match e {
            Ok(e) => (e + w * nf).exp(),
            Err(err) => {
                failure.get_or_insert(err);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let (lo, hi) = arc.offsets();
    let q = integrate(integrand, lo, hi, &[0.0], opts);
    if let Some(err) = failure {
        return Err(err);
    }
    let q = q?;
    Ok(ArcContribution {
        h,
        k,
        omega: om,
        integral: q.value,
        error_estimate: q.error_estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcSum {
    pub order: u64,
    pub alpha: f64,
    pub contributions: Vec<ArcContribution>,
    pub total: ComplexValue,
}

impl ArcSum {
    /// `|omega_{0,1} I_{0,1}|` (the arc at 0) against the sum of the other
    /// arcs' moduli.
    pub fn minor_to_major_ratio(&self) -> f64 {
        let major: f64 = self.contributions.iter().filter(|c| c.k == 1).map(|c| c.product().norm()).sum();
        let minor: f64 = self.contributions.iter().filter(|c| c.k != 1).map(|c| c.product().norm()).sum();
        minor / major
    }
}

/// `sum over F_order of omega_{h,k,n} I_{h,k,n}`, which reproduces `Q_n(x)`.
pub fn arc_sum(x: ComplexValue, n: u64, order: u64, alpha: f64, opts: QuadratureOptions) -> Result<ArcSum> {
    let arcs = farey(order)?;
    let parts: Vec<Result<ArcContribution>> = arcs.par_iter().map(|a| arc_integral(a, n, x, alpha, opts)).collect();
    let contributions = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let total = contributions.iter().map(ArcContribution::product).sum();
    Ok(ArcSum {
        order,
        alpha,
        contributions,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{evaluate_adaptive, PlanePartitionTable};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exact(table: &PlanePartitionTable, n: usize, x: Complex64) -> Complex64 {
        evaluate_adaptive(table.get(n).unwrap(), x, 256).unwrap().to_complex64()
    }

    #[test]
    fn r1_examples() {
        let e = estimate_r1(c(0.5, 0.0), 100).unwrap();
        assert_eq!(e.exponent.im, 0.0);
        assert!(e.exponent.re > 0.0);
        assert!((e.value.norm() - e.prefactor.norm() * e.exponent.re.exp()).abs() < 1e-12 * e.value.norm());
        assert!(matches!(estimate_r1(c(0.0, 0.0), 10), Err(Error::Region { .. })));
        match estimate_r1(c(-0.4, 0.0), 10) {
            Err(Error::Region { suggestion, .. }) => assert_eq!(suggestion, "estimate_oscillatory"),
            other => panic!("{other:?}"),
        }
        match estimate_r1(c(-0.9, 0.0), 10) {
            Err(Error::Region { suggestion, .. }) => assert_eq!(suggestion, "estimate_r2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn r1_relative_error_small() {
        let table = PlanePartitionTable::build(200).unwrap();
        let x = c(0.5, 0.0);
        let q = exact(&table, 200, x);
        let e = estimate_r1(x, 200).unwrap().value;
        assert!((e / q - 1.0).norm() < 0.15);
    }

    #[test]
    fn r2_examples() {
        let x = c(-0.9, 0.0);
        let a = estimate_r2(x, 50).unwrap().value;
        let b = estimate_r2(x, 51).unwrap().value;
        assert!(a.re * b.re < 0.0);
        let y = c(-0.95, 0.1);
        let v1 = estimate_r2(y, 40).unwrap().value.norm();
        let v2 = estimate_r2(y.conj(), 40).unwrap().value.norm();
        assert!((v1 - v2).abs() < 1e-12 * v1);
        assert!(matches!(estimate_r2(c(0.5, 0.0), 10), Err(Error::Region { .. })));
    }

    #[test]
    fn oscillatory_examples() {
        let table = PlanePartitionTable::build(100).unwrap();
        let x = -0.4;
        let li = trilog(c(x, 0.0), tol()).unwrap().re.abs();
        assert!((0.75 * 2f64.cbrt() * n23(100) * li.cbrt()).exp() > 1.0);
        for n in 90..=100u64 {
            let phase = oscillatory_phase(x, n).unwrap();
            if phase.cos().abs() < 0.3 {
                continue;
            }
            let est = estimate_oscillatory(x, n).unwrap();
            let q = exact(&table, n as usize, c(x, 0.0)).re;
            assert_eq!(est.signum(), q.signum(), "n = {n}");
        }
        assert!(matches!(estimate_oscillatory(-0.9, 10), Err(Error::Region { .. })));
        assert!(matches!(estimate_oscillatory(0.3, 10), Err(Error::Region { .. })));
    }

    #[test]
    fn oscillatory_is_two_conjugate_r1_terms() {
        let x = -0.5;
        let t = main_term(1, c(x, 0.0), 77).unwrap().value;
        let o = estimate_oscillatory(x, 77).unwrap();
        assert!((2.0 * t.re - o).abs() < 1e-12 * o.abs().max(t.norm()));
    }

    #[test]
    fn boundary_examples() {
        let curve = crate::phase::trace_boundary(6, 1e-12).unwrap();
        let x = curve.points[2].x;
        let b = estimate_boundary(x, 60).unwrap();
        let ratio = b.term1.value.norm() / b.term2.value.norm();
        assert!(ratio > 0.1 && ratio < 10.0, "{ratio}");
        let bc = estimate_boundary(x.conj(), 60).unwrap();
        assert!((bc.value - b.value.conj()).norm() < 1e-10 * b.value.norm());
    }

    #[test]
    fn boundary_two_terms_beat_one() {
        let table = PlanePartitionTable::build(200).unwrap();
        let curve = crate::phase::trace_boundary(6, 1e-12).unwrap();
        let x = curve.points[2].x;
        let q = exact(&table, 200, x);
        let b = estimate_boundary(x, 200).unwrap();
        let e_two = (b.value / q - 1.0).norm();
        let e1 = (b.term1.value / q - 1.0).norm();
        let e2 = (b.term2.value / q - 1.0).norm();
        assert!(e_two < e1 && e_two < e2, "{e_two} {e1} {e2}");
    }

    #[test]
    fn saddle_closed_examples() {
        let v = saddle_closed(1, 200, c(0.5, 0.0)).unwrap();
        assert!(v.re > 0.0 && v.im == 0.0);
        let l = phase_l(1, c(-0.4, 0.0), tol()).unwrap();
        let single = (l / 3.0).sqrt() * (l * 1.5 * n23(200)).exp() / (2.0 * PI * 200f64.powf(4.0 / 3.0)).sqrt();
        let v = saddle_closed(1, 200, c(-0.4, 0.0)).unwrap();
        assert!((v.re - 2.0 * single.re).abs() < 1e-12 * single.norm());
        let x = c(-0.9, 0.1);
        let v = saddle_closed(2, 300, x).unwrap();
        let l2 = phase_l(2, x, tol()).unwrap();
        let log_prefactor = ((l2 / 3.0).sqrt() / (2.0 * PI * 300f64.powf(4.0 / 3.0)).sqrt()).norm().ln();
        let expected = 1.5 * n23(300) * l2.re + log_prefactor;
        assert!((v.norm().ln() - expected).abs() < 1e-10 * expected);
        assert!(saddle_closed(1, 10, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn saddle_numeric_matches_closed() {
        for &x in &[c(0.5, 0.0), c(-0.4, 0.0)] {
            for &n in &[200u64, 1600] {
                let a = saddle_numeric(1, n, x, default_delta()).unwrap();
                let b = saddle_closed(1, n, x).unwrap();
                assert!((a / b - 1.0).norm() <= 5.0 * (n as f64).powf(-2.0 / 3.0), "x = {x}, n = {n}");
            }
        }
    }

    #[test]
    fn saddle_peak_locations() {
        let delta = default_delta();
        let grid = 20001;
        let step = 2.0 * PI / delta / (grid - 1) as f64;
        let x = c(0.3, 0.4);
        let l = phase_l(1, x, tol()).unwrap();
        let peaks = saddle_peaks(1, 200, x, delta, grid).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0] + l.im).abs() <= step);
        let x = c(-0.4, 0.0);
        let l = phase_l(1, x, tol()).unwrap();
        let peaks = saddle_peaks(1, 200, x, delta, grid).unwrap();
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0] + l.im).abs() <= step && (peaks[1] - l.im).abs() <= step);
    }

    #[test]
    fn basic_inequality_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let l = Complex64::from_polar(rng.gen_range(0.01..3.0), rng.gen_range(-PI / 3.0..=PI / 3.0));
            let alpha = rng.gen_range(1e-3..2.0);
            let v = rng.gen_range(-5.0..5.0);
            let gap = basic_inequality_gap(l, alpha, v);
            assert!(gap >= -1e-9 * l.norm().powi(3) / (alpha * alpha), "{l} {alpha} {v}: {gap}");
        }
    }

    #[test]
    fn cauchy_examples() {
        let table = PlanePartitionTable::build(20).unwrap();
        let x = c(0.3, 0.0);
        let alpha = default_alpha(x, 20).unwrap();
        let v = cauchy_reference(x, 20, alpha, 512).unwrap();
        let q = exact(&table, 20, x);
        assert!((v / q - 1.0).norm() < 1e-9);
        let v0 = cauchy_reference(x, 0, 0.5, 16).unwrap();
        assert!((v0 - 1.0).norm() < 1e-12);
        // At alpha/2 the radius is 0.85, so aliasing from Q_{20+M} needs M
        // well above 512 to drop below 1e-8.
        let half = cauchy_reference(x, 20, alpha / 2.0, 2048).unwrap();
        let double = cauchy_reference(x, 20, alpha * 2.0, 2048).unwrap();
        assert!((half / v - 1.0).norm() < 1e-8 && (double / v - 1.0).norm() < 1e-8);
        assert!(cauchy_reference(x, 20, alpha, 40).is_err());
    }

    #[test]
    fn arc_sum_reconstructs_and_minor_arcs_are_small() {
        let x = c(0.5, 0.0);
        let n = 200;
        let alpha = default_alpha(x, n).unwrap();
        let sum = arc_sum(x, n, 6, alpha, QuadratureOptions::default()).unwrap();
        let reference = cauchy_reference(x, n, alpha, 16 * n as usize).unwrap();
        assert!((sum.total / reference - 1.0).norm() < 1e-8, "{} vs {}", sum.total, reference);
        assert!(sum.minor_to_major_ratio() < 1e-3, "{}", sum.minor_to_major_ratio());
    }
}
