//! The phases `R(1)` and `R(2)` of the unit disk.
//!
//! `R(m)` is where `Re L_m` beats every other `Re L_k`. Only `L_1` and `L_2`
//! ever win; they tie along a curve that meets the real axis at `x*` and the
//! unit circle at `e^{±i theta*}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{phase_l, SeriesTolerance};
use crate::ComplexValue;

/// Default `|Re L_1 - Re L_2|` below which a point counts as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Default largest `k` checked by the dominance assertion.
pub const DEFAULT_K_MAX: u32 = 50;

fn series_tol() -> SeriesTolerance {
    SeriesTolerance::default()
}

/// `Re L_k(x)` for `0 < |x| <= 1`.
pub fn re_l(k: u32, x: ComplexValue) -> Result<f64> {
    let r = x.norm();
    if r == 0.0 || r > 1.0 + 1e-12 {
        return Err(Error::OutOfRange(format!("Re L_k needs 0 < |x| <= 1, got |x| = {r}")));
    }
    Ok(phase_l(k, x, series_tol())?.re)
}

/// `Re L_1(x) - Re L_2(x)`: positive in `R(1)`, negative in `R(2)`.
pub fn phase_gap(x: ComplexValue) -> Result<f64> {
    Ok(re_l(1, x)? - re_l(2, x)?)
}

/// On the unit circle only the `1/(2N^2)` tail bound applies, so the series
/// tolerance is relaxed to keep the term count near two million.
fn circle_gap(theta: f64) -> Result<f64> {
    let tol = series_tol().with_abs_tol(1e-13);
    let x = Complex64::from_polar(1.0, theta);
    Ok(phase_l(1, x, tol)?.re - phase_l(2, x, tol)?.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseLabel {
    R1,
    R2,
    #[serde(rename = "BOUNDARY")]
    Boundary,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::R1 => "R1",
            PhaseLabel::R2 => "R2",
            PhaseLabel::Boundary => "BOUNDARY",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The largest `Re L_k` for `3 <= k <= k_max`, with its `k`.
pub fn strongest_higher_phase(x: ComplexValue, k_max: u32) -> Result<Option<(u32, f64)>> {
    let mut best: Option<(u32, f64)> = None;
    for k in 3..=k_max {
        let v = re_l(k, x)?;
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((k, v));
        }
    }
    Ok(best)
}

/// Labels `x` by comparing `Re L_1` and `Re L_2` with tolerance `tol`, and
/// fails with [`Error::Dominance`] if some `Re L_k`, `3 <= k <= k_max`, is
/// not strictly below both.
pub fn classify(x: ComplexValue, k_max: u32, tol: f64) -> Result<PhaseLabel> {
    if k_max < 2 {
        return Err(Error::OutOfRange("classify needs k_max >= 2".into()));
    }
    let r = x.norm();
    if r == 0.0 || r >= 1.0 {
        return Err(Error::OutOfRange(format!("classify needs 0 < |x| < 1, got |x| = {r}")));
    }
    let l1 = re_l(1, x)?;
    let l2 = re_l(2, x)?;
    let dominant = l1.max(l2);
    if let Some((k, v)) = strongest_higher_phase(x, k_max)? {
        if v >= dominant {
            return Err(Error::Dominance {
                x: x.to_string(),
                k,
                re_lk: v,
                re_dominant: dominant,
            });
        }
    }
    Ok(if l1 > l2 + tol {
        PhaseLabel::R1
    } else if l2 > l1 + tol {
        PhaseLabel::R2
    } else {
        PhaseLabel::Boundary
    })
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `x*`: the real boundary point, by bisection of `r -> Re L_1(-r) - Re L_2(-r)`
/// on `(0.5, 0.99)`.
pub fn real_crossing(tol: f64) -> Result<f64> {
    if !(tol >= 1e-12) {
        return Err(Error::OutOfRange(format!("real_crossing needs tol >= 1e-12, got {tol}")));
    }
    let r = bisect(|r| phase_gap(Complex64::new(-r, 0.0)), 0.5, 0.99, tol)?;
    Ok(-r)
}

/// `theta*`: the angle in `(0.9 pi, pi)` where the boundary meets the unit
/// circle.
pub fn circle_crossing(tol: f64) -> Result<f64> {
    if !(tol >= 1e-10) {
        return Err(Error::OutOfRange(format!("circle_crossing needs tol >= 1e-10, got {tol}")));
    }
    bisect(circle_gap, 0.9 * PI, PI, tol)
}

/// `x*` to `1e-12`, computed once.
pub fn x_star() -> f64 {
    static X: OnceLock<f64> = OnceLock::new();
    *X.get_or_init(|| real_crossing(1e-12).expect("the real crossing is bracketed"))
}

/// `theta*` to `1e-10`, computed once.
pub fn theta_star() -> f64 {
    static T: OnceLock<f64> = OnceLock::new();
    *T.get_or_init(|| circle_crossing(1e-10).expect("the circle crossing is bracketed"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub x: ComplexValue,
    /// `|Re L_1(x) - Re L_2(x)|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    /// Ordered by argument in `[0, 2 pi)`: from `e^{i theta*}` through `x*`
    /// to `e^{-i theta*}`.
    pub points: Vec<BoundaryPoint>,
    /// Angles whose ray had no sign change.
    pub gaps: Vec<f64>,
}

impl BoundaryCurve {
    /// CSV with header `theta,re,im,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,re,im,residual\n");
        for p in &self.points {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", p.theta, p.x.re, p.x.im, p.residual));
        }
        out
    }
}

const RAY_INNER_RADIUS: f64 = 0.3;

fn trace_ray(theta: f64, tol: f64) -> Result<BoundaryPoint> {
    let dir = if theta == PI {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, theta)
    };
    let f = |r: f64| phase_gap(dir * r);
    let r = bisect(f, RAY_INNER_RADIUS, 1.0, 1e-15)?;
    let x = dir * r;
    let residual = phase_gap(x)?.abs();
    if residual > tol {
        return Err(Error::Numerical(format!(
            "boundary residual {residual:e} above {tol:e} at theta = {theta}"
        )));
    }
    Ok(BoundaryPoint { theta, x, residual })
}

/// Traces `Re L_1 = Re L_2` by radial bisection on `n_points` rays with
/// angles uniform in `(theta*, pi]`, then adds the conjugate half.
pub fn trace_boundary(n_points: usize, tol: f64) -> Result<BoundaryCurve> {
    if n_points < 2 {
        return Err(Error::OutOfRange("trace_boundary needs n_points >= 2".into()));
    }
    let t_star = theta_star();
    let thetas: Vec<f64> = (0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                PI
            } else {
                t_star + (PI - t_star) * (i + 1) as f64 / n_points as f64
            }
        })
        .collect();
    let rays: Vec<(f64, Result<BoundaryPoint>)> = thetas.par_iter().map(|&t| (t, trace_ray(t, tol))).collect();
    let mut upper = Vec::new();
    let mut gaps = Vec::new();
    for (theta, r) in rays {
        match r {
            Ok(p) => upper.push(p),
            Err(Error::NoSignChange { .. }) | Err(Error::Numerical(_)) => gaps.push(theta),
            Err(e) => return Err(e),
        }
    }
    let mut points = upper.clone();
    for p in upper.iter().rev() {
        if p.theta == PI {
            continue;
        }
        points.push(BoundaryPoint {
            theta: 2.0 * PI - p.theta,
            x: p.x.conj(),
            residual: p.residual,
        });
    }
    let mut all_gaps: Vec<f64> = gaps.clone();
    all_gaps.extend(gaps.iter().rev().filter(|&&t| t != PI).map(|t| 2.0 * PI - t));
    Ok(BoundaryCurve { points, gaps: all_gaps })
}
