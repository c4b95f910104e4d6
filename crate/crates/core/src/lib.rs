//! Plane partition polynomials and their asymptotics inside the unit disk.
//!
//! `Q_n(x) = sum_k pp_k(n) x^k` counts plane partitions of `n` by trace. This
//! crate computes `Q_n` exactly, evaluates it at high precision, and checks
//! the circle-method description of its growth:
//!
//! - [`special`]: the trilogarithm and the phase functions `L_k`.
//! - [`exact`]: exact coefficients, a brute-force enumeration oracle and
//!   rounding-certified evaluation.
//! - [`circle`]: Farey arcs and the factorisation of the generating function
//!   near a root of unity, with its error bounds as checkable margins.
//! - [`phase`]: the phases `R(1)`, `R(2)`, their boundary, and the constants
//!   `x*` and `theta*`.
//! - [`asymptotics`]: the main-term formulas, saddle-point integrals and a
//!   Cauchy-integral reference.
//! - [`zeros`]: high-precision zeros of `Q_n` and the predicted real zeros on
//!   `(x*, 0)`.
//! - [`verify`]: seeded audits of the identities and bounds above.
//!
//! The guide in `book/` walks through each piece; its code listings are
//! compiled and run as doctests of this crate.

pub mod asymptotics;
pub mod circle;
pub mod error;
pub mod exact;
pub mod hp;
pub mod phase;
pub mod quad;
pub mod special;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
pub use exact::{
    enumerate_by_trace, evaluate, evaluate_adaptive, plane_partition_polynomial, EvalResult,
    PlanePartitionPolynomial, PlanePartitionTable,
};
pub use hp::HighPrecComplex;
pub use special::{phase_l, principal_cuberoot, trilog, SeriesTolerance};

/// Complex scalars at machine precision.
pub type ComplexValue = num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/trilogarithm.md")]
    mod trilogarithm {}
    #[doc = include_str!("../../../book/src/circle-method.md")]
    mod circle_method {}
    #[doc = include_str!("../../../book/src/phases.md")]
    mod phases {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/zeros.md")]
    mod zeros {}
}
