//! Time-dependent Schrödinger propagation outside a half-line barrier.
//!
//! The wave function `Ψ(t, x; F)` for entire initial data `F` is available
//! through two independent routes:
//!
//! * [`evolve::psi_fresnel`]: the Green's-function integral with the radial
//!   variable rotated to `ρ e^{iα}`, which makes the integrand absolutely
//!   integrable;
//! * [`operator::CoeffTable`]: the infinite-order differential operator
//!   `Σ c_{n1,n2}(t,x) ∂^{n1+n2}` applied to `F` at the origin.
//!
//! [`superosc`] builds superoscillating data and runs the supershift
//! convergence experiment on top of the operator route.
//!
//! The barrier is `Γ = {(0, x2) : x2 ≤ 0}`; points are described in polar
//! coordinates whose angle lives in `(-π/2, 3π/2)`, so the branch cut runs
//! along the barrier.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexfn;
pub mod error;
pub mod evolve;
pub mod geometry;
pub mod greens;
pub mod operator;
pub mod quadrature;
pub mod sum;
pub mod superosc;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use evolve::{Atom, DiscreteSuperposition, InitialDatum, QuadratureSpec, RhoMaxPolicy, TaylorField, WaveSample};
pub use geometry::{CartesianPoint, PolarPoint, RotatedRadialPoint};
pub use greens::{BoundaryKind, TimeParameter};
pub use operator::CoeffTable;
pub use superosc::{SuperoscParams, SupershiftReport, SupershiftRow};

/// A pair of complex coordinates `(z1, z2)`.
pub type C2 = [Complex64; 2];
