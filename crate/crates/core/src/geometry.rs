//! Points of `Ω = ℝ² \ Γ` with the barrier `Γ = {(0, x2) : x2 ≤ 0}`.
//!
//! Polar angles live in `(-π/2, 3π/2)`, which puts the branch cut of the
//! angle exactly on the barrier.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::C2;

pub const PHI_MIN: f64 = -FRAC_PI_2;
pub const PHI_MAX: f64 = 3.0 * FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPoint {
    pub x1: f64,
    pub x2: f64,
}

impl CartesianPoint {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }
}

/// `x = r (cos φ, sin φ)`.
///
/// [`PolarPoint::new`] enforces `r > 0` and `-π/2 < φ < 3π/2`. The fields
/// are public so that the Green's function can also be evaluated on the
/// barrier itself, `φ ∈ {-π/2, 3π/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain { what: "polar radius", value: r });
        }
        if !(phi > PHI_MIN && phi < PHI_MAX) {
            return Err(Error::Domain { what: "polar angle", value: phi });
        }
        Ok(Self { r, phi })
    }

    pub fn x1(&self) -> f64 {
        self.r * self.phi.cos()
    }

    pub fn x2(&self) -> f64 {
        self.r * self.phi.sin()
    }
}

/// The Fresnel-rotated point `ρ e^{iα} (cos θ, sin θ) ∈ ℂ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedRadialPoint {
    pub rho: f64,
    pub theta: f64,
    pub alpha: f64,
}

impl RotatedRadialPoint {
    pub fn new(rho: f64, theta: f64, alpha: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain { what: "rotated radius", value: rho });
        }
        if !(theta > PHI_MIN && theta < PHI_MAX) {
            return Err(Error::Domain { what: "rotated angle", value: theta });
        }
        if !(alpha > 0.0 && alpha < FRAC_PI_2) {
            return Err(Error::Domain { what: "Fresnel angle", value: alpha });
        }
        Ok(Self { rho, theta, alpha })
    }

    /// The complex radius `ρ e^{iα}`.
    pub fn radius(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.alpha)
    }

    pub fn coordinates(&self) -> C2 {
        let z = self.radius();
        [z * self.theta.cos(), z * self.theta.sin()]
    }
}

/// Whether `p` avoids the barrier. The origin belongs to the barrier.
pub fn in_domain(p: CartesianPoint) -> bool {
    p.x1.is_finite() && p.x2.is_finite() && !(p.x1 == 0.0 && p.x2 <= 0.0)
}

pub fn to_polar(p: CartesianPoint) -> Result<PolarPoint> {
    if !in_domain(p) {
        return Err(Error::Boundary { x1: p.x1, x2: p.x2 });
    }
    let r = p.x1.hypot(p.x2);
    let mut phi = p.x2.atan2(p.x1);
    if phi <= PHI_MIN {
        if p.x1 > 0.0 {
            // atan2 rounded a point just right of the barrier onto -π/2
            phi = f64::from_bits(PHI_MIN.to_bits() - 1);
        } else {
            phi += 2.0 * PI;
        }
    }
    if phi >= PHI_MAX {
        phi = f64::from_bits(PHI_MAX.to_bits() - 1);
    }
    Ok(PolarPoint { r, phi })
}

pub fn to_cartesian(q: PolarPoint) -> CartesianPoint {
    CartesianPoint { x1: q.x1(), x2: q.x2() }
}
