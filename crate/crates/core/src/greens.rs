//! Green's functions of the free Schrödinger equation `i ∂ₜΨ = -ΔΨ` outside
//! the half-line barrier, with Dirichlet or Neumann conditions on it.
//!
//! For `x = r(cos φ, sin φ)` and `y = ρ(cos θ, sin θ)`
//!
//! ```text
//! G(t,x,y) = e^{-(r+ρ)²/(4it)} / (8iπt)
//!            · [Λ(√(rρ) cos((φ-θ)/2) / s) ∓ Λ(-√(rρ) sin((φ+θ)/2) / s)]
//! ```
//!
//! with `-` for Dirichlet and `+` for Neumann. The square root `s` of `it`
//! is taken as `-e^{iπ/4}√t`: with the principal root the kernel is the
//! reflection `x1 ↦ -x1` of the propagator (up to sign), which is visible as
//! a mirrored initial trace for `t → 0⁺`.
//!
//! The radial variable continues holomorphically to `Re ρ > 0`, which the
//! Fresnel-rotated integral and the operator coefficients rely on.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::complexfn::scaled_lambda;
use crate::error::{Error, Result};
use crate::geometry::{in_domain, to_polar, CartesianPoint, PolarPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 2] = [BoundaryKind::Dirichlet, BoundaryKind::Neumann];

    /// Sign in front of the second `Λ` term.
    pub fn sign(self) -> f64 {
        match self {
            BoundaryKind::Dirichlet => -1.0,
            BoundaryKind::Neumann => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
        }
    }
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" | "dirichlet" => Ok(BoundaryKind::Dirichlet),
            "n" | "neumann" => Ok(BoundaryKind::Neumann),
            other => Err(Error::InvalidParameter(format!("unknown boundary kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TimeParameter(f64);

impl TimeParameter {
    pub fn new(t: f64) -> Result<Self> {
        if t > 0.0 && t.is_finite() {
            Ok(Self(t))
        } else {
            Err(Error::Domain { what: "time", value: t })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// The Green's function with `t` and `x` fixed, evaluated at many `y`.
#[derive(Debug, Clone, Copy)]
pub struct Kernel {
    sign: f64,
    r: f64,
    phi: f64,
    /// `4it`
    four_it: Complex64,
    /// `1/s`
    inv_sqrt_it: Complex64,
    /// `1/(8iπt)`
    prefactor: Complex64,
}

impl Kernel {
    pub fn new(kind: BoundaryKind, t: TimeParameter, x: PolarPoint) -> Self {
        let t = t.get();
        let sqrt_it = -Complex64::from_polar(t.sqrt(), FRAC_PI_4);
        Self {
            sign: kind.sign(),
            r: x.r,
            phi: x.phi,
            four_it: Complex64::new(0.0, 4.0 * t),
            inv_sqrt_it: sqrt_it.inv(),
            prefactor: Complex64::new(0.0, 8.0 * PI * t).inv(),
        }
    }

    fn bracket(&self, z: Complex64, theta: f64, exponent: Complex64) -> Complex64 {
        let root = (self.r * z).sqrt() * self.inv_sqrt_it;
        let v1 = root * (0.5 * (self.phi - theta)).cos();
        let v2 = -root * (0.5 * (self.phi + theta)).sin();
        let sum = scaled_lambda(v1, exponent) + self.sign * scaled_lambda(v2, exponent);
        self.prefactor * sum
    }

    /// `G(t, x, z(cos θ, sin θ))` for `Re z ≥ 0`; no domain check.
    #[inline]
    pub fn eval(&self, z: Complex64, theta: f64) -> Complex64 {
        let s = self.r + z;
        self.bracket(z, theta, -(s * s) / self.four_it)
    }

    /// `G̃ = G · e^{z²/(4it)}`; no domain check.
    #[inline]
    pub fn reduced(&self, z: Complex64, theta: f64) -> Complex64 {
        let e = -(self.r * self.r + 2.0 * self.r * z) / self.four_it;
        self.bracket(z, theta, e)
    }
}

pub fn greens(kind: BoundaryKind, t: TimeParameter, x: PolarPoint, y: PolarPoint) -> Complex64 {
    Kernel::new(kind, t, x).eval(Complex64::new(y.r, 0.0), y.phi)
}

fn check_right_half(z: Complex64) -> Result<()> {
    if z.re > 0.0 && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "radial variable needs Re z > 0", value: z.re })
    }
}

/// The Green's function with `ρ` replaced by a complex `z`, `Re z > 0`.
pub fn greens_rotated(
    kind: BoundaryKind,
    t: TimeParameter,
    x: PolarPoint,
    z: Complex64,
    theta: f64,
) -> Result<Complex64> {
    check_right_half(z)?;
    Ok(Kernel::new(kind, t, x).eval(z, theta))
}

pub fn greens_reduced(
    kind: BoundaryKind,
    t: TimeParameter,
    x: PolarPoint,
    z: Complex64,
    theta: f64,
) -> Result<Complex64> {
    check_right_half(z)?;
    Ok(Kernel::new(kind, t, x).reduced(z, theta))
}

/// `|G̃(t, x, z(cos θ, sin θ))| ≤ e^{3r|z|/(2t)} / (2πt)`.
pub fn greens_reduced_bound(t: TimeParameter, r: f64, zabs: f64) -> f64 {
    let t = t.get();
    (1.5 * r * zabs / t).exp() / (2.0 * PI * t)
}

/// `|i ∂ₜG + Δₓ G| / |G|` by second-order central differences.
pub fn schrodinger_residual(
    kind: BoundaryKind,
    t: TimeParameter,
    x: CartesianPoint,
    y: PolarPoint,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) || t.get() - h <= 0.0 {
        return Err(Error::InvalidParameter(format!("step {h} incompatible with t = {}", t.get())));
    }
    let crosses = !in_domain(x)
        || (x.x2 <= 0.0 && x.x1.abs() <= h)
        || (x.x1 == 0.0 && x.x2 - h <= 0.0);
    if crosses {
        return Err(Error::StencilCrossesBarrier { x1: x.x1, x2: x.x2, h });
    }
    let g = |tt: f64, x1: f64, x2: f64| -> Result<Complex64> {
        let xp = to_polar(CartesianPoint::new(x1, x2))?;
        Ok(greens(kind, TimeParameter(tt), xp, y))
    };
    let t0 = t.get();
    let centre = g(t0, x.x1, x.x2)?;
    let dt = (g(t0 + h, x.x1, x.x2)? - g(t0 - h, x.x1, x.x2)?) / (2.0 * h);
    let lap = (g(t0, x.x1 + h, x.x2)? + g(t0, x.x1 - h, x.x2)? + g(t0, x.x1, x.x2 + h)?
        + g(t0, x.x1, x.x2 - h)?
        - 4.0 * centre)
        / (h * h);
    let residual = Complex64::i() * dt + lap;
    Ok(residual.norm() / centre.norm())
}
