//! The wave function `Ψ(t, x; F)` as a Fresnel-rotated Green's function
//! integral, and a slow regularized reference for it.
//!
//! On the rotated contour `y = ρ e^{iα}(cos θ, sin θ)` the Gaussian factor of
//! the kernel has modulus `e^{-ρ² sin 2α / (4t)}`, so the double integral
//!
//! ```text
//! Ψ(t,x) = e^{2iα} ∫₀^∞ ∫_{-π/2}^{3π/2} G(t, x, y) F(y) ρ dθ dρ
//! ```
//!
//! converges absolutely for every datum of exponential type. The radial
//! integral is cut at [`rho_max`] and both directions use composite
//! Gauss–Legendre panels. The radial rule runs in `s = √ρ`, which removes
//! the `√ρ` behaviour of the kernel at the origin.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{to_cartesian, CartesianPoint, PolarPoint, PHI_MAX, PHI_MIN};
use crate::greens::{BoundaryKind, Kernel, TimeParameter};
use crate::quadrature::composite;
use crate::sum::ComplexSum;
use crate::C2;

/// Radial cap for the tail search.
pub const RHO_MAX_CAP: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoMaxPolicy {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub alpha: f64,
    pub n_theta: usize,
    pub n_rho: usize,
    pub tol: f64,
    pub rho_max_policy: RhoMaxPolicy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            alpha: FRAC_PI_4,
            n_theta: 256,
            n_rho: 160,
            tol: 1e-9,
            rho_max_policy: RhoMaxPolicy::Auto,
        }
    }
}

impl QuadratureSpec {
    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < FRAC_PI_2) {
            return Err(Error::Domain { what: "Fresnel angle", value: self.alpha });
        }
        if self.n_theta < 8 || self.n_rho < 8 {
            return Err(Error::InvalidParameter(format!(
                "need at least 8 nodes per direction, got n_rho = {}, n_theta = {}",
                self.n_rho, self.n_theta
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {} must be positive", self.tol)));
        }
        if let RhoMaxPolicy::Fixed(v) = self.rho_max_policy {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain { what: "fixed rho_max", value: v });
            }
        }
        Ok(())
    }
}

/// A polynomial datum `F(z) = Σ f[n1][n2] z1^n1 z2^n2` with `|F(z)| ≤ A e^{B|z|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorField {
    coeffs: Vec<Vec<Complex64>>,
    bound_a: f64,
    bound_b: f64,
}

impl TaylorField {
    /// Uses `|z1^n1 z2^n2| ≤ |z|^n ≤ n! e^{|z|}` for the growth bound.
    pub fn new(coeffs: Vec<Vec<Complex64>>) -> Self {
        let mut a = 0.0;
        let mut constant = true;
        for (n1, row) in coeffs.iter().enumerate() {
            for (n2, c) in row.iter().enumerate() {
                let n = n1 + n2;
                if n > 0 && *c != Complex64::new(0.0, 0.0) {
                    constant = false;
                }
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                a += c.norm() * fact;
            }
        }
        let b = if constant { 0.0 } else { 1.0 };
        Self { coeffs, bound_a: a, bound_b: b }
    }

    pub fn with_bound(coeffs: Vec<Vec<Complex64>>, bound_a: f64, bound_b: f64) -> Result<Self> {
        if !(bound_a >= 0.0) || !(bound_b >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "growth bound ({bound_a}, {bound_b}) must be non-negative"
            )));
        }
        Ok(Self { coeffs, bound_a, bound_b })
    }

    /// A single monomial `c z1^n1 z2^n2`.
    pub fn monomial(n1: usize, n2: usize, c: Complex64) -> Self {
        let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); n2 + 1]; n1 + 1];
        coeffs[n1][n2] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    pub fn coeff(&self, n1: usize, n2: usize) -> Complex64 {
        self.coeffs
            .get(n1)
            .and_then(|row| row.get(n2))
            .copied()
            .unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        let mut d = 0;
        for (n1, row) in self.coeffs.iter().enumerate() {
            for (n2, c) in row.iter().enumerate() {
                if *c != Complex64::new(0.0, 0.0) {
                    d = d.max(n1 + n2);
                }
            }
        }
        d
    }

    pub fn bound(&self) -> (f64, f64) {
        (self.bound_a, self.bound_b)
    }

    pub fn eval(&self, z: C2) -> Complex64 {
        let mut outer = Complex64::new(0.0, 0.0);
        for row in self.coeffs.iter().rev() {
            let inner = row.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z[1] + c);
            outer = outer * z[0] + inner;
        }
        outer
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub weight: Complex64,
    pub k: [f64; 2],
}

/// `Σ C_j e^{i k_j·z}` with all `|k_j| ≤ k0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSuperposition {
    pub atoms: Vec<Atom>,
    pub k0: f64,
}

impl DiscreteSuperposition {
    pub fn new(atoms: Vec<Atom>, k0: f64) -> Result<Self> {
        for atom in &atoms {
            let norm = atom.k[0].hypot(atom.k[1]);
            if norm > k0 * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "atom frequency {norm} exceeds k0 = {k0}"
                )));
            }
        }
        Ok(Self { atoms, k0 })
    }

    pub fn eval(&self, z: C2) -> Complex64 {
        let mut acc = ComplexSum::new();
        for atom in &self.atoms {
            let phase = Complex64::i() * (atom.k[0] * z[0] + atom.k[1] * z[1]);
            acc.add(atom.weight * phase.exp());
        }
        acc.value()
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.norm()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    PlaneWave { k: C2 },
    Taylor(TaylorField),
    Discrete(DiscreteSuperposition),
}

impl InitialDatum {
    pub fn plane_wave(k1: f64, k2: f64) -> Self {
        InitialDatum::PlaneWave { k: [Complex64::new(k1, 0.0), Complex64::new(k2, 0.0)] }
    }

    pub fn eval(&self, z: C2) -> Complex64 {
        match self {
            InitialDatum::PlaneWave { k } => (Complex64::i() * (k[0] * z[0] + k[1] * z[1])).exp(),
            InitialDatum::Taylor(f) => f.eval(z),
            InitialDatum::Discrete(d) => d.eval(z),
        }
    }

    /// `(A, B)` with `|F(z)| ≤ A e^{B|z|}` on `ℂ²`.
    pub fn growth(&self) -> (f64, f64) {
        match self {
            InitialDatum::PlaneWave { k } => (1.0, k[0].norm().hypot(k[1].norm())),
            InitialDatum::Taylor(f) => f.bound(),
            InitialDatum::Discrete(d) => (d.total_variation(), d.k0),
        }
    }
}

pub fn eval_datum(f: &InitialDatum, z: C2) -> Complex64 {
    f.eval(z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub t: f64,
    pub x: CartesianPoint,
    pub value: Complex64,
    pub est_error: f64,
}

/// Smallest `R ≥ R*` with `∫_R^∞ e^{f(ρ)} dρ < tol` for the concave exponent
/// `f(ρ) = log_scale - aρ² + bρ + m ln ρ`, where `R*` is the peak of `f`.
///
/// Past the peak `∫_R^∞ e^f ≤ e^{f(R)} / |f'(R)|`.
pub(crate) fn concave_tail_cutoff(log_scale: f64, a: f64, b: f64, m: f64, tol: f64) -> Result<f64> {
    let f = |r: f64| log_scale - a * r * r + b * r + m * r.ln();
    let slope = |r: f64| -2.0 * a * r + b + m / r;
    let tail = |r: f64| f(r) - (-slope(r)).ln();
    let log_tol = tol.ln();
    let peak = (b + (b * b + 8.0 * a * m).sqrt()) / (4.0 * a);
    let mut lo = peak * (1.0 + 1e-12) + 1e-12;
    if lo >= RHO_MAX_CAP || !(tail(RHO_MAX_CAP) < log_tol) {
        return Err(Error::TailBoundUnsatisfiable { tol, cap: RHO_MAX_CAP });
    }
    if tail(lo) < log_tol {
        return Ok(lo);
    }
    let mut hi = RHO_MAX_CAP;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) < log_tol {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Radial cutoff for the majorant `(1/t) e^{-ρ² sin 2α/(4t)} e^{(3r/(2t)+B+1)ρ}`.
pub fn rho_max(spec: &QuadratureSpec, t: f64, r: f64, b: f64) -> Result<f64> {
    rho_max_scaled(spec, t, r, b, 1.0)
}

fn rho_max_scaled(spec: &QuadratureSpec, t: f64, r: f64, b: f64, amplitude: f64) -> Result<f64> {
    if !(t > 0.0) || !(r >= 0.0) || !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!("rho_max needs t > 0, r, B ≥ 0; got {t}, {r}, {b}")));
    }
    let decay = (2.0 * spec.alpha).sin() / (4.0 * t);
    let growth = 1.5 * r / t + b + 1.0;
    concave_tail_cutoff((amplitude.max(1e-300) / t).ln(), decay, growth, 0.0, spec.tol)
}

/// One tensor-product node set on the rotated contour. `measure[j]` already
/// contains `e^{2iα} · w_j · G(z_j) · ρ_j`, so `Ψ ≈ Σ measure[j] F(points[j])`.
#[derive(Debug, Clone)]
pub struct FresnelNodes {
    pub alpha: f64,
    pub rho_max: f64,
    pub n_rho: usize,
    pub n_theta: usize,
    /// `ρ_j e^{iα}`, one per radial row
    pub radii: Vec<Complex64>,
    pub cos_theta: Vec<f64>,
    pub sin_theta: Vec<f64>,
    /// row-major: radial row, then angle
    pub measure: Vec<Complex64>,
}

impl FresnelNodes {
    pub fn new(
        kind: BoundaryKind,
        t: TimeParameter,
        x: PolarPoint,
        alpha: f64,
        rho_max: f64,
        n_rho: usize,
        n_theta: usize,
    ) -> Self {
        let kernel = Kernel::new(kind, t, x);
        let srule = composite(0.0, rho_max.sqrt(), n_rho);
        let trule = composite(PHI_MIN, PHI_MAX, n_theta);
        let rot = Complex64::from_polar(1.0, alpha);
        let rot2 = rot * rot;
        let radii: Vec<Complex64> = srule.nodes.iter().map(|&s| rot * (s * s)).collect();
        let measure: Vec<Complex64> = srule
            .nodes
            .par_iter()
            .zip(srule.weights.par_iter())
            .zip(radii.par_iter())
            .flat_map_iter(|((&s, &ws), &z)| {
                let rho = s * s;
                // dρ = 2s ds, combined with the ρ of the area element
                let radial = rot2 * (ws * 2.0 * s * rho);
                let kernel = &kernel;
                trule
                    .nodes
                    .iter()
                    .zip(&trule.weights)
                    .map(move |(&th, &wt)| radial * wt * kernel.eval(z, th))
                    .collect::<Vec<_>>()
            })
            .collect();
        Self {
            alpha,
            rho_max,
            n_rho: srule.len(),
            n_theta: trule.len(),
            radii,
            cos_theta: trule.nodes.iter().map(|t| t.cos()).collect(),
            sin_theta: trule.nodes.iter().map(|t| t.sin()).collect(),
            measure,
        }
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn point(&self, row: usize, col: usize) -> C2 {
        let z = self.radii[row];
        [z * self.cos_theta[col], z * self.sin_theta[col]]
    }

    /// `Σ measure · F(point)`; rows in parallel, row sums combined in order.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(C2) -> Complex64 + Sync,
    {
        let rows: Vec<Complex64> = (0..self.n_rho)
            .into_par_iter()
            .map(|row| {
                let base = row * self.n_theta;
                let mut acc = ComplexSum::new();
                for col in 0..self.n_theta {
                    acc.add(self.measure[base + col] * f(self.point(row, col)));
                }
                acc.value()
            })
            .collect();
        rows.into_iter().collect::<ComplexSum>().value()
    }
}

/// Radial cutoff for a datum under `spec.rho_max_policy`.
pub fn resolve_rho_max(spec: &QuadratureSpec, t: TimeParameter, x: PolarPoint, f: &InitialDatum) -> Result<f64> {
    match spec.rho_max_policy {
        RhoMaxPolicy::Fixed(v) => Ok(v),
        RhoMaxPolicy::Auto => {
            let (a, b) = f.growth();
            rho_max_scaled(spec, t.get(), x.r, b, a.max(1.0))
        }
    }
}

/// `Ψ(t, x; F)` with a single mesh-halving error estimate.
pub fn psi_fresnel(
    kind: BoundaryKind,
    t: TimeParameter,
    x: PolarPoint,
    f: &InitialDatum,
    spec: &QuadratureSpec,
) -> Result<WaveSample> {
    spec.validate()?;
    let rmax = resolve_rho_max(spec, t, x, f)?;
    let fine = FresnelNodes::new(kind, t, x, spec.alpha, rmax, spec.n_rho, spec.n_theta);
    let coarse = FresnelNodes::new(kind, t, x, spec.alpha, rmax, spec.n_rho / 2, spec.n_theta / 2);
    let eval = |z: C2| f.eval(z);
    let value = fine.integrate(eval);
    let est_error = (value - coarse.integrate(eval)).norm();
    if !value.is_finite() {
        return Err(Error::Overflow { what: "psi_fresnel" });
    }
    if est_error > 10.0 * spec.tol {
        return Err(Error::NonConvergence { estimate: est_error, tol: spec.tol });
    }
    Ok(WaveSample { t: t.get(), x: to_cartesian(x), value, est_error })
}

const REGULARIZED_RHO_NODES: usize = 640;
const REGULARIZED_THETA_NODES: usize = 256;
/// `e^{-ε ρ²}` is cut at `ρ² = 30/ε`.
const REGULARIZED_EXPONENT_CUT: f64 = 30.0;

/// `∫_Ω e^{-ε|y|²} G(t,x,y) F(y) dy` over real polar coordinates.
pub fn psi_regularized(
    kind: BoundaryKind,
    t: TimeParameter,
    x: PolarPoint,
    f: &InitialDatum,
    eps: f64,
) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::Domain { what: "regularization parameter", value: eps });
    }
    let kernel = Kernel::new(kind, t, x);
    let srule = composite(0.0, (REGULARIZED_EXPONENT_CUT / eps).sqrt().sqrt(), REGULARIZED_RHO_NODES);
    let trule = composite(PHI_MIN, PHI_MAX, REGULARIZED_THETA_NODES);
    let rows: Vec<Complex64> = srule
        .nodes
        .par_iter()
        .zip(srule.weights.par_iter())
        .map(|(&s, &ws)| {
            let rho = s * s;
            let radial = ws * 2.0 * s * rho * (-eps * rho * rho).exp();
            let z = Complex64::new(rho, 0.0);
            let mut acc = ComplexSum::new();
            for (&th, &wt) in trule.nodes.iter().zip(&trule.weights) {
                let y = [z * th.cos(), z * th.sin()];
                acc.add(kernel.eval(z, th) * f.eval(y) * (radial * wt));
            }
            acc.value()
        })
        .collect();
    Ok(rows.into_iter().collect::<ComplexSum>().value())
}

/// Value at 0 of the interpolating polynomial through `(xs[i], ys[i])`.
pub(crate) fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Regularized integrals at each `ε`, extrapolated polynomially to `ε → 0⁺`.
///
/// Fails with [`Error::NonConvergence`] when adding the smallest `ε` moves
/// the extrapolant more than adding the previous one did and the move is
/// larger than one percent.
pub fn psi_regularized_oracle(
    kind: BoundaryKind,
    t: TimeParameter,
    x: PolarPoint,
    f: &InitialDatum,
    epsilons: &[f64],
) -> Result<Complex64> {
    if epsilons.len() < 3 {
        return Err(Error::InvalidParameter("need at least three regularization parameters".into()));
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) || !(epsilons[epsilons.len() - 1] > 0.0) {
        return Err(Error::InvalidParameter("regularization parameters must decrease and stay positive".into()));
    }
    let values = epsilons
        .iter()
        .map(|&e| psi_regularized(kind, t, x, f, e))
        .collect::<Result<Vec<_>>>()?;
    let m = epsilons.len();
    let extrapolants: Vec<Complex64> =
        (2..=m).map(|k| neville_at_zero(&epsilons[..k], &values[..k])).collect();
    let best = extrapolants[extrapolants.len() - 1];
    let last_move = (best - extrapolants[extrapolants.len() - 2]).norm();
    let prev_move = if extrapolants.len() >= 3 {
        (extrapolants[extrapolants.len() - 2] - extrapolants[extrapolants.len() - 3]).norm()
    } else {
        (extrapolants[0] - values[1]).norm()
    };
    let threshold = 1e-2 * best.norm().max(1e-300);
    if last_move > prev_move && last_move > threshold {
        return Err(Error::NonConvergence { estimate: last_move, tol: threshold });
    }
    Ok(best)
}
