//! The propagator as an infinite-order differential operator
//!
//! ```text
//! U(t,x) = Σ c_{n1,n2}(t,x) ∂^{n1+n2} / ∂z1^{n1} ∂z2^{n2},    Ψ(t,x) = U F(z)|_{z=0}
//! ```
//!
//! On the rotated contour the coefficients are moments of the Fresnel
//! measure: `c_{n1,n2} = Σ_j μ_j z1_j^{n1} z2_j^{n2} / (n1! n2!)`. A table is
//! built from one node set that covers every order up to [`MAX_ORDER`], so a
//! single coefficient computed with [`coeff`] reproduces the table entry bit
//! for bit.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::complexfn::{gamma_real, ln_gamma, ln_mittag_leffler_half, mittag_leffler_half};
use crate::error::{Error, Result};
use crate::evolve::{concave_tail_cutoff, FresnelNodes, QuadratureSpec, RhoMaxPolicy, TaylorField};
use crate::geometry::PolarPoint;
use crate::greens::{BoundaryKind, TimeParameter};
use crate::sum::{CompensatedSum, ComplexSum};
use crate::C2;

/// Largest total order a table may carry.
pub const MAX_ORDER: usize = 60;

/// Frequency up to which the shared radial cutoff keeps `|c| K^n` accurate.
const TABLE_FREQUENCY: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct CoeffTable {
    pub kind: BoundaryKind,
    pub t: f64,
    pub x: PolarPoint,
    pub alpha: f64,
    pub order: usize,
    pub rho_max: f64,
    /// `Σ_{n > N} Σ_{n1+n2=n} coeff_bound(n1, n2)`
    pub tail_bound: f64,
    c: Vec<Vec<Complex64>>,
    bound: Vec<Vec<f64>>,
}

fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Cutoff for the table node set: the max over orders `n ≤ MAX_ORDER` of the
/// cutoff for `(1/t) e^{-aρ² + (3r/(2t)+1)ρ} ρ^{n+1} K^n / (⌊n/2⌋! ⌈n/2⌉!)`.
pub fn table_rho_max(spec: &QuadratureSpec, t: f64, r: f64) -> Result<f64> {
    if let RhoMaxPolicy::Fixed(v) = spec.rho_max_policy {
        return Ok(v);
    }
    let a = (2.0 * spec.alpha).sin() / (4.0 * t);
    let b = 1.5 * r / t + 1.0;
    let mut cut: f64 = 0.0;
    for n in 0..=MAX_ORDER {
        let log_scale = -t.ln() + n as f64 * TABLE_FREQUENCY.ln() - ln_factorial(n / 2) - ln_factorial(n - n / 2);
        cut = cut.max(concave_tail_cutoff(log_scale, a, b, n as f64 + 1.0, spec.tol)?);
    }
    Ok(cut)
}

fn table_nodes(kind: BoundaryKind, t: TimeParameter, x: PolarPoint, spec: &QuadratureSpec) -> Result<FresnelNodes> {
    spec.validate()?;
    let rmax = table_rho_max(spec, t.get(), x.r)?;
    Ok(FresnelNodes::new(kind, t, x, spec.alpha, rmax, spec.n_rho, spec.n_theta))
}

/// `z^k / k!` for `k = 0..=n`.
fn scaled_powers(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = Complex64::new(1.0, 0.0);
    out.push(p);
    for k in 1..=n {
        p = p * z / k as f64;
        out.push(p);
    }
    out
}

/// Index of `(n1, n2)` in graded order: by `n = n1 + n2`, then by `n1`.
fn graded_index(n1: usize, n2: usize) -> usize {
    let n = n1 + n2;
    n * (n + 1) / 2 + n1
}

fn graded_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Moments of one radial row for all `n1 + n2 ≤ order`, graded order.
fn row_moments(nodes: &FresnelNodes, row: usize, order: usize) -> Vec<Complex64> {
    let mut acc = vec![ComplexSum::new(); graded_len(order)];
    for col in 0..nodes.n_theta {
        let mu = nodes.measure[row * nodes.n_theta + col];
        let [z1, z2] = nodes.point(row, col);
        let a = scaled_powers(z1, order);
        let b = scaled_powers(z2, order);
        for n in 0..=order {
            for n1 in 0..=n {
                acc[graded_index(n1, n - n1)].add(mu * a[n1] * b[n - n1]);
            }
        }
    }
    acc.into_iter().map(|s| s.value()).collect()
}

fn single_row_moment(nodes: &FresnelNodes, row: usize, n1: usize, n2: usize) -> Complex64 {
    let mut acc = ComplexSum::new();
    for col in 0..nodes.n_theta {
        let mu = nodes.measure[row * nodes.n_theta + col];
        let [z1, z2] = nodes.point(row, col);
        let a = scaled_powers(z1, n1);
        let b = scaled_powers(z2, n2);
        acc.add(mu * a[n1] * b[n2]);
    }
    acc.value()
}

/// A single operator coefficient `c_{n1,n2}(t, x)`.
pub fn coeff(
    kind: BoundaryKind,
    t: TimeParameter,
    x: PolarPoint,
    n1: usize,
    n2: usize,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if n1 + n2 > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("order {} exceeds {MAX_ORDER}", n1 + n2)));
    }
    let nodes = table_nodes(kind, t, x, spec)?;
    let rows: Vec<Complex64> = (0..nodes.n_rho)
        .into_par_iter()
        .map(|row| single_row_moment(&nodes, row, n1, n2))
        .collect();
    Ok(rows.into_iter().collect::<ComplexSum>().value())
}

pub fn ln_coeff_bound(n1: usize, n2: usize, t: f64, r: f64, alpha: f64) -> f64 {
    let s2 = (2.0 * alpha).sin();
    let n = (n1 + n2) as f64;
    (PI * PI / (2.0 * t)).ln() - ln_gamma((n1 as f64 + 1.0) / 2.0) - ln_gamma((n2 as f64 + 1.0) / 2.0)
        + 0.5 * (n + 2.0) * (16.0 * t / s2).ln()
        + 9.0 * r * r / (2.0 * t * s2)
}

/// `π² / (2t Γ((n1+1)/2) Γ((n2+1)/2)) · (16t / sin 2α)^{(n1+n2+2)/2} · e^{9r²/(2t sin 2α)}`.
pub fn coeff_bound(n1: usize, n2: usize, t: f64, r: f64, alpha: f64) -> f64 {
    let s2 = (2.0 * alpha).sin();
    let g = |n: usize| gamma_real((n as f64 + 1.0) / 2.0);
    if let (Ok(g1), Ok(g2)) = (g(n1), g(n2)) {
        let n = (n1 + n2) as f64;
        let v = PI * PI / (2.0 * t * g1 * g2)
            * (16.0 * t / s2).powf(0.5 * (n + 2.0))
            * (9.0 * r * r / (2.0 * t * s2)).exp();
        if v.is_finite() && v > 0.0 {
            return v;
        }
    }
    ln_coeff_bound(n1, n2, t, r, alpha).exp()
}

fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.into_iter().collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: CompensatedSum = v.iter().map(|&x| (x - m).exp()).collect();
    m + s.value().ln()
}

/// `ln Σ_{n1+n2=n} coeff_bound(n1,n2) w^n` for `n = 0, 1, ...` until the
/// shells have passed their peak and dropped `drop` below it.
fn log_shells(t: f64, r: f64, alpha: f64, ln_w: f64, drop: f64) -> Vec<f64> {
    let mut shells = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    for n in 0..100_000usize {
        let l = log_sum_exp((0..=n).map(|n1| ln_coeff_bound(n1, n - n1, t, r, alpha))) + n as f64 * ln_w;
        shells.push(l);
        peak = peak.max(l);
        if n > MAX_ORDER + 2 && l < peak - drop && l < shells[n - 1] {
            break;
        }
    }
    shells
}

/// `ln Σ_{n > order} shell(n)` from log shells; `-∞` for an empty tail.
fn log_tail(shells: &[f64], order: usize) -> f64 {
    log_sum_exp(shells.iter().skip(order + 1).copied())
}

/// Smallest `N` with `Σ_{n1+n2>N} coeff_bound · (eB)^{n1+n2} < tol`.
pub fn truncation_order(t: f64, r: f64, alpha: f64, b: f64, tol: f64) -> Result<usize> {
    if !(b >= 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("truncation_order needs B ≥ 0 and tol > 0, got {b}, {tol}")));
    }
    if b == 0.0 {
        return Ok(0);
    }
    let shells = log_shells(t, r, alpha, (E * b).ln(), 50.0 - tol.ln().min(0.0));
    let ln_tol = tol.ln();
    (0..=MAX_ORDER)
        .find(|&n| log_tail(&shells, n) < ln_tol)
        .ok_or(Error::TailBoundUnsatisfiable { tol, cap: MAX_ORDER as f64 })
}

/// `A (eB)^{n1+n2}`, the bound on `|∂^{n1+n2} F(0)|` for `|F(z)| ≤ A e^{B|z|}`.
pub fn derivative_bound(a: f64, b: f64, n1: usize, n2: usize) -> f64 {
    a * (E * b).powi((n1 + n2) as i32)
}

fn mittag_leffler_argument(t: f64, alpha: f64, b: f64) -> f64 {
    4.0 * E * b * t.sqrt() / (2.0 * alpha).sin().sqrt()
}

/// `C(t,x) = 8π²/sin 2α · e^{9r²/(2t sin 2α)} · E_{1/2,1/2}(4eB√t/√sin 2α)²`.
pub fn continuity_constant(t: f64, r: f64, alpha: f64, b: f64) -> Result<f64> {
    if !(t > 0.0) || !(r >= 0.0) || !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!("continuity_constant needs t > 0, r, B ≥ 0; got {t}, {r}, {b}")));
    }
    let s2 = (2.0 * alpha).sin();
    let ml = mittag_leffler_half(mittag_leffler_argument(t, alpha, b))?;
    let c = 8.0 * PI * PI / s2 * (9.0 * r * r / (2.0 * t * s2)).exp() * ml * ml;
    if c.is_finite() {
        Ok(c)
    } else {
        Err(Error::Overflow { what: "continuity_constant" })
    }
}

/// `ln C(t,x)`, finite wherever [`continuity_constant`] overflows.
pub fn ln_continuity_constant(t: f64, r: f64, alpha: f64, b: f64) -> Result<f64> {
    if !(t > 0.0) || !(r >= 0.0) || !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!("continuity_constant needs t > 0, r, B ≥ 0; got {t}, {r}, {b}")));
    }
    let s2 = (2.0 * alpha).sin();
    let ml = ln_mittag_leffler_half(mittag_leffler_argument(t, alpha, b))?;
    Ok((8.0 * PI * PI / s2).ln() + 9.0 * r * r / (2.0 * t * s2) + 2.0 * ml)
}

/// Builds all `c_{n1,n2}` with `n1 + n2 ≤ order` from one node set.
pub fn build_table(
    kind: BoundaryKind,
    t: TimeParameter,
    x: PolarPoint,
    order: usize,
    spec: &QuadratureSpec,
) -> Result<CoeffTable> {
    if order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("table order {order} exceeds {MAX_ORDER}")));
    }
    let nodes = table_nodes(kind, t, x, spec)?;
    let rows: Vec<Vec<Complex64>> = (0..nodes.n_rho)
        .into_par_iter()
        .map(|row| row_moments(&nodes, row, order))
        .collect();
    let mut acc = vec![ComplexSum::new(); graded_len(order)];
    for row in &rows {
        for (a, v) in acc.iter_mut().zip(row) {
            a.add(*v);
        }
    }
    let (tt, r) = (t.get(), x.r);
    let mut c = Vec::with_capacity(order + 1);
    let mut bound = Vec::with_capacity(order + 1);
    for n1 in 0..=order {
        c.push((0..=order - n1).map(|n2| acc[graded_index(n1, n2)].value()).collect::<Vec<_>>());
        bound.push((0..=order - n1).map(|n2| coeff_bound(n1, n2, tt, r, spec.alpha)).collect::<Vec<_>>());
    }
    let tail_bound = log_tail(&log_shells(tt, r, spec.alpha, 0.0, 60.0), order).exp();
    Ok(CoeffTable {
        kind,
        t: tt,
        x,
        alpha: spec.alpha,
        order,
        rho_max: nodes.rho_max,
        tail_bound,
        c,
        bound,
    })
}

impl CoeffTable {
    pub fn get(&self, n1: usize, n2: usize) -> Option<Complex64> {
        self.c.get(n1).and_then(|row| row.get(n2)).copied()
    }

    pub fn bound(&self, n1: usize, n2: usize) -> Option<f64> {
        self.bound.get(n1).and_then(|row| row.get(n2)).copied()
    }

    /// `(n1, n2, c, bound)` in graded order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64, f64)> + '_ {
        (0..=self.order).flat_map(move |n| {
            (0..=n).map(move |n1| (n1, n - n1, self.c[n1][n - n1], self.bound[n1][n - n1]))
        })
    }

    /// `Σ_{n > N} Σ_{n1+n2=n} coeff_bound · |k|^n`, bounding the truncation
    /// error of [`CoeffTable::apply_plane_wave`].
    pub fn tail_bound_for(&self, kabs: f64) -> f64 {
        if kabs == 0.0 {
            return 0.0;
        }
        log_tail(&log_shells(self.t, self.x.r, self.alpha, kabs.ln(), 60.0), self.order).exp()
    }

    /// `Σ c_{n1,n2} n1! n2! f[n1][n2]`; coefficients beyond the table order
    /// are dropped.
    pub fn apply_taylor(&self, f: &TaylorField) -> Complex64 {
        let mut acc = ComplexSum::new();
        for n in 0..=self.order {
            for n1 in 0..=n {
                let n2 = n - n1;
                let fc = f.coeff(n1, n2);
                if fc == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let fact: f64 = (1..=n1).chain(1..=n2).map(|k| k as f64).product();
                acc.add(self.c[n1][n2] * fc * fact);
            }
        }
        acc.value()
    }

    /// `Σ c_{n1,n2} (ik1)^{n1} (ik2)^{n2}`, truncated at the table order.
    pub fn apply_plane_wave(&self, k: C2) -> Complex64 {
        let i = Complex64::i();
        let mut p1 = vec![Complex64::new(1.0, 0.0); self.order + 1];
        let mut p2 = p1.clone();
        for n in 1..=self.order {
            p1[n] = p1[n - 1] * i * k[0];
            p2[n] = p2[n - 1] * i * k[1];
        }
        let mut acc = ComplexSum::new();
        for n in 0..=self.order {
            for n1 in 0..=n {
                acc.add(self.c[n1][n - n1] * p1[n1] * p2[n - n1]);
            }
        }
        acc.value()
    }

    /// [`CoeffTable::apply_plane_wave`] that refuses when the truncation tail
    /// bound at `|k|` exceeds `tol`.
    pub fn apply_plane_wave_checked(&self, k: C2, tol: f64) -> Result<Complex64> {
        let tail = self.tail_bound_for(k[0].norm().hypot(k[1].norm()));
        if tail > tol {
            return Err(Error::TruncationInsufficient { tail_bound: tail, tol });
        }
        Ok(self.apply_plane_wave(k))
    }
}
