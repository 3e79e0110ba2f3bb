//! Superoscillating sequences and the supershift experiment.
//!
//! `F_n(z) = Σ_j C_j(n) e^{i(k_j^{p1} z1 + k_j^{p2} z2)}` with
//! `C_j(n) = binom(n,j) ((1+a)/2)^{n-j} ((1-a)/2)^j` and `k_j = 1 - 2j/n`.
//! Every frequency lies in `[-1, 1]` while `F_n → e^{i(a^{p1} z1 + a^{p2} z2)}`.
//!
//! The weights grow like `a^n` in total variation while `F_n` stays `O(1)`,
//! so evaluating the atom sum in double precision loses about `n log10 a`
//! digits.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::{Atom, DiscreteSuperposition, QuadratureSpec};
use crate::geometry::PolarPoint;
use crate::greens::{BoundaryKind, TimeParameter};
use crate::operator::{build_table, ln_continuity_constant, truncation_order, MAX_ORDER};
use crate::sum::ComplexSum;
use crate::C2;

/// Largest coefficient magnitude accepted by [`superosc_sequence`].
pub const MAX_COEFFICIENT: f64 = 1e280;
/// Decimal digits carried by an `f64`.
pub const AVAILABLE_DIGITS: f64 = 15.65;
/// Digits that must survive cancellation in the atom sum.
pub const REQUIRED_DIGITS: f64 = 8.0;

pub const A1_RADIUS: f64 = 4.0;
pub const A1_SHELLS: usize = 16;
const A1_PHASES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperoscParams {
    pub a: f64,
    pub p1: u32,
    pub p2: u32,
    pub n: usize,
}

impl SuperoscParams {
    pub fn new(a: f64, p1: u32, p2: u32, n: usize) -> Result<Self> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::Domain { what: "superoscillation parameter a must exceed 1", value: a });
        }
        if p1 == 0 || p2 == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!("need p1, p2, n ≥ 1, got {p1}, {p2}, {n}")));
        }
        Ok(Self { a, p1, p2, n })
    }

    /// `(a^{p1}, a^{p2})`
    pub fn target(&self) -> [f64; 2] {
        [self.a.powi(self.p1 as i32), self.a.powi(self.p2 as i32)]
    }

    /// `log10 Σ|C_j(n)| = n log10 a`, the digits lost to cancellation.
    pub fn digits_lost(&self) -> f64 {
        self.n as f64 * self.a.log10()
    }

    pub fn check_precision(&self) -> Result<f64> {
        let lost = self.digits_lost();
        let max_loss = AVAILABLE_DIGITS - REQUIRED_DIGITS;
        if lost > max_loss {
            return Err(Error::PrecisionWall {
                n: self.n,
                digits_lost: lost,
                available: AVAILABLE_DIGITS,
                max_loss,
            });
        }
        Ok(lost)
    }
}

/// The atoms `(C_j(n), (k_j^{p1}, k_j^{p2}))`, `j = 0..=n`, with `k0 = √2`.
pub fn superosc_sequence(params: &SuperoscParams) -> Result<DiscreteSuperposition> {
    let SuperoscParams { a, p1, p2, n } = *params;
    let plus = 0.5 * (1.0 + a);
    let minus = 0.5 * (1.0 - a);
    let mut atoms = Vec::with_capacity(n + 1);
    let mut binom = 1.0f64;
    let mut max_c = 0.0f64;
    for j in 0..=n {
        if j > 0 {
            binom = binom * (n + 1 - j) as f64 / j as f64;
        }
        let c = binom * plus.powi((n - j) as i32) * minus.powi(j as i32);
        max_c = max_c.max(c.abs());
        let k = 1.0 - 2.0 * j as f64 / n as f64;
        atoms.push(Atom {
            weight: Complex64::new(c, 0.0),
            k: [k.powi(p1 as i32), k.powi(p2 as i32)],
        });
    }
    if !(max_c <= MAX_COEFFICIENT) {
        return Err(Error::CoefficientOverflow { n, max_coefficient: max_c });
    }
    DiscreteSuperposition::new(atoms, SQRT_2)
}

/// `(cos((z1+z2)/n) + i a sin((z1+z2)/n))^n`; only for `p1 = p2 = 1`.
pub fn closed_form_fn(params: &SuperoscParams, z: C2) -> Result<Complex64> {
    if params.p1 != 1 || params.p2 != 1 {
        return Err(Error::Domain {
            what: "closed_form_fn requires p1 = p2 = 1",
            value: params.p1.max(params.p2) as f64,
        });
    }
    let n = params.n as f64;
    let s = (z[0] + z[1]) / n;
    let base = s.cos() + Complex64::i() * params.a * s.sin();
    Ok(base.powu(params.n as u32))
}

/// Grid estimate of `sup_z |F(z) - e^{i k·z}| e^{-B|z|}` over `z ∈ ℂ²`.
///
/// Samples `z_m = r_m e^{iφ_m}` with radii on `shells + 1` equally spaced
/// shells in `[0, radius]` and 8 phases per coordinate. This is a lower
/// estimate of the true supremum.
pub fn a1_distance(f: &DiscreteSuperposition, target_k: [f64; 2], b: f64, radius: f64, shells: usize) -> f64 {
    let shells = shells.max(1);
    let mut coords = Vec::with_capacity((shells + 1) * A1_PHASES);
    for s in 0..=shells {
        let r = radius * s as f64 / shells as f64;
        if s == 0 {
            coords.push(Complex64::new(0.0, 0.0));
            continue;
        }
        for p in 0..A1_PHASES {
            coords.push(Complex64::from_polar(r, 2.0 * PI * p as f64 / A1_PHASES as f64));
        }
    }
    coords
        .par_iter()
        .map(|&z1| {
            coords
                .iter()
                .map(|&z2| {
                    let zabs = z1.norm().hypot(z2.norm());
                    let target = (Complex64::i() * (target_k[0] * z1 + target_k[1] * z2)).exp();
                    (f.eval([z1, z2]) - target).norm() * (-b * zabs).exp()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupershiftRow {
    pub n: usize,
    pub psi_n: Complex64,
    pub psi_target: Complex64,
    pub error: f64,
    /// Grid estimate of `A_n`, a lower bound of the true supremum.
    pub a1_dist: f64,
    /// `A_n C(t,x)`; `+∞` once it leaves the `f64` range.
    pub bound: f64,
    pub ln_bound: f64,
}

/// Result of [`supershift_experiment`] together with the operator order used.
#[derive(Debug, Clone, PartialEq)]
pub struct SupershiftReport {
    pub rows: Vec<SupershiftRow>,
    pub order: usize,
    /// whether `order` met the tolerance or was capped at [`MAX_ORDER`]
    pub order_capped: bool,
}

/// Propagates `F_n` for each `n` through one shared operator table.
///
/// `Ψ(F_n) = Σ_j C_j Ψ(e^{i k_j ·})` by linearity, compared against
/// `Ψ(e^{i a·})` and against the continuity bound `A_n C(t,x)` with `B`
/// set to `|(a^{p1}, a^{p2})|`.
#[allow(clippy::too_many_arguments)]
pub fn supershift_experiment(
    kind: BoundaryKind,
    t: TimeParameter,
    x: PolarPoint,
    a: f64,
    p1: u32,
    p2: u32,
    n_list: &[usize],
    spec: &QuadratureSpec,
) -> Result<SupershiftReport> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("n list must be strictly ascending".into()));
    }
    let params: Vec<SuperoscParams> = n_list
        .iter()
        .map(|&n| SuperoscParams::new(a, p1, p2, n))
        .collect::<Result<_>>()?;
    for p in &params {
        p.check_precision()?;
    }
    let sequences: Vec<DiscreteSuperposition> = params.iter().map(superosc_sequence).collect::<Result<_>>()?;

    let target = SuperoscParams::new(a, p1, p2, 1)?.target();
    let b = target[0].hypot(target[1]);
    let (order, order_capped) = match truncation_order(t.get(), x.r, spec.alpha, b, spec.tol) {
        Ok(n) => (n, false),
        Err(Error::TailBoundUnsatisfiable { .. }) => (MAX_ORDER, true),
        Err(e) => return Err(e),
    };
    let table = build_table(kind, t, x, order, spec)?;
    let as_k = |k: [f64; 2]| [Complex64::new(k[0], 0.0), Complex64::new(k[1], 0.0)];
    let psi_target = table.apply_plane_wave(as_k(target));
    let ln_c = ln_continuity_constant(t.get(), x.r, spec.alpha, b)?;

    let rows = sequences
        .par_iter()
        .zip(n_list.par_iter())
        .map(|(seq, &n)| {
            let mut acc = ComplexSum::new();
            for atom in &seq.atoms {
                acc.add(atom.weight * table.apply_plane_wave(as_k(atom.k)));
            }
            let psi_n = acc.value();
            let a1 = a1_distance(seq, target, b, A1_RADIUS, A1_SHELLS);
            let ln_bound = a1.ln() + ln_c;
            SupershiftRow {
                n,
                psi_n,
                psi_target,
                error: (psi_n - psi_target).norm(),
                a1_dist: a1,
                bound: ln_bound.exp(),
                ln_bound,
            }
        })
        .collect();
    Ok(SupershiftReport { rows, order, order_capped })
}
