//! Invariant suites behind `supershift validate`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use supershift_core::complexfn::{gamma_real, lambda, lambda_reference, TWO_OVER_SQRT_PI};
use supershift_core::evolve::psi_fresnel;
use supershift_core::geometry::{to_cartesian, to_polar};
use supershift_core::greens::{greens, schrodinger_residual};
use supershift_core::operator::build_table;
use supershift_core::superosc::{closed_form_fn, superosc_sequence, supershift_experiment};
use supershift_core::sum::ComplexSum;
use supershift_core::{
    BoundaryKind, CartesianPoint, Complex64, InitialDatum, PolarPoint, QuadratureSpec, Result, SuperoscParams,
    TaylorField, TimeParameter,
};

/// Deliberate defects for checking that the suites notice them.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Evaluate the Green's function with the opposite image sign.
    GreensSignFlip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub module: &'static str,
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

struct Suite {
    module: &'static str,
    name: &'static str,
    tolerance: f64,
    check: fn(Option<Fault>) -> Result<f64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Deterministic points `r e^{iθ}` on a polar lattice.
fn lattice(r_max: f64, nr: usize, nt: usize, theta: (f64, f64)) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(nr * nt);
    for i in 1..=nr {
        let r = r_max * i as f64 / nr as f64;
        for j in 0..nt {
            let th = theta.0 + (theta.1 - theta.0) * (j as f64 + 0.5) / nt as f64;
            pts.push(Complex64::from_polar(r, th));
        }
    }
    pts
}

fn eval_greens(kind: BoundaryKind, fault: Option<Fault>, t: TimeParameter, x: PolarPoint, y: PolarPoint) -> Complex64 {
    let kind = match (fault, kind) {
        (Some(Fault::GreensSignFlip), BoundaryKind::Dirichlet) => BoundaryKind::Neumann,
        (Some(Fault::GreensSignFlip), BoundaryKind::Neumann) => BoundaryKind::Dirichlet,
        (None, k) => k,
    };
    greens(kind, t, x, y)
}

fn lambda_zero(_: Option<Fault>) -> Result<f64> {
    Ok((lambda(c(0.0, 0.0)) - 1.0).norm())
}

fn lambda_reflection(_: Option<Fault>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in lattice(20.0, 40, 48, (0.0, 2.0 * PI)) {
        let two = 2.0 * (z * z).exp();
        let (a, b) = (lambda(z), lambda(-z));
        if two.norm() < 1e-6 * a.norm().max(b.norm()) {
            continue;
        }
        worst = worst.max((a + b - two).norm() / two.norm());
    }
    Ok(worst)
}

fn lambda_quadrature(_: Option<Fault>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in lattice(10.0, 8, 6, (-FRAC_PI_2, FRAC_PI_2)) {
        let v = lambda(z);
        worst = worst.max((v - lambda_reference(z, 1e-12)?).norm() / v.norm());
    }
    Ok(worst)
}

fn lambda_derivative(_: Option<Fault>) -> Result<f64> {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for z in lattice(5.0, 10, 12, (0.0, 2.0 * PI)) {
        let d = (lambda(z + h) - lambda(z - h)) / (2.0 * h);
        let want = 2.0 * z * lambda(z) - TWO_OVER_SQRT_PI;
        worst = worst.max((d - want).norm() / want.norm().max(1.0));
    }
    Ok(worst)
}

fn lambda_growth(_: Option<Fault>) -> Result<f64> {
    Ok(lattice(4.0, 40, 50, (0.0, 2.0 * PI))
        .into_iter()
        .map(|z| lambda(z).norm() / (2.0 * z.norm_sqr().exp()))
        .fold(0.0, f64::max))
}

fn gamma_recurrence(_: Option<Fault>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..=400 {
        let x = 0.5 + 99.5 * i as f64 / 400.0;
        let (a, b) = (gamma_real(x + 1.0)?, x * gamma_real(x)?);
        worst = worst.max((a - b).abs() / a);
    }
    Ok(worst)
}

fn polar_roundtrip(_: Option<Fault>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 1..=20 {
        for j in 1..40 {
            let q = PolarPoint::new(0.15 * i as f64, -FRAC_PI_2 + 2.0 * PI * j as f64 / 40.0)?;
            let back = to_polar(to_cartesian(q))?;
            worst = worst.max((back.r - q.r).abs() / q.r).max((back.phi - q.phi).abs() / q.phi.abs().max(1.0));
        }
    }
    Ok(worst)
}

fn greens_symmetry(fault: Option<Fault>) -> Result<f64> {
    let t = TimeParameter::new(0.7)?;
    let (x, y) = (PolarPoint::new(1.0, 0.3)?, PolarPoint::new(2.0, 3.9)?);
    let mut worst: f64 = 0.0;
    for kind in BoundaryKind::ALL {
        let (a, b) = (eval_greens(kind, fault, t, x, y), eval_greens(kind, fault, t, y, x));
        worst = worst.max((a - b).norm() / a.norm());
    }
    Ok(worst)
}

fn dirichlet_barrier(fault: Option<Fault>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for tt in [0.5, 1.0, 2.0] {
        let t = TimeParameter::new(tt)?;
        for y in [PolarPoint::new(1.0, 0.5)?, PolarPoint::new(1.5, 3.0)?] {
            for r in [0.5, 1.0, 2.0] {
                for phi in [-FRAC_PI_2, 1.5 * PI] {
                    let g = eval_greens(BoundaryKind::Dirichlet, fault, t, PolarPoint { r, phi }, y);
                    worst = worst.max(g.norm() * 8.0 * PI * tt);
                }
            }
        }
    }
    Ok(worst)
}

fn neumann_barrier(fault: Option<Fault>) -> Result<f64> {
    let h = 1e-4;
    let t = TimeParameter::new(1.0)?;
    let y = PolarPoint::new(1.5, 0.4)?;
    let mut worst: f64 = 0.0;
    for x2 in [-0.5f64, -1.0, -2.0] {
        for (side, face) in [(1.0, -FRAC_PI_2), (-1.0, 1.5 * PI)] {
            let g = |x1: f64| -> Result<Complex64> {
                let p = if x1 == 0.0 { PolarPoint { r: -x2, phi: face } } else { to_polar(CartesianPoint::new(x1, x2))? };
                Ok(eval_greens(BoundaryKind::Neumann, fault, t, p, y))
            };
            let d = (-3.0 * g(0.0)? + 4.0 * g(side * h)? - g(2.0 * side * h)?) / (2.0 * h);
            let scale = g(0.0)?.norm().max(1e-300);
            worst = worst.max(d.norm() / scale);
        }
    }
    Ok(worst)
}

fn schrodinger(_: Option<Fault>) -> Result<f64> {
    let x = CartesianPoint::new(1.0, 1.0);
    let y = PolarPoint::new(1.5, 0.4)?;
    let t = TimeParameter::new(1.0)?;
    let mut worst: f64 = 0.0;
    for kind in BoundaryKind::ALL {
        let r1 = schrodinger_residual(kind, t, x, y, 1e-3)?;
        let r2 = schrodinger_residual(kind, t, x, y, 5e-4)?;
        // a residual that does not fall like h² counts as a failure
        worst = worst.max(if r1 / r2 > 3.5 { r1 } else { f64::INFINITY });
    }
    Ok(worst)
}

fn stationary(_: Option<Fault>) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let one = Complex64::new(1.0, 0.0);
    let mut worst: f64 = 0.0;
    for (tt, x) in [(0.5, PolarPoint::new(1.0, FRAC_PI_2)?), (2.0, PolarPoint::new(0.7, 3.5)?)] {
        let t = TimeParameter::new(tt)?;
        let cases = [
            (BoundaryKind::Neumann, TaylorField::monomial(0, 0, one), one),
            (BoundaryKind::Neumann, TaylorField::monomial(0, 1, one), c(x.x2(), 0.0)),
            (BoundaryKind::Dirichlet, TaylorField::monomial(1, 0, one), c(x.x1(), 0.0)),
            (BoundaryKind::Dirichlet, TaylorField::monomial(1, 1, one), c(x.x1() * x.x2(), 0.0)),
        ];
        for (kind, f, want) in cases {
            let got = psi_fresnel(kind, t, x, &InitialDatum::Taylor(f), &spec)?.value;
            worst = worst.max((got - want).norm());
        }
    }
    Ok(worst)
}

fn linearity(_: Option<Fault>) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let (t, x) = (TimeParameter::new(1.0)?, PolarPoint::new(1.2, 2.0)?);
    let (a, b) = (c(0.3, -1.1), c(2.0, 0.5));
    let one = c(1.0, 0.0);
    let f = InitialDatum::Taylor(TaylorField::monomial(1, 0, one));
    let g = InitialDatum::Taylor(TaylorField::monomial(0, 2, one));
    let zero = c(0.0, 0.0);
    let combined = InitialDatum::Taylor(TaylorField::new(vec![vec![zero, zero, b], vec![a]]));
    let mut worst: f64 = 0.0;
    for kind in BoundaryKind::ALL {
        let pf = psi_fresnel(kind, t, x, &f, &spec)?.value;
        let pg = psi_fresnel(kind, t, x, &g, &spec)?.value;
        let got = psi_fresnel(kind, t, x, &combined, &spec)?.value;
        let want = a * pf + b * pg;
        worst = worst.max((got - want).norm() / want.norm());
    }
    Ok(worst)
}

fn coefficient_bound(_: Option<Fault>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (tt, x, alpha) in [(0.5, PolarPoint::new(1.0, FRAC_PI_2)?, FRAC_PI_4), (2.0, PolarPoint::new(2.0, 2.5)?, 1.1)] {
        for kind in BoundaryKind::ALL {
            let spec = QuadratureSpec::default().with_alpha(alpha);
            let table = build_table(kind, TimeParameter::new(tt)?, x, 10, &spec)?;
            for (_, _, c, b) in table.entries() {
                worst = worst.max(c.norm() / b);
            }
        }
    }
    Ok(worst)
}

fn representation(_: Option<Fault>) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let (t, x) = (TimeParameter::new(1.0)?, PolarPoint::new(0.7, -0.3)?);
    let mut worst: f64 = 0.0;
    for kind in BoundaryKind::ALL {
        let table = build_table(kind, t, x, 40, &spec)?;
        for k in [[0.6, -0.8], [1.2, 0.0]] {
            let op = table.apply_plane_wave([c(k[0], 0.0), c(k[1], 0.0)]);
            let q = psi_fresnel(kind, t, x, &InitialDatum::plane_wave(k[0], k[1]), &spec)?.value;
            worst = worst.max((op - q).norm() / q.norm().max(1.0));
        }
    }
    Ok(worst)
}

fn superosc_weights(_: Option<Fault>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for a in [1.5, 2.0, 3.0] {
        for n in 1..=24 {
            let s = superosc_sequence(&SuperoscParams::new(a, 1, 1, n)?)?;
            let total: ComplexSum = s.atoms.iter().map(|atom| atom.weight).collect();
            worst = worst.max((total.value() - 1.0).norm());
        }
    }
    Ok(worst)
}

fn superosc_closed_form(_: Option<Fault>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in [1, 4, 9, 16] {
        let p = SuperoscParams::new(2.0, 1, 1, n)?;
        let s = superosc_sequence(&p)?;
        for z1 in lattice(1.4, 3, 4, (0.0, 2.0 * PI)) {
            for z2 in lattice(1.4, 2, 3, (0.3, 2.0 * PI + 0.3)) {
                let want = closed_form_fn(&p, [z1, z2])?;
                worst = worst.max((s.eval([z1, z2]) - want).norm() / want.norm());
            }
        }
    }
    Ok(worst)
}

fn supershift_bound(_: Option<Fault>) -> Result<f64> {
    let (t, x) = (TimeParameter::new(1.0)?, PolarPoint::new(1.0, FRAC_PI_2)?);
    let report = supershift_experiment(BoundaryKind::Neumann, t, x, 2.0, 1, 1, &[4, 8], &QuadratureSpec::default())?;
    Ok(report.rows.iter().map(|r| if r.bound.is_infinite() { 0.0 } else { r.error / r.bound }).fold(0.0, f64::max))
}

const SUITES: &[Suite] = &[
    Suite { module: "complexfn", name: "lambda-zero", tolerance: 1e-15, check: lambda_zero },
    Suite { module: "complexfn", name: "lambda-reflection", tolerance: 1e-9, check: lambda_reflection },
    Suite { module: "complexfn", name: "lambda-quadrature", tolerance: 1e-10, check: lambda_quadrature },
    Suite { module: "complexfn", name: "lambda-derivative", tolerance: 1e-6, check: lambda_derivative },
    Suite { module: "complexfn", name: "lambda-growth", tolerance: 1.0, check: lambda_growth },
    Suite { module: "complexfn", name: "gamma-recurrence", tolerance: 1e-11, check: gamma_recurrence },
    Suite { module: "geometry", name: "polar-roundtrip", tolerance: 1e-14, check: polar_roundtrip },
    Suite { module: "greens", name: "symmetry", tolerance: 1e-12, check: greens_symmetry },
    Suite { module: "greens", name: "dirichlet-barrier", tolerance: 1e-12, check: dirichlet_barrier },
    Suite { module: "greens", name: "neumann-barrier", tolerance: 1e-5, check: neumann_barrier },
    Suite { module: "greens", name: "schrodinger-residual", tolerance: 1e-4, check: schrodinger },
    Suite { module: "evolve", name: "stationary-solutions", tolerance: 1e-5, check: stationary },
    Suite { module: "evolve", name: "linearity", tolerance: 1e-10, check: linearity },
    Suite { module: "operator", name: "coefficient-bound", tolerance: 1.0, check: coefficient_bound },
    Suite { module: "operator", name: "representation", tolerance: 1e-5, check: representation },
    Suite { module: "superosc", name: "weights-sum", tolerance: 1e-12, check: superosc_weights },
    Suite { module: "superosc", name: "closed-form", tolerance: 1e-8, check: superosc_closed_form },
    Suite { module: "superosc", name: "supershift-bound", tolerance: 1.0, check: supershift_bound },
];

/// Runs every suite; `fault` is for exercising the suites themselves.
#[doc(hidden)]
pub fn run_suites(fault: Option<Fault>) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|s| {
            let (max_residual, passed) = match (s.check)(fault) {
                Ok(v) => (v, v <= s.tolerance),
                Err(_) => (f64::NAN, false),
            };
            SuiteReport { module: s.module, name: s.name, max_residual, tolerance: s.tolerance, passed }
        })
        .collect()
}

pub fn format_report(reports: &[SuiteReport]) -> String {
    let mut out = format!("{:<10} {:<22} {:>12} {:>10}  result\n", "module", "suite", "max_resid", "tol");
    for r in reports {
        out.push_str(&format!(
            "{:<10} {:<22} {:>12.3e} {:>10.1e}  {}\n",
            r.module,
            r.name,
            r.max_residual,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        ));
    }
    out
}
