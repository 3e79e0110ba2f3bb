use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use supershift_core::evolve::psi_fresnel;
use supershift_core::geometry::to_polar;
use supershift_core::greens::greens;
use supershift_core::operator::{build_table, truncation_order, MAX_ORDER};
use supershift_core::superosc::supershift_experiment;
use supershift_core::{CartesianPoint, Complex64, Error, InitialDatum, PolarPoint, TaylorField, TimeParameter};

use crate::config::{Component, Datum, Method, RunConfig};
use crate::output::{write_csv, write_csv_file, write_pgm_file, Staged};
use crate::CliError;

pub const FIELD_HEADER: &[&str] = &["x1", "x2", "re", "im", "abs"];
pub const SUPERSHIFT_HEADER: &[&str] = &["n", "re_psi", "im_psi", "re_target", "im_target", "error", "a1_dist", "bound"];
pub const COEFFS_HEADER: &[&str] = &["n1", "n2", "re", "im", "abs", "bound"];
pub const GREENS_HEADER: &[&str] = &["x1", "x2", "y1", "y2", "re", "im", "abs"];

fn initial_datum(d: Datum) -> InitialDatum {
    match d {
        Datum::PlaneWave([k1, k2]) => InitialDatum::plane_wave(k1, k2),
        Datum::Monomial(n1, n2) => InitialDatum::Taylor(TaylorField::monomial(n1, n2, Complex64::new(1.0, 0.0))),
        Datum::Constant(c) => InitialDatum::Taylor(TaylorField::monomial(0, 0, Complex64::new(c, 0.0))),
    }
}

/// Operator order used for a datum: its degree, or the truncation order for
/// a plane wave (capped at [`MAX_ORDER`] when the tail bound cannot be met).
fn operator_order(cfg: &RunConfig, x: PolarPoint, d: Datum) -> Result<usize, Error> {
    match d {
        Datum::PlaneWave(k) => {
            match truncation_order(cfg.t, x.r, cfg.quadrature.alpha, k[0].hypot(k[1]), cfg.quadrature.tol) {
                Err(Error::TailBoundUnsatisfiable { .. }) => Ok(MAX_ORDER),
                other => other,
            }
        }
        Datum::Monomial(n1, n2) => Ok(n1 + n2),
        Datum::Constant(_) => Ok(0),
    }
}

/// Ψ at one point of Ω by the configured method.
pub fn psi_at(cfg: &RunConfig, x: PolarPoint) -> Result<Complex64, Error> {
    let t = TimeParameter::new(cfg.t)?;
    let d = cfg.datum.ok_or_else(|| Error::InvalidParameter("no initial datum".into()))?;
    let datum = initial_datum(d);
    match cfg.method {
        Method::Quadrature => Ok(psi_fresnel(cfg.kind, t, x, &datum, &cfg.quadrature)?.value),
        Method::Operator => {
            let table = build_table(cfg.kind, t, x, operator_order(cfg, x, d)?, &cfg.quadrature)?;
            Ok(match &datum {
                InitialDatum::PlaneWave { k } => table.apply_plane_wave(*k),
                InitialDatum::Taylor(f) => table.apply_taylor(f),
                InitialDatum::Discrete(_) => unreachable!("the cli builds no discrete data"),
            })
        }
    }
}

/// Samples in row-major order, top row at the largest `x2`; `None` on Γ.
pub fn compute_field(cfg: &RunConfig) -> Result<Vec<(CartesianPoint, Option<Complex64>)>, CliError> {
    let grid = cfg.grid.ok_or_else(|| CliError::Usage("field needs --grid".into()))?;
    let points: Vec<CartesianPoint> = (0..grid.x2.count)
        .flat_map(|j| {
            let x2 = grid.x2.value(grid.x2.count - 1 - j);
            (0..grid.x1.count).map(move |i| CartesianPoint::new(grid.x1.value(i), x2))
        })
        .collect();
    points
        .par_iter()
        .map(|&p| match to_polar(p) {
            Err(_) => Ok((p, None)),
            Ok(x) => psi_at(cfg, x)
                .map(|v| (p, Some(v)))
                .map_err(|e| CliError::Run(format!("at ({}, {}): {e}", p.x1, p.x2))),
        })
        .collect()
}

fn component(v: Complex64, c: Component) -> f64 {
    match c {
        Component::Re => v.re,
        Component::Im => v.im,
        Component::Abs => v.norm(),
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Run(format!("writing {}: {e}", path.display()))
}

pub fn run_field(cfg: &RunConfig) -> Result<(), CliError> {
    let samples = compute_field(cfg)?;
    let rows: Vec<Vec<Option<f64>>> = samples
        .iter()
        .map(|(p, v)| {
            let mut row = vec![Some(p.x1), Some(p.x2)];
            match v {
                Some(v) => row.extend([Some(v.re), Some(v.im), Some(v.norm())]),
                None => row.extend([None, None, None]),
            }
            row
        })
        .collect();
    let csv_path = cfg.csv.as_deref().ok_or_else(|| CliError::Usage("field needs --out".into()))?;
    let csv = Staged::new(csv_path);
    write_csv_file(csv.path(), FIELD_HEADER, &rows).map_err(io_err(csv_path))?;
    let pgm = match cfg.pgm.as_deref() {
        Some(path) => {
            let staged = Staged::new(path);
            let width = cfg.grid.map(|g| g.x1.count).unwrap_or(1);
            let values: Vec<Option<f64>> = samples.iter().map(|(_, v)| v.map(|v| component(v, cfg.component))).collect();
            write_pgm_file(staged.path(), width, &values, cfg.gamma).map_err(io_err(path))?;
            Some(staged)
        }
        None => None,
    };
    csv.commit().map_err(io_err(csv_path))?;
    if let Some(p) = pgm {
        p.commit().map_err(io_err(cfg.pgm.as_deref().unwrap_or(csv_path)))?;
    }
    Ok(())
}

fn emit(cfg: &RunConfig, header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<(), CliError> {
    match cfg.csv.as_deref() {
        Some(path) => {
            let staged = Staged::new(path);
            write_csv_file(staged.path(), header, rows).map_err(io_err(path))?;
            staged.commit().map_err(io_err(path))
        }
        None => write_csv(io::stdout().lock(), header, rows).map_err(|e| CliError::Run(format!("stdout: {e}"))),
    }
}

fn polar_arg(p: Option<CartesianPoint>, name: &str) -> Result<PolarPoint, CliError> {
    let p = p.ok_or_else(|| CliError::Usage(format!("missing --{name}")))?;
    to_polar(p).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

pub fn run_coeffs(cfg: &RunConfig) -> Result<(), CliError> {
    let x = polar_arg(cfg.x, "x")?;
    let table = build_table(cfg.kind, TimeParameter::new(cfg.t)?, x, cfg.order, &cfg.quadrature)?;
    let rows: Vec<Vec<Option<f64>>> = table
        .entries()
        .map(|(n1, n2, c, b)| vec![Some(n1 as f64), Some(n2 as f64), Some(c.re), Some(c.im), Some(c.norm()), Some(b)])
        .collect();
    emit(cfg, COEFFS_HEADER, &rows)
}

pub fn run_greens(cfg: &RunConfig) -> Result<(), CliError> {
    let x = polar_arg(cfg.x, "x")?;
    let y = polar_arg(cfg.y, "y")?;
    let g = greens(cfg.kind, TimeParameter::new(cfg.t)?, x, y);
    let (xc, yc) = (cfg.x.unwrap_or(CartesianPoint::new(0.0, 0.0)), cfg.y.unwrap_or(CartesianPoint::new(0.0, 0.0)));
    emit(cfg, GREENS_HEADER, &[vec![Some(xc.x1), Some(xc.x2), Some(yc.x1), Some(yc.x2), Some(g.re), Some(g.im), Some(g.norm())]])
}

pub fn run_supershift(cfg: &RunConfig) -> Result<(), CliError> {
    let x = polar_arg(Some(cfg.x.unwrap_or(CartesianPoint::new(0.0, 1.0))), "x")?;
    let report = supershift_experiment(
        cfg.kind,
        TimeParameter::new(cfg.t)?,
        x,
        cfg.a,
        cfg.p1,
        cfg.p2,
        &cfg.n_list,
        &cfg.quadrature,
    )?;
    if report.order_capped {
        eprintln!("note: operator order capped at {}; the tail bound does not reach tol", report.order);
    }
    eprintln!("note: a1_dist is a grid under-estimate of the weighted distance");
    let rows: Vec<Vec<Option<f64>>> = report
        .rows
        .iter()
        .map(|r| {
            [r.n as f64, r.psi_n.re, r.psi_n.im, r.psi_target.re, r.psi_target.im, r.error, r.a1_dist, r.bound]
                .into_iter()
                .map(Some)
                .collect()
        })
        .collect();
    emit(cfg, SUPERSHIFT_HEADER, &rows)?;
    io::stderr().flush().ok();
    Ok(())
}
