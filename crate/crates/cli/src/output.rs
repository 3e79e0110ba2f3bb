//! CSV and PGM writers.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// `%.17g`: shortest-form general notation with 17 significant digits.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes to `<path>.partial` and renames on [`Staged::commit`]; dropping
/// without commit removes the partial file.
pub struct Staged {
    tmp: PathBuf,
    dest: PathBuf,
    committed: bool,
}

impl Staged {
    pub fn new(dest: &Path) -> Self {
        let mut name = dest.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".partial");
        Self { tmp: dest.with_file_name(name), dest: dest.to_path_buf(), committed: false }
    }

    pub fn path(&self) -> &Path {
        &self.tmp
    }

    pub fn commit(mut self) -> io::Result<()> {
        fs::rename(&self.tmp, &self.dest)?;
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staged {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_file(&self.tmp);
        }
    }
}

/// Header line then one line per row; `None` cells are left empty.
pub fn write_csv<W: Write>(mut w: W, header: &[&str], rows: &[Vec<Option<f64>>]) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.map(format_g17).unwrap_or_default()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

pub fn write_csv_file(path: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> io::Result<()> {
    write_csv(BufWriter::new(File::create(path)?), header, rows)
}

/// Binary 16-bit PGM of `values` (row-major, `None` on the barrier).
///
/// Finite values map linearly onto `[0, 1]` over their min and max, then to
/// `round(65535 u^{1/gamma})`. A field whose spread is below `1e-9` of its
/// magnitude counts as constant and maps to 65535. `None` is 0.
const FLAT_SPREAD: f64 = 1e-9;

pub fn write_pgm<W: Write>(mut w: W, width: usize, values: &[Option<f64>], gamma: f64) -> io::Result<()> {
    if width == 0 || !values.len().is_multiple_of(width) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "grid is not rectangular"));
    }
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "non-finite value in heatmap"));
    }
    let height = values.len() / width;
    let (lo, hi) = values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let flat = hi - lo <= FLAT_SPREAD * lo.abs().max(hi.abs());
    write!(w, "P5\n{width} {height}\n65535\n")?;
    let mut buf = Vec::with_capacity(2 * values.len());
    for v in values {
        let level: u16 = match v {
            None => 0,
            Some(_) if flat => u16::MAX,
            Some(v) => {
                let u = ((v - lo) / (hi - lo)).clamp(0.0, 1.0).powf(1.0 / gamma);
                (u * 65535.0).round() as u16
            }
        };
        buf.extend_from_slice(&level.to_be_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}

pub fn write_pgm_file(path: &Path, width: usize, values: &[Option<f64>], gamma: f64) -> io::Result<()> {
    write_pgm(BufWriter::new(File::create(path)?), width, values, gamma)
}
