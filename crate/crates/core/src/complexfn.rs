//! Special functions: the Faddeeva function `w`, the scaled complementary
//! error function `Λ(z) = e^{z²} erfc(z) = w(iz)`, the real Gamma function and
//! the Mittag-Leffler function `E_{1/2,1/2}`.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::{CompensatedSum, ComplexSum};

/// 2/√π
pub const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
/// 1/√π
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Faddeeva function `w(z) = e^{-z²} erfc(-iz)`.
///
/// Poppe & Wijers (ACM TOMS 680): power series of `erf` near the origin, the
/// Laplace continued fraction far out, and in between a Taylor expansion
/// whose derivatives come from the continued fraction. The other quadrants
/// follow from `w(-z) = 2e^{-z²} - w(z)` and `w(-z̄) = conj(w(z))`.
pub fn faddeeva_w(z: Complex64) -> Complex64 {
    let (xi, yi) = (z.re, z.im);
    let xabs = xi.abs();
    let yabs = yi.abs();
    let x = xabs / 6.3;
    let y = yabs / 4.4;
    let mut qrho = x * x + y * y;

    let xquad0 = xabs * xabs - yabs * yabs;
    let yquad = 2.0 * xabs * yabs;
    let near_origin = qrho < 0.085264;

    let (mut u, mut v);
    // e^{-z²} at z = |x| + i|y|; only used by the series branch
    let (mut u2, mut v2) = (0.0, 0.0);

    if near_origin {
        qrho = (1.0 - 0.85 * y) * qrho.sqrt();
        let n = (6.0 + 72.0 * qrho).round() as i32;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = i as f64;
            let xaux = (xsum * xquad0 - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad0) / fi;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * yabs + ysum * xabs) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xabs - ysum * yabs);
        let daux = (-xquad0).exp();
        u2 = daux * yquad.cos();
        v2 = -daux * yquad.sin();
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        let (h, kapn, nu);
        if qrho > 1.0 {
            h = 0.0;
            kapn = 0;
            qrho = qrho.sqrt();
            nu = (3.0 + 1442.0 / (26.0 * qrho + 77.0)) as i32;
        } else {
            qrho = (1.0 - y) * (1.0 - qrho).sqrt();
            h = 1.88 * qrho;
            kapn = (7.0 + 34.0 * qrho).round() as i32;
            nu = (16.0 + 26.0 * qrho).round() as i32;
        }
        let h2 = 2.0 * h;
        let mut qlambda = if h > 0.0 { h2.powi(kapn) } else { 0.0 };

        let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = yabs + h + np1 * rx;
            let ty = xabs - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if h > 0.0 && n <= kapn {
                let tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if h == 0.0 {
            u = TWO_OVER_SQRT_PI * rx;
            v = TWO_OVER_SQRT_PI * ry;
        } else {
            u = TWO_OVER_SQRT_PI * sx;
            v = TWO_OVER_SQRT_PI * sy;
        }
        if yabs == 0.0 {
            u = (-xabs * xabs).exp();
        }
    }

    if yi < 0.0 {
        if near_origin {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            let w1 = 2.0 * (-xquad0).exp();
            u2 = w1 * yquad.cos();
            v2 = -w1 * yquad.sin();
        }
        u = u2 - u;
        v = v2 - v;
        if xi > 0.0 {
            v = -v;
        }
    } else if xi < 0.0 {
        v = -v;
    }
    Complex64::new(u, v)
}

/// `Λ(z) = 2/√π ∫₀^∞ e^{-s²-2zs} ds = e^{z²} erfc(z)`.
#[inline]
pub fn lambda(z: Complex64) -> Complex64 {
    faddeeva_w(Complex64::new(-z.im, z.re))
}

/// `e^{shift} Λ(z)` without forming `e^{z²}` on its own.
///
/// For `Re z < 0` the reflection `Λ(z) = 2e^{z²} - Λ(-z)` is applied and the
/// exponents are combined, so large but mutually cancelling exponents in the
/// Green's functions never overflow.
#[inline]
pub fn scaled_lambda(z: Complex64, shift: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        shift.exp() * lambda(z)
    } else {
        2.0 * (shift + z * z).exp() - shift.exp() * lambda(-z)
    }
}

const REFERENCE_MAX_DEPTH: u32 = 48;

/// Direct adaptive quadrature of the defining integral of `Λ`; test oracle.
///
/// Requires `Re z ≥ 0`. The half-line is cut where the Gaussian tail drops
/// below `tol/10`, and intervals are halved until an 8-point Gauss rule
/// agrees with its two half-interval refinements.
pub fn lambda_reference(z: Complex64, tol: f64) -> Result<Complex64> {
    if !(z.re >= 0.0) || !z.im.is_finite() {
        return Err(Error::Domain {
            what: "lambda_reference requires Re z >= 0",
            value: z.re,
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    // ∫_S^∞ e^{-s²} ds ≤ e^{-S²}/(2S)
    let mut upper = 1.0_f64;
    while (-upper * upper).exp() / (2.0 * upper) * TWO_OVER_SQRT_PI > 0.1 * tol {
        upper += 0.25;
    }
    let rule = GaussLegendre::new(8.try_into().unwrap());
    let f = |s: f64| TWO_OVER_SQRT_PI * (Complex64::new(-s * s, 0.0) - 2.0 * z * s).exp();
    let gl = |a: f64, b: f64| -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        rule.nodes()
            .zip(rule.weights())
            .map(|(x, w)| f(mid + half * x) * (w * half))
            .sum()
    };

    let mut acc = ComplexSum::new();
    // explicit stack: (a, b, whole-interval estimate, local tolerance, depth)
    let mut stack = vec![(0.0, upper, gl(0.0, upper), 0.9 * tol, 0u32)];
    while let Some((a, b, whole, local_tol, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = gl(a, m);
        let right = gl(m, b);
        if (left + right - whole).norm() <= local_tol {
            acc.add(left);
            acc.add(right);
        } else if depth >= REFERENCE_MAX_DEPTH {
            return Err(Error::ToleranceNotReached {
                tol,
                depth: REFERENCE_MAX_DEPTH,
            });
        } else {
            stack.push((m, b, right, 0.5 * local_tol, depth + 1));
            stack.push((a, m, left, 0.5 * local_tol, depth + 1));
        }
    }
    Ok(acc.value())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_series(x: f64) -> f64 {
    // x already shifted by -1
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// Γ(x) for real `x ∈ [0.4, 200]`.
///
/// Values above `x ≈ 171.62` do not fit in an `f64` and are reported as
/// [`Error::Overflow`]; use [`ln_gamma`] there.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !(0.4..=200.0).contains(&x) {
        return Err(Error::Domain { what: "gamma_real", value: x });
    }
    if x > 171.624_376_956_302_7 {
        return Err(Error::Overflow { what: "gamma_real" });
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    // split the power so t^(x-1/2) does not overflow before e^{-t} shrinks it
    let half = t.powf(0.5 * (xm + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_series(xm)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (xm + 0.5) * t.ln() - t + lanczos_series(xm).ln()
}

/// Largest argument for which `E_{1/2,1/2}(x) ~ 2x e^{x²}` fits in an `f64`.
const ML_OVERFLOW_X: f64 = 26.58;

/// `E_{1/2,1/2}(x) = Σ_{n≥0} xⁿ / Γ((n+1)/2)` for `x ≥ 0`.
///
/// Terms follow the two-step recurrence `T_{n+2} = T_n x² / ((n+1)/2)`
/// from `T_0 = 1/√π`, `T_1 = x`, so no Gamma function of a large argument is
/// ever formed.
pub fn mittag_leffler_half(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { what: "mittag_leffler_half", value: x });
    }
    if x > ML_OVERFLOW_X {
        return Err(Error::Overflow { what: "mittag_leffler_half" });
    }
    Ok(mittag_leffler_series(x))
}

fn mittag_leffler_series(x: f64) -> f64 {
    let x2 = x * x;
    let peak = 2.0 * x2 + 2.0;
    let mut acc = CompensatedSum::new();
    let mut even = FRAC_1_SQRT_PI;
    let mut odd = x;
    acc.add(even);
    acc.add(odd);
    let mut n = 0usize;
    loop {
        even *= x2 / ((n as f64 + 1.0) / 2.0);
        odd *= x2 / ((n as f64 + 2.0) / 2.0);
        acc.add(even);
        acc.add(odd);
        n += 2;
        let s = acc.value();
        if (n as f64) > peak && even.abs() <= 1e-16 * s && odd.abs() <= 1e-16 * s {
            break;
        }
    }
    acc.value()
}

/// `ln E_{1/2,1/2}(x)`, finite for every finite `x ≥ 0`.
///
/// Beyond `x = 24` the identity `E_{1/2,1/2}(x) = 1/√π + x e^{x²} erfc(-x)`
/// gives `ln E = x² + ln 2x` to working precision because `erfc(x)` has
/// already underflowed.
pub fn ln_mittag_leffler_half(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { what: "ln_mittag_leffler_half", value: x });
    }
    if x <= 24.0 {
        Ok(mittag_leffler_series(x).ln())
    } else {
        Ok(x * x + (2.0 * x).ln())
    }
}
