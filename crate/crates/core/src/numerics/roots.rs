//! Brent's method with a guaranteed bisection fallback.

use super::ToleranceConfig;
use crate::error::{Error, Result};

/// Root of `f` in `[a, b]`, given `f(a) f(b) < 0`.
///
/// Stops when `|f(x)| <= abs_tol` or the bracket is narrower than
/// `rel_tol |x|` (plus a few ulps). Each step either takes Brent's
/// interpolation step or bisects, so the bracket halves at least every
/// other iteration. A sign change whose `|f|` grows while the bracket
/// shrinks is reported as [`Error::Pole`].
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: (f64, f64),
    tol: &ToleranceConfig,
) -> Result<f64> {
    tol.validate()?;
    let (mut a, mut b) = bracket;
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(Error::InvalidArgument(format!(
            "bracket [{a}, {b}] must be finite and non-degenerate"
        )));
    }
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket { a, b, fa, fb });
    }
    let edge_scale = fa.abs().max(fb.abs());

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.rel_tol * b.abs();
        let xm = 0.5 * (c - b);
        if fb == 0.0 || fb.abs() <= tol.abs_tol || xm.abs() <= tol1 || xm.abs() <= f64::MIN_POSITIVE
        {
            let magnitude = fb.abs().min(fc.abs());
            if magnitude > 1e3 * edge_scale && magnitude > tol.abs_tol {
                return Err(Error::Pole { x: b, magnitude });
            }
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.max(f64::MIN_POSITIVE).copysign(xm);
        }
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::Pole {
                x: b,
                magnitude: f64::INFINITY,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: tol.max_iter,
        lo: b.min(c),
        hi: b.max(c),
    })
}
