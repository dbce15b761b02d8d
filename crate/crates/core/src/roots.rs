//! Root isolation by uniform scanning and bracketed refinement.

use crate::{Error, Result};

/// Brent's method on a bracket `[a, b]` with `f(a)·f(b) ≤ 0`.
///
/// Combines inverse quadratic interpolation, secant steps and bisection;
/// stops when the bracket is narrower than `xtol` (plus a few ulps).
pub fn brent<E>(f: impl Fn(f64) -> std::result::Result<f64, E>, a: f64, b: f64, xtol: f64) -> std::result::Result<f64, E> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    debug_assert!(fa * fb < 0.0, "root not bracketed");
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb * fc > 0.0 {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}

/// All isolated roots of `f` on `[lo, hi]`, found by sampling `samples`
/// cell midpoints and refining every sign change with [`brent`].
///
/// Fails with [`Error::NoIsolatedRoot`] when `f` vanishes at two
/// consecutive samples and with [`Error::NoSignChange`] when no root is
/// found at all.
pub fn scan_roots(
    f: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    samples: usize,
    xtol: f64,
) -> Result<Vec<f64>> {
    let step = (hi - lo) / samples as f64;
    let ts: Vec<f64> = (0..samples).map(|i| lo + (i as f64 + 0.5) * step).collect();
    let vals = ts.iter().map(|&t| f(t)).collect::<Result<Vec<f64>>>()?;
    let mut roots = Vec::new();
    for i in 0..samples {
        if vals[i] == 0.0 {
            if i + 1 < samples && vals[i + 1] == 0.0 {
                return Err(Error::NoIsolatedRoot);
            }
            roots.push(ts[i]);
        } else if i + 1 < samples && vals[i + 1] != 0.0 && vals[i] * vals[i + 1] < 0.0 {
            roots.push(brent(&f, ts[i], ts[i + 1], xtol)?);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoSignChange);
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| Ok::<_, ()>(x * x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn scan_returns_sorted_roots() {
        let roots = scan_roots(|t| Ok((3.0 * t).sin()), 0.1, 3.0, 1024, 1e-13).unwrap();
        let want: Vec<f64> = (1..=2).map(|k| k as f64 * std::f64::consts::PI / 3.0).collect();
        assert_eq!(roots.len(), 2);
        for (r, w) in roots.iter().zip(want) {
            assert!((r - w).abs() < 1e-12);
        }
    }

    #[test]
    fn identically_zero_is_not_isolated() {
        assert_eq!(scan_roots(|_| Ok(0.0), 0.0, 1.0, 16, 1e-12), Err(Error::NoIsolatedRoot));
        assert_eq!(scan_roots(|t| Ok(1.0 + t), 0.0, 1.0, 16, 1e-12), Err(Error::NoSignChange));
    }
}
