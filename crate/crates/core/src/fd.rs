//! Central finite differences with one level of Richardson extrapolation.
//!
//! Every stencil evaluates the function at `x ± h` and `x ± h/2` and
//! combines the two estimates so that the leading `O(h²)` truncation term
//! cancels; the remaining error is `O(h⁴)`.

use crate::linalg::Vec3;

/// Values that finite differences can be taken of.
pub trait Linear: Copy {
    fn combine(terms: &[(f64, Self)]) -> Self;
}

impl Linear for f64 {
    fn combine(terms: &[(f64, f64)]) -> f64 {
        terms.iter().map(|(c, v)| c * v).sum()
    }
}

impl<const N: usize> Linear for [f64; N] {
    fn combine(terms: &[(f64, [f64; N])]) -> [f64; N] {
        std::array::from_fn(|i| terms.iter().map(|(c, v)| c * v[i]).sum())
    }
}

impl Linear for Vec3 {
    fn combine(terms: &[(f64, Vec3)]) -> Vec3 {
        Vec3(<[f64; 3]>::combine(
            &terms.iter().map(|(c, v)| (*c, v.0)).collect::<Vec<_>>(),
        ))
    }
}

/// Step `base · max(1, |x|)` used by the geometry oracles.
pub fn scaled_step(base: f64, x: f64) -> f64 {
    base * x.abs().max(1.0)
}

/// First derivative of `f` at `x`.
pub fn d1<T: Linear, E>(f: impl Fn(f64) -> Result<T, E>, x: f64, h: f64) -> Result<T, E> {
    let (p1, m1) = (f(x + h)?, f(x - h)?);
    let (p2, m2) = (f(x + h / 2.0)?, f(x - h / 2.0)?);
    // (4 D(h/2) − D(h)) / 3 with D(k) = (f(x+k) − f(x−k)) / 2k
    let a = 4.0 / (3.0 * h);
    let b = 1.0 / (6.0 * h);
    Ok(T::combine(&[(a, p2), (-a, m2), (-b, p1), (b, m1)]))
}

/// Second derivative of `f` at `x`; `f0` is `f(x)`.
pub fn d2<T: Linear, E>(f: impl Fn(f64) -> Result<T, E>, x: f64, f0: T, h: f64) -> Result<T, E> {
    let (p1, m1) = (f(x + h)?, f(x - h)?);
    let (p2, m2) = (f(x + h / 2.0)?, f(x - h / 2.0)?);
    // (4 S(h/2) − S(h)) / 3 with S(k) = (f(x+k) − 2f(x) + f(x−k)) / k²
    let h2 = h * h;
    let a = 16.0 / (3.0 * h2);
    let b = 1.0 / (3.0 * h2);
    Ok(T::combine(&[
        (a, p2),
        (a, m2),
        (-b, p1),
        (-b, m1),
        (-2.0 * a + 2.0 * b, f0),
    ]))
}

/// Mixed partial `∂²f/∂u∂v` at `(u, v)`.
pub fn d11<T: Linear, E>(
    f: impl Fn(f64, f64) -> Result<T, E>,
    u: f64,
    v: f64,
    h: f64,
) -> Result<T, E> {
    let m = |k: f64| -> Result<[(f64, T); 4], E> {
        let c = 1.0 / (4.0 * k * k);
        Ok([
            (c, f(u + k, v + k)?),
            (-c, f(u + k, v - k)?),
            (-c, f(u - k, v + k)?),
            (c, f(u - k, v - k)?),
        ])
    };
    let coarse = m(h)?;
    let fine = m(h / 2.0)?;
    let mut terms = Vec::with_capacity(8);
    terms.extend(fine.iter().map(|(c, t)| (4.0 * c / 3.0, *t)));
    terms.extend(coarse.iter().map(|(c, t)| (-c / 3.0, *t)));
    Ok(T::combine(&terms))
}

/// Gradient `(∂f/∂u, ∂f/∂v)` at `(u, v)`.
pub fn grad2<T: Linear, E>(
    f: impl Fn(f64, f64) -> Result<T, E>,
    u: f64,
    v: f64,
    h: f64,
) -> Result<[T; 2], E> {
    Ok([d1(|s| f(s, v), u, h)?, d1(|s| f(u, s), v, h)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    type R<T> = Result<T, ()>;

    #[test]
    fn derivatives_of_smooth_functions() {
        let h = 1e-3;
        let d = d1(|x| R::Ok(x.sin()), 0.7, h).unwrap();
        assert!((d - 0.7f64.cos()).abs() < 1e-12);
        let dd = d2(|x| R::Ok(x.exp()), 0.3, 0.3f64.exp(), h).unwrap();
        assert!((dd - 0.3f64.exp()).abs() < 1e-8);
        let m = d11(|u, v| R::Ok((u * v).sin()), 0.4, -0.2, h).unwrap();
        let exact = (0.4f64 * -0.2).cos() - 0.4 * -0.2 * (0.4f64 * -0.2).sin();
        assert!((m - exact).abs() < 1e-8);
    }

    #[test]
    fn quadratics_are_exact() {
        let g = grad2(|u, v| R::Ok([u * u + 3.0 * v, u * v]), 1.0, 2.0, 0.1).unwrap();
        assert!((g[0][0] - 2.0).abs() < 1e-12 && (g[1][0] - 3.0).abs() < 1e-12);
        assert!((g[0][1] - 2.0).abs() < 1e-12 && (g[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_step_grows_with_coordinate() {
        assert_eq!(scaled_step(1e-4, 0.5), 1e-4);
        assert_eq!(scaled_step(1e-4, -20.0), 2e-3);
    }
}
