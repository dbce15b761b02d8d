//! Second-order jets: value, gradient and Hessian of a scalar in up to
//! three variables.

use std::ops::{Add, Mul, Neg, Sub};

use super::ExprError;

/// Maximum number of independent variables a [`Jet`] can carry.
pub const MAX_VARS: usize = 3;

/// Truncated Taylor data of a scalar function at a point.
///
/// Only the leading `dim` entries of the gradient and the leading
/// `dim × dim` block of the Hessian are meaningful; the rest stay zero.
/// Every operation fills the Hessian from its upper triangle, so it is
/// exactly symmetric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    dim: usize,
    value: f64,
    grad: [f64; MAX_VARS],
    hess: [[f64; MAX_VARS]; MAX_VARS],
}

impl Jet {
    pub fn constant(dim: usize, value: f64) -> Self {
        assert!(dim <= MAX_VARS, "jets support at most {MAX_VARS} variables");
        Jet {
            dim,
            value,
            grad: [0.0; MAX_VARS],
            hess: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }

    /// The jet of the coordinate function `x_index` evaluated at `value`.
    pub fn variable(dim: usize, index: usize, value: f64) -> Self {
        assert!(index < dim, "variable index {index} out of range for dim {dim}");
        let mut j = Jet::constant(dim, value);
        j.grad[index] = 1.0;
        j
    }

    /// Builds a jet from explicit derivatives. The Hessian is symmetrised
    /// from its upper triangle.
    pub fn from_parts(value: f64, grad: &[f64], hess: &[&[f64]]) -> Self {
        let dim = grad.len();
        let mut j = Jet::constant(dim, value);
        j.grad[..dim].copy_from_slice(grad);
        for i in 0..dim {
            for k in i..dim {
                j.hess[i][k] = hess[i][k];
                j.hess[k][i] = hess[i][k];
            }
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn dd(&self, i: usize, k: usize) -> f64 {
        self.hess[i][k]
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad().iter().all(|g| g.is_finite())
            && (0..self.dim).all(|i| self.hess[i][..self.dim].iter().all(|h| h.is_finite()))
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value()`.
    pub fn chain(&self, f: f64, df: f64, ddf: f64) -> Jet {
        let mut out = Jet::constant(self.dim, f);
        for i in 0..self.dim {
            out.grad[i] = df * self.grad[i];
        }
        for i in 0..self.dim {
            for k in i..self.dim {
                let h = ddf * self.grad[i] * self.grad[k] + df * self.hess[i][k];
                out.hess[i][k] = h;
                out.hess[k][i] = h;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        self.chain(s * self.value, s, 0.0)
    }

    pub fn recip(&self) -> Result<Jet, ExprError> {
        let v = self.value;
        if v == 0.0 {
            return Err(ExprError::Domain {
                func: "division",
                arg: v,
                subexpr: String::new(),
            });
        }
        Ok(self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
    }

    pub fn checked_div(&self, rhs: &Jet) -> Result<Jet, ExprError> {
        Ok(*self * rhs.recip()?)
    }

    fn check_dims(&self, other: &Jet) -> usize {
        // constants of dimension 0 broadcast against anything
        if self.dim == other.dim || other.dim == 0 {
            self.dim
        } else if self.dim == 0 {
            other.dim
        } else {
            panic!("jet dimension mismatch: {} vs {}", self.dim, other.dim)
        }
    }
}

/// Second-order chain rule: `outer` is a jet in `inners.len()` variables
/// evaluated at the inners' values; the result is a jet in the inners'
/// variables.
pub fn compose_jet(outer: &Jet, inners: &[Jet]) -> Result<Jet, ExprError> {
    if inners.len() != outer.dim {
        return Err(ExprError::ArityMismatch {
            expected: outer.dim,
            found: inners.len(),
        });
    }
    let dim = inners.first().map_or(0, Jet::dim);
    if let Some(bad) = inners.iter().find(|j| j.dim != dim) {
        return Err(ExprError::ArityMismatch {
            expected: dim,
            found: bad.dim,
        });
    }
    let mut out = Jet::constant(dim, outer.value);
    for k in 0..dim {
        out.grad[k] = inners
            .iter()
            .enumerate()
            .map(|(i, inner)| outer.grad[i] * inner.grad[k])
            .sum();
    }
    for k in 0..dim {
        for l in k..dim {
            let mut h = 0.0;
            for (i, ii) in inners.iter().enumerate() {
                h += outer.grad[i] * ii.hess[k][l];
                for (j, ij) in inners.iter().enumerate() {
                    h += outer.hess[i][j] * ii.grad[k] * ij.grad[l];
                }
            }
            out.hess[k][l] = h;
            out.hess[l][k] = h;
        }
    }
    Ok(out)
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let dim = self.check_dims(&rhs);
        let mut out = Jet::constant(dim, self.value + rhs.value);
        for i in 0..dim {
            out.grad[i] = self.grad[i] + rhs.grad[i];
            for k in 0..dim {
                out.hess[i][k] = self.hess[i][k] + rhs.hess[i][k];
            }
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut out = self;
        out.value = -out.value;
        for i in 0..MAX_VARS {
            out.grad[i] = -out.grad[i];
            for k in 0..MAX_VARS {
                out.hess[i][k] = -out.hess[i][k];
            }
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let dim = self.check_dims(&rhs);
        let mut out = Jet::constant(dim, self.value * rhs.value);
        for i in 0..dim {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        for i in 0..dim {
            for k in i..dim {
                let h = self.hess[i][k] * rhs.value
                    + self.value * rhs.hess[i][k]
                    + (self.grad[i] * rhs.grad[k] + self.grad[k] * rhs.grad[i]);
                out.hess[i][k] = h;
                out.hess[k][i] = h;
            }
        }
        out
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self;
        out.value += rhs;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_variables_is_exact() {
        let x = Jet::variable(2, 0, 1.5);
        let y = Jet::variable(2, 1, -2.0);
        let p = x * y * x;
        assert_eq!(p.value(), 1.5 * 1.5 * -2.0);
        assert_eq!(p.grad(), &[2.0 * 1.5 * -2.0, 1.5 * 1.5]);
        assert_eq!(p.dd(0, 0), 2.0 * -2.0);
        assert_eq!(p.dd(0, 1), 2.0 * 1.5);
        assert_eq!(p.dd(1, 0), p.dd(0, 1));
        assert_eq!(p.dd(1, 1), 0.0);
    }

    #[test]
    fn compose_square_with_identity() {
        // outer = t^2 at t = 3, inner = t
        let t = Jet::variable(1, 0, 3.0);
        let outer = t * t;
        let c = compose_jet(&outer, &[t]).unwrap();
        assert_eq!((c.value(), c.d(0), c.dd(0, 0)), (9.0, 6.0, 2.0));
    }

    #[test]
    fn compose_rejects_arity_mismatch() {
        let outer = Jet::variable(2, 0, 1.0);
        let t = Jet::variable(1, 0, 0.0);
        assert!(matches!(
            compose_jet(&outer, &[t]),
            Err(ExprError::ArityMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn reciprocal_of_zero_is_a_domain_error() {
        assert!(Jet::constant(1, 0.0).recip().is_err());
    }
}
