//! Small fixed-size vectors and matrices.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

/// Components of a tangent vector with respect to the orthonormal frame
/// `{E1, E2, E3}` at a common point. The frame is orthonormal and
/// positively oriented, so the inner product is the Euclidean dot of
/// components and `v ∧ w` is the component-wise cross product.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);
    pub const E1: Vec3 = Vec3([1.0, 0.0, 0.0]);
    pub const E2: Vec3 = Vec3([0.0, 1.0, 0.0]);
    pub const E3: Vec3 = Vec3([0.0, 0.0, 1.0]);

    pub fn new(v1: f64, v2: f64, v3: f64) -> Self {
        Vec3([v1, v2, v3])
    }

    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        Vec3(v)
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn wedge(&self, o: &Vec3) -> Vec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = o.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Vec3 {
        *self * (1.0 / self.norm())
    }

    /// Horizontal part `v^h`.
    pub fn horizontal(&self) -> Vec3 {
        Vec3([self.0[0], self.0[1], 0.0])
    }

    /// Vertical component `⟨v, E3⟩`.
    pub fn vertical(&self) -> f64 {
        self.0[2]
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

pub type Mat2 = [[f64; 2]; 2];
pub type Mat3 = [[f64; 3]; 3];

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn inv2(m: &Mat2) -> Option<Mat2> {
    let d = det2(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_vec(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn frobenius_sq2(m: &Mat2) -> f64 {
    m.iter().flatten().map(|x| x * x).sum()
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mat3_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    Vec3(std::array::from_fn(|i| (0..3).map(|j| m[i][j] * v.0[j]).sum()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_is_right_handed() {
        assert_eq!(Vec3::E1.wedge(&Vec3::E2), Vec3::E3);
        assert_eq!(Vec3::E2.wedge(&Vec3::E3), Vec3::E1);
        assert_eq!(Vec3::E1.wedge(&Vec3::E3), -Vec3::E2);
    }

    #[test]
    fn inverse_2x2() {
        let m = [[2.0, 1.0], [1.0, 3.0]];
        let p = mul2(&m, &inv2(&m).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p[i][j] - want).abs() < 1e-15);
            }
        }
        assert!(inv2(&[[1.0, 2.0], [2.0, 4.0]]).is_none());
    }
}
