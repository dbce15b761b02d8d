use super::{base_data, bracket_closed, connection, frame_components, rotate_j, BaseData, CanonicalModel, ORACLE_STEP};
use crate::fd;
use crate::linalg::Vec3;
use crate::{Error, Result};

/// `R[i][j][k][l] = ⟨R(E_i, E_j) E_k, E_l⟩` with
/// `R(X, Y) = ∇_X ∇_Y − ∇_Y ∇_X − ∇_{[X, Y]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannTensor(pub [[[[f64; 3]; 3]; 3]; 3]);

impl RiemannTensor {
    /// `⟨R(X, Y) Z, W⟩` by multilinearity.
    pub fn eval(&self, x: &Vec3, y: &Vec3, z: &Vec3, w: &Vec3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        s += self.0[i][j][k][l] * x[i] * y[j] * z[k] * w[l];
                    }
                }
            }
        }
        s
    }

    /// `Ric(E_j, E_k) = Σ_i ⟨R(E_i, E_j) E_k, E_i⟩`.
    pub fn ricci(&self) -> RicciMatrix {
        RicciMatrix(std::array::from_fn(|j| {
            std::array::from_fn(|k| (0..3).map(|i| self.0[i][j][k][i]).sum())
        }))
    }
}

/// Closed-form curvature tensor of a canonical model:
///
/// ```text
/// ⟨R(X,Y)Z,W⟩ = (G − 3r²)(⟨Y,Z⟩⟨X,W⟩ − ⟨X,Z⟩⟨Y,W⟩)
///   − (G − 4r²)(⟨Y,ξ⟩⟨Z,ξ⟩⟨X,W⟩ − ⟨X,ξ⟩⟨Z,ξ⟩⟨Y,W⟩
///               + ⟨X,ξ⟩⟨Y,Z⟩⟨W,ξ⟩ − ⟨Y,ξ⟩⟨X,Z⟩⟨W,ξ⟩)
///   + ⟨Z, J W^h⟩ dr(J (X∧Y)^h) + ⟨X, J Y^h⟩ dr(J (Z∧W)^h)
/// ```
pub fn riemann_closed_at(d: &BaseData, x: &Vec3, y: &Vec3, z: &Vec3, w: &Vec3) -> f64 {
    let (g, r) = (d.gauss, d.r);
    let (x3, y3, z3, w3) = (x.vertical(), y.vertical(), z.vertical(), w.vertical());
    let t1 = (g - 3.0 * r * r) * (y.dot(z) * x.dot(w) - x.dot(z) * y.dot(w));
    let t2 = -(g - 4.0 * r * r)
        * (y3 * z3 * x.dot(w) - x3 * z3 * y.dot(w) + x3 * y.dot(z) * w3 - y3 * x.dot(z) * w3);
    let t3 = z.dot(&rotate_j(&w.horizontal())) * d.dr(&rotate_j(&x.wedge(y).horizontal()))
        + x.dot(&rotate_j(&y.horizontal())) * d.dr(&rotate_j(&z.wedge(w).horizontal()));
    t1 + t2 + t3
}

/// [`riemann_closed_at`] at `(x, y)` of the model.
pub fn riemann_closed<M: CanonicalModel + ?Sized>(
    model: &M,
    p: [f64; 3],
    x: &Vec3,
    y: &Vec3,
    z: &Vec3,
    w: &Vec3,
) -> Result<f64> {
    let d = base_data(model, p[0], p[1])?;
    Ok(riemann_closed_at(&d, x, y, z, w))
}

/// Curvature tensor from the definition, differentiating the connection
/// table along each `E_i` numerically.
pub fn riemann_tensor_direct<M: CanonicalModel + ?Sized>(model: &M, p: [f64; 3]) -> Result<RiemannTensor> {
    let [x, y, z] = p;
    let h = fd::scaled_step(ORACLE_STEP, x.abs().max(y.abs()));
    let [l, a, b] = model.values(x, y)?;
    let e = frame_components(l, a, b);
    let reach = e.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
    if !model.domain().contains_with_margin(x, y, 2.0 * h * reach) {
        return Err(Error::InsufficientMargin { needed: 2.0 * h * reach });
    }
    let gamma = connection(model, p)?.0;
    let flat = |q: [f64; 3]| -> Result<[f64; 27]> {
        let t = connection(model, q)?.0;
        Ok(std::array::from_fn(|n| t[n / 9][(n / 3) % 3][n % 3]))
    };
    // dgamma[i][j][k][l] = E_i(Γ[j][k][l])
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
    for (i, ei) in e.iter().enumerate() {
        let d = fd::d1(|t| flat([x + t * ei[0], y + t * ei[1], z + t * ei[2]]), 0.0, h)?;
        for n in 0..27 {
            dgamma[i][n / 9][(n / 3) % 3][n % 3] = d[n];
        }
    }
    let br = bracket_closed(model, p)?;
    let mut out = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for w in 0..3 {
                    let mut s = dgamma[i][j][k][w] - dgamma[j][i][k][w];
                    for m in 0..3 {
                        s += gamma[j][k][m] * gamma[i][m][w] - gamma[i][k][m] * gamma[j][m][w];
                        s -= br[i][j][m] * gamma[m][k][w];
                    }
                    out[i][j][k][w] = s;
                }
            }
        }
    }
    Ok(RiemannTensor(out))
}

/// `⟨R(X, Y) Z, W⟩` from [`riemann_tensor_direct`].
pub fn riemann_direct<M: CanonicalModel + ?Sized>(
    model: &M,
    p: [f64; 3],
    x: &Vec3,
    y: &Vec3,
    z: &Vec3,
    w: &Vec3,
) -> Result<f64> {
    Ok(riemann_tensor_direct(model, p)?.eval(x, y, z, w))
}

/// Ricci tensor in the frame `{E_i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciMatrix(pub [[f64; 3]; 3]);

impl RicciMatrix {
    pub fn apply(&self, v: &Vec3, w: &Vec3) -> f64 {
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| self.0[i][j] * v[i] * w[j])
            .sum()
    }

    /// The vector `Ric(v)` with `⟨Ric(v), w⟩ = Ric(v, w)`.
    pub fn vector(&self, v: &Vec3) -> Vec3 {
        Vec3(std::array::from_fn(|j| (0..3).map(|i| self.0[i][j] * v[i]).sum()))
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn max_abs_diff(&self, other: &RicciMatrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form Ricci tensor: `diag(G − 2r², G − 2r², 2r²)` with
/// `Ric(E1, E3) = −E2(r)` and `Ric(E2, E3) = E1(r)`.
pub fn ricci_at(d: &BaseData) -> RicciMatrix {
    let (g, r) = (d.gauss, d.r);
    let [e1r, e2r] = d.frame_dr();
    RicciMatrix([
        [g - 2.0 * r * r, 0.0, -e2r],
        [0.0, g - 2.0 * r * r, e1r],
        [-e2r, e1r, 2.0 * r * r],
    ])
}

pub fn ricci<M: CanonicalModel + ?Sized>(model: &M, x: f64, y: f64) -> Result<RicciMatrix> {
    Ok(ricci_at(&base_data(model, x, y)?))
}

/// Ricci tensor by contracting the closed-form curvature tensor.
pub fn ricci_contraction<M: CanonicalModel + ?Sized>(model: &M, x: f64, y: f64) -> Result<RicciMatrix> {
    let d = base_data(model, x, y)?;
    Ok(RicciMatrix(std::array::from_fn(|j| {
        std::array::from_fn(|k| {
            (0..3)
                .map(|i| {
                    let ei = Vec3::basis(i);
                    riemann_closed_at(&d, &ei, &Vec3::basis(j), &Vec3::basis(k), &ei)
                })
                .sum()
        })
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{bcv, KillingData, Rect};

    fn sample_model() -> KillingData {
        KillingData::from_strs("exp(-(x^2+y^2)/4)", "sin(y)/2", "x + x*y", Rect::square(1.5)).unwrap()
    }

    #[test]
    fn horizontal_and_vertical_sectional_curvatures() {
        let m = bcv(1.0, 0.5);
        let p = [0.2, -0.3, 0.0];
        let (e1, e2, e3) = (Vec3::E1, Vec3::E2, Vec3::E3);
        let horiz = riemann_closed(&m, p, &e1, &e2, &e2, &e1).unwrap();
        assert!((horiz - (1.0 - 3.0 * 0.25)).abs() < 1e-12);
        let vert = riemann_closed(&m, p, &e1, &e3, &e3, &e1).unwrap();
        assert!((vert - 0.25).abs() < 1e-12);
    }

    #[test]
    fn closed_matches_direct_on_frame() {
        let m = sample_model();
        for p in [[0.3, -0.2, 0.0], [-0.8, 0.6, 1.0]] {
            let direct = riemann_tensor_direct(&m, p).unwrap();
            let d = base_data(&m, p[0], p[1]).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            let [a, b, c, w] = [i, j, k, l].map(Vec3::basis);
                            let closed = riemann_closed_at(&d, &a, &b, &c, &w);
                            let dir = direct.0[i][j][k][l];
                            assert!((closed - dir).abs() < 1e-6, "R{i}{j}{k}{l}: {closed} vs {dir}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_vertical_component_is_minus_e1_r() {
        let m = sample_model();
        let p = [0.4, 0.1, 0.0];
        let d = base_data(&m, p[0], p[1]).unwrap();
        let v = riemann_closed_at(&d, &Vec3::E1, &Vec3::E3, &Vec3::E1, &Vec3::E2);
        assert!((v + d.frame_dr()[0]).abs() < 1e-12);
    }

    #[test]
    fn ricci_matches_contraction_and_trace() {
        let m = sample_model();
        let (x, y) = (0.5, -0.7);
        let closed = ricci(&m, x, y).unwrap();
        let contracted = ricci_contraction(&m, x, y).unwrap();
        assert!(closed.max_abs_diff(&contracted) < 1e-12);
        let direct = riemann_tensor_direct(&m, [x, y, 0.0]).unwrap().ricci();
        assert!(closed.max_abs_diff(&direct) < 1e-6);
        let d = base_data(&m, x, y).unwrap();
        assert!((closed.trace() - (2.0 * d.gauss - 2.0 * d.r * d.r)).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_ricci() {
        let rc = ricci(&bcv(0.0, 0.5), 0.3, 0.4).unwrap();
        let want = RicciMatrix([[-0.5, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 0.5]]);
        assert!(rc.max_abs_diff(&want) < 1e-12);
    }
}
