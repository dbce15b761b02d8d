use super::{base_data, check_domain, frame_components, r_formula, CanonicalModel, ORACLE_STEP};
use crate::fd;
use crate::linalg::Vec3;
use crate::{Error, Result};

/// `Γ[i][j][k] = ⟨∇̄_{E_i} E_j, E_k⟩` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionTable(pub [[[f64; 3]; 3]; 3]);

impl ConnectionTable {
    /// `∇̄_{E_i} E_j` as a frame vector.
    pub fn nabla_frame(&self, i: usize, j: usize) -> Vec3 {
        Vec3(self.0[i][j])
    }

    /// `∇̄_X Y` for fields with constant frame components.
    pub fn nabla(&self, x: &Vec3, y: &Vec3) -> Vec3 {
        let mut out = Vec3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out += self.nabla_frame(i, j) * (x[i] * y[j]);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &ConnectionTable) -> f64 {
        self.0
            .iter()
            .flatten()
            .flatten()
            .zip(other.0.iter().flatten().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max |Γ[i][j][k] + Γ[i][k][j]|`.
    pub fn metric_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    worst = worst.max((self.0[i][j][k] + self.0[i][k][j]).abs());
                }
            }
        }
        worst
    }
}

/// Levi-Civita connection of the canonical metric in the frame `{E_i}`:
///
/// ```text
/// ∇E1 E1 = −(λ_y/λ²) E2        ∇E1 E2 = (λ_y/λ²) E1 + r E3   ∇E1 E3 = −r E2
/// ∇E2 E1 = (λ_x/λ²) E2 − r E3   ∇E2 E2 = −(λ_x/λ²) E1        ∇E2 E3 = r E1
/// ∇E3 E1 = −r E2                ∇E3 E2 = r E1                ∇E3 E3 = 0
/// ```
pub fn connection<M: CanonicalModel + ?Sized>(model: &M, p: [f64; 3]) -> Result<ConnectionTable> {
    check_domain(model, p[0], p[1])?;
    let f = model.fields(p[0], p[1])?;
    let l = &f.lambda;
    let l2 = l.value() * l.value();
    let (px, py, r) = (l.d(0) / l2, l.d(1) / l2, r_formula(&f));
    let mut g = [[[0.0; 3]; 3]; 3];
    g[0][0][1] = -py;
    g[0][1][0] = py;
    g[0][1][2] = r;
    g[0][2][1] = -r;
    g[1][0][1] = px;
    g[1][0][2] = -r;
    g[1][1][0] = -px;
    g[1][2][0] = r;
    g[2][0][1] = -r;
    g[2][1][0] = r;
    Ok(ConnectionTable(g))
}

/// `[E_i, E_j]` in frame components.
pub type Brackets = [[Vec3; 3]; 3];

/// Closed-form brackets: `[E1, E3] = [E2, E3] = 0` and
/// `[E1, E2] = (λ_y/λ²) E1 − (λ_x/λ²) E2 + 2r E3`.
pub fn bracket_closed<M: CanonicalModel + ?Sized>(model: &M, p: [f64; 3]) -> Result<Brackets> {
    let d = base_data(model, p[0], p[1])?;
    let l2 = d.lambda * d.lambda;
    let b12 = Vec3::new(d.lambda_y / l2, -d.lambda_x / l2, 2.0 * d.r);
    let mut out = [[Vec3::ZERO; 3]; 3];
    out[0][1] = b12;
    out[1][0] = -b12;
    Ok(out)
}

/// Brackets from finite differences of the frame's coordinate components:
/// `[X, Y]^b = X^a ∂_a Y^b − Y^a ∂_a X^b`.
pub fn bracket_fd<M: CanonicalModel + ?Sized>(model: &M, p: [f64; 3]) -> Result<Brackets> {
    let [x, y, _] = p;
    let h = fd::scaled_step(ORACLE_STEP, x.abs().max(y.abs()));
    if !model.domain().contains_with_margin(x, y, 2.0 * h) {
        return Err(Error::InsufficientMargin { needed: 2.0 * h });
    }
    let comps = |px: f64, py: f64| -> Result<[f64; 9]> {
        let [l, a, b] = model.values(px, py)?;
        let e = frame_components(l, a, b);
        Ok(std::array::from_fn(|k| e[k / 3][k % 3]))
    };
    // derivatives along x and y; the frame does not depend on z
    let dx = fd::d1(|s| comps(s, y), x, h)?;
    let dy = fd::d1(|s| comps(x, s), y, h)?;
    let [l, a, b] = model.values(x, y)?;
    let e = frame_components(l, a, b);
    let deriv = |field: usize, along: &[f64; 3]| -> [f64; 3] {
        std::array::from_fn(|c| along[0] * dx[3 * field + c] + along[1] * dy[3 * field + c])
    };
    let mut out = [[Vec3::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let xy = deriv(j, &e[i]);
            let yx = deriv(i, &e[j]);
            let coords = [xy[0] - yx[0], xy[1] - yx[1], xy[2] - yx[2]];
            out[i][j] = super::coords_to_frame(l, a, b, coords);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{bcv, KillingData, Rect};

    #[test]
    fn bcv_connection_at_origin() {
        let m = bcv(1.0, 0.7);
        let t = connection(&m, [0.0, 0.0, 0.0]).unwrap();
        let n12 = t.nabla_frame(0, 1);
        assert!((n12 - Vec3::E3 * 0.7).norm() < 1e-12);
        assert_eq!(t.nabla_frame(2, 2), Vec3::ZERO);
    }

    #[test]
    fn flat_product_connection_vanishes() {
        let t = connection(&KillingData::flat(1.0), [0.2, 0.3, 0.0]).unwrap();
        assert_eq!(t.0, [[[0.0; 3]; 3]; 3]);
    }

    #[test]
    fn closed_table_is_metric_and_torsion_free() {
        let m = KillingData::from_strs("exp(-(x^2+y^2)/4)", "0", "x", Rect::square(1.5)).unwrap();
        for p in [[0.2, -0.3, 0.0], [1.0, 0.4, 2.0]] {
            let t = connection(&m, p).unwrap();
            assert_eq!(t.metric_defect(), 0.0);
            let br = bracket_closed(&m, p).unwrap();
            let br_fd = bracket_fd(&m, p).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let torsion = t.nabla_frame(i, j) - t.nabla_frame(j, i) - br[i][j];
                    assert!(torsion.norm() < 1e-12);
                    assert!((br[i][j] - br_fd[i][j]).norm() < 1e-8);
                }
            }
            // ⟨[E1, E2], E3⟩ = 2r
            let (r, _) = crate::geometry::bundle_curvature(&m, p[0], p[1]).unwrap();
            assert!((br_fd[0][1][2] - 2.0 * r).abs() < 1e-8);
        }
    }
}
