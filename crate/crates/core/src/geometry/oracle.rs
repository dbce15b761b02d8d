//! Connection computed from the coordinate metric alone (Koszul /
//! Christoffel route), used to check the closed-form table.

use nalgebra::Matrix3;

use super::{coordinate_metric_from, frame_components, CanonicalModel, ConnectionTable, ORACLE_STEP};
use crate::fd;
use crate::linalg::Mat3;
use crate::{Error, Result};

/// Coordinate components `g_ab` of `ds²_{λ,a,b}` at `(x, y)`.
pub fn coordinate_metric<M: CanonicalModel + ?Sized>(model: &M, x: f64, y: f64) -> Result<Mat3> {
    let [l, a, b] = model.values(x, y)?;
    Ok(coordinate_metric_from(l, a, b))
}

fn flat9(m: &Mat3) -> [f64; 9] {
    std::array::from_fn(|k| m[k / 3][k % 3])
}

/// Connection table from central differences of the coordinate metric
/// (Christoffel symbols), followed by the change of basis to `{E_i}`.
pub fn connection_oracle<M: CanonicalModel + ?Sized>(model: &M, p: [f64; 3]) -> Result<ConnectionTable> {
    let [x, y, z] = p;
    let h: [f64; 3] = std::array::from_fn(|i| fd::scaled_step(ORACLE_STEP, p[i]));
    if !model.domain().contains_with_margin(x, y, 2.0 * h[0].max(h[1])) {
        return Err(Error::InsufficientMargin {
            needed: 2.0 * h[0].max(h[1]),
        });
    }
    // the metric is evaluated as a function of all three coordinates
    let metric_at = |q: [f64; 3]| -> Result<[f64; 9]> { Ok(flat9(&coordinate_metric(model, q[0], q[1])?)) };
    let along = |axis: usize| {
        move |s: f64| {
            let mut q = [x, y, z];
            q[axis] = s;
            q
        }
    };
    let mut dg = [[0.0; 9]; 3];
    for axis in 0..3 {
        let path = along(axis);
        dg[axis] = fd::d1(|s| metric_at(path(s)), p[axis], h[axis])?;
    }
    let g = coordinate_metric(model, x, y)?;
    let g_inv = Matrix3::from_fn(|i, j| g[i][j])
        .try_inverse()
        .ok_or_else(|| Error::InvalidConfig("singular coordinate metric".into()))?;
    let dgm = |c: usize, a: usize, b: usize| dg[c][3 * a + b];
    // Γ^c_ab = ½ g^{cd} (∂_a g_bd + ∂_b g_ad − ∂_d g_ab)
    let mut christoffel = [[[0.0; 3]; 3]; 3];
    for c in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                christoffel[c][a][b] = 0.5
                    * (0..3)
                        .map(|d| g_inv[(c, d)] * (dgm(a, b, d) + dgm(b, a, d) - dgm(d, a, b)))
                        .sum::<f64>();
            }
        }
    }

    let frame_at = |q: [f64; 3]| -> Result<[f64; 9]> {
        let [l, a, b] = model.values(q[0], q[1])?;
        Ok(flat9(&frame_components(l, a, b)))
    };
    let mut de = [[0.0; 9]; 3];
    for axis in 0..3 {
        let path = along(axis);
        de[axis] = fd::d1(|s| frame_at(path(s)), p[axis], h[axis])?;
    }
    let [l, a, b] = model.values(x, y)?;
    let e = frame_components(l, a, b);

    let mut table = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // coordinate components of ∇_{E_i} E_j
            let mut v = [0.0; 3];
            for (c, vc) in v.iter_mut().enumerate() {
                let mut s = 0.0;
                for a_ in 0..3 {
                    s += e[i][a_] * de[a_][3 * j + c];
                    for b_ in 0..3 {
                        s += e[i][a_] * e[j][b_] * christoffel[c][a_][b_];
                    }
                }
                *vc = s;
            }
            for k in 0..3 {
                table[i][j][k] = (0..3)
                    .flat_map(|m| (0..3).map(move |n| (m, n)))
                    .map(|(m, n)| v[m] * g[m][n] * e[k][n])
                    .sum();
            }
        }
    }
    Ok(ConnectionTable(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{bcv, connection, KillingData};

    #[test]
    fn flat_oracle_is_zero() {
        let t = connection_oracle(&KillingData::flat(1.0), [0.1, -0.2, 0.5]).unwrap();
        assert!(t.0.iter().flatten().flatten().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn oracle_matches_closed_form_on_bcv() {
        for (m, p) in [
            (bcv(0.0, 0.5), [0.0, 0.0, 0.0]),
            (bcv(1.0, 1.0), [0.1, 0.2, 0.0]),
        ] {
            let closed = connection(&m, p).unwrap();
            let oracle = connection_oracle(&m, p).unwrap();
            assert!(closed.max_abs_diff(&oracle) < 1e-6, "{:?}", closed.max_abs_diff(&oracle));
            assert!(oracle.metric_defect() < 1e-8);
        }
    }

    #[test]
    fn oracle_needs_margin() {
        let m = bcv(1.0, 1.0);
        assert!(matches!(
            connection_oracle(&m, [1.99999, 0.0, 0.0]),
            Err(Error::InsufficientMargin { .. })
        ));
    }
}
