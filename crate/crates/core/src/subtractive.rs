//! Diagonal entries of Gram inverse powers by the original recurrence with
//! subtraction.
//!
//! For `p = 1..=M` the rows `v^{(p)}` (backward sweep) and `w^{(p)}` (forward
//! sweep) are built from the previous order through an auxiliary row
//! `z^{(p-1)}`:
//!
//! ```text
//! v_N^(p) = w_N^(p-1) / q_N
//! v_i^(p) = (e_i v_{i+1}^(p) + (z_i^(p-1) - w_i^(p-1))) / q_i
//! w_1^(p) = v_1^(p-1) / q_1
//! w_i^(p) = (e_{i-1} w_{i-1}^(p) + (z_i^(p-1) - v_i^(p-1))) / q_i
//! ```
//!
//! `z` can be swept either way; both directions give the same exact values.
//! Every computed `v`, `w` is positive in exact arithmetic, so a nonpositive
//! result is recorded as a [`CancellationWarning`].

use crate::error::{check_order, Error, Result};
use crate::matrix::BidiagonalMatrix;
use crate::table::{CancellationWarning, DiagKind, DiagTable, OrderTable};
use crate::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZDirection {
    /// `z_1 = 2 v_1`, `z_i = z_{i-1} + 2 (v_i - w_{i-1})`.
    #[default]
    Forward,
    /// `z_N = 2 w_N`, `z_i = z_{i+1} + 2 (w_i - v_{i+1})`.
    Backward,
}

/// First-order diagonals `(v^{(1)}, w^{(1)})` of `(B^T B)^{-1}` and `(B B^T)^{-1}`.
pub fn diag_first_order(b: &BidiagonalMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let q = b.q();
    let e = b.e();
    let n = q.len();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    v[n - 1] = 1.0 / q[n - 1];
    for i in (0..n - 1).rev() {
        v[i] = (e[i] * v[i + 1] + 1.0) / q[i];
    }
    w[0] = 1.0 / q[0];
    for i in 1..n {
        w[i] = (e[i - 1] * w[i - 1] + 1.0) / q[i];
    }
    if !v.iter().chain(&w).all(|x| x.is_finite()) {
        return Err(Error::Overflow {
            stage: "first-order diagonal",
            order: 1,
        });
    }
    Ok((v, w))
}

fn fill_z(v: &[f64], w: &[f64], direction: ZDirection, z: &mut [f64]) {
    let n = v.len();
    match direction {
        ZDirection::Forward => {
            z[0] = 2.0 * v[0];
            for i in 1..n {
                z[i] = z[i - 1] + 2.0 * (v[i] - w[i - 1]);
            }
        }
        ZDirection::Backward => {
            z[n - 1] = 2.0 * w[n - 1];
            for i in (0..n - 1).rev() {
                z[i] = z[i + 1] + 2.0 * (w[i] - v[i + 1]);
            }
        }
    }
}

/// Tables `v^{(0..=M)}`, `w^{(0..=M)}`, `z^{(0..M)}` by the subtractive recurrence.
pub fn diag_powers_subtractive(
    b: &BidiagonalMatrix,
    m: usize,
    direction: ZDirection,
) -> Result<DiagTable> {
    check_order(m, 1)?;
    let q = b.q();
    let e = b.e();
    let n = q.len();
    let mut v = OrderTable::zeros(0, m, n);
    let mut w = OrderTable::zeros(0, m, n);
    let mut z = OrderTable::zeros(0, m - 1, n);
    v.order_mut(0).fill(1.0);
    w.order_mut(0).fill(1.0);
    let mut warnings = Vec::new();

    for p in 1..=m {
        fill_z(
            v.order(p - 1),
            w.order(p - 1),
            direction,
            z.order_mut(p - 1),
        );
        let zp = z.order(p - 1);

        let mut vp = vec![0.0; n];
        let v_prev = v.order(p - 1);
        let w_prev = w.order(p - 1);
        vp[n - 1] = w_prev[n - 1] / q[n - 1];
        for i in (0..n - 1).rev() {
            vp[i] = (e[i] * vp[i + 1] + (zp[i] - w_prev[i])) / q[i];
        }
        let mut wp = vec![0.0; n];
        wp[0] = v_prev[0] / q[0];
        for i in 1..n {
            wp[i] = (e[i - 1] * wp[i - 1] + (zp[i] - v_prev[i])) / q[i];
        }

        for (kind, row) in [(DiagKind::V, &vp), (DiagKind::W, &wp)] {
            for (i, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::Overflow {
                        stage: "subtractive diagonal recurrence",
                        order: p,
                    });
                }
                if value <= 0.0 {
                    warnings.push(CancellationWarning {
                        order: p,
                        index: i + 1,
                        table: kind,
                        value,
                    });
                }
            }
        }
        v.order_mut(p).copy_from_slice(&vp);
        w.order_mut(p).copy_from_slice(&wp);
    }

    Ok(DiagTable {
        order_max: m,
        v,
        w,
        z: Some(z),
        method: Method::Subtractive,
        warnings,
    })
}

/// Both Gram traces of one order, with any cancellation flagged on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct SidedTrace {
    /// Sum of `v^{(M)}`.
    pub upper: f64,
    /// Sum of `w^{(M)}`.
    pub lower: f64,
    pub warnings: Vec<CancellationWarning>,
}

/// `J_M(B)` by the subtractive recurrence with forward `z`.
pub fn trace_kyn11(b: &BidiagonalMatrix, m: usize) -> Result<SidedTrace> {
    let table = diag_powers_subtractive(b, m, ZDirection::Forward)?;
    Ok(SidedTrace {
        upper: table.trace_upper(m),
        lower: table.trace_lower(m),
        warnings: table.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(q: &[f64], e: &[f64]) -> BidiagonalMatrix {
        BidiagonalMatrix::new(q.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn first_order_examples() {
        assert_eq!(
            diag_first_order(&mat(&[1.0, 1.0], &[1.0])).unwrap(),
            (vec![2.0, 1.0], vec![1.0, 2.0])
        );
        assert_eq!(
            diag_first_order(&mat(&[2.0], &[])).unwrap(),
            (vec![0.5], vec![0.5])
        );
        assert_eq!(
            diag_first_order(&mat(&[1.0, 1.0, 1.0], &[1.0, 1.0])).unwrap(),
            (vec![3.0, 2.0, 1.0], vec![1.0, 2.0, 3.0])
        );
    }

    #[test]
    fn second_order_on_unit_matrix() {
        let b = mat(&[1.0, 1.0], &[1.0]);
        for dir in [ZDirection::Forward, ZDirection::Backward] {
            let t = diag_powers_subtractive(&b, 2, dir).unwrap();
            assert_eq!(t.v.order(0), &[1.0, 1.0]);
            assert_eq!(t.w.order(0), &[1.0, 1.0]);
            assert_eq!(t.v.order(2), &[5.0, 2.0]);
            assert_eq!(t.w.order(2), &[2.0, 5.0]);
            assert_eq!(t.z.as_ref().unwrap().order(1), &[4.0, 4.0]);
            assert!(t.warnings.is_empty());
        }
    }

    #[test]
    fn scalar_matrix_powers() {
        let t = diag_powers_subtractive(&mat(&[2.0], &[]), 3, ZDirection::Forward).unwrap();
        assert_eq!(t.v.order(3), &[0.125]);
        assert_eq!(t.w.order(3), &[0.125]);
        let j = trace_kyn11(&mat(&[2.0], &[]), 4).unwrap();
        assert_eq!(j.upper, 0.0625);
        assert_eq!(j.lower, 0.0625);
    }

    #[test]
    fn order_one_is_bitwise_first_order() {
        let b = mat(&[0.7, 1.3, 0.55, 1.9], &[1.1, 0.6, 1.7]);
        let (v1, w1) = diag_first_order(&b).unwrap();
        for dir in [ZDirection::Forward, ZDirection::Backward] {
            let t = diag_powers_subtractive(&b, 1, dir).unwrap();
            assert_eq!(t.v.order(1), v1.as_slice());
            assert_eq!(t.w.order(1), w1.as_slice());
        }
    }

    #[test]
    fn traces_on_unit_matrix() {
        let b = mat(&[1.0, 1.0], &[1.0]);
        let j1 = trace_kyn11(&b, 1).unwrap();
        assert_eq!((j1.upper, j1.lower), (3.0, 3.0));
        let j2 = trace_kyn11(&b, 2).unwrap();
        assert_eq!((j2.upper, j2.lower), (7.0, 7.0));
    }

    #[test]
    fn rejects_order_zero() {
        assert!(diag_powers_subtractive(&mat(&[1.0], &[]), 0, ZDirection::Forward).is_err());
    }
}
