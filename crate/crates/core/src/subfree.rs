//! Subtraction-free diagonal recurrence built on the convolution tables
//! `g` and `g~`.
//!
//! With `Bc_i = 1/q_i`, `F_i = e_i/q_i`, `F~_i = e_{i-1}/q_i`:
//!
//! ```text
//! g_N^(r) = 0,   g_i^(1) = F_i v_{i+1}^(1)
//! g_i^(r) = F_i g_{i+1}^(r) + Bc_{i+1} g_i^(r-1) + sum_{k=1}^{r-1} g_{i+1}^(k) g_i^(r-k)
//!
//! g~_1^(r) = 0,  g~_i^(1) = F~_i w_{i-1}^(1)
//! g~_i^(r) = F~_i g~_{i-1}^(r) + Bc_{i-1} g~_i^(r-1) + sum_{k=1}^{r-1} g~_{i-1}^(k) g~_i^(r-k)
//! ```
//!
//! and for `s >= 2`
//!
//! ```text
//! v_N^(s) = Bc_N w_N^(s-1)
//! v_i^(s) = F_i v_{i+1}^(s) + Bc_i w_i^(s-1) + 2 sum_{k=1}^{s-1} g_i^(k) w_i^(s-k)
//! w_1^(s) = Bc_1 v_1^(s-1)
//! w_i^(s) = F~_i w_{i-1}^(s) + Bc_i v_i^(s-1) + 2 sum_{k=1}^{s-1} g~_i^(k) v_i^(s-k)
//! ```
//!
//! Only additions, multiplications and divisions of positive numbers occur.

use crate::error::{check_order, Error, Result};
use crate::matrix::{BidiagonalMatrix, Ratios};
use crate::subtractive::diag_first_order;
use crate::table::{DiagTable, OrderTable};
use crate::Method;

/// `g^{(1..=M)}`, `g~^{(1..=M)}` and the first-order diagonals they are seeded from.
#[derive(Debug, Clone, PartialEq)]
pub struct GTables {
    pub g: OrderTable,
    pub g_tilde: OrderTable,
    /// `v^{(1)}` in the ratio form `F_i v_{i+1} + Bc_i = g_i^(1) + Bc_i`.
    pub v1: Vec<f64>,
    /// `w^{(1)}` in the ratio form `F~_i w_{i-1} + Bc_i = g~_i^(1) + Bc_i`.
    pub w1: Vec<f64>,
}

fn overflow(order: usize) -> Error {
    Error::Overflow {
        stage: "subtraction-free recurrence",
        order,
    }
}

fn ensure_finite(values: &[f64], order: usize) -> Result<()> {
    if values.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(overflow(order))
    }
}

/// Builds `g`, `g~` up to order `m` in one pass with the first-order diagonals.
pub fn g_tables(b: &BidiagonalMatrix, m: usize) -> Result<GTables> {
    check_order(m, 1)?;
    let r = b.ratios()?;
    g_tables_with(&r, m)
}

pub(crate) fn g_tables_with(r: &Ratios, m: usize) -> Result<GTables> {
    let n = r.b_check.len();
    let bc = &r.b_check;
    let mut g = OrderTable::zeros(1, m, n);
    let mut gt = OrderTable::zeros(1, m, n);
    let mut v1 = vec![0.0; n];
    let mut w1 = vec![0.0; n];

    v1[n - 1] = bc[n - 1];
    for i in (0..n - 1).rev() {
        let gi = r.f[i] * v1[i + 1];
        g.set(1, i, gi);
        v1[i] = gi + bc[i];
    }
    w1[0] = bc[0];
    for i in 1..n {
        let gi = r.f_tilde_at(i) * w1[i - 1];
        gt.set(1, i, gi);
        w1[i] = gi + bc[i];
    }
    ensure_finite(&v1, 1)?;
    ensure_finite(&w1, 1)?;

    for order in 2..=m {
        for i in (0..n - 1).rev() {
            let mut value = r.f[i] * g.get(order, i + 1) + bc[i + 1] * g.get(order - 1, i);
            for k in 1..order {
                value += g.get(k, i + 1) * g.get(order - k, i);
            }
            g.set(order, i, value);
        }
        for i in 1..n {
            let mut value =
                r.f_tilde_at(i) * gt.get(order, i - 1) + bc[i - 1] * gt.get(order - 1, i);
            for k in 1..order {
                value += gt.get(k, i - 1) * gt.get(order - k, i);
            }
            gt.set(order, i, value);
        }
        ensure_finite(g.order(order), order)?;
        ensure_finite(gt.order(order), order)?;
    }

    Ok(GTables {
        g,
        g_tilde: gt,
        v1,
        w1,
    })
}

/// `v^{(0..=M)}`, `w^{(0..=M)}` by the subtraction-free recurrence (`M >= 2`).
pub fn diag_powers_subfree(b: &BidiagonalMatrix, m: usize) -> Result<DiagTable> {
    check_order(m, 2)?;
    let r = b.ratios()?;
    // v^(s), w^(s) only need g, g~ up to order s-1
    match g_tables_with(&r, m - 1) {
        Ok(tables) => diag_from_g_tables(&r, &tables, m),
        // g^(k) overflowed: v^(k+1) is out of reach, but v^(k) may fail first
        Err(Error::Overflow { order: k, .. }) if k >= 2 => {
            let tables = g_tables_with(&r, k - 1)?;
            diag_from_g_tables(&r, &tables, k)?;
            Err(overflow(k + 1))
        }
        Err(e) => Err(e),
    }
}

#[allow(clippy::needless_range_loop)]
fn diag_from_g_tables(r: &Ratios, t: &GTables, m: usize) -> Result<DiagTable> {
    let n = r.b_check.len();
    let bc = &r.b_check;
    let mut v = OrderTable::zeros(0, m, n);
    let mut w = OrderTable::zeros(0, m, n);
    v.order_mut(0).fill(1.0);
    w.order_mut(0).fill(1.0);
    v.order_mut(1).copy_from_slice(&t.v1);
    w.order_mut(1).copy_from_slice(&t.w1);

    for s in 2..=m {
        v.set(s, n - 1, bc[n - 1] * w.get(s - 1, n - 1));
        for i in (0..n - 1).rev() {
            let mut conv = 0.0;
            for k in 1..s {
                conv += t.g.get(k, i) * w.get(s - k, i);
            }
            let value = r.f[i] * v.get(s, i + 1) + bc[i] * w.get(s - 1, i) + 2.0 * conv;
            v.set(s, i, value);
        }
        w.set(s, 0, bc[0] * v.get(s - 1, 0));
        for i in 1..n {
            let mut conv = 0.0;
            for k in 1..s {
                conv += t.g_tilde.get(k, i) * v.get(s - k, i);
            }
            let value = r.f_tilde_at(i) * w.get(s, i - 1) + bc[i] * v.get(s - 1, i) + 2.0 * conv;
            w.set(s, i, value);
        }
        ensure_finite(v.order(s), s)?;
        ensure_finite(w.order(s), s)?;
    }

    Ok(DiagTable {
        order_max: m,
        v,
        w,
        z: None,
        method: Method::SubtractionFree,
        warnings: Vec::new(),
    })
}

/// `J_M(B)` as the sum of `v^{(M)}`; order 1 uses [`diag_first_order`].
pub fn trace_ykn12(b: &BidiagonalMatrix, m: usize) -> Result<f64> {
    check_order(m, 1)?;
    if m == 1 {
        let (v1, _) = diag_first_order(b)?;
        return Ok(v1.iter().sum());
    }
    Ok(diag_powers_subfree(b, m)?.trace_upper(m))
}

/// `J_1..=J_M` from a single table.
pub fn traces_ykn12(b: &BidiagonalMatrix, m: usize) -> Result<Vec<f64>> {
    check_order(m, 1)?;
    let (v1, _) = diag_first_order(b)?;
    let mut out = vec![v1.iter().sum()];
    if m >= 2 {
        let table = diag_powers_subfree(b, m)?;
        out.extend((2..=m).map(|s| table.trace_upper(s)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{gram_inverse_power, Side};

    fn mat(q: &[f64], e: &[f64]) -> BidiagonalMatrix {
        BidiagonalMatrix::new(q.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn g_tables_on_unit_matrix() {
        let t = g_tables(&mat(&[1.0, 1.0], &[1.0]), 2).unwrap();
        assert_eq!(t.g.order(1), &[1.0, 0.0]);
        assert_eq!(t.g_tilde.order(1), &[0.0, 1.0]);
        assert_eq!(t.g.order(2), &[1.0, 0.0]);
        assert_eq!(t.g_tilde.order(2), &[0.0, 1.0]);
    }

    #[test]
    fn base_rows_are_zero() {
        let b = mat(&[0.9, 1.4, 0.6, 1.2, 1.7], &[1.3, 0.8, 1.9, 0.5]);
        let t = g_tables(&b, 5).unwrap();
        for (order, row) in t.g.rows() {
            assert_eq!(row[4], 0.0, "g_N^({order})");
            assert!(row[..4].iter().all(|&x| x > 0.0));
        }
        for (order, row) in t.g_tilde.rows() {
            assert_eq!(row[0], 0.0, "g~_1^({order})");
            assert!(row[1..].iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn second_order_on_unit_matrix() {
        let t = diag_powers_subfree(&mat(&[1.0, 1.0], &[1.0]), 2).unwrap();
        assert_eq!(t.v.order(2), &[5.0, 2.0]);
        assert_eq!(t.w.order(2), &[2.0, 5.0]);
    }

    #[test]
    fn scalar_matrix() {
        let t = diag_powers_subfree(&mat(&[2.0], &[]), 3).unwrap();
        assert_eq!(t.v.order(3), &[0.125]);
        assert_eq!(trace_ykn12(&mat(&[3.0], &[]), 2).unwrap(), 1.0 / 9.0);
    }

    #[test]
    fn matches_dense_diagonals() {
        let b = mat(&[1.0, 2.0, 3.0], &[1.0, 1.0]);
        let t = diag_powers_subfree(&b, 2).unwrap();
        let v2 = gram_inverse_power(&b, Side::Upper, 2).unwrap().diagonal();
        let w2 = gram_inverse_power(&b, Side::Lower, 2).unwrap().diagonal();
        for i in 0..3 {
            assert!(((t.v.get(2, i) - v2[i]) / v2[i]).abs() <= 1e-10);
            assert!(((t.w.get(2, i) - w2[i]) / w2[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn traces_on_unit_matrix() {
        let b = mat(&[1.0, 1.0], &[1.0]);
        assert_eq!(trace_ykn12(&b, 1).unwrap(), 3.0);
        assert_eq!(trace_ykn12(&b, 2).unwrap(), 7.0);
        assert_eq!(traces_ykn12(&b, 3).unwrap(), vec![3.0, 7.0, 18.0]);
    }

    #[test]
    fn requires_order_two() {
        assert!(matches!(
            diag_powers_subfree(&mat(&[1.0], &[]), 1),
            Err(Error::InvalidOrder { .. })
        ));
    }
}
