//! Factorial-free, subtraction-free traces via `g~`/`G~` (and the mirrored
//! `g`/`G`), plus numerical checks of the transforms that tie every engine
//! together.
//!
//! Tilde variant, forward sweep:
//!
//! ```text
//! g~_1^(1) = 0,              G~_1^(1) = Bc_1
//! g~_i^(1) = F~_i G~_{i-1}^(1),  G~_i^(1) = g~_i^(1) + Bc_i
//! g~_1^(M) = 0
//! g~_i^(M) = F~_i g~_{i-1}^(M) + G~_{i-1}^(1) g~_i^(M-1) + sum_{k=2}^{M-1} g~_{i-1}^(k) g~_i^(M-k)
//! G~_i^(M) = M g~_i^(M) + G~_i^(1) G~_i^(M-1) + sum_{k=2}^{M-1} g~_i^(k) G~_i^(M-k)
//! J_M(B)   = sum_i G~_i^(M)
//! ```
//!
//! The plain variant mirrors it: `g_N = 0`, `G_N^(1) = Bc_N`, and the sweep
//! runs `i = N-1` down to `1` with `F_i` and neighbour `i+1`.

use crate::derivative::{factorial, h_tables_with, HTables};
use crate::error::{check_order, Error, Result};
use crate::matrix::{BidiagonalMatrix, Ratios};
use crate::relative_deviation;
use crate::table::OrderTable;
use crate::Variant;

#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedTables {
    /// `g~^{(m)}` (tilde) or `g^{(m)}` (plain), `m = 1..=M`.
    pub small: OrderTable,
    /// `G~^{(m)}` (tilde) or `G^{(m)}` (plain), `m = 1..=M`.
    pub big: OrderTable,
    pub variant: Variant,
}

impl UnifiedTables {
    pub fn max_order(&self) -> usize {
        self.big.max_order()
    }

    /// `J_m(B)`: the plain sum of `G^{(m)}`, no rescaling.
    pub fn trace(&self, m: usize) -> f64 {
        self.big.order_sum(m)
    }
}

pub fn unified_tables(b: &BidiagonalMatrix, m: usize, variant: Variant) -> Result<UnifiedTables> {
    check_order(m, 1)?;
    let r = b.ratios()?;
    unified_tables_with(&r, m, variant)
}

pub(crate) fn unified_tables_with(r: &Ratios, m: usize, variant: Variant) -> Result<UnifiedTables> {
    let n = r.b_check.len();
    let bc = &r.b_check;
    let ratio = |i: usize| match variant {
        Variant::Tilde => r.f_tilde_at(i),
        Variant::Plain => r.f[i],
    };
    // (i, neighbour towards the start of the sweep)
    let (start, sweep): (usize, Vec<(usize, usize)>) = match variant {
        Variant::Tilde => (0, (1..n).map(|i| (i, i - 1)).collect()),
        Variant::Plain => (n - 1, (0..n - 1).rev().map(|i| (i, i + 1)).collect()),
    };

    let mut small = OrderTable::zeros(1, m, n);
    let mut big = OrderTable::zeros(1, m, n);

    big.set(1, start, bc[start]);
    for &(i, j) in &sweep {
        let s = ratio(i) * big.get(1, j);
        small.set(1, i, s);
        big.set(1, i, s + bc[i]);
    }
    check_finite(&small, &big, 1)?;

    for mm in 2..=m {
        for &(i, j) in &sweep {
            let mut value = ratio(i) * small.get(mm, j) + big.get(1, j) * small.get(mm - 1, i);
            for k in 2..mm {
                value += small.get(k, j) * small.get(mm - k, i);
            }
            small.set(mm, i, value);
        }
        let mf = mm as f64;
        for i in 0..n {
            let mut value = mf * small.get(mm, i) + big.get(1, i) * big.get(mm - 1, i);
            for k in 2..mm {
                value += small.get(k, i) * big.get(mm - k, i);
            }
            big.set(mm, i, value);
        }
        check_finite(&small, &big, mm)?;
    }

    Ok(UnifiedTables {
        small,
        big,
        variant,
    })
}

fn check_finite(small: &OrderTable, big: &OrderTable, m: usize) -> Result<()> {
    let ok = small
        .order(m)
        .iter()
        .chain(big.order(m))
        .all(|x| x.is_finite())
        && big.order_sum(m).is_finite();
    if ok {
        Ok(())
    } else {
        Err(Error::Overflow {
            stage: "factorial-free recurrence",
            order: m,
        })
    }
}

/// `J_M(B) = sum_i G~_i^(M)` (or `sum_i G_i^(M)` for the plain variant).
pub fn trace_new(b: &BidiagonalMatrix, m: usize, variant: Variant) -> Result<f64> {
    Ok(unified_tables(b, m, variant)?.trace(m))
}

/// `J_1..=J_M` from a single table.
pub fn traces_new(b: &BidiagonalMatrix, m: usize, variant: Variant) -> Result<Vec<f64>> {
    let t = unified_tables(b, m, variant)?;
    Ok((1..=m).map(|k| t.trace(k)).collect())
}

/// Largest relative deviations of the factorial transforms up to order `M`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransformReport {
    pub max_order: usize,
    /// `h_i^(m)` vs `m! g~_i^(m)`, `m >= 2`.
    pub h_vs_gtilde: f64,
    /// `h~_i^(m)` vs `m! g_i^(m)`, `m >= 2`.
    pub htilde_vs_g: f64,
    /// `H_i^(m)` vs `(m-1)! G~_i^(m)`.
    pub big_h_vs_big_gtilde: f64,
    /// `H~_i^(m)` vs `(m-1)! G_i^(m)`.
    pub big_htilde_vs_big_g: f64,
}

impl TransformReport {
    pub fn max(&self) -> f64 {
        self.h_vs_gtilde
            .max(self.htilde_vs_g)
            .max(self.big_h_vs_big_gtilde)
            .max(self.big_htilde_vs_big_g)
    }
}

fn max_transform_deviation(
    lhs: &OrderTable,
    rhs: &OrderTable,
    from: usize,
    scale: impl Fn(usize) -> f64,
) -> f64 {
    let mut worst = 0.0f64;
    for m in from..=lhs.max_order() {
        let s = scale(m);
        for (a, b) in lhs.order(m).iter().zip(rhs.order(m)) {
            worst = worst.max(relative_deviation(*a, s * b));
        }
    }
    worst
}

/// Compares the determinant-derivative tables against factorial rescalings
/// of the factorial-free tables.
pub fn verify_transforms(b: &BidiagonalMatrix, m: usize) -> Result<TransformReport> {
    check_order(m, 1)?;
    let r = b.ratios()?;
    let h: HTables = h_tables_with(&r, m, Variant::Plain)?;
    let ht: HTables = h_tables_with(&r, m, Variant::Tilde)?;
    let gt = unified_tables_with(&r, m, Variant::Tilde)?;
    let g = unified_tables_with(&r, m, Variant::Plain)?;
    Ok(TransformReport {
        max_order: m,
        h_vs_gtilde: max_transform_deviation(&h.h, &gt.small, 2, factorial),
        htilde_vs_g: max_transform_deviation(&ht.h, &g.small, 2, factorial),
        big_h_vs_big_gtilde: max_transform_deviation(&h.big_h, &gt.big, 1, |k| factorial(k - 1)),
        big_htilde_vs_big_g: max_transform_deviation(&ht.big_h, &g.big, 1, |k| factorial(k - 1)),
    })
}

/// `J_2` and `J_3` by the closed expressions in `g~` and in `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowOrderIdentities {
    /// `sum_i (2 g~_i^(2) + (h_i^(1))^2)`.
    pub j2_g: f64,
    /// `sum_i (h_i^(2) + (h_i^(1))^2)`.
    pub j2_h: f64,
    /// `sum_i (3 g~_i^(3) + 3 g~_i^(2) h_i^(1) + (h_i^(1))^3)`.
    pub j3_g: f64,
    /// `(1/2) sum_i (h_i^(3) + 3 h_i^(2) h_i^(1) + 2 (h_i^(1))^3)`.
    pub j3_h: f64,
}

impl LowOrderIdentities {
    pub fn j2_deviation(&self) -> f64 {
        relative_deviation(self.j2_g, self.j2_h)
    }

    pub fn j3_deviation(&self) -> f64 {
        relative_deviation(self.j3_g, self.j3_h)
    }
}

pub fn trace_identities_j2_j3(b: &BidiagonalMatrix) -> Result<LowOrderIdentities> {
    let r = b.ratios()?;
    let h = h_tables_with(&r, 3, Variant::Plain)?;
    let gt = unified_tables_with(&r, 3, Variant::Tilde)?;
    let (mut j2_g, mut j2_h, mut j3_g, mut j3_h) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..b.n() {
        let h1 = h.h.get(1, i);
        let h2 = h.h.get(2, i);
        let h3 = h.h.get(3, i);
        let g2 = gt.small.get(2, i);
        let g3 = gt.small.get(3, i);
        j2_g += 2.0 * g2 + h1 * h1;
        j2_h += h2 + h1 * h1;
        j3_g += 3.0 * g3 + 3.0 * g2 * h1 + h1 * h1 * h1;
        j3_h += h3 + 3.0 * h2 * h1 + 2.0 * h1 * h1 * h1;
    }
    Ok(LowOrderIdentities {
        j2_g,
        j2_h,
        j3_g,
        j3_h: 0.5 * j3_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(q: &[f64], e: &[f64]) -> BidiagonalMatrix {
        BidiagonalMatrix::new(q.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn tilde_tables_on_unit_matrix() {
        let t = unified_tables(&mat(&[1.0, 1.0], &[1.0]), 3, Variant::Tilde).unwrap();
        assert_eq!(t.small.order(1), &[0.0, 1.0]);
        assert_eq!(t.big.order(1), &[1.0, 2.0]);
        assert_eq!(t.small.order(2), &[0.0, 1.0]);
        assert_eq!(t.big.order(2), &[1.0, 6.0]);
        assert_eq!(t.trace(3), 18.0);
    }

    #[test]
    fn plain_tables_on_unit_matrix() {
        let t = unified_tables(&mat(&[1.0, 1.0], &[1.0]), 3, Variant::Plain).unwrap();
        assert_eq!(t.small.order(1), &[1.0, 0.0]);
        assert_eq!(t.big.order(1), &[2.0, 1.0]);
        assert_eq!(t.big.order(2), &[6.0, 1.0]);
        assert_eq!(t.trace(3), 18.0);
    }

    #[test]
    fn scalar_matrix_collapses_to_powers() {
        for variant in [Variant::Tilde, Variant::Plain] {
            let t = unified_tables(&mat(&[4.0], &[]), 7, variant).unwrap();
            for m in 1..=7 {
                assert_eq!(t.small.get(m, 0), 0.0);
                assert_eq!(t.big.get(m, 0), 4f64.powi(-(m as i32)));
            }
            assert_eq!(
                trace_new(&mat(&[2.0], &[]), 10, variant).unwrap(),
                2f64.powi(-10)
            );
        }
    }

    #[test]
    fn traces_on_unit_matrix() {
        let b = mat(&[1.0, 1.0], &[1.0]);
        assert_eq!(
            traces_new(&b, 3, Variant::Tilde).unwrap(),
            vec![3.0, 7.0, 18.0]
        );
    }

    #[test]
    fn transforms_on_unit_matrix() {
        let report = verify_transforms(&mat(&[1.0, 1.0], &[1.0]), 2).unwrap();
        assert_eq!(report.max(), 0.0);
    }

    #[test]
    fn transforms_on_scalar_matrix() {
        let report = verify_transforms(&mat(&[0.3], &[]), 6).unwrap();
        assert!(report.h_vs_gtilde == 0.0 && report.htilde_vs_g == 0.0);
        assert!(report.max() <= 1e-15);
    }

    #[test]
    fn low_order_identities() {
        let id = trace_identities_j2_j3(&mat(&[1.0, 1.0], &[1.0])).unwrap();
        assert_eq!((id.j2_g, id.j2_h), (7.0, 7.0));
        assert_eq!((id.j3_g, id.j3_h), (18.0, 18.0));

        let c = 1.7;
        let id = trace_identities_j2_j3(&mat(&[c], &[])).unwrap();
        for (got, want) in [
            (id.j2_g, c.powi(-2)),
            (id.j2_h, c.powi(-2)),
            (id.j3_g, c.powi(-3)),
            (id.j3_h, c.powi(-3)),
        ] {
            assert!((got / want - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn overflow_is_reported_with_order() {
        let b = mat(&[1e-3, 1e-3], &[1e-3]);
        match unified_tables(&b, 400, Variant::Tilde) {
            Err(Error::Overflow { order, .. }) => assert!(order > 50 && order < 400),
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}
