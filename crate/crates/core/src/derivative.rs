//! Traces from the derivatives of the characteristic determinant at zero.
//!
//! Plain variant (sweep `i = 1..N` with `F~`):
//!
//! ```text
//! h_1^(1) = 1/q_1,  h_i^(1) = F~_i h_{i-1}^(1) + 1/q_i
//! h_1^(p) = 0                                                     (p >= 2)
//! h_i^(p) = F~_i (h_{i-1}^(p) + p h_{i-1}^(1) h_{i-1}^(p-1))
//!           + sum_{k=1}^{p-2} C(p,k) h_{i-1}^(k) h_i^(p-k)
//! H_i^(1) = h_i^(1)
//! H_i^(p) = h_i^(p) + sum_{k=1}^{p-1} C(p-1,k) h_i^(k) H_i^(p-k)
//! Tr((B^T B)^{-p}) = sum_i H_i^(p) / (p-1)!
//! ```
//!
//! The tilde variant is the mirror image: backward sweep with `F` from
//! `h~_N^(1) = 1/q_N`, yielding `Tr((B B^T)^{-p})`.
//!
//! `H^(p)` carries a `(p-1)!` factor, so this engine overflows long before
//! the traces themselves do.

use crate::error::{check_order, Error, Result};
use crate::matrix::{BidiagonalMatrix, Ratios};
use crate::table::OrderTable;
use crate::Variant;

/// First order at which `(M-1)!` is not representable in binary64.
pub const FACTORIAL_GUARD_ORDER: usize = 172;

/// Pascal's triangle, exact in `u128` while it fits.
///
/// Rows whose entries exceed `u128` continue in binary64 Pascal sums; an
/// entry that is not finite in binary64 is an overflow.
#[derive(Debug, Clone)]
pub struct BinomialCache {
    exact: Vec<Vec<u128>>,
    approx: Vec<Vec<f64>>,
}

impl BinomialCache {
    pub fn new(max_row: usize) -> Result<Self> {
        let mut cache = Self {
            exact: vec![vec![1]],
            approx: vec![vec![1.0]],
        };
        cache.extend_to(max_row)?;
        Ok(cache)
    }

    pub fn max_row(&self) -> usize {
        self.approx.len() - 1
    }

    /// Appends rows up to `max_row`, failing with the first row that overflows.
    pub fn extend_to(&mut self, max_row: usize) -> Result<()> {
        while self.max_row() < max_row {
            let n = self.max_row() + 1;
            let prev_exact = &self.exact[n - 1];
            let prev_approx = &self.approx[n - 1];
            let exact: Option<Vec<u128>> = if prev_exact.is_empty() {
                None
            } else {
                (0..=n)
                    .map(|k| {
                        let left = if k == 0 { 0 } else { prev_exact[k - 1] };
                        let right = if k == n { 0 } else { prev_exact[k] };
                        left.checked_add(right)
                    })
                    .collect()
            };
            let approx: Vec<f64> = match &exact {
                Some(row) => row.iter().map(|&c| c as f64).collect(),
                None => (0..=n)
                    .map(|k| {
                        let left = if k == 0 { 0.0 } else { prev_approx[k - 1] };
                        let right = if k == n { 0.0 } else { prev_approx[k] };
                        left + right
                    })
                    .collect(),
            };
            if !approx.iter().all(|c| c.is_finite()) {
                return Err(Error::FactorialOverflow { order: n });
            }
            self.exact.push(exact.unwrap_or_default());
            self.approx.push(approx);
        }
        Ok(())
    }

    /// `C(n, k)` exactly, when it fits in `u128`.
    pub fn exact(&self, n: usize, k: usize) -> Option<u128> {
        self.exact.get(n).and_then(|row| row.get(k)).copied()
    }

    /// `C(n, k)` as binary64.
    #[inline]
    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.approx[n][k]
    }
}

/// `h^{(1..=M)}` and `H^{(1..=M)}` for one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct HTables {
    pub h: OrderTable,
    pub big_h: OrderTable,
    pub variant: Variant,
}

impl HTables {
    pub fn max_order(&self) -> usize {
        self.h.max_order()
    }

    /// `sum_i H_i^(p) / (p-1)!`.
    pub fn trace(&self, p: usize) -> f64 {
        self.big_h.order_sum(p) / factorial(p - 1)
    }
}

/// `n!` in binary64 (infinite from 171 on).
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn h_tables(b: &BidiagonalMatrix, m: usize, variant: Variant) -> Result<HTables> {
    check_order(m, 1)?;
    let r = b.ratios()?;
    h_tables_with(&r, m, variant)
}

/// Storage index `i` and its neighbour toward the start of the sweep.
fn sweep(n: usize, variant: Variant) -> Box<dyn Iterator<Item = (usize, usize)>> {
    match variant {
        Variant::Plain => Box::new((1..n).map(|i| (i, i - 1))),
        Variant::Tilde => Box::new((0..n.saturating_sub(1)).rev().map(|i| (i, i + 1))),
    }
}

pub(crate) fn h_tables_with(r: &Ratios, m: usize, variant: Variant) -> Result<HTables> {
    let n = r.b_check.len();
    let bc = &r.b_check;
    let ratio = |i: usize| match variant {
        Variant::Plain => r.f_tilde_at(i),
        Variant::Tilde => r.f[i],
    };
    let start = match variant {
        Variant::Plain => 0,
        Variant::Tilde => n - 1,
    };
    let mut h = OrderTable::zeros(1, m, n);
    let mut big_h = OrderTable::zeros(1, m, n);
    let mut binomials = BinomialCache::new(1)?;

    h.set(1, start, bc[start]);
    for (i, prev) in sweep(n, variant) {
        h.set(1, i, ratio(i) * h.get(1, prev) + bc[i]);
    }
    if !h.order(1).iter().all(|x| x.is_finite()) {
        return Err(Error::FactorialOverflow { order: 1 });
    }
    big_h.order_mut(1).copy_from_slice(&h.values()[..n]);

    for p in 2..=m {
        if p >= FACTORIAL_GUARD_ORDER {
            return Err(Error::FactorialOverflow { order: p });
        }
        binomials.extend_to(p)?;
        let pf = p as f64;
        for (i, prev) in sweep(n, variant) {
            let mut value = ratio(i) * (h.get(p, prev) + pf * h.get(1, prev) * h.get(p - 1, prev));
            for k in 1..p - 1 {
                value += binomials.get(p, k) * h.get(k, prev) * h.get(p - k, i);
            }
            h.set(p, i, value);
        }
        for i in 0..n {
            let mut value = h.get(p, i);
            for k in 1..p {
                value += binomials.get(p - 1, k) * h.get(k, i) * big_h.get(p - k, i);
            }
            big_h.set(p, i, value);
        }
        let finite = h
            .order(p)
            .iter()
            .chain(big_h.order(p))
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::FactorialOverflow { order: p });
        }
    }

    Ok(HTables { h, big_h, variant })
}

/// `J_M(B)` by the determinant-derivative recurrence.
pub fn trace_ykyy14(b: &BidiagonalMatrix, m: usize, variant: Variant) -> Result<f64> {
    Ok(h_tables(b, m, variant)?.trace(m))
}

/// `J_1..=J_M` from a single table.
pub fn traces_ykyy14(b: &BidiagonalMatrix, m: usize, variant: Variant) -> Result<Vec<f64>> {
    let t = h_tables(b, m, variant)?;
    let traces: Vec<f64> = (1..=m).map(|p| t.trace(p)).collect();
    if let Some(p) = traces.iter().position(|x| !x.is_finite()) {
        return Err(Error::FactorialOverflow { order: p + 1 });
    }
    Ok(traces)
}
