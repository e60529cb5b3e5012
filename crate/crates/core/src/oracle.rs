//! Brute-force references for every recurrence engine.
//!
//! Everything here works on explicit dense matrices: `B^{-1}` by
//! back-substitution, Gram inverse powers by repeated products, path sums by
//! exhaustive enumeration, and `sigma_min` by Sturm-count bisection. None of it
//! shares code with the recurrences it checks.

use crate::error::{check_order, Error, Result};
use crate::matrix::BidiagonalMatrix;

/// Default number of product terms a single path-sum enumeration may visit.
pub const DEFAULT_PATH_SUM_BUDGET: u64 = 10_000_000;

/// Symmetry tolerance for matrices tagged symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            m.entries[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    /// Explicit upper bidiagonal `B` with entries `sqrt(q_i)`, `sqrt(e_i)`.
    pub fn from_bidiagonal(b: &BidiagonalMatrix) -> Self {
        let n = b.n();
        let mut m = Self::zeros(n);
        for (i, d) in b.diagonal().into_iter().enumerate() {
            m[(i, i)] = d;
        }
        for (i, s) in b.superdiagonal().into_iter().enumerate() {
            m[(i, i + 1)] = s;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|x| x.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            (0..i).all(|j| {
                let (a, b) = (self[(i, j)], self[(j, i)]);
                (a - b).abs() <= tol * a.abs().max(1.0)
            })
        })
    }

    fn symmetrize(&mut self) {
        for i in 0..self.n {
            for j in 0..i {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.n + j]
    }
}

/// Which Gram matrix a power refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(B^T B)^{-m}`.
    Upper,
    /// `(B B^T)^{-m}`.
    Lower,
}

/// `S = B^{-1}` by column-wise back-substitution on the explicit bidiagonal.
pub fn invert_bidiagonal(b: &BidiagonalMatrix) -> Result<DenseMatrix> {
    let n = b.n();
    let diag = b.diagonal();
    let sup = b.superdiagonal();
    let mut s = DenseMatrix::zeros(n);
    for j in 0..n {
        s[(j, j)] = 1.0 / diag[j];
        for i in (0..j).rev() {
            s[(i, j)] = -sup[i] * s[(i + 1, j)] / diag[i];
        }
    }
    if !s.is_finite() {
        return Err(Error::Overflow {
            stage: "dense inverse",
            order: 1,
        });
    }
    Ok(s)
}

/// First Gram inverse: `V = S S^T` for [`Side::Upper`], `W = S^T S` for [`Side::Lower`].
fn gram_inverse(s: &DenseMatrix, side: Side) -> DenseMatrix {
    let mut g = match side {
        Side::Upper => s.matmul(&s.transpose()),
        Side::Lower => s.transpose().matmul(s),
    };
    g.symmetrize();
    g
}

/// `(B^T B)^{-m}` or `(B B^T)^{-m}` formed from products of `B^{-1}`.
pub fn gram_inverse_power(b: &BidiagonalMatrix, side: Side, m: usize) -> Result<DenseMatrix> {
    check_order(m, 1)?;
    let s = invert_bidiagonal(b)?;
    let base = gram_inverse(&s, side);
    let mut acc = base.clone();
    for order in 2..=m {
        acc = acc.matmul(&base);
        acc.symmetrize();
        if !acc.is_finite() {
            return Err(Error::Overflow {
                stage: "dense Gram power",
                order,
            });
        }
    }
    if !acc.is_finite() {
        return Err(Error::Overflow {
            stage: "dense Gram power",
            order: 1,
        });
    }
    Ok(acc)
}

/// Dense traces of both Gram inverse powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTrace {
    pub upper: f64,
    pub lower: f64,
}

impl OracleTrace {
    pub fn relative_disagreement(&self) -> f64 {
        crate::relative_deviation(self.upper, self.lower)
    }
}

pub fn trace_oracle_sides(b: &BidiagonalMatrix, m: usize) -> Result<OracleTrace> {
    Ok(OracleTrace {
        upper: gram_inverse_power(b, Side::Upper, m)?.trace(),
        lower: gram_inverse_power(b, Side::Lower, m)?.trace(),
    })
}

/// `J_m(B) = Tr((B^T B)^{-m})` by dense products.
pub fn trace_oracle(b: &BidiagonalMatrix, m: usize) -> Result<f64> {
    Ok(gram_inverse_power(b, Side::Upper, m)?.trace())
}

/// `J_1 .. J_m_max` (upper side), sharing the products between orders.
pub fn trace_oracle_all(b: &BidiagonalMatrix, m_max: usize, side: Side) -> Result<Vec<f64>> {
    check_order(m_max, 1)?;
    let s = invert_bidiagonal(b)?;
    let base = gram_inverse(&s, side);
    let mut acc = base.clone();
    let mut traces = vec![acc.trace()];
    for order in 2..=m_max {
        acc = acc.matmul(&base);
        acc.symmetrize();
        if !acc.is_finite() {
            return Err(Error::Overflow {
                stage: "dense Gram power",
                order,
            });
        }
        traces.push(acc.trace());
    }
    Ok(traces)
}

/// Nested product sum over index paths restricted to `allowed`, pivoting at `i`:
/// `sum over j_1..j_{m-1} in allowed of G[i,j_1] G[j_1,j_2] ... G[j_{m-1},i]`.
fn enumerate_paths(
    g: &DenseMatrix,
    i: usize,
    m: usize,
    allowed: std::ops::Range<usize>,
    budget: u64,
) -> Result<f64> {
    let width = allowed.len();
    let depth = m - 1;
    if width == 0 {
        return Ok(0.0);
    }
    let terms = (width as u128)
        .checked_pow(depth as u32)
        .unwrap_or(u128::MAX);
    if terms > budget as u128 {
        return Err(Error::ComplexityGuard { terms, budget });
    }
    let mut path = vec![allowed.start; depth];
    let mut total = 0.0;
    loop {
        let mut product = g[(i, path[0])];
        for w in path.windows(2) {
            product *= g[(w[0], w[1])];
        }
        product *= g[(path[depth - 1], i)];
        total += product;

        // odometer increment, last index fastest
        let mut pos = depth;
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            path[pos] += 1;
            if path[pos] < allowed.end {
                break;
            }
            path[pos] = allowed.start;
        }
    }
}

fn check_path_args(b: &BidiagonalMatrix, i: usize, m: usize) -> Result<()> {
    check_order(m, 2)?;
    if i == 0 || i > b.n() {
        return Err(Error::IndexOutOfRange { index: i, n: b.n() });
    }
    Ok(())
}

/// Path-sum value of `g~_i^{(m)}` over `W = (B B^T)^{-1}` and indices `1..i-1`.
///
/// `i` is 1-based.
pub fn path_sum_gtilde(b: &BidiagonalMatrix, i: usize, m: usize, budget: u64) -> Result<f64> {
    check_path_args(b, i, m)?;
    let w = gram_inverse_power(b, Side::Lower, 1)?;
    path_sum_gtilde_with(&w, i, m, budget)
}

/// As [`path_sum_gtilde`], reusing a precomputed `W`.
pub fn path_sum_gtilde_with(w: &DenseMatrix, i: usize, m: usize, budget: u64) -> Result<f64> {
    let i0 = i - 1;
    enumerate_paths(w, i0, m, 0..i0, budget)
}

/// Path-sum value of `g_i^{(m)}` over `V = (B^T B)^{-1}` and indices `i+1..N`.
///
/// `i` is 1-based.
pub fn path_sum_g(b: &BidiagonalMatrix, i: usize, m: usize, budget: u64) -> Result<f64> {
    check_path_args(b, i, m)?;
    let v = gram_inverse_power(b, Side::Upper, 1)?;
    path_sum_g_with(&v, i, m, budget)
}

/// As [`path_sum_g`], reusing a precomputed `V`.
pub fn path_sum_g_with(v: &DenseMatrix, i: usize, m: usize, budget: u64) -> Result<f64> {
    let i0 = i - 1;
    enumerate_paths(v, i0, m, i..v.n(), budget)
}

/// Number of eigenvalues of `B^T B` strictly below `tau`.
///
/// Sturm count from the signs of the pivots of `B^T B - tau I = L D L^T`,
/// evaluated in the stationary qd form directly on `(q, e)`.
pub fn sturm_count(b: &BidiagonalMatrix, tau: f64) -> usize {
    let q = b.q();
    let e = b.e();
    let n = q.len();
    let mut count = 0;
    let mut s = -tau;
    for i in 0..n {
        let mut d = q[i] + s;
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
        if i + 1 < n {
            s = e[i] * (s / d) - tau;
        }
    }
    count
}

/// Relative width at which bisection on `sigma_min^2` stops.
const BISECTION_RTOL: f64 = 1e-15;

/// Minimal singular value of `B` via Sturm-count bisection on `B^T B`.
pub fn sigma_min_oracle(b: &BidiagonalMatrix) -> Result<f64> {
    let q = b.q();
    let e = b.e();
    let n = q.len();
    // lambda_min <= min diagonal of B^T B
    let mut hi = (0..n)
        .map(|i| q[i] + if i > 0 { e[i - 1] } else { 0.0 })
        .fold(f64::INFINITY, f64::min);
    while sturm_count(b, hi) == 0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Overflow {
                stage: "sigma_min bisection",
                order: 0,
            });
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..20_000 {
        if hi - lo <= BISECTION_RTOL * hi {
            break;
        }
        let mid = if lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        let mid = if mid <= lo || mid >= hi {
            0.5 * (lo + hi)
        } else {
            mid
        };
        if sturm_count(b, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if lo == 0.0 && hi < f64::MIN_POSITIVE {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).sqrt())
}
