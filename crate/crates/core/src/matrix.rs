//! The positive upper bidiagonal matrix and its derived ratios.
//!
//! A matrix of order `N` is stored through its squared entries: `q` holds the
//! `N` squared diagonal entries and `e` the `N - 1` squared superdiagonal
//! entries, so that
//!
//! ```text
//!     | sqrt(q_1)  sqrt(e_1)                         |
//! B = |            sqrt(q_2)  sqrt(e_2)              |
//!     |                       ...        ...         |
//!     |                                  sqrt(q_N)   |
//! ```
//!
//! Documentation uses 1-based indices; storage is 0-based.

use crate::error::{Error, Result, Sequence};

#[derive(Debug, Clone, PartialEq)]
pub struct BidiagonalMatrix {
    q: Vec<f64>,
    e: Vec<f64>,
}

impl BidiagonalMatrix {
    /// Validates `(q, e)` and builds the matrix.
    ///
    /// Requires `q` nonempty, `e.len() == q.len() - 1`, and every entry finite
    /// and strictly positive.
    pub fn new(q: Vec<f64>, e: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::DimensionMismatch(
                "q must contain at least one entry".into(),
            ));
        }
        if e.len() + 1 != q.len() {
            return Err(Error::DimensionMismatch(format!(
                "e must have exactly N - 1 = {} entries, got {}",
                q.len() - 1,
                e.len()
            )));
        }
        for (sequence, values) in [(Sequence::Q, &q), (Sequence::E, &e)] {
            for (i, &value) in values.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFiniteEntry {
                        sequence,
                        index: i + 1,
                    });
                }
                if value <= 0.0 {
                    return Err(Error::NonPositiveEntry {
                        sequence,
                        index: i + 1,
                        value,
                    });
                }
            }
        }
        Ok(Self { q, e })
    }

    /// Order `N` of the matrix.
    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn e(&self) -> &[f64] {
        &self.e
    }

    /// The matrix with both parameter sequences multiplied by `c`, i.e. `sqrt(c) * B`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.q.iter().map(|x| x * c).collect(),
            self.e.iter().map(|x| x * c).collect(),
        )
    }

    /// Diagonal entries `sqrt(q_i)` of the explicit matrix.
    pub fn diagonal(&self) -> Vec<f64> {
        self.q.iter().map(|x| x.sqrt()).collect()
    }

    /// Superdiagonal entries `sqrt(e_i)` of the explicit matrix.
    pub fn superdiagonal(&self) -> Vec<f64> {
        self.e.iter().map(|x| x.sqrt()).collect()
    }

    pub fn ratios(&self) -> Result<Ratios> {
        Ratios::new(self)
    }
}

/// The ratios `1/q_i`, `e_i/q_i` and `e_{i-1}/q_i` shared by the
/// subtraction-free engines.
#[derive(Debug, Clone, PartialEq)]
pub struct Ratios {
    /// `1/q_i`, i = 1..N.
    pub b_check: Vec<f64>,
    /// `e_i/q_i`, i = 1..N-1.
    pub f: Vec<f64>,
    /// `e_{i-1}/q_i` for i = 2..N; `f_tilde[k]` belongs to 1-based index `k + 2`.
    pub f_tilde: Vec<f64>,
}

impl Ratios {
    pub fn new(b: &BidiagonalMatrix) -> Result<Self> {
        let overflow = Error::Overflow {
            stage: "ratios",
            order: 0,
        };
        let q = b.q();
        let e = b.e();
        let b_check: Vec<f64> = q.iter().map(|&x| 1.0 / x).collect();
        let f: Vec<f64> = e.iter().zip(q).map(|(&ei, &qi)| ei / qi).collect();
        let f_tilde: Vec<f64> = e.iter().zip(&q[1..]).map(|(&ei, &qi)| ei / qi).collect();
        let all_finite = b_check
            .iter()
            .chain(&f)
            .chain(&f_tilde)
            .all(|x| x.is_finite() && *x > 0.0);
        if !all_finite {
            return Err(overflow);
        }
        Ok(Self {
            b_check,
            f,
            f_tilde,
        })
    }

    /// `F~` at 0-based storage index `i` (requires `i >= 1`).
    #[inline]
    pub fn f_tilde_at(&self, i: usize) -> f64 {
        self.f_tilde[i - 1]
    }
}
