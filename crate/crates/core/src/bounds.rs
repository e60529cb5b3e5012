//! Lower bounds `theta_M(B) = J_M(B)^{-1/(2M)}` of the minimal singular value.

use crate::derivative::traces_ykyy14;
use crate::error::{check_order, Error, Result};
use crate::matrix::BidiagonalMatrix;
use crate::oracle::{sigma_min_oracle, trace_oracle_all, Side};
use crate::relative_deviation;
use crate::subfree::{diag_powers_subfree, traces_ykn12};
use crate::subtractive::{diag_first_order, diag_powers_subtractive, ZDirection};
use crate::table::CancellationWarning;
use crate::unified::traces_new;
use crate::{Method, Variant};

/// Relative slack tolerated before a decreasing `theta` counts as a violation.
pub const MONOTONICITY_SLACK: f64 = 1e-12;

/// Engine knobs that do not change the exact result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraceOptions {
    /// Which Gram matrix to sum over; `None` picks the method's natural side.
    pub side: Option<Side>,
    /// Sweep direction of the auxiliary `z` row (subtractive engine only).
    pub z_direction: ZDirection,
}

impl Method {
    /// `Upper` sums `v` (or `h~`, `G`); `Lower` sums `w` (or `h`, `G~`).
    pub fn default_side(self) -> Side {
        match self {
            Method::Unified => Side::Lower,
            _ => Side::Upper,
        }
    }
}

/// `J_1..=J_Mmax` for one matrix, tagged with the producing method.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub method: Method,
    pub side: Side,
    /// `values[m - 1] = J_m(B)`.
    pub values: Vec<f64>,
    pub warnings: Vec<CancellationWarning>,
}

impl TraceTable {
    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|k| self.values.get(k)).copied()
    }
}

fn variant_for(side: Side) -> Variant {
    match side {
        Side::Upper => Variant::Plain,
        Side::Lower => Variant::Tilde,
    }
}

/// `J_1..=J_Mmax` by the selected engine.
pub fn traces(
    b: &BidiagonalMatrix,
    method: Method,
    m_max: usize,
    options: &TraceOptions,
) -> Result<TraceTable> {
    check_order(m_max, 1)?;
    let side = options.side.unwrap_or_else(|| method.default_side());
    let mut warnings = Vec::new();
    let values = match method {
        Method::Subtractive => {
            let t = diag_powers_subtractive(b, m_max, options.z_direction)?;
            warnings = t.warnings.clone();
            (1..=m_max)
                .map(|m| match side {
                    Side::Upper => t.trace_upper(m),
                    Side::Lower => t.trace_lower(m),
                })
                .collect()
        }
        Method::SubtractionFree => match side {
            Side::Upper => traces_ykn12(b, m_max)?,
            Side::Lower => {
                let (_, w1) = diag_first_order(b)?;
                let mut out = vec![w1.iter().sum()];
                if m_max >= 2 {
                    let t = diag_powers_subfree(b, m_max)?;
                    out.extend((2..=m_max).map(|m| t.trace_lower(m)));
                }
                out
            }
        },
        Method::DeterminantDerivative => traces_ykyy14(b, m_max, variant_for(side))?,
        Method::Unified => traces_new(b, m_max, variant_for(side))?,
        Method::Oracle => trace_oracle_all(b, m_max, side)?,
    };
    // finite entries can still sum past the binary64 range
    if let Some(k) = values.iter().position(|x: &f64| !x.is_finite()) {
        return Err(Error::Overflow {
            stage: "trace summation",
            order: k + 1,
        });
    }
    Ok(TraceTable {
        method,
        side,
        values,
        warnings,
    })
}

/// `j^{-1/(2m)}` evaluated as `exp(-ln(j) / (2m))`.
pub fn theta_from_trace(j: f64, m: usize) -> f64 {
    (-j.ln() / (2.0 * m as f64)).exp()
}

/// `theta_M(B)` with the selected backend.
pub fn theta(b: &BidiagonalMatrix, m: usize, method: Method) -> Result<f64> {
    let t = traces(b, method, m, &TraceOptions::default())?;
    Ok(theta_from_trace(t.values[m - 1], m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSequence {
    /// `thetas[m - 1] = theta_m(B)`.
    pub thetas: Vec<f64>,
    pub sigma_min_ref: Option<f64>,
    pub method: Method,
}

impl BoundSequence {
    /// `(sigma_min - theta_m) / sigma_min` per order, when the reference is known.
    pub fn relative_gaps(&self) -> Option<Vec<f64>> {
        let s = self.sigma_min_ref?;
        Some(self.thetas.iter().map(|t| (s - t) / s).collect())
    }

    /// Every `theta_m` lies below the reference, up to the monotonicity slack.
    pub fn below_reference(&self) -> Option<bool> {
        let s = self.sigma_min_ref?;
        Some(
            self.thetas
                .iter()
                .all(|&t| t <= s * (1.0 + MONOTONICITY_SLACK)),
        )
    }
}

/// Rejects any step where `theta` drops by more than the slack.
pub fn check_monotone(thetas: &[f64]) -> Result<()> {
    for (k, pair) in thetas.windows(2).enumerate() {
        if pair[1] < pair[0] * (1.0 - MONOTONICITY_SLACK) {
            return Err(Error::MonotonicityViolation {
                order: k + 1,
                previous: pair[0],
                value: pair[1],
            });
        }
    }
    Ok(())
}

/// `theta_1..=theta_Mmax`, checked for monotonicity, optionally with the
/// dense reference `sigma_min`.
pub fn theta_sequence(
    b: &BidiagonalMatrix,
    m_max: usize,
    method: Method,
    with_reference: bool,
) -> Result<BoundSequence> {
    let t = traces(b, method, m_max, &TraceOptions::default())?;
    let thetas: Vec<f64> = t
        .values
        .iter()
        .enumerate()
        .map(|(k, &j)| theta_from_trace(j, k + 1))
        .collect();
    check_monotone(&thetas)?;
    let sigma_min_ref = if with_reference {
        Some(sigma_min_oracle(b)?)
    } else {
        None
    };
    Ok(BoundSequence {
        thetas,
        sigma_min_ref,
        method,
    })
}

/// One backend's column in a [`BoundReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundColumn {
    pub method: Method,
    pub outcome: Result<BoundSequence>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub m_max: usize,
    pub sigma_min: Option<f64>,
    pub columns: Vec<BoundColumn>,
}

impl BoundReport {
    /// Largest relative deviation of `theta_m` between any two successful columns.
    pub fn max_cross_deviation(&self, m: usize) -> f64 {
        let values: Vec<f64> = self
            .columns
            .iter()
            .filter_map(|c| c.outcome.as_ref().ok())
            .map(|s| s.thetas[m - 1])
            .collect();
        let mut worst = 0.0f64;
        for (k, a) in values.iter().enumerate() {
            for b in &values[k + 1..] {
                worst = worst.max(relative_deviation(*a, *b));
            }
        }
        worst
    }
}

/// Tabulates `theta_m` for each backend; a failing backend keeps its error
/// in place of a column.
pub fn bound_report(b: &BidiagonalMatrix, m_max: usize, methods: &[Method]) -> Result<BoundReport> {
    check_order(m_max, 1)?;
    if methods.is_empty() {
        return Err(Error::DimensionMismatch("no backend selected".into()));
    }
    let sigma_min = sigma_min_oracle(b).ok();
    let columns = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&method| {
                scope.spawn(move || BoundColumn {
                    method,
                    outcome: theta_sequence(b, m_max, method, false).map(|mut s| {
                        s.sigma_min_ref = sigma_min;
                        s
                    }),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bound worker panicked"))
            .collect()
    });
    Ok(BoundReport {
        m_max,
        sigma_min,
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(q: &[f64], e: &[f64]) -> BidiagonalMatrix {
        BidiagonalMatrix::new(q.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn scalar_theta_is_exact() {
        let b = mat(&[2.0], &[]);
        for method in Method::ALL {
            for m in 1..=6 {
                let t = theta(&b, m, method).unwrap();
                assert!((t / 2f64.sqrt() - 1.0).abs() <= 1e-15, "{method} {m}: {t}");
            }
        }
    }

    #[test]
    fn unit_matrix_thetas() {
        let b = mat(&[1.0, 1.0], &[1.0]);
        let s = theta_sequence(&b, 2, Method::Unified, true).unwrap();
        assert!((s.thetas[0] - 3f64.powf(-0.5)).abs() <= 1e-15);
        assert!((s.thetas[1] - 7f64.powf(-0.25)).abs() <= 1e-15);
        assert_eq!(s.below_reference(), Some(true));
        let gaps = s.relative_gaps().unwrap();
        assert!(gaps[1] < gaps[0] && gaps[1] > 0.0);
    }

    #[test]
    fn all_sides_agree() {
        let b = mat(&[0.8, 1.5, 1.1], &[0.6, 1.9]);
        let reference = trace_oracle_all(&b, 4, Side::Upper).unwrap();
        for method in Method::ALL {
            for side in [Side::Upper, Side::Lower] {
                let options = TraceOptions {
                    side: Some(side),
                    ..Default::default()
                };
                let t = traces(&b, method, 4, &options).unwrap();
                for (a, r) in t.values.iter().zip(&reference) {
                    assert!(relative_deviation(*a, *r) <= 1e-12, "{method} {side:?}");
                }
            }
        }
    }

    #[test]
    fn monotonicity_guard() {
        assert!(check_monotone(&[0.5, 0.6, 0.6]).is_ok());
        assert_eq!(
            check_monotone(&[0.5, 0.6, 0.59]),
            Err(Error::MonotonicityViolation {
                order: 2,
                previous: 0.6,
                value: 0.59
            })
        );
    }

    #[test]
    fn report_keeps_failures_per_column() {
        let b = mat(&[1.0, 1.0], &[1.0]);
        let r = bound_report(&b, 2, &Method::ALL).unwrap();
        assert_eq!(r.columns.len(), 5);
        assert!(r.max_cross_deviation(2) <= 1e-10);

        let b = mat(&[1e-3, 1e-3], &[1e-3]);
        let r = bound_report(&b, 200, &[Method::Unified, Method::DeterminantDerivative]).unwrap();
        assert!(r.columns[1].outcome.is_err());
    }

    #[test]
    fn overflowing_sum_is_an_error() {
        // every v entry is finite at order 2, their sum is not
        let b = mat(&[1e-154, 1e-154], &[1e-160]);
        let err = traces(&b, Method::SubtractionFree, 2, &TraceOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Overflow { order: 2, .. }), "{err:?}");
    }

    #[test]
    fn rejects_empty_backend_set() {
        assert!(bound_report(&mat(&[1.0], &[]), 2, &[]).is_err());
    }
}
