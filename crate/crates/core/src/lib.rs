//! Traces `J_M(B) = Tr((B^T B)^{-M})` of inverse Gram powers of a positive
//! upper bidiagonal matrix `B`, and the lower bounds
//! `theta_M(B) = J_M(B)^{-1/(2M)}` of its minimal singular value.
//!
//! Four recurrence engines compute the same traces:
//!
//! | [`Method`] (label)                 | module          | notes                               |
//! |------------------------------------|-----------------|-------------------------------------|
//! | `Subtractive` (`kyn11`)            | [`subtractive`] | may cancel; flags nonpositive cells |
//! | `SubtractionFree` (`ykn12`)        | [`subfree`]     | positive terms only                 |
//! | `DeterminantDerivative` (`ykyy14`) | [`derivative`]  | binomials and `(M-1)!` scaling      |
//! | `Unified` (`new`)                  | [`unified`]     | positive terms, no factorials       |
//!
//! [`oracle`] holds the dense reference used to check all of them.
//!
//! ```
//! use bidiag_traces::{traces, BidiagonalMatrix, Method, TraceOptions};
//!
//! let b = BidiagonalMatrix::new(vec![1.0, 1.0], vec![1.0]).unwrap();
//! let t = traces(&b, Method::Unified, 3, &TraceOptions::default()).unwrap();
//! assert_eq!(t.values, vec![3.0, 7.0, 18.0]);
//! ```

pub mod bounds;
pub mod derivative;
pub mod error;
pub mod matrix;
pub mod method;
pub mod oracle;
pub mod subfree;
pub mod subtractive;
pub mod table;
pub mod text;
pub mod unified;

pub use bounds::{
    bound_report, check_monotone, theta, theta_from_trace, theta_sequence, traces, BoundColumn,
    BoundReport, BoundSequence, TraceOptions, TraceTable, MONOTONICITY_SLACK,
};
pub use derivative::{
    h_tables, trace_ykyy14, traces_ykyy14, BinomialCache, HTables, FACTORIAL_GUARD_ORDER,
};
pub use error::{Error, Result, Sequence};
pub use matrix::{BidiagonalMatrix, Ratios};
pub use method::{Method, UnknownMethod, Variant};
pub use oracle::{
    gram_inverse_power, invert_bidiagonal, path_sum_g, path_sum_gtilde, sigma_min_oracle,
    trace_oracle, trace_oracle_all, trace_oracle_sides, DenseMatrix, Side,
};
pub use subfree::{diag_powers_subfree, g_tables, trace_ykn12, traces_ykn12, GTables};
pub use subtractive::{
    diag_first_order, diag_powers_subtractive, trace_kyn11, SidedTrace, ZDirection,
};
pub use table::{CancellationWarning, DiagKind, DiagTable, OrderTable};
pub use text::{parse_inline, parse_matrix, write_matrix, ParseError};
pub use unified::{
    trace_identities_j2_j3, trace_new, traces_new, unified_tables, verify_transforms,
    LowOrderIdentities, TransformReport, UnifiedTables,
};

/// `|a - b| / max(|a|, |b|)`, and 0 when both are 0.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
