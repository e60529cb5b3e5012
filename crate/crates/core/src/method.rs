use std::fmt;
use std::str::FromStr;

/// The trace engines.
///
/// Labels are the short names used on the command line and in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Diagonal recurrence with subtraction (`kyn11`).
    Subtractive,
    /// Subtraction-free diagonal recurrence with `g`, `g~` tables (`ykn12`).
    SubtractionFree,
    /// Determinant-derivative `h`/`H` recurrence with binomials and factorials (`ykyy14`).
    DeterminantDerivative,
    /// Factorial-free subtraction-free `g~`/`G~` recurrence (`new`).
    Unified,
    /// Dense brute force.
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Subtractive,
        Method::SubtractionFree,
        Method::DeterminantDerivative,
        Method::Unified,
        Method::Oracle,
    ];

    /// The four recurrence engines, excluding the oracle.
    pub const ENGINES: [Method; 4] = [
        Method::Subtractive,
        Method::SubtractionFree,
        Method::DeterminantDerivative,
        Method::Unified,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::Subtractive => "kyn11",
            Method::SubtractionFree => "ykn12",
            Method::DeterminantDerivative => "ykyy14",
            Method::Unified => "new",
            Method::Oracle => "oracle",
        }
    }

    /// Whether the engine only adds, multiplies and divides positive values.
    pub fn is_subtraction_free(self) -> bool {
        matches!(
            self,
            Method::SubtractionFree | Method::DeterminantDerivative | Method::Unified
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown method `{0}` (expected one of kyn11, ykn12, ykyy14, new, oracle)")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kyn11" | "subtractive" => Ok(Method::Subtractive),
            "ykn12" | "subfree" | "subtraction-free" => Ok(Method::SubtractionFree),
            "ykyy14" | "derivative" => Ok(Method::DeterminantDerivative),
            "new" | "unified" => Ok(Method::Unified),
            "oracle" | "dense" => Ok(Method::Oracle),
            _ => Err(UnknownMethod(s.to_string())),
        }
    }
}

/// Which of the two mirrored recurrences a table comes from.
///
/// `Plain` sweeps with `F~` from the first index (`h`, `H`) or, for the
/// factorial-free engine, with `F` from the last index (`g`, `G`); `Tilde` is
/// the mirror of each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Plain,
    Tilde,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plain => "plain",
            Variant::Tilde => "tilde",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }
}
