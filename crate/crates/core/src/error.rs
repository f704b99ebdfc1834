use core::fmt;

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Complex dimension outside `2..=MAX_N` (or `1..=MAX_N` for pointwise algebra).
    Dimension(usize),
    /// Operands live over different complex dimensions.
    DimensionMismatch {
        /// Left operand.
        left: usize,
        /// Right operand.
        right: usize,
    },
    /// Operands or arguments carry an unexpected bidegree.
    Bidegree {
        /// Required bidegree.
        expected: (usize, usize),
        /// Supplied bidegree.
        found: (usize, usize),
    },
    /// Lefschetz decomposition requested for total degree above 3.
    DegreeUnsupported(usize),
    /// Fields defined over different grids.
    GeometryMismatch,
    /// Grid resolution is not an even number ≥ 4, or the node count is too large.
    Grid(usize),
    /// A metric failed to be positive definite; carries the smallest eigenvalue found.
    NotPositive {
        /// Smallest eigenvalue.
        margin: f64,
    },
    /// A form expected to be real is not (relative size of the imaginary part).
    NotReal {
        /// Relative defect.
        defect: f64,
    },
    /// A generator's bandwidth exceeds the dealiasing limit `N/4`.
    Bandwidth {
        /// Requested bandwidth.
        bandwidth: usize,
        /// Largest admissible bandwidth.
        limit: usize,
    },
    /// Two evaluation routes of the same quantity disagree.
    Disagreement {
        /// Quantity being compared.
        what: &'static str,
        /// Relative discrepancy.
        rel: f64,
    },
    /// Finite-difference probing could not stay inside the Hermitian cone.
    ProbeStep {
        /// Smallest eigenvalue at the smallest probe.
        margin: f64,
    },
    /// Invalid numeric parameter.
    Parameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(n) => write!(f, "unsupported complex dimension {n}"),
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::Bidegree { expected, found } => write!(
                f,
                "bidegree mismatch: expected ({}, {}), found ({}, {})",
                expected.0, expected.1, found.0, found.1
            ),
            Error::DegreeUnsupported(k) => {
                write!(f, "Lefschetz decomposition of degree {k} is not supported (k <= 3)")
            }
            Error::GeometryMismatch => f.write_str("fields live on different grids"),
            Error::Grid(n) => write!(f, "invalid grid resolution {n} (even, >= 4)"),
            Error::NotPositive { margin } => {
                write!(f, "metric is not positive definite (smallest eigenvalue {margin:.3e})")
            }
            Error::NotReal { defect } => write!(f, "form is not real (defect {defect:.3e})"),
            Error::Bandwidth { bandwidth, limit } => {
                write!(f, "bandwidth {bandwidth} exceeds the dealiasing limit {limit}")
            }
            Error::Disagreement { what, rel } => {
                write!(f, "{what}: evaluation routes disagree (relative {rel:.3e})")
            }
            Error::ProbeStep { margin } => write!(
                f,
                "no probe step keeps the metric positive (margin {margin:.3e})"
            ),
            Error::Parameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}
