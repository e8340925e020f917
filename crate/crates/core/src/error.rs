use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A direction-number line could not be parsed.
    Parse { line: usize, message: String },
    /// A direction-number record parsed but violates the Sobol constraints.
    InvalidDirectionNumbers { line: usize, message: String },
    /// The requested dimension is not covered by the direction-number table.
    DimensionUnsupported { requested: usize, available: usize },
    /// Net resolution beyond what 64-bit dyadic coordinates can carry exactly.
    ResolutionUnsupported { requested: u32, max: u32 },
    DimensionMismatch { expected: usize, found: usize },
    /// An argument is outside the operation's domain.
    InvalidArgument(&'static str),
    /// Adaptive quadrature ran out of budget before reaching the tolerance.
    Accuracy { estimate: f64, error_estimate: f64 },
    /// The transform would map a coordinate to infinity.
    UnboundedImage { coordinate: usize },
    /// The point is outside the support of the map being inverted.
    OutsideDomain,
    /// A finite-difference stencil straddles a breakpoint of an inverse CDF.
    Breakpoint { coordinate: usize, at: f64 },
    /// Acceptance-rejection drew too many candidates without finishing.
    Runaway { draws: u64, accepted: usize },
    /// The target exceeded its dominating bound at a drawn point.
    BoundViolation { ratio: f64 },
    /// The target has zero total mass.
    DegenerateDensity,
    /// A reduced acceptance-rejection decomposition is invalid.
    Decomposition { level: usize, mass: f64 },
    /// A region-restricted CDF could not be inverted.
    Inversion,
    EmptyPointSet,
    /// The δ-cover grid has more anchors than allowed.
    GridBudget { anchors: u64, budget: u64 },
    /// A rate fit needs at least two distinct abscissae.
    DegenerateFit,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
            Error::InvalidDirectionNumbers { line, message } => {
                write!(f, "line {line}: invalid direction numbers: {message}")
            }
            Error::DimensionUnsupported { requested, available } => write!(
                f,
                "dimension {requested} unsupported, direction numbers cover {available}"
            ),
            Error::ResolutionUnsupported { requested, max } => {
                write!(f, "net resolution m = {requested} exceeds maximum {max}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::Accuracy {
                estimate,
                error_estimate,
            } => write!(
                f,
                "quadrature did not converge (estimate {estimate}, error {error_estimate})"
            ),
            Error::UnboundedImage { coordinate } => {
                write!(f, "coordinate {coordinate} maps to an unbounded value")
            }
            Error::OutsideDomain => f.write_str("point outside the domain of the map"),
            Error::Breakpoint { coordinate, at } => write!(
                f,
                "finite-difference step crosses breakpoint {at} in coordinate {coordinate}"
            ),
            Error::Runaway { draws, accepted } => write!(
                f,
                "acceptance stalled: {accepted} accepted after {draws} draws"
            ),
            Error::BoundViolation { ratio } => {
                write!(f, "target exceeds its bound (ratio {ratio})")
            }
            Error::DegenerateDensity => f.write_str("target density has zero mass"),
            Error::Decomposition { level, mass } => {
                write!(f, "decomposition level {level} has negative mass {mass}")
            }
            Error::Inversion => f.write_str("restricted CDF could not be inverted"),
            Error::EmptyPointSet => f.write_str("empty point set"),
            Error::GridBudget { anchors, budget } => write!(
                f,
                "grid of {anchors} anchors exceeds budget {budget}; use a smaller grid resolution"
            ),
            Error::DegenerateFit => f.write_str("rate fit needs at least two distinct N"),
        }
    }
}

impl core::error::Error for Error {}
