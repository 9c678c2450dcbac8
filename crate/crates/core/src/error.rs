use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One violated configuration invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigViolation {
    /// Dotted key, e.g. `species.minus.m`.
    pub key: String,
    /// Offending value as text.
    pub value: String,
    pub message: String,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.key, self.value, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The configuration violates one or more invariants.
    InvalidConfig(Vec<ConfigViolation>),
    /// Total charge is not zero, so the periodic Poisson problem has no
    /// solution.
    NonNeutral { mean_rho: f64, scale: f64 },
    /// c dt / dx or max|v| dt / dx exceeds one.
    Cfl { which: &'static str, ratio: f64 },
    /// A momentum kick would move a foot point too far.
    KickDisplacement { max_displacement: f64, bound: f64 },
    /// A field update produced non-finite values.
    FieldBlowup { index: usize },
    /// A residual needs more consecutive snapshots than were supplied.
    InsufficientHistory { needed: usize, got: usize },
    /// Two runs or arrays that must share a grid do not.
    GridMismatch(&'static str),
    /// Too few extrema in a series to estimate a frequency.
    TooFewExtrema { found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig(v) => {
                write!(f, "invalid configuration:")?;
                for violation in v {
                    write!(f, "\n  {violation}")?;
                }
                Ok(())
            }
            Error::NonNeutral { mean_rho, scale } => write!(
                f,
                "total charge is not neutral (mean rho = {mean_rho:e}, max |rho| = {scale:e}); periodic Poisson problem is unsolvable"
            ),
            Error::Cfl { which, ratio } => {
                write!(f, "CFL violation: {which} = {ratio} exceeds 1")
            }
            Error::KickDisplacement {
                max_displacement,
                bound,
            } => write!(
                f,
                "momentum kick displacement {max_displacement:e} exceeds bound {bound:e}"
            ),
            Error::FieldBlowup { index } => {
                write!(f, "field update produced a non-finite value at cell {index}")
            }
            Error::InsufficientHistory { needed, got } => {
                write!(f, "need {needed} consecutive snapshots, got {got}")
            }
            Error::GridMismatch(what) => write!(f, "grid mismatch: {what}"),
            Error::TooFewExtrema { found } => {
                write!(f, "too few extrema ({found}) to estimate a frequency")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
