use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::report::DecompositionReport;
use crate::transforms::TransformKind;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is outside its admissible range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// An evaluation grid or size argument violates a precondition.
    InvalidGrid(&'static str),
    WrongKind {
        expected: TransformKind,
        found: TransformKind,
    },
    /// Log-periodic amplitude above the admissibility cap without override.
    PossiblyInvalidExponent { h_epsilon: f64, cap: f64 },
    /// The CF does not decay below tolerance at the truncation limit.
    TruncationUnsafe { halfwidth: f64, tail: f64 },
    /// DFT output carries an imaginary residue above tolerance.
    NotAPowerSeries { index: usize, imaginary: f64 },
    /// First violating finite difference `(-1)^k Δ^k φ` of a CM check.
    NotCompletelyMonotone { order: usize, at: f64, value: f64 },
    VanishingCf { at: f64 },
    VanishingPgf { at: f64 },
    /// Base transform of a mixture hits zero, so `-ln ω` is undefined.
    NonvanishingViolated { at: f64 },
    /// The marginal failed the semi-SD certificate at the AR coefficient.
    NotSemiSdAtRho { rho: f64, report: Box<DecompositionReport> },
    SamplerUnavailable {
        ingredient: String,
        supported: &'static [&'static str],
    },
    /// Numeric inversion could not meet its accuracy budget.
    InversionFailed { reason: &'static str },
    /// A certificate that is a hypothesis of the requested construction failed.
    HypothesisFailed { report: Box<DecompositionReport> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(f, "invalid parameter {name}={value}: expected {expected}"),
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::WrongKind { expected, found } => {
                write!(f, "wrong transform kind: expected {expected:?}, found {found:?}")
            }
            Error::PossiblyInvalidExponent { h_epsilon, cap } => write!(
                f,
                "possibly-invalid-exponent: |h_epsilon|={h_epsilon} exceeds cap {cap}"
            ),
            Error::TruncationUnsafe { halfwidth, tail } => write!(
                f,
                "truncation-unsafe: |f(±{halfwidth})| = {tail:e} is above tolerance"
            ),
            Error::NotAPowerSeries { index, imaginary } => write!(
                f,
                "not-a-power-series: coefficient {index} has imaginary part {imaginary:e}"
            ),
            Error::NotCompletelyMonotone { order, at, value } => write!(
                f,
                "not completely monotone: order {order} difference {value:e} at s={at}"
            ),
            Error::VanishingCf { at } => write!(f, "vanishing-cf: denominator vanishes at s={at}"),
            Error::VanishingPgf { at } => {
                write!(f, "vanishing-pgf: denominator vanishes at s={at}")
            }
            Error::NonvanishingViolated { at } => {
                write!(f, "nonvanishing violated: base transform vanishes at {at}")
            }
            Error::NotSemiSdAtRho { rho, report } => write!(
                f,
                "not-semi-SD-at-rho: marginal fails the semi-SD({rho}) certificate ({:?})",
                report.verdict
            ),
            Error::SamplerUnavailable {
                ingredient,
                supported,
            } => write!(
                f,
                "sampler-unavailable: no sampler for {ingredient}; supported: {}",
                supported.join(", ")
            ),
            Error::InversionFailed { reason } => write!(f, "inversion failed: {reason}"),
            Error::HypothesisFailed { report } => write!(
                f,
                "hypothesis certificate failed: {:?} at {:?}",
                report.identity, report.parameters
            ),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected: "a value in (0, 1)",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected: "a positive finite value",
        })
    }
}
