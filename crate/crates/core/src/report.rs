//! Certificates and reports shared by every check in the crate.
//!
//! A [`DecompositionReport`] pairs the algebraic residual of an identity with
//! a validity certificate for the extracted factor. Validity certificates are
//! necessary conditions computed on finite grids; none of them proves that a
//! function is a characteristic function, Laplace transform or PGF.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Which identity a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Identity {
    /// `f(s) = f(bs) f0(s)` for a characteristic function.
    CfSemiSd,
    /// The same identity sampled over a grid of `c` values.
    CfSdFullRange,
    /// `φ(s) = φ(cs) φ0(s)` for a Laplace transform.
    LtSemiSd,
    /// `P(s) = P(1 - c + cs) P0(s)` for a generating function.
    PgfDiscreteSemiSd,
    /// LT semi-SD implies PGF discrete semi-SD through `P(s) = φ(1 - s)`.
    LtPgfBridge,
    /// `ψ(u) = a ψ(bu)` for a Lévy exponent.
    ScalingIdentity,
    /// Finite-difference complete monotonicity.
    CompleteMonotonicity,
    /// Bochner positive-semidefiniteness of a candidate CF.
    CfValidity,
    /// Semi-SD of a φ-mixture via the exponent scaling substitution.
    MixtureSemiSd,
    /// Semi-SD or SD of a subordinated marginal.
    SubordinatedMarginal,
    /// Empirical agreement of a simulated chain with its stationary law.
    Stationarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    /// Combine verdicts of sub-checks: any fail dominates, then inconclusive.
    pub fn all<I: IntoIterator<Item = Verdict>>(verdicts: I) -> Verdict {
        let mut out = Verdict::Pass;
        for v in verdicts {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Pass => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum CertificateKind {
    /// Minimum eigenvalue of the Bochner matrix `[g(s_j - s_k)]`.
    MinEigenvalue,
    /// Minimum DFT-extracted coefficient of a candidate PGF.
    MinCoefficient,
    /// Minimum of `(-1)^k Δ^k φ` over orders and grid points.
    MinSignedDifference,
    /// Slack `envelope - distance` of an empirical comparison.
    EmpiricalSlack,
    /// No validity side condition (pure residual checks).
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GridMeta {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
}

impl GridMeta {
    pub fn of(grid: &[f64]) -> Self {
        GridMeta {
            points: grid.len(),
            lo: grid.first().copied().unwrap_or(0.0),
            hi: grid.last().copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Certificate {
    pub kind: CertificateKind,
    /// The certified quantity; it must stay above `-threshold`.
    pub value: f64,
    pub threshold: f64,
    pub grid: GridMeta,
    pub necessary_only: bool,
    /// Argument at which a precheck failed, if any.
    pub witness: Option<f64>,
    pub coefficient_sum: Option<f64>,
    /// Aliasing indicator: DFT mass in the upper half of the spectrum.
    pub tail_mass: Option<f64>,
    /// Worst signed difference per order, for CM certificates.
    pub by_order: Vec<f64>,
    pub message: Option<String>,
}

impl Certificate {
    pub fn new(kind: CertificateKind, value: f64, threshold: f64, grid: GridMeta) -> Self {
        Certificate {
            kind,
            value,
            threshold,
            grid,
            necessary_only: !matches!(kind, CertificateKind::None | CertificateKind::EmpiricalSlack),
            witness: None,
            coefficient_sum: None,
            tail_mass: None,
            by_order: Vec::new(),
            message: None,
        }
    }

    pub fn none(grid: GridMeta) -> Self {
        Certificate::new(CertificateKind::None, 0.0, 0.0, grid)
    }

    /// Immediate failure carrying the argument where a precheck broke.
    pub fn failed_precheck(
        kind: CertificateKind,
        threshold: f64,
        grid: GridMeta,
        witness: f64,
        message: &str,
    ) -> Self {
        let mut c = Certificate::new(kind, f64::NEG_INFINITY, threshold, grid);
        c.witness = Some(witness);
        c.message = Some(message.into());
        c
    }

    /// Pass above `-threshold`, inconclusive down to `-10 threshold`, fail below.
    pub fn verdict(&self) -> Verdict {
        if self.witness.is_some() || self.value.is_nan() {
            return Verdict::Fail;
        }
        if self.value >= -self.threshold {
            Verdict::Pass
        } else if self.necessary_only && self.value >= -10.0 * self.threshold {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DecompositionReport {
    pub identity: Identity,
    /// The b / c / ρ value(s) tested.
    pub parameters: Vec<f64>,
    pub max_residual: f64,
    pub residual_tolerance: f64,
    pub certificate: Certificate,
    pub verdict: Verdict,
    pub caveat: String,
    pub notes: Vec<String>,
    /// Per-parameter or per-route sub-reports.
    pub children: Vec<DecompositionReport>,
    pub degenerate: bool,
}

pub(crate) const NECESSARY_ONLY: &str =
    "necessary-only: finite-grid conditions cannot prove the extracted factor is a valid transform";

impl DecompositionReport {
    /// Build a report whose verdict follows from the residual and certificate.
    pub fn from_parts(
        identity: Identity,
        parameters: Vec<f64>,
        max_residual: f64,
        residual_tolerance: f64,
        certificate: Certificate,
    ) -> Self {
        let residual_ok = max_residual.is_finite() && max_residual <= residual_tolerance;
        let verdict = if !residual_ok {
            Verdict::Fail
        } else {
            certificate.verdict()
        };
        let caveat = if certificate.necessary_only {
            NECESSARY_ONLY.into()
        } else {
            String::new()
        };
        DecompositionReport {
            identity,
            parameters,
            max_residual,
            residual_tolerance,
            certificate,
            verdict,
            caveat,
            notes: Vec::new(),
            children: Vec::new(),
            degenerate: false,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub(crate) fn append_caveat(&mut self, text: &str) {
        if !self.caveat.is_empty() {
            self.caveat.push_str("; ");
        }
        self.caveat.push_str(text);
    }
}
