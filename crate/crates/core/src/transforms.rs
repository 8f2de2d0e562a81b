//! Characteristic functions, Laplace transforms and generating functions as
//! evaluable objects, the LT ↔ PGF bridge, and the numerical inversion
//! utilities the rest of the crate builds on.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::corpus::Law;
use crate::error::{Error, Result};
use crate::fft;
use crate::quadrature;
use crate::report::{Certificate, CertificateKind, DecompositionReport, GridMeta, Identity};

/// Shared evaluation closure. CFs are evaluated at real arguments (passed
/// with zero imaginary part); LTs and PGFs accept complex arguments in their
/// domain of analyticity (`Re z >= 0`, resp. the closed unit disk).
pub type Eval = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TransformKind {
    Cf,
    Lt,
    Pgf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Support {
    RealLine,
    NonnegativeReals,
    NonnegativeIntegers,
}

/// How much is known about a transform being what its kind says.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Certification {
    /// Closed-form member of the corpus.
    Exact,
    /// Extracted ratio not yet certified.
    Candidate,
    /// Passed finite-grid necessary conditions only.
    NecessaryOnly,
}

#[derive(Clone)]
pub struct TransformFn {
    kind: TransformKind,
    support: Support,
    label: String,
    eval: Eval,
    exponent: Option<Eval>,
    law: Option<Law>,
    certification: Certification,
    known_sd: bool,
}

impl fmt::Debug for TransformFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformFn")
            .field("kind", &self.kind)
            .field("support", &self.support)
            .field("label", &self.label)
            .field("law", &self.law)
            .field("certification", &self.certification)
            .field("known_sd", &self.known_sd)
            .finish_non_exhaustive()
    }
}

fn default_support(kind: TransformKind) -> Support {
    match kind {
        TransformKind::Cf => Support::RealLine,
        TransformKind::Lt => Support::NonnegativeReals,
        TransformKind::Pgf => Support::NonnegativeIntegers,
    }
}

impl TransformFn {
    pub fn new<F>(kind: TransformKind, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        TransformFn {
            kind,
            support: default_support(kind),
            label: label.into(),
            eval: Arc::new(eval),
            exponent: None,
            law: None,
            certification: Certification::Exact,
            known_sd: false,
        }
    }

    /// Characteristic function of a real argument.
    pub fn cf<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(TransformKind::Cf, label, move |z: Complex64| f(z.re))
    }

    pub fn lt<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(TransformKind::Lt, label, f)
    }

    pub fn pgf<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(TransformKind::Pgf, label, f)
    }

    /// A transform of the form `exp(-R(z))`; keeping `R` lets mixtures use
    /// `-ln` without branch tracking.
    pub fn from_exponent<F>(kind: TransformKind, label: impl Into<String>, exponent: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        let exponent: Eval = Arc::new(exponent);
        let inner = exponent.clone();
        let mut t = Self::new(kind, label, move |z| (-inner(z)).exp());
        t.exponent = Some(exponent);
        t
    }

    pub fn with_law(mut self, law: Law) -> Self {
        self.law = Some(law);
        self
    }

    pub fn with_known_sd(mut self, known_sd: bool) -> Self {
        self.known_sd = known_sd;
        self
    }

    pub fn with_certification(mut self, certification: Certification) -> Self {
        self.certification = certification;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn law(&self) -> Option<&Law> {
        self.law.as_ref()
    }

    pub fn certification(&self) -> Certification {
        self.certification
    }

    /// Closed-form knowledge that the law is selfdecomposable.
    pub fn known_sd(&self) -> bool {
        self.known_sd
    }

    pub fn has_exponent(&self) -> bool {
        self.exponent.is_some()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    /// Value at a real argument.
    pub fn at(&self, s: f64) -> Complex64 {
        (self.eval)(Complex64::new(s, 0.0))
    }

    /// Real part at a real argument (LT and PGF values on their real domain).
    pub fn real_at(&self, s: f64) -> f64 {
        self.at(s).re
    }

    pub(crate) fn evaluator(&self) -> Eval {
        self.eval.clone()
    }

    /// `-ln` of the transform at `z`, continuous from the anchor point where
    /// the transform equals one (0 for CF/LT, 1 for PGF). `None` if the
    /// transform vanishes on the path.
    pub fn neg_log(&self, z: Complex64) -> Option<Complex64> {
        if let Some(exponent) = &self.exponent {
            return Some(exponent(z));
        }
        let anchor = match self.kind {
            TransformKind::Pgf => Complex64::new(1.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        };
        tracked_log(&*self.eval, anchor, z, 64).map(|l| -l)
    }

    pub(crate) fn expect_kind(&self, expected: TransformKind) -> Result<()> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::WrongKind {
                expected,
                found: self.kind,
            })
        }
    }
}

/// Below this magnitude a transform value counts as zero for division and
/// logarithms.
pub(crate) const VANISHING_FLOOR: f64 = 1e-300;

/// Logarithm of `f` continued along the segment from `anchor` to `z`,
/// refining any step whose phase moves by more than π/4.
pub(crate) fn tracked_log(
    f: &(dyn Fn(Complex64) -> Complex64 + Send + Sync),
    anchor: Complex64,
    z: Complex64,
    steps: usize,
) -> Option<Complex64> {
    let start = f(anchor);
    if start.norm() < VANISHING_FLOOR {
        return None;
    }
    let mut acc = start.ln();
    let mut prev = start;
    let mut t = 0.0f64;
    let mut dt = 1.0 / steps as f64;
    while t < 1.0 {
        let next_t = (t + dt).min(1.0);
        let v = f(anchor + (z - anchor) * next_t);
        if !(v.norm() >= VANISHING_FLOOR) {
            return None;
        }
        let step = (v / prev).ln();
        if step.im.abs() > PI / 4.0 && dt > 1e-9 {
            dt *= 0.5;
            continue;
        }
        acc += step;
        prev = v;
        t = next_t;
    }
    Some(acc)
}

/// Numerical settings shared by the inversion routines and the certificates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct InversionConfig {
    /// Truncation limit `U` of the CDF inversion integral.
    pub grid_halfwidth: f64,
    /// Minimum number of quadrature nodes on `(0, U]`.
    pub grid_points: usize,
    /// Number of unit-circle samples for PGF coefficient extraction.
    pub dft_size: usize,
    /// General tolerance: CF tail decay, PGF coefficients and sums, CM differences.
    pub tolerance: f64,
    /// Minimum-eigenvalue tolerance of the Bochner certificate.
    pub psd_tolerance: f64,
    /// Tolerance on lhs - rhs residuals of decomposition identities.
    pub residual_tolerance: f64,
    pub cf_grid_halfwidth: f64,
    pub cf_grid_points: usize,
    pub cm_order: usize,
    pub cm_grid_points: usize,
    pub cm_grid_step: f64,
    /// Knots of cached CDF tables used for sampling.
    pub inversion_knots: usize,
    /// Probability accuracy budget of inversion samplers.
    pub inversion_budget: f64,
    /// Discrete tables are truncated at cumulative mass `1 - table_tail`.
    pub table_tail: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            grid_halfwidth: 200.0,
            grid_points: 20001,
            dft_size: 4096,
            tolerance: 1e-8,
            psd_tolerance: 1e-8,
            residual_tolerance: 1e-12,
            cf_grid_halfwidth: 5.0,
            cf_grid_points: 41,
            cm_order: 6,
            cm_grid_points: 64,
            cm_grid_step: 0.1,
            inversion_knots: 2048,
            inversion_budget: 1e-6,
            table_tail: 1e-12,
        }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        crate::error::check_positive("grid_halfwidth", self.grid_halfwidth)?;
        crate::error::check_positive("tolerance", self.tolerance)?;
        if self.grid_points < 16 {
            return Err(Error::InvalidGrid("grid_points must be at least 16"));
        }
        if !self.dft_size.is_power_of_two() || self.dft_size < 4 {
            return Err(Error::InvalidGrid("dft_size must be a power of two >= 4"));
        }
        if self.cf_grid_points < 21 {
            return Err(Error::InvalidGrid("cf_grid_points must be at least 21"));
        }
        Ok(())
    }

    /// Symmetric grid for Bochner certificates (41 points on [-5, 5] by default).
    pub fn cf_grid(&self) -> Vec<f64> {
        symmetric_grid(self.cf_grid_halfwidth, self.cf_grid_points)
    }

    /// The CF grid at doubled resolution.
    pub fn cf_grid_refined(&self) -> Vec<f64> {
        symmetric_grid(self.cf_grid_halfwidth, 2 * self.cf_grid_points - 1)
    }

    /// Uniform positive grid for complete-monotonicity checks.
    pub fn cm_grid(&self) -> Vec<f64> {
        (1..=self.cm_grid_points)
            .map(|k| k as f64 * self.cm_grid_step)
            .collect()
    }
}

/// `points` equally spaced values on `[-halfwidth, halfwidth]`.
pub fn symmetric_grid(halfwidth: f64, points: usize) -> Vec<f64> {
    linspace(-halfwidth, halfwidth, points)
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|k| if k + 1 == points { hi } else { lo + step * k as f64 })
                .collect()
        }
    }
}

/// `P(s) = φ(1 - s)`: the generating function attached to a Laplace transform.
pub fn lt_to_pgf(phi: &TransformFn) -> Result<TransformFn> {
    phi.expect_kind(TransformKind::Lt)?;
    let one = Complex64::new(1.0, 0.0);
    let label = format!("pgf[{}]", phi.label);
    let mut out = match &phi.exponent {
        Some(exponent) => {
            let exponent = exponent.clone();
            TransformFn::from_exponent(TransformKind::Pgf, label, move |z| exponent(one - z))
        }
        None => {
            let eval = phi.eval.clone();
            TransformFn::pgf(label, move |z| eval(one - z))
        }
    };
    out.law = phi.law.as_ref().and_then(Law::lt_to_pgf);
    out.known_sd = phi.known_sd;
    out.certification = phi.certification;
    Ok(out)
}

/// `φ(s) = P(1 - s)`, accepted only after the finite-difference complete
/// monotonicity check on the configured grid.
pub fn pgf_to_lt(p: &TransformFn, cfg: &InversionConfig) -> Result<TransformFn> {
    p.expect_kind(TransformKind::Pgf)?;
    let one = Complex64::new(1.0, 0.0);
    let label = format!("lt[{}]", p.label);
    let mut candidate = match &p.exponent {
        Some(exponent) => {
            let exponent = exponent.clone();
            TransformFn::from_exponent(TransformKind::Lt, label, move |z| exponent(one - z))
        }
        None => {
            let eval = p.eval.clone();
            TransformFn::lt(label, move |z| eval(one - z))
        }
    };
    candidate.law = p.law.as_ref().and_then(Law::pgf_to_lt);
    candidate.known_sd = p.known_sd;
    let grid = cfg.cm_grid();
    let report = check_complete_monotonicity(&candidate, cfg.cm_order, &grid, cfg.tolerance)?;
    if !report.passed() {
        let (order, at, value) = first_cm_violation(&candidate, cfg.cm_order, &grid, cfg.tolerance)
            .unwrap_or((0, grid[0], report.certificate.value));
        return Err(Error::NotCompletelyMonotone { order, at, value });
    }
    candidate.certification = Certification::NecessaryOnly;
    Ok(candidate)
}

/// Signed forward differences `(-1)^k Δ^k φ` for k = 0..=order.
fn signed_differences(phi: &TransformFn, order: usize, grid: &[f64]) -> Vec<Vec<f64>> {
    let mut current: Vec<f64> = grid.iter().map(|&s| phi.real_at(s)).collect();
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out.push(current.iter().map(|v| sign * v).collect());
        current = current.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

fn first_cm_violation(
    phi: &TransformFn,
    order: usize,
    grid: &[f64],
    tolerance: f64,
) -> Option<(usize, f64, f64)> {
    signed_differences(phi, order, grid)
        .iter()
        .enumerate()
        .find_map(|(k, diffs)| {
            diffs
                .iter()
                .position(|&d| d < -tolerance || d.is_nan())
                .map(|i| (k, grid[i], diffs[i]))
        })
}

/// Necessary-condition certificate for complete monotonicity: every signed
/// forward difference up to `order` must stay above `-tolerance`.
pub fn check_complete_monotonicity(
    phi: &TransformFn,
    order: usize,
    grid: &[f64],
    tolerance: f64,
) -> Result<DecompositionReport> {
    if order < 2 {
        return Err(Error::InvalidGrid("complete-monotonicity order must be at least 2"));
    }
    if grid.len() < order + 2 {
        return Err(Error::InvalidGrid("grid too short for the requested order"));
    }
    if grid[0] <= 0.0 {
        return Err(Error::InvalidGrid("complete-monotonicity grid must be positive"));
    }
    let step = grid[1] - grid[0];
    let uniform = grid
        .windows(2)
        .all(|w| w[1] > w[0] && ((w[1] - w[0]) - step).abs() <= 1e-9 * step.max(1.0));
    if !uniform {
        return Err(Error::InvalidGrid(
            "complete-monotonicity grid must be strictly increasing and uniformly spaced",
        ));
    }
    let by_order: Vec<f64> = signed_differences(phi, order, grid)
        .iter()
        .map(|d| d.iter().copied().fold(f64::INFINITY, nan_min))
        .collect();
    let worst = by_order.iter().copied().fold(f64::INFINITY, nan_min);
    let mut cert = Certificate::new(
        CertificateKind::MinSignedDifference,
        worst,
        tolerance,
        GridMeta::of(grid),
    );
    cert.by_order = by_order;
    if let Some((k, at, _)) = first_cm_violation(phi, order, grid, tolerance) {
        cert.message = Some(format!("first violation at order {k}, s={at}"));
    }
    let mut report =
        DecompositionReport::from_parts(Identity::CompleteMonotonicity, Vec::new(), 0.0, 0.0, cert);
    // A finite-order check cannot distinguish near-boundary cases.
    if report.verdict == crate::report::Verdict::Inconclusive {
        report.verdict = crate::report::Verdict::Fail;
    }
    Ok(report)
}

fn nan_min(acc: f64, v: f64) -> f64 {
    if v.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.min(v)
    }
}

/// Gil-Pelaez CDF evaluator with the CF pre-sampled on the quadrature nodes.
#[derive(Debug, Clone)]
pub struct CdfInverter {
    nodes: Vec<f64>,
    /// Quadrature weight divided by `π s` at each node.
    weights: Vec<f64>,
    values: Vec<Complex64>,
    panel_width: f64,
}

impl CdfInverter {
    pub fn new(f: &TransformFn, cfg: &InversionConfig) -> Result<Self> {
        f.expect_kind(TransformKind::Cf)?;
        cfg.validate()?;
        let u = cfg.grid_halfwidth;
        let tail = f.at(u).norm().max(f.at(-u).norm());
        if !(tail < cfg.tolerance) {
            return Err(Error::TruncationUnsafe { halfwidth: u, tail });
        }
        let (nodes, w) = quadrature::composite_rule(u, cfg.grid_points);
        let weights = nodes.iter().zip(&w).map(|(s, w)| w / (PI * s)).collect();
        let values = nodes.iter().map(|&s| f.at(s)).collect();
        let panel_width = u / cfg.grid_points.div_ceil(quadrature::PANEL_ORDER).max(1) as f64;
        Ok(CdfInverter {
            nodes,
            weights,
            values,
            panel_width,
        })
    }

    /// Largest `|x|` at which the quadrature still resolves `e^{-isx}`
    /// (about one half-wave per Gauss panel).
    pub fn resolvable_range(&self) -> f64 {
        PI / self.panel_width
    }

    /// `F(x) = 1/2 - (1/π) ∫_0^U Im[e^{-isx} f(s)] / s ds`, clamped to [0, 1].
    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for ((s, w), v) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            let (sin, cos) = libm::sincos(s * x);
            // Im[(cos - i sin)(re + i im)] = cos*im - sin*re
            acc += w * (cos * v.im - sin * v.re);
        }
        (0.5 - acc).clamp(0.0, 1.0)
    }
}

pub fn invert_cf_to_cdf(f: &TransformFn, x: f64, cfg: &InversionConfig) -> Result<f64> {
    Ok(CdfInverter::new(f, cfg)?.cdf(x))
}

/// All `n` aliased Taylor coefficients of a PGF from `n` unit-circle samples.
/// For a genuine PGF each entry is a sum of true coefficients, so all are
/// nonnegative and they total `P(1)`.
pub(crate) fn aliased_coefficients(p: &TransformFn, n: usize) -> Vec<Complex64> {
    let eval = p.eval.clone();
    fft::taylor_coefficients(move |z| eval(z), n)
}

/// `p_0 ..= p_{n_max}` by inverse DFT of `P(e^{iθ})` at `cfg.dft_size` points.
pub fn extract_pgf_coeffs(p: &TransformFn, n_max: usize, cfg: &InversionConfig) -> Result<Vec<f64>> {
    p.expect_kind(TransformKind::Pgf)?;
    cfg.validate()?;
    if n_max >= cfg.dft_size / 2 {
        return Err(Error::InvalidGrid("n_max must be below dft_size / 2"));
    }
    let coeffs = aliased_coefficients(p, cfg.dft_size);
    if let Some((index, c)) = coeffs
        .iter()
        .enumerate()
        .find(|(_, c)| !(c.im.abs() <= cfg.tolerance))
    {
        return Err(Error::NotAPowerSeries {
            index,
            imaginary: c.im,
        });
    }
    Ok(coeffs[..=n_max].iter().map(|c| c.re).collect())
}
