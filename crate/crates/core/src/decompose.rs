//! Certification of the decomposition identities `f(s) = f(bs) f0(s)` (CF),
//! `φ(s) = φ(cs) φ0(s)` (LT) and `P(s) = P(1 - c + cs) P0(s)` (PGF).
//!
//! Each check extracts the factor as a ratio, so the algebraic residual is
//! zero up to rounding; the substance is the validity certificate of the
//! extracted factor: finite-grid positive semidefiniteness for CFs,
//! nonnegative aliased coefficients for PGFs, finite-order complete
//! monotonicity for LTs. All of these are necessary conditions only.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_open_unit, Error, Result};
use crate::linalg;
use crate::report::{
    Certificate, CertificateKind, DecompositionReport, GridMeta, Identity, Verdict,
};
use crate::transforms::{
    self, aliased_coefficients, linspace, Certification, InversionConfig, TransformFn,
    TransformKind, VANISHING_FLOOR,
};

fn pairwise_differences(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len() * grid.len());
    for &x in grid {
        for &y in grid {
            out.push(x - y);
        }
    }
    out
}

/// Ratio transform `num(z) / num(map(z))`, using exponents when the input
/// carries one.
fn ratio_transform<M>(
    f: &TransformFn,
    kind: TransformKind,
    label: String,
    map: M,
) -> TransformFn
where
    M: Fn(Complex64) -> Complex64 + Send + Sync + Clone + 'static,
{
    let t = if f.has_exponent() {
        let g = f.clone();
        TransformFn::from_exponent(kind, label, move |z| {
            g.neg_log(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                - g.neg_log(map(z)).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        })
    } else {
        let eval = f.evaluator();
        TransformFn::new(kind, label, move |z| eval(z) / eval(map(z)))
    };
    t.with_certification(Certification::Candidate)
}

/// Candidate innovation `f0(s) = f(s) / f(bs)`. The denominator is checked on
/// every pairwise difference of `grid`, the arguments a Bochner certificate
/// on that grid will evaluate.
pub fn innovation_cf(f: &TransformFn, b: f64, grid: &[f64]) -> Result<TransformFn> {
    f.expect_kind(TransformKind::Cf)?;
    check_open_unit("b", b)?;
    for d in pairwise_differences(grid).into_iter().chain(grid.iter().copied()) {
        let v = f.at(b * d);
        if !(v.norm() >= VANISHING_FLOOR) {
            return Err(Error::VanishingCf { at: b * d });
        }
    }
    Ok(ratio_transform(
        f,
        TransformKind::Cf,
        format!("innovation[{}; b={b}]", f.label()),
        move |z| z * b,
    ))
}

fn is_symmetric_grid(grid: &[f64]) -> bool {
    let n = grid.len();
    let scale = grid.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    grid.windows(2).all(|w| w[1] > w[0])
        && (0..n).all(|i| (grid[i] + grid[n - 1 - i]).abs() <= 1e-12 * scale)
}

/// Necessary-condition certificate that `g` is a characteristic function:
/// `g(0) = 1`, `|g| <= 1`, Hermitian symmetry, and a positive semidefinite
/// Bochner matrix `[g(s_j - s_k)]` on `grid`.
pub fn is_valid_cf(g: &TransformFn, grid: &[f64], tolerance: f64) -> Result<Certificate> {
    if grid.len() < 21 {
        return Err(Error::InvalidGrid("CF validity grid needs at least 21 points"));
    }
    if !is_symmetric_grid(grid) {
        return Err(Error::InvalidGrid(
            "CF validity grid must be increasing and symmetric around 0",
        ));
    }
    let meta = GridMeta::of(grid);
    let kind = CertificateKind::MinEigenvalue;
    let at0 = g.at(0.0);
    if !((at0 - 1.0).norm() <= tolerance) {
        return Ok(Certificate::failed_precheck(kind, tolerance, meta, 0.0, "g(0) != 1"));
    }
    for d in pairwise_differences(grid) {
        let v = g.at(d);
        if !(v.norm() <= 1.0 + tolerance) {
            return Ok(Certificate::failed_precheck(kind, tolerance, meta, d, "|g| > 1"));
        }
        if !((g.at(-d) - v.conj()).norm() <= tolerance) {
            return Ok(Certificate::failed_precheck(
                kind,
                tolerance,
                meta,
                d,
                "g(-s) != conj(g(s))",
            ));
        }
    }
    let n = grid.len();
    let mut m = Vec::with_capacity(n * n);
    for &x in grid {
        for &y in grid {
            m.push(g.at(x - y));
        }
    }
    let eig = linalg::hermitian_eigenvalues(&m, n);
    Ok(Certificate::new(kind, eig[0], tolerance, meta))
}

/// Semi-SD(b) certificate for a characteristic function.
pub fn check_semisd(
    f: &TransformFn,
    b: f64,
    grid: &[f64],
    cfg: &InversionConfig,
) -> Result<DecompositionReport> {
    let f0 = innovation_cf(f, b, grid)?;
    let max_residual = grid
        .iter()
        .map(|&s| (f.at(s) - f.at(b * s) * f0.at(s)).norm())
        .fold(0.0, f64::max);
    let cert = is_valid_cf(&f0, grid, cfg.psd_tolerance)?;
    let mut report = DecompositionReport::from_parts(
        Identity::CfSemiSd,
        alloc::vec![b],
        max_residual,
        cfg.residual_tolerance,
        cert,
    );
    if !report.passed() && report.certificate.verdict() != Verdict::Pass {
        let msg = report.certificate.message.clone().unwrap_or_else(|| {
            format!("min eigenvalue {:e}", report.certificate.value)
        });
        report.notes.push(format!("innovation validity failed: {msg}"));
    }
    Ok(report)
}

/// Samples the "for every c" quantifier of selfdecomposability on `c_grid`.
pub fn check_sd_full(
    f: &TransformFn,
    c_grid: &[f64],
    grid: &[f64],
    cfg: &InversionConfig,
) -> Result<DecompositionReport> {
    if c_grid.is_empty() {
        return Err(Error::InvalidGrid("c-grid must not be empty"));
    }
    let children = c_grid
        .iter()
        .map(|&c| check_semisd(f, c, grid, cfg))
        .collect::<Result<Vec<_>>>()?;
    combine(Identity::CfSdFullRange, c_grid.to_vec(), children, cfg.residual_tolerance, |mut r| {
        r.append_caveat("sampled c-grid: a finite sample of the every-c requirement");
        r
    })
}

fn combine(
    identity: Identity,
    parameters: Vec<f64>,
    children: Vec<DecompositionReport>,
    residual_tolerance: f64,
    finish: impl FnOnce(DecompositionReport) -> DecompositionReport,
) -> Result<DecompositionReport> {
    let max_residual = children.iter().map(|c| c.max_residual).fold(0.0, f64::max);
    let worst = children
        .iter()
        .min_by(|a, b| a.certificate.value.total_cmp(&b.certificate.value))
        .map(|c| c.certificate.clone())
        .expect("non-empty children");
    let mut report =
        DecompositionReport::from_parts(identity, parameters, max_residual, residual_tolerance, worst);
    report.verdict = Verdict::all(children.iter().map(|c| c.verdict));
    for child in &children {
        if child.verdict != Verdict::Pass {
            report.notes.push(format!(
                "{:?} at {:?}: certificate {:e}",
                child.verdict, child.parameters, child.certificate.value
            ));
        }
    }
    report.children = children;
    Ok(finish(report))
}

/// Candidate discrete innovation `P0(s) = P(s) / P(1 - c + cs)`.
pub fn discrete_innovation(p: &TransformFn, c: f64) -> Result<TransformFn> {
    p.expect_kind(TransformKind::Pgf)?;
    check_open_unit("c", c)?;
    for s in linspace(0.0, 1.0, 101) {
        let v = p.real_at(1.0 - c + c * s);
        if !(v.abs() >= VANISHING_FLOOR) {
            return Err(Error::VanishingPgf { at: 1.0 - c + c * s });
        }
    }
    let shift = Complex64::new(1.0 - c, 0.0);
    Ok(ratio_transform(
        p,
        TransformKind::Pgf,
        format!("innovation[{}; c={c}]", p.label()),
        move |z| shift + z * c,
    ))
}

/// Certifies a candidate PGF from its aliased DFT coefficients: every entry
/// of a genuine PGF's aliased sequence is a sum of true coefficients, so all
/// must be nonnegative and they must total one.
pub(crate) fn pgf_certificate(p0: &TransformFn, cfg: &InversionConfig) -> Certificate {
    let n = cfg.dft_size;
    let tol = cfg.tolerance;
    let meta = GridMeta {
        points: n,
        lo: 0.0,
        hi: 2.0 * PI,
    };
    let kind = CertificateKind::MinCoefficient;
    for j in 0..n {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let v = p0.eval(Complex64::from_polar(1.0, theta));
        if !(v.norm() <= 1.0 + tol) {
            return Certificate::failed_precheck(kind, tol, meta, theta, "|P0| > 1 on the unit circle");
        }
    }
    let coeffs = aliased_coefficients(p0, n);
    if let Some(k) = coeffs.iter().position(|c| !(c.im.abs() <= tol)) {
        return Certificate::failed_precheck(kind, tol, meta, k as f64, "not-a-power-series");
    }
    let min = coeffs.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    let sum: f64 = coeffs.iter().map(|c| c.re).sum();
    let tail: f64 = coeffs[n / 2..].iter().map(|c| c.re).sum();
    let sum_gap = (sum - 1.0).abs();
    let value = if sum_gap > tol { min.min(-sum_gap) } else { min };
    let mut cert = Certificate::new(kind, value, tol, meta);
    cert.coefficient_sum = Some(sum);
    cert.tail_mass = Some(tail);
    if sum_gap > tol {
        cert.message = Some(format!("coefficients sum to {sum}"));
    }
    cert
}

/// Discrete semi-SD(c) certificate for a generating function.
pub fn check_discrete_semisd(
    p: &TransformFn,
    c: f64,
    cfg: &InversionConfig,
) -> Result<DecompositionReport> {
    cfg.validate()?;
    let p0 = discrete_innovation(p, c)?;
    let grid = linspace(0.0, 1.0, 101);
    let max_residual = grid
        .iter()
        .map(|&s| (p.at(s) - p.at(1.0 - c + c * s) * p0.at(s)).norm())
        .fold(0.0, f64::max);
    let cert = pgf_certificate(&p0, cfg);
    let degenerate = (p0.real_at(0.0) - 1.0).abs() <= cfg.tolerance;
    let mut report = DecompositionReport::from_parts(
        Identity::PgfDiscreteSemiSd,
        alloc::vec![c],
        max_residual,
        cfg.residual_tolerance,
        cert,
    );
    if degenerate {
        report.degenerate = true;
        report.notes.push("degenerate innovation: P0 is the point mass at 0".into());
    }
    if let Some(msg) = report.certificate.message.clone() {
        report.notes.push(format!("innovation validity failed: {msg}"));
    }
    Ok(report)
}

/// Candidate LT innovation `φ0(s) = φ(s) / φ(cs)`.
pub fn lt_innovation(phi: &TransformFn, c: f64) -> Result<TransformFn> {
    phi.expect_kind(TransformKind::Lt)?;
    check_open_unit("c", c)?;
    Ok(ratio_transform(
        phi,
        TransformKind::Lt,
        format!("innovation[{}; c={c}]", phi.label()),
        move |z| z * c,
    ))
}

/// Semi-SD(c) certificate for a Laplace transform.
pub fn check_lt_semisd(
    phi: &TransformFn,
    c: f64,
    grid: &[f64],
    cfg: &InversionConfig,
) -> Result<DecompositionReport> {
    let phi0 = lt_innovation(phi, c)?;
    for &s in grid {
        if !(phi.real_at(c * s).abs() >= VANISHING_FLOOR) {
            return Err(Error::VanishingCf { at: c * s });
        }
    }
    let max_residual = grid
        .iter()
        .map(|&s| (phi.at(s) - phi.at(c * s) * phi0.at(s)).norm())
        .fold(0.0, f64::max);
    let cm = transforms::check_complete_monotonicity(&phi0, cfg.cm_order, grid, cfg.tolerance)?;
    let mut report = DecompositionReport::from_parts(
        Identity::LtSemiSd,
        alloc::vec![c],
        max_residual,
        cfg.residual_tolerance,
        cm.certificate,
    );
    if report.verdict == Verdict::Inconclusive {
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}

/// LT semi-SD(c) should carry over to the PGF `φ(1 - s)`. Passes when both
/// hold, fails when the LT passes and the PGF does not, and is inconclusive
/// when the LT premise fails.
pub fn lt_pgf_bridge(phi: &TransformFn, c: f64, cfg: &InversionConfig) -> Result<DecompositionReport> {
    let lt = check_lt_semisd(phi, c, &cfg.cm_grid(), cfg)?;
    let pgf = check_discrete_semisd(&transforms::lt_to_pgf(phi)?, c, cfg)?;
    let verdict = match (lt.verdict, pgf.verdict) {
        (Verdict::Pass, Verdict::Pass) => Verdict::Pass,
        (Verdict::Pass, _) => Verdict::Fail,
        _ => Verdict::Inconclusive,
    };
    let mut report = DecompositionReport::from_parts(
        Identity::LtPgfBridge,
        alloc::vec![c],
        lt.max_residual.max(pgf.max_residual),
        cfg.residual_tolerance,
        pgf.certificate.clone(),
    );
    report.verdict = verdict;
    if lt.verdict != Verdict::Pass {
        report.notes.push("LT premise not certified; implication is vacuous".into());
    }
    report.children = alloc::vec![lt, pgf];
    Ok(report)
}
