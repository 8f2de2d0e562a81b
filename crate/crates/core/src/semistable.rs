//! Semi-stable Lévy exponents `ψ(u) = scale · |u|^α · h(u)` with a
//! single-harmonic log-periodic `h`, and the characteristic functions,
//! Laplace transforms and generating functions built from them.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::corpus::Law;
use crate::decompose;
use crate::error::{check_open_unit, check_positive, Error, Result};
use crate::report::{Certificate, DecompositionReport, GridMeta, Identity};
use crate::transforms::{self, Certification, InversionConfig, TransformFn, TransformKind};

fn wrap_phase(phase: f64) -> f64 {
    let r = libm::fmod(phase, 2.0 * PI);
    if r < 0.0 {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Default admissibility cap on `|h_epsilon|`. Larger amplitudes need an
/// explicit override and a downstream validity certificate.
pub const H_EPS_MAX: f64 = 0.05;

/// Admissibility cap for a given index. The cap does not depend on `α`.
pub fn h_eps_max(_alpha: f64) -> f64 {
    H_EPS_MAX
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SemiStableExponent {
    alpha: f64,
    b: f64,
    a: f64,
    h_epsilon: f64,
    h_phase: f64,
    scale: f64,
    overridden: bool,
}

impl SemiStableExponent {
    pub fn new(alpha: f64, b: f64, h_epsilon: f64, h_phase: f64, scale: f64) -> Result<Self> {
        let cap = h_eps_max(alpha);
        if h_epsilon.abs() > cap {
            return Err(Error::PossiblyInvalidExponent { h_epsilon, cap });
        }
        Self::build(alpha, b, h_epsilon, h_phase, scale, false)
    }

    /// Like [`new`](Self::new) but accepts `|h_epsilon|` up to (not including)
    /// one. The result is flagged and its CF must pass a validity certificate.
    pub fn new_with_override(
        alpha: f64,
        b: f64,
        h_epsilon: f64,
        h_phase: f64,
        scale: f64,
    ) -> Result<Self> {
        let overridden = h_epsilon.abs() > h_eps_max(alpha);
        Self::build(alpha, b, h_epsilon, h_phase, scale, overridden)
    }

    /// Strictly stable exponent `scale · |u|^α`; `b` only fixes the bookkeeping
    /// pair `(a, b)` since a stable exponent scales at every `b`.
    pub fn stable(alpha: f64, b: f64, scale: f64) -> Result<Self> {
        Self::new(alpha, b, 0.0, 0.0, scale)
    }

    fn build(
        alpha: f64,
        b: f64,
        h_epsilon: f64,
        h_phase: f64,
        scale: f64,
        overridden: bool,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                expected: "a value in (0, 2]",
            });
        }
        check_open_unit("b", b)?;
        check_positive("scale", scale)?;
        if !(h_epsilon.abs() < 1.0) {
            return Err(Error::InvalidParameter {
                name: "h_epsilon",
                value: h_epsilon,
                expected: "|h_epsilon| < 1 so that h stays positive",
            });
        }
        if !h_phase.is_finite() {
            return Err(Error::InvalidParameter {
                name: "h_phase",
                value: h_phase,
                expected: "a finite phase",
            });
        }
        Ok(SemiStableExponent {
            alpha,
            b,
            a: libm::pow(b, -alpha),
            h_epsilon,
            h_phase: wrap_phase(h_phase),
            scale,
            overridden,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `a = b^{-α}`, never set independently.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn h_epsilon(&self) -> f64 {
        self.h_epsilon
    }

    pub fn h_phase(&self) -> f64 {
        self.h_phase
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_stable(&self) -> bool {
        self.h_epsilon == 0.0
    }

    /// Built past the amplitude cap; any CF made from it must be certified.
    pub fn is_overridden(&self) -> bool {
        self.overridden
    }

    /// Period of `h` in `ln|u|`.
    pub fn period(&self) -> f64 {
        -libm::log(self.b)
    }

    pub fn h(&self, u: f64) -> f64 {
        if self.h_epsilon == 0.0 {
            return 1.0;
        }
        let arg = 2.0 * PI * libm::log(u.abs()) / self.period() + self.h_phase;
        1.0 + self.h_epsilon * libm::cos(arg)
    }

    /// `ψ(u)`, with `ψ(0) = 0` by continuity.
    pub fn eval(&self, u: f64) -> f64 {
        let x = u.abs();
        if x == 0.0 {
            return 0.0;
        }
        let power = if self.alpha == 2.0 {
            x * x
        } else if self.alpha == 1.0 {
            x
        } else {
            libm::pow(x, self.alpha)
        };
        self.scale * power * self.h(x)
    }

    /// Analytic continuation to `Re w >= 0` with principal branches, used
    /// for Laplace-domain exponents. Agrees with [`eval`](Self::eval) on the
    /// positive axis up to rounding.
    pub fn eval_complex(&self, w: Complex64) -> Complex64 {
        if w.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if w.im == 0.0 && w.re > 0.0 {
            return Complex64::new(self.eval(w.re), 0.0);
        }
        let power = w.powf(self.alpha);
        let h = if self.h_epsilon == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            let arg = w.ln() * (2.0 * PI / self.period()) + self.h_phase;
            1.0 + arg.cos() * self.h_epsilon
        };
        power * h * self.scale
    }

    pub fn label(&self) -> alloc::string::String {
        if self.is_stable() {
            format!("stable(alpha={}, scale={})", self.alpha, self.scale)
        } else {
            format!(
                "semistable(alpha={}, b={}, eps={}, phase={}, scale={})",
                self.alpha, self.b, self.h_epsilon, self.h_phase, self.scale
            )
        }
    }
}

/// `f(s) = exp(-ψ(s))`. Log-periodic constructions are run through the
/// Bochner certificate on the default grid and marked necessary-only when it
/// passes, candidate otherwise.
pub fn semistable_cf(psi: &SemiStableExponent) -> TransformFn {
    let p = *psi;
    let f = TransformFn::from_exponent(TransformKind::Cf, psi.label(), move |z| {
        Complex64::new(p.eval(z.re), 0.0)
    })
    .with_law(Law::SemiStable(p))
    .with_known_sd(p.is_stable());
    if p.is_stable() {
        return f;
    }
    let cfg = InversionConfig::default();
    let ok = decompose::is_valid_cf(&f, &cfg.cf_grid(), cfg.psd_tolerance)
        .map(|c| c.verdict().is_pass())
        .unwrap_or(false);
    f.with_certification(if ok {
        Certification::NecessaryOnly
    } else {
        Certification::Candidate
    })
}

/// Laplace transform `exp(-ψ(s))` of a nonnegative semi-stable law; needs
/// `α <= 1`. Log-periodic exponents are marked candidate: complete
/// monotonicity is not implied by the construction.
pub fn semistable_lt(psi: &SemiStableExponent) -> Result<TransformFn> {
    if psi.alpha > 1.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: psi.alpha,
            expected: "alpha <= 1 for a Laplace-domain exponent",
        });
    }
    let p = *psi;
    let t = TransformFn::from_exponent(TransformKind::Lt, format!("lt-{}", psi.label()), move |w| {
        p.eval_complex(w)
    })
    .with_law(Law::SemiStableLt(p))
    .with_known_sd(p.is_stable());
    Ok(if p.is_stable() {
        t
    } else {
        t.with_certification(Certification::Candidate)
    })
}

/// Discrete semi-stable generating function `exp(-ψ(1 - s))`.
pub fn discrete_semistable_pgf(psi: &SemiStableExponent) -> Result<TransformFn> {
    transforms::lt_to_pgf(&semistable_lt(psi)?)
}

/// Max of `|ψ(u) - a ψ(bu)|` over `grid` for an arbitrary exponent.
pub fn check_scaling_identity_with<F: Fn(f64) -> f64>(
    psi: F,
    a: f64,
    b: f64,
    grid: &[f64],
    tolerance: f64,
) -> DecompositionReport {
    let mut max_residual = 0.0f64;
    let mut max_value = 0.0f64;
    for &u in grid {
        let v = psi(u);
        max_value = max_value.max(v.abs());
        let r = (v - a * psi(b * u)).abs();
        max_residual = if r.is_nan() { f64::NAN } else { max_residual.max(r) };
    }
    let mut report = DecompositionReport::from_parts(
        Identity::ScalingIdentity,
        alloc::vec![a, b],
        max_residual,
        tolerance,
        Certificate::none(GridMeta::of(grid)),
    );
    if max_value == 0.0 {
        report.degenerate = true;
        report.append_caveat("degenerate exponent: psi vanishes on the grid");
    }
    report
}

pub fn check_scaling_identity(psi: &SemiStableExponent, grid: &[f64], tolerance: f64) -> DecompositionReport {
    check_scaling_identity_with(|u| psi.eval(u), psi.a, psi.b, grid, tolerance)
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (libm::log(lo), libm::log(hi));
    transforms::linspace(l, h, n).into_iter().map(libm::exp).collect()
}

/// Innovation of the scaling decomposition `f(s) = f(bs) {f(bs)}^{a-1}`:
/// `f0(s) = exp(-(a - 1) ψ(bs))`.
pub fn scaling_innovation(psi: &SemiStableExponent) -> TransformFn {
    let p = *psi;
    let factor = p.a - 1.0;
    TransformFn::from_exponent(
        TransformKind::Cf,
        format!("innovation[{}]", psi.label()),
        move |z| Complex64::new(factor * p.eval(p.b * z.re), 0.0),
    )
    .with_certification(if p.is_stable() {
        Certification::Exact
    } else {
        Certification::Candidate
    })
}
