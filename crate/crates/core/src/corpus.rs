//! Closed-form members of the corpus. Each constructor tags its transform
//! with a [`Law`] so samplers and reports can recognise it.

use alloc::boxed::Box;
use alloc::format;

use num_complex::Complex64;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::semistable::SemiStableExponent;
use crate::transforms::{self, TransformFn, TransformKind};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "kebab-case"))]
pub enum Law {
    /// Centred normal, CF `exp(-variance s² / 2)`.
    Gaussian { variance: f64 },
    /// Symmetric semi-stable (stable when `h_epsilon = 0`), CF `exp(-ψ(s))`.
    SemiStable(SemiStableExponent),
    /// Degenerate law at `at`, CF `e^{i at s}`.
    PointMass { at: f64 },
    /// CF `(1 + ψ(s))^{-β}`.
    GenSemiAlphaLaplace { exponent: SemiStableExponent, beta: f64 },
    /// Subordinated marginal `φ(ψ(s))` at time one.
    Subordinated {
        driven: SemiStableExponent,
        directing: Box<Law>,
    },
    /// LT `(1 + s / rate)^{-shape}`.
    GammaLt { shape: f64, rate: f64 },
    /// LT `e^{-at s}`.
    PointMassLt { at: f64 },
    /// LT `exp(-scale s^index)`, `0 < index < 1`.
    StableSubordinatorLt { index: f64, scale: f64 },
    /// Compound Poisson with exponential jumps: LT `exp(-rate (1 - 1/(1 + jump_mean s)))`.
    CompoundPoissonLt { rate: f64, jump_mean: f64 },
    /// LT `exp(-ψ(s))` of a nonnegative semi-stable law.
    SemiStableLt(SemiStableExponent),
    /// LT `(1 + ψ(s))^{-β}`: gamma mixture of a nonnegative semi-stable law.
    SemiStableGammaLt { exponent: SemiStableExponent, beta: f64 },
    /// PGF `exp(mean (s - 1))`.
    Poisson { mean: f64 },
    /// PGF `(1 + (1 - s) / rate)^{-shape}`; shape 1 is geometric.
    NegativeBinomial { shape: f64, rate: f64 },
    /// PGF `exp(-ψ(1 - s))`.
    DiscreteSemiStable(SemiStableExponent),
}

impl Law {
    pub(crate) fn lt_to_pgf(&self) -> Option<Law> {
        match *self {
            Law::PointMassLt { at } => Some(Law::Poisson { mean: at }),
            Law::GammaLt { shape, rate } => Some(Law::NegativeBinomial { shape, rate }),
            Law::SemiStableLt(psi) => Some(Law::DiscreteSemiStable(psi)),
            _ => None,
        }
    }

    pub(crate) fn pgf_to_lt(&self) -> Option<Law> {
        match *self {
            Law::Poisson { mean } => Some(Law::PointMassLt { at: mean }),
            Law::NegativeBinomial { shape, rate } => Some(Law::GammaLt { shape, rate }),
            Law::DiscreteSemiStable(psi) => Some(Law::SemiStableLt(psi)),
            _ => None,
        }
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub fn gaussian(variance: f64) -> TransformFn {
    TransformFn::from_exponent(
        TransformKind::Cf,
        format!("gaussian(variance={variance})"),
        move |z| real(0.5 * variance * z.re * z.re),
    )
    .with_law(Law::Gaussian { variance })
    .with_known_sd(true)
}

pub fn cauchy(scale: f64) -> TransformFn {
    let psi = SemiStableExponent::stable(1.0, 0.5, scale).expect("positive Cauchy scale");
    crate::semistable::semistable_cf(&psi).with_label(format!("cauchy(scale={scale})"))
}

/// CF `e^{i at s}` of the point mass at `at`.
pub fn point_mass_cf(at: f64) -> TransformFn {
    TransformFn::cf(format!("point-mass({at})"), move |s| Complex64::from_polar(1.0, at * s))
        .with_law(Law::PointMass { at })
        .with_known_sd(true)
}

/// Gamma Laplace transform `(1 + s / rate)^{-shape}`.
pub fn gamma_lt(shape: f64, rate: f64) -> TransformFn {
    TransformFn::from_exponent(
        TransformKind::Lt,
        format!("gamma-lt(shape={shape}, rate={rate})"),
        move |w| (1.0 + w / rate).ln() * shape,
    )
    .with_law(Law::GammaLt { shape, rate })
    .with_known_sd(true)
}

pub fn exponential_lt(rate: f64) -> TransformFn {
    gamma_lt(1.0, rate).with_label(format!("exponential-lt(rate={rate})"))
}

pub fn point_mass_lt(at: f64) -> TransformFn {
    TransformFn::from_exponent(TransformKind::Lt, format!("point-mass-lt({at})"), move |w| w * at)
        .with_law(Law::PointMassLt { at })
        .with_known_sd(true)
}

pub fn stable_subordinator_lt(index: f64, scale: f64) -> Result<TransformFn> {
    if !(index > 0.0 && index < 1.0) {
        return Err(Error::InvalidParameter {
            name: "index",
            value: index,
            expected: "a value in (0, 1)",
        });
    }
    check_positive("scale", scale)?;
    Ok(TransformFn::from_exponent(
        TransformKind::Lt,
        format!("stable-subordinator-lt(index={index}, scale={scale})"),
        move |w| {
            if w.norm() == 0.0 {
                real(0.0)
            } else {
                w.powf(index) * scale
            }
        },
    )
    .with_law(Law::StableSubordinatorLt { index, scale })
    .with_known_sd(true))
}

/// Compound Poisson subordinator with exponential jumps. Not selfdecomposable.
pub fn compound_poisson_lt(rate: f64, jump_mean: f64) -> Result<TransformFn> {
    check_positive("rate", rate)?;
    check_positive("jump_mean", jump_mean)?;
    Ok(TransformFn::from_exponent(
        TransformKind::Lt,
        format!("compound-poisson-lt(rate={rate}, jump_mean={jump_mean})"),
        move |w| (1.0 - 1.0 / (1.0 + w * jump_mean)) * rate,
    )
    .with_law(Law::CompoundPoissonLt { rate, jump_mean }))
}

/// LT `(1 + ψ(s))^{-β}` with a Laplace-domain semi-stable exponent
/// (`α <= 1`). Semi-SD at the exponent's `b`; selfdecomposable when `ψ` is
/// stable.
pub fn semistable_gamma_lt(psi: &SemiStableExponent, beta: f64) -> Result<TransformFn> {
    check_positive("beta", beta)?;
    if psi.alpha() > 1.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: psi.alpha(),
            expected: "alpha <= 1 for a Laplace-domain exponent",
        });
    }
    let p = *psi;
    Ok(TransformFn::from_exponent(
        TransformKind::Lt,
        format!("semistable-gamma-lt({}, beta={beta})", psi.label()),
        move |w| (1.0 + p.eval_complex(w)).ln() * beta,
    )
    .with_law(Law::SemiStableGammaLt { exponent: p, beta }))
}

pub fn poisson_pgf(mean: f64) -> TransformFn {
    transforms::lt_to_pgf(&point_mass_lt(mean))
        .expect("LT input")
        .with_label(format!("poisson(mean={mean})"))
}

/// Geometric law on {0, 1, ...} with the given mean, `P(s) = 1/(1 + mean (1 - s))`.
pub fn geometric_pgf(mean: f64) -> TransformFn {
    transforms::lt_to_pgf(&exponential_lt(1.0 / mean))
        .expect("LT input")
        .with_label(format!("geometric(mean={mean})"))
}
