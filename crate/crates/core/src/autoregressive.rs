//! Stationary AR(1) `X_n = ρ X_{n-1} + ε_n` and its integer analogue INAR(1)
//! `X_n = ρ ∘ X_{n-1} + ε_n` with binomial thinning. A config is only built
//! once the marginal is certified semi-SD(ρ), so the innovation exists.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::corpus::Law;
use crate::decompose;
use crate::error::{check_open_unit, Error, Result};
use crate::report::{Certificate, CertificateKind, DecompositionReport, GridMeta, Identity, Verdict};
use crate::sampling::{stream_rng, ContinuousSampler, DiscreteTable, QuantileTable};
use crate::stats;
use crate::transforms::{linspace, symmetric_grid, InversionConfig, TransformFn, TransformKind};

/// Shortest series [`stationarity_diagnostic`] accepts.
pub const MIN_DIAGNOSTIC_LEN: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum InnovationSource {
    ClosedForm,
    NumericInversion,
    CoefficientTable,
}

#[derive(Debug, Clone)]
pub enum Sampler {
    Real(ContinuousSampler),
    Count(DiscreteTable),
}

#[derive(Debug, Clone)]
pub struct Ar1Config {
    pub rho: f64,
    pub marginal: TransformFn,
    /// Innovation transform: `f(s) / f(ρs)` or `P(s) / P(1 - ρ + ρs)`.
    pub innovation: TransformFn,
    pub innovation_source: InnovationSource,
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// `None` only for configs built with [`Ar1Config::new_unchecked`].
    pub certificate: Option<DecompositionReport>,
    marginal_sampler: Sampler,
    innovation_sampler: Sampler,
}

impl Ar1Config {
    /// Skips certification entirely. Meant for experiments such as feeding
    /// a deliberately wrong innovation; [`build_ar1`] is the checked path.
    pub fn new_unchecked(
        rho: f64,
        marginal: (TransformFn, Sampler),
        innovation: (TransformFn, Sampler),
        innovation_source: InnovationSource,
    ) -> Result<Self> {
        check_open_unit("rho", rho)?;
        Ok(Ar1Config {
            rho,
            marginal: marginal.0,
            innovation: innovation.0,
            innovation_source,
            n: MIN_DIAGNOSTIC_LEN,
            burn_in: 0,
            seed: 0,
            certificate: None,
            marginal_sampler: marginal.1,
            innovation_sampler: innovation.1,
        })
    }

    pub fn with_length(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_discrete(&self) -> bool {
        self.marginal.kind() == TransformKind::Pgf
    }

    pub fn innovation_sampler(&self) -> &Sampler {
        &self.innovation_sampler
    }
}

/// Certifies `marginal` at `ρ` and binds samplers for it and its innovation.
pub fn build_ar1(marginal: &TransformFn, rho: f64, cfg: &InversionConfig) -> Result<Ar1Config> {
    check_open_unit("rho", rho)?;
    let report = match marginal.kind() {
        TransformKind::Cf => decompose::check_semisd(marginal, rho, &cfg.cf_grid(), cfg)?,
        TransformKind::Pgf => decompose::check_discrete_semisd(marginal, rho, cfg)?,
        found => {
            return Err(Error::WrongKind {
                expected: TransformKind::Cf,
                found,
            })
        }
    };
    if !report.passed() {
        return Err(Error::NotSemiSdAtRho {
            rho,
            report: alloc::boxed::Box::new(report),
        });
    }
    let (innovation, marginal_sampler, innovation_sampler, source) = match marginal.kind() {
        TransformKind::Pgf => {
            let p0 = decompose::discrete_innovation(marginal, rho)?;
            let m = DiscreteTable::from_pgf(marginal, cfg)?;
            let e = DiscreteTable::from_pgf(&p0, cfg)?;
            (p0, Sampler::Count(m), Sampler::Count(e), InnovationSource::CoefficientTable)
        }
        _ => {
            let f0 = decompose::innovation_cf(marginal, rho, &cfg.cf_grid())?;
            match closed_form_samplers(marginal.law(), rho) {
                Some((m, e)) => (f0, Sampler::Real(m), Sampler::Real(e), InnovationSource::ClosedForm),
                None => {
                    let m = QuantileTable::from_cf(marginal, cfg)?;
                    let e = QuantileTable::from_cf(&f0, cfg)?;
                    (
                        f0,
                        Sampler::Real(ContinuousSampler::Table(m)),
                        Sampler::Real(ContinuousSampler::Table(e)),
                        InnovationSource::NumericInversion,
                    )
                }
            }
        }
    };
    Ok(Ar1Config {
        rho,
        marginal: marginal.clone(),
        innovation,
        innovation_source: source,
        n: MIN_DIAGNOSTIC_LEN,
        burn_in: 0,
        seed: 0,
        certificate: Some(report),
        marginal_sampler,
        innovation_sampler,
    })
}

/// Marginal and innovation samplers when both laws are known in closed form.
fn closed_form_samplers(law: Option<&Law>, rho: f64) -> Option<(ContinuousSampler, ContinuousSampler)> {
    use ContinuousSampler as S;
    match *law? {
        Law::Gaussian { variance } => Some((
            S::Gaussian {
                std_dev: libm::sqrt(variance),
            },
            S::Gaussian {
                std_dev: libm::sqrt(variance * (1.0 - rho * rho)),
            },
        )),
        Law::SemiStable(psi) if psi.is_stable() => {
            let (alpha, scale) = (psi.alpha(), psi.scale());
            Some((
                S::SymmetricStable { alpha, scale },
                S::SymmetricStable {
                    alpha,
                    scale: scale * (1.0 - libm::pow(rho, alpha)),
                },
            ))
        }
        Law::PointMass { at } => Some((S::PointMass { at }, S::PointMass { at: at * (1.0 - rho) })),
        // (1 + ψ(ρs)) / (1 + ψ(s)) = ρ^α + (1 - ρ^α) / (1 + ψ(s))
        Law::GenSemiAlphaLaplace { exponent, beta } if exponent.is_stable() && beta == 1.0 => {
            let (alpha, scale) = (exponent.alpha(), exponent.scale());
            let linnik = S::Linnik { alpha, scale };
            Some((
                linnik.clone(),
                S::AtomMixture {
                    atom_prob: libm::pow(rho, alpha),
                    atom: 0.0,
                    rest: alloc::boxed::Box::new(linnik),
                },
            ))
        }
        _ => None,
    }
}

/// Sum of `x` Bernoulli(ρ) draws.
pub fn binomial_thinning<R: Rng + ?Sized>(x: u64, rho: f64, rng: &mut R) -> u64 {
    if x == 0 {
        return 0;
    }
    Binomial::new(x, rho.clamp(0.0, 1.0))
        .expect("probability in [0, 1]")
        .sample(rng)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind", content = "data"))]
pub enum SeriesValues {
    Real(Vec<f64>),
    Count(Vec<u64>),
}

impl SeriesValues {
    pub fn len(&self) -> usize {
        match self {
            SeriesValues::Real(v) => v.len(),
            SeriesValues::Count(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values as reals (counts converted).
    pub fn to_real(&self) -> Vec<f64> {
        match self {
            SeriesValues::Real(v) => v.clone(),
            SeriesValues::Count(v) => v.iter().map(|&k| k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesSample {
    pub values: SeriesValues,
    pub seed: u64,
    pub replicate: u64,
    pub burn_in: usize,
    pub n: usize,
    pub rho: f64,
    pub label: String,
}

fn draw_real(s: &Sampler, rng: &mut ChaCha8Rng) -> f64 {
    match s {
        Sampler::Real(c) => c.sample(rng),
        Sampler::Count(t) => t.sample(rng) as f64,
    }
}

fn draw_count(s: &Sampler, rng: &mut ChaCha8Rng) -> u64 {
    match s {
        Sampler::Count(t) => t.sample(rng),
        Sampler::Real(c) => c.sample(rng).max(0.0) as u64,
    }
}

fn sample_meta(cfg: &Ar1Config, replicate: u64, values: SeriesValues) -> SeriesSample {
    SeriesSample {
        values,
        seed: cfg.seed,
        replicate,
        burn_in: cfg.burn_in,
        n: cfg.n,
        rho: cfg.rho,
        label: cfg.marginal.label().into(),
    }
}

/// Real-valued chain. `X_0` comes from the marginal, so the chain is
/// stationary from the start; the first `burn_in` values are still dropped.
pub fn simulate_ar1(cfg: &Ar1Config) -> Result<SeriesSample> {
    simulate_ar1_replicate(cfg, 0)
}

/// Replicate `replicate` of the chain, on its own stream of `cfg.seed`.
pub fn simulate_ar1_replicate(cfg: &Ar1Config, replicate: u64) -> Result<SeriesSample> {
    if cfg.is_discrete() {
        return Err(Error::WrongKind {
            expected: TransformKind::Cf,
            found: TransformKind::Pgf,
        });
    }
    let mut rng = stream_rng(cfg.seed, replicate);
    let total = cfg.burn_in + cfg.n;
    let mut values = Vec::with_capacity(cfg.n);
    let mut x = draw_real(&cfg.marginal_sampler, &mut rng);
    for i in 0..total {
        if i > 0 {
            x = cfg.rho * x + draw_real(&cfg.innovation_sampler, &mut rng);
        }
        if i >= cfg.burn_in {
            values.push(x);
        }
    }
    Ok(sample_meta(cfg, replicate, SeriesValues::Real(values)))
}

pub fn simulate_inar1(cfg: &Ar1Config) -> Result<SeriesSample> {
    simulate_inar1_replicate(cfg, 0)
}

pub fn simulate_inar1_replicate(cfg: &Ar1Config, replicate: u64) -> Result<SeriesSample> {
    if !cfg.is_discrete() {
        return Err(Error::WrongKind {
            expected: TransformKind::Pgf,
            found: cfg.marginal.kind(),
        });
    }
    let mut rng = stream_rng(cfg.seed, replicate);
    let total = cfg.burn_in + cfg.n;
    let mut values = Vec::with_capacity(cfg.n);
    let mut x = draw_count(&cfg.marginal_sampler, &mut rng);
    for i in 0..total {
        if i > 0 {
            x = binomial_thinning(x, cfg.rho, &mut rng) + draw_count(&cfg.innovation_sampler, &mut rng);
        }
        if i >= cfg.burn_in {
            values.push(x);
        }
    }
    Ok(sample_meta(cfg, replicate, SeriesValues::Count(values)))
}

/// AR(1) or INAR(1) according to the marginal kind.
pub fn simulate(cfg: &Ar1Config, replicate: u64) -> Result<SeriesSample> {
    if cfg.is_discrete() {
        simulate_inar1_replicate(cfg, replicate)
    } else {
        simulate_ar1_replicate(cfg, replicate)
    }
}

/// Default diagnostic grid: 13 points on `[-3, 3]` for CFs, `0.1..=0.9` for
/// PGFs.
pub fn default_s_grid(cfg: &Ar1Config) -> Vec<f64> {
    if cfg.is_discrete() {
        linspace(0.1, 0.9, 9)
    } else {
        symmetric_grid(3.0, 13)
    }
}

/// Compares the sample's empirical transform with the marginal and checks
/// `f_X(s) = f_X(ρs) f_ε(s)` empirically, both within `5/√n`.
pub fn stationarity_diagnostic(
    sample: &SeriesSample,
    cfg: &Ar1Config,
    s_grid: &[f64],
) -> Result<DecompositionReport> {
    let n = sample.values.len();
    if n < MIN_DIAGNOSTIC_LEN {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            expected: "a sample of at least 10000 values",
        });
    }
    if s_grid.is_empty() {
        return Err(Error::InvalidGrid("s-grid must not be empty"));
    }
    let envelope = 5.0 / libm::sqrt(n as f64);
    let rho = cfg.rho;
    let (marginal_sup, factor_sup) = match &sample.values {
        SeriesValues::Real(xs) => {
            let marg = sup(s_grid, |s| (stats::empirical_cf(xs, s) - cfg.marginal.at(s)).norm());
            let (prev, next) = (&xs[..n - 1], &xs[1..]);
            let fac = sup(s_grid, |s| {
                let rhs: Complex64 = stats::empirical_cf(prev, rho * s) * cfg.innovation.at(s);
                (stats::empirical_cf(next, s) - rhs).norm()
            });
            (marg, fac)
        }
        SeriesValues::Count(ks) => {
            let marg = sup(s_grid, |s| (stats::empirical_pgf(ks, s) - cfg.marginal.real_at(s)).abs());
            let (prev, next) = (&ks[..n - 1], &ks[1..]);
            let fac = sup(s_grid, |s| {
                let thinned = stats::empirical_pgf(prev, 1.0 - rho + rho * s);
                (stats::empirical_pgf(next, s) - thinned * cfg.innovation.real_at(s)).abs()
            });
            (marg, fac)
        }
    };
    let meta = GridMeta::of(s_grid);
    let child = |value: f64, what: &str| {
        let cert = Certificate::new(CertificateKind::EmpiricalSlack, envelope - value, 0.0, meta.clone());
        let mut r = DecompositionReport::from_parts(Identity::Stationarity, alloc::vec![rho], 0.0, 0.0, cert);
        r.verdict = if value <= envelope { Verdict::Pass } else { Verdict::Fail };
        r.notes.push(format!("{what}: sup distance {value:e}, envelope {envelope:e}"));
        r
    };
    let children = alloc::vec![child(marginal_sup, "marginal"), child(factor_sup, "factorization")];
    let worst = marginal_sup.max(factor_sup);
    let cert = Certificate::new(CertificateKind::EmpiricalSlack, envelope - worst, 0.0, meta);
    let mut report = DecompositionReport::from_parts(Identity::Stationarity, alloc::vec![rho], 0.0, 0.0, cert);
    report.verdict = Verdict::all(children.iter().map(|c| c.verdict));
    report.children = children;
    report.append_caveat("Monte-Carlo envelope 5/sqrt(n)");
    Ok(report)
}

fn sup(grid: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    grid.iter().map(|&s| f(s)).fold(0.0, f64::max)
}
