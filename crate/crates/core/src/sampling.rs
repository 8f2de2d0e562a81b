//! Random variate generation for the corpus laws, plus table samplers built
//! by numeric inversion (continuous) or coefficient extraction (discrete).

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::{Distribution, Open01};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Gamma, Poisson, StandardNormal};
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::semistable::SemiStableExponent;
use crate::transforms::{aliased_coefficients, CdfInverter, InversionConfig, TransformFn, TransformKind};

/// Generator for path `stream` of a run seeded with `seed`. Streams are
/// independent, so results do not depend on scheduling order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Symmetric α-stable variate with CF `exp(-|s|^α)` (Chambers–Mallows–Stuck).
pub fn symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    let v = PI * (u - 0.5);
    if alpha == 1.0 {
        return libm::tan(v);
    }
    let w: f64 = Exp1.sample(rng);
    let a = libm::sin(alpha * v) / libm::pow(libm::cos(v), 1.0 / alpha);
    let b = libm::pow(libm::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
    a * b
}

/// Positive stable variate with LT `exp(-s^index)`, `0 < index < 1` (Kanter).
pub fn positive_stable<R: Rng + ?Sized>(index: f64, rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    let u = PI * u;
    let w: f64 = Exp1.sample(rng);
    let a = libm::sin(index * u) / libm::pow(libm::sin(u), 1.0 / index);
    let b = libm::pow(libm::sin((1.0 - index) * u) / w, (1.0 - index) / index);
    a * b
}

fn gamma_variate<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    if shape <= 0.0 {
        return 0.0;
    }
    Gamma::new(shape, scale).expect("positive gamma parameters").sample(rng)
}

/// Monotone (Fritsch–Carlson) cubic interpolant of the quantile function on
/// a tabulated CDF, with power-law tails beyond the table when the mass
/// outside it exceeds the budget.
#[derive(Debug, Clone)]
pub struct QuantileTable {
    probs: Vec<f64>,
    xs: Vec<f64>,
    slopes: Vec<f64>,
    lower_tail: Option<f64>,
    upper_tail: Option<f64>,
}

impl QuantileTable {
    /// Tabulates the CDF of `f` by Gil-Pelaez inversion on
    /// `cfg.inversion_knots` knots spread like Cauchy quantiles around the
    /// CF's width, widening the tails until the mass outside the table is
    /// within `cfg.inversion_budget`.
    ///
    /// Knots never go past the range the quadrature resolves. If heavy tails
    /// still leave more than the budget outside, each tail is continued as
    /// `|x|^{-κ}` with κ fitted on the outer knots.
    pub fn from_cf(f: &TransformFn, cfg: &InversionConfig) -> Result<Self> {
        f.expect_kind(TransformKind::Cf)?;
        let local = InversionConfig {
            grid_halfwidth: effective_halfwidth(f, cfg),
            ..cfg.clone()
        };
        let inverter = CdfInverter::new(f, &local)?;
        let reach = inverter.resolvable_range();
        let width = cf_width(f, local.grid_halfwidth);
        let k = cfg.inversion_knots.max(16);
        let mut last = None;
        for power in [0.0, 0.5, 1.0, 2.0] {
            let xs: Vec<f64> = (0..k)
                .map(|i| {
                    let v = libm::tan(PI * ((i as f64 + 0.5) / k as f64 - 0.5));
                    (width * v * libm::pow(1.0 + v * v, power)).clamp(-reach, reach)
                })
                .collect();
            let mut probs: Vec<f64> = xs.iter().map(|&x| inverter.cdf(x)).collect();
            for i in 1..probs.len() {
                probs[i] = probs[i].max(probs[i - 1]);
            }
            let within = probs[0] <= cfg.inversion_budget && 1.0 - probs[k - 1] <= cfg.inversion_budget;
            let saturated = xs[0] <= -reach && xs[k - 1] >= reach;
            last = Some((probs, xs));
            if within || saturated {
                break;
            }
        }
        let (probs, xs) = last.expect("at least one knot layout");
        let mut table = Self::from_points(probs, xs)?;
        let n = table.probs.len();
        if table.probs[0] > cfg.inversion_budget {
            table.lower_tail = Some(table.tail_index(&inverter, true)?);
        }
        if 1.0 - table.probs[n - 1] > cfg.inversion_budget {
            table.upper_tail = Some(table.tail_index(&inverter, false)?);
        }
        Ok(table)
    }

    fn from_points(probs: Vec<f64>, xs: Vec<f64>) -> Result<Self> {
        let mut p = Vec::with_capacity(probs.len());
        let mut x = Vec::with_capacity(xs.len());
        for (pi, xi) in probs.into_iter().zip(xs) {
            let fresh = p.last().is_none_or(|&last: &f64| pi > last + 1e-15);
            if fresh && x.last().is_none_or(|&last: &f64| xi > last) {
                p.push(pi);
                x.push(xi);
            }
        }
        if p.len() < 2 {
            return Err(Error::InversionFailed {
                reason: "degenerate CDF table",
            });
        }
        let slopes = pchip_slopes(&p, &x);
        Ok(QuantileTable {
            probs: p,
            xs: x,
            slopes,
            lower_tail: None,
            upper_tail: None,
        })
    }

    /// Tail exponent from the tail mass at the edge knot and at half of it.
    fn tail_index(&self, inverter: &CdfInverter, lower: bool) -> Result<f64> {
        let edge = if lower { self.xs[0] } else { self.xs[self.xs.len() - 1] };
        let mass = |x: f64| if lower { inverter.cdf(x) } else { 1.0 - inverter.cdf(x) };
        let (outer, inner) = (mass(edge), mass(0.5 * edge));
        let kappa = libm::log(inner / outer) / core::f64::consts::LN_2;
        if kappa.is_finite() && kappa > 0.0 {
            Ok(kappa)
        } else {
            Err(Error::InversionFailed {
                reason: "tail mass outside the quantile table exceeds the accuracy budget",
            })
        }
    }

    /// Mass assigned to the extrapolated tails (zero when the table covers
    /// all but the budget).
    pub fn extrapolated_mass(&self) -> f64 {
        let n = self.probs.len();
        self.lower_tail.map_or(0.0, |_| self.probs[0])
            + self.upper_tail.map_or(0.0, |_| 1.0 - self.probs[n - 1])
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.probs.len();
        if u <= self.probs[0] {
            return match self.lower_tail {
                Some(kappa) if u > 0.0 => self.xs[0] * libm::pow(self.probs[0] / u, 1.0 / kappa),
                _ => self.xs[0],
            };
        }
        if u >= self.probs[n - 1] {
            let top = 1.0 - self.probs[n - 1];
            return match self.upper_tail {
                Some(kappa) if u < 1.0 => self.xs[n - 1] * libm::pow(top / (1.0 - u), 1.0 / kappa),
                _ => self.xs[n - 1],
            };
        }
        let i = self.probs.partition_point(|&p| p <= u) - 1;
        let h = self.probs[i + 1] - self.probs[i];
        let t = (u - self.probs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.xs[i] + h10 * h * self.slopes[i] + h01 * self.xs[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(Open01.sample(rng))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Shrinks the truncation point while `|f|` stays below the tolerance, so the
/// same number of nodes resolves larger `|x|`.
fn effective_halfwidth(f: &TransformFn, cfg: &InversionConfig) -> f64 {
    let small = |u: f64| {
        [1.0, 1.25, 1.5, 1.75, 2.0]
            .iter()
            .all(|m| f.at(m * u).norm().max(f.at(-m * u).norm()) < cfg.tolerance)
    };
    let mut u = cfg.grid_halfwidth;
    for _ in 0..40 {
        if !small(0.5 * u) {
            break;
        }
        u *= 0.5;
    }
    u
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut m = alloc::vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        let (d0, d1) = (delta[i - 1], delta[i]);
        if d0 * d1 <= 0.0 {
            m[i] = 0.0;
        } else {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            m[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    m
}

/// `1 / s*` where `|f(s*)| = 1/e`: a scale for placing inversion knots.
fn cf_width(f: &TransformFn, upper: f64) -> f64 {
    let target = libm::exp(-1.0);
    let (mut lo, mut hi) = (0.0, upper);
    if f.at(hi).norm() > target {
        return 1.0 / upper;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f.at(mid).norm() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.0 / hi.max(1e-12)
}

/// Inverse-CDF sampler over extracted PGF coefficients, truncated at
/// cumulative mass `1 - cfg.table_tail` and renormalised.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTable {
    cumulative: Vec<f64>,
}

impl DiscreteTable {
    pub fn from_pgf(p: &TransformFn, cfg: &InversionConfig) -> Result<Self> {
        p.expect_kind(TransformKind::Pgf)?;
        cfg.validate()?;
        let coeffs = aliased_coefficients(p, cfg.dft_size);
        if coeffs.iter().any(|c| c.re < -cfg.tolerance || c.im.abs() > cfg.tolerance) {
            return Err(Error::InversionFailed {
                reason: "PGF coefficients are not a probability vector",
            });
        }
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for c in &coeffs[..cfg.dft_size / 2] {
            total += c.re.max(0.0);
            cumulative.push(total);
            if total >= 1.0 - cfg.table_tail {
                break;
            }
        }
        if total < 1.0 - cfg.table_tail {
            return Err(Error::InversionFailed {
                reason: "PGF tail mass beyond the extraction window exceeds the table budget",
            });
        }
        cumulative.iter_mut().for_each(|c| *c /= total);
        Ok(DiscreteTable { cumulative })
    }

    /// Table from explicit probabilities (renormalised).
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.is_empty() || !(total > 0.0) || probs.iter().any(|&p| p < 0.0) {
            return Err(Error::InversionFailed {
                reason: "probabilities must be nonnegative with positive total",
            });
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p / total;
                acc
            })
            .collect();
        Ok(DiscreteTable { cumulative })
    }

    pub fn pmf(&self, k: usize) -> f64 {
        match k {
            0 => self.cumulative.first().copied().unwrap_or(0.0),
            _ if k < self.cumulative.len() => self.cumulative[k] - self.cumulative[k - 1],
            _ => 0.0,
        }
    }

    pub fn support_len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let k = self.cumulative.partition_point(|&c| c <= u);
        k.min(self.cumulative.len() - 1) as u64
    }
}

/// Sampler for a real-valued law.
#[derive(Debug, Clone)]
pub enum ContinuousSampler {
    Gaussian { std_dev: f64 },
    /// CF `exp(-scale |s|^α)`.
    SymmetricStable { alpha: f64, scale: f64 },
    PointMass { at: f64 },
    /// CF `1 / (1 + scale |s|^α)`.
    Linnik { alpha: f64, scale: f64 },
    /// With probability `atom_prob` the value `atom`, else a draw from `rest`.
    AtomMixture {
        atom_prob: f64,
        atom: f64,
        rest: Box<ContinuousSampler>,
    },
    Table(QuantileTable),
}

impl ContinuousSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ContinuousSampler::Gaussian { std_dev } => {
                let z: f64 = StandardNormal.sample(rng);
                std_dev * z
            }
            ContinuousSampler::SymmetricStable { alpha, scale } => {
                stable_with_scale(*alpha, *scale, rng)
            }
            ContinuousSampler::PointMass { at } => *at,
            ContinuousSampler::Linnik { alpha, scale } => {
                let e: f64 = Exp1.sample(rng);
                stable_with_scale(*alpha, scale * e, rng)
            }
            ContinuousSampler::AtomMixture {
                atom_prob,
                atom,
                rest,
            } => {
                let u: f64 = rng.random();
                if u < *atom_prob {
                    *atom
                } else {
                    rest.sample(rng)
                }
            }
            ContinuousSampler::Table(t) => t.sample(rng),
        }
    }
}

/// Variate with CF `exp(-scale |s|^α)`; α = 2 uses a normal draw.
fn stable_with_scale<R: Rng + ?Sized>(alpha: f64, scale: f64, rng: &mut R) -> f64 {
    if scale <= 0.0 {
        return 0.0;
    }
    if alpha == 2.0 {
        let z: f64 = StandardNormal.sample(rng);
        return libm::sqrt(2.0 * scale) * z;
    }
    libm::pow(scale, 1.0 / alpha) * symmetric_stable(alpha, rng)
}

pub(crate) const DIRECTING_SUPPORTED: &[&str] = &[
    "gamma-lt",
    "exponential-lt",
    "point-mass-lt",
    "stable-subordinator-lt",
    "compound-poisson-lt",
    "semistable-gamma-lt (stable exponent)",
];

/// Increments `T(t + dt) - T(t)` of a subordinator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectingSampler {
    Gamma { shape: f64, rate: f64 },
    Drift { rate: f64 },
    Stable { index: f64, scale: f64 },
    CompoundPoisson { rate: f64, jump_mean: f64 },
    /// Stable subordinator run for a gamma(β dt) time.
    StableGamma { index: f64, scale: f64, beta: f64 },
}

impl DirectingSampler {
    pub fn for_lt(phi: &TransformFn) -> Result<Self> {
        use crate::corpus::Law;
        let unavailable = || Error::SamplerUnavailable {
            ingredient: phi.label().into(),
            supported: DIRECTING_SUPPORTED,
        };
        match phi.law() {
            Some(Law::GammaLt { shape, rate }) => Ok(DirectingSampler::Gamma {
                shape: *shape,
                rate: *rate,
            }),
            Some(Law::PointMassLt { at }) => Ok(DirectingSampler::Drift { rate: *at }),
            Some(Law::StableSubordinatorLt { index, scale }) => Ok(DirectingSampler::Stable {
                index: *index,
                scale: *scale,
            }),
            Some(Law::CompoundPoissonLt { rate, jump_mean }) => {
                Ok(DirectingSampler::CompoundPoisson {
                    rate: *rate,
                    jump_mean: *jump_mean,
                })
            }
            Some(Law::SemiStableGammaLt { exponent, beta }) if exponent.is_stable() => {
                Ok(DirectingSampler::StableGamma {
                    index: exponent.alpha(),
                    scale: exponent.scale(),
                    beta: *beta,
                })
            }
            _ => Err(unavailable()),
        }
    }

    pub fn increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        if dt <= 0.0 {
            return 0.0;
        }
        match *self {
            DirectingSampler::Gamma { shape, rate } => gamma_variate(shape * dt, 1.0 / rate, rng),
            DirectingSampler::Drift { rate } => rate * dt,
            DirectingSampler::Stable { index, scale } => stable_subordinator(index, scale * dt, rng),
            DirectingSampler::CompoundPoisson { rate, jump_mean } => {
                let n: f64 = Poisson::new(rate * dt).expect("positive intensity").sample(rng);
                gamma_variate(n, jump_mean, rng)
            }
            DirectingSampler::StableGamma { index, scale, beta } => {
                let g = gamma_variate(beta * dt, 1.0, rng);
                stable_subordinator(index, scale * g, rng)
            }
        }
    }
}

/// Variate with LT `exp(-scale s^index)`; index 1 is the drift `scale`.
fn stable_subordinator<R: Rng + ?Sized>(index: f64, scale: f64, rng: &mut R) -> f64 {
    if scale <= 0.0 {
        return 0.0;
    }
    if index == 1.0 {
        return scale;
    }
    libm::pow(scale, 1.0 / index) * positive_stable(index, rng)
}

/// Increments of the driven process over an operational time `elapsed`.
#[derive(Debug, Clone)]
pub enum DrivenSampler {
    /// Stable exponent `scale |s|^α`: exact scaling in time.
    Stable { alpha: f64, scale: f64 },
    /// CDF inversion of `exp(-elapsed ψ(s))` with bisection, per draw.
    Inversion {
        exponent: SemiStableExponent,
        cfg: InversionConfig,
    },
}

impl DrivenSampler {
    pub fn for_exponent(psi: &SemiStableExponent, cfg: &InversionConfig) -> Self {
        if psi.is_stable() {
            DrivenSampler::Stable {
                alpha: psi.alpha(),
                scale: psi.scale(),
            }
        } else {
            DrivenSampler::Inversion {
                exponent: *psi,
                cfg: cfg.clone(),
            }
        }
    }

    pub fn increment<R: Rng + ?Sized>(&self, elapsed: f64, rng: &mut R) -> Result<f64> {
        if elapsed <= 0.0 {
            return Ok(0.0);
        }
        match self {
            DrivenSampler::Stable { alpha, scale } => Ok(stable_with_scale(*alpha, scale * elapsed, rng)),
            DrivenSampler::Inversion { exponent, cfg } => {
                let p = *exponent;
                let f = TransformFn::cf("driven increment", move |s| {
                    Complex64::new(libm::exp(-elapsed * p.eval(s)), 0.0)
                });
                let u: f64 = Open01.sample(rng);
                bisect_quantile(&CdfInverter::new(&f, cfg)?, u, cfg.inversion_budget)
            }
        }
    }
}

/// `x` with `F(x) ≈ u` by bracketing and bisection.
pub(crate) fn bisect_quantile(inverter: &CdfInverter, u: f64, budget: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut grow = 0;
    while inverter.cdf(lo) > u {
        lo *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::InversionFailed {
                reason: "could not bracket the lower quantile",
            });
        }
    }
    while inverter.cdf(hi) < u {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::InversionFailed {
                reason: "could not bracket the upper quantile",
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = inverter.cdf(mid);
        if (fm - u).abs() <= 0.1 * budget || hi - lo <= 1e-12 * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if fm < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
