//! Lévy marginals `exp(-tψ)` and subordination `{φ(ψ(s))}^t`: the transform
//! of `Y(T(t))` for a driven process `Y` run on the clock of a subordinator
//! `T` with `E e^{-xT(1)} = φ(x)`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::decompose;
use crate::error::{Error, Result};
use crate::mixtures;
use crate::report::{DecompositionReport, Identity, Verdict};
use crate::sampling::{stream_rng, DirectingSampler, DrivenSampler};
use crate::semistable::SemiStableExponent;
use crate::stats;
use crate::transforms::{symmetric_grid, InversionConfig, TransformFn, TransformKind};

/// Lévy exponent of the driven process.
#[derive(Clone)]
pub enum DrivenExponent {
    SemiStable(SemiStableExponent),
    /// Any real, even exponent. Transform-level only: there is no sampler.
    Custom {
        label: String,
        psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for DrivenExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DrivenExponent::SemiStable(p) => f.debug_tuple("SemiStable").field(p).finish(),
            DrivenExponent::Custom { label, .. } => f.debug_struct("Custom").field("label", label).finish(),
        }
    }
}

impl DrivenExponent {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            DrivenExponent::SemiStable(p) => p.eval(s),
            DrivenExponent::Custom { psi, .. } => psi(s),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DrivenExponent::SemiStable(p) => p.label(),
            DrivenExponent::Custom { label, .. } => label.clone(),
        }
    }
}

impl From<SemiStableExponent> for DrivenExponent {
    fn from(p: SemiStableExponent) -> Self {
        DrivenExponent::SemiStable(p)
    }
}

/// CF of a Lévy process at time `t`: `exp(-tψ(s))`.
pub fn levy_marginal_cf(psi: &DrivenExponent, t: f64) -> Result<TransformFn> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            expected: "t >= 0",
        });
    }
    let p = psi.clone();
    Ok(TransformFn::from_exponent(
        TransformKind::Cf,
        format!("levy[{}; t={t}]", psi.label()),
        move |z| Complex64::new(t * p.eval(z.re), 0.0),
    ))
}

#[derive(Debug, Clone)]
pub struct SubordinationSpec {
    pub driven: DrivenExponent,
    /// LT of `T(1)`.
    pub directing: TransformFn,
    /// Strictly increasing, nonnegative.
    pub time_grid: Vec<f64>,
    pub mc_paths: usize,
    pub seed: u64,
    pub inversion: InversionConfig,
}

impl SubordinationSpec {
    pub fn new(
        driven: impl Into<DrivenExponent>,
        directing: TransformFn,
        time_grid: Vec<f64>,
        mc_paths: usize,
        seed: u64,
    ) -> Result<Self> {
        directing.expect_kind(TransformKind::Lt)?;
        if time_grid.is_empty() {
            return Err(Error::InvalidGrid("time grid must not be empty"));
        }
        if !(time_grid[0] >= 0.0) || time_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("time grid must be nonnegative and strictly increasing"));
        }
        Ok(SubordinationSpec {
            driven: driven.into(),
            directing,
            time_grid,
            mc_paths,
            seed,
            inversion: InversionConfig::default(),
        })
    }

    pub fn with_inversion(mut self, cfg: InversionConfig) -> Self {
        self.inversion = cfg;
        self
    }
}

/// `-ln φ(x)` for real `x ≥ 0`.
fn directing_exponent(phi: &TransformFn, x: f64) -> f64 {
    let z = Complex64::new(x, 0.0);
    match phi.neg_log(z) {
        Some(v) if phi.has_exponent() => v.re,
        _ => -libm::log(phi.real_at(x)),
    }
}

/// `{φ(ψ(s))}^t`, the marginal CF of `Y(T(t))`.
pub fn subordinated_cf(spec: &SubordinationSpec, t: f64, s: f64) -> Complex64 {
    subordinated_value(&spec.driven, &spec.directing, t, s)
}

fn subordinated_value(driven: &DrivenExponent, phi: &TransformFn, t: f64, s: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::new(libm::exp(-t * directing_exponent(phi, driven.eval(s))), 0.0)
}

/// The marginal at time `t` as a transform object.
pub fn marginal_cf(driven: &DrivenExponent, directing: &TransformFn, t: f64) -> Result<TransformFn> {
    directing.expect_kind(TransformKind::Lt)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            expected: "t >= 0",
        });
    }
    let (d, phi) = (driven.clone(), directing.clone());
    Ok(TransformFn::from_exponent(
        TransformKind::Cf,
        format!("subordinated[{} o {}; t={t}]", directing.label(), driven.label()),
        move |z| Complex64::new(t * directing_exponent(&phi, d.eval(z.re)), 0.0),
    ))
}

/// One simulated path observed on the time grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathSample {
    pub path_id: u64,
    pub times: Vec<f64>,
    /// Operational time `T(t)`.
    pub clock: Vec<f64>,
    /// `X(t) = Y(T(t))`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubordinatedSample {
    pub seed: u64,
    pub time_grid: Vec<f64>,
    pub paths: Vec<PathSample>,
}

impl SubordinatedSample {
    /// Values at grid index `k` across paths.
    pub fn values_at(&self, k: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p.values[k]).collect()
    }
}

/// Samplers for both ingredients, resolved once per spec.
#[derive(Debug, Clone)]
pub struct PathSampler {
    directing: DirectingSampler,
    driven: DrivenSampler,
}

impl PathSampler {
    pub fn for_spec(spec: &SubordinationSpec) -> Result<Self> {
        let directing = DirectingSampler::for_lt(&spec.directing)?;
        let driven = match &spec.driven {
            DrivenExponent::SemiStable(p) => DrivenSampler::for_exponent(p, &spec.inversion),
            DrivenExponent::Custom { label, .. } => {
                return Err(Error::SamplerUnavailable {
                    ingredient: label.clone(),
                    supported: &["semistable exponent (stable closed form, log-periodic by inversion)"],
                })
            }
        };
        Ok(PathSampler { directing, driven })
    }

    /// Path `path_id`, drawn from its own stream of `seed`.
    pub fn path(&self, spec: &SubordinationSpec, path_id: u64) -> Result<PathSample> {
        let mut rng = stream_rng(spec.seed, path_id);
        let n = spec.time_grid.len();
        let (mut clock, mut values) = (Vec::with_capacity(n), Vec::with_capacity(n));
        let (mut t_prev, mut big_t, mut x) = (0.0, 0.0, 0.0);
        for &t in &spec.time_grid {
            let dt = self.directing.increment(t - t_prev, &mut rng);
            big_t += dt;
            x += self.driven.increment(dt, &mut rng)?;
            clock.push(big_t);
            values.push(x);
            t_prev = t;
        }
        Ok(PathSample {
            path_id,
            times: spec.time_grid.clone(),
            clock,
            values,
        })
    }
}

pub fn simulate_path(spec: &SubordinationSpec, path_id: u64) -> Result<PathSample> {
    PathSampler::for_spec(spec)?.path(spec, path_id)
}

/// All `spec.mc_paths` paths, in path order. Each path uses its own stream,
/// so any parallel split of the ids gives the same sample.
pub fn simulate_subordinated_paths(spec: &SubordinationSpec) -> Result<SubordinatedSample> {
    let sampler = PathSampler::for_spec(spec)?;
    let paths = (0..spec.mc_paths as u64)
        .map(|id| sampler.path(spec, id))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubordinatedSample {
        seed: spec.seed,
        time_grid: spec.time_grid.clone(),
        paths,
    })
}

/// Default 13-point grid on `[-3, 3]` for Monte-Carlo checks.
pub fn mc_grid() -> Vec<f64> {
    symmetric_grid(3.0, 13)
}

/// Compares the empirical CF at every grid time with `{φ(ψ(s))}^t` within
/// `5/√N`, and checks that every clock path is nondecreasing.
pub fn check_path_marginals(
    spec: &SubordinationSpec,
    sample: &SubordinatedSample,
    s_grid: &[f64],
) -> Result<DecompositionReport> {
    let n = sample.paths.len();
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "mc_paths",
            value: 0.0,
            expected: "at least one path",
        });
    }
    let envelope = 5.0 / libm::sqrt(n as f64);
    let mut worst: f64 = 0.0;
    let mut children = Vec::new();
    for (k, &t) in sample.time_grid.iter().enumerate() {
        let xs = sample.values_at(k);
        let sup = s_grid
            .iter()
            .map(|&s| (stats::empirical_cf(&xs, s) - subordinated_cf(spec, t, s)).norm())
            .fold(0.0, f64::max);
        worst = worst.max(sup);
        let mut child = mc_report(alloc::vec![t], sup, envelope, s_grid);
        child.notes.push(format!("t={t}: sup |ecf - formula| = {sup:e}"));
        children.push(child);
    }
    let monotone = sample
        .paths
        .iter()
        .all(|p| p.clock.first().is_none_or(|&c| c >= 0.0) && p.clock.windows(2).all(|w| w[1] >= w[0]));
    let mut report = mc_report(sample.time_grid.clone(), worst, envelope, s_grid);
    report.children = children;
    if !monotone {
        report.verdict = Verdict::Fail;
        report.notes.push("a directing path decreased".into());
    }
    report.append_caveat("Monte-Carlo envelope 5/sqrt(N)");
    Ok(report)
}

fn mc_report(parameters: Vec<f64>, sup: f64, envelope: f64, s_grid: &[f64]) -> DecompositionReport {
    use crate::report::{Certificate, CertificateKind, GridMeta};
    let slack = envelope - sup;
    let cert = Certificate::new(CertificateKind::EmpiricalSlack, slack, 0.0, GridMeta::of(s_grid));
    let mut r = DecompositionReport::from_parts(Identity::SubordinatedMarginal, parameters, 0.0, 0.0, cert);
    r.verdict = if slack.is_finite() && slack >= 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    r
}

/// Which subordination statement to verify at the marginal level.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalClaim {
    /// Stable driven, SD directing: the marginal is SD. Sampled on `c_grid`.
    StableSd { c_grid: Vec<f64> },
    /// Semi-stable(a, b) driven, SD directing: the marginal is semi-SD(b).
    SemiStableSd,
    /// Semi-stable(a, b) driven, directing semi-SD(b^α): the marginal is
    /// semi-SD(b).
    SemiStableSemiSd,
}

/// Forms the time-1 marginal `φ(ψ(s))` and certifies the claimed
/// decomposition, with the directing hypothesis as a child report.
pub fn verify_subordinated_marginal(
    driven: &SemiStableExponent,
    directing: &TransformFn,
    claim: &MarginalClaim,
    cfg: &InversionConfig,
) -> Result<DecompositionReport> {
    directing.expect_kind(TransformKind::Lt)?;
    let psi = DrivenExponent::SemiStable(*driven);
    let f = marginal_cf(&psi, directing, 1.0)?;
    let grid = cfg.cf_grid();
    let (mut report, hypothesis_ok, how) = match claim {
        MarginalClaim::StableSd { c_grid } => {
            if !driven.is_stable() {
                return Err(Error::InvalidParameter {
                    name: "h_epsilon",
                    value: driven.h_epsilon(),
                    expected: "a stable driven exponent (h_epsilon = 0)",
                });
            }
            let (ok, how) = mixtures::sd_hypothesis(directing, cfg)?;
            (decompose::check_sd_full(&f, c_grid, &grid, cfg)?, ok, String::from(how))
        }
        MarginalClaim::SemiStableSd => {
            let (ok, how) = mixtures::sd_hypothesis(directing, cfg)?;
            (decompose::check_semisd(&f, driven.b(), &grid, cfg)?, ok, String::from(how))
        }
        MarginalClaim::SemiStableSemiSd => {
            let c = libm::pow(driven.b(), driven.alpha());
            let h = decompose::check_lt_semisd(directing, c, &cfg.cm_grid(), cfg)?;
            let ok = h.passed();
            let mut r = decompose::check_semisd(&f, driven.b(), &grid, cfg)?;
            r.children.push(h);
            (r, ok, format!("certified semi-SD({c}) at that c only"))
        }
    };
    report.notes.push(format!("directing LT: {how}"));
    report
        .notes
        .push("subordinated marginal at t=1: {phi(psi(s))}^t read as the t-th power of the time-1 transform".into());
    if !hypothesis_ok {
        report.verdict = Verdict::Fail;
        report.notes.push("directing LT failed its hypothesis check".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use core::f64::consts::E;

    fn brownian() -> SemiStableExponent {
        SemiStableExponent::stable(2.0, 0.5, 0.5).unwrap()
    }

    fn gamma_brownian(paths: usize, grid: Vec<f64>) -> SubordinationSpec {
        SubordinationSpec::new(brownian(), corpus::gamma_lt(1.0, 1.0), grid, paths, 42).unwrap()
    }

    #[test]
    fn variance_gamma_formula() {
        let spec = gamma_brownian(0, alloc::vec![1.0]);
        for s in [-2.0, 0.0, 0.7, 3.0] {
            let want = 1.0 / (1.0 + s * s / 2.0);
            assert!((subordinated_cf(&spec, 1.0, s).re - want).abs() < 1e-15);
            assert_eq!(subordinated_cf(&spec, 0.0, s).re, 1.0);
        }
        assert_eq!(subordinated_cf(&spec, 2.5, 0.0).re, 1.0);
    }

    #[test]
    fn semigroup_in_time() {
        let spec = gamma_brownian(0, alloc::vec![1.0]);
        for s in symmetric_grid(3.0, 13) {
            let lhs = subordinated_cf(&spec, 1.0, s);
            let rhs = subordinated_cf(&spec, 0.5, s) * subordinated_cf(&spec, 0.5, s);
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn levy_marginal_at_zero_time_is_one() {
        let f = levy_marginal_cf(&brownian().into(), 0.0).unwrap();
        assert_eq!(f.real_at(2.0), 1.0);
        assert!(levy_marginal_cf(&brownian().into(), -1.0).is_err());
    }

    #[test]
    fn rejects_bad_time_grid() {
        let lt = corpus::gamma_lt(1.0, 1.0);
        assert!(SubordinationSpec::new(brownian(), lt.clone(), alloc::vec![0.0, 0.0], 1, 0).is_err());
        assert!(SubordinationSpec::new(brownian(), lt, alloc::vec![], 1, 0).is_err());
    }

    #[test]
    fn monte_carlo_matches_formula() {
        let spec = gamma_brownian(20_000, alloc::vec![0.5, 1.0, 2.0]);
        let sample = simulate_subordinated_paths(&spec).unwrap();
        let r = check_path_marginals(&spec, &sample, &mc_grid()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.children.len(), 3);
    }

    #[test]
    fn deterministic_clock_reproduces_driven_process() {
        let spec = SubordinationSpec::new(brownian(), corpus::point_mass_lt(1.0), alloc::vec![1.0, 2.0], 5, 3)
            .unwrap();
        let sample = simulate_subordinated_paths(&spec).unwrap();
        for p in &sample.paths {
            assert_eq!(p.clock, alloc::vec![1.0, 2.0]);
        }
    }

    #[test]
    fn zero_paths_give_empty_sample() {
        let spec = gamma_brownian(0, alloc::vec![1.0]);
        let sample = simulate_subordinated_paths(&spec).unwrap();
        assert!(sample.paths.is_empty());
        assert_eq!(sample.seed, 42);
    }

    #[test]
    fn paths_are_reproducible_per_id() {
        let spec = gamma_brownian(10, alloc::vec![0.5, 1.0]);
        let all = simulate_subordinated_paths(&spec).unwrap();
        assert_eq!(simulate_path(&spec, 7).unwrap(), all.paths[7]);
    }

    #[test]
    fn custom_exponent_has_no_sampler() {
        let driven = DrivenExponent::Custom {
            label: "quartic".into(),
            psi: Arc::new(|s| s.powi(4)),
        };
        let spec = SubordinationSpec::new(driven, corpus::gamma_lt(1.0, 1.0), alloc::vec![1.0], 1, 0).unwrap();
        assert!(matches!(simulate_path(&spec, 0), Err(Error::SamplerUnavailable { .. })));
    }

    #[test]
    fn cauchy_with_gamma_clock_is_sd() {
        let cfg = InversionConfig::default();
        let cauchy = SemiStableExponent::stable(1.0, 0.5, 1.0).unwrap();
        let c_grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let r = verify_subordinated_marginal(
            &cauchy,
            &corpus::gamma_lt(1.0, 1.0),
            &MarginalClaim::StableSd { c_grid },
            &cfg,
        )
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn semistable_with_gamma_clock_is_semisd() {
        let cfg = InversionConfig::default();
        let psi = SemiStableExponent::new(1.0, 1.0 / E, 0.03, 0.0, 1.0).unwrap();
        let r = verify_subordinated_marginal(&psi, &corpus::gamma_lt(1.0, 1.0), &MarginalClaim::SemiStableSd, &cfg)
            .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn semistable_with_semisd_clock_is_semisd() {
        let cfg = InversionConfig::default();
        let psi = SemiStableExponent::new(1.0, 1.0 / E, 0.03, 0.0, 1.0).unwrap();
        let inner = SemiStableExponent::stable(0.5, libm::pow(psi.b(), psi.alpha()), 1.0).unwrap();
        let phi = corpus::semistable_gamma_lt(&inner, 1.0).unwrap();
        let r = verify_subordinated_marginal(&psi, &phi, &MarginalClaim::SemiStableSemiSd, &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.children.len(), 1);
    }

    #[test]
    fn stable_claim_rejects_log_periodic_driver() {
        let cfg = InversionConfig::default();
        let psi = SemiStableExponent::new(1.0, 0.5, 0.03, 0.0, 1.0).unwrap();
        let claim = MarginalClaim::StableSd { c_grid: alloc::vec![0.5] };
        assert!(verify_subordinated_marginal(&psi, &corpus::gamma_lt(1.0, 1.0), &claim, &cfg).is_err());
    }
}
