//! Named corpus constructions the CLI can build from flat parameters.

use std::collections::BTreeMap;

use serde::Serialize;

use semisd_core::corpus;
use semisd_core::mixtures;
use semisd_core::semistable::{self, SemiStableExponent};
use semisd_core::subordination::{self, DrivenExponent, MarginalClaim};
use semisd_core::{Error, Result, TransformFn, TransformKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecipeKind {
    Cf,
    Lt,
    Pgf,
    /// A driven exponent with a directing LT; its transform is the time-1
    /// marginal CF.
    Pairing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Recipe {
    pub name: &'static str,
    pub kind: RecipeKind,
    /// `name=default`, or just `name` when required.
    pub params: &'static [&'static str],
    pub description: &'static str,
}

const SEMI: &[&str] = &["alpha", "b=0.5", "eps=0", "phase=0", "scale=1"];

pub const RECIPES: &[Recipe] = &[
    Recipe { name: "gaussian", kind: RecipeKind::Cf, params: &["variance=1"], description: "centred normal" },
    Recipe { name: "cauchy", kind: RecipeKind::Cf, params: &["scale=1"], description: "CF exp(-scale|s|)" },
    Recipe { name: "stable", kind: RecipeKind::Cf, params: &["alpha", "scale=1"], description: "symmetric stable, CF exp(-scale|s|^alpha)" },
    Recipe { name: "semistable", kind: RecipeKind::Cf, params: SEMI, description: "exp(-psi), psi = scale|s|^alpha (1 + eps cos(2 pi ln|s| / ln(1/b) + phase))" },
    Recipe { name: "point-mass", kind: RecipeKind::Cf, params: &["at=0"], description: "degenerate law" },
    Recipe { name: "linnik", kind: RecipeKind::Cf, params: &["alpha", "scale=1"], description: "alpha-Laplace, CF 1/(1 + scale|s|^alpha)" },
    Recipe { name: "gen-semi-alpha-laplace", kind: RecipeKind::Cf, params: &["alpha", "b=0.5", "eps=0", "phase=0", "scale=1", "beta=1"], description: "gamma(beta) mixture of a semi-stable law, (1 + psi)^-beta" },
    Recipe { name: "gamma-lt", kind: RecipeKind::Lt, params: &["shape=1", "rate=1"], description: "gamma LT (1 + s/rate)^-shape" },
    Recipe { name: "exponential-lt", kind: RecipeKind::Lt, params: &["rate=1"], description: "exponential LT" },
    Recipe { name: "point-mass-lt", kind: RecipeKind::Lt, params: &["at=1"], description: "LT exp(-at s)" },
    Recipe { name: "stable-subordinator-lt", kind: RecipeKind::Lt, params: &["index", "scale=1"], description: "LT exp(-scale s^index), 0 < index < 1" },
    Recipe { name: "compound-poisson-lt", kind: RecipeKind::Lt, params: &["rate", "jump-mean=1"], description: "compound Poisson with exponential jumps (not SD)" },
    Recipe { name: "semistable-gamma-lt", kind: RecipeKind::Lt, params: &["alpha", "b=0.5", "eps=0", "phase=0", "scale=1", "beta=1"], description: "LT (1 + psi(s))^-beta, alpha <= 1" },
    Recipe { name: "pgf-poisson", kind: RecipeKind::Pgf, params: &["lambda"], description: "Poisson PGF exp(lambda(s - 1))" },
    Recipe { name: "pgf-geometric", kind: RecipeKind::Pgf, params: &["mean=1"], description: "geometric PGF 1/(1 + mean(1 - s))" },
    Recipe { name: "pgf-discrete-semistable", kind: RecipeKind::Pgf, params: SEMI, description: "discrete semi-stable PGF exp(-psi(1 - s)), alpha <= 1" },
    Recipe { name: "mixture-pgf", kind: RecipeKind::Pgf, params: &["alpha", "b=0.5", "eps=0", "phase=0", "scale=1", "beta=1"], description: "gamma(beta) mixture of a discrete semi-stable PGF" },
    Recipe { name: "variance-gamma", kind: RecipeKind::Pairing, params: &["variance=1", "shape=1", "rate=1"], description: "Brownian motion on a gamma clock" },
    Recipe { name: "linnik-subordinated", kind: RecipeKind::Pairing, params: &["scale=1", "shape=1", "rate=1"], description: "Cauchy process on a gamma clock; SD marginal" },
    Recipe { name: "semistable-subordinated", kind: RecipeKind::Pairing, params: &["alpha=1", "b=0.36787944117144233", "eps=0.03", "phase=0", "scale=1", "shape=1", "rate=1"], description: "semi-stable process on a gamma clock; semi-SD(b) marginal" },
    Recipe { name: "semistable-semisd-clock", kind: RecipeKind::Pairing, params: &["alpha=1", "b=0.36787944117144233", "eps=0.03", "phase=0", "scale=1", "index=0.5", "beta=1"], description: "semi-stable process on a clock certified only semi-SD(b^alpha); semi-SD(b) marginal" },
];

pub fn recipe_names() -> Vec<&'static str> {
    RECIPES.iter().map(|r| r.name).collect()
}

pub fn find(name: &str) -> Option<&'static Recipe> {
    RECIPES.iter().find(|r| r.name == name)
}

/// Flat parameter values keyed by the names in [`Recipe::params`].
pub type Params = BTreeMap<String, f64>;

fn get(recipe: &Recipe, params: &Params, key: &'static str) -> Result<f64> {
    if let Some(v) = params.get(key) {
        return Ok(*v);
    }
    for spec in recipe.params {
        match spec.split_once('=') {
            Some((k, d)) if k == key => {
                return Ok(d.parse().expect("registry defaults parse"));
            }
            None if *spec == key => {
                return Err(Error::InvalidParameter {
                    name: key,
                    value: f64::NAN,
                    expected: "a value (required by this recipe)",
                })
            }
            _ => {}
        }
    }
    Err(Error::InvalidParameter {
        name: key,
        value: f64::NAN,
        expected: "a parameter of this recipe",
    })
}

fn exponent(recipe: &Recipe, p: &Params) -> Result<SemiStableExponent> {
    let g = |k| get(recipe, p, k);
    let (alpha, b, eps, phase, scale) = (g("alpha")?, g("b")?, g("eps")?, g("phase")?, g("scale")?);
    if p.get("override").is_some_and(|v| *v != 0.0) {
        SemiStableExponent::new_with_override(alpha, b, eps, phase, scale)
    } else {
        SemiStableExponent::new(alpha, b, eps, phase, scale)
    }
}

/// A subordination pairing: what to simulate and what to claim.
#[derive(Debug, Clone)]
pub struct Pairing {
    pub driven: SemiStableExponent,
    pub directing: TransformFn,
    pub claim: Option<MarginalClaim>,
}

#[derive(Debug, Clone)]
pub struct Built {
    pub recipe: &'static Recipe,
    pub transform: TransformFn,
    /// Set for semi-stable based recipes.
    pub exponent: Option<SemiStableExponent>,
    pub pairing: Option<Pairing>,
}

pub fn unknown_recipe(name: &str) -> String {
    format!("unknown recipe '{name}'")
}

/// Builds the named recipe. Unknown names give `None`.
pub fn build(name: &str, params: &Params) -> Option<Result<Built>> {
    let recipe = find(name)?;
    Some(build_recipe(recipe, params))
}

fn build_recipe(recipe: &'static Recipe, p: &Params) -> Result<Built> {
    let g = |k| get(recipe, p, k);
    let mut exponent_used = None;
    let mut pairing = None;
    let transform = match recipe.name {
        "gaussian" => corpus::gaussian(g("variance")?),
        "cauchy" => corpus::cauchy(g("scale")?),
        "stable" => {
            let psi = SemiStableExponent::stable(g("alpha")?, 0.5, g("scale")?)?;
            exponent_used = Some(psi);
            semistable::semistable_cf(&psi)
        }
        "semistable" => {
            let psi = exponent(recipe, p)?;
            exponent_used = Some(psi);
            semistable::semistable_cf(&psi)
        }
        "point-mass" => corpus::point_mass_cf(g("at")?),
        "linnik" => mixtures::linnik(g("alpha")?, g("scale")?)?,
        "gen-semi-alpha-laplace" => {
            let psi = exponent(recipe, p)?;
            exponent_used = Some(psi);
            mixtures::generalized_semi_alpha_laplace(&psi, g("beta")?)?
        }
        "gamma-lt" => corpus::gamma_lt(g("shape")?, g("rate")?),
        "exponential-lt" => corpus::exponential_lt(g("rate")?),
        "point-mass-lt" => corpus::point_mass_lt(g("at")?),
        "stable-subordinator-lt" => corpus::stable_subordinator_lt(g("index")?, g("scale")?)?,
        "compound-poisson-lt" => corpus::compound_poisson_lt(g("rate")?, g("jump-mean")?)?,
        "semistable-gamma-lt" => {
            let psi = exponent(recipe, p)?;
            exponent_used = Some(psi);
            corpus::semistable_gamma_lt(&psi, g("beta")?)?
        }
        "pgf-poisson" => corpus::poisson_pgf(g("lambda")?),
        "pgf-geometric" => corpus::geometric_pgf(g("mean")?),
        "pgf-discrete-semistable" => {
            let psi = exponent(recipe, p)?;
            exponent_used = Some(psi);
            semistable::discrete_semistable_pgf(&psi)?
        }
        "mixture-pgf" => {
            let psi = exponent(recipe, p)?;
            exponent_used = Some(psi);
            mixtures::gamma_mixed_discrete_semistable(&psi, g("beta")?)?
        }
        "variance-gamma" | "linnik-subordinated" | "semistable-subordinated" | "semistable-semisd-clock" => {
            let pair = build_pairing(recipe, p)?;
            exponent_used = Some(pair.driven);
            let f = subordination::marginal_cf(&DrivenExponent::SemiStable(pair.driven), &pair.directing, 1.0)?;
            pairing = Some(pair);
            f
        }
        other => unreachable!("recipe '{other}' is registered but not built"),
    };
    Ok(Built {
        recipe,
        transform,
        exponent: exponent_used,
        pairing,
    })
}

fn build_pairing(recipe: &Recipe, p: &Params) -> Result<Pairing> {
    let g = |k| get(recipe, p, k);
    let gamma = || -> Result<TransformFn> { Ok(corpus::gamma_lt(g("shape")?, g("rate")?)) };
    Ok(match recipe.name {
        "variance-gamma" => Pairing {
            driven: SemiStableExponent::stable(2.0, 0.5, 0.5 * g("variance")?)?,
            directing: gamma()?,
            claim: Some(MarginalClaim::StableSd { c_grid: sd_c_grid() }),
        },
        "linnik-subordinated" => Pairing {
            driven: SemiStableExponent::stable(1.0, 0.5, g("scale")?)?,
            directing: gamma()?,
            claim: Some(MarginalClaim::StableSd { c_grid: sd_c_grid() }),
        },
        "semistable-subordinated" => Pairing {
            driven: exponent(recipe, p)?,
            directing: gamma()?,
            claim: Some(MarginalClaim::SemiStableSd),
        },
        "semistable-semisd-clock" => {
            let driven = exponent(recipe, p)?;
            let inner = SemiStableExponent::stable(g("index")?, driven.b().powf(driven.alpha()), 1.0)?;
            Pairing {
                driven,
                directing: corpus::semistable_gamma_lt(&inner, g("beta")?)?,
                claim: Some(MarginalClaim::SemiStableSemiSd),
            }
        }
        _ => unreachable!(),
    })
}

/// `0.1, 0.2, ..., 0.9`.
pub fn sd_c_grid() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

/// The decomposition parameter a recipe is naturally checked at: its own
/// `b` when it has a semi-stable exponent.
pub fn natural_b(built: &Built) -> Option<f64> {
    built.exponent.map(|p| p.b())
}

pub fn kind_of(t: &TransformFn) -> RecipeKind {
    match t.kind() {
        TransformKind::Cf => RecipeKind::Cf,
        TransformKind::Lt => RecipeKind::Lt,
        TransformKind::Pgf => RecipeKind::Pgf,
    }
}
