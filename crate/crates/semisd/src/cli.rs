//! Command-line front end. Exit status: 0 pass, 1 certificate failure,
//! 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use semisd_core::autoregressive::{self, SeriesValues};
use semisd_core::decompose;
use semisd_core::mixtures;
use semisd_core::report::{DecompositionReport, Identity, Verdict};
use semisd_core::semistable::{self, log_grid};
use semisd_core::subordination::{self, MarginalClaim, SubordinationSpec};
use semisd_core::transforms::{self, linspace, symmetric_grid, CdfInverter};
use semisd_core::{corpus, Error, InversionConfig, TransformFn, TransformKind};

use crate::gof;
use crate::io::{write_paths_csv, write_series_csv, Envelope};
use crate::parallel;
use crate::recipes::{self, Built, Params, RecipeKind, RECIPES};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "semisd", version, about = "Construct, certify and simulate semi-selfdecomposable laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a recipe and print its transform on a grid.
    Construct(RunArgs),
    /// Run a decomposition certificate.
    Certify(RunArgs),
    /// Simulate a stationary AR(1) chain for a CF marginal.
    #[command(name = "simulate-ar1")]
    SimulateAr1(RunArgs),
    /// Simulate an INAR(1) chain for a PGF marginal.
    #[command(name = "simulate-inar1")]
    SimulateInar1(RunArgs),
    /// Simulate subordinated paths for a pairing recipe.
    SimulateSubordinated(RunArgs),
    /// Tabulate the CDF of a CF recipe by numerical inversion.
    Invert(RunArgs),
    /// Run every applicable certificate for a recipe.
    Report(RunArgs),
    /// Print the recipe registry.
    ListRecipes(ListArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Semisd,
    SdFull,
    Validity,
    Scaling,
    DiscreteSemisd,
    LtSemisd,
    Bridge,
    Cm,
    Mixture,
    Subordinated,
}

/// Flags shared by the working commands. Every flag is optional so a JSON
/// config file can supply it; flags win over the file.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Recipe name (see `list-recipes`).
    #[arg(long, alias = "marginal")]
    pub recipe: Option<String>,
    /// Directing LT recipe replacing a pairing's default clock.
    #[arg(long)]
    pub directing: Option<String>,
    /// JSON config file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    /// Decomposition parameter c (defaults to the recipe's own b).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicates: Option<u64>,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Comma-separated observation times.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t_grid: Option<Vec<f64>>,
    /// Comma-separated evaluation points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// Data output file (CSV for simulations).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON report file; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Doubles the CF certificate grid.
    #[arg(long)]
    pub refine: bool,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub psd_tolerance: Option<f64>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub phase: Option<f64>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<f64>,
    #[arg(long)]
    pub shape: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub index: Option<f64>,
    #[arg(long)]
    pub jump_mean: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mean: Option<f64>,
    /// Accept |eps| above the admissibility cap (the PSD check still runs).
    #[arg(long = "override")]
    pub override_cap: bool,
}

impl ParamArgs {
    fn to_params(&self) -> Params {
        let mut p = Params::new();
        let pairs = [
            ("alpha", self.alpha),
            ("b", self.b),
            ("eps", self.eps),
            ("phase", self.phase),
            ("scale", self.scale),
            ("beta", self.beta),
            ("variance", self.variance),
            ("at", self.at),
            ("shape", self.shape),
            ("rate", self.rate),
            ("index", self.index),
            ("jump-mean", self.jump_mean),
            ("lambda", self.lambda),
            ("mean", self.mean),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                p.insert(k.into(), v);
            }
        }
        if self.override_cap {
            p.insert("override".into(), 1.0);
        }
        p
    }
}

/// Effective configuration after merging the config file with flags. This
/// is what reports echo.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub recipe: Option<String>,
    pub directing: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub check: Option<Check>,
    pub c: Option<f64>,
    pub rho: Option<f64>,
    pub n: Option<usize>,
    pub burn_in: Option<usize>,
    pub seed: Option<u64>,
    pub replicates: Option<u64>,
    pub paths: Option<usize>,
    pub t_grid: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub format: Option<Format>,
    pub refine: bool,
    pub inversion: InversionConfig,
}

impl RunConfig {
    fn merge(mut self, a: &RunArgs) -> RunConfig {
        macro_rules! over {
            ($($f:ident),*) => { $( if a.$f.is_some() { self.$f = a.$f.clone(); } )* };
        }
        over!(recipe, directing, check, c, rho, n, burn_in, seed, replicates, paths, t_grid, x, output, report, format);
        self.params.extend(a.params.to_params());
        self.refine |= a.refine;
        if let Some(t) = a.tolerance {
            self.inversion.tolerance = t;
        }
        if let Some(t) = a.psd_tolerance {
            self.inversion.psd_tolerance = t;
        }
        self
    }
}

/// Failure modes of a run, mapped onto exit codes.
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Failed(String),
    Io(io::Error),
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::InvalidGrid(_)
            | Error::WrongKind { .. }
            | Error::PossiblyInvalidExponent { .. } => RunError::Usage(e.to_string()),
            other => RunError::Failed(other.to_string()),
        }
    }
}

type RunResult<T> = Result<T, RunError>;

/// Parses `args` and runs; returns the exit status. Clap handles `--help`
/// and reports its own usage errors with status 2.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(RunError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = writeln!(err, "recipes: {}", recipes::recipe_names().join(", "));
            EXIT_USAGE
        }
        Err(RunError::Failed(msg)) => {
            let _ = writeln!(err, "failed: {msg}");
            EXIT_FAIL
        }
        Err(RunError::Io(e)) => {
            let _ = writeln!(err, "io error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> RunResult<i32> {
    let args = match &cli.command {
        Command::ListRecipes(l) => return list_recipes(l.format, out).map(|_| EXIT_PASS),
        Command::Construct(a)
        | Command::Certify(a)
        | Command::SimulateAr1(a)
        | Command::SimulateInar1(a)
        | Command::SimulateSubordinated(a)
        | Command::Invert(a)
        | Command::Report(a) => a,
    };
    let cfg = load_config(args)?;
    cfg.inversion.validate()?;
    let built = build_recipe(&cfg)?;
    match &cli.command {
        Command::Construct(_) => construct(&cfg, &built, out),
        Command::Certify(_) => certify_cmd(&cfg, &built, out),
        Command::SimulateAr1(_) => simulate_chain(&cfg, &built, false, out),
        Command::SimulateInar1(_) => simulate_chain(&cfg, &built, true, out),
        Command::SimulateSubordinated(_) => simulate_subordinated(&cfg, &built, out),
        Command::Invert(_) => invert(&cfg, &built, out),
        Command::Report(_) => report_cmd(&cfg, &built, out),
        Command::ListRecipes(_) => unreachable!(),
    }
}

fn load_config(args: &RunArgs) -> RunResult<RunConfig> {
    let base = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| RunError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| RunError::Usage(format!("bad config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    Ok(base.merge(args))
}

fn build_recipe(cfg: &RunConfig) -> RunResult<Built> {
    let name = cfg
        .recipe
        .as_deref()
        .ok_or_else(|| RunError::Usage("a recipe is required (--recipe)".into()))?;
    let mut built = recipes::build(name, &cfg.params).ok_or_else(|| RunError::Usage(recipes::unknown_recipe(name)))??;
    if let Some(d) = &cfg.directing {
        let clock = recipes::build(d, &cfg.params).ok_or_else(|| RunError::Usage(recipes::unknown_recipe(d)))??;
        if clock.recipe.kind != RecipeKind::Lt {
            return Err(RunError::Usage(format!("--directing needs an LT recipe, got '{d}'")));
        }
        let pairing = built
            .pairing
            .as_mut()
            .ok_or_else(|| RunError::Usage("--directing only applies to pairing recipes".into()))?;
        pairing.directing = clock.transform;
        built.transform = subordination::marginal_cf(&pairing.driven.into(), &pairing.directing, 1.0)?;
    }
    Ok(built)
}

fn config_value(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serialises")
}

fn verdict_name(v: Verdict) -> String {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
    .into()
}

fn exit_for(v: Verdict) -> i32 {
    if v.is_pass() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn emit(cfg: &RunConfig, env: &Envelope, out: &mut dyn Write) -> RunResult<()> {
    let text = env.to_pretty();
    match &cfg.report {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn list_recipes(format: Format, out: &mut dyn Write) -> RunResult<()> {
    match format {
        Format::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(RECIPES).expect("registry serialises"))?;
        }
        _ => {
            writeln!(out, "{:<26} {:<8} {:<50} description", "recipe", "kind", "params")?;
            for r in RECIPES {
                let kind = serde_json::to_value(r.kind).expect("kind");
                writeln!(
                    out,
                    "{:<26} {:<8} {:<50} {}",
                    r.name,
                    kind.as_str().unwrap_or(""),
                    r.params.join(" "),
                    r.description
                )?;
            }
        }
    }
    Ok(())
}

fn default_points(kind: TransformKind) -> Vec<f64> {
    match kind {
        TransformKind::Cf => symmetric_grid(5.0, 11),
        TransformKind::Lt => linspace(0.0, 5.0, 11),
        TransformKind::Pgf => linspace(0.0, 1.0, 11),
    }
}

fn construct(cfg: &RunConfig, built: &Built, out: &mut dyn Write) -> RunResult<i32> {
    let f = &built.transform;
    let xs = cfg.x.clone().unwrap_or_else(|| default_points(f.kind()));
    let values: Vec<Value> = xs
        .iter()
        .map(|&s| {
            let v = f.at(s);
            json!({"s": s, "re": v.re, "im": v.im})
        })
        .collect();
    let result = json!({
        "label": f.label(),
        "kind": recipes::kind_of(f),
        "law": f.law(),
        "certification": format!("{:?}", f.certification()),
        "known_sd": f.known_sd(),
        "exponent": built.exponent,
        "values": values,
    });
    emit(cfg, &Envelope::new("construct", config_value(cfg), None, result), out)?;
    Ok(EXIT_PASS)
}

fn default_check(built: &Built) -> Check {
    match built.recipe.kind {
        RecipeKind::Cf => Check::Semisd,
        RecipeKind::Lt => Check::LtSemisd,
        RecipeKind::Pgf => Check::DiscreteSemisd,
        RecipeKind::Pairing => Check::Subordinated,
    }
}

fn param_c(cfg: &RunConfig, built: &Built) -> RunResult<f64> {
    cfg.c
        .or_else(|| recipes::natural_b(built))
        .ok_or_else(|| RunError::Usage("this check needs --c (the recipe has no b of its own)".into()))
}

fn need_kind(built: &Built, kind: TransformKind, check: Check) -> RunResult<()> {
    if built.transform.kind() == kind {
        Ok(())
    } else {
        Err(RunError::Usage(format!(
            "check {check:?} needs a {kind:?} recipe, '{}' is {:?}",
            built.recipe.name,
            built.transform.kind()
        )))
    }
}

/// Runs one certificate.
pub fn certify(cfg: &RunConfig, built: &Built, check: Check) -> RunResult<DecompositionReport> {
    let inv = &cfg.inversion;
    let grid = if cfg.refine { inv.cf_grid_refined() } else { inv.cf_grid() };
    let f = &built.transform;
    let report = match check {
        Check::Semisd => {
            need_kind(built, TransformKind::Cf, check)?;
            decompose::check_semisd(f, param_c(cfg, built)?, &grid, inv)?
        }
        Check::SdFull => {
            need_kind(built, TransformKind::Cf, check)?;
            decompose::check_sd_full(f, &recipes::sd_c_grid(), &grid, inv)?
        }
        Check::Validity => {
            need_kind(built, TransformKind::Cf, check)?;
            let cert = decompose::is_valid_cf(f, &grid, inv.psd_tolerance)?;
            DecompositionReport::from_parts(Identity::CfValidity, Vec::new(), 0.0, inv.residual_tolerance, cert)
        }
        Check::Scaling => {
            let psi = built
                .exponent
                .ok_or_else(|| RunError::Usage("scaling needs a recipe with a semi-stable exponent".into()))?;
            semistable::check_scaling_identity(&psi, &log_grid(1e-3, 1e3, 1001), inv.residual_tolerance)
        }
        Check::DiscreteSemisd => {
            need_kind(built, TransformKind::Pgf, check)?;
            decompose::check_discrete_semisd(f, param_c(cfg, built)?, inv)?
        }
        Check::LtSemisd => {
            need_kind(built, TransformKind::Lt, check)?;
            decompose::check_lt_semisd(f, param_c(cfg, built)?, &inv.cm_grid(), inv)?
        }
        Check::Bridge => {
            need_kind(built, TransformKind::Lt, check)?;
            decompose::lt_pgf_bridge(f, param_c(cfg, built)?, inv)?
        }
        Check::Cm => {
            need_kind(built, TransformKind::Lt, check)?;
            transforms::check_complete_monotonicity(f, inv.cm_order, &inv.cm_grid(), inv.tolerance)?
        }
        Check::Mixture => {
            let (psi, beta) = match f.law() {
                Some(corpus::Law::GenSemiAlphaLaplace { exponent, beta }) => (*exponent, *beta),
                _ => return Err(RunError::Usage("mixture check needs gen-semi-alpha-laplace or linnik".into())),
            };
            let c = psi.b().powf(psi.alpha());
            mixtures::mixture_witness_sd(&psi, &corpus::gamma_lt(beta, 1.0), c, inv)?
        }
        Check::Subordinated => {
            let pairing = built
                .pairing
                .as_ref()
                .ok_or_else(|| RunError::Usage("subordinated check needs a pairing recipe".into()))?;
            let claim = pairing.claim.clone().unwrap_or(MarginalClaim::SemiStableSd);
            subordination::verify_subordinated_marginal(&pairing.driven, &pairing.directing, &claim, inv)?
        }
    };
    Ok(report)
}

fn certify_cmd(cfg: &RunConfig, built: &Built, out: &mut dyn Write) -> RunResult<i32> {
    let check = cfg.check.unwrap_or_else(|| default_check(built));
    let report = certify(cfg, built, check)?;
    let env = Envelope::new(
        "certify",
        config_value(cfg),
        Some(verdict_name(report.verdict)),
        serde_json::to_value(&report).expect("report serialises"),
    );
    emit(cfg, &env, out)?;
    Ok(exit_for(report.verdict))
}

fn report_cmd(cfg: &RunConfig, built: &Built, out: &mut dyn Write) -> RunResult<i32> {
    let primary = cfg.check.unwrap_or_else(|| default_check(built));
    let mut checks = vec![primary];
    let extra: &[Check] = match built.recipe.kind {
        RecipeKind::Cf => &[Check::Validity, Check::SdFull, Check::Scaling],
        RecipeKind::Lt => &[Check::Cm, Check::Bridge],
        RecipeKind::Pgf => &[],
        RecipeKind::Pairing => &[Check::Semisd],
    };
    checks.extend(extra.iter().copied().filter(|c| *c != primary));
    let mut results = Vec::new();
    let mut verdict = Verdict::Pass;
    for (i, check) in checks.iter().enumerate() {
        match certify(cfg, built, *check) {
            Ok(r) => {
                if i == 0 {
                    verdict = r.verdict;
                }
                results.push(json!({"check": check, "primary": i == 0, "report": r}));
            }
            Err(RunError::Usage(msg)) if i > 0 => {
                results.push(json!({"check": check, "primary": false, "skipped": msg}));
            }
            Err(e) => return Err(e),
        }
    }
    let env = Envelope::new("report", config_value(cfg), Some(verdict_name(verdict)), Value::Array(results));
    emit(cfg, &env, out)?;
    Ok(exit_for(verdict))
}

fn simulate_chain(cfg: &RunConfig, built: &Built, discrete: bool, out: &mut dyn Write) -> RunResult<i32> {
    let want = if discrete { TransformKind::Pgf } else { TransformKind::Cf };
    if built.transform.kind() != want {
        return Err(RunError::Usage(format!(
            "'{}' is not a {:?} recipe; use {}",
            built.recipe.name,
            want,
            if discrete { "simulate-ar1" } else { "simulate-inar1" }
        )));
    }
    let command = if discrete { "simulate-inar1" } else { "simulate-ar1" };
    let rho = cfg.rho.ok_or_else(|| RunError::Usage("--rho is required".into()))?;
    let ar = match autoregressive::build_ar1(&built.transform, rho, &cfg.inversion) {
        Ok(a) => a,
        Err(Error::NotSemiSdAtRho { rho, report }) => {
            let env = Envelope::new(
                command,
                config_value(cfg),
                Some("fail".into()),
                json!({"error": format!("not-semi-SD-at-rho (rho={rho})"), "certificate": report}),
            );
            emit(cfg, &env, out)?;
            return Ok(EXIT_FAIL);
        }
        Err(e) => return Err(e.into()),
    };
    let ar = ar
        .with_length(cfg.n.unwrap_or(autoregressive::MIN_DIAGNOSTIC_LEN))
        .with_burn_in(cfg.burn_in.unwrap_or(0))
        .with_seed(cfg.seed.unwrap_or(0));
    let replicates = cfg.replicates.unwrap_or(1).max(1);
    let samples = parallel::simulate_replicates(&ar, replicates, parallel::thread_count())?;
    if let Some(path) = &cfg.output {
        let meta = json!({"command": command, "config": config_value(cfg), "replicate": 0});
        write_series_csv(io::BufWriter::new(fs::File::create(path)?), &samples[0], &meta)?;
    }
    let grid = autoregressive::default_s_grid(&ar);
    let mut per_replicate = Vec::new();
    let mut verdict = Verdict::Pass;
    for s in &samples {
        let mut entry = json!({"replicate": s.replicate, "n": s.n, "burn_in": s.burn_in});
        if s.values.len() >= autoregressive::MIN_DIAGNOSTIC_LEN {
            let r = autoregressive::stationarity_diagnostic(s, &ar, &grid)?;
            verdict = Verdict::all([verdict, r.verdict]);
            entry["stationarity"] = serde_json::to_value(&r).expect("report");
        } else {
            entry["stationarity"] = json!("skipped: fewer than 10000 values");
        }
        if let SeriesValues::Count(ks) = &s.values {
            let pmf = marginal_pmf(&ar.marginal, &cfg.inversion)?;
            entry["gof"] = serde_json::to_value(gof::chi_square_gof(ks, &pmf)).expect("gof");
        }
        entry["mean"] = json!(semisd_core::stats::mean(&s.values.to_real()));
        per_replicate.push(entry);
    }
    let result = json!({
        "innovation_source": ar.innovation_source,
        "certificate": ar.certificate,
        "replicates": per_replicate,
    });
    emit(cfg, &Envelope::new(command, config_value(cfg), Some(verdict_name(verdict)), result), out)?;
    Ok(exit_for(verdict))
}

/// Marginal pmf from the PGF, up to half the DFT size.
pub fn marginal_pmf(p: &TransformFn, inv: &InversionConfig) -> semisd_core::Result<Vec<f64>> {
    transforms::extract_pgf_coeffs(p, inv.dft_size / 2 - 1, inv)
}

fn simulate_subordinated(cfg: &RunConfig, built: &Built, out: &mut dyn Write) -> RunResult<i32> {
    let pairing = built
        .pairing
        .as_ref()
        .ok_or_else(|| RunError::Usage(format!("'{}' is not a pairing recipe", built.recipe.name)))?;
    let spec = SubordinationSpec::new(
        pairing.driven,
        pairing.directing.clone(),
        cfg.t_grid.clone().unwrap_or_else(|| vec![1.0]),
        cfg.paths.unwrap_or(10_000),
        cfg.seed.unwrap_or(0),
    )?
    .with_inversion(cfg.inversion.clone());
    let sample = parallel::simulate_paths(&spec, parallel::thread_count())?;
    if let Some(path) = &cfg.output {
        let meta = json!({"command": "simulate-subordinated", "config": config_value(cfg)});
        write_paths_csv(io::BufWriter::new(fs::File::create(path)?), &sample, &meta)?;
    }
    let (verdict, result) = if sample.paths.is_empty() {
        (Verdict::Pass, json!({"paths": 0}))
    } else {
        let r = subordination::check_path_marginals(&spec, &sample, &subordination::mc_grid())?;
        (r.verdict, json!({"paths": sample.paths.len(), "marginals": r}))
    };
    let env = Envelope::new("simulate-subordinated", config_value(cfg), Some(verdict_name(verdict)), result);
    emit(cfg, &env, out)?;
    Ok(exit_for(verdict))
}

fn invert(cfg: &RunConfig, built: &Built, out: &mut dyn Write) -> RunResult<i32> {
    need_kind(built, TransformKind::Cf, Check::Validity)
        .map_err(|_| RunError::Usage("invert needs a CF recipe".into()))?;
    let inv = CdfInverter::new(&built.transform, &cfg.inversion)?;
    let xs = cfg.x.clone().unwrap_or_else(|| linspace(-3.0, 3.0, 61));
    let cdf: Vec<f64> = xs.iter().map(|&x| inv.cdf(x)).collect();
    if cfg.format == Some(Format::Csv) {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["x", "cdf"]).map_err(io::Error::from)?;
        for (x, f) in xs.iter().zip(&cdf) {
            w.write_record([crate::io::format_f64(*x), crate::io::format_f64(*f)])
                .map_err(io::Error::from)?;
        }
        let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        match &cfg.output {
            Some(p) => fs::write(p, bytes)?,
            None => out.write_all(&bytes)?,
        }
        return Ok(EXIT_PASS);
    }
    let result = json!({"label": built.transform.label(), "x": xs, "cdf": cdf});
    emit(cfg, &Envelope::new("invert", config_value(cfg), None, result), out)?;
    Ok(EXIT_PASS)
}
