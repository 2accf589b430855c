//! The `[run]` section: system, potential, kinds and the depth/radius grid.

use std::path::PathBuf;

use presslab_core::potential::parse_potential;
use presslab_core::systems::parse_system;
use presslab_core::{EstimateConfig, MethodChoice, MultiPotential, PressureKind, SemigroupSystem, WordPool};

use crate::config::{parse_depths, parse_floats, ConfigError, ConfigFile, Entry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SemigroupSystem,
    pub phi: MultiPotential,
    pub kinds: Vec<PressureKind>,
    pub depths: Vec<usize>,
    pub radii: Vec<f64>,
    pub estimate: EstimateConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

pub fn core_error(e: &Entry, err: presslab_core::Error) -> ConfigError {
    e.error(err.to_string())
}

pub fn parse_kinds(e: &Entry) -> Result<Vec<PressureKind>, ConfigError> {
    if e.value.trim() == "all" {
        return Ok(PressureKind::all());
    }
    let kinds: Vec<PressureKind> = e
        .value
        .split(|c: char| c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<PressureKind>().map_err(|err| core_error(e, err)))
        .collect::<Result<_, _>>()?;
    if kinds.is_empty() {
        return Err(e.error("empty kind list"));
    }
    Ok(kinds)
}

/// `default`, `none`, or a comma list of `constant`, `period2`, `random:K`.
pub fn parse_pool(e: &Entry, seed: u64) -> Result<WordPool, ConfigError> {
    let v = e.value.trim();
    if v == "default" {
        return Ok(WordPool::with_seed(seed));
    }
    let mut pool = WordPool { constant: false, period2: false, random: 0, seed, relabel: None };
    if v == "none" {
        return Ok(pool);
    }
    for t in v.split(',').map(str::trim) {
        match t {
            "constant" => pool.constant = true,
            "period2" => pool.period2 = true,
            _ => match t.strip_prefix("random:").map(str::parse::<usize>) {
                Some(Ok(k)) => pool.random = k,
                _ => return Err(e.error(format!("bad pool entry `{t}`"))),
            },
        }
    }
    Ok(pool)
}

impl RunConfig {
    pub fn from_file(c: &ConfigFile, o: &Overrides) -> Result<Self, ConfigError> {
        let sys_e = c.require("run", "system")?;
        let system = parse_system(&sys_e.value).map_err(|err| core_error(sys_e, err))?;
        let phi = match c.get("run", "potential") {
            Some(e) => parse_potential(&e.value, system.m(), system.domain()).map_err(|err| core_error(e, err))?,
            None => MultiPotential::zero(system.m()),
        };
        let kinds = match c.get("run", "kinds") {
            Some(e) => parse_kinds(e)?,
            None => PressureKind::all(),
        };
        let depths = parse_depths(c.require("run", "n")?)?;
        let re = c.require("run", "epsilon")?;
        let radii = parse_floats(re)?;
        if radii.iter().any(|&r| !(r > 0.0)) {
            return Err(re.error("radii must be positive"));
        }
        let seed = match (o.seed, c.get("run", "seed")) {
            (Some(s), _) => s,
            (None, Some(e)) => e.parse("an unsigned integer")?,
            (None, None) => 0,
        };
        let mut estimate = EstimateConfig::with_seed(seed);
        if let Some(e) = c.get("run", "pool") {
            estimate.pool = parse_pool(e, seed)?;
        }
        if let Some(e) = c.get("run", "method") {
            estimate.method = match e.value.as_str() {
                "auto" => MethodChoice::Auto,
                "analytic" => MethodChoice::Analytic,
                "generic" => MethodChoice::Generic,
                v => return Err(e.error(format!("unknown method `{v}`"))),
            };
        }
        if let Some(e) = c.get("run", "free_samples") {
            estimate.free_samples = e.parse("an unsigned integer")?;
        }
        let out = o.out.clone().or_else(|| c.get("run", "out").map(|e| PathBuf::from(&e.value)));
        let format = match (o.format, c.get("run", "format")) {
            (Some(f), _) => f,
            (None, Some(e)) => match e.value.as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                v => return Err(e.error(format!("unknown format `{v}`"))),
            },
            (None, None) => Format::Csv,
        };
        Ok(RunConfig { system, phi, kinds, depths, radii, estimate, out, format })
    }
}
