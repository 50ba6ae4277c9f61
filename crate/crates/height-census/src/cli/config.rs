//! TOML run configuration. All rationals travel as strings so no value is
//! ever rounded through a float, and parse failures name the offending key.

use crate::census::CensusConfig;
use crate::heights::{parse_rational, Rational};
use crate::multgroup::{analyze_group, pow_rational, unit_group_descriptor, GroupDescriptor};
use crate::recurrence::{Polynomial, RecurrenceSpec};
use crate::represent::CoefficientFamily;
use num_traits::One;
use serde::Deserialize;
use std::fmt;
use std::path::PathBuf;

pub const DEFAULT_TOLERANCE: f64 = 0.15;
pub const DEFAULT_SEED: u64 = 0xE5EED;

/// A configuration problem, pointing at the key that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Volume,
    Census,
    Hball,
    Recurrence,
    Represent,
    Selftest,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Volume => "volume",
            CommandKind::Census => "census",
            CommandKind::Hball => "hball",
            CommandKind::Recurrence => "recurrence",
            CommandKind::Represent => "represent",
            CommandKind::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<String>,
    group: Option<RawGroup>,
    a: Option<Vec<String>>,
    ladder: Option<RawLadder>,
    tolerance: Option<f64>,
    seed: Option<u64>,
    output_dir: Option<String>,
    recurrence: Option<RawRecurrence>,
    family: Option<RawFamily>,
    census: Option<RawCensus>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    k: usize,
    generators: Option<Vec<Vec<String>>>,
    s_unit_primes: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLadder {
    xs: Option<Vec<String>>,
    base: Option<String>,
    rungs: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecurrence {
    roots: Vec<String>,
    polys: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    auto_close_permutations: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCensus {
    slack_delta: Option<f64>,
    box_margin: Option<i64>,
    stability_rounds: Option<usize>,
    parallel_chunks: Option<usize>,
}

/// Group input, kept alongside the analyzed descriptor for echoing.
#[derive(Debug, Clone)]
pub struct GroupInput {
    pub k: usize,
    pub generators: Option<Vec<Vec<String>>>,
    pub s_unit_primes: Option<Vec<u64>>,
    pub descriptor: GroupDescriptor,
}

/// Recurrence input with the raw strings retained.
#[derive(Debug, Clone)]
pub struct RecurrenceInput {
    pub roots: Vec<String>,
    pub polys: Vec<Vec<String>>,
    pub spec: RecurrenceSpec,
}

/// Coefficient family input with the raw strings retained.
#[derive(Debug, Clone)]
pub struct FamilyInput {
    pub tuples: Vec<Vec<String>>,
    pub auto_close_permutations: bool,
    pub family: CoefficientFamily,
}

/// Fully parsed configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub group: Option<GroupInput>,
    pub a: Option<Vec<Rational>>,
    pub a_raw: Option<Vec<String>>,
    pub recurrence: Option<RecurrenceInput>,
    pub family: Option<FamilyInput>,
    pub ladder: Vec<Rational>,
    pub ladder_raw: Vec<String>,
    pub tolerance: f64,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub census: CensusConfig,
}

fn parse_rational_at(key: &str, s: &str) -> Result<Rational, ConfigError> {
    parse_rational(s).map_err(|e| ConfigError::new(key, e.to_string()))
}

fn build_group(raw: RawGroup) -> Result<GroupInput, ConfigError> {
    match (&raw.generators, &raw.s_unit_primes) {
        (Some(_), Some(_)) => Err(ConfigError::new(
            "group",
            "give either `generators` or `s_unit_primes`, not both",
        )),
        (None, None) => Err(ConfigError::new(
            "group",
            "one of `generators` or `s_unit_primes` is required",
        )),
        (Some(gens), None) => {
            let mut parsed = Vec::with_capacity(gens.len());
            for (i, tuple) in gens.iter().enumerate() {
                let mut row = Vec::with_capacity(tuple.len());
                for (j, s) in tuple.iter().enumerate() {
                    row.push(parse_rational_at(
                        &format!("group.generators[{i}][{j}]"),
                        s,
                    )?);
                }
                parsed.push(row);
            }
            let descriptor = analyze_group(raw.k, &parsed)
                .map_err(|e| ConfigError::new("group.generators", e.to_string()))?;
            Ok(GroupInput {
                k: raw.k,
                generators: raw.generators,
                s_unit_primes: None,
                descriptor,
            })
        }
        (None, Some(primes)) => {
            let descriptor = unit_group_descriptor(primes, raw.k)
                .map_err(|e| ConfigError::new("group.s_unit_primes", e.to_string()))?;
            Ok(GroupInput {
                k: raw.k,
                generators: None,
                s_unit_primes: raw.s_unit_primes,
                descriptor,
            })
        }
    }
}

fn build_ladder(raw: RawLadder) -> Result<(Vec<Rational>, Vec<String>), ConfigError> {
    let ladder: Vec<Rational> = match (&raw.xs, &raw.base, raw.rungs) {
        (Some(xs), None, None) => {
            let mut parsed = Vec::with_capacity(xs.len());
            for (i, s) in xs.iter().enumerate() {
                parsed.push(parse_rational_at(&format!("ladder.xs[{i}]"), s)?);
            }
            parsed
        }
        (None, Some(base), Some(rungs)) => {
            let base = parse_rational_at("ladder.base", base)?;
            if base <= Rational::one() {
                return Err(ConfigError::new("ladder.base", "must be > 1"));
            }
            if rungs == 0 || rungs > 16 {
                return Err(ConfigError::new("ladder.rungs", "must be in 1..=16"));
            }
            (0..rungs).map(|j| pow_rational(&base, 1i64 << j)).collect()
        }
        _ => {
            return Err(ConfigError::new(
                "ladder",
                "give either `xs` or both `base` and `rungs`",
            ))
        }
    };
    if ladder.is_empty() {
        return Err(ConfigError::new("ladder.xs", "must not be empty"));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::new("ladder.xs", "must be strictly increasing"));
    }
    let raw_strings = ladder.iter().map(|x| x.to_string()).collect();
    Ok((ladder, raw_strings))
}

fn build_recurrence(raw: RawRecurrence) -> Result<RecurrenceInput, ConfigError> {
    let mut roots = Vec::with_capacity(raw.roots.len());
    for (i, s) in raw.roots.iter().enumerate() {
        roots.push(parse_rational_at(&format!("recurrence.roots[{i}]"), s)?);
    }
    let mut polys = Vec::with_capacity(raw.polys.len());
    for (i, coeffs) in raw.polys.iter().enumerate() {
        let mut parsed = Vec::with_capacity(coeffs.len());
        for (j, s) in coeffs.iter().enumerate() {
            parsed.push(parse_rational_at(
                &format!("recurrence.polys[{i}][{j}]"),
                s,
            )?);
        }
        polys.push(Polynomial::new(parsed));
    }
    let spec = RecurrenceSpec::new(roots, polys)
        .map_err(|e| ConfigError::new("recurrence", e.to_string()))?;
    Ok(RecurrenceInput {
        roots: raw.roots,
        polys: raw.polys,
        spec,
    })
}

fn build_family(raw: RawFamily) -> Result<FamilyInput, ConfigError> {
    let mut tuples = Vec::with_capacity(raw.a.len());
    for (i, tuple) in raw.a.iter().enumerate() {
        let mut parsed = Vec::with_capacity(tuple.len());
        for (j, s) in tuple.iter().enumerate() {
            parsed.push(parse_rational_at(&format!("family.A[{i}][{j}]"), s)?);
        }
        tuples.push(parsed);
    }
    let family =
        CoefficientFamily::new(tuples).map_err(|e| ConfigError::new("family.A", e.to_string()))?;
    Ok(FamilyInput {
        tuples: raw.a,
        auto_close_permutations: raw.auto_close_permutations.unwrap_or(false),
        family,
    })
}

fn build_census(raw: Option<RawCensus>) -> Result<CensusConfig, ConfigError> {
    let mut cfg = CensusConfig::default();
    let Some(raw) = raw else {
        return Ok(cfg);
    };
    if let Some(d) = raw.slack_delta {
        if !(d > 0.0 && d.is_finite()) {
            return Err(ConfigError::new("census.slack_delta", "must be positive"));
        }
        cfg.slack_delta = d;
    }
    if let Some(m) = raw.box_margin {
        if m < 0 {
            return Err(ConfigError::new("census.box_margin", "must be >= 0"));
        }
        cfg.box_margin = m;
    }
    if let Some(r) = raw.stability_rounds {
        if r == 0 || r > 8 {
            return Err(ConfigError::new(
                "census.stability_rounds",
                "must be in 1..=8",
            ));
        }
        cfg.stability_rounds = r;
    }
    if let Some(c) = raw.parallel_chunks {
        if c == 0 {
            return Err(ConfigError::new("census.parallel_chunks", "must be >= 1"));
        }
        cfg.parallel_chunks = c;
    }
    Ok(cfg)
}

fn parse_command(name: &str) -> Result<CommandKind, ConfigError> {
    match name {
        "volume" => Ok(CommandKind::Volume),
        "census" => Ok(CommandKind::Census),
        "hball" => Ok(CommandKind::Hball),
        "recurrence" => Ok(CommandKind::Recurrence),
        "represent" => Ok(CommandKind::Represent),
        "selftest" => Ok(CommandKind::Selftest),
        other => Err(ConfigError::new(
            "command",
            format!("unknown command `{other}`"),
        )),
    }
}

/// Parse a TOML document into a run configuration. `command` comes from the
/// command line; a `command` key in the file must agree with it.
pub fn parse_config(command: CommandKind, text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| ConfigError::new("(document)", e.to_string()))?;

    if let Some(name) = &raw.command {
        let declared = parse_command(name)?;
        if declared != command {
            return Err(ConfigError::new(
                "command",
                format!(
                    "file declares `{}` but the command line ran `{}`",
                    declared.name(),
                    command.name()
                ),
            ));
        }
    }

    let group = raw.group.map(build_group).transpose()?;
    let (a, a_raw) = match raw.a {
        Some(strings) => {
            let mut parsed = Vec::with_capacity(strings.len());
            for (i, s) in strings.iter().enumerate() {
                parsed.push(parse_rational_at(&format!("a[{i}]"), s)?);
            }
            (Some(parsed), Some(strings))
        }
        None => (None, None),
    };
    let (ladder, ladder_raw) = match raw.ladder {
        Some(l) => build_ladder(l)?,
        None => (Vec::new(), Vec::new()),
    };
    let recurrence = raw.recurrence.map(build_recurrence).transpose()?;
    let family = raw.family.map(build_family).transpose()?;
    let census = build_census(raw.census)?;

    let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(ConfigError::new("tolerance", "must be positive"));
    }

    Ok(RunConfig {
        command,
        group,
        a,
        a_raw,
        recurrence,
        family,
        ladder,
        ladder_raw,
        tolerance,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        output_dir: raw.output_dir.map(PathBuf::from),
        census,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_census_config() {
        let cfg = parse_config(
            CommandKind::Census,
            r#"
                command = "census"
                a = ["1", "1"]
                tolerance = 0.2
                [group]
                k = 2
                generators = [["2", "1/2"]]
                [ladder]
                xs = ["100", "10000"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.tolerance, 0.2);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.ladder.len(), 2);
        assert_eq!(cfg.group.as_ref().unwrap().descriptor.rank(), 1);
        assert_eq!(cfg.a.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn malformed_rational_names_the_key() {
        let err = parse_config(
            CommandKind::Census,
            r#"
                [group]
                k = 2
                generators = [["2//3", "1"]]
            "#,
        )
        .unwrap_err();
        assert_eq!(err.key, "group.generators[0][0]");
        assert!(err.message.contains("2//3"));
    }

    #[test]
    fn geometric_ladder_squares_the_bound() {
        let cfg = parse_config(
            CommandKind::Hball,
            r#"
                [group]
                k = 2
                s_unit_primes = [2]
                [ladder]
                base = "100"
                rungs = 3
            "#,
        )
        .unwrap();
        let expected = ["100", "10000", "100000000"];
        for (x, e) in cfg.ladder.iter().zip(expected) {
            assert_eq!(x, &parse_rational(e).unwrap());
        }
        assert_eq!(cfg.group.as_ref().unwrap().descriptor.torsion_order(), 4);
    }

    #[test]
    fn rejects_decreasing_ladder_and_command_mismatch() {
        let err = parse_config(
            CommandKind::Hball,
            r#"
                [ladder]
                xs = ["100", "10"]
            "#,
        )
        .unwrap_err();
        assert_eq!(err.key, "ladder.xs");

        let err = parse_config(CommandKind::Hball, r#"command = "census""#).unwrap_err();
        assert_eq!(err.key, "command");
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = parse_config(CommandKind::Volume, "unknown_knob = 3").unwrap_err();
        assert_eq!(err.key, "(document)");
        assert!(err.message.contains("unknown_knob"));
    }
}
