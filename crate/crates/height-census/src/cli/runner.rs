//! Command execution: dispatches a parsed configuration to the counting
//! modules, assembles the report, and writes the artifacts.
//!
//! Exit codes: 0 when every check passes, 1 on input errors, 2 when a fit
//! or consistency verdict fails, 3 when an enumeration was not certifiably
//! complete. Incomplete enumeration takes precedence over a failed fit.

use super::config::{CommandKind, ConfigError, RunConfig};
use super::report::{plot_csv, rows_csv, Numeric, OutputRow, Report};
use crate::census::{
    asymptotic_report, census_nondegenerate, count_height_ball_cfg, ln_f64, CensusRow, FitReport,
};
use crate::heights::Rational;
use crate::logspace::{c_usk_closed, volume_c_gamma_seeded, VolumeMethod, VolumeResult};
use crate::recurrence::{count_bounded_terms, validate_recurrence, RecurrenceError};
use crate::represent::{
    close_under_permutations, count_representable, predicted_constant, validate_family,
    RepresentError,
};
use serde_json::{json, Map, Value};
use std::fs;
use std::path::Path;

/// What a run produced, alongside the artifacts written to disk.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub verdict: String,
    pub report_bytes: Vec<u8>,
}

struct Prepared {
    rows: Vec<OutputRow>,
    results: Map<String, Value>,
    verdict: &'static str,
    exit_code: i32,
}

fn missing(key: &str) -> ConfigError {
    ConfigError::new(key, "required by this command but missing")
}

fn echo_inputs(config: &RunConfig) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(config.command.name()));
    if let Some(g) = &config.group {
        let mut gm = Map::new();
        gm.insert("k".into(), json!(g.k));
        if let Some(gens) = &g.generators {
            gm.insert("generators".into(), json!(gens));
        }
        if let Some(primes) = &g.s_unit_primes {
            gm.insert("s_unit_primes".into(), json!(primes));
        }
        m.insert("group".into(), Value::Object(gm));
    }
    if let Some(a) = &config.a_raw {
        m.insert("a".into(), json!(a));
    }
    if let Some(r) = &config.recurrence {
        m.insert(
            "recurrence".into(),
            json!({"roots": r.roots, "polys": r.polys}),
        );
    }
    if let Some(f) = &config.family {
        m.insert(
            "family".into(),
            json!({
                "A": f.tuples,
                "auto_close_permutations": f.auto_close_permutations,
            }),
        );
    }
    if !config.ladder_raw.is_empty() {
        m.insert("ladder".into(), json!(config.ladder_raw));
    }
    m.insert("tolerance".into(), json!(config.tolerance));
    m.insert("seed".into(), json!(config.seed));
    m.insert(
        "census".into(),
        json!({
            "slack_delta": config.census.slack_delta,
            "box_margin": config.census.box_margin,
            "stability_rounds": config.census.stability_rounds,
        }),
    );
    Value::Object(m)
}

fn fit_json(fit: &FitReport) -> Value {
    json!({
        "ratios": fit.ratios.iter().map(|&r| json!(Numeric::heuristic(r))).collect::<Vec<_>>(),
        "slope": Numeric::heuristic(fit.slope),
        "final_ratio": Numeric::heuristic(fit.final_ratio),
        "tolerance": Numeric::exact(fit.tolerance),
        "pass": fit.pass,
    })
}

fn verdict_from(any_incomplete: bool, fit_failed: bool) -> (&'static str, i32) {
    if any_incomplete {
        ("incomplete", 3)
    } else if fit_failed {
        ("fail", 2)
    } else {
        ("pass", 0)
    }
}

fn ratio_against(count: u64, constant: f64, x: &Rational, power: i32) -> Option<f64> {
    let ln_x = ln_f64(x);
    (ln_x > 0.0 && constant > 0.0).then(|| count as f64 / (constant * ln_x.powi(power)))
}

/// Fit rows against c·(log X)^power when at least three rungs are present.
fn maybe_fit(
    rows: &[OutputRow],
    power: usize,
    constant: &VolumeResult,
    tolerance: f64,
    results: &mut Map<String, Value>,
) -> Result<bool, ConfigError> {
    if rows.len() < 3 {
        return Ok(false);
    }
    let census_rows: Vec<CensusRow> = rows
        .iter()
        .map(|r| CensusRow {
            x: r.x.clone(),
            count: r.count,
            degenerate_count: r.degenerate,
            complete: r.complete,
        })
        .collect();
    let fit = asymptotic_report(&census_rows, power, constant, tolerance)
        .map_err(|e| ConfigError::new("ladder", e.to_string()))?;
    results.insert("fit".into(), fit_json(&fit));
    Ok(!fit.pass)
}

fn run_volume(config: &RunConfig) -> Result<Prepared, ConfigError> {
    let group = config.group.as_ref().ok_or_else(|| missing("group"))?;
    let desc = &group.descriptor;
    let mut results = Map::new();

    match volume_c_gamma_seeded(desc, config.seed) {
        Ok((mu, c)) => {
            results.insert("mu".into(), json!(Numeric::from_volume(&mu)));
            results.insert("c_gamma".into(), json!(Numeric::from_volume(&c)));
            results.insert("cells".into(), json!(Numeric::exact(mu.cells_used)));
            results.insert("rank".into(), json!(Numeric::exact(desc.rank())));
            results.insert(
                "torsion_order".into(),
                json!(Numeric::exact(desc.torsion_order())),
            );

            let mut fit_failed = false;
            if let Some(primes) = &group.s_unit_primes {
                let closed = c_usk_closed(primes, group.k)
                    .map_err(|e| ConfigError::new("group.s_unit_primes", e.to_string()))?;
                let rel = (c.value - closed.value).abs() / closed.value.abs();
                results.insert("c_closed_form".into(), json!(Numeric::from_volume(&closed)));
                if let Some(exact) = &closed.exact {
                    results.insert("c_closed_form_expression".into(), json!(exact.to_string()));
                }
                results.insert(
                    "closed_form_rel_error".into(),
                    json!(Numeric::heuristic(rel)),
                );
                fit_failed = !rel.is_finite() || rel > 1e-6;
            }
            let (verdict, exit_code) = verdict_from(false, fit_failed);
            Ok(Prepared {
                rows: Vec::new(),
                results,
                verdict,
                exit_code,
            })
        }
        Err(e @ crate::logspace::LogSpaceError::CrossCheckFailed { .. }) => {
            results.insert("error".into(), json!(e.to_string()));
            Ok(Prepared {
                rows: Vec::new(),
                results,
                verdict: "fail",
                exit_code: 2,
            })
        }
        Err(e) => Err(ConfigError::new("group", e.to_string())),
    }
}

fn require_ladder(config: &RunConfig) -> Result<&[Rational], ConfigError> {
    if config.ladder.is_empty() {
        return Err(missing("ladder"));
    }
    Ok(&config.ladder)
}

fn run_census(config: &RunConfig) -> Result<Prepared, ConfigError> {
    let group = config.group.as_ref().ok_or_else(|| missing("group"))?;
    let a = config.a.as_ref().ok_or_else(|| missing("a"))?;
    let ladder = require_ladder(config)?;
    let desc = &group.descriptor;

    let (_, c) = volume_c_gamma_seeded(desc, config.seed)
        .map_err(|e| ConfigError::new("group", e.to_string()))?;
    let power = desc.rank();

    let mut rows = Vec::with_capacity(ladder.len());
    for x in ladder {
        let row = census_nondegenerate(desc, a, x, &config.census)
            .map_err(|e| ConfigError::new("a", e.to_string()))?;
        let ratio = ratio_against(row.count, c.value, x, power as i32);
        rows.push(OutputRow::from_census(&row, ratio));
    }

    let mut results = Map::new();
    results.insert("c_gamma".into(), json!(Numeric::from_volume(&c)));
    results.insert("rank".into(), json!(Numeric::exact(power)));
    results.insert(
        "rows".into(),
        Value::Array(rows.iter().map(OutputRow::to_json).collect()),
    );
    let fit_failed = maybe_fit(&rows, power, &c, config.tolerance, &mut results)?;
    let any_incomplete = rows.iter().any(|r| !r.complete);
    let (verdict, exit_code) = verdict_from(any_incomplete, fit_failed);
    Ok(Prepared {
        rows,
        results,
        verdict,
        exit_code,
    })
}

fn run_hball(config: &RunConfig) -> Result<Prepared, ConfigError> {
    let group = config.group.as_ref().ok_or_else(|| missing("group"))?;
    let ladder = require_ladder(config)?;
    let desc = &group.descriptor;

    let (_, c) = volume_c_gamma_seeded(desc, config.seed)
        .map_err(|e| ConfigError::new("group", e.to_string()))?;
    let power = desc.rank();

    let mut rows = Vec::with_capacity(ladder.len());
    for x in ladder {
        let count = count_height_ball_cfg(desc, x, &config.census)
            .map_err(|e| ConfigError::new("ladder.xs", e.to_string()))?;
        rows.push(OutputRow {
            x: x.clone(),
            count,
            degenerate: 0,
            complete: true,
            ratio: ratio_against(count, c.value, x, power as i32),
        });
    }

    let mut results = Map::new();
    results.insert("c_gamma".into(), json!(Numeric::from_volume(&c)));
    results.insert("rank".into(), json!(Numeric::exact(power)));
    results.insert(
        "rows".into(),
        Value::Array(rows.iter().map(OutputRow::to_json).collect()),
    );
    let fit_failed = maybe_fit(&rows, power, &c, config.tolerance, &mut results)?;
    let (verdict, exit_code) = verdict_from(false, fit_failed);
    Ok(Prepared {
        rows,
        results,
        verdict,
        exit_code,
    })
}

fn run_recurrence(config: &RunConfig) -> Result<Prepared, ConfigError> {
    let input = config
        .recurrence
        .as_ref()
        .ok_or_else(|| missing("recurrence"))?;
    let ladder = require_ladder(config)?;

    let validated = validate_recurrence(input.spec.clone()).map_err(|violations| {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        ConfigError::new(
            "recurrence.roots",
            format!("degenerate: {}", list.join("; ")),
        )
    })?;
    let height = validated.height().clone();
    let ln_h = ln_f64(&height);

    let mut results = Map::new();
    results.insert(
        "root_height".into(),
        json!(Numeric::exact_rational(&height)),
    );

    let mut rows = Vec::with_capacity(ladder.len());
    let mut scan_bounds = Vec::with_capacity(ladder.len());
    for x in ladder {
        match count_bounded_terms(&validated, x) {
            Ok(report) => {
                scan_bounds.push(json!(Numeric::exact(report.scan_bound)));
                rows.push(OutputRow {
                    x: x.clone(),
                    count: report.count,
                    degenerate: 0,
                    complete: true,
                    ratio: report.normalized_ratio,
                });
            }
            Err(RecurrenceError::TailUnstable { scanned }) => {
                results.insert(
                    "error".into(),
                    json!(format!(
                        "tail check failed after scanning {scanned} terms at X = {x}"
                    )),
                );
                results.insert(
                    "rows".into(),
                    Value::Array(rows.iter().map(OutputRow::to_json).collect()),
                );
                return Ok(Prepared {
                    rows,
                    results,
                    verdict: "incomplete",
                    exit_code: 3,
                });
            }
            Err(e) => return Err(ConfigError::new("recurrence", e.to_string())),
        }
    }

    // counts track log X/log H, a closed-form constant 1/log H at power 1
    let constant = VolumeResult {
        value: 1.0 / ln_h,
        abs_error_estimate: 0.0,
        method: VolumeMethod::ClosedForm,
        cells_used: 0,
        exact: None,
    };
    results.insert(
        "constant".into(),
        json!(Numeric::closed_form(constant.value)),
    );
    results.insert("scan_bounds".into(), Value::Array(scan_bounds));
    results.insert(
        "rows".into(),
        Value::Array(rows.iter().map(OutputRow::to_json).collect()),
    );
    let fit_failed = maybe_fit(&rows, 1, &constant, config.tolerance, &mut results)?;
    let (verdict, exit_code) = verdict_from(false, fit_failed);
    Ok(Prepared {
        rows,
        results,
        verdict,
        exit_code,
    })
}

fn run_represent(config: &RunConfig) -> Result<Prepared, ConfigError> {
    let group = config.group.as_ref().ok_or_else(|| missing("group"))?;
    let input = config.family.as_ref().ok_or_else(|| missing("family"))?;
    let ladder = require_ladder(config)?;
    let gamma1 = &group.descriptor;
    if gamma1.k() != 1 {
        return Err(ConfigError::new("group.k", "must be 1 for represent"));
    }

    let family = if input.auto_close_permutations {
        close_under_permutations(&input.family)
            .map_err(|e| ConfigError::new("family.A", e.to_string()))?
    } else {
        input.family.clone()
    };
    let validated = validate_family(family, gamma1).map_err(|e| match e {
        RepresentError::FamilyViolations(violations) => {
            let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
            ConfigError::new("family.A", format!("inadmissible: {}", list.join("; ")))
        }
        other => ConfigError::new("family.A", other.to_string()),
    })?;

    let predicted = predicted_constant(gamma1, &validated)
        .map_err(|e| ConfigError::new("family.A", e.to_string()))?;
    let power = validated.family().k() * gamma1.rank();

    let mut rows = Vec::with_capacity(ladder.len());
    for x in ladder {
        let (count, complete) = count_representable(gamma1, &validated, x, &config.census)
            .map_err(|e| ConfigError::new("ladder.xs", e.to_string()))?;
        rows.push(OutputRow {
            x: x.clone(),
            count,
            degenerate: 0,
            complete,
            ratio: ratio_against(count, predicted.combined.value, x, power as i32),
        });
    }

    let mut results = Map::new();
    results.insert(
        "predicted_constant".into(),
        json!(Numeric::from_volume(&predicted.combined)),
    );
    results.insert(
        "c_gamma_k".into(),
        json!(Numeric::from_volume(&predicted.c_gamma_k)),
    );
    results.insert(
        "family_size".into(),
        json!(Numeric::exact(predicted.family_size)),
    );
    results.insert(
        "k_factorial".into(),
        json!(Numeric::exact(predicted.k_factorial)),
    );
    if let Some(v) = predicted.single_orbit {
        results.insert("single_orbit_constant".into(), json!(Numeric::heuristic(v)));
    }
    if let Some(v) = predicted.power_family {
        results.insert("power_family_constant".into(), json!(Numeric::heuristic(v)));
    }
    results.insert(
        "rows".into(),
        Value::Array(rows.iter().map(OutputRow::to_json).collect()),
    );
    let fit_failed = maybe_fit(
        &rows,
        power,
        &predicted.combined,
        config.tolerance,
        &mut results,
    )?;
    let any_incomplete = rows.iter().any(|r| !r.complete);
    let (verdict, exit_code) = verdict_from(any_incomplete, fit_failed);
    Ok(Prepared {
        rows,
        results,
        verdict,
        exit_code,
    })
}

/// Run a non-selftest command and write `report.json`, `rows.csv`, and
/// (when there is plottable data) `plot.csv` into `out_dir`.
pub fn execute(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome, ConfigError> {
    let prepared = match config.command {
        CommandKind::Volume => run_volume(config)?,
        CommandKind::Census => run_census(config)?,
        CommandKind::Hball => run_hball(config)?,
        CommandKind::Recurrence => run_recurrence(config)?,
        CommandKind::Represent => run_represent(config)?,
        CommandKind::Selftest => {
            return Err(ConfigError::new(
                "command",
                "selftest does not take a config run",
            ))
        }
    };

    let report = Report {
        command: config.command.name().to_string(),
        inputs: echo_inputs(config),
        results: Value::Object(prepared.results),
        verdict: prepared.verdict.to_string(),
        exit_code: prepared.exit_code,
    };
    let report_bytes = report.to_json_bytes();

    fs::create_dir_all(out_dir).map_err(|e| ConfigError::new("output_dir", e.to_string()))?;
    fs::write(out_dir.join("report.json"), &report_bytes)
        .map_err(|e| ConfigError::new("output_dir", e.to_string()))?;
    fs::write(out_dir.join("rows.csv"), rows_csv(&prepared.rows))
        .map_err(|e| ConfigError::new("output_dir", e.to_string()))?;
    let plot = plot_csv(&prepared.rows);
    if plot.lines().count() > 1 {
        fs::write(out_dir.join("plot.csv"), plot)
            .map_err(|e| ConfigError::new("output_dir", e.to_string()))?;
    }

    Ok(RunOutcome {
        exit_code: prepared.exit_code,
        verdict: prepared.verdict.to_string(),
        report_bytes,
    })
}
