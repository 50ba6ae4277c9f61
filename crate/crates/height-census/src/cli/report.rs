//! Report artifacts: `report.json` with provenance-tagged numerics,
//! `rows.csv` with the fixed column set, and `plot.csv` with log-log data.
//!
//! Serialization is deterministic: maps are ordered, floats use Rust's
//! shortest round-trip formatting, and nothing time- or path-dependent is
//! written, so identical configurations produce byte-identical files.

use crate::census::{ln_f64, CensusRow};
use crate::heights::Rational;
use crate::logspace::{VolumeMethod, VolumeResult};
use serde::Serialize;
use serde_json::{json, Map, Value};

/// A number together with how it was obtained.
#[derive(Debug, Clone, Serialize)]
pub struct Numeric {
    pub value: Value,
    pub provenance: String,
}

impl Numeric {
    /// An integer or rational computed without any approximation.
    pub fn exact(value: impl Into<Value>) -> Numeric {
        Numeric {
            value: value.into(),
            provenance: "exact".into(),
        }
    }

    pub fn exact_rational(value: &Rational) -> Numeric {
        Numeric {
            value: value.to_string().into(),
            provenance: "exact".into(),
        }
    }

    /// A float evaluated from a closed-form expression.
    pub fn closed_form(value: f64) -> Numeric {
        Numeric {
            value: value.into(),
            provenance: "closed_form".into(),
        }
    }

    /// A float from the triangulation pipeline with its error estimate.
    pub fn triangulation(value: f64, abs_error: f64) -> Numeric {
        Numeric {
            value: value.into(),
            provenance: format!("triangulation±{abs_error:e}"),
        }
    }

    /// A float whose accuracy is not certified (ratios, fits, logs).
    pub fn heuristic(value: f64) -> Numeric {
        Numeric {
            value: value.into(),
            provenance: "heuristic".into(),
        }
    }

    /// Tag a volume with the provenance of its computation method.
    pub fn from_volume(v: &VolumeResult) -> Numeric {
        match v.method {
            VolumeMethod::ClosedForm => Numeric::closed_form(v.value),
            VolumeMethod::CellTriangulation => {
                Numeric::triangulation(v.value, v.abs_error_estimate)
            }
            VolumeMethod::MonteCarlo => Numeric::heuristic(v.value),
        }
    }
}

/// The machine-readable run summary.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub verdict: String,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        bytes.push(b'\n');
        bytes
    }
}

/// One output row: a bound, its counts, and the ratio to the prediction.
#[derive(Debug, Clone)]
pub struct OutputRow {
    pub x: Rational,
    pub count: u64,
    pub degenerate: u64,
    pub complete: bool,
    pub ratio: Option<f64>,
}

impl OutputRow {
    pub fn from_census(row: &CensusRow, ratio: Option<f64>) -> OutputRow {
        OutputRow {
            x: row.x.clone(),
            count: row.count,
            degenerate: row.degenerate_count,
            complete: row.complete,
            ratio,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("X".into(), json!(Numeric::exact_rational(&self.x)));
        m.insert("count".into(), json!(Numeric::exact(self.count)));
        m.insert("degenerate".into(), json!(Numeric::exact(self.degenerate)));
        m.insert("complete".into(), json!(self.complete));
        if let Some(r) = self.ratio {
            m.insert("ratio".into(), json!(Numeric::heuristic(r)));
        }
        Value::Object(m)
    }
}

/// `rows.csv` with the fixed header `X,count,degenerate,complete,ratio`.
pub fn rows_csv(rows: &[OutputRow]) -> String {
    let mut out = String::from("X,count,degenerate,complete,ratio\n");
    for row in rows {
        let ratio = row.ratio.map(|r| r.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.x, row.count, row.degenerate, row.complete, ratio
        ));
    }
    out
}

/// `plot.csv` with x = log log X and y = log count; rows where either
/// logarithm is undefined are skipped.
pub fn plot_csv(rows: &[OutputRow]) -> String {
    let mut out = String::from("x,y\n");
    for row in rows {
        let ln_x = ln_f64(&row.x);
        if ln_x <= 0.0 || row.count == 0 {
            continue;
        }
        out.push_str(&format!("{},{}\n", ln_x.ln(), (row.count as f64).ln()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::parse_rational;

    #[test]
    fn csv_has_fixed_columns_and_optional_ratio() {
        let rows = vec![
            OutputRow {
                x: parse_rational("100").unwrap(),
                count: 7,
                degenerate: 0,
                complete: true,
                ratio: Some(1.05),
            },
            OutputRow {
                x: parse_rational("1").unwrap(),
                count: 0,
                degenerate: 1,
                complete: false,
                ratio: None,
            },
        ];
        let csv = rows_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("X,count,degenerate,complete,ratio"));
        assert_eq!(lines.next(), Some("100,7,0,true,1.05"));
        assert_eq!(lines.next(), Some("1,0,1,false,"));

        let plot = plot_csv(&rows);
        assert_eq!(plot.lines().count(), 2);
    }

    #[test]
    fn numeric_provenance_strings() {
        assert_eq!(Numeric::exact(7u64).provenance, "exact");
        assert_eq!(Numeric::closed_form(2.0).provenance, "closed_form");
        assert!(Numeric::triangulation(3.0, 1e-9)
            .provenance
            .starts_with("triangulation±"));
        assert_eq!(Numeric::heuristic(0.1).provenance, "heuristic");
    }

    #[test]
    fn report_serialization_is_stable() {
        let report = Report {
            command: "volume".into(),
            inputs: json!({"k": 2}),
            results: json!({"c": Numeric::closed_form(24.976)}),
            verdict: "pass".into(),
            exit_code: 0,
        };
        assert_eq!(report.to_json_bytes(), report.to_json_bytes());
    }
}
