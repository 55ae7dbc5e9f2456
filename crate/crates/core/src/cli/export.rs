//! CSV and JSON encodings of a [`ScenarioReport`], and decoders for both.
//!
//! CSV: header `t,arm,sigma1,sigma2,sigma3`, then one row per (time, arm)
//! with time as the outer loop. JSON: one object with `arms` keyed by name,
//! each holding parallel `times` and `points` arrays.
//!
//! Floats are rounded to `precision` significant digits and then written in
//! shortest round-trip form, so output is identical across platforms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::nonlinear::Trajectory;
use crate::scenarios::{Arm, BoundKind, ScenarioId, ScenarioReport};
use crate::states::BlochVector;

pub const CSV_HEADER: &str = "t,arm,sigma1,sigma2,sigma3";

pub const MIN_PRECISION: usize = 6;
pub const MAX_PRECISION: usize = 17;
pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("empty input")]
    Empty,
    #[error("line 1: expected header '{CSV_HEADER}', found '{0}'")]
    BadHeader(String),
    #[error("line {line}: expected 5 fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: field '{field}' is not a finite number: '{value}'")]
    BadNumber {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: empty arm name")]
    EmptyArm { line: usize },
    #[error("arm '{arm}': {reason}")]
    BadTrajectory { arm: String, reason: String },
    #[error("invalid JSON report: {0}")]
    Json(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
}

/// Rounds to `precision` significant digits (clamped to 6..=17).
pub fn round_to_precision(x: f64, precision: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let digits = precision.clamp(MIN_PRECISION, MAX_PRECISION);
    format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest round-trip text of `x` rounded to `precision` significant digits.
pub fn format_float(x: f64, precision: usize) -> String {
    format!("{:?}", round_to_precision(x, precision))
}

pub fn to_csv(arms: &[Arm], precision: usize) -> String {
    let mut out = String::with_capacity(64 * arms.iter().map(|a| a.trajectory.len()).sum::<usize>());
    out.push_str(CSV_HEADER);
    out.push('\n');
    let Some(first) = arms.first() else {
        return out;
    };
    for (i, &t) in first.trajectory.times().iter().enumerate() {
        for arm in arms {
            let b = arm.trajectory.points()[i];
            let fields = [
                format_float(t, precision),
                arm.name.clone(),
                format_float(b.s1, precision),
                format_float(b.s2, precision),
                format_float(b.s3, precision),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    out
}

fn parse_field(line: usize, field: &'static str, raw: &str) -> Result<f64, DecodeError> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DecodeError::BadNumber {
            line,
            field,
            value: raw.to_string(),
        }),
    }
}

/// Decodes CSV trajectories; arms are returned in order of first appearance.
pub fn parse_csv(text: &str) -> Result<Vec<Arm>, DecodeError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(DecodeError::Empty)?;
    if header.trim_end_matches('\r') != CSV_HEADER {
        return Err(DecodeError::BadHeader(header.to_string()));
    }
    let mut order: Vec<String> = Vec::new();
    let mut data: BTreeMap<String, (Vec<f64>, Vec<BlochVector>)> = BTreeMap::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(DecodeError::FieldCount {
                line,
                found: fields.len(),
            });
        }
        let t = parse_field(line, "t", fields[0])?;
        let name = fields[1].trim();
        if name.is_empty() {
            return Err(DecodeError::EmptyArm { line });
        }
        let b = BlochVector::new(
            parse_field(line, "sigma1", fields[2])?,
            parse_field(line, "sigma2", fields[3])?,
            parse_field(line, "sigma3", fields[4])?,
        );
        let entry = data.entry(name.to_string()).or_insert_with(|| {
            order.push(name.to_string());
            (Vec::new(), Vec::new())
        });
        entry.0.push(t);
        entry.1.push(b);
    }
    order
        .into_iter()
        .map(|name| {
            let (times, points) = data.remove(&name).expect("recorded arm");
            let trajectory =
                Trajectory::new(times, points).map_err(|e| DecodeError::BadTrajectory {
                    arm: name.clone(),
                    reason: e.to_string(),
                })?;
            Ok(Arm { name, trajectory })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmDocument {
    pub times: Vec<f64>,
    pub points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractDocument {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub kind: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub p: f64,
    pub epsilon: f64,
    pub t_max: f64,
    pub dt: f64,
    pub basis: String,
    pub seed: u64,
    pub trials: usize,
}

/// The JSON report layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub scenario: String,
    pub config: ConfigDocument,
    pub arms: BTreeMap<String, ArmDocument>,
    pub divergence: f64,
    pub contracts: Vec<ContractDocument>,
    pub narrative: Map<String, Value>,
}

impl ReportDocument {
    pub fn scenario_id(&self) -> Result<ScenarioId, DecodeError> {
        self.scenario
            .parse()
            .map_err(|_| DecodeError::UnknownScenario(self.scenario.clone()))
    }

    /// Arms as validated trajectories.
    pub fn trajectories(&self) -> Result<Vec<Arm>, DecodeError> {
        self.arms
            .iter()
            .map(|(name, doc)| {
                let points = doc
                    .points
                    .iter()
                    .map(|p| BlochVector::new(p[0], p[1], p[2]))
                    .collect();
                let trajectory = Trajectory::new(doc.times.clone(), points).map_err(|e| {
                    DecodeError::BadTrajectory {
                        arm: name.clone(),
                        reason: e.to_string(),
                    }
                })?;
                Ok(Arm {
                    name: name.clone(),
                    trajectory,
                })
            })
            .collect()
    }
}

fn round_value(v: Value, precision: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(round_to_precision(x, precision))
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(|x| round_value(x, precision)).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, x)| (k, round_value(x, precision)))
                .collect(),
        ),
        other => other,
    }
}

pub fn to_document(report: &ScenarioReport, precision: usize) -> ReportDocument {
    let r = |x: f64| round_to_precision(x, precision);
    let arms = report
        .arms
        .iter()
        .map(|a| {
            (
                a.name.clone(),
                ArmDocument {
                    times: a.trajectory.times().iter().map(|&t| r(t)).collect(),
                    points: a
                        .trajectory
                        .points()
                        .iter()
                        .map(|b| [r(b.s1), r(b.s2), r(b.s3)])
                        .collect(),
                },
            )
        })
        .collect();
    let contracts = report
        .contracts
        .iter()
        .map(|c| ContractDocument {
            name: c.name.clone(),
            observed: r(c.observed),
            bound: r(c.bound),
            kind: match c.kind {
                BoundKind::AtMost => "at_most".into(),
                BoundKind::Exceeds => "exceeds".into(),
            },
            holds: c.holds(),
        })
        .collect();
    let cfg = &report.config;
    let narrative = report
        .narrative
        .iter()
        .map(|(k, v)| (k.clone(), round_value(v.clone(), precision)))
        .collect();
    ReportDocument {
        scenario: report.scenario.name().to_string(),
        config: ConfigDocument {
            p: cfg.p,
            epsilon: cfg.epsilon,
            t_max: cfg.t_max,
            dt: cfg.dt,
            basis: cfg.basis_choice.name().to_string(),
            seed: cfg.seed,
            trials: cfg.trials,
        },
        arms,
        divergence: r(report.divergence),
        contracts,
        narrative,
    }
}

pub fn to_json(report: &ScenarioReport, precision: usize) -> String {
    let mut s = serde_json::to_string_pretty(&to_document(report, precision))
        .expect("report documents always serialize");
    s.push('\n');
    s
}

/// Decodes and validates a JSON report.
pub fn parse_json(text: &str) -> Result<ReportDocument, DecodeError> {
    let doc: ReportDocument =
        serde_json::from_str(text).map_err(|e| DecodeError::Json(e.to_string()))?;
    doc.scenario_id()?;
    if !(doc.divergence.is_finite() && doc.divergence >= 0.0) {
        return Err(DecodeError::Json(format!(
            "divergence must be a nonnegative number, got {}",
            doc.divergence
        )));
    }
    doc.trajectories()?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{run, ScenarioConfig};

    fn small_report(id: ScenarioId) -> ScenarioReport {
        let cfg = ScenarioConfig {
            t_max: 1.0,
            dt: 0.1,
            trials: 5,
            ..ScenarioConfig::default()
        };
        run(id, &cfg).unwrap()
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.1, 12), "0.1");
        assert_eq!(format_float(-0.0, 12), "0.0");
        assert_eq!(format_float(1.0, 12), "1.0");
        assert_eq!(format_float(std::f64::consts::PI, 6), "3.14159");
        assert_eq!(format_float(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_float(1e-20, 12), "1e-20");
        // clamped to the supported range
        assert_eq!(format_float(std::f64::consts::PI, 2), "3.14159");
    }

    #[test]
    fn csv_layout() {
        let rep = small_report(ScenarioId::ChangedCorrelations);
        let csv = to_csv(&rep.arms, 12);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("0.0,armA,"));
        assert!(lines.next().unwrap().starts_with("0.0,armB,"));
        assert_eq!(csv.lines().count(), 1 + 2 * 11);
    }

    #[test]
    fn csv_round_trip() {
        let rep = small_report(ScenarioId::Entanglement);
        let parsed = parse_csv(&to_csv(&rep.arms, 17)).unwrap();
        assert_eq!(parsed, rep.arms);
        let coarse = parse_csv(&to_csv(&rep.arms, 6)).unwrap();
        for (a, b) in coarse.iter().zip(&rep.arms) {
            let pairs = a.trajectory.points().iter().zip(b.trajectory.points());
            assert!(pairs.map(|(x, y)| x.max_abs_diff(*y)).all(|d| d < 1e-6));
        }
    }

    #[test]
    fn csv_errors() {
        assert_eq!(parse_csv(""), Err(DecodeError::Empty));
        assert!(matches!(parse_csv("a,b\n"), Err(DecodeError::BadHeader(_))));
        let h = CSV_HEADER;
        assert!(matches!(
            parse_csv(&format!("{h}\n0,armA,1,2\n")),
            Err(DecodeError::FieldCount { line: 2, found: 4 })
        ));
        assert!(matches!(
            parse_csv(&format!("{h}\n0,armA,1,NaN,0\n")),
            Err(DecodeError::BadNumber { field: "sigma2", .. })
        ));
        assert!(matches!(
            parse_csv(&format!("{h}\n0,,1,0,0\n")),
            Err(DecodeError::EmptyArm { line: 2 })
        ));
        assert!(matches!(
            parse_csv(&format!("{h}\n1,armA,0,0,0\n0,armA,0,0,0\n")),
            Err(DecodeError::BadTrajectory { .. })
        ));
        assert_eq!(parse_csv(&format!("{h}\n")).unwrap(), vec![]);
    }

    #[test]
    fn json_round_trip() {
        let rep = small_report(ScenarioId::NoCorrelations);
        let text = to_json(&rep, 17);
        let doc = parse_json(&text).unwrap();
        assert_eq!(doc.scenario_id().unwrap(), ScenarioId::NoCorrelations);
        assert_eq!(doc.trajectories().unwrap(), rep.arms);
        assert_eq!(doc.divergence, rep.divergence);
        assert_eq!(doc, to_document(&rep, 17));
    }

    #[test]
    fn json_errors() {
        assert!(matches!(parse_json("{"), Err(DecodeError::Json(_))));
        let rep = small_report(ScenarioId::ChangedCorrelations);
        let mut doc = to_document(&rep, 12);
        doc.scenario = "sec9".into();
        let text = serde_json::to_string(&doc).unwrap();
        assert!(matches!(parse_json(&text), Err(DecodeError::UnknownScenario(_))));
        let mut doc = to_document(&rep, 12);
        doc.arms.get_mut("armA").unwrap().points.pop();
        let text = serde_json::to_string(&doc).unwrap();
        assert!(matches!(parse_json(&text), Err(DecodeError::BadTrajectory { .. })));
    }

    #[test]
    fn linear_baseline_has_no_rows() {
        let rep = small_report(ScenarioId::LinearBaseline);
        assert_eq!(to_csv(&rep.arms, 12), format!("{CSV_HEADER}\n"));
        let doc = parse_json(&to_json(&rep, 12)).unwrap();
        assert!(doc.arms.is_empty());
        assert!(doc.narrative.contains_key("deviations"));
    }
}
