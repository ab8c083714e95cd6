use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Outcome of a single trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Every asserted bound held and no error occurred.
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Distance to the nearest asserted bound; negative when violated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub achieving_index: Option<i64>,
    /// Scalar columns for the per-trial CSV.
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default)]
    pub payload: serde_json::Value,
}

impl TrialRecord {
    pub(crate) fn new(trial: u64) -> Self {
        TrialRecord {
            trial,
            ok: true,
            error: None,
            slack: None,
            achieving_index: None,
            metrics: BTreeMap::new(),
            payload: serde_json::Value::Null,
        }
    }

    pub(crate) fn failed(trial: u64, err: &Error) -> Self {
        TrialRecord { ok: false, error: Some(err.to_string()), ..Self::new(trial) }
    }

    pub(crate) fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    /// Records `bound − value`, failing the trial when negative.
    pub(crate) fn assert_le(&mut self, value: f64, bound: f64) -> &mut Self {
        let s = bound - value;
        if !(s >= 0.0) {
            self.ok = false;
        }
        self.slack = Some(self.slack.map_or(s, |old| old.min(s)));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub errors: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_trial: Option<u64>,
    /// Achieving index per trial, where the experiment has one.
    #[serde(default)]
    pub achieving_indices: BTreeMap<u64, i64>,
}

impl Aggregate {
    pub(crate) fn of(records: &[TrialRecord]) -> Self {
        let mut a = Aggregate {
            trials: records.len() as u64,
            passed: 0,
            failed: 0,
            errors: 0,
            worst_slack: None,
            worst_trial: None,
            achieving_indices: BTreeMap::new(),
        };
        for r in records {
            match (r.ok, &r.error) {
                (_, Some(_)) => a.errors += 1,
                (true, None) => a.passed += 1,
                (false, None) => a.failed += 1,
            }
            if let Some(s) = r.slack {
                if a.worst_slack.is_none_or(|w| s < w) {
                    a.worst_slack = Some(s);
                    a.worst_trial = Some(r.trial);
                }
            }
            if let Some(i) = r.achieving_index {
                a.achieving_indices.insert(r.trial, i);
            }
        }
        a
    }
}

/// A table for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub(crate) fn new(columns: &[&str]) -> Self {
        Series { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    #[serde(default)]
    pub series: BTreeMap<String, Series>,
    /// Seconds; only present when timing was requested, since it breaks
    /// byte-for-byte reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// Name of the built-in per-trial series.
pub const TRIALS_SERIES: &str = "trials";

impl RunReport {
    pub fn all_ok(&self) -> bool {
        self.aggregate.failed == 0 && self.aggregate.errors == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_ok() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn series_names(&self) -> Vec<String> {
        std::iter::once(TRIALS_SERIES.to_string()).chain(self.series.keys().cloned()).collect()
    }

    /// One row per trial: index, pass flag, slack, then every metric.
    pub fn trials_table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut keys: Vec<&String> = self.records.iter().flat_map(|r| r.metrics.keys()).collect();
        keys.sort();
        keys.dedup();
        let mut header = vec!["trial".to_string(), "ok".into(), "slack".into()];
        header.extend(keys.iter().map(|k| k.to_string()));
        let rows = self
            .records
            .iter()
            .map(|r| {
                let mut row = vec![r.trial.to_string(), u8::from(r.ok).to_string(), opt(r.slack)];
                row.extend(keys.iter().map(|k| opt(r.metrics.get(*k).copied())));
                row
            })
            .collect();
        (header, rows)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV text for one series of a report.
pub fn emit_plot_data(report: &RunReport, series: &str) -> Result<String> {
    let (header, rows) = if series == TRIALS_SERIES {
        report.trials_table()
    } else {
        let s = report.series.get(series).ok_or_else(|| {
            Error::NotFound(format!("series `{series}`; available: {}", report.series_names().join(", ")))
        })?;
        (s.columns.clone(), s.rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
