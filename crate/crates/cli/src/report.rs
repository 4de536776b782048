//! Run reports: `report.json` and `residuals.csv`.

use std::io::{Read, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;
use crate::spec::ScenarioSpec;

pub const CSV_HEADER: [&str; 4] = [
    "epsilon",
    "cocycle_defect",
    "transgression_residual",
    "conjugation_error",
];

/// JSON has no NaN; unmeasured entries are written as `null`.
mod nan_as_null {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Option<f64>> = v.iter().map(|x| x.is_finite().then_some(*x)).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let opt: Vec<Option<f64>> = Vec::deserialize(d)?;
        Ok(opt.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
    }
}

mod opt_nan_as_null {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        let opt: Option<Vec<Option<f64>>> = v
            .as_ref()
            .map(|v| v.iter().map(|x| x.is_finite().then_some(*x)).collect());
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        let opt: Option<Vec<Option<f64>>> = Option::deserialize(d)?;
        Ok(opt.map(|v| v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario_id: String,
    pub kind: String,
    pub verdict: String,
    pub expected_verdict: String,
    pub epsilon: Vec<f64>,
    #[serde(with = "nan_as_null")]
    pub cocycle_defect: Vec<f64>,
    #[serde(with = "nan_as_null")]
    pub transgression_residual: Vec<f64>,
    #[serde(with = "nan_as_null")]
    pub conjugation_error: Vec<f64>,
    /// Log coordinates of `g_ε`, `null` where unavailable.
    pub g_path: Vec<Option<Vec<f64>>>,
    pub certified_prefix: usize,
    pub failing_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_nan_as_null")]
    pub preimage_residual: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_nan_as_null")]
    pub condition_number: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_nan_as_null")]
    pub complement_residual: Option<Vec<f64>>,
    /// Seconds.
    pub wall_time: f64,
    pub config: ScenarioSpec,
    pub version: String,
}

impl RunReport {
    pub fn verdict_matches(&self) -> bool {
        self.verdict == self.expected_verdict
    }

    pub fn write_json(&self, w: impl Write) -> Result<(), CliError> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read_json(r: impl Read) -> Result<Self, CliError> {
        Ok(serde_json::from_reader(r)?)
    }

    /// Shortest round-trip decimal per value; NaN where not measured.
    pub fn write_csv(&self, w: impl Write) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for i in 0..self.epsilon.len() {
            out.write_record([
                self.epsilon[i].to_string(),
                self.cocycle_defect[i].to_string(),
                self.transgression_residual[i].to_string(),
                self.conjugation_error[i].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Columns of a residual CSV, in header order.
pub fn read_csv(r: impl Read) -> Result<[Vec<f64>; 4], CliError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CliError::Spec(format!("unexpected CSV header {header:?}")));
    }
    let mut cols: [Vec<f64>; 4] = Default::default();
    for rec in rdr.records() {
        let rec = rec?;
        for (j, field) in rec.iter().enumerate() {
            let v = field
                .parse::<f64>()
                .map_err(|e| CliError::Spec(format!("bad CSV number {field:?}: {e}")))?;
            cols[j].push(v);
        }
    }
    Ok(cols)
}
