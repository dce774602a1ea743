//! Trace records and their CSV serialization.
//!
//! Per-seed files start with a schema comment line, then a header row;
//! fields are comma separated with LF line endings. The `min_external_reach`
//! column is empty for normal-form runs.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{HarnessError, Result};

pub const TRACE_SCHEMA: &str = "bnnlab-trace-v1";
pub const MEAN_SCHEMA: &str = "bnnlab-mean-v1";
pub const TRACE_HEADER: &str =
    "t,seed,nash_conv,gamma,s_mass,sigma,eta_t,floor_events,min_external_reach,stage_id";

/// One diagnostics row. `gamma` carries the combined two-player potential
/// (the reach-weighted potential for extensive-form runs).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: u64,
    pub seed: u64,
    pub nash_conv: f64,
    pub gamma: f64,
    pub s_mass: f64,
    pub sigma: f64,
    pub eta_t: f64,
    /// Cumulative count of flooring events up to `t`.
    pub floor_events: u64,
    pub min_external_reach: Option<f64>,
    pub stage_id: u64,
}

impl TraceRecord {
    pub fn is_finite(&self) -> bool {
        self.nash_conv.is_finite()
            && self.gamma.is_finite()
            && self.s_mass.is_finite()
            && self.eta_t.is_finite()
    }

    fn to_csv_row(&self) -> String {
        let reach = self
            .min_external_reach
            .map(|r| r.to_string())
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.seed,
            self.nash_conv,
            self.gamma,
            self.s_mass,
            self.sigma,
            self.eta_t,
            self.floor_events,
            reach,
            self.stage_id
        )
    }
}

pub fn write_trace_csv(path: &Path, records: &[TraceRecord]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# {TRACE_SCHEMA}\n{TRACE_HEADER}\n"));
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(line) if line == format!("# {TRACE_SCHEMA}") => {}
        other => {
            return Err(HarnessError::Config(format!(
                "{}: unexpected schema line {other:?}",
                path.display()
            )))
        }
    }
    match lines.next() {
        Some(TRACE_HEADER) => {}
        other => {
            return Err(HarnessError::Config(format!(
                "{}: unexpected header {other:?}",
                path.display()
            )))
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(HarnessError::Config(format!(
                "{}: row {} has {} fields",
                path.display(),
                i + 3,
                fields.len()
            )));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| HarnessError::Config(format!("{}: bad {what} '{s}'", path.display())))
        };
        let parse_u = |s: &str, what: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| HarnessError::Config(format!("{}: bad {what} '{s}'", path.display())))
        };
        records.push(TraceRecord {
            t: parse_u(fields[0], "t")?,
            seed: parse_u(fields[1], "seed")?,
            nash_conv: parse_f(fields[2], "nash_conv")?,
            gamma: parse_f(fields[3], "gamma")?,
            s_mass: parse_f(fields[4], "s_mass")?,
            sigma: parse_f(fields[5], "sigma")?,
            eta_t: parse_f(fields[6], "eta_t")?,
            floor_events: parse_u(fields[7], "floor_events")?,
            min_external_reach: if fields[8].is_empty() {
                None
            } else {
                Some(parse_f(fields[8], "min_external_reach")?)
            },
            stage_id: parse_u(fields[9], "stage_id")?,
        });
    }
    Ok(records)
}

/// Seed-mean and standard error of the headline metrics at each iteration.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MeanRecord {
    pub t: u64,
    pub n_seeds: usize,
    pub nash_conv_mean: f64,
    pub nash_conv_stderr: f64,
    pub gamma_mean: f64,
    pub gamma_stderr: f64,
    pub s_mass_mean: f64,
    pub s_mass_stderr: f64,
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Aligns per-seed traces on `t` (all runs share the eval grid) and
/// aggregates.
pub fn aggregate(per_seed: &[Vec<TraceRecord>]) -> Result<Vec<MeanRecord>> {
    let first = per_seed
        .first()
        .ok_or_else(|| HarnessError::Config("no traces to aggregate".into()))?;
    let len = first.len();
    for trace in per_seed {
        if trace.len() != len {
            return Err(HarnessError::Config(
                "seed traces have mismatched lengths".into(),
            ));
        }
    }
    Ok((0..len)
        .map(|i| {
            let t = first[i].t;
            let collect = |f: fn(&TraceRecord) -> f64| -> Vec<f64> {
                per_seed.iter().map(|trace| f(&trace[i])).collect()
            };
            let (ncm, ncs) = mean_stderr(&collect(|r| r.nash_conv));
            let (gm, gs) = mean_stderr(&collect(|r| r.gamma));
            let (sm, ss) = mean_stderr(&collect(|r| r.s_mass));
            MeanRecord {
                t,
                n_seeds: per_seed.len(),
                nash_conv_mean: ncm,
                nash_conv_stderr: ncs,
                gamma_mean: gm,
                gamma_stderr: gs,
                s_mass_mean: sm,
                s_mass_stderr: ss,
            }
        })
        .collect())
}

pub fn write_mean_csv(path: &Path, records: &[MeanRecord]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "# {MEAN_SCHEMA}\nt,n_seeds,nash_conv_mean,nash_conv_stderr,gamma_mean,gamma_stderr,s_mass_mean,s_mass_stderr\n"
    ));
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.t,
            r.n_seeds,
            r.nash_conv_mean,
            r.nash_conv_stderr,
            r.gamma_mean,
            r.gamma_stderr,
            r.s_mass_mean,
            r.s_mass_stderr
        ));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
