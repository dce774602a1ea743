//! Side-by-side algorithm comparison on a shared game, with per-stage
//! statistics and recovery times for nonstationary schedules.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{AlgoSpec, ExperimentConfig, GameSpec};
use crate::error::{HarnessError, Result};
use crate::runner::run_experiment;
use crate::trace::{read_trace_csv, MeanRecord};

/// One schedule stage's window in iterations, half-open.
fn stage_windows(cfg: &ExperimentConfig) -> Vec<(u64, u64)> {
    let boundaries: Vec<u64> = match &cfg.game {
        GameSpec::Rps { schedule } if !schedule.is_static() => schedule
            .stages()
            .iter()
            .scan(0u64, |acc, s| {
                *acc += s.duration;
                Some(*acc)
            })
            .collect(),
        GameSpec::Kuhn { bet } if !bet.is_static() => bet
            .stages()
            .iter()
            .scan(0u64, |acc, s| {
                *acc += s.duration;
                Some(*acc)
            })
            .collect(),
        _ => vec![cfg.iterations],
    };
    let mut windows = Vec::new();
    let mut start = 0;
    for end in boundaries {
        let end = end.min(cfg.iterations);
        if end > start {
            windows.push((start, end));
            start = end;
        }
    }
    if start < cfg.iterations {
        windows.push((start, cfg.iterations));
    }
    windows
}

#[derive(Debug, Clone, Serialize)]
pub struct StageStats {
    pub stage: usize,
    pub start_t: u64,
    pub end_t: u64,
    pub mean_nash_conv: f64,
    /// Mean over the last 20% of the stage's eval points.
    pub floor: f64,
    /// First eval iteration in this stage with seed-mean exploitability
    /// below 1.5x the previous stage's floor; absent when never recovered
    /// (or for the first stage).
    pub recovery_t: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgoComparison {
    pub algo: AlgoSpec,
    pub label: String,
    pub per_stage: Vec<StageStats>,
    pub final_stage_mean_nash_conv: f64,
}

#[derive(Debug, Serialize)]
pub struct ComparisonSummary {
    pub schema: String,
    pub base_config: ExperimentConfig,
    pub algos: Vec<AlgoComparison>,
}

/// Seed-mean exploitability series from a run directory's per-seed traces.
fn mean_series(dir: &Path, cfg: &ExperimentConfig) -> Result<Vec<(u64, f64)>> {
    let mut per_seed = Vec::new();
    for &seed in &cfg.seeds {
        let records = read_trace_csv(&dir.join(format!("seed_{seed:04}.csv")))?;
        per_seed.push(records);
    }
    let means = crate::trace::aggregate(&per_seed)?;
    Ok(means
        .iter()
        .map(|m: &MeanRecord| (m.t, m.nash_conv_mean))
        .collect())
}

pub fn stage_stats_from_series(
    series: &[(u64, f64)],
    windows: &[(u64, u64)],
) -> Vec<StageStats> {
    let mut stats: Vec<StageStats> = Vec::new();
    for (k, &(start, end)) in windows.iter().enumerate() {
        let in_stage: Vec<(u64, f64)> = series
            .iter()
            .copied()
            .filter(|&(t, _)| t >= start && (t < end || (k + 1 == windows.len() && t <= end)))
            .collect();
        let mean = if in_stage.is_empty() {
            f64::NAN
        } else {
            in_stage.iter().map(|&(_, v)| v).sum::<f64>() / in_stage.len() as f64
        };
        let tail_n = (in_stage.len() / 5).max(1);
        let floor = if in_stage.is_empty() {
            f64::NAN
        } else {
            in_stage[in_stage.len() - tail_n..]
                .iter()
                .map(|&(_, v)| v)
                .sum::<f64>()
                / tail_n as f64
        };
        let recovery_t = if k == 0 {
            None
        } else {
            let threshold = 1.5 * stats[k - 1].floor;
            in_stage
                .iter()
                .find(|&&(_, v)| v < threshold)
                .map(|&(t, _)| t)
        };
        stats.push(StageStats {
            stage: k,
            start_t: start,
            end_t: end,
            mean_nash_conv: mean,
            floor,
            recovery_t,
        });
    }
    stats
}

/// Runs each algorithm on the shared base configuration and assembles the
/// per-stage comparison.
pub fn compare(
    base: &ExperimentConfig,
    algos: &[AlgoSpec],
    out_dir: &Path,
) -> Result<ComparisonSummary> {
    if algos.is_empty() {
        return Err(HarnessError::Config("compare needs at least one algorithm".into()));
    }
    fs::create_dir_all(out_dir)?;
    let windows = stage_windows(base);
    let mut comparisons = Vec::new();
    for algo in algos {
        let label = algo.label();
        let cfg = ExperimentConfig {
            algo: algo.clone(),
            label: label.clone(),
            ..base.clone()
        };
        cfg.validate()?;
        let run_dir = out_dir.join(&label);
        run_experiment(&cfg, &run_dir)?;
        let series = mean_series(&run_dir, &cfg)?;
        let per_stage = stage_stats_from_series(&series, &windows);
        let final_stage_mean_nash_conv =
            per_stage.last().map(|s| s.mean_nash_conv).unwrap_or(f64::NAN);
        comparisons.push(AlgoComparison {
            algo: algo.clone(),
            label,
            per_stage,
            final_stage_mean_nash_conv,
        });
    }
    let summary = ComparisonSummary {
        schema: "bnnlab-comparison-v1".into(),
        base_config: base.clone(),
        algos: comparisons,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| HarnessError::Config(format!("comparison serialization: {e}")))?;
    let mut file = fs::File::create(out_dir.join("comparison.json"))?;
    file.write_all(json.as_bytes())?;
    file.write_all(b"\n")?;

    let mut csv = String::from("algo,stage,start_t,end_t,mean_nash_conv,floor,recovery_t\n");
    for algo in &summary.algos {
        for s in &algo.per_stage {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                algo.label,
                s.stage,
                s.start_t,
                s.end_t,
                s.mean_nash_conv,
                s.floor,
                s.recovery_t.map(|t| t.to_string()).unwrap_or_default()
            ));
        }
    }
    fs::File::create(out_dir.join("comparison.csv"))?.write_all(csv.as_bytes())?;
    Ok(summary)
}
