//! The seven-experiment benchmark preset, one subdirectory per figure:
//!
//! 1. stationary BRPS / BRPS-W, noiseless, BNN vs regularized replicator
//! 2. nonstationary BRPS (direct and continuous), noiseless comparison
//! 3. nonstationary BRPS under three noise levels
//! 4. stationary Leduc poker with and without noise
//! 5. stationary Kuhn poker with and without noise, tabular and actor-critic
//! 6. nonstationary Kuhn poker, continuous bet-size drift, noisy
//! 7. nonstationary Kuhn poker, direct bet-size shifts, noisy
//!
//! Budgets are desk scale: stage lengths follow the 2500-step convention
//! and seed counts are kept small enough for a laptop run.

use std::path::Path;

use crate::compare::compare;
use crate::config::{parse_algo, ExperimentConfig, RawConfig};
use crate::error::{HarnessError, Result};
use crate::runner::run_experiment;

fn base(game: &str, iters: u64, seeds: &str) -> RawConfig {
    RawConfig {
        game: Some(game.into()),
        iters: Some(iters),
        seeds: Some(seeds.into()),
        ..RawConfig::default()
    }
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig> {
    raw.resolve()
}

const CASE1: &str = "direct:(12,1,1)x2500;(6.5,6.5,1)x2500;(1,12,1)x2500";
const CASE2: &str = "continuous:(12,1,1)x2500;(6.5,6.5,1)x2500;(1,12,1)x2500";
const KUHN_DIRECT: &str = "direct:1x2500;2x2500;-2x2500;6x2500";
const KUHN_CONTINUOUS: &str = "continuous:1x2500;2x2500;-2x2500;6x2500;1x2500";

/// Runs the full preset under `out`; returns the figure directories.
pub fn run_figures_preset(preset: &str, out: &Path) -> Result<Vec<String>> {
    if preset != "appendix" {
        return Err(HarnessError::Config(format!(
            "unknown preset '{preset}' (available: appendix)"
        )));
    }
    let baseline = parse_algo("reg-rd:lambda=0.1,k_ref=500")?;
    let bnn = parse_algo("bnn")?;
    let mut done = Vec::new();

    // fig1: stationary BRPS and BRPS-W, no noise
    for game in ["brps", "brps_w"] {
        let cfg = resolve(base(game, 10_000, "0..9"))?;
        compare(&cfg, &[bnn.clone(), baseline.clone()], &out.join("fig1").join(game))?;
    }
    done.push("fig1".into());

    // fig2: nonstationary BRPS, direct and continuous, no noise
    for (name, schedule) in [("case1", CASE1), ("case2", CASE2)] {
        let cfg = resolve(RawConfig {
            schedule: Some(schedule.into()),
            ..base("brps", 7_500, "0..9")
        })?;
        compare(&cfg, &[bnn.clone(), baseline.clone()], &out.join("fig2").join(name))?;
    }
    done.push("fig2".into());

    // fig3: nonstationary BRPS under noise
    for sigma in [0.05, 0.1, 0.2] {
        let cfg = resolve(RawConfig {
            schedule: Some(CASE1.into()),
            sigma: Some(sigma),
            label: Some(format!("brps_nonstat_bnn_sigma{sigma}")),
            ..base("brps", 7_500, "0..9")
        })?;
        run_experiment(&cfg, &out.join("fig3").join(format!("sigma{sigma}")))?;
    }
    done.push("fig3".into());

    // fig4: stationary Leduc with and without noise
    for sigma in [0.0, 0.1] {
        let cfg = resolve(RawConfig {
            sigma: Some(sigma),
            ..base("leduc", 20_000, "0..4")
        })?;
        run_experiment(&cfg, &out.join("fig4").join(format!("sigma{sigma}")))?;
    }
    done.push("fig4".into());

    // fig5: stationary Kuhn, tabular field and actor-critic
    for sigma in [0.0, 0.1] {
        let cfg = resolve(RawConfig {
            sigma: Some(sigma),
            ..base("kuhn", 50_000, "0..4")
        })?;
        run_experiment(&cfg, &out.join("fig5").join(format!("bnn_sigma{sigma}")))?;
        let cfg = resolve(RawConfig {
            algo: Some("bnnac".into()),
            sigma: Some(sigma),
            ..base("kuhn", 20_000, "0..4")
        })?;
        run_experiment(&cfg, &out.join("fig5").join(format!("bnnac_sigma{sigma}")))?;
    }
    done.push("fig5".into());

    // fig6: nonstationary Kuhn, continuous bet drift, noisy
    let cfg = resolve(RawConfig {
        bet_schedule: Some(KUHN_CONTINUOUS.into()),
        sigma: Some(0.1),
        ..base("kuhn", 12_500, "0..4")
    })?;
    run_experiment(&cfg, &out.join("fig6"))?;
    done.push("fig6".into());

    // fig7: nonstationary Kuhn, direct bet shifts, noisy
    let cfg = resolve(RawConfig {
        bet_schedule: Some(KUHN_DIRECT.into()),
        sigma: Some(0.1),
        ..base("kuhn", 10_000, "0..4")
    })?;
    run_experiment(&cfg, &out.join("fig7"))?;
    done.push("fig7".into());

    Ok(done)
}
