//! Seed-parallel experiment execution.
//!
//! Each seed owns one ChaCha8 stream: the initial profile (when randomized)
//! and every noise draw come from it, so reruns are byte-identical and
//! independent of the parallelism degree (results are merged in seed order
//! after the parallel section).

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use bnn_core::bnnac::{BnnacConfig, BnnacRun};
use bnn_core::dynamics::{
    bnn_from_utilities, noisy_efg_bnn_field_with, regularized_replicator_from_utilities,
    replicator_from_utilities, step_profile, step_simplex,
};
use bnn_core::efg::{self, kuhn::build_kuhn, leduc::build_leduc, BehaviorProfile, GameTree};
use bnn_core::lyapunov::{self, estimate_bias, fit_rate, LyapunovReading, RateFit};
use bnn_core::nfg::{game_at, MixedProfile, NormalFormGame};
use bnn_core::Player;

use crate::config::{AlgoSpec, ExperimentConfig, GameSpec, InitKind};
use crate::error::{HarnessError, Result};
use crate::trace::{aggregate, write_mean_csv, write_trace_csv, TraceRecord};

/// Everything one seed produces.
pub struct SeedOutcome {
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    /// Mean of the last 20% of iterates (normal form only).
    pub tail_centroid: Option<MixedProfile>,
    pub final_nash_conv: f64,
    pub floor_events: u64,
    pub min_external_reach: Option<f64>,
    /// Per-player potential averaged over the tail eval points.
    pub tail_gamma_per_player: [f64; 2],
    /// Combined potential averaged over the tail eval points.
    pub tail_gamma_mean: f64,
    pub tail_nash_conv_mean: f64,
}

fn tail_start(iterations: u64) -> u64 {
    iterations - (iterations / 5).max(1).min(iterations)
}

struct TailTally {
    start: u64,
    count: u64,
    gamma: [f64; 2],
    gamma_total: f64,
    nash_conv: f64,
}

impl TailTally {
    fn new(iterations: u64) -> Self {
        Self { start: tail_start(iterations), count: 0, gamma: [0.0; 2], gamma_total: 0.0, nash_conv: 0.0 }
    }

    fn add(&mut self, reading: &LyapunovReading) {
        if reading.t < self.start {
            return;
        }
        self.count += 1;
        self.gamma[0] += reading.gamma[0];
        self.gamma[1] += reading.gamma[1];
        self.gamma_total += reading.gamma_total;
        self.nash_conv += reading.nash_conv;
    }

    fn finish(&self) -> ([f64; 2], f64, f64) {
        let n = self.count.max(1) as f64;
        (
            [self.gamma[0] / n, self.gamma[1] / n],
            self.gamma_total / n,
            self.nash_conv / n,
        )
    }
}

fn record_from_reading(
    reading: &LyapunovReading,
    seed: u64,
    cfg: &ExperimentConfig,
    floor_events: u64,
) -> Result<TraceRecord> {
    let record = TraceRecord {
        t: reading.t,
        seed,
        nash_conv: reading.nash_conv,
        gamma: reading.gamma_total,
        s_mass: reading.s_mass[0] + reading.s_mass[1],
        sigma: cfg.sigma,
        eta_t: cfg.eta.eta(reading.t),
        floor_events,
        min_external_reach: reading.min_external_reach,
        stage_id: cfg.game.stage_id(reading.t),
    };
    if !record.is_finite() {
        return Err(HarnessError::Numeric(format!(
            "non-finite diagnostics at t={}: {:?}",
            reading.t, record
        )));
    }
    Ok(record)
}

pub fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutcome> {
    match (&cfg.game, &cfg.algo) {
        (GameSpec::Rps { schedule }, algo) => run_seed_nfg(cfg, schedule, algo, seed),
        (_, AlgoSpec::Bnnac { .. }) => run_seed_bnnac(cfg, seed),
        (_, AlgoSpec::Bnn) => run_seed_efg_bnn(cfg, seed),
        (_, other) => Err(HarnessError::Config(format!(
            "algorithm {other:?} runs on normal-form games only"
        ))),
    }
}

/// Instantaneous-game cache for the rps family: rebuilds only when the
/// scheduled parameters actually change.
struct NfgSource<'a> {
    schedule: &'a bnn_core::schedule::ParamSchedule<bnn_core::nfg::RpsParams>,
    params: bnn_core::nfg::RpsParams,
    game: NormalFormGame,
}

impl<'a> NfgSource<'a> {
    fn new(schedule: &'a bnn_core::schedule::ParamSchedule<bnn_core::nfg::RpsParams>) -> Self {
        let params = schedule.at::<f64>(0);
        Self { schedule, params, game: game_at(schedule, 0) }
    }

    fn at(&mut self, t: u64) -> &NormalFormGame {
        if !self.schedule.is_static() {
            let params = self.schedule.at::<f64>(t);
            if params != self.params {
                self.game = bnn_core::nfg::build_rps(params);
                self.params = params;
            }
        }
        &self.game
    }
}

fn run_seed_nfg(
    cfg: &ExperimentConfig,
    schedule: &bnn_core::schedule::ParamSchedule<bnn_core::nfg::RpsParams>,
    algo: &AlgoSpec,
    seed: u64,
) -> Result<SeedOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut source = NfgSource::new(schedule);
    let g0 = source.at(0);
    let (n1, n2) = (g0.num_actions(Player::One), g0.num_actions(Player::Two));
    let mut profile = match cfg.init {
        InitKind::Random => MixedProfile::random(n1, n2, 1e-6, &mut rng),
        InitKind::Uniform => MixedProfile::uniform(n1, n2),
    };
    let mut reference = profile.clone();
    let noise = cfg.noise();
    let mut records = Vec::new();
    let mut floor_events = 0u64;
    let mut tally = TailTally::new(cfg.iterations);
    let centroid_start = tail_start(cfg.iterations);
    let mut centroid_sum = MixedProfile::uniform(n1, n2);
    for player in Player::BOTH {
        for p in centroid_sum.strategy_mut(player) {
            *p = 0.0;
        }
    }
    let mut centroid_count = 0u64;

    for t in 0..=cfg.iterations {
        let game = source.at(t);
        if t % cfg.eval_interval == 0 || t == cfg.iterations {
            let reading = lyapunov::read_nfg(game, &profile, t)?;
            records.push(record_from_reading(&reading, seed, cfg, floor_events)?);
            tally.add(&reading);
        }
        if t >= centroid_start {
            centroid_count += 1;
            for player in Player::BOTH {
                let acc = centroid_sum.strategy_mut(player);
                for (a, &p) in acc.iter_mut().zip(profile.strategy(player).iter()) {
                    *a += p;
                }
            }
        }
        if t == cfg.iterations {
            break;
        }
        if let AlgoSpec::RegRd { k_ref, .. } = algo {
            if t > 0 && t % k_ref == 0 {
                reference = profile.clone();
            }
        }
        let mut directions: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for player in Player::BOTH {
            let utilities = game.action_payoffs(&profile, player)?;
            let draws = noise.sample_vec(utilities.len(), &mut rng);
            let noisy: Vec<f64> = utilities
                .iter()
                .zip(draws.iter())
                .map(|(&u, &e)| u + e)
                .collect();
            let pi = profile.strategy(player);
            directions[player.index()] = match algo {
                AlgoSpec::Bnn => bnn_from_utilities(pi, &noisy),
                AlgoSpec::Replicator => replicator_from_utilities(pi, &noisy),
                AlgoSpec::RegRd { lambda, .. } => regularized_replicator_from_utilities(
                    pi,
                    reference.strategy(player),
                    *lambda,
                    &noisy,
                )?,
                AlgoSpec::Bnnac { .. } => unreachable!("dispatched earlier"),
            };
        }
        floor_events +=
            step_profile(&mut profile, &directions, cfg.eta.eta(t), cfg.policy_floor)?;
    }

    let final_game = source.at(cfg.iterations).clone();
    let mut centroid = centroid_sum;
    for player in Player::BOTH {
        let acc = centroid.strategy_mut(player);
        for p in acc.iter_mut() {
            *p /= centroid_count as f64;
        }
    }
    let (tail_gamma_per_player, tail_gamma_mean, tail_nash_conv_mean) = tally.finish();
    Ok(SeedOutcome {
        seed,
        final_nash_conv: final_game.nash_conv(&profile)?,
        records,
        tail_centroid: Some(centroid),
        floor_events,
        min_external_reach: None,
        tail_gamma_per_player,
        tail_gamma_mean,
        tail_nash_conv_mean,
    })
}

enum TreeSource {
    Static(GameTree),
    KuhnSchedule {
        schedule: bnn_core::schedule::ParamSchedule<f64>,
        current_bet: f64,
        tree: GameTree,
    },
}

impl TreeSource {
    fn new(game: &GameSpec) -> TreeSource {
        match game {
            GameSpec::Kuhn { bet } => {
                if bet.is_static() {
                    TreeSource::Static(build_kuhn(bet.at::<f64>(0)))
                } else {
                    let b = bet.at::<f64>(0);
                    TreeSource::KuhnSchedule {
                        schedule: bet.clone(),
                        current_bet: b,
                        tree: build_kuhn(b),
                    }
                }
            }
            GameSpec::Leduc => TreeSource::Static(build_leduc()),
            GameSpec::Rps { .. } => unreachable!("extensive-form runner"),
        }
    }

    fn at(&mut self, t: u64) -> &GameTree {
        match self {
            TreeSource::Static(tree) => tree,
            TreeSource::KuhnSchedule { schedule, current_bet, tree } => {
                let bet = schedule.at::<f64>(t);
                if bet != *current_bet {
                    *tree = build_kuhn(bet);
                    *current_bet = bet;
                }
                tree
            }
        }
    }
}

fn run_seed_efg_bnn(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut source = TreeSource::new(&cfg.game);
    let mut profile = match cfg.init {
        InitKind::Random => BehaviorProfile::random(source.at(0), 1e-6, &mut rng),
        InitKind::Uniform => BehaviorProfile::uniform(source.at(0)),
    };
    let noise = cfg.noise();
    let mut records = Vec::new();
    let mut floor_events = 0u64;
    let mut min_reach = f64::INFINITY;
    let mut tally = TailTally::new(cfg.iterations);

    for t in 0..=cfg.iterations {
        let tree = source.at(t);
        if t % cfg.eval_interval == 0 || t == cfg.iterations {
            let reading = lyapunov::read_efg(tree, &profile, t)?;
            if let Some(r) = reading.min_external_reach {
                min_reach = min_reach.min(r);
            }
            records.push(record_from_reading(&reading, seed, cfg, floor_events)?);
            tally.add(&reading);
        }
        if t == cfg.iterations {
            break;
        }
        let reach = efg::compute_reach(tree, &profile)?;
        let eta = cfg.eta.eta(t);
        let mut fields: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
        for player in Player::BOTH {
            let cf = efg::compute_cf_values_with(tree, &profile, &reach, player)
                ?;
            fields[player.index()] =
                noisy_efg_bnn_field_with(tree, &profile, &cf, &reach, player, &noise, &mut rng)
                    .into_iter()
                    .map(|s| s.direction)
                    .collect();
        }
        for player in Player::BOTH {
            for (x, fx) in fields[player.index()].iter().enumerate() {
                if step_simplex(profile.policy_mut(player, x), fx, eta, cfg.policy_floor)? {
                    floor_events += 1;
                }
            }
        }
    }

    let (tail_gamma_per_player, tail_gamma_mean, tail_nash_conv_mean) = tally.finish();
    Ok(SeedOutcome {
        seed,
        final_nash_conv: records.last().map(|r| r.nash_conv).unwrap_or(f64::NAN),
        records,
        tail_centroid: None,
        floor_events,
        min_external_reach: Some(min_reach),
        tail_gamma_per_player,
        tail_gamma_mean,
        tail_nash_conv_mean,
    })
}

fn run_seed_bnnac(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutcome> {
    let AlgoSpec::Bnnac { k_actor, batch, alpha, beta } = cfg.algo else {
        unreachable!("dispatched on algo");
    };
    let mut source = TreeSource::new(&cfg.game);
    let bnnac_cfg = BnnacConfig {
        k_actor,
        batch,
        alpha,
        beta,
        eta: cfg.eta,
        policy_floor: cfg.policy_floor,
        exact_feedback: false,
    };
    let mut run = BnnacRun::new(source.at(0), bnnac_cfg, cfg.noise(), seed);
    let mut records = Vec::new();
    let mut min_reach = f64::INFINITY;
    let mut tally = TailTally::new(cfg.iterations);

    for t in 0..=cfg.iterations {
        let tree = source.at(t);
        if t % cfg.eval_interval == 0 || t == cfg.iterations {
            let profile = run.profile(tree);
            let reading = lyapunov::read_efg(tree, &profile, t)?;
            if let Some(r) = reading.min_external_reach {
                min_reach = min_reach.min(r);
            }
            let floor_events = run.learners[0].floor_events + run.learners[1].floor_events;
            records.push(record_from_reading(&reading, seed, cfg, floor_events)?);
            tally.add(&reading);
        }
        if t == cfg.iterations {
            break;
        }
        run.step(tree)?;
    }

    let (tail_gamma_per_player, tail_gamma_mean, tail_nash_conv_mean) = tally.finish();
    Ok(SeedOutcome {
        seed,
        final_nash_conv: records.last().map(|r| r.nash_conv).unwrap_or(f64::NAN),
        records,
        tail_centroid: None,
        floor_events: run.learners[0].floor_events + run.learners[1].floor_events,
        min_external_reach: Some(min_reach),
        tail_gamma_per_player,
        tail_gamma_mean,
        tail_nash_conv_mean,
    })
}

#[derive(Debug, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_nash_conv: f64,
    pub floor_events: u64,
    pub min_external_reach: Option<f64>,
    pub tail_gamma: f64,
    pub tail_gamma_per_player: [f64; 2],
    pub tail_nash_conv: f64,
}

#[derive(Debug, Serialize)]
pub struct TailStats {
    pub window_start_t: u64,
    pub gamma_mean: f64,
    pub gamma_stderr: f64,
    pub nash_conv_mean: f64,
    pub nash_conv_stderr: f64,
    pub gamma_per_player_mean: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct CentroidSummary {
    pub gamma_total_mean: f64,
    pub gamma_per_player_mean: [f64; 2],
    pub all_stationary: bool,
    pub per_seed_gamma: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct BiasSummary {
    pub sigma: f64,
    pub n_samples: usize,
    pub player: u8,
    pub beta: Vec<f64>,
    pub beta_se: Vec<f64>,
    pub delta: Vec<f64>,
    pub delta_se: Vec<f64>,
    pub identity_residual: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct DriftSummary {
    pub c3: f64,
    pub conforming_fraction: f64,
    pub warning_few_seeds: bool,
}

#[derive(Debug, Serialize)]
pub struct ExperimentSummary {
    pub schema: String,
    pub config: ExperimentConfig,
    /// Signed-transfer payoffs in play (negative scheduled bet size).
    pub negative_bet_size: bool,
    pub per_seed: Vec<SeedSummary>,
    pub rate_fit: Option<RateFit>,
    pub tail: TailStats,
    pub centroid: Option<CentroidSummary>,
    pub bias: Option<Vec<BiasSummary>>,
    pub drift: Option<DriftSummary>,
    pub total_floor_events: u64,
    pub min_external_reach: Option<f64>,
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

/// Runs every seed (in parallel, capped by `BNNLAB_THREADS`), writes one CSV
/// per seed plus the seed-mean CSV and the JSON summary, and returns the
/// summary.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentSummary> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;

    let outcomes = run_all_seeds(cfg)?;

    for outcome in &outcomes {
        let path = out_dir.join(format!("seed_{:04}.csv", outcome.seed));
        write_trace_csv(&path, &outcome.records)?;
    }
    let per_seed_records: Vec<Vec<TraceRecord>> =
        outcomes.iter().map(|o| o.records.clone()).collect();
    let means = aggregate(&per_seed_records)?;
    write_mean_csv(&out_dir.join("mean.csv"), &means)?;

    let summary = summarize(cfg, &outcomes)?;
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| HarnessError::Config(format!("summary serialization: {e}")))?;
    let mut file = fs::File::create(out_dir.join("summary.json"))?;
    file.write_all(json.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(summary)
}

/// Seed-parallel execution with an ordered merge.
pub fn run_all_seeds(cfg: &ExperimentConfig) -> Result<Vec<SeedOutcome>> {
    let threads = std::env::var("BNNLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    let work = || -> Result<Vec<SeedOutcome>> {
        cfg.seeds
            .par_iter()
            .map(|&seed| run_seed(cfg, seed))
            .collect()
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

pub fn summarize(cfg: &ExperimentConfig, outcomes: &[SeedOutcome]) -> Result<ExperimentSummary> {
    let per_seed: Vec<SeedSummary> = outcomes
        .iter()
        .map(|o| SeedSummary {
            seed: o.seed,
            final_nash_conv: o.final_nash_conv,
            floor_events: o.floor_events,
            min_external_reach: o.min_external_reach,
            tail_gamma: o.tail_gamma_mean,
            tail_gamma_per_player: o.tail_gamma_per_player,
            tail_nash_conv: o.tail_nash_conv_mean,
        })
        .collect();

    // rate fit on the seed-mean combined potential
    let per_seed_records: Vec<&Vec<TraceRecord>> = outcomes.iter().map(|o| &o.records).collect();
    let len = per_seed_records.iter().map(|r| r.len()).min().unwrap_or(0);
    let mean_gamma: Vec<(u64, f64)> = (0..len)
        .map(|i| {
            let t = per_seed_records[0][i].t;
            let g = per_seed_records.iter().map(|r| r[i].gamma).sum::<f64>()
                / per_seed_records.len() as f64;
            (t, g)
        })
        .collect();
    let rate_fit = fit_rate(&mean_gamma, None).ok();

    let (gamma_mean, gamma_stderr) =
        mean_stderr(&outcomes.iter().map(|o| o.tail_gamma_mean).collect::<Vec<_>>());
    let (nc_mean, nc_stderr) =
        mean_stderr(&outcomes.iter().map(|o| o.tail_nash_conv_mean).collect::<Vec<_>>());
    let gamma_per_player_mean = [0, 1].map(|p| {
        outcomes.iter().map(|o| o.tail_gamma_per_player[p]).sum::<f64>() / outcomes.len() as f64
    });
    let tail = TailStats {
        window_start_t: tail_start(cfg.iterations),
        gamma_mean,
        gamma_stderr,
        nash_conv_mean: nc_mean,
        nash_conv_stderr: nc_stderr,
        gamma_per_player_mean,
    };

    // centroid shift against the final instantaneous game (normal form);
    // the centroid itself is the exact mean of the tail iterates, and the
    // stationarity flag fits the tail of the recorded potential series
    let centroid = if let GameSpec::Rps { schedule } = &cfg.game {
        let final_game = game_at(schedule, cfg.iterations);
        let window = tail_start(cfg.iterations);
        let mut per_seed_gamma = Vec::new();
        let mut per_player = [0.0f64; 2];
        let mut all_stationary = true;
        for outcome in outcomes {
            let c = outcome
                .tail_centroid
                .as_ref()
                .expect("normal-form runs collect centroids");
            let mut gamma = [0.0f64; 2];
            for player in Player::BOTH {
                gamma[player.index()] = lyapunov::gamma_nfg(&final_game, c, player)?;
            }
            per_seed_gamma.push(gamma[0] + gamma[1]);
            per_player[0] += gamma[0];
            per_player[1] += gamma[1];
            let tail_series: Vec<(u64, f64)> = outcome
                .records
                .iter()
                .filter(|r| r.t >= window)
                .map(|r| (r.t, r.gamma))
                .collect();
            all_stationary &= match fit_rate(&tail_series, Some((window.max(1), cfg.iterations)))
            {
                Ok(fit) => fit.slope.abs() < 0.25,
                Err(_) => false,
            };
        }
        let n = outcomes.len() as f64;
        Some(CentroidSummary {
            gamma_total_mean: per_seed_gamma.iter().sum::<f64>() / n,
            gamma_per_player_mean: [per_player[0] / n, per_player[1] / n],
            all_stationary,
            per_seed_gamma,
        })
    } else {
        None
    };

    // bias probe at the mean tail centroid
    let bias = if cfg.bias_probe && !cfg.game.is_extensive() {
        let GameSpec::Rps { schedule } = &cfg.game else { unreachable!() };
        let final_game = game_at(schedule, cfg.iterations);
        let centroids: Vec<MixedProfile> = outcomes
            .iter()
            .filter_map(|o| o.tail_centroid.clone())
            .collect();
        let probe_profile = lyapunov::mean_profile(&centroids)?;
        let mut tables = Vec::new();
        for player in Player::BOTH {
            let mut rng = ChaCha8Rng::seed_from_u64(0xB1A5 ^ player.index() as u64);
            let est = estimate_bias(
                &final_game,
                &probe_profile,
                player,
                &cfg.noise(),
                100_000,
                &mut rng,
            )
            ?;
            tables.push(BiasSummary {
                sigma: est.sigma,
                n_samples: est.n_samples,
                player: player.index() as u8 + 1,
                beta: est.beta,
                beta_se: est.beta_se,
                delta: est.delta,
                delta_se: est.delta_se,
                identity_residual: est.residual,
            });
        }
        Some(tables)
    } else {
        None
    };

    // drift check needs per-iteration traces
    let drift = if cfg.eval_interval == 1 {
        let gammas: Vec<Vec<f64>> = outcomes
            .iter()
            .map(|o| o.records.iter().map(|r| r.gamma).collect())
            .collect();
        let etas: Vec<f64> = (0..cfg.iterations).map(|t| cfg.eta.eta(t)).collect();
        let num_actions = match &cfg.game {
            GameSpec::Rps { schedule } => {
                if schedule.at::<f64>(0).with_fourth_action {
                    4
                } else {
                    3
                }
            }
            _ => 2,
        };
        lyapunov::drift_check(&gammas, &etas, cfg.sigma, num_actions)
            .ok()
            .map(|report| DriftSummary {
                c3: report.c3,
                conforming_fraction: report.conforming_fraction,
                warning_few_seeds: report.warning_few_seeds,
            })
    } else {
        None
    };

    Ok(ExperimentSummary {
        schema: "bnnlab-summary-v1".into(),
        config: cfg.clone(),
        negative_bet_size: cfg.game.has_negative_bet(),
        per_seed,
        rate_fit,
        tail,
        centroid,
        bias,
        drift,
        total_floor_events: outcomes.iter().map(|o| o.floor_events).sum(),
        min_external_reach: outcomes
            .iter()
            .filter_map(|o| o.min_external_reach)
            .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.min(r)))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;

    fn small_config(over: RawConfig) -> ExperimentConfig {
        RawConfig {
            game: Some("brps".into()),
            algo: Some("bnn".into()),
            iters: Some(200),
            eval_interval: Some(10),
            seeds: Some("0..2".into()),
            ..RawConfig::default()
        }
        .overlay(over)
        .resolve()
        .unwrap()
    }

    #[test]
    fn nfg_run_produces_trace_grid() {
        let cfg = small_config(RawConfig::default());
        let outcome = run_seed(&cfg, 0).unwrap();
        // evals at 0, 10, ..., 200 inclusive
        assert_eq!(outcome.records.len(), 21);
        assert_eq!(outcome.records.last().unwrap().t, 200);
        assert!(outcome.tail_centroid.is_some());
        assert!(outcome.records.iter().all(|r| r.is_finite()));
    }

    #[test]
    fn deterministic_across_runs_and_seeds_differ() {
        let cfg = small_config(RawConfig { sigma: Some(0.1), ..RawConfig::default() });
        let a = run_seed(&cfg, 1).unwrap();
        let b = run_seed(&cfg, 1).unwrap();
        assert_eq!(a.records, b.records);
        let c = run_seed(&cfg, 2).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn efg_run_has_reach_column() {
        let cfg = small_config(RawConfig {
            game: Some("kuhn".into()),
            eval_interval: Some(50),
            iters: Some(100),
            ..RawConfig::default()
        });
        let outcome = run_seed(&cfg, 0).unwrap();
        assert!(outcome.records.iter().all(|r| r.min_external_reach.is_some()));
        assert!(outcome.min_external_reach.unwrap() > 0.0);
    }

    #[test]
    fn bnnac_runs_on_kuhn() {
        let cfg = small_config(RawConfig {
            game: Some("kuhn".into()),
            algo: Some("bnnac:k=5,batch=4".into()),
            iters: Some(100),
            eval_interval: Some(25),
            ..RawConfig::default()
        });
        let outcome = run_seed(&cfg, 3).unwrap();
        assert_eq!(outcome.records.first().unwrap().t, 0);
        assert!(outcome.final_nash_conv.is_finite());
    }

    #[test]
    fn nonstationary_stage_ids_recorded() {
        let cfg = small_config(RawConfig {
            schedule: Some("direct:(12,1,1)x50;(1,12,1)x50".into()),
            iters: Some(100),
            ..RawConfig::default()
        });
        let outcome = run_seed(&cfg, 0).unwrap();
        assert_eq!(outcome.records.first().unwrap().stage_id, 0);
        assert_eq!(outcome.records.last().unwrap().stage_id, 1);
    }

    #[test]
    fn experiment_writes_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(RawConfig::default());
        let summary = run_experiment(&cfg, dir.path()).unwrap();
        assert!(dir.path().join("seed_0000.csv").exists());
        assert!(dir.path().join("seed_0002.csv").exists());
        assert!(dir.path().join("mean.csv").exists());
        assert!(dir.path().join("summary.json").exists());
        assert_eq!(summary.per_seed.len(), 3);
        // the resolved config is embedded for provenance
        let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
        assert!(text.contains("\"iterations\": 200"));
    }

    #[test]
    fn byte_identical_reruns_and_parallelism_independence() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let cfg = small_config(RawConfig { sigma: Some(0.2), ..RawConfig::default() });
        run_experiment(&cfg, dir_a.path()).unwrap();
        std::env::set_var("BNNLAB_THREADS", "1");
        run_experiment(&cfg, dir_b.path()).unwrap();
        std::env::remove_var("BNNLAB_THREADS");
        for name in ["seed_0000.csv", "seed_0001.csv", "seed_0002.csv", "mean.csv", "summary.json"]
        {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "file {name} differs across parallelism");
        }
    }
}
