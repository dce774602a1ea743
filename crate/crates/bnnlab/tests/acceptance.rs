//! Acceptance suite: one test per criterion (sub-checks split out where a
//! criterion bundles several claims). Each prints a single PASS/FAIL line;
//! run with `--nocapture` to see them all.

use std::sync::OnceLock;

use bnn_core::bnnac::{BnnacConfig, BnnacRun};
use bnn_core::dynamics::{
    efg_bnn_field, reg_rd_fixed_point, step_simplex, NoiseModel, RegRdConfig, StepSchedule,
};
use bnn_core::efg::{self, kuhn::build_kuhn, BehaviorProfile};
use bnn_core::lyapunov::{
    dissipation_check_efg, dissipation_check_nfg, estimate_bias, gamma_s_from_advantages,
};
use bnn_core::nfg::{build_rps, MixedProfile, RpsParams};
use bnn_core::oracle::{cf_values_by_enumeration, find_equilibrium, solve_zero_sum_efg};
use bnn_core::Player;
use bnnlab::config::RawConfig;
use bnnlab::runner::{run_all_seeds, run_experiment, summarize, ExperimentSummary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{name}: {detail}");
}

fn brps() -> bnn_core::NormalFormGame {
    build_rps(RpsParams::new(12.0, 1.0, 1.0))
}

// ---------------------------------------------------------------- 1

#[test]
fn criterion_01a_dissipation_identity_brps() {
    let game = brps();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let profile = MixedProfile::random(3, 3, 1e-2, &mut rng);
        worst = worst.max(dissipation_check_nfg(&game, &profile, 1e-6).unwrap());
    }
    verdict(
        "1a dissipation identity (BRPS)",
        worst < 1e-2,
        &format!("worst relative error {worst:.3e} over 100 interior profiles, bound 1e-2"),
    );
}

#[test]
fn criterion_01b_dissipation_identity_kuhn() {
    // The global extensive-form identity carries a cross term from the
    // own-policy dependence of the counterfactual value fields; it does not
    // vanish on Kuhn (players act twice along check-bet lines), so this
    // check exceeds its tolerance at many interior profiles. The residual is
    // h-independent; the per-infoset identity is exact (see the core
    // property suite).
    let tree = build_kuhn::<f64>(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut rels: Vec<f64> = (0..100)
        .map(|_| {
            let profile = BehaviorProfile::random(&tree, 1e-2, &mut rng);
            dissipation_check_efg(&tree, &profile, 1e-6).unwrap()
        })
        .collect();
    rels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let worst = *rels.last().unwrap();
    let median = rels[rels.len() / 2];
    verdict(
        "1b dissipation identity (Kuhn)",
        worst < 5e-2,
        &format!(
            "worst relative error {worst:.3e}, median {median:.3e} over 100 interior profiles, bound 5e-2"
        ),
    );
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_02_bias_and_jensen_gap_bounds() {
    let game = brps();
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let n = 100_000;
    let mut ok = true;
    let mut detail = String::new();
    for sigma in [0.05, 0.2] {
        let noise = NoiseModel::gaussian(sigma);
        for _ in 0..20 {
            let profile = MixedProfile::random(3, 3, 1e-3, &mut rng);
            for player in Player::BOTH {
                let est = estimate_bias(&game, &profile, player, &noise, n, &mut rng).unwrap();
                for a in 0..3 {
                    if est.delta[a] < -3.0 * est.delta_se[a]
                        || est.delta[a] > sigma + 3.0 * est.delta_se[a]
                    {
                        ok = false;
                        detail = format!("delta {} outside [0, {sigma}]", est.delta[a]);
                    }
                    if est.beta[a].abs() > 2.0 * sigma + 3.0 * est.beta_se[a] {
                        ok = false;
                        detail = format!("beta {} above (|A|-1) sigma", est.beta[a]);
                    }
                }
            }
        }
    }
    // zero-advantage Jensen gap: uniform standard RPS has all advantages 0
    let rps = build_rps(RpsParams::standard());
    let uniform = MixedProfile::uniform(3, 3);
    for sigma in [0.05, 0.2] {
        let est = estimate_bias(
            &rps,
            &uniform,
            Player::One,
            &NoiseModel::gaussian(sigma),
            200_000,
            &mut rng,
        )
        .unwrap();
        let expected = sigma / (2.0 * std::f64::consts::PI).sqrt();
        for a in 0..3 {
            let rel = (est.delta[a] - expected).abs() / expected;
            if rel > 0.02 {
                ok = false;
                detail = format!("zero-advantage gap off by {:.1}%", rel * 100.0);
            }
        }
    }
    if detail.is_empty() {
        detail = "delta in [0, sigma], |beta| <= (|A|-1) sigma, zero-advantage gap within 2%".into();
    }
    verdict("2 bias and Jensen-gap bounds", ok, &detail);
}

// ------------------------------------------------------- shared runs 3/4/5

fn floor_cfg(sigma: f64) -> bnnlab::ExperimentConfig {
    RawConfig {
        game: Some("brps".into()),
        algo: Some("bnn".into()),
        eta: Some("power:c=1,t0=10".into()),
        sigma: Some(sigma),
        iters: Some(100_000),
        eval_interval: Some(10),
        seeds: Some("0..29".into()),
        ..RawConfig::default()
    }
    .resolve()
    .unwrap()
}

fn floor_summary(sigma: f64) -> &'static ExperimentSummary {
    static RUNS: OnceLock<Vec<(f64, ExperimentSummary)>> = OnceLock::new();
    let runs = RUNS.get_or_init(|| {
        [0.0, 0.05, 0.1, 0.2]
            .into_iter()
            .map(|sigma| {
                let cfg = floor_cfg(sigma);
                let outcomes = run_all_seeds(&cfg).expect("run");
                (sigma, summarize(&cfg, &outcomes).expect("summary"))
            })
            .collect()
    });
    &runs.iter().find(|(s, _)| *s == sigma).expect("known sigma").1
}

// ---------------------------------------------------------------- 3

#[test]
fn criterion_03_transient_rate() {
    let summary = floor_summary(0.0);
    let fit = summary.rate_fit.as_ref().expect("rate fit available");
    let pass = (-0.85..=-0.50).contains(&fit.slope);
    verdict(
        "3 transient rate (noiseless BNN on BRPS)",
        pass,
        &format!(
            "log-log slope {:.3} over window {:?} (target band [-0.85, -0.50], r^2 {:.4})",
            fit.slope, fit.window, fit.r_squared
        ),
    );
}

// ---------------------------------------------------------------- 4

#[test]
fn criterion_04a_noise_floor_monotone_and_bounded() {
    let tails: Vec<(f64, f64, f64, [f64; 2])> = [0.05, 0.1, 0.2]
        .into_iter()
        .map(|sigma| {
            let s = floor_summary(sigma);
            (sigma, s.tail.gamma_mean, s.tail.gamma_stderr, s.tail.gamma_per_player_mean)
        })
        .collect();
    let monotone = tails.windows(2).all(|w| w[0].1 < w[1].1);
    // per-player stability bound: (|A|-1) sqrt(|A|) sigma / 2
    let mut bounded = true;
    for &(sigma, _, se, per_player) in &tails {
        let bound = 0.5 * 2.0 * 3.0f64.sqrt() * sigma;
        for g in per_player {
            if g > bound + 3.0 * se {
                bounded = false;
            }
        }
    }
    verdict(
        "4a noise floor monotone and bounded",
        monotone && bounded,
        &format!(
            "tail gamma {:?} increasing, per-player values below (|A|-1)sqrt(|A|)sigma/2",
            tails.iter().map(|t| t.1).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_04b_noise_floor_linear_ratio() {
    // Under the pinned decreasing-step schedule the tail potential is
    // dominated by the O(sigma^2) biased-fixed-point displacement, so the
    // measured doubling ratio sits near 4 rather than in the linear band;
    // the O(sigma) bound of 4a still holds. A linear tail needs a constant
    // step size, which "same setup" rules out.
    let g1 = floor_summary(0.1).tail.gamma_mean;
    let g2 = floor_summary(0.2).tail.gamma_mean;
    let ratio = g2 / g1;
    verdict(
        "4b noise floor sigma-doubling ratio",
        (1.4..=2.8).contains(&ratio),
        &format!("tail gamma ratio 0.1->0.2 = {ratio:.2}, linear band [1.4, 2.8]"),
    );
}

// ---------------------------------------------------------------- 5

#[test]
fn criterion_05_centroid_shift_quadratic() {
    let c1 = floor_summary(0.1).centroid.as_ref().expect("nfg centroid");
    let c2 = floor_summary(0.2).centroid.as_ref().expect("nfg centroid");
    let ratio = c2.gamma_total_mean / c1.gamma_total_mean;
    let ratio_ok = (2.5..=6.0).contains(&ratio);
    // per-player fixed-point displacement bound: |A| (|A|-1)^2 sigma^2 / 2
    let mut bound_ok = true;
    for (sigma, c) in [(0.1, c1), (0.2, c2)] {
        let bound = 0.5 * 3.0 * 4.0 * sigma * sigma;
        for g in c.gamma_per_player_mean {
            if g > bound {
                bound_ok = false;
            }
        }
    }
    verdict(
        "5 centroid shift quadratic in sigma",
        ratio_ok && bound_ok,
        &format!(
            "gamma(centroid) ratio 0.1->0.2 = {ratio:.2} in [2.5, 6], values {:.3e}/{:.3e} under the |A|(|A|-1)^2 sigma^2/2 bound",
            c1.gamma_total_mean, c2.gamma_total_mean
        ),
    );
}

// ---------------------------------------------------------------- 6

fn kuhn_cfg(sigma: f64) -> bnnlab::ExperimentConfig {
    RawConfig {
        game: Some("kuhn".into()),
        algo: Some("bnn".into()),
        eta: Some("power:c=2,t0=10".into()),
        sigma: Some(sigma),
        iters: Some(200_000),
        eval_interval: Some(500),
        seeds: Some("0..9".into()),
        ..RawConfig::default()
    }
    .resolve()
    .unwrap()
}

fn kuhn_summary(sigma: f64) -> &'static ExperimentSummary {
    static RUNS: OnceLock<Vec<(f64, ExperimentSummary)>> = OnceLock::new();
    let runs = RUNS.get_or_init(|| {
        [0.0, 0.1, 0.2]
            .into_iter()
            .map(|sigma| {
                let cfg = kuhn_cfg(sigma);
                let outcomes = run_all_seeds(&cfg).expect("run");
                (sigma, summarize(&cfg, &outcomes).expect("summary"))
            })
            .collect()
    });
    &runs.iter().find(|(s, _)| *s == sigma).expect("known sigma").1
}

#[test]
fn criterion_06a_efg_convergence() {
    let summary = kuhn_summary(0.0);
    let finals: Vec<f64> = summary.per_seed.iter().map(|s| s.final_nash_conv).collect();
    let mean = finals.iter().sum::<f64>() / finals.len() as f64;
    let max = finals.iter().cloned().fold(0.0, f64::max);
    verdict(
        "6a noiseless EFG-BNN reaches low exploitability on Kuhn",
        mean < 0.05 && max < 0.05,
        &format!("NashConv after 2e5 iterations: seed mean {mean:.4}, worst seed {max:.4}, threshold 0.05"),
    );
}

#[test]
fn criterion_06b_efg_noise_ordering() {
    let v0 = kuhn_summary(0.0).tail.gamma_mean;
    let v1 = kuhn_summary(0.1).tail.gamma_mean;
    let v2 = kuhn_summary(0.2).tail.gamma_mean;
    verdict(
        "6b potential tail ordering across noise levels",
        v0 < v1 && v1 < v2,
        &format!("tail V: {v0:.3e} (s=0) < {v1:.3e} (s=0.1) < {v2:.3e} (s=0.2)"),
    );
}

// ---------------------------------------------------------------- 7

#[test]
fn criterion_07_bnnac_equivalence() {
    let tree = build_kuhn::<f64>(1.0);
    let eta = 1e-4;
    let config = BnnacConfig {
        k_actor: 1,
        eta: StepSchedule::Constant { c: eta },
        exact_feedback: true,
        ..BnnacConfig::default()
    };
    let mut run = BnnacRun::new(&tree, config, NoiseModel::zero(), 0);
    let mut direct = BehaviorProfile::uniform(&tree);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        run.step(&tree).unwrap();
        let reach = efg::compute_reach(&tree, &direct).unwrap();
        for player in Player::BOTH {
            let cf = efg::compute_cf_values_with(&tree, &direct, &reach, player).unwrap();
            let field = efg_bnn_field(&tree, &direct, &cf, &reach, player);
            for (x, fx) in field.iter().enumerate() {
                step_simplex(direct.policy_mut(player, x), fx, eta, 1e-9).unwrap();
            }
        }
        worst = worst.max(run.profile(&tree).max_abs_diff(&direct));
    }
    verdict(
        "7 actor-critic tracks the exact field with oracle tables",
        worst <= 1e-6,
        &format!("max per-step policy deviation over 1000 steps: {worst:.2e}, bound 1e-6"),
    );
}

// ---------------------------------------------------------------- 8

#[test]
fn criterion_08_baseline_attractor_mechanism() {
    let game = brps();
    let nash = find_equilibrium(&game).expect("brps equilibrium");
    let uniform = MixedProfile::uniform(3, 3);
    let dist = |p: &MixedProfile| -> f64 {
        Player::BOTH
            .iter()
            .map(|&pl| {
                p.strategy(pl)
                    .iter()
                    .zip(nash.strategy(pl).iter())
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    };
    let mut distances = Vec::new();
    let mut fixed_points = Vec::new();
    for lambda in [0.05, 0.1, 0.2] {
        let cfg = RegRdConfig::new(lambda, u64::MAX, uniform.clone()).unwrap();
        let (fp, converged) = reg_rd_fixed_point(&game, &cfg, 0.05, 400_000, 1e-12).unwrap();
        assert!(converged);
        assert!(game.nash_conv(&fp).unwrap() > 1e-4, "fixed point coincides with nash");
        distances.push(dist(&fp));
        fixed_points.push(fp);
    }
    let monotone = distances[0] < distances[1] && distances[1] < distances[2];
    // reference reset pulls the next fixed point strictly closer to nash
    let cfg2 = RegRdConfig::new(0.2, u64::MAX, fixed_points[2].clone()).unwrap();
    let (after_reset, _) = reg_rd_fixed_point(&game, &cfg2, 0.05, 400_000, 1e-12).unwrap();
    let closer = dist(&after_reset) < distances[2];
    verdict(
        "8 regularized-replicator attractor drift and reset",
        monotone && closer,
        &format!(
            "fixed-point distances to nash {distances:?} monotone in lambda; after reset {:.4} < {:.4}",
            dist(&after_reset),
            distances[2]
        ),
    );
}

// ---------------------------------------------------------------- 9

fn nonstationary_comparison() -> &'static bnnlab::compare::ComparisonSummary {
    static RUN: OnceLock<bnnlab::compare::ComparisonSummary> = OnceLock::new();
    RUN.get_or_init(|| {
        let base = RawConfig {
            game: Some("brps".into()),
            schedule: Some("direct:(12,1,1)x2500;(6.5,6.5,1)x2500;(1,12,1)x2500".into()),
            algo: Some("bnn".into()),
            eta: Some("power:c=1,t0=10".into()),
            iters: Some(7_500),
            eval_interval: Some(10),
            seeds: Some("0..29".into()),
            ..RawConfig::default()
        }
        .resolve()
        .unwrap();
        let mut algos = vec![bnnlab::config::parse_algo("bnn").unwrap()];
        for lambda in [0.05, 0.1, 0.2] {
            for k_ref in [100, 500] {
                algos.push(
                    bnnlab::config::parse_algo(&format!("reg-rd:lambda={lambda},k_ref={k_ref}"))
                        .unwrap(),
                );
            }
        }
        let dir = tempfile::tempdir().unwrap();
        bnnlab::compare::compare(&base, &algos, dir.path()).unwrap()
    })
}

#[test]
fn criterion_09a_bnn_beats_reg_rd_grid() {
    let summary = nonstationary_comparison();
    let bnn_final = summary.algos[0].final_stage_mean_nash_conv;
    let beaten = summary.algos[1..]
        .iter()
        .filter(|a| bnn_final < a.final_stage_mean_nash_conv)
        .count();
    verdict(
        "9a nonstationary final-stage ordering vs reg-rd grid",
        beaten >= 4,
        &format!(
            "BNN final-stage mean {bnn_final:.4} beats {beaten}/6 grid cells (need >= 4)"
        ),
    );
}

#[test]
fn criterion_09b_bnn_recovery_finite() {
    // BNN re-converges to each stage's own plateau within ~250 steps, but
    // the plateau of the (6.5,6.5,1) stage sits above 1.5x the previous
    // stage's plateau at every power-schedule calibration, so the relative
    // recovery threshold never fires for that stage.
    let summary = nonstationary_comparison();
    let recoveries: Vec<Option<u64>> = summary.algos[0]
        .per_stage
        .iter()
        .skip(1)
        .map(|s| s.recovery_t)
        .collect();
    let finite = recoveries.iter().all(|r| r.is_some());
    verdict(
        "9b BNN per-stage recovery time finite",
        finite,
        &format!("recovery times after transitions: {recoveries:?}"),
    );
}

// ---------------------------------------------------------------- 10

#[test]
fn criterion_10a_nfg_equilibrium_oracle_suite() {
    let builders = [
        RpsParams::standard(),
        RpsParams::new(12.0, 1.0, 1.0),
        RpsParams::new(12.0, 1.0, 1.0).with_fourth_action(),
        RpsParams::new(6.5, 6.5, 1.0),
        RpsParams::new(1.0, 12.0, 1.0),
    ];
    let mut worst: f64 = 0.0;
    for params in builders {
        let game = build_rps(params);
        let eq = find_equilibrium(&game).expect("support enumeration finds an equilibrium");
        worst = worst.max(game.nash_conv(&eq).unwrap());
    }
    verdict(
        "10a builder equilibria via support enumeration",
        worst <= 1e-9,
        &format!("worst NashConv at enumerated equilibria {worst:.2e}, bound 1e-9"),
    );
}

#[test]
fn criterion_10b_cf_value_oracle_suite() {
    let tree = build_kuhn::<f64>(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let profile = BehaviorProfile::random(&tree, 0.0, &mut rng);
        for player in Player::BOTH {
            let cf = efg::compute_cf_values(&tree, &profile, player).unwrap();
            let oracle = cf_values_by_enumeration(&tree, &profile, player);
            for x in 0..tree.num_infosets(player) {
                for a in 0..tree.infoset(player, x).actions.len() {
                    worst = worst.max((cf.raw[x][a] - oracle[x][a]).abs());
                }
            }
        }
    }
    verdict(
        "10b counterfactual values vs exhaustive enumeration",
        worst < 1e-10,
        &format!("worst deviation {worst:.2e} over 100 random profiles, bound 1e-10"),
    );
}

#[test]
fn criterion_10c_s_squared_dominates_gamma() {
    let game = build_rps(RpsParams::new(12.0, 1.0, 1.0).with_fourth_action());
    let mut rng = ChaCha8Rng::seed_from_u64(1011);
    let mut ok = true;
    for _ in 0..10_000 {
        let profile = MixedProfile::random(4, 4, 0.0, &mut rng);
        for player in Player::BOTH {
            let adv = game.advantages(&profile, player).unwrap();
            let (gamma, s) = gamma_s_from_advantages(&adv);
            if s * s < 2.0 * gamma - 1e-12 {
                ok = false;
            }
        }
    }
    verdict(
        "10c S^2 >= 2 Gamma",
        ok,
        "held on 10^4 random four-action states with 1e-12 slack",
    );
}

#[test]
fn criterion_10d_simplex_invariants_along_runs() {
    // noisy run with adversarially large steps: every iterate stays a valid
    // simplex and flooring is counted, not silent
    let game = brps();
    let noise = NoiseModel::gaussian(0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(1012);
    let mut profile = MixedProfile::random(3, 3, 1e-6, &mut rng);
    let mut ok = true;
    for t in 0..20_000u64 {
        let directions = [
            bnn_core::dynamics::noisy_bnn_field(&game, &profile, Player::One, &noise, &mut rng)
                .unwrap()
                .direction,
            bnn_core::dynamics::noisy_bnn_field(&game, &profile, Player::Two, &noise, &mut rng)
                .unwrap()
                .direction,
        ];
        let eta = StepSchedule::Power { c: 2.0, t0: 10.0 }.eta(t);
        bnn_core::dynamics::step_profile(&mut profile, &directions, eta, 1e-9).unwrap();
        if profile.validate().is_err() {
            ok = false;
            break;
        }
    }
    verdict(
        "10d simplex preserved after every step",
        ok,
        "20k noisy steps with flooring kept the profile a valid simplex",
    );
}

#[test]
fn criterion_10e_byte_identical_reruns() {
    let cfg = RawConfig {
        game: Some("brps".into()),
        algo: Some("bnn".into()),
        sigma: Some(0.1),
        iters: Some(2_000),
        eval_interval: Some(50),
        seeds: Some("0..4".into()),
        ..RawConfig::default()
    }
    .resolve()
    .unwrap();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_experiment(&cfg, dir_a.path()).unwrap();
    run_experiment(&cfg, dir_b.path()).unwrap();
    let mut ok = true;
    for name in ["seed_0000.csv", "seed_0004.csv", "mean.csv", "summary.json"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        ok &= a == b;
    }
    verdict(
        "10e byte-identical reruns under fixed seeds",
        ok,
        "per-seed CSVs, mean CSV and summary JSON identical across reruns",
    );
}

// Kuhn equilibrium value cross-check rides along with the oracle suite.
#[test]
fn criterion_10f_kuhn_value_at_oracle_equilibrium() {
    let tree = build_kuhn::<f64>(1.0);
    let (equilibrium, value) = solve_zero_sum_efg(&tree).unwrap();
    let nc = efg::nash_conv_efg(&tree, &equilibrium).unwrap();
    let ev = efg::expected_value(&tree, &equilibrium, Player::One).unwrap();
    let pass = (value + 1.0 / 18.0).abs() < 1e-10 && (ev + 1.0 / 18.0).abs() < 1e-10 && nc <= 1e-8;
    verdict(
        "10f Kuhn oracle equilibrium",
        pass,
        &format!("game value {value:.12} (target -1/18), NashConv at equilibrium {nc:.2e}"),
    );
}
