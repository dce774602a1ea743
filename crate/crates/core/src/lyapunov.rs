//! Diagnostics for the learning dynamics: the Lyapunov potential and its
//! dissipation identity, bias and Jensen-gap estimation under noise, drift
//! inequality checking, rate fitting, and centroid-shift measurement.
//!
//! For one player, `gamma = 0.5 * sum_a [adv(a)]_+^2` and
//! `s = sum_a [adv(a)]_+`. Along the noiseless flow the combined potential
//! obeys `d/dt (gamma_1 + gamma_2) = -2 (s_1 gamma_1 + s_2 gamma_2)` in
//! zero-sum games (the cross terms cancel in the sum over players), and
//! `s^2 >= 2 gamma` always.

use rand::Rng;

use crate::dynamics::{bnn_field, efg_bnn_field, NoiseModel};
use crate::efg::{self, BehaviorProfile, GameTree};
use crate::error::{Error, Result};
use crate::nfg::{MixedProfile, NormalFormGame};
use crate::player::Player;
use crate::scalar::Scalar;
use crate::simplex;

/// Profiles closer to the boundary than this are refused by the dissipation
/// checks.
const BOUNDARY_TOL: f64 = 1e-6;

/// `(gamma, s)` of an advantage vector.
pub fn gamma_s_from_advantages<S: Scalar>(advantages: &[S]) -> (S, S) {
    let mut gamma = S::zero();
    let mut s = S::zero();
    for &a in advantages {
        let r = a.max(S::zero());
        gamma += r * r;
        s += r;
    }
    (gamma * S::cast(0.5), s)
}

/// Half the squared norm of one player's positive advantages.
pub fn gamma_nfg<S: Scalar>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    player: Player,
) -> Result<S> {
    Ok(gamma_s_from_advantages(&game.advantages(profile, player)?).0)
}

/// Total mass of one player's positive advantages.
pub fn s_mass<S: Scalar>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    player: Player,
) -> Result<S> {
    Ok(gamma_s_from_advantages(&game.advantages(profile, player)?).1)
}

/// Per-iteration diagnostic bundle shared by normal- and extensive-form runs.
#[derive(Debug, Clone)]
pub struct LyapunovReading<S: Scalar = f64> {
    pub t: u64,
    /// Per-player potential (normal form: gamma; extensive form: the
    /// player's share of the reach-weighted potential).
    pub gamma: [S; 2],
    pub gamma_total: S,
    /// Per-player positive-advantage mass.
    pub s_mass: [S; 2],
    /// Total reach-weighted potential, present for extensive-form runs.
    pub v_efg: Option<S>,
    pub nash_conv: S,
    /// Smallest external reach over all information sets (extensive form).
    pub min_external_reach: Option<S>,
}

pub fn read_nfg<S: Scalar>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    t: u64,
) -> Result<LyapunovReading<S>> {
    let mut gamma = [S::zero(); 2];
    let mut s = [S::zero(); 2];
    for player in Player::BOTH {
        let adv = game.advantages(profile, player)?;
        let (g, m) = gamma_s_from_advantages(&adv);
        gamma[player.index()] = g;
        s[player.index()] = m;
    }
    Ok(LyapunovReading {
        t,
        gamma,
        gamma_total: gamma[0] + gamma[1],
        s_mass: s,
        v_efg: None,
        nash_conv: game.nash_conv(profile)?,
        min_external_reach: None,
    })
}

pub fn read_efg<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    t: u64,
) -> Result<LyapunovReading<S>> {
    let reach = efg::compute_reach(tree, profile)?;
    let tables = [
        efg::compute_cf_values_with(tree, profile, &reach, Player::One)?,
        efg::compute_cf_values_with(tree, profile, &reach, Player::Two)?,
    ];
    let potential = efg::efg_potential_with(&tables);
    let gamma = [
        potential.player_sum(Player::One),
        potential.player_sum(Player::Two),
    ];
    let s = [0, 1].map(|p| potential.per_infoset[p].iter().map(|&(_, s)| s).sum());
    Ok(LyapunovReading {
        t,
        gamma,
        gamma_total: gamma[0] + gamma[1],
        s_mass: s,
        v_efg: Some(potential.v),
        nash_conv: efg::nash_conv_efg(tree, profile)?,
        min_external_reach: Some(reach.min_infoset_external()),
    })
}

fn check_step_size<S: Scalar>(h: S) -> Result<()> {
    if !(h > S::zero() && h <= S::cast(1e-5)) {
        return Err(Error::Config(format!(
            "dissipation check needs 0 < h <= 1e-5, got {h}"
        )));
    }
    Ok(())
}

/// Finite-difference check of the dissipation identity in normal form.
///
/// Advances both players along the exact field by `h` and compares
/// `(gamma(pi + h H) - gamma(pi)) / h` with `-2 (s_1 gamma_1 + s_2 gamma_2)`.
/// Returns the relative error; refuses near-boundary profiles where the
/// curvature of the positive part dominates any finite step.
pub fn dissipation_check_nfg<S: Scalar>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    h: S,
) -> Result<S> {
    check_step_size(h)?;
    for player in Player::BOTH {
        if simplex::min_mass(profile.strategy(player)) < S::cast(BOUNDARY_TOL) {
            return Err(Error::Config(
                "dissipation check refuses boundary profiles".into(),
            ));
        }
    }
    let mut gamma0 = S::zero();
    let mut dissipation = S::zero();
    let mut fields = Vec::with_capacity(2);
    for player in Player::BOTH {
        let adv = game.advantages(profile, player)?;
        let (g, s) = gamma_s_from_advantages(&adv);
        gamma0 += g;
        dissipation += S::cast(2.0) * s * g;
        fields.push(bnn_field(game, profile, player)?);
    }
    let mut advanced = profile.clone();
    for player in Player::BOTH {
        let pi = advanced.strategy_mut(player);
        for (p, &d) in pi.iter_mut().zip(fields[player.index()].iter()) {
            *p += h * d;
        }
    }
    let mut gamma1 = S::zero();
    for player in Player::BOTH {
        gamma1 += gamma_s_from_advantages(&game.advantages(&advanced, player)?).0;
    }
    let fd = (gamma1 - gamma0) / h;
    Ok((fd + dissipation).abs() / dissipation.abs().max(S::cast(1e-12)))
}

/// Finite-difference check of the extensive-form dissipation identity:
/// `(V(pi + h field) - V(pi)) / h` against `-sum 2 s_i^x gamma_i^x`.
pub fn dissipation_check_efg<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    h: S,
) -> Result<S> {
    check_step_size(h)?;
    for player in Player::BOTH {
        for x in 0..tree.num_infosets(player) {
            if simplex::min_mass(profile.policy(player, x)) < S::cast(BOUNDARY_TOL) {
                return Err(Error::Config(
                    "dissipation check refuses boundary profiles".into(),
                ));
            }
        }
    }
    let reach = efg::compute_reach(tree, profile)?;
    let tables = [
        efg::compute_cf_values_with(tree, profile, &reach, Player::One)?,
        efg::compute_cf_values_with(tree, profile, &reach, Player::Two)?,
    ];
    let potential = efg::efg_potential_with(&tables);
    let mut advanced = profile.clone();
    for player in Player::BOTH {
        let field = efg_bnn_field(tree, profile, &tables[player.index()], &reach, player);
        for (x, fx) in field.iter().enumerate() {
            let pol = advanced.policy_mut(player, x);
            for (p, &d) in pol.iter_mut().zip(fx.iter()) {
                *p += h * d;
            }
        }
    }
    let v1 = efg::efg_potential(tree, &advanced)?.v;
    let fd = (v1 - potential.v) / h;
    let dissipation = potential.dissipation();
    Ok((fd + dissipation).abs() / dissipation.abs().max(S::cast(1e-12)))
}

/// Monte-Carlo estimates of the structural bias and the per-action Jensen
/// gaps at one state.
///
/// Noise is injected at the advantage level, matching the decomposition
/// being verified: the realized field is `[adv + xi]_+ - pi sum [adv + xi]_+`
/// and the Jensen gap is `E[[adv(a) + xi]_+] - [adv(a)]_+` with one draw per
/// action. (The run-time dynamics perturb payoffs and recompute the weighted
/// mean instead; see [`crate::dynamics::noisy_bnn_field`].)
#[derive(Debug, Clone)]
pub struct BiasEstimate<S: Scalar = f64> {
    /// Per action: estimated bias of the noisy field and its standard error.
    pub beta: Vec<S>,
    pub beta_se: Vec<S>,
    /// Per action: estimated Jensen gap and its standard error.
    pub delta: Vec<S>,
    pub delta_se: Vec<S>,
    /// Per action: residual of the coordinate identity
    /// `beta(a) = delta(a) - pi(a) * sum_b delta(b)`.
    pub residual: Vec<S>,
    pub n_samples: usize,
    pub sigma: S,
}

pub fn estimate_bias<S: Scalar, R: Rng>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    player: Player,
    noise: &NoiseModel<S>,
    n_samples: usize,
    rng: &mut R,
) -> Result<BiasEstimate<S>> {
    let adv = game.advantages(profile, player)?;
    let pi = profile.strategy(player);
    let n_actions = adv.len();

    if noise.is_zero() || n_samples == 0 {
        return Ok(BiasEstimate {
            beta: vec![S::zero(); n_actions],
            beta_se: vec![S::zero(); n_actions],
            delta: vec![S::zero(); n_actions],
            delta_se: vec![S::zero(); n_actions],
            residual: vec![S::zero(); n_actions],
            n_samples: 0,
            sigma: noise.sigma,
        });
    }

    let n_s = S::cast(n_samples);

    // Per-sample estimators subtract the zero-mean raw draw as a control
    // variate: the expectation is unchanged and the variance collapses for
    // actions whose positive part the noise almost never toggles.

    // `[adv+e]_+ - [adv]_+ - e`, piecewise so the all-positive branch is an
    // exact zero instead of cancellation dust
    fn positive_part_gap<S: Scalar>(adv: S, e: S) -> S {
        let shifted = adv + e;
        match (adv >= S::zero(), shifted >= S::zero()) {
            (true, true) => S::zero(),
            (true, false) => -shifted,
            (false, true) => adv,
            (false, false) => -e,
        }
    }

    // pass 1: field bias
    let mut sum = vec![S::zero(); n_actions];
    let mut sumsq = vec![S::zero(); n_actions];
    for _ in 0..n_samples {
        let draws = noise.sample_vec(n_actions, rng);
        let gaps: Vec<S> = adv
            .iter()
            .zip(draws.iter())
            .map(|(&a, &e)| positive_part_gap(a, e))
            .collect();
        let gap_total: S = gaps.iter().copied().sum();
        for a in 0..n_actions {
            let d = gaps[a] - pi[a] * gap_total;
            sum[a] += d;
            sumsq[a] += d * d;
        }
    }
    let beta: Vec<S> = sum.iter().map(|&s| s / n_s).collect();
    let beta_se: Vec<S> = (0..n_actions)
        .map(|a| ((sumsq[a] / n_s - beta[a] * beta[a]).max(S::zero()) / n_s).sqrt())
        .collect();

    // pass 2: per-action Jensen gaps, independent draws
    let mut dsum = vec![S::zero(); n_actions];
    let mut dsumsq = vec![S::zero(); n_actions];
    for _ in 0..n_samples {
        let draws = noise.sample_vec(n_actions, rng);
        for a in 0..n_actions {
            let d = positive_part_gap(adv[a], draws[a]);
            dsum[a] += d;
            dsumsq[a] += d * d;
        }
    }
    let delta: Vec<S> = dsum.iter().map(|&s| s / n_s).collect();
    let delta_se: Vec<S> = (0..n_actions)
        .map(|a| ((dsumsq[a] / n_s - delta[a] * delta[a]).max(S::zero()) / n_s).sqrt())
        .collect();

    let delta_total: S = delta.iter().copied().sum();
    let residual: Vec<S> = (0..n_actions)
        .map(|a| beta[a] - (delta[a] - pi[a] * delta_total))
        .collect();

    Ok(BiasEstimate {
        beta,
        beta_se,
        delta,
        delta_se,
        residual,
        n_samples,
        sigma: noise.sigma,
    })
}

/// Empirical check of the one-step drift inequality over seed-mean
/// potentials.
#[derive(Debug, Clone)]
pub struct DriftReport<S: Scalar = f64> {
    /// Per-step residuals `g_{t+1} - [g_t - 2 sqrt(2) eta g^{3/2}
    /// + (|A|-1) sqrt(2|A|) sigma eta g^{1/2}]`.
    pub residuals: Vec<S>,
    /// Smallest constant making 95% of residuals `<= c3 * eta_t^2`.
    pub c3: S,
    pub conforming_fraction: S,
    pub warning_few_seeds: bool,
}

/// `seed_gammas` holds one per-iteration potential series per seed, aligned
/// on the same iterations; `etas[t]` is the step used between `t` and `t+1`.
pub fn drift_check<S: Scalar>(
    seed_gammas: &[Vec<S>],
    etas: &[S],
    sigma: S,
    num_actions: usize,
) -> Result<DriftReport<S>> {
    if seed_gammas.is_empty() {
        return Err(Error::Config("drift check needs at least one seed".into()));
    }
    let len = seed_gammas.iter().map(|g| g.len()).min().unwrap_or(0);
    if len < 2 || etas.len() + 1 < len {
        return Err(Error::Config(
            "drift check needs aligned series of length >= 2 and a step per transition".into(),
        ));
    }
    let n_seeds = S::cast(seed_gammas.len());
    let gbar: Vec<S> = (0..len)
        .map(|t| seed_gammas.iter().map(|g| g[t]).sum::<S>() / n_seeds)
        .collect();

    let a = S::cast(num_actions);
    let bias_coeff = (a - S::one()) * (S::cast(2.0) * a).sqrt() * sigma;
    let descent_coeff = S::cast(2.0) * S::cast(2.0f64.sqrt());

    let mut residuals = Vec::with_capacity(len - 1);
    let mut ratios = Vec::with_capacity(len - 1);
    for t in 0..len - 1 {
        let g = gbar[t];
        let eta = etas[t];
        let predicted = g - descent_coeff * eta * g.powf(S::cast(1.5))
            + bias_coeff * eta * g.sqrt();
        let r = gbar[t + 1] - predicted;
        residuals.push(r);
        ratios.push(r / (eta * eta));
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite residuals"));
    let idx = ((S::cast(0.95) * S::cast(sorted.len())).ceil() - S::one())
        .max(S::zero())
        .to_usize()
        .unwrap_or(0)
        .min(sorted.len() - 1);
    let c3 = sorted[idx].max(S::zero());
    let conforming = ratios.iter().filter(|&&r| r <= c3).count();
    Ok(DriftReport {
        residuals,
        c3,
        conforming_fraction: S::cast(conforming) / S::cast(ratios.len()),
        warning_few_seeds: seed_gammas.len() < 30,
    })
}

/// Log-log rate fit of a potential series.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RateFit<S: Scalar = f64> {
    /// Iteration window actually used.
    pub window: (u64, u64),
    pub slope: S,
    pub intercept: S,
    pub r_squared: S,
    /// Mean of the last 10% of the full series.
    pub floor_estimate: S,
    /// Set when non-positive values were dropped or the window was adjusted.
    pub shrunk: bool,
}

/// Least-squares slope of `log g` against `log t`.
///
/// With no explicit window, fits over `[t_end/10, t_f]` where `t_f` is the
/// last iteration before the series first drops below three times its tail
/// floor; this keeps the plateau out of the transient fit.
pub fn fit_rate<S: Scalar>(
    points: &[(u64, S)],
    window: Option<(u64, u64)>,
) -> Result<RateFit<S>> {
    if points.len() < 2 {
        return Err(Error::Config("rate fit needs at least two points".into()));
    }
    let t_end = points.last().expect("non-empty").0;
    let tail_len = (points.len() / 10).max(1);
    let floor_estimate =
        points[points.len() - tail_len..].iter().map(|&(_, g)| g).sum::<S>() / S::cast(tail_len);

    let mut shrunk = false;
    let (lo, hi) = match window {
        Some(w) => w,
        None => {
            let lo = t_end / 10;
            let threshold = S::cast(3.0) * floor_estimate;
            let mut hi = t_end;
            if let Some(first_below) = points.iter().position(|&(_, g)| g < threshold) {
                if first_below > 0 && points[first_below].0 > lo {
                    hi = points[first_below - 1].0;
                    shrunk = true;
                }
            }
            (lo, hi)
        }
    };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, g) in points {
        if t < lo.max(1) || t > hi {
            continue;
        }
        if g <= S::zero() {
            shrunk = true;
            continue;
        }
        xs.push(S::cast(t).ln());
        ys.push(g.ln());
    }
    if xs.len() < 2 {
        return Err(Error::Config(
            "rate-fit window contains fewer than two positive points".into(),
        ));
    }
    let n = S::cast(xs.len());
    let mean_x = xs.iter().copied().sum::<S>() / n;
    let mean_y = ys.iter().copied().sum::<S>() / n;
    let mut sxx = S::zero();
    let mut sxy = S::zero();
    let mut syy = S::zero();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == S::zero() {
        return Err(Error::Config("degenerate rate-fit window".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy > S::zero() {
        (S::one() - ss_res / syy).max(S::zero()).min(S::one())
    } else {
        S::one()
    };
    Ok(RateFit {
        window: (lo, hi),
        slope,
        intercept,
        r_squared,
        floor_estimate,
        shrunk,
    })
}

/// Time-averaged tail strategy and its potential.
#[derive(Debug, Clone)]
pub struct CentroidShift<S: Scalar = f64> {
    /// Potential of the averaged profile, per player and combined.
    pub gamma: [S; 2],
    pub gamma_total: S,
    /// False when the tail potential still trends (absolute log-log slope
    /// above 0.25), flagging a premature average.
    pub stationary: bool,
}

/// Averages the tail iterates into a centroid profile and evaluates its
/// potential; the average suppresses the O(sigma) fluctuations so the
/// systematic shift of the biased fixed point becomes visible.
pub fn centroid_shift<S: Scalar>(
    game: &NormalFormGame<S>,
    tail: &[MixedProfile<S>],
) -> Result<CentroidShift<S>> {
    if tail.is_empty() {
        return Err(Error::Config("centroid shift needs tail iterates".into()));
    }
    let centroid = mean_profile(tail)?;
    let mut gamma = [S::zero(); 2];
    for player in Player::BOTH {
        gamma[player.index()] = gamma_nfg(game, &centroid, player)?;
    }
    let series: Vec<(u64, S)> = tail
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let g = gamma_nfg(game, p, Player::One).unwrap_or(S::zero())
                + gamma_nfg(game, p, Player::Two).unwrap_or(S::zero());
            (i as u64 + 1, g)
        })
        .collect();
    let stationary = match fit_rate(&series, Some((1, series.len() as u64))) {
        Ok(fit) => fit.slope.abs() < S::cast(0.25),
        Err(_) => false,
    };
    Ok(CentroidShift {
        gamma,
        gamma_total: gamma[0] + gamma[1],
        stationary,
    })
}

/// Coordinate-wise mean of a set of profiles.
pub fn mean_profile<S: Scalar>(profiles: &[MixedProfile<S>]) -> Result<MixedProfile<S>> {
    let first = profiles
        .first()
        .ok_or_else(|| Error::Config("mean of zero profiles".into()))?;
    let n = S::cast(profiles.len());
    let mut mean = first.clone();
    for player in Player::BOTH {
        let acc = mean.strategy_mut(player);
        for p in acc.iter_mut() {
            *p = S::zero();
        }
        for profile in profiles {
            for (m, &p) in acc.iter_mut().zip(profile.strategy(player).iter()) {
                *m += p;
            }
        }
        for p in acc.iter_mut() {
            *p /= n;
        }
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfg::{build_rps, RpsParams};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pure(n: usize, a: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[a] = 1.0;
        v
    }

    #[test]
    fn gamma_and_s_hand_example() {
        let g = build_rps(RpsParams::<f64>::standard());
        let p = MixedProfile::new(crate::simplex::uniform(3), pure(3, 0)).unwrap();
        // advantages (0, 1, -1): gamma = 0.5, s = 1, equality s^2 = 2 gamma
        assert_abs_diff_eq!(gamma_nfg(&g, &p, Player::One).unwrap(), 0.5);
        assert_abs_diff_eq!(s_mass(&g, &p, Player::One).unwrap(), 1.0);
    }

    #[test]
    fn gamma_zero_at_equilibrium() {
        let params = RpsParams::new(12.0, 1.0, 1.0);
        let g = build_rps(params);
        let eq = params.equilibrium();
        let p = MixedProfile::new(eq.clone(), eq).unwrap();
        for player in Player::BOTH {
            assert!(gamma_nfg(&g, &p, player).unwrap() < 1e-28);
            assert!(s_mass(&g, &p, player).unwrap() < 1e-13);
        }
    }

    #[test]
    fn s_squared_dominates_gamma() {
        let g = build_rps(RpsParams::new(12.0, 1.0, 1.0).with_fourth_action());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10_000 {
            let p = MixedProfile::random(4, 4, 0.0, &mut rng);
            for player in Player::BOTH {
                let adv = g.advantages(&p, player).unwrap();
                let (gamma, s) = gamma_s_from_advantages(&adv);
                assert!(s * s >= 2.0 * gamma - 1e-12);
            }
        }
    }

    #[test]
    fn gamma_vanishes_with_nash_conv_per_player() {
        let g = build_rps(RpsParams::new(12.0, 1.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let p = MixedProfile::random(3, 3, 0.0, &mut rng);
            for player in Player::BOTH {
                let adv = g.advantages(&p, player).unwrap();
                let (gamma, _) = gamma_s_from_advantages(&adv);
                let payoffs = g.action_payoffs(&p, player).unwrap();
                let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let gain =
                    (best - crate::simplex::weighted_mean(p.strategy(player), &payoffs)).max(0.0);
                assert_eq!(gamma == 0.0, gain <= 1e-15, "gamma {gamma} vs gain {gain}");
            }
        }
    }

    #[test]
    fn dissipation_identity_brps() {
        let g = build_rps(RpsParams::new(12.0, 1.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p = MixedProfile::random(3, 3, 1e-2, &mut rng);
            let rel = dissipation_check_nfg(&g, &p, 1e-6).unwrap();
            assert!(rel < 1e-2, "relative error {rel}");
        }
    }

    #[test]
    fn dissipation_refuses_boundary_and_large_h() {
        let g = build_rps(RpsParams::<f64>::standard());
        let boundary = MixedProfile::new(pure(3, 0), crate::simplex::uniform(3)).unwrap();
        assert!(dissipation_check_nfg(&g, &boundary, 1e-6).is_err());
        let p = MixedProfile::uniform(3, 3);
        assert!(dissipation_check_nfg(&g, &p, 1e-3).is_err());
    }

    #[test]
    fn dissipation_zero_at_equilibrium() {
        let params = RpsParams::new(12.0, 1.0, 1.0);
        let g = build_rps(params);
        let eq = params.equilibrium();
        let p = MixedProfile::new(eq.clone(), eq).unwrap();
        // both sides are zero; the guarded relative error is tiny
        let rel = dissipation_check_nfg(&g, &p, 1e-6).unwrap();
        assert!(rel < 1e-6, "unexpected error at equilibrium: {rel}");
    }

    #[test]
    fn bias_estimate_sigma_zero_short_circuits() {
        let g = build_rps(RpsParams::new(12.0, 1.0, 1.0));
        let p = MixedProfile::uniform(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let est = estimate_bias(&g, &p, Player::One, &NoiseModel::zero(), 1000, &mut rng).unwrap();
        assert_eq!(est.n_samples, 0);
        assert!(est.beta.iter().all(|&b| b == 0.0));
        assert!(est.delta.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn bias_estimate_identity_and_bounds() {
        let g = build_rps(RpsParams::new(12.0, 1.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let p = MixedProfile::random(3, 3, 1e-3, &mut rng);
        let noise = NoiseModel::gaussian(0.2);
        let est = estimate_bias(&g, &p, Player::One, &noise, 100_000, &mut rng).unwrap();
        for a in 0..3 {
            // identity residual within 4 combined standard errors
            let tol = 4.0 * (est.beta_se[a] + est.delta_se[a] + est.delta_se.iter().sum::<f64>());
            assert!(est.residual[a].abs() <= tol, "residual {} tol {tol}", est.residual[a]);
            // Jensen gap in [0, sigma] within 3 standard errors
            assert!(est.delta[a] >= -3.0 * est.delta_se[a]);
            assert!(est.delta[a] <= 0.2 + 3.0 * est.delta_se[a]);
            // bias bounded by (|A|-1) sigma
            assert!(est.beta[a].abs() <= 2.0 * 0.2 + 3.0 * est.beta_se[a]);
        }
    }

    #[test]
    fn zero_advantage_jensen_gap_matches_gaussian_smoothing() {
        // uniform standard RPS: all advantages are exactly zero
        let g = build_rps(RpsParams::<f64>::standard());
        let p = MixedProfile::uniform(3, 3);
        let sigma = 0.2;
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let est = estimate_bias(&g, &p, Player::One, &NoiseModel::gaussian(sigma), 200_000, &mut rng)
            .unwrap();
        let expected = sigma / (2.0 * std::f64::consts::PI).sqrt();
        for a in 0..3 {
            assert_abs_diff_eq!(est.delta[a], expected, epsilon = 0.02 * expected);
        }
    }

    /// Simpson quadrature of `E[[mu + eps]_+]` for Gaussian `eps`.
    fn smoothed_positive_part(mu: f64, sigma: f64) -> f64 {
        let lo = mu - 10.0 * sigma;
        let hi = mu + 10.0 * sigma;
        let n = 20_000;
        let hstep = (hi - lo) / n as f64;
        let density = |x: f64| {
            (-((x - mu) * (x - mu)) / (2.0 * sigma * sigma)).exp()
                / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        };
        let f = |x: f64| x.max(0.0) * density(x);
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let x = lo + hstep * i as f64;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        acc * hstep / 3.0
    }

    #[test]
    fn large_advantage_jensen_gap_vanishes() {
        // uniform against pure rock in BRPS(12,1,1): the paper action's
        // advantage is 25/3, dozens of sigmas above zero
        let g = build_rps(RpsParams::new(12.0, 1.0, 1.0));
        let p = MixedProfile::new(crate::simplex::uniform(3), pure(3, 0)).unwrap();
        let adv = g.advantages(&p, Player::One).unwrap();
        let sigma = 0.1;
        assert!(adv[1] >= 10.0 * sigma);
        // quadrature oracle confirms the threshold analytically
        let delta_oracle = smoothed_positive_part(adv[1], sigma) - adv[1];
        assert!(delta_oracle.abs() < 1e-3 * sigma);
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let est =
            estimate_bias(&g, &p, Player::One, &NoiseModel::gaussian(sigma), 100_000, &mut rng)
                .unwrap();
        assert!(est.delta[1].abs() < 1e-3 * sigma, "delta {}", est.delta[1]);
    }

    #[test]
    fn jensen_gap_matches_quadrature_oracle_at_moderate_advantage() {
        let g = build_rps(RpsParams::<f64>::standard());
        let p = MixedProfile::new(crate::simplex::uniform(3), pure(3, 0)).unwrap();
        // advantages (0, 1, -1) with sigma 0.5
        let sigma = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let est =
            estimate_bias(&g, &p, Player::One, &NoiseModel::gaussian(sigma), 200_000, &mut rng)
                .unwrap();
        for (a, &mu) in [0.0, 1.0, -1.0].iter().enumerate() {
            let oracle = smoothed_positive_part(mu, sigma) - mu.max(0.0);
            assert_abs_diff_eq!(est.delta[a], oracle, epsilon = 4.0 * est.delta_se[a] + 1e-6);
        }
    }

    #[test]
    fn fit_rate_recovers_planted_exponents() {
        for &p in &[-1.0, -2.0 / 3.0, -0.5, 0.0] {
            let points: Vec<(u64, f64)> =
                (1..=10_000).map(|t| (t, 3.0 * (t as f64).powf(p))).collect();
            let fit = fit_rate(&points, Some((10, 10_000))).unwrap();
            assert_abs_diff_eq!(fit.slope, p, epsilon = 1e-2);
            assert!(fit.r_squared > 0.999 || p == 0.0);
        }
    }

    #[test]
    fn fit_rate_offset_power_series() {
        let points: Vec<(u64, f64)> = (0..=100_000)
            .step_by(10)
            .map(|t| (t, ((t + 10) as f64).powf(-2.0 / 3.0)))
            .collect();
        let fit = fit_rate(&points, Some((10_000, 100_000))).unwrap();
        assert_abs_diff_eq!(fit.slope, -2.0 / 3.0, epsilon = 0.01);
    }

    #[test]
    fn fit_rate_constant_series() {
        let points: Vec<(u64, f64)> = (1..=1000).map(|t| (t, 0.125)).collect();
        let fit = fit_rate(&points, Some((1, 1000))).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.0, epsilon = 1e-2);
        assert_abs_diff_eq!(fit.floor_estimate, 0.125);
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }

    #[test]
    fn fit_rate_drops_nonpositive_values() {
        let mut points: Vec<(u64, f64)> = (1..=100).map(|t| (t, (t as f64).powf(-1.0))).collect();
        points[50].1 = 0.0;
        let fit = fit_rate(&points, Some((1, 100))).unwrap();
        assert!(fit.shrunk);
        assert_abs_diff_eq!(fit.slope, -1.0, epsilon = 0.05);
    }

    #[test]
    fn drift_residuals_zero_at_equilibrium() {
        let etas = vec![0.01; 9];
        let gammas = vec![vec![0.0; 10]; 3];
        let report = drift_check(&gammas, &etas, 0.0, 3).unwrap();
        assert!(report.residuals.iter().all(|&r| r <= 0.0));
        assert!(report.warning_few_seeds);
    }

    #[test]
    fn mean_profile_averages() {
        let a = MixedProfile::new(vec![1.0, 0.0], vec![0.5, 0.5]).unwrap();
        let b = MixedProfile::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let m = mean_profile(&[a, b]).unwrap();
        assert_eq!(m.strategy(Player::One), &[0.5, 0.5]);
    }
}
