//! The BNN vector field and its noisy discrete update, in normal and
//! extensive form, plus replicator-family baselines and step schedules.
//!
//! For a payoff vector `u` and strategy `pi`, the BNN direction is
//!
//! ```text
//! H(a) = [u(a) - mean]_+  -  pi(a) * sum_a' [u(a') - mean]_+
//! ```
//!
//! with `mean` the `pi`-weighted average of `u`. Components always sum to
//! zero, so the field is tangent to the simplex. The noisy variant perturbs
//! each utility with an independent draw and recomputes the weighted mean
//! from the perturbed utilities; at `sigma = 0` it reduces bitwise to the
//! noiseless field (draws are still consumed, keeping the random stream
//! aligned across noise levels).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::efg::{CfValueTable, GameTree, ReachTable};
use crate::error::{Error, Result};
use crate::nfg::{MixedProfile, NormalFormGame};
use crate::player::Player;
use crate::scalar::Scalar;
use crate::simplex;

/// Default flooring applied after each discrete step to keep strategies
/// strictly interior.
pub const DEFAULT_POLICY_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Zero-mean Gaussian with standard deviation `sigma`.
    Gaussian,
    /// Uniform on `[-sigma*sqrt(3), sigma*sqrt(3)]`, variance `sigma^2`.
    UniformBounded,
}

/// Unbiased payoff-observation noise with bounded variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<S: Scalar = f64> {
    pub sigma: S,
    pub kind: NoiseKind,
}

impl<S: Scalar> NoiseModel<S> {
    pub fn gaussian(sigma: S) -> Self {
        Self { sigma, kind: NoiseKind::Gaussian }
    }

    pub fn uniform_bounded(sigma: S) -> Self {
        Self { sigma, kind: NoiseKind::UniformBounded }
    }

    pub fn zero() -> Self {
        Self::gaussian(S::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.sigma == S::zero()
    }

    /// One draw. Sampling happens in double precision and is scaled by
    /// `sigma`, so a zero-noise model consumes draws without perturbing.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> S {
        let z: f64 = match self.kind {
            NoiseKind::Gaussian => StandardNormal.sample(rng),
            NoiseKind::UniformBounded => rng.gen_range(-1.0f64..1.0) * 3.0f64.sqrt(),
        };
        self.sigma * S::cast(z)
    }

    pub fn sample_vec<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<S> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Step-size schedule: constant, or the Robbins-Monro power form
/// `c / (t + t0)^(2/3)` whose sum diverges while the sum of squares
/// converges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StepSchedule<S: Scalar = f64> {
    Constant { c: S },
    Power { c: S, t0: S },
}

impl<S: Scalar> StepSchedule<S> {
    /// Default power schedule: `1 / (t + 10)^(2/3)`.
    pub fn default_power() -> Self {
        StepSchedule::Power { c: S::one(), t0: S::cast(10.0) }
    }

    pub fn eta(&self, t: u64) -> S {
        match *self {
            StepSchedule::Constant { c } => c,
            StepSchedule::Power { c, t0 } => {
                c / (S::cast(t) + t0).powf(S::cast(2.0) / S::cast(3.0))
            }
        }
    }
}

/// One evaluation of a noisy field, with the pieces needed for diagnostics.
#[derive(Debug, Clone)]
pub struct FieldSample<S: Scalar = f64> {
    /// The realized (noisy) update direction.
    pub direction: Vec<S>,
    /// The noiseless direction at the same state.
    pub noiseless: Vec<S>,
    /// The raw noise draws, one per action.
    pub noise_draws: Vec<S>,
}

/// BNN direction from a utility vector; shared by the exact and noisy paths
/// so that zero noise reproduces the exact field bit for bit.
pub fn bnn_from_utilities<S: Scalar>(pi: &[S], utilities: &[S]) -> Vec<S> {
    let mean = simplex::weighted_mean(pi, utilities);
    let mut total = S::zero();
    let positive: Vec<S> = utilities
        .iter()
        .map(|&u| {
            let r = (u - mean).max(S::zero());
            total += r;
            r
        })
        .collect();
    positive
        .into_iter()
        .zip(pi.iter())
        .map(|(r, &p)| r - p * total)
        .collect()
}

/// Exact BNN field of one player in a normal-form game.
pub fn bnn_field<S: Scalar>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    player: Player,
) -> Result<Vec<S>> {
    let utilities = game.action_payoffs(profile, player)?;
    Ok(bnn_from_utilities(profile.strategy(player), &utilities))
}

/// Noisy BNN field: perturbs each action payoff with one draw, recomputes
/// the strategy-weighted mean from the perturbed payoffs, and applies the
/// BNN construction.
pub fn noisy_bnn_field<S: Scalar, R: Rng>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    player: Player,
    noise: &NoiseModel<S>,
    rng: &mut R,
) -> Result<FieldSample<S>> {
    let utilities = game.action_payoffs(profile, player)?;
    let pi = profile.strategy(player);
    let noiseless = bnn_from_utilities(pi, &utilities);
    let noise_draws = noise.sample_vec(utilities.len(), rng);
    let noisy: Vec<S> = utilities
        .iter()
        .zip(noise_draws.iter())
        .map(|(&u, &e)| u + e)
        .collect();
    let direction = bnn_from_utilities(pi, &noisy);
    Ok(FieldSample { direction, noiseless, noise_draws })
}

/// Euler step on one simplex: `pi += eta * direction`, then floor and
/// renormalize. Returns whether the floor engaged.
pub fn step_simplex<S: Scalar>(
    pi: &mut [S],
    direction: &[S],
    eta: S,
    floor: S,
) -> Result<bool> {
    if pi.len() != direction.len() {
        return Err(Error::Shape(format!(
            "direction of length {} against simplex of length {}",
            direction.len(),
            pi.len()
        )));
    }
    if direction.iter().any(|d| !d.is_finite()) || !eta.is_finite() {
        return Err(Error::Numeric {
            what: "non-finite update direction".into(),
            dump: format!("pi={pi:?} direction={direction:?} eta={eta}"),
        });
    }
    for (p, &d) in pi.iter_mut().zip(direction.iter()) {
        *p += eta * d;
    }
    Ok(simplex::floor_and_renormalize(pi, floor))
}

/// Steps both players of a mixed profile simultaneously. Returns the number
/// of simplices where flooring engaged.
pub fn step_profile<S: Scalar>(
    profile: &mut MixedProfile<S>,
    directions: &[Vec<S>; 2],
    eta: S,
    floor: S,
) -> Result<u64> {
    let mut floored = 0;
    for player in Player::BOTH {
        if step_simplex(
            profile.strategy_mut(player),
            &directions[player.index()],
            eta,
            floor,
        )? {
            floored += 1;
        }
    }
    Ok(floored)
}

/// Replicator direction from a utility vector: `pi(a) * (u(a) - mean)`.
pub fn replicator_from_utilities<S: Scalar>(pi: &[S], utilities: &[S]) -> Vec<S> {
    let mean = simplex::weighted_mean(pi, utilities);
    pi.iter()
        .zip(utilities.iter())
        .map(|(&p, &u)| p * (u - mean))
        .collect()
}

/// Replicator field: `pi(a) * (u(a) - mean)`.
pub fn replicator_field<S: Scalar>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    player: Player,
) -> Result<Vec<S>> {
    let utilities = game.action_payoffs(profile, player)?;
    Ok(replicator_from_utilities(profile.strategy(player), &utilities))
}

/// Regularized replicator direction from a utility vector: the utilities are
/// perturbed by `-lambda * ln(pi/ref)` and the perturbed mean recentered.
pub fn regularized_replicator_from_utilities<S: Scalar>(
    pi: &[S],
    reference: &[S],
    lambda: S,
    utilities: &[S],
) -> Result<Vec<S>> {
    if simplex::min_mass(pi) <= S::zero() || simplex::min_mass(reference) <= S::zero() {
        return Err(Error::Config(
            "replicator fields need interior profile and reference".into(),
        ));
    }
    let perturbed: Vec<S> = utilities
        .iter()
        .zip(pi.iter().zip(reference.iter()))
        .map(|(&u, (&p, &r))| u - lambda * (p / r).ln())
        .collect();
    Ok(replicator_from_utilities(pi, &perturbed))
}

/// Reference-regularized replicator baseline.
#[derive(Debug, Clone)]
pub struct RegRdConfig<S: Scalar = f64> {
    /// Regularization strength; zero recovers the plain replicator.
    pub lambda: S,
    /// Iterations between reference resets (applied by the caller).
    pub ref_update_interval: u64,
    /// Current reference profile; must be strictly interior.
    pub reference: MixedProfile<S>,
}

impl<S: Scalar> RegRdConfig<S> {
    pub fn new(lambda: S, ref_update_interval: u64, reference: MixedProfile<S>) -> Result<Self> {
        for player in Player::BOTH {
            if simplex::min_mass(reference.strategy(player)) <= S::zero() {
                return Err(Error::Config(
                    "regularized replicator reference must be interior".into(),
                ));
            }
        }
        Ok(Self { lambda, ref_update_interval, reference })
    }
}

/// Replicator field on payoffs perturbed toward the reference policy:
/// `u(a) - lambda * ln(pi(a)/ref(a))`, with the perturbed mean recentered.
pub fn regularized_replicator_field<S: Scalar>(
    game: &NormalFormGame<S>,
    profile: &MixedProfile<S>,
    player: Player,
    cfg: &RegRdConfig<S>,
) -> Result<Vec<S>> {
    let pi = profile.strategy(player);
    let reference = cfg.reference.strategy(player);
    if reference.len() != pi.len() {
        return Err(Error::Shape("reference dimensions do not match".into()));
    }
    let utilities = game.action_payoffs(profile, player)?;
    regularized_replicator_from_utilities(pi, reference, cfg.lambda, &utilities)
}

/// Iterates the discrete regularized replicator to its attractor for a fixed
/// reference. Returns the fixed point and whether the tolerance was met
/// within the budget.
pub fn reg_rd_fixed_point<S: Scalar>(
    game: &NormalFormGame<S>,
    cfg: &RegRdConfig<S>,
    eta: S,
    max_iters: u64,
    tol: S,
) -> Result<(MixedProfile<S>, bool)> {
    let mut profile = cfg.reference.clone();
    let floor = S::cast(DEFAULT_POLICY_FLOOR);
    for _ in 0..max_iters {
        let directions = [
            regularized_replicator_field(game, &profile, Player::One, cfg)?,
            regularized_replicator_field(game, &profile, Player::Two, cfg)?,
        ];
        let delta = directions
            .iter()
            .flat_map(|d| d.iter().map(|x| x.abs()))
            .fold(S::zero(), S::max)
            * eta;
        step_profile(&mut profile, &directions, eta, floor)?;
        if delta < tol {
            return Ok((profile, true));
        }
    }
    Ok((profile, false))
}

/// Exact extensive-form BNN field: per infoset, the BNN direction of the
/// conditional counterfactual values scaled by the external reach.
pub fn efg_bnn_field<S: Scalar>(
    tree: &GameTree<S>,
    profile: &crate::efg::BehaviorProfile<S>,
    cf: &CfValueTable<S>,
    reach: &ReachTable<S>,
    player: Player,
) -> Vec<Vec<S>> {
    (0..tree.num_infosets(player))
        .map(|x| {
            let pi = profile.policy(player, x);
            let w = reach.infoset_external(player, x);
            bnn_from_utilities(pi, &cf.conditional[x])
                .into_iter()
                .map(|d| w * d)
                .collect()
        })
        .collect()
}

/// Noisy extensive-form BNN field: one draw per (infoset, action) perturbs
/// the conditional counterfactual values before the advantages are formed.
pub fn noisy_efg_bnn_field_with<S: Scalar, R: Rng>(
    tree: &GameTree<S>,
    profile: &crate::efg::BehaviorProfile<S>,
    cf: &CfValueTable<S>,
    reach: &ReachTable<S>,
    player: Player,
    noise: &NoiseModel<S>,
    rng: &mut R,
) -> Vec<FieldSample<S>> {
    (0..tree.num_infosets(player))
        .map(|x| {
            let pi = profile.policy(player, x);
            let w = reach.infoset_external(player, x);
            let q = &cf.conditional[x];
            let noiseless: Vec<S> = bnn_from_utilities(pi, q)
                .into_iter()
                .map(|d| w * d)
                .collect();
            let noise_draws = noise.sample_vec(q.len(), rng);
            let noisy: Vec<S> = q
                .iter()
                .zip(noise_draws.iter())
                .map(|(&v, &e)| v + e)
                .collect();
            let direction: Vec<S> = bnn_from_utilities(pi, &noisy)
                .into_iter()
                .map(|d| w * d)
                .collect();
            FieldSample { direction, noiseless, noise_draws }
        })
        .collect()
}

/// Convenience wrapper computing reach and counterfactual tables internally.
pub fn noisy_efg_bnn_field<S: Scalar, R: Rng>(
    tree: &GameTree<S>,
    profile: &crate::efg::BehaviorProfile<S>,
    player: Player,
    noise: &NoiseModel<S>,
    rng: &mut R,
) -> Result<Vec<FieldSample<S>>> {
    let reach = crate::efg::compute_reach(tree, profile)?;
    let cf = crate::efg::compute_cf_values_with(tree, profile, &reach, player)?;
    Ok(noisy_efg_bnn_field_with(
        tree, profile, &cf, &reach, player, noise, rng,
    ))
}
