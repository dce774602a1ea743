//! Tabular BNN actor-critic: two independent learners, one per player, that
//! interact only through sampled trajectories.
//!
//! Each learner keeps a per-infoset logit table (policy = softmax), a critic
//! table of Monte-Carlo payoff estimates per (infoset, action), and a
//! running estimate of the external reach of each of its infosets. Every
//! iteration both learners ingest a shared batch of trajectories; every
//! `k_actor` iterations the actor moves its logits along `reach * [adv]_+ /
//! policy`, whose image through the softmax Jacobian is exactly the
//! reach-weighted BNN direction.
//!
//! The table interfaces mirror what a function-approximation backend would
//! expose, so the loop itself never looks inside them.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{NoiseModel, StepSchedule};
use crate::efg::{self, BehaviorProfile, GameTree, NodeKind};
use crate::error::Result;
use crate::lyapunov::{read_efg, LyapunovReading};
use crate::player::Player;
use crate::scalar::Scalar;

/// Per-infoset logits; the induced policy is the row-wise softmax. Adding a
/// constant to a row leaves the policy unchanged, so rows are mean-centered
/// after every update.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitTable<S: Scalar = f64> {
    pub logits: Vec<Vec<S>>,
}

impl<S: Scalar> LogitTable<S> {
    pub fn zeros(tree: &GameTree<S>, player: Player) -> Self {
        Self {
            logits: tree
                .infosets(player)
                .iter()
                .map(|inf| vec![S::zero(); inf.actions.len()])
                .collect(),
        }
    }

    pub fn policy_at(&self, x: usize) -> Vec<S> {
        softmax(&self.logits[x])
    }

    pub fn policies(&self) -> Vec<Vec<S>> {
        self.logits.iter().map(|row| softmax(row)).collect()
    }

    fn mean_center(&mut self, x: usize) {
        let row = &mut self.logits[x];
        let mean = row.iter().copied().sum::<S>() / S::cast(row.len());
        for l in row.iter_mut() {
            *l -= mean;
        }
    }
}

pub fn softmax<S: Scalar>(logits: &[S]) -> Vec<S> {
    let max = logits.iter().copied().fold(S::neg_infinity(), S::max);
    let exps: Vec<S> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: S = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Running Monte-Carlo estimates of conditional payoffs per (infoset,
/// action).
#[derive(Debug, Clone, PartialEq)]
pub struct CriticTable<S: Scalar = f64> {
    pub q: Vec<Vec<S>>,
    pub visits: Vec<Vec<u64>>,
}

impl<S: Scalar> CriticTable<S> {
    pub fn zeros(tree: &GameTree<S>, player: Player) -> Self {
        let shape: Vec<usize> = tree
            .infosets(player)
            .iter()
            .map(|inf| inf.actions.len())
            .collect();
        Self {
            q: shape.iter().map(|&n| vec![S::zero(); n]).collect(),
            visits: shape.iter().map(|&n| vec![0; n]).collect(),
        }
    }
}

/// Running estimate of the external (opponent times chance) reach of each
/// infoset: observed visit frequency divided by the learner's own reach
/// contribution, clamped to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ReachEstimator<S: Scalar = f64> {
    pub rho: Vec<S>,
    pub visits: Vec<u64>,
}

impl<S: Scalar> ReachEstimator<S> {
    pub fn ones(tree: &GameTree<S>, player: Player) -> Self {
        Self {
            rho: vec![S::one(); tree.num_infosets(player)],
            visits: vec![0; tree.num_infosets(player)],
        }
    }
}

#[derive(Debug, Clone)]
pub struct BnnacConfig<S: Scalar = f64> {
    /// Iterations between actor updates.
    pub k_actor: u64,
    /// Trajectories sampled per iteration.
    pub batch: usize,
    /// Constant critic step.
    pub alpha: S,
    /// Constant reach-estimator step.
    pub beta: S,
    /// Actor step schedule.
    pub eta: StepSchedule<S>,
    pub policy_floor: S,
    /// Replace sampled critic/reach estimates with exact oracle values every
    /// iteration; used to check that the loop reproduces the tabular flow.
    pub exact_feedback: bool,
}

impl<S: Scalar> Default for BnnacConfig<S> {
    fn default() -> Self {
        Self {
            k_actor: 10,
            batch: 8,
            alpha: S::cast(0.1),
            beta: S::cast(0.1),
            eta: StepSchedule::default_power(),
            policy_floor: S::cast(crate::dynamics::DEFAULT_POLICY_FLOOR),
            exact_feedback: false,
        }
    }
}

/// One on-path visit of the owner: infoset, action taken, the observed
/// terminal return credited to it, and the owner's next visited infoset.
#[derive(Debug, Clone)]
pub struct Visit<S: Scalar = f64> {
    pub infoset: usize,
    pub action: usize,
    pub observed_return: S,
    pub next_infoset: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory<S: Scalar = f64> {
    pub visits: [Vec<Visit<S>>; 2],
}

/// Samples `batch` full trajectories under the joint policy; observed
/// returns carry one independent noise draw per visit when the model is
/// noisy.
pub fn collect<S: Scalar, R: Rng>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    batch: usize,
    noise: &NoiseModel<S>,
    rng: &mut R,
) -> Vec<Trajectory<S>> {
    (0..batch)
        .map(|_| {
            let mut visits: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
            let mut node = 0usize;
            loop {
                match &tree.node(node).kind {
                    NodeKind::Terminal { payoff } => {
                        let mut out = Trajectory::default();
                        for player in Player::BOTH {
                            let p = player.index();
                            let signed = player.sign::<S>() * *payoff;
                            let n = visits[p].len();
                            out.visits[p] = visits[p]
                                .iter()
                                .enumerate()
                                .map(|(k, &(infoset, action))| Visit {
                                    infoset,
                                    action,
                                    observed_return: if noise.is_zero() {
                                        signed
                                    } else {
                                        signed + noise.sample(rng)
                                    },
                                    next_infoset: if k + 1 < n {
                                        Some(visits[p][k + 1].0)
                                    } else {
                                        None
                                    },
                                })
                                .collect();
                        }
                        return out;
                    }
                    NodeKind::Chance { probs } => {
                        node = tree.node(node).children[sample_index(probs, rng)];
                    }
                    NodeKind::Decision { player, infoset } => {
                        let pol = profile.policy(*player, *infoset);
                        let a = sample_index(pol, rng);
                        visits[player.index()].push((*infoset, a));
                        node = tree.node(node).children[a];
                    }
                }
            }
        })
        .collect()
}

fn sample_index<S: Scalar, R: Rng>(probs: &[S], rng: &mut R) -> usize {
    let u: f64 = rng.gen_range(0.0..1.0);
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p.to_f64().unwrap_or(0.0);
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// One player's learner: policy logits, payoff critic, reach estimator.
#[derive(Debug, Clone)]
pub struct Learner<S: Scalar = f64> {
    pub player: Player,
    pub logits: LogitTable<S>,
    pub critic: CriticTable<S>,
    pub reach: ReachEstimator<S>,
    /// Times the policy floor engaged inside the 1/pi factor.
    pub floor_events: u64,
}

impl<S: Scalar> Learner<S> {
    pub fn new(tree: &GameTree<S>, player: Player) -> Self {
        Self {
            player,
            logits: LogitTable::zeros(tree, player),
            critic: CriticTable::zeros(tree, player),
            reach: ReachEstimator::ones(tree, player),
            floor_events: 0,
        }
    }

    pub fn policies(&self) -> Vec<Vec<S>> {
        self.logits.policies()
    }

    /// Running average of observed returns per visited (infoset, action).
    pub fn critic_update(&mut self, data: &[Trajectory<S>], alpha: S) {
        for trajectory in data {
            for visit in &trajectory.visits[self.player.index()] {
                let q = &mut self.critic.q[visit.infoset][visit.action];
                *q += alpha * (visit.observed_return - *q);
                self.critic.visits[visit.infoset][visit.action] += 1;
            }
        }
    }

    /// Running average toward the batch visit frequency divided by the own
    /// reach contribution, clamped into [0, 1].
    pub fn reach_update(&mut self, tree: &GameTree<S>, data: &[Trajectory<S>], beta: S) {
        if data.is_empty() {
            return;
        }
        let policies = self.policies();
        let p = self.player.index();
        let mut counts = vec![0u64; self.reach.rho.len()];
        for trajectory in data {
            for visit in &trajectory.visits[p] {
                counts[visit.infoset] += 1;
            }
        }
        let batch = S::cast(data.len());
        for x in 0..self.reach.rho.len() {
            let own: S = tree
                .infoset(self.player, x)
                .own_sequence
                .iter()
                .map(|&(xs, a)| policies[xs][a])
                .fold(S::one(), |acc, p| acc * p);
            let freq = S::cast(counts[x]) / batch;
            let target = if own > S::zero() {
                (freq / own).min(S::one()).max(S::zero())
            } else {
                S::zero()
            };
            let rho = &mut self.reach.rho[x];
            *rho += beta * (target - *rho);
            self.reach.visits[x] += counts[x];
        }
    }

    /// Moves logits along `reach * [adv]_+ / policy` and re-centers; the
    /// softmax Jacobian turns this into the reach-weighted BNN direction.
    pub fn actor_update(&mut self, eta: S, policy_floor: S) {
        for x in 0..self.logits.logits.len() {
            let pi = self.logits.policy_at(x);
            let q = &self.critic.q[x];
            let mean = crate::simplex::weighted_mean(&pi, q);
            let w = self.reach.rho[x];
            let mut moved = false;
            let delta: Vec<S> = q
                .iter()
                .zip(pi.iter())
                .map(|(&qa, &pa)| {
                    let adv_pos = (qa - mean).max(S::zero());
                    if adv_pos == S::zero() {
                        return S::zero();
                    }
                    moved = true;
                    let denom = if pa < policy_floor {
                        self.floor_events += 1;
                        policy_floor
                    } else {
                        pa
                    };
                    w * adv_pos / denom
                })
                .collect();
            if moved {
                for (l, d) in self.logits.logits[x].iter_mut().zip(delta.iter()) {
                    *l += eta * *d;
                }
                self.mean_center_row(x);
            }
        }
    }

    fn mean_center_row(&mut self, x: usize) {
        self.logits.mean_center(x);
    }
}

/// A full two-learner run; stepped one iteration at a time so callers can
/// record diagnostics. The tree is passed per call, which lets
/// nonstationary games rebuild it (the builders keep infoset ids stable, so
/// the tables carry over).
pub struct BnnacRun<S: Scalar = f64> {
    pub learners: [Learner<S>; 2],
    pub config: BnnacConfig<S>,
    pub noise: NoiseModel<S>,
    rng: ChaCha8Rng,
    t: u64,
}

impl<S: Scalar> BnnacRun<S> {
    pub fn new(
        tree: &GameTree<S>,
        config: BnnacConfig<S>,
        noise: NoiseModel<S>,
        seed: u64,
    ) -> Self {
        Self {
            learners: [Learner::new(tree, Player::One), Learner::new(tree, Player::Two)],
            config,
            noise,
            rng: ChaCha8Rng::seed_from_u64(seed),
            t: 0,
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Joint policy induced by the two logit tables.
    pub fn profile(&self, tree: &GameTree<S>) -> BehaviorProfile<S> {
        BehaviorProfile::new(
            tree,
            [self.learners[0].policies(), self.learners[1].policies()],
        )
        .expect("softmax policies are valid")
    }

    /// One iteration: sample a batch, update critics and reach estimators,
    /// and move the actors when the interval comes due.
    pub fn step(&mut self, tree: &GameTree<S>) -> Result<()> {
        let profile = self.profile(tree);
        if self.config.exact_feedback {
            let reach = efg::compute_reach(tree, &profile)?;
            for learner in self.learners.iter_mut() {
                let cf = efg::compute_cf_values_with(tree, &profile, &reach, learner.player)?;
                learner.critic.q = cf.conditional.clone();
                for (x, rho) in learner.reach.rho.iter_mut().enumerate() {
                    *rho = reach.infoset_external(learner.player, x);
                }
            }
        } else {
            let data = collect(tree, &profile, self.config.batch, &self.noise, &mut self.rng);
            for learner in self.learners.iter_mut() {
                learner.critic_update(&data, self.config.alpha);
                learner.reach_update(tree, &data, self.config.beta);
            }
        }
        if self.t % self.config.k_actor == 0 {
            let eta = self.config.eta.eta(self.t);
            for learner in self.learners.iter_mut() {
                learner.actor_update(eta, self.config.policy_floor);
            }
        }
        self.t += 1;
        Ok(())
    }
}

/// Convenience loop returning periodic diagnostics of the joint policy.
pub fn run_bnnac<S: Scalar>(
    tree: &GameTree<S>,
    config: BnnacConfig<S>,
    noise: NoiseModel<S>,
    iterations: u64,
    eval_interval: u64,
    seed: u64,
) -> Result<Vec<LyapunovReading<S>>> {
    let mut run = BnnacRun::new(tree, config, noise, seed);
    let mut out = Vec::new();
    for t in 0..iterations {
        if t % eval_interval == 0 {
            out.push(read_efg(tree, &run.profile(&tree), t)?);
        }
        run.step(&tree)?;
    }
    out.push(read_efg(tree, &run.profile(&tree), iterations)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{efg_bnn_field, step_simplex};
    use crate::efg::kuhn::build_kuhn;
    use approx::assert_abs_diff_eq;

    #[test]
    fn softmax_of_zeros_is_uniform() {
        let pi = softmax(&[0.0f64, 0.0, 0.0]);
        for p in pi {
            assert_abs_diff_eq!(p, 1.0 / 3.0);
        }
    }

    #[test]
    fn logit_shift_invariance() {
        let a = softmax(&[0.3f64, -0.7, 0.4]);
        let b = softmax(&[5.3f64, 4.3, 5.4]);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn collect_empty_batch() {
        let tree = build_kuhn::<f64>(1.0);
        let profile = BehaviorProfile::uniform(&tree);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let data = collect(&tree, &profile, 0, &NoiseModel::zero(), &mut rng);
        assert!(data.is_empty());
    }

    #[test]
    fn collect_deterministic_under_seed() {
        let tree = build_kuhn::<f64>(1.0);
        let profile = BehaviorProfile::uniform(&tree);
        let noise = NoiseModel::gaussian(0.1);
        let a = collect(&tree, &profile, 32, &noise, &mut ChaCha8Rng::seed_from_u64(7));
        let b = collect(&tree, &profile, 32, &noise, &mut ChaCha8Rng::seed_from_u64(7));
        for (ta, tb) in a.iter().zip(b.iter()) {
            for p in 0..2 {
                assert_eq!(ta.visits[p].len(), tb.visits[p].len());
                for (va, vb) in ta.visits[p].iter().zip(tb.visits[p].iter()) {
                    assert_eq!(va.infoset, vb.infoset);
                    assert_eq!(va.action, vb.action);
                    assert_eq!(va.observed_return, vb.observed_return);
                }
            }
        }
    }

    #[test]
    fn critic_converges_geometrically_to_constant_return() {
        let tree = build_kuhn::<f64>(1.0);
        let mut learner = Learner::new(&tree, Player::One);
        let data = vec![Trajectory {
            visits: [
                vec![Visit { infoset: 0, action: 0, observed_return: 2.5, next_infoset: None }],
                vec![],
            ],
        }];
        let mut err = 2.5f64;
        for _ in 0..50 {
            learner.critic_update(&data, 0.1);
            err *= 0.9;
            assert_abs_diff_eq!(learner.critic.q[0][0], 2.5 - err, epsilon = 1e-12);
        }
        // empty dataset leaves the critic unchanged
        let before = learner.critic.q.clone();
        learner.critic_update(&[], 0.1);
        assert_eq!(before, learner.critic.q);
    }

    #[test]
    fn reach_estimates_stay_in_unit_interval() {
        let tree = build_kuhn::<f64>(1.0);
        let mut learner = Learner::new(&tree, Player::One);
        // adversarial: the same infoset visited in every trajectory
        let data: Vec<Trajectory<f64>> = (0..64)
            .map(|_| Trajectory {
                visits: [
                    vec![Visit { infoset: 2, action: 1, observed_return: 1.0, next_infoset: None }],
                    vec![],
                ],
            })
            .collect();
        for _ in 0..100 {
            learner.reach_update(&tree, &data, 0.5);
            for &r in &learner.reach.rho {
                assert!((0.0..=1.0).contains(&r));
            }
        }
        // empty dataset leaves the estimator untouched
        let before = learner.reach.clone();
        learner.reach_update(&tree, &[], 0.5);
        assert_eq!(before, learner.reach);
    }

    #[test]
    fn run_deterministic_under_fixed_seed() {
        let tree = build_kuhn::<f64>(1.0);
        let config = BnnacConfig { k_actor: 3, ..BnnacConfig::default() };
        let mut a = BnnacRun::new(&tree, config.clone(), NoiseModel::gaussian(0.15), 11);
        let mut b = BnnacRun::new(&tree, config, NoiseModel::gaussian(0.15), 11);
        for _ in 0..60 {
            a.step(&tree).unwrap();
            b.step(&tree).unwrap();
        }
        assert_eq!(a.learners[0].logits, b.learners[0].logits);
        assert_eq!(a.learners[1].critic, b.learners[1].critic);
        assert_eq!(a.learners[0].reach, b.learners[0].reach);
    }

    #[test]
    fn reach_converges_to_external_reach_under_uniform_play() {
        let tree = build_kuhn::<f64>(1.0);
        let profile = BehaviorProfile::uniform(&tree);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut learner = Learner::new(&tree, Player::One);
        // logits zero -> uniform own policy, matching the sampling profile
        for _ in 0..400 {
            let data = collect(&tree, &profile, 256, &NoiseModel::zero(), &mut rng);
            learner.reach_update(&tree, &data, 0.05);
        }
        let reach = efg::compute_reach(&tree, &profile).unwrap();
        for x in 0..tree.num_infosets(Player::One) {
            let exact = reach.infoset_external(Player::One, x);
            assert_abs_diff_eq!(learner.reach.rho[x], exact, epsilon = 0.05);
        }
    }

    #[test]
    fn actor_noop_when_no_positive_advantage() {
        let tree = build_kuhn::<f64>(1.0);
        let mut learner = Learner::new(&tree, Player::One);
        for row in learner.critic.q.iter_mut() {
            for q in row.iter_mut() {
                *q = -1.0; // equal values: no positive advantage
            }
        }
        let before = learner.logits.clone();
        learner.actor_update(0.5, 1e-9);
        assert_eq!(before, learner.logits);
    }

    #[test]
    fn jacobian_identity_two_actions() {
        // pi = (0.5, 0.5), reach 1, advantages (0.2, -0.2):
        // delta = (0.4, 0); softmax Jacobian image = (0.1, -0.1)
        let pi = [0.5f64, 0.5];
        let delta = [0.4f64, 0.0];
        let dot: f64 = pi.iter().zip(delta.iter()).map(|(p, d)| p * d).sum();
        let image: Vec<f64> = pi
            .iter()
            .zip(delta.iter())
            .map(|(p, d)| p * (d - dot))
            .collect();
        assert_abs_diff_eq!(image[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(image[1], -0.1, epsilon = 1e-15);
    }

    #[test]
    fn jacobian_identity_on_learner_states() {
        let tree = build_kuhn::<f64>(1.0);
        let config = BnnacConfig { k_actor: 1, ..BnnacConfig::default() };
        let mut run = BnnacRun::new(&tree, config, NoiseModel::gaussian(0.2), 3);
        for _ in 0..50 {
            run.step(&tree).unwrap();
        }
        for learner in &run.learners {
            for x in 0..learner.logits.logits.len() {
                let pi = learner.logits.policy_at(x);
                let q = &learner.critic.q[x];
                let mean = crate::simplex::weighted_mean(&pi, q);
                let w = learner.reach.rho[x];
                let delta: Vec<f64> = q
                    .iter()
                    .zip(pi.iter())
                    .map(|(&qa, &pa)| w * (qa - mean).max(0.0) / pa)
                    .collect();
                let dot: f64 = pi.iter().zip(delta.iter()).map(|(p, d)| p * d).sum();
                let image: Vec<f64> =
                    pi.iter().zip(delta.iter()).map(|(p, d)| p * (d - dot)).collect();
                let s: f64 = q.iter().map(|&qa| (qa - mean).max(0.0)).sum::<f64>() * w;
                for (a, &pa) in pi.iter().enumerate() {
                    let bnn = w * (q[a] - mean).max(0.0) - pa * s;
                    assert_abs_diff_eq!(image[a], bnn, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn information_hiding_under_equivalent_opponent_tables() {
        // learner one's update is a pure function of its own tables and the
        // shared trajectory batch: replacing learner two's internals with any
        // tables that induce the same policy leaves learner one's next state
        // bit-identical
        let tree = build_kuhn::<f64>(1.0);

        // warm both runs up identically so the states are non-trivial
        let config = BnnacConfig { k_actor: 1, ..BnnacConfig::default() };
        let mut a = BnnacRun::new(&tree, config.clone(), NoiseModel::gaussian(0.1), 5);
        for _ in 0..20 {
            a.step(&tree).unwrap();
        }
        let mut b = BnnacRun::new(&tree, config, NoiseModel::gaussian(0.1), 5);
        for _ in 0..20 {
            b.step(&tree).unwrap();
        }
        assert_eq!(a.learners[0].logits, b.learners[0].logits);

        // perturb learner two's hidden tables without touching its policy
        for row in b.learners[1].critic.q.iter_mut() {
            for q in row.iter_mut() {
                *q += 17.0;
            }
        }
        for r in b.learners[1].reach.rho.iter_mut() {
            *r = (*r * 0.5).max(0.01);
        }
        assert_eq!(a.learners[1].logits, b.learners[1].logits);

        // one step: the shared batch is identical, so learner one's next
        // state must be too (learner two's own update may differ)
        a.step(&tree).unwrap();
        b.step(&tree).unwrap();
        assert_eq!(a.learners[0].logits, b.learners[0].logits);
        assert_eq!(a.learners[0].critic, b.learners[0].critic);
        assert_eq!(a.learners[0].reach, b.learners[0].reach);
    }

    #[test]
    fn logits_mean_centered_after_actor_updates() {
        let tree = build_kuhn::<f64>(1.0);
        let config = BnnacConfig { k_actor: 1, ..BnnacConfig::default() };
        let mut run = BnnacRun::new(&tree, config, NoiseModel::zero(), 9);
        for _ in 0..40 {
            run.step(&tree).unwrap();
        }
        for learner in &run.learners {
            for row in &learner.logits.logits {
                let mean: f64 = row.iter().sum::<f64>() / row.len() as f64;
                assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn collect_visit_frequencies_match_exact_reach() {
        let tree = build_kuhn::<f64>(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let profile = BehaviorProfile::random(&tree, 0.05, &mut rng);
        let reach = efg::compute_reach(&tree, &profile).unwrap();
        let n = 100_000;
        let data = collect(&tree, &profile, n, &NoiseModel::zero(), &mut rng);
        for player in Player::BOTH {
            let mut counts = vec![0u64; tree.num_infosets(player)];
            for trajectory in &data {
                for visit in &trajectory.visits[player.index()] {
                    counts[visit.infoset] += 1;
                }
            }
            for (x, inf) in tree.infosets(player).iter().enumerate() {
                let expected: f64 = inf.nodes.iter().map(|&h| reach.total(h)).sum();
                let observed = counts[x] as f64 / n as f64;
                let se = (expected * (1.0 - expected) / n as f64).sqrt();
                assert!(
                    (observed - expected).abs() <= 3.0 * se + 1e-9,
                    "infoset {}: observed {observed:.5} vs exact {expected:.5}",
                    inf.key
                );
            }
        }
    }

    #[test]
    fn critic_matches_oracle_under_uniform_play() {
        let tree = build_kuhn::<f64>(1.0);
        let profile = BehaviorProfile::uniform(&tree);
        let exact = efg::compute_cf_values(&tree, &profile, Player::One).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut learner = Learner::new(&tree, Player::One);
        let alpha = 0.02;
        // per-entry sample variance of the observed returns, for the
        // stationary-error bound of the constant-step running average
        let mut sum = vec![vec![0.0f64; 2]; tree.num_infosets(Player::One)];
        let mut sumsq = vec![vec![0.0f64; 2]; tree.num_infosets(Player::One)];
        let mut count = vec![vec![0u64; 2]; tree.num_infosets(Player::One)];
        for _ in 0..3_000 {
            let data = collect(&tree, &profile, 32, &NoiseModel::zero(), &mut rng);
            for trajectory in &data {
                for visit in &trajectory.visits[0] {
                    sum[visit.infoset][visit.action] += visit.observed_return;
                    sumsq[visit.infoset][visit.action] +=
                        visit.observed_return * visit.observed_return;
                    count[visit.infoset][visit.action] += 1;
                }
            }
            learner.critic_update(&data, alpha);
        }
        for x in 0..tree.num_infosets(Player::One) {
            for a in 0..2 {
                let n = count[x][a] as f64;
                assert!(n > 1_000.0, "entry ({x},{a}) undersampled");
                let mean = sum[x][a] / n;
                let var = (sumsq[x][a] / n - mean * mean).max(0.0);
                // stationary std of the geometric average
                let se = (alpha / (2.0 - alpha) * var).sqrt();
                let q = learner.critic.q[x][a];
                assert!(
                    (q - exact.conditional[x][a]).abs() <= 3.0 * se + 1e-6,
                    "critic ({x},{a}): {q:.4} vs exact {:.4} (se {se:.4})",
                    exact.conditional[x][a]
                );
            }
        }
    }

    #[test]
    fn end_to_end_descends_on_kuhn() {
        let tree = build_kuhn::<f64>(1.0);
        let config = BnnacConfig {
            k_actor: 10,
            batch: 32,
            alpha: 0.05,
            beta: 0.05,
            eta: StepSchedule::Power { c: 5.0, t0: 1000.0 },
            ..BnnacConfig::default()
        };
        let readings =
            run_bnnac(&tree, config, NoiseModel::zero(), 50_000, 10_000, 0).unwrap();
        let start = readings.first().unwrap().nash_conv;
        let end = readings.last().unwrap().nash_conv;
        assert!(
            end < 0.3 && end < start / 2.0,
            "sampled learning did not descend: {start:.3} -> {end:.3}"
        );
    }

    #[test]
    fn exact_feedback_tracks_direct_flow() {
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
        for _ in 0..200 {
            run.step(&tree).unwrap();
            let reach = efg::compute_reach(&tree, &direct).unwrap();
            let fields = Player::BOTH.map(|player| {
                let cf = efg::compute_cf_values_with(&tree, &direct, &reach, player).unwrap();
                efg_bnn_field(&tree, &direct, &cf, &reach, player)
            });
            for player in Player::BOTH {
                for (x, fx) in fields[player.index()].iter().enumerate() {
                    step_simplex(direct.policy_mut(player, x), fx, eta, 1e-9).unwrap();
                }
            }
            assert!(run.profile(&tree).max_abs_diff(&direct) < 1e-6);
        }
    }
}
