//! Extensive-form games with imperfect information.
//!
//! Trees are stored as flat node arenas with parents preceding children.
//! Payoffs are zero-sum and stored once from player one's perspective.
//! Chance is a third, non-strategic actor with fixed distributions; its
//! reach contribution is folded into the external reach of both players.
//!
//! Information sets are keyed by a canonical string of
//! `player|private cards|public cards|action sequence`, which makes them
//! stable across rebuilds and easy to inspect in dumps.

mod builder;
pub mod kuhn;
pub mod leduc;

pub use builder::TreeBuilder;

use crate::error::{Error, Result};
use crate::player::Player;
use crate::scalar::Scalar;
use crate::simplex;

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind<S: Scalar> {
    /// Terminal history; `payoff` is player one's (player two gets the
    /// negation).
    Terminal { payoff: S },
    /// Chance node; `probs` aligns with the node's children.
    Chance { probs: Vec<S> },
    /// Decision node of a strategic player, grouped into `infoset`.
    Decision { player: Player, infoset: usize },
}

#[derive(Debug, Clone)]
pub struct Node<S: Scalar> {
    pub parent: Option<usize>,
    /// Index of the edge from the parent (0 for the root).
    pub action_index: usize,
    /// Label of the edge from the parent ("" for the root).
    pub action_label: String,
    pub kind: NodeKind<S>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Infoset {
    pub key: String,
    pub player: Player,
    pub actions: Vec<String>,
    pub nodes: Vec<usize>,
    /// The owner's (infoset, action) pairs on the path from the root;
    /// identical for every member node under perfect recall.
    pub own_sequence: Vec<(usize, usize)>,
}

/// Imperfect-information game tree for two players plus chance.
#[derive(Debug, Clone)]
pub struct GameTree<S: Scalar = f64> {
    name: String,
    nodes: Vec<Node<S>>,
    infosets: [Vec<Infoset>; 2],
}

impl<S: Scalar> GameTree<S> {
    /// Assembles a tree from raw parts and validates every structural
    /// invariant (tree-ness, chance distributions, perfect recall).
    pub fn from_parts(
        name: String,
        nodes: Vec<Node<S>>,
        infosets: [Vec<Infoset>; 2],
    ) -> Result<Self> {
        let mut tree = Self { name, nodes, infosets };
        tree.fill_own_sequences()?;
        tree.validate()?;
        Ok(tree)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node<S>] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node<S> {
        &self.nodes[id]
    }

    pub fn num_infosets(&self, player: Player) -> usize {
        self.infosets[player.index()].len()
    }

    pub fn infosets(&self, player: Player) -> &[Infoset] {
        &self.infosets[player.index()]
    }

    pub fn infoset(&self, player: Player, id: usize) -> &Infoset {
        &self.infosets[player.index()][id]
    }

    pub fn terminal_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, NodeKind::Terminal { .. }))
            .map(|(i, _)| i)
    }

    /// Terminal payoff to `player` (zero-sum: player two gets the negation).
    pub fn terminal_payoff(&self, id: usize, player: Player) -> S {
        match self.nodes[id].kind {
            NodeKind::Terminal { payoff } => player.sign::<S>() * payoff,
            _ => panic!("terminal_payoff on non-terminal node {id}"),
        }
    }

    pub fn num_decision_nodes(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Decision { .. }))
            .count()
    }

    pub fn num_terminal_nodes(&self) -> usize {
        self.terminal_ids().count()
    }

    fn fill_own_sequences(&mut self) -> Result<()> {
        let seqs: Vec<Vec<Vec<(usize, usize)>>> = Player::BOTH
            .iter()
            .map(|&player| {
                self.infosets[player.index()]
                    .iter()
                    .map(|inf| {
                        inf.nodes
                            .first()
                            .map(|&h| self.own_sequence_of(player, h))
                            .unwrap_or_default()
                    })
                    .collect()
            })
            .collect();
        for (p, per_player) in seqs.into_iter().enumerate() {
            for (i, seq) in per_player.into_iter().enumerate() {
                self.infosets[p][i].own_sequence = seq;
            }
        }
        Ok(())
    }

    /// The (infoset, action) pairs of `player` on the path to `h`.
    pub fn own_sequence_of(&self, player: Player, h: usize) -> Vec<(usize, usize)> {
        let mut seq = Vec::new();
        let mut cur = h;
        while let Some(parent) = self.nodes[cur].parent {
            if let NodeKind::Decision { player: p, infoset } = self.nodes[parent].kind {
                if p == player {
                    seq.push((infoset, self.nodes[cur].action_index));
                }
            }
            cur = parent;
        }
        seq.reverse();
        seq
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidTree("empty tree".into()));
        }
        if self.nodes[0].parent.is_some() {
            return Err(Error::InvalidTree("node 0 must be the root".into()));
        }
        let mut seen_as_child = vec![false; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            for (k, &c) in node.children.iter().enumerate() {
                if c <= id || c >= self.nodes.len() {
                    return Err(Error::InvalidTree(format!(
                        "child {c} of node {id} out of order"
                    )));
                }
                if seen_as_child[c] {
                    return Err(Error::InvalidTree(format!("node {c} has two parents")));
                }
                seen_as_child[c] = true;
                if self.nodes[c].parent != Some(id) || self.nodes[c].action_index != k {
                    return Err(Error::InvalidTree(format!(
                        "back-pointer mismatch at node {c}"
                    )));
                }
            }
            match &node.kind {
                NodeKind::Terminal { payoff } => {
                    if !node.children.is_empty() {
                        return Err(Error::InvalidTree(format!("terminal {id} has children")));
                    }
                    if !payoff.is_finite() {
                        return Err(Error::InvalidTree(format!(
                            "terminal {id} has non-finite payoff"
                        )));
                    }
                }
                NodeKind::Chance { probs } => {
                    if probs.len() != node.children.len() {
                        return Err(Error::InvalidTree(format!(
                            "chance {id}: {} probs for {} children",
                            probs.len(),
                            node.children.len()
                        )));
                    }
                    simplex::validate(probs)
                        .map_err(|e| Error::InvalidTree(format!("chance {id}: {e}")))?;
                }
                NodeKind::Decision { player, infoset } => {
                    let inf = self
                        .infosets[player.index()]
                        .get(*infoset)
                        .ok_or_else(|| Error::InvalidTree(format!("node {id}: bad infoset")))?;
                    if node.children.len() != inf.actions.len() {
                        return Err(Error::InvalidTree(format!(
                            "node {id}: {} children for {} actions of infoset {}",
                            node.children.len(),
                            inf.actions.len(),
                            inf.key
                        )));
                    }
                    if !inf.nodes.contains(&id) {
                        return Err(Error::InvalidTree(format!(
                            "node {id} missing from infoset {}",
                            inf.key
                        )));
                    }
                }
            }
        }
        for (id, seen) in seen_as_child.iter().enumerate().skip(1) {
            if !seen {
                return Err(Error::InvalidTree(format!("node {id} is unreachable")));
            }
        }
        // perfect recall: every member of an infoset carries the same
        // owner-action sequence from the root
        for &player in &Player::BOTH {
            for inf in &self.infosets[player.index()] {
                if inf.nodes.is_empty() {
                    return Err(Error::InvalidTree(format!("empty infoset {}", inf.key)));
                }
                for &h in &inf.nodes {
                    match self.nodes[h].kind {
                        NodeKind::Decision { player: p, infoset } => {
                            if p != player || self.infosets[p.index()][infoset].key != inf.key {
                                return Err(Error::InvalidTree(format!(
                                    "membership mismatch at node {h} for infoset {}",
                                    inf.key
                                )));
                            }
                        }
                        _ => {
                            return Err(Error::InvalidTree(format!(
                                "non-decision node {h} in infoset {}",
                                inf.key
                            )))
                        }
                    }
                    let seq = self.own_sequence_of(player, h);
                    if seq != inf.own_sequence {
                        return Err(Error::InvalidTree(format!(
                            "perfect recall violated in infoset {}: divergent own sequences",
                            inf.key
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Line-oriented debug dump: one node per line with
    /// `id parent actor action infoset payoff`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let parent = node
                .parent
                .map(|p| p.to_string())
                .unwrap_or_else(|| "-".into());
            let action = if node.action_label.is_empty() { "-" } else { &node.action_label };
            let (actor, infoset, payoff) = match &node.kind {
                NodeKind::Terminal { payoff } => ("z".to_string(), "-".to_string(), payoff.to_string()),
                NodeKind::Chance { .. } => ("c".to_string(), "-".to_string(), "-".into()),
                NodeKind::Decision { player, infoset } => (
                    player.to_string(),
                    self.infosets[player.index()][*infoset].key.clone(),
                    "-".into(),
                ),
            };
            out.push_str(&format!("{id}\t{parent}\t{actor}\t{action}\t{infoset}\t{payoff}\n"));
        }
        out
    }
}

/// One probability vector per information set, for both players.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorProfile<S: Scalar = f64> {
    policies: [Vec<Vec<S>>; 2],
}

impl<S: Scalar> BehaviorProfile<S> {
    pub fn new(tree: &GameTree<S>, policies: [Vec<Vec<S>>; 2]) -> Result<Self> {
        let profile = Self { policies };
        profile.check_shape(tree)?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn uniform(tree: &GameTree<S>) -> Self {
        let policies = Player::BOTH.map(|p| {
            tree.infosets(p)
                .iter()
                .map(|inf| simplex::uniform(inf.actions.len()))
                .collect()
        });
        Self { policies }
    }

    pub fn random<R: rand::Rng>(tree: &GameTree<S>, min_mass: S, rng: &mut R) -> Self {
        let policies = Player::BOTH.map(|p| {
            tree.infosets(p)
                .iter()
                .map(|inf| simplex::random_interior(inf.actions.len(), min_mass, rng))
                .collect()
        });
        Self { policies }
    }

    pub fn check_shape(&self, tree: &GameTree<S>) -> Result<()> {
        for &player in &Player::BOTH {
            let pols = &self.policies[player.index()];
            if pols.len() != tree.num_infosets(player) {
                return Err(Error::Config(format!(
                    "profile covers {} infosets of player {player}, tree has {}",
                    pols.len(),
                    tree.num_infosets(player)
                )));
            }
            for (i, pol) in pols.iter().enumerate() {
                if pol.len() != tree.infoset(player, i).actions.len() {
                    return Err(Error::Config(format!(
                        "policy at infoset {} has {} entries, expected {}",
                        tree.infoset(player, i).key,
                        pol.len(),
                        tree.infoset(player, i).actions.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for pols in &self.policies {
            for pol in pols {
                simplex::validate(pol)?;
            }
        }
        Ok(())
    }

    pub fn policy(&self, player: Player, infoset: usize) -> &[S] {
        &self.policies[player.index()][infoset]
    }

    pub fn policy_mut(&mut self, player: Player, infoset: usize) -> &mut Vec<S> {
        &mut self.policies[player.index()][infoset]
    }

    pub fn policies(&self, player: Player) -> &[Vec<S>] {
        &self.policies[player.index()]
    }

    /// Largest absolute coordinate difference across all policies.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        let mut worst = S::zero();
        for p in 0..2 {
            for (a, b) in self.policies[p].iter().zip(other.policies[p].iter()) {
                for (&x, &y) in a.iter().zip(b.iter()) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
        worst
    }
}

/// Reach probabilities factorized into per-player own contributions and the
/// chance contribution, plus aggregated external reach per information set.
#[derive(Debug, Clone)]
pub struct ReachTable<S: Scalar = f64> {
    own: [Vec<S>; 2],
    chance: Vec<S>,
    infoset_external: [Vec<S>; 2],
}

impl<S: Scalar> ReachTable<S> {
    /// Total reach of a history: own contributions of both players times
    /// chance.
    pub fn total(&self, h: usize) -> S {
        self.own[0][h] * self.own[1][h] * self.chance[h]
    }

    pub fn own(&self, player: Player, h: usize) -> S {
        self.own[player.index()][h]
    }

    pub fn chance(&self, h: usize) -> S {
        self.chance[h]
    }

    /// External reach for `player`: opponent contribution times chance.
    pub fn external(&self, player: Player, h: usize) -> S {
        self.own[player.other().index()][h] * self.chance[h]
    }

    pub fn infoset_external(&self, player: Player, infoset: usize) -> S {
        self.infoset_external[player.index()][infoset]
    }

    /// Smallest external reach over all information sets of both players.
    pub fn min_infoset_external(&self) -> S {
        self.infoset_external
            .iter()
            .flat_map(|v| v.iter().copied())
            .fold(S::infinity(), S::min)
    }
}

/// Single root-to-leaf pass computing all reach contributions.
pub fn compute_reach<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
) -> Result<ReachTable<S>> {
    profile.check_shape(tree)?;
    let n = tree.nodes().len();
    let mut own = [vec![S::one(); n], vec![S::one(); n]];
    let mut chance = vec![S::one(); n];
    for (id, node) in tree.nodes().iter().enumerate() {
        let (own0, own1, ch) = (own[0][id], own[1][id], chance[id]);
        match &node.kind {
            NodeKind::Terminal { .. } => {}
            NodeKind::Chance { probs } => {
                for (k, &c) in node.children.iter().enumerate() {
                    own[0][c] = own0;
                    own[1][c] = own1;
                    chance[c] = ch * probs[k];
                }
            }
            NodeKind::Decision { player, infoset } => {
                let pol = profile.policy(*player, *infoset);
                let parent_own = [own0, own1];
                for (k, &c) in node.children.iter().enumerate() {
                    own[0][c] = own0;
                    own[1][c] = own1;
                    chance[c] = ch;
                    own[player.index()][c] = parent_own[player.index()] * pol[k];
                }
            }
        }
    }
    let infoset_external = Player::BOTH.map(|player| {
        tree.infosets(player)
            .iter()
            .map(|inf| {
                inf.nodes
                    .iter()
                    .map(|&h| own[player.other().index()][h] * chance[h])
                    .sum()
            })
            .collect()
    });
    Ok(ReachTable { own, chance, infoset_external })
}

/// Counterfactual values and advantages of one player.
///
/// `raw[x][a]` carries the external-reach weight; `conditional[x][a]` and
/// `advantages[x][a]` are normalized by the infoset's external reach when it
/// exceeds a small threshold and are zero otherwise, so that downstream
/// dynamics can re-multiply by the reach without dividing by zero.
#[derive(Debug, Clone)]
pub struct CfValueTable<S: Scalar = f64> {
    pub player: Player,
    pub raw: Vec<Vec<S>>,
    pub infoset_value: Vec<S>,
    pub conditional: Vec<Vec<S>>,
    pub advantages: Vec<Vec<S>>,
    pub external_reach: Vec<S>,
}

/// Expected payoff-to-go for player one at every node, by one backward pass.
fn node_values<S: Scalar>(tree: &GameTree<S>, profile: &BehaviorProfile<S>) -> Vec<S> {
    let n = tree.nodes().len();
    let mut value = vec![S::zero(); n];
    for id in (0..n).rev() {
        let node = &tree.nodes()[id];
        value[id] = match &node.kind {
            NodeKind::Terminal { payoff } => *payoff,
            NodeKind::Chance { probs } => node
                .children
                .iter()
                .zip(probs.iter())
                .map(|(&c, &p)| p * value[c])
                .sum(),
            NodeKind::Decision { player, infoset } => {
                let pol = profile.policy(*player, *infoset);
                node.children
                    .iter()
                    .zip(pol.iter())
                    .map(|(&c, &p)| p * value[c])
                    .sum()
            }
        };
    }
    value
}

pub fn compute_cf_values<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    player: Player,
) -> Result<CfValueTable<S>> {
    let reach = compute_reach(tree, profile)?;
    compute_cf_values_with(tree, profile, &reach, player)
}

pub fn compute_cf_values_with<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    reach: &ReachTable<S>,
    player: Player,
) -> Result<CfValueTable<S>> {
    profile.check_shape(tree)?;
    let values = node_values(tree, profile);
    let sign = player.sign::<S>();
    let reach_floor = S::cast(1e-12);

    let num_inf = tree.num_infosets(player);
    let mut raw = Vec::with_capacity(num_inf);
    let mut infoset_value = Vec::with_capacity(num_inf);
    let mut conditional = Vec::with_capacity(num_inf);
    let mut advantages = Vec::with_capacity(num_inf);
    let mut external_reach = Vec::with_capacity(num_inf);

    for (x, inf) in tree.infosets(player).iter().enumerate() {
        let num_actions = inf.actions.len();
        let mut v = vec![S::zero(); num_actions];
        for &h in &inf.nodes {
            let ext = reach.external(player, h);
            for (a, v_a) in v.iter_mut().enumerate() {
                let child = tree.node(h).children[a];
                *v_a += ext * sign * values[child];
            }
        }
        let pol = profile.policy(player, x);
        let v_inf = simplex::weighted_mean(pol, &v);
        let ext_inf = reach.infoset_external(player, x);
        let (q, adv) = if ext_inf > reach_floor {
            (
                v.iter().map(|&y| y / ext_inf).collect::<Vec<S>>(),
                v.iter().map(|&y| (y - v_inf) / ext_inf).collect::<Vec<S>>(),
            )
        } else {
            (vec![S::zero(); num_actions], vec![S::zero(); num_actions])
        };
        raw.push(v);
        infoset_value.push(v_inf);
        conditional.push(q);
        advantages.push(adv);
        external_reach.push(ext_inf);
    }

    Ok(CfValueTable {
        player,
        raw,
        infoset_value,
        conditional,
        advantages,
        external_reach,
    })
}

/// Expected payoff of `player` under the behaviour profile.
pub fn expected_value<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    player: Player,
) -> Result<S> {
    profile.check_shape(tree)?;
    Ok(player.sign::<S>() * node_values(tree, profile)[0])
}

/// Value of the exact best response of `player` against the opponent's part
/// of `profile`, by backward induction over information sets.
pub fn best_response_value<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    player: Player,
) -> Result<S> {
    profile.check_shape(tree)?;
    let reach = compute_reach(tree, profile)?;
    let sign = player.sign::<S>();
    let n = tree.nodes().len();

    // process own infosets by decreasing own-sequence length so that every
    // decision lower in the tree is fixed before it is needed
    let mut order: Vec<usize> = (0..tree.num_infosets(player)).collect();
    order.sort_by_key(|&x| std::cmp::Reverse(tree.infoset(player, x).own_sequence.len()));

    let mut chosen: Vec<Option<usize>> = vec![None; tree.num_infosets(player)];
    let mut memo: Vec<Option<S>> = vec![None; n];

    fn eval<S: Scalar>(
        tree: &GameTree<S>,
        profile: &BehaviorProfile<S>,
        player: Player,
        chosen: &[Option<usize>],
        memo: &mut [Option<S>],
        sign: S,
        id: usize,
    ) -> S {
        if let Some(v) = memo[id] {
            return v;
        }
        let node = tree.node(id);
        let v = match &node.kind {
            NodeKind::Terminal { payoff } => sign * *payoff,
            NodeKind::Chance { probs } => node
                .children
                .iter()
                .zip(probs.iter())
                .map(|(&c, &p)| p * eval(tree, profile, player, chosen, memo, sign, c))
                .sum(),
            NodeKind::Decision { player: p, infoset } => {
                if *p == player {
                    let a = chosen[*infoset].expect("deeper infoset already resolved");
                    eval(tree, profile, player, chosen, memo, sign, node.children[a])
                } else {
                    let pol = profile.policy(*p, *infoset);
                    node.children
                        .iter()
                        .zip(pol.iter())
                        .map(|(&c, &q)| q * eval(tree, profile, player, chosen, memo, sign, c))
                        .sum()
                }
            }
        };
        memo[id] = Some(v);
        v
    }

    for x in order {
        let inf = tree.infoset(player, x);
        let mut best_a = 0;
        let mut best_v = S::neg_infinity();
        for a in 0..inf.actions.len() {
            let mut v = S::zero();
            for &h in &inf.nodes {
                let child = tree.node(h).children[a];
                v += reach.external(player, h)
                    * eval(tree, profile, player, &chosen, &mut memo, sign, child);
            }
            if v > best_v {
                best_v = v;
                best_a = a;
            }
        }
        chosen[x] = Some(best_a);
    }

    Ok(eval(tree, profile, player, &chosen, &mut memo, sign, 0))
}

/// Exact exploitability: sum over players of the best-response gain.
pub fn nash_conv_efg<S: Scalar>(tree: &GameTree<S>, profile: &BehaviorProfile<S>) -> Result<S> {
    let mut total = S::zero();
    for player in Player::BOTH {
        let br = best_response_value(tree, profile, player)?;
        let current = expected_value(tree, profile, player)?;
        total += (br - current).max(S::zero());
    }
    Ok(total)
}

/// The reach-weighted potential and its per-infoset pieces.
#[derive(Debug, Clone)]
pub struct EfgPotential<S: Scalar = f64> {
    /// Total potential, summed over both players' information sets.
    pub v: S,
    /// Per player, per infoset: `(gamma, s)` where `gamma` is half the
    /// squared norm of the reach-weighted positive advantages and `s` their
    /// total mass.
    pub per_infoset: [Vec<(S, S)>; 2],
}

impl<S: Scalar> EfgPotential<S> {
    /// One player's share of the potential.
    pub fn player_sum(&self, player: Player) -> S {
        self.per_infoset[player.index()]
            .iter()
            .map(|&(g, _)| g)
            .sum()
    }

    /// Total positive-advantage mass, summed over players and infosets.
    pub fn s_total(&self) -> S {
        self.per_infoset
            .iter()
            .flat_map(|v| v.iter().map(|&(_, s)| s))
            .sum()
    }

    /// The exact decay rate of the potential along the noiseless dynamics:
    /// `sum over infosets of 2 * s * gamma`.
    pub fn dissipation(&self) -> S {
        self.per_infoset
            .iter()
            .flat_map(|v| v.iter().map(|&(g, s)| S::cast(2.0) * s * g))
            .sum()
    }
}

pub fn efg_potential<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
) -> Result<EfgPotential<S>> {
    let reach = compute_reach(tree, profile)?;
    let tables = Player::BOTH
        .map(|p| compute_cf_values_with(tree, profile, &reach, p).expect("shape checked"));
    Ok(efg_potential_with(&tables))
}

pub fn efg_potential_with<S: Scalar>(tables: &[CfValueTable<S>; 2]) -> EfgPotential<S> {
    let mut v = S::zero();
    let mut per_infoset = [Vec::new(), Vec::new()];
    for (p, table) in tables.iter().enumerate() {
        for (x, adv) in table.advantages.iter().enumerate() {
            let w = table.external_reach[x];
            let mut gamma = S::zero();
            let mut s = S::zero();
            for &a in adv {
                let r = w * a.max(S::zero());
                gamma += r * r;
                s += r;
            }
            gamma *= S::cast(0.5);
            v += gamma;
            per_infoset[p].push((gamma, s));
        }
    }
    EfgPotential { v, per_infoset }
}
