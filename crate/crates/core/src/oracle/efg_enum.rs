//! Exhaustive-enumeration oracles for small extensive-form games.
//!
//! These walk every root-to-leaf path explicitly instead of sharing the
//! backward-induction passes used by the implementation, so they can serve
//! as independent cross-checks.

use crate::efg::{BehaviorProfile, GameTree, NodeKind};
use crate::player::Player;
use crate::scalar::Scalar;

/// Move probability at `node` for the edge `action`, given the profile;
/// chance uses its fixed distribution.
fn edge_prob<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    node: usize,
    action: usize,
) -> (S, Option<Player>) {
    match &tree.node(node).kind {
        NodeKind::Chance { probs } => (probs[action], None),
        NodeKind::Decision { player, infoset } => {
            (profile.policy(*player, *infoset)[action], Some(*player))
        }
        NodeKind::Terminal { .. } => unreachable!("terminals have no edges"),
    }
}

fn paths<S: Scalar>(tree: &GameTree<S>) -> Vec<Vec<(usize, usize)>> {
    // every (node, action) path from root to each terminal
    let mut out = Vec::new();
    let mut stack = vec![(0usize, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        if matches!(tree.node(node).kind, NodeKind::Terminal { .. }) {
            out.push(path);
            continue;
        }
        for (a, &child) in tree.node(node).children.iter().enumerate() {
            let mut next = path.clone();
            next.push((node, a));
            stack.push((child, next));
        }
    }
    out
}

/// Counterfactual values `v[x][a]` of `player` by summing, over every
/// terminal and every on-path visit of one of the player's infosets, the
/// product of external reach up to the visit and full reach after it.
pub fn cf_values_by_enumeration<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    player: Player,
) -> Vec<Vec<S>> {
    let mut values: Vec<Vec<S>> = tree
        .infosets(player)
        .iter()
        .map(|inf| vec![S::zero(); inf.actions.len()])
        .collect();
    for path in paths(tree) {
        let terminal = {
            let (last_node, last_action) = *path.last().expect("paths reach terminals");
            tree.node(last_node).children[last_action]
        };
        let payoff = tree.terminal_payoff(terminal, player);
        for (k, &(node, action)) in path.iter().enumerate() {
            let infoset = match &tree.node(node).kind {
                NodeKind::Decision { player: p, infoset } if *p == player => *infoset,
                _ => continue,
            };
            // external reach strictly before this visit
            let mut external = S::one();
            for &(n, a) in &path[..k] {
                let (prob, owner) = edge_prob(tree, profile, n, a);
                if owner != Some(player) {
                    external *= prob;
                }
            }
            // full reach strictly after the visited edge
            let mut onward = S::one();
            for &(n, a) in &path[k + 1..] {
                let (prob, _) = edge_prob(tree, profile, n, a);
                onward *= prob;
            }
            values[infoset][action] += external * onward * payoff;
        }
    }
    values
}

/// Expected payoff to `player` by explicit path enumeration.
pub fn expected_value_by_walk<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    player: Player,
) -> S {
    let mut total = S::zero();
    for path in paths(tree) {
        let (last_node, last_action) = *path.last().expect("paths reach terminals");
        let terminal = tree.node(last_node).children[last_action];
        let mut reach = S::one();
        for &(n, a) in &path {
            reach *= edge_prob(tree, profile, n, a).0;
        }
        total += reach * tree.terminal_payoff(terminal, player);
    }
    total
}

/// Best-response value of `player` by enumerating every pure assignment of
/// actions to its information sets. Exponential; meant for Kuhn-sized games.
pub fn best_response_by_enumeration<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
    player: Player,
) -> S {
    let sizes: Vec<usize> = tree
        .infosets(player)
        .iter()
        .map(|inf| inf.actions.len())
        .collect();
    let total: usize = sizes.iter().product();
    assert!(
        total <= 1 << 20,
        "pure-strategy enumeration infeasible for {total} strategies"
    );
    let mut best = S::neg_infinity();
    let mut assignment = vec![0usize; sizes.len()];
    for mut code in 0..total {
        for (x, &size) in sizes.iter().enumerate() {
            assignment[x] = code % size;
            code /= size;
        }
        let mut pure = profile.clone();
        for (x, &a) in assignment.iter().enumerate() {
            let pol = pure.policy_mut(player, x);
            for (i, p) in pol.iter_mut().enumerate() {
                *p = if i == a { S::one() } else { S::zero() };
            }
        }
        let v = expected_value_by_walk(tree, &pure, player);
        best = best.max(v);
    }
    best
}

/// Exploitability via the pure-strategy enumeration oracle.
pub fn nash_conv_by_enumeration<S: Scalar>(
    tree: &GameTree<S>,
    profile: &BehaviorProfile<S>,
) -> S {
    let mut total = S::zero();
    for player in Player::BOTH {
        let br = best_response_by_enumeration(tree, profile, player);
        let current = expected_value_by_walk(tree, profile, player);
        total += (br - current).max(S::zero());
    }
    total
}
