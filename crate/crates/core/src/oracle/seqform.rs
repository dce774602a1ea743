//! Sequence-form equilibrium oracle for two-player zero-sum trees.
//!
//! Realization plans replace behaviour strategies: one variable per
//! (infoset, action) pair plus the empty sequence, tied together by flow
//! conservation. The equilibrium of the zero-sum game is the solution of a
//! linear program over one player's realization plan and the dual values of
//! the opponent's constraint system; solving it once per player yields both
//! strategies and the exact game value.

use std::collections::HashMap;

use crate::efg::{BehaviorProfile, GameTree, NodeKind};
use crate::error::Result;
use crate::player::Player;
use crate::scalar::Scalar;
use crate::simplex;

use super::lp::{solve_lp, LpConstraint, LpProblem};

/// Sequence-form view of a tree: sequence indexing and the chance-weighted
/// payoff matrix.
pub struct SequenceForm<S: Scalar = f64> {
    /// Per player: number of sequences (empty sequence is index 0).
    pub num_seqs: [usize; 2],
    /// Per player: sequence index of each (infoset, action) pair.
    pub seq_of: [HashMap<(usize, usize), usize>; 2],
    /// Per player: parent sequence of each infoset.
    pub seq_of_infoset: [Vec<usize>; 2],
    /// `payoff[s1][s2]`: chance-weighted player-one payoff of terminals whose
    /// final own sequences are `(s1, s2)`.
    pub payoff: Vec<Vec<S>>,
}

impl<S: Scalar> SequenceForm<S> {
    pub fn new(tree: &GameTree<S>) -> Self {
        let mut seq_of: [HashMap<(usize, usize), usize>; 2] = [HashMap::new(), HashMap::new()];
        let mut num_seqs = [1usize; 2];
        let mut seq_of_infoset = [Vec::new(), Vec::new()];
        for player in Player::BOTH {
            let p = player.index();
            for (x, inf) in tree.infosets(player).iter().enumerate() {
                debug_assert_eq!(x, seq_of_infoset[p].len());
                let parent = inf
                    .own_sequence
                    .last()
                    .map(|pair| seq_of[p][pair])
                    .unwrap_or(0);
                seq_of_infoset[p].push(parent);
                for a in 0..inf.actions.len() {
                    seq_of[p].insert((x, a), num_seqs[p]);
                    num_seqs[p] += 1;
                }
            }
        }

        let mut payoff = vec![vec![S::zero(); num_seqs[1]]; num_seqs[0]];
        // walk down accumulating chance reach and the last own sequences
        let mut stack = vec![(0usize, S::one(), [0usize; 2])];
        while let Some((node, chance, seqs)) = stack.pop() {
            match &tree.node(node).kind {
                NodeKind::Terminal { payoff: u } => {
                    payoff[seqs[0]][seqs[1]] += chance * *u;
                }
                NodeKind::Chance { probs } => {
                    for (a, &child) in tree.node(node).children.iter().enumerate() {
                        stack.push((child, chance * probs[a], seqs));
                    }
                }
                NodeKind::Decision { player, infoset } => {
                    for (a, &child) in tree.node(node).children.iter().enumerate() {
                        let mut next = seqs;
                        next[player.index()] = seq_of[player.index()][&(*infoset, a)];
                        stack.push((child, chance, next));
                    }
                }
            }
        }

        Self { num_seqs, seq_of, seq_of_infoset, payoff }
    }

    /// Payoff to the maximizing role: `payoff[s_max][s_min]` when player one
    /// maximizes, the negated transpose otherwise.
    fn payoff_for(&self, maximizer: Player, s_max: usize, s_min: usize) -> S {
        match maximizer {
            Player::One => self.payoff[s_max][s_min],
            Player::Two => -self.payoff[s_min][s_max],
        }
    }
}

/// Equilibrium realization plan of `maximizer` and the game value to it.
fn solve_one_side<S: Scalar>(
    tree: &GameTree<S>,
    sf: &SequenceForm<S>,
    maximizer: Player,
) -> Result<(Vec<S>, S)> {
    let me = maximizer.index();
    let opp_player = maximizer.other();
    let opp = opp_player.index();
    let n_me = sf.num_seqs[me];
    let n_opp_infosets = tree.num_infosets(opp_player);
    // variables: x (own realization plan), then duals p (one per opponent
    // constraint row: root + infosets)
    let num_vars = n_me + 1 + n_opp_infosets;
    let p0 = n_me;

    let mut objective = vec![S::zero(); num_vars];
    objective[p0] = S::one();
    let mut free = vec![false; num_vars];
    for f in free.iter_mut().skip(n_me) {
        *f = true;
    }

    let mut rows = Vec::new();
    // own flow conservation: x_empty = 1, and per infoset
    // x_parent = sum_a x_(infoset, a)
    let mut row = vec![S::zero(); num_vars];
    row[0] = S::one();
    rows.push((row, LpConstraint::Eq, S::one()));
    for x in 0..tree.num_infosets(maximizer) {
        let mut row = vec![S::zero(); num_vars];
        row[sf.seq_of_infoset[me][x]] = -S::one();
        for a in 0..tree.infoset(maximizer, x).actions.len() {
            row[sf.seq_of[me][&(x, a)]] = S::one();
        }
        rows.push((row, LpConstraint::Eq, S::zero()));
    }
    // dual feasibility per opponent sequence:
    //   (F^T p)_s - (A^T x)_s <= 0
    // where row 0 of F marks the empty sequence and row (1 + j) has -1 at
    // infoset j's parent sequence and +1 at its action sequences.
    for s in 0..sf.num_seqs[opp] {
        let mut row = vec![S::zero(); num_vars];
        if s == 0 {
            row[p0] = S::one();
        }
        for j in 0..n_opp_infosets {
            if sf.seq_of_infoset[opp][j] == s {
                row[p0 + 1 + j] += S::one();
            }
        }
        // s > 0 corresponds to exactly one (infoset, action) pair
        if s > 0 {
            let &(j, _) = sf.seq_of[opp]
                .iter()
                .find(|(_, &idx)| idx == s)
                .map(|(pair, _)| pair)
                .expect("every sequence belongs to an infoset");
            row[p0 + 1 + j] -= S::one();
        }
        for s_me in 0..n_me {
            row[s_me] = -sf.payoff_for(maximizer, s_me, s);
        }
        rows.push((row, LpConstraint::LessEq, S::zero()));
    }

    let solution = solve_lp(&LpProblem { num_vars, objective, rows, free })?;
    Ok((solution.point[..n_me].to_vec(), solution.value))
}

/// Behaviour strategy induced by a realization plan; infosets the player
/// itself never reaches get uniform play (their choice affects neither the
/// value nor any best response).
fn plan_to_behavior<S: Scalar>(
    tree: &GameTree<S>,
    sf: &SequenceForm<S>,
    player: Player,
    plan: &[S],
) -> Vec<Vec<S>> {
    let p = player.index();
    (0..tree.num_infosets(player))
        .map(|x| {
            let n = tree.infoset(player, x).actions.len();
            let parent = plan[sf.seq_of_infoset[p][x]];
            if parent > S::cast(1e-9) {
                let mut pol: Vec<S> = (0..n)
                    .map(|a| (plan[sf.seq_of[p][&(x, a)]] / parent).max(S::zero()))
                    .collect();
                let total: S = pol.iter().copied().sum();
                if total > S::zero() {
                    for q in pol.iter_mut() {
                        *q /= total;
                    }
                    pol
                } else {
                    simplex::uniform(n)
                }
            } else {
                simplex::uniform(n)
            }
        })
        .collect()
}

/// Exact equilibrium of a two-player zero-sum tree and the value to player
/// one, via one linear program per player.
pub fn solve_zero_sum_efg<S: Scalar>(tree: &GameTree<S>) -> Result<(BehaviorProfile<S>, S)> {
    let sf = SequenceForm::new(tree);
    let (plan1, value) = solve_one_side(tree, &sf, Player::One)?;
    let (plan2, _value2) = solve_one_side(tree, &sf, Player::Two)?;
    let profile = BehaviorProfile::new(
        tree,
        [
            plan_to_behavior(tree, &sf, Player::One, &plan1),
            plan_to_behavior(tree, &sf, Player::Two, &plan2),
        ],
    )?;
    Ok((profile, value))
}
