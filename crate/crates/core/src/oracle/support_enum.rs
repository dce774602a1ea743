//! Support-enumeration equilibrium oracle for small zero-sum matrix games.
//!
//! For every pair of equal-size supports, solve the indifference system for
//! each player and keep solutions that are valid distributions and best
//! responses. Intended for the handful-of-actions builders used in tests;
//! cost grows combinatorially.

use crate::nfg::{MixedProfile, NormalFormGame};
use crate::player::Player;
use crate::scalar::Scalar;

use super::linalg::solve_linear;

const FEAS_TOL: f64 = 1e-9;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Solves for a strategy of `owner` supported on `support` that makes the
/// opponent indifferent across `target`; returns (full strategy, value of the
/// game to player one) or `None`.
fn indifference_solution<S: Scalar>(
    game: &NormalFormGame<S>,
    owner: Player,
    support: &[usize],
    target: &[usize],
) -> Option<(Vec<S>, S)> {
    let k = support.len();
    // unknowns: strategy weights on `support` plus the value v (player-one
    // payoff); equations: opponent indifferent on `target`, weights sum to 1
    let mut a = vec![vec![S::zero(); k + 1]; k + 1];
    let mut b = vec![S::zero(); k + 1];
    for (row, &t) in target.iter().enumerate() {
        for (col, &s) in support.iter().enumerate() {
            a[row][col] = match owner {
                // owner = player two: equations over player one's actions t
                Player::Two => game.payoff(Player::One, t, s),
                // owner = player one: equations over player two's actions t
                Player::One => game.payoff(Player::One, s, t),
            };
        }
        a[row][k] = -S::one();
    }
    for col in 0..k {
        a[k][col] = S::one();
    }
    b[k] = S::one();
    let sol = solve_linear(a, b)?;
    let tol = S::cast(FEAS_TOL);
    let mut strategy = vec![S::zero(); game.num_actions(owner)];
    for (col, &s) in support.iter().enumerate() {
        if sol[col] < -tol {
            return None;
        }
        strategy[s] = sol[col].max(S::zero());
    }
    let total: S = strategy.iter().copied().sum();
    for p in strategy.iter_mut() {
        *p /= total;
    }
    Some((strategy, sol[k]))
}

/// All equilibria found by equal-size support enumeration, in enumeration
/// order.
pub fn enumerate_equilibria<S: Scalar>(game: &NormalFormGame<S>) -> Vec<MixedProfile<S>> {
    let n1 = game.num_actions(Player::One);
    let n2 = game.num_actions(Player::Two);
    let tol = S::cast(FEAS_TOL);
    let mut found = Vec::new();
    for k in 1..=n1.min(n2) {
        for s1 in combinations(n1, k) {
            for s2 in combinations(n2, k) {
                let Some((x, v1)) = indifference_solution(game, Player::One, &s1, &s2) else {
                    continue;
                };
                let Some((y, v2)) = indifference_solution(game, Player::Two, &s2, &s1) else {
                    continue;
                };
                if (v1 - v2).abs() > tol {
                    continue;
                }
                // best-response checks off support
                let mut ok = true;
                for a in 0..n1 {
                    let ua: S = (0..n2).map(|b| y[b] * game.payoff(Player::One, a, b)).sum();
                    if ua > v1 + tol {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    for b in 0..n2 {
                        let ub: S = (0..n1).map(|a| x[a] * game.payoff(Player::One, a, b)).sum();
                        if ub < v1 - tol {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                if let Ok(profile) = MixedProfile::new(x.clone(), y.clone()) {
                    found.push(profile);
                }
            }
        }
    }
    found
}

/// First equilibrium in enumeration order.
pub fn find_equilibrium<S: Scalar>(game: &NormalFormGame<S>) -> Option<MixedProfile<S>> {
    let n1 = game.num_actions(Player::One);
    let n2 = game.num_actions(Player::Two);
    let tol = S::cast(FEAS_TOL);
    for k in 1..=n1.min(n2) {
        for s1 in combinations(n1, k) {
            for s2 in combinations(n2, k) {
                let Some((x, v1)) = indifference_solution(game, Player::One, &s1, &s2) else {
                    continue;
                };
                let Some((y, v2)) = indifference_solution(game, Player::Two, &s2, &s1) else {
                    continue;
                };
                if (v1 - v2).abs() > tol {
                    continue;
                }
                let br1 = (0..n1)
                    .map(|a| (0..n2).map(|b| y[b] * game.payoff(Player::One, a, b)).sum::<S>())
                    .fold(S::neg_infinity(), S::max);
                let br2 = (0..n2)
                    .map(|b| (0..n1).map(|a| x[a] * game.payoff(Player::One, a, b)).sum::<S>())
                    .fold(S::infinity(), S::min);
                if br1 > v1 + tol || br2 < v1 - tol {
                    continue;
                }
                if let Ok(profile) = MixedProfile::new(x, y) {
                    return Some(profile);
                }
            }
        }
    }
    None
}
