//! Two-player zero-sum normal-form games.
//!
//! Payoffs are stored once from player one's perspective; every accessor for
//! player two returns the negation, so the zero-sum identity
//! `u_1(a,b) + u_2(a,b) = 0` holds exactly by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::player::Player;
use crate::scalar::Scalar;
use crate::schedule::{Lerp, ParamSchedule};
use crate::simplex;

/// Finite two-player zero-sum game with a dense payoff matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormGame<S: Scalar = f64> {
    rows: usize,
    cols: usize,
    /// Row-major player-one payoffs, `payoff[a1 * cols + a2]`.
    payoff: Vec<S>,
    u_max: S,
}

impl<S: Scalar> NormalFormGame<S> {
    /// Builds a game from player-one payoffs. `u_max` is the largest absolute
    /// entry; all entries must be finite.
    pub fn from_payoffs(rows: usize, cols: usize, payoff: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 || payoff.len() != rows * cols {
            return Err(Error::Shape(format!(
                "payoff matrix of {} entries does not match {rows}x{cols}",
                payoff.len()
            )));
        }
        if payoff.iter().any(|u| !u.is_finite()) {
            return Err(Error::Shape("payoff matrix has non-finite entries".into()));
        }
        let u_max = payoff
            .iter()
            .map(|u| u.abs())
            .fold(S::zero(), S::max);
        Ok(Self { rows, cols, payoff, u_max })
    }

    pub fn num_actions(&self, player: Player) -> usize {
        match player {
            Player::One => self.rows,
            Player::Two => self.cols,
        }
    }

    /// Payoff to `player` when player one plays `a1` and player two plays `a2`.
    #[inline]
    pub fn payoff(&self, player: Player, a1: usize, a2: usize) -> S {
        let u1 = self.payoff[a1 * self.cols + a2];
        match player {
            Player::One => u1,
            Player::Two => -u1,
        }
    }

    /// Largest absolute payoff.
    pub fn u_max(&self) -> S {
        self.u_max
    }

    fn check_profile(&self, profile: &MixedProfile<S>) -> Result<()> {
        if profile.strategy(Player::One).len() != self.rows
            || profile.strategy(Player::Two).len() != self.cols
        {
            return Err(Error::Shape(format!(
                "profile dimensions ({}, {}) do not match game ({}, {})",
                profile.strategy(Player::One).len(),
                profile.strategy(Player::Two).len(),
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }

    /// Expected payoff of `player` under a mixed profile. Player two's value
    /// is the exact negation of player one's, so the zero-sum identity holds
    /// bit for bit.
    pub fn expected_payoff(&self, profile: &MixedProfile<S>, player: Player) -> Result<S> {
        self.check_profile(profile)?;
        let payoffs = self.action_payoffs(profile, Player::One)?;
        let v1 = simplex::weighted_mean(profile.strategy(Player::One), &payoffs);
        Ok(player.sign::<S>() * v1)
    }

    /// Expected payoff of each pure action of `player` against the opponent's
    /// mixed strategy.
    pub fn action_payoffs(&self, profile: &MixedProfile<S>, player: Player) -> Result<Vec<S>> {
        self.check_profile(profile)?;
        let opponent = profile.strategy(player.other());
        let n = self.num_actions(player);
        let mut out = vec![S::zero(); n];
        for (a, out_a) in out.iter_mut().enumerate() {
            let mut acc = S::zero();
            for (b, &q) in opponent.iter().enumerate() {
                let u = match player {
                    Player::One => self.payoff(Player::One, a, b),
                    Player::Two => self.payoff(Player::Two, b, a),
                };
                acc += q * u;
            }
            *out_a = acc;
        }
        Ok(out)
    }

    /// Per-action advantages `u_i(a) - mean`, centered so that the
    /// own-strategy weighted mean is zero.
    pub fn advantages(&self, profile: &MixedProfile<S>, player: Player) -> Result<Vec<S>> {
        let payoffs = self.action_payoffs(profile, player)?;
        let mean = simplex::weighted_mean(profile.strategy(player), &payoffs);
        Ok(payoffs.into_iter().map(|u| u - mean).collect())
    }

    /// Sum over players of the best-response gain; zero exactly at Nash
    /// equilibria. Each player's term is clamped at zero to absorb rounding.
    pub fn nash_conv(&self, profile: &MixedProfile<S>) -> Result<S> {
        let mut total = S::zero();
        for player in Player::BOTH {
            let payoffs = self.action_payoffs(profile, player)?;
            let best = payoffs.iter().copied().fold(S::neg_infinity(), S::max);
            let current = simplex::weighted_mean(profile.strategy(player), &payoffs);
            total += (best - current).max(S::zero());
        }
        Ok(total)
    }
}

/// One mixed strategy per player; the learning state in normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile<S: Scalar = f64> {
    strategies: [Vec<S>; 2],
}

impl<S: Scalar> MixedProfile<S> {
    pub fn new(pi_1: Vec<S>, pi_2: Vec<S>) -> Result<Self> {
        simplex::validate(&pi_1)?;
        simplex::validate(&pi_2)?;
        Ok(Self { strategies: [pi_1, pi_2] })
    }

    pub fn uniform(n1: usize, n2: usize) -> Self {
        Self {
            strategies: [simplex::uniform(n1), simplex::uniform(n2)],
        }
    }

    pub fn random<R: rand::Rng>(n1: usize, n2: usize, min_mass: S, rng: &mut R) -> Self {
        Self {
            strategies: [
                simplex::random_interior(n1, min_mass, rng),
                simplex::random_interior(n2, min_mass, rng),
            ],
        }
    }

    pub fn strategy(&self, player: Player) -> &[S] {
        &self.strategies[player.index()]
    }

    pub fn strategy_mut(&mut self, player: Player) -> &mut Vec<S> {
        &mut self.strategies[player.index()]
    }

    pub fn validate(&self) -> Result<()> {
        simplex::validate(&self.strategies[0])?;
        simplex::validate(&self.strategies[1])
    }
}

/// Matchup weights of the biased rock-paper-scissors family.
///
/// `a_rp` weights the rock/paper matchup (paper wins `a_rp`), `a_ps` the
/// paper/scissors matchup (scissors wins `a_ps`) and `a_sr` the
/// scissors/rock matchup (rock wins `a_sr`). The interior equilibrium is
/// `(a_ps, a_sr, a_rp) / (a_ps + a_sr + a_rp)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpsParams<S: Scalar = f64> {
    pub a_rp: S,
    pub a_ps: S,
    pub a_sr: S,
    /// BRPS-W variant: adds a fourth action scoring zero against everything.
    pub with_fourth_action: bool,
}

impl<S: Scalar> RpsParams<S> {
    pub fn new(a_rp: S, a_ps: S, a_sr: S) -> Self {
        Self { a_rp, a_ps, a_sr, with_fourth_action: false }
    }

    pub fn with_fourth_action(mut self) -> Self {
        self.with_fourth_action = true;
        self
    }

    /// Standard unit-stakes rock-paper-scissors.
    pub fn standard() -> Self {
        Self::new(S::one(), S::one(), S::one())
    }

    /// The interior equilibrium strategy of the three RPS actions
    /// (the fourth action of BRPS-W gets zero mass).
    pub fn equilibrium(&self) -> Vec<S> {
        let total = self.a_ps + self.a_sr + self.a_rp;
        let mut eq = vec![self.a_ps / total, self.a_sr / total, self.a_rp / total];
        if self.with_fourth_action {
            eq.push(S::zero());
        }
        eq
    }
}

impl<S: Scalar> Lerp<S> for RpsParams<S> {
    fn lerp(&self, other: &Self, w: S) -> Self {
        Self {
            a_rp: self.a_rp.lerp(&other.a_rp, w),
            a_ps: self.a_ps.lerp(&other.a_ps, w),
            a_sr: self.a_sr.lerp(&other.a_sr, w),
            with_fourth_action: self.with_fourth_action || other.with_fourth_action,
        }
    }
}

/// Builds the (biased) rock-paper-scissors matrix: antisymmetric, zero
/// diagonal, winner of each matchup takes the matchup weight.
pub fn build_rps<S: Scalar>(params: RpsParams<S>) -> NormalFormGame<S> {
    let z = S::zero();
    // Row player actions: R, P, S (and W for the four-action variant).
    let m = [
        [z, -params.a_rp, params.a_sr],
        [params.a_rp, z, -params.a_ps],
        [-params.a_sr, params.a_ps, z],
    ];
    if params.with_fourth_action {
        let mut payoff = Vec::with_capacity(16);
        for row in &m {
            payoff.extend_from_slice(row);
            payoff.push(z);
        }
        payoff.extend_from_slice(&[z, z, z, z]);
        NormalFormGame::from_payoffs(4, 4, payoff).expect("valid 4x4 construction")
    } else {
        let payoff: Vec<S> = m.iter().flatten().copied().collect();
        NormalFormGame::from_payoffs(3, 3, payoff).expect("valid 3x3 construction")
    }
}

/// Instantaneous game of a nonstationary RPS schedule. The construction is
/// antisymmetric for every parameter point, so the game is zero-sum at all
/// times.
pub fn game_at<S: Scalar>(schedule: &ParamSchedule<RpsParams<S>>, t: u64) -> NormalFormGame<S> {
    build_rps(schedule.at(t))
}
