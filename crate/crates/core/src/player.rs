use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// One of the two strategic players. Chance is modelled separately as a
/// third, non-strategic actor in extensive-form trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    #[inline]
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Array index for per-player storage.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    /// Sign of this player's payoff relative to player one's (zero-sum).
    #[inline]
    pub fn sign<S: Scalar>(self) -> S {
        match self {
            Player::One => S::one(),
            Player::Two => -S::one(),
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Player::One => write!(f, "1"),
            Player::Two => write!(f, "2"),
        }
    }
}
