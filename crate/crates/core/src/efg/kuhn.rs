//! Three-card Kuhn poker with a configurable bet size.
//!
//! Both players ante 1; one card each from {J, Q, K} is dealt uniformly over
//! the 6 ordered pairs. Player one checks or bets; a check can be answered by
//! a check (showdown for the antes) or a bet, a bet by a fold or a call.
//! Calling contests a pot of `1 + bet_size` per player.
//!
//! A negative bet size is taken literally as a signed transfer: the called
//! bet amount flips the direction of the pot won at showdown while the fold
//! payoffs (antes only) are unchanged. The tree shape never depends on the
//! bet size.
//!
//! Structure, fixed by enumeration: 1 chance node, 24 decision nodes,
//! 30 terminals, 6 information sets per player.

use super::{GameTree, TreeBuilder};
use crate::player::Player;
use crate::scalar::Scalar;

const CARDS: [&str; 3] = ["J", "Q", "K"];

pub fn build_kuhn<S: Scalar>(bet_size: S) -> GameTree<S> {
    let mut b = TreeBuilder::new(format!("kuhn(bet={bet_size})"));
    let sixth = S::one() / S::cast(6);
    let root = b.chance(None, vec![sixth; 6]);

    for c1 in 0..3 {
        for c2 in 0..3 {
            if c1 == c2 {
                continue;
            }
            let deal = format!("{}{}", CARDS[c1], CARDS[c2]);
            // +1 pot to whoever holds the higher card
            let win: S = if c1 > c2 { S::one() } else { -S::one() };
            let called = win * (S::one() + bet_size);

            let key1 = |seq: &str| format!("1|{}||{}", CARDS[c1], seq);
            let key2 = |seq: &str| format!("2|{}||{}", CARDS[c2], seq);

            let p1 = b
                .decision(Some((root, &deal)), Player::One, &key1(""), &["x", "b"])
                .expect("fresh infoset");

            // player one checks
            let p2x = b
                .decision(Some((p1, "x")), Player::Two, &key2("x"), &["x", "b"])
                .expect("fresh infoset");
            b.terminal((p2x, "x"), win);
            let p1xb = b
                .decision(Some((p2x, "b")), Player::One, &key1("xb"), &["f", "c"])
                .expect("fresh infoset");
            b.terminal((p1xb, "f"), -S::one());
            b.terminal((p1xb, "c"), called);

            // player one bets
            let p2b = b
                .decision(Some((p1, "b")), Player::Two, &key2("b"), &["f", "c"])
                .expect("fresh infoset");
            b.terminal((p2b, "f"), S::one());
            b.terminal((p2b, "c"), called);
        }
    }
    b.finish().expect("kuhn construction is valid")
}
