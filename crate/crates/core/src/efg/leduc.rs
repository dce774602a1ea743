//! Leduc hold'em: 6 cards (3 ranks, 2 suits), two betting rounds.
//!
//! Both players ante 1 and receive one private card; 30 ordered private
//! deals. Round one uses a bet size of 2, then a public card is revealed and
//! round two uses a bet size of 4. Each round allows at most two bets/raises
//! and the first player acts first. At showdown a private card pairing the
//! public card wins, otherwise the higher rank wins and equal ranks split the
//! pot (payoff zero).

use super::{GameTree, TreeBuilder};
use crate::player::Player;
use crate::scalar::Scalar;

const CARD_NAMES: [&str; 6] = ["Ja", "Jb", "Qa", "Qb", "Ka", "Kb"];

fn rank(card: usize) -> usize {
    card / 2
}

struct LeducCtx {
    cards: [usize; 2],
}

pub fn build_leduc<S: Scalar>() -> GameTree<S> {
    let mut b = TreeBuilder::new("leduc");
    let deal_prob = S::one() / S::cast(30);
    let root = b.chance(None, vec![deal_prob; 30]);
    for c1 in 0..6 {
        for c2 in 0..6 {
            if c1 == c2 {
                continue;
            }
            let ctx = LeducCtx { cards: [c1, c2] };
            let label = format!("{}{}", CARD_NAMES[c1], CARD_NAMES[c2]);
            decision_point(
                &mut b,
                &ctx,
                (root, &label),
                None,
                "",
                "",
                [1, 1],
                0,
                Player::One,
            );
        }
    }
    b.finish().expect("leduc construction is valid")
}

/// One betting decision. `seq1`/`seq2` are the action strings of rounds one
/// and two; the round in play is two exactly when a public card is set.
#[allow(clippy::too_many_arguments)]
fn decision_point<S: Scalar>(
    b: &mut TreeBuilder<S>,
    ctx: &LeducCtx,
    parent: (usize, &str),
    public: Option<usize>,
    seq1: &str,
    seq2: &str,
    contrib: [i64; 2],
    raises: u8,
    to_act: Player,
) {
    let me = to_act.index();
    let other = 1 - me;
    let owed = contrib[other] - contrib[me];
    let round_seq = if public.is_some() { seq2 } else { seq1 };

    let mut actions: Vec<&str> = if owed == 0 { vec!["x"] } else { vec!["f", "c"] };
    if raises < 2 {
        actions.push("r");
    }

    let public_name = public.map(|c| CARD_NAMES[c]).unwrap_or("-");
    let seq_key = if public.is_some() {
        format!("{seq1}/{seq2}")
    } else {
        seq1.to_string()
    };
    let key = format!(
        "{}|{}|{}|{}",
        to_act, CARD_NAMES[ctx.cards[me]], public_name, seq_key
    );
    let node = b
        .decision(Some(parent), to_act, &key, &actions)
        .expect("consistent infoset actions");

    let unit: i64 = if public.is_some() { 4 } else { 2 };
    for action in actions {
        let mut next = contrib;
        match action {
            "x" => {
                if round_seq.is_empty() {
                    recurse(b, ctx, (node, "x"), public, seq1, seq2, "x", next, raises, to_act.other(), false);
                } else {
                    // both checked: round over at equal contributions
                    end_round(b, ctx, (node, "x"), public, seq1, seq2, "x", next);
                }
            }
            "c" => {
                next[me] = contrib[other];
                end_round(b, ctx, (node, "c"), public, seq1, seq2, "c", next);
            }
            "r" => {
                next[me] = contrib[other] + unit;
                recurse(b, ctx, (node, "r"), public, seq1, seq2, "r", next, raises + 1, to_act.other(), false);
            }
            "f" => {
                let payoff = if to_act == Player::One {
                    -S::cast(contrib[0])
                } else {
                    S::cast(contrib[1])
                };
                b.terminal((node, "f"), payoff);
            }
            _ => unreachable!(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse<S: Scalar>(
    b: &mut TreeBuilder<S>,
    ctx: &LeducCtx,
    parent: (usize, &str),
    public: Option<usize>,
    seq1: &str,
    seq2: &str,
    push: &str,
    contrib: [i64; 2],
    raises: u8,
    to_act: Player,
    _round_over: bool,
) {
    let (s1, s2) = appended(public, seq1, seq2, push);
    decision_point(b, ctx, parent, public, &s1, &s2, contrib, raises, to_act);
}

fn appended(public: Option<usize>, seq1: &str, seq2: &str, push: &str) -> (String, String) {
    if public.is_some() {
        (seq1.to_string(), format!("{seq2}{push}"))
    } else {
        (format!("{seq1}{push}"), seq2.to_string())
    }
}

#[allow(clippy::too_many_arguments)]
fn end_round<S: Scalar>(
    b: &mut TreeBuilder<S>,
    ctx: &LeducCtx,
    parent: (usize, &str),
    public: Option<usize>,
    seq1: &str,
    seq2: &str,
    push: &str,
    contrib: [i64; 2],
) {
    let (s1, s2) = appended(public, seq1, seq2, push);
    match public {
        None => {
            // reveal the public card, then play round two
            let remaining: Vec<usize> =
                (0..6).filter(|c| *c != ctx.cards[0] && *c != ctx.cards[1]).collect();
            let quarter = S::one() / S::cast(4);
            let chance = b.chance(Some(parent), vec![quarter; 4]);
            for pub_card in remaining {
                decision_point(
                    b,
                    ctx,
                    (chance, CARD_NAMES[pub_card]),
                    Some(pub_card),
                    &s1,
                    &s2,
                    contrib,
                    0,
                    Player::One,
                );
            }
        }
        Some(pub_card) => {
            debug_assert_eq!(contrib[0], contrib[1]);
            let payoff = S::cast(showdown_sign(ctx.cards, pub_card)) * S::cast(contrib[0]);
            b.terminal(parent, payoff);
        }
    }
}

/// +1 if player one wins the showdown, -1 if player two, 0 on a split.
fn showdown_sign(cards: [usize; 2], public: usize) -> i64 {
    let pair1 = rank(cards[0]) == rank(public);
    let pair2 = rank(cards[1]) == rank(public);
    match (pair1, pair2) {
        (true, _) => 1,
        (_, true) => -1,
        _ => match rank(cards[0]).cmp(&rank(cards[1])) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
        },
    }
}
