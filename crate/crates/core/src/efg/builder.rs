//! Incremental construction of game trees.
//!
//! Nodes are appended in parent-before-child order; information sets are
//! deduplicated by key. `finish` runs the full structural validation.

use std::collections::HashMap;

use super::{GameTree, Infoset, Node, NodeKind};
use crate::error::{Error, Result};
use crate::player::Player;
use crate::scalar::Scalar;

pub struct TreeBuilder<S: Scalar> {
    name: String,
    nodes: Vec<Node<S>>,
    infosets: [Vec<Infoset>; 2],
    key_to_id: [HashMap<String, usize>; 2],
}

impl<S: Scalar> TreeBuilder<S> {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            nodes: Vec::new(),
            infosets: [Vec::new(), Vec::new()],
            key_to_id: [HashMap::new(), HashMap::new()],
        }
    }

    fn attach(&mut self, parent: Option<(usize, &str)>, kind: NodeKind<S>) -> usize {
        let id = self.nodes.len();
        let (parent_id, action_index, action_label) = match parent {
            None => (None, 0, String::new()),
            Some((p, label)) => {
                let idx = self.nodes[p].children.len();
                self.nodes[p].children.push(id);
                (Some(p), idx, label.to_string())
            }
        };
        self.nodes.push(Node {
            parent: parent_id,
            action_index,
            action_label,
            kind,
            children: Vec::new(),
        });
        if let NodeKind::Decision { player, infoset } = &self.nodes[id].kind {
            let (p, x) = (*player, *infoset);
            self.infosets[p.index()][x].nodes.push(id);
        }
        id
    }

    /// Adds a chance node whose `probs` align with the children attached
    /// afterwards.
    pub fn chance(&mut self, parent: Option<(usize, &str)>, probs: Vec<S>) -> usize {
        self.attach(parent, NodeKind::Chance { probs })
    }

    /// Adds a decision node, creating or reusing the information set `key`.
    pub fn decision(
        &mut self,
        parent: Option<(usize, &str)>,
        player: Player,
        key: &str,
        actions: &[&str],
    ) -> Result<usize> {
        let infoset = match self.key_to_id[player.index()].get(key) {
            Some(&x) => {
                let existing = &self.infosets[player.index()][x];
                if existing.actions != actions {
                    return Err(Error::InvalidTree(format!(
                        "infoset {key} reused with different actions"
                    )));
                }
                x
            }
            None => {
                let x = self.infosets[player.index()].len();
                self.infosets[player.index()].push(Infoset {
                    key: key.to_string(),
                    player,
                    actions: actions.iter().map(|s| s.to_string()).collect(),
                    nodes: Vec::new(),
                    own_sequence: Vec::new(),
                });
                self.key_to_id[player.index()].insert(key.to_string(), x);
                x
            }
        };
        Ok(self.attach(parent, NodeKind::Decision { player, infoset }))
    }

    pub fn terminal(&mut self, parent: (usize, &str), payoff: S) -> usize {
        self.attach(Some(parent), NodeKind::Terminal { payoff })
    }

    pub fn finish(self) -> Result<GameTree<S>> {
        GameTree::from_parts(self.name, self.nodes, self.infosets)
    }
}
