//! Multichannel radio model: channels, messages, per-round intents and
//! collision resolution without collision detection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::protocol::NodeState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelClass {
    Report,
    Decay,
    Herald,
    Handshake,
    Game,
}

/// A channel, indexed 1-based within its class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChannelId {
    pub class: ChannelClass,
    pub index: u32,
}

impl ChannelId {
    pub const HANDSHAKE: ChannelId = ChannelId {
        class: ChannelClass::Handshake,
        index: 1,
    };
    pub const GAME: ChannelId = ChannelId {
        class: ChannelClass::Game,
        index: 1,
    };

    pub fn report(index: u32) -> Self {
        ChannelId {
            class: ChannelClass::Report,
            index,
        }
    }

    pub fn decay(index: u32) -> Self {
        ChannelId {
            class: ChannelClass::Decay,
            index,
        }
    }

    pub fn herald(index: u32) -> Self {
        ChannelId {
            class: ChannelClass::Herald,
            index,
        }
    }

    /// True when the index lies within the configured count for its class.
    pub fn is_valid(&self, layout: &ChannelLayout) -> bool {
        let limit = match self.class {
            ChannelClass::Report => layout.report,
            ChannelClass::Decay => layout.decay,
            ChannelClass::Herald => layout.herald,
            ChannelClass::Handshake | ChannelClass::Game => 1,
        };
        self.index >= 1 && self.index <= limit
    }
}

impl std::fmt::Display for ChannelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.class {
            ChannelClass::Report => write!(f, "R{}", self.index),
            ChannelClass::Decay => write!(f, "D{}", self.index),
            ChannelClass::Herald => write!(f, "A{}", self.index),
            ChannelClass::Handshake => f.write_str("H"),
            ChannelClass::Game => f.write_str("G"),
        }
    }
}

/// Channel counts per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelLayout {
    pub report: u32,
    pub decay: u32,
    pub herald: u32,
}

impl ChannelLayout {
    /// Distinct channels in use: report + decay + herald + handshake + game.
    pub fn total(&self) -> u32 {
        self.report + self.decay + self.herald + 2
    }

    /// Warns when the layout needs more channels than the budget `f`.
    pub fn check_budget(&self, f: u32) -> Option<String> {
        (self.total() > f).then(|| {
            format!(
                "channel layout uses {} channels (R={}, D={}, A={}, H, G) but F = {f}",
                self.total(),
                self.report,
                self.decay,
                self.herald
            )
        })
    }
}

/// Kind and payload of a protocol message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MessageKind {
    Decay,
    Adv,
    HsHerald { leader: NodeId },
    HsLeader { leader: NodeId, meet: u32 },
    Block { leader: NodeId },
    Game { leader: NodeId },
    RbgResult { leader: NodeId, success: bool, next_meet: u32 },
    RbgNotify { leader: NodeId },
    Mis,
}

impl MessageKind {
    pub fn name(&self) -> &'static str {
        match self {
            MessageKind::Decay => "decay",
            MessageKind::Adv => "adv",
            MessageKind::HsHerald { .. } => "hs_herald",
            MessageKind::HsLeader { .. } => "hs_leader",
            MessageKind::Block { .. } => "block",
            MessageKind::Game { .. } => "game",
            MessageKind::RbgResult { .. } => "rbg_result",
            MessageKind::RbgNotify { .. } => "rbg_notify",
            MessageKind::Mis => "mis",
        }
    }

    /// Whether a sender in `state` may emit this kind.
    pub fn consistent_with(&self, state: NodeState) -> bool {
        use NodeState::*;
        match self {
            MessageKind::Decay => state == D,
            MessageKind::Adv => state == A,
            MessageKind::HsHerald { .. } => state == HeraldCand,
            MessageKind::HsLeader { .. } => state == LeaderCand,
            MessageKind::Block { .. } => matches!(state, H | L),
            MessageKind::Game { .. } => matches!(state, H | L),
            MessageKind::RbgResult { .. } => state == L,
            MessageKind::RbgNotify { .. } => state == H,
            MessageKind::Mis => state == M,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: NodeId,
    /// Sender's protocol state when sending.
    pub state_tag: NodeState,
    #[serde(flatten)]
    pub kind: MessageKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    #[default]
    Inactive,
    Listen { channel: ChannelId },
    Broadcast { channel: ChannelId, message: Message },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intent {
    pub node: NodeId,
    pub action: Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delivery {
    pub receiver: NodeId,
    pub message: Message,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RadioError {
    #[error("node {0} has more than one intent this round")]
    DuplicateIntent(NodeId),
    #[error("intent names unknown node {0}")]
    UnknownNode(NodeId),
}

/// Resolves one round. A listener on channel `c` receives iff exactly one of
/// its neighbors broadcasts on `c`; broadcasters and idle nodes receive
/// nothing. Collisions and silence are indistinguishable. Deliveries are
/// ordered by receiver id.
pub fn resolve_round(g: &Graph, intents: &[Intent]) -> Result<Vec<Delivery>, RadioError> {
    let mut actions = vec![None; g.node_count()];
    for it in intents {
        let slot = actions
            .get_mut(it.node)
            .ok_or(RadioError::UnknownNode(it.node))?;
        if slot.is_some() {
            return Err(RadioError::DuplicateIntent(it.node));
        }
        *slot = Some(it.action);
    }
    let actions: Vec<Action> = actions.into_iter().map(Option::unwrap_or_default).collect();
    Ok((0..g.node_count())
        .filter_map(|v| {
            receive(g, &actions, v).map(|message| Delivery {
                receiver: v,
                message,
            })
        })
        .collect())
}

/// What `v` decodes this round given every node's action.
#[inline]
pub fn receive(g: &Graph, actions: &[Action], v: NodeId) -> Option<Message> {
    let Action::Listen { channel } = actions[v] else {
        return None;
    };
    let mut heard = None;
    for &u in g.neighbors(v) {
        if let Action::Broadcast { channel: c, message } = &actions[u] {
            if *c == channel {
                if heard.is_some() {
                    return None;
                }
                heard = Some(*message);
            }
        }
    }
    heard
}
