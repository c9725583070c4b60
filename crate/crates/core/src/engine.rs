//! Round-by-round simulation engine: wakes nodes, gathers their actions,
//! resolves the radio round and applies receptions and state changes.

use std::hash::Hasher;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId};
use crate::protocol::{NodeCtx, NodeState, ProtocolParams};
use crate::radio::{receive, Action, Message};

/// One state change, logged in (round, node) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub round: u64,
    pub node: NodeId,
    pub from: NodeState,
    pub to: NodeState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeliveryRecord {
    pub round: u64,
    pub receiver: NodeId,
    #[serde(flatten)]
    pub message: Message,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u64,
    pub woken: usize,
    pub intents: usize,
    pub delivered: usize,
    pub transitions: usize,
    pub new_m: usize,
    pub new_e: usize,
}

/// What the engine keeps beyond the running hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Recording {
    pub transitions: bool,
    pub deliveries: bool,
}

pub const EMPTY_TRACE_HASH: u64 = 0xcbf2_9ce4_8422_2325;

fn hash_record(h: &mut FnvHasher, t: &TransitionRecord) {
    h.write(&t.round.to_le_bytes());
    h.write(&(t.node as u64).to_le_bytes());
    h.write(&[t.from.code(), t.to.code()]);
}

/// FNV-1a 64 over the canonical byte form of a transition log.
pub fn hash_transitions<'a>(log: impl IntoIterator<Item = &'a TransitionRecord>) -> u64 {
    let mut h = FnvHasher::default();
    for t in log {
        hash_record(&mut h, t);
    }
    h.finish()
}

pub struct Engine<'g> {
    graph: &'g Graph,
    params: ProtocolParams,
    seed: u64,
    nodes: Vec<NodeCtx>,
    actions: Vec<Action>,
    wake: Vec<u64>,
    wake_order: Vec<NodeId>,
    wake_next: usize,
    live: Vec<NodeId>,
    round: u64,
    hasher: FnvHasher,
    round_log: Vec<TransitionRecord>,
    recording: Recording,
    transitions: Vec<TransitionRecord>,
    deliveries: Vec<DeliveryRecord>,
    hs_start: Vec<Option<u64>>,
    hf_entry: Vec<Option<u64>>,
    decided: Vec<Option<u64>>,
}

impl<'g> Engine<'g> {
    /// `wake[v]` is the round in which `v` wakes up.
    pub fn new(graph: &'g Graph, params: ProtocolParams, wake: Vec<u64>, seed: u64) -> Self {
        let n = graph.node_count();
        assert_eq!(wake.len(), n, "one wake round per node");
        let mut wake_order: Vec<NodeId> = (0..n).collect();
        wake_order.sort_by_key(|&v| (wake[v], v));
        Engine {
            graph,
            params,
            seed,
            nodes: (0..n).map(|v| NodeCtx::new(v, seed)).collect(),
            actions: vec![Action::Inactive; n],
            wake,
            wake_order,
            wake_next: 0,
            live: Vec::new(),
            round: 0,
            hasher: FnvHasher::default(),
            round_log: Vec::new(),
            recording: Recording::default(),
            transitions: Vec::new(),
            deliveries: Vec::new(),
            hs_start: vec![None; n],
            hf_entry: vec![None; n],
            decided: vec![None; n],
        }
    }

    pub fn with_recording(mut self, recording: Recording) -> Self {
        self.recording = recording;
        self
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Index of the next round to execute (= rounds executed so far).
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn nodes(&self) -> &[NodeCtx] {
        &self.nodes
    }

    pub fn wake_schedule(&self) -> &[u64] {
        &self.wake
    }

    /// Round in which each node last entered H′ or L′.
    pub fn hs_start(&self) -> &[Option<u64>] {
        &self.hs_start
    }

    /// Round in which each node left the decay filter.
    pub fn hf_entry(&self) -> &[Option<u64>] {
        &self.hf_entry
    }

    /// Round in which each node entered M or E.
    pub fn decision_rounds(&self) -> &[Option<u64>] {
        &self.decided
    }

    /// Transitions of the round last executed, ordered by node.
    pub fn round_transitions(&self) -> &[TransitionRecord] {
        &self.round_log
    }

    /// Full transition log (empty unless recorded).
    pub fn transitions(&self) -> &[TransitionRecord] {
        &self.transitions
    }

    /// Full delivery log (empty unless recorded).
    pub fn deliveries(&self) -> &[DeliveryRecord] {
        &self.deliveries
    }

    /// Awake, not eliminated nodes in id order.
    pub fn live(&self) -> &[NodeId] {
        &self.live
    }

    pub fn all_decided(&self) -> bool {
        self.wake_next == self.nodes.len() && self.live.iter().all(|&v| self.nodes[v].state == NodeState::M)
    }

    pub fn trace_hash(&self) -> u64 {
        self.hasher.finish()
    }

    pub fn advance(&mut self) -> RoundReport {
        let r = self.round;
        let mut report = RoundReport {
            round: r,
            ..Default::default()
        };
        self.round_log.clear();

        let mut woke = false;
        while self.wake_next < self.wake_order.len() && self.wake[self.wake_order[self.wake_next]] <= r {
            let v = self.wake_order[self.wake_next];
            self.wake_next += 1;
            self.nodes[v].wake();
            self.live.push(v);
            self.round_log.push(TransitionRecord {
                round: r,
                node: v,
                from: NodeState::Asleep,
                to: NodeState::W,
            });
            report.woken += 1;
            woke = true;
        }
        if woke {
            self.live.sort_unstable();
        }

        for &v in &self.live {
            self.actions[v] = self.nodes[v].begin_round(&self.params);
        }
        report.intents = self.live.len();

        let mut eliminated = false;
        for &v in &self.live {
            let heard = match self.actions[v] {
                Action::Listen { .. } => receive(self.graph, &self.actions, v),
                _ => None,
            };
            if let Some(message) = heard {
                report.delivered += 1;
                if self.recording.deliveries {
                    self.deliveries.push(DeliveryRecord {
                        round: r,
                        receiver: v,
                        message,
                    });
                }
            }
            let node = &mut self.nodes[v];
            if node.state == NodeState::M {
                // M nodes only broadcast; nothing to apply
                continue;
            }
            if let Some((from, to)) = node.end_round(&self.params, heard.as_ref()) {
                self.round_log.push(TransitionRecord {
                    round: r,
                    node: v,
                    from,
                    to,
                });
                match to {
                    NodeState::HeraldCand | NodeState::LeaderCand => self.hs_start[v] = Some(r),
                    NodeState::A if from == NodeState::D => self.hf_entry[v] = Some(r),
                    NodeState::M => {
                        report.new_m += 1;
                        self.decided[v] = Some(r);
                    }
                    NodeState::E => {
                        report.new_e += 1;
                        self.decided[v] = Some(r);
                        eliminated = true;
                    }
                    _ => {}
                }
            }
        }
        if eliminated {
            let (nodes, actions) = (&self.nodes, &mut self.actions);
            self.live.retain(|&v| {
                let keep = nodes[v].state != NodeState::E;
                if !keep {
                    actions[v] = Action::Inactive;
                }
                keep
            });
        }

        // wake records precede a node's own change in the same round
        self.round_log.sort_by_key(|t| t.node);
        for t in &self.round_log {
            hash_record(&mut self.hasher, t);
        }
        if self.recording.transitions {
            self.transitions.extend_from_slice(&self.round_log);
        }
        report.transitions = self.round_log.len();
        self.round += 1;
        report
    }
}

/// Re-runs node `node` in isolation for `rounds` rounds, feeding it the
/// recorded receptions, and returns its transition log.
pub fn replay_node(
    params: &ProtocolParams,
    seed: u64,
    node: NodeId,
    wake_round: u64,
    rounds: u64,
    deliveries: &[DeliveryRecord],
) -> Vec<TransitionRecord> {
    let mut mine: Vec<&DeliveryRecord> = deliveries.iter().filter(|d| d.receiver == node).collect();
    mine.sort_by_key(|d| d.round);
    let mut next = mine.into_iter().peekable();
    let mut ctx = NodeCtx::new(node, seed);
    let mut out = Vec::new();
    for r in wake_round..rounds {
        if r == wake_round {
            ctx.wake();
            out.push(TransitionRecord {
                round: r,
                node,
                from: NodeState::Asleep,
                to: NodeState::W,
            });
        }
        if ctx.state == NodeState::E {
            break;
        }
        ctx.begin_round(params);
        while next.peek().is_some_and(|d| d.round < r) {
            next.next();
        }
        let heard = next.next_if(|d| d.round == r).map(|d| d.message);
        if ctx.state == NodeState::M {
            continue;
        }
        if let Some((from, to)) = ctx.end_round(params, heard.as_ref()) {
            out.push(TransitionRecord {
                round: r,
                node,
                from,
                to,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_structured, gen_unit_disk, Topology};
    use crate::protocol::{derive_params, ParamOverrides};
    use crate::radio::ChannelClass;

    fn small_params(n: u64) -> ProtocolParams {
        let o = ParamOverrides {
            tau_lonely: Some(200),
            ..Default::default()
        };
        derive_params(n, 8, 2, &o).params
    }

    #[test]
    fn asleep_round_is_empty() {
        let g = gen_structured(Topology::Path, 3, None).unwrap();
        let mut e = Engine::new(&g, small_params(3), vec![5, 5, 5], 1);
        let rep = e.advance();
        assert_eq!(
            rep,
            RoundReport {
                round: 0,
                ..Default::default()
            }
        );
        assert_eq!(e.round(), 1);
        assert_eq!(e.trace_hash(), EMPTY_TRACE_HASH);
        assert_eq!(hash_transitions(&[]), EMPTY_TRACE_HASH);
    }

    #[test]
    fn single_waiting_node_listens_on_report() {
        let g = gen_structured(Topology::Empty, 1, None).unwrap();
        let mut e = Engine::new(&g, small_params(1), vec![0], 1);
        let rep = e.advance();
        assert_eq!((rep.woken, rep.intents, rep.delivered), (1, 1, 0));
        assert!(matches!(
            e.actions[0],
            Action::Listen { channel } if channel.class == ChannelClass::Report
        ));
    }

    fn run_to_end(g: &Graph, seed: u64, rec: Recording) -> Engine<'_> {
        let n = g.node_count();
        let mut e = Engine::new(g, small_params(n as u64), vec![0; n], seed).with_recording(rec);
        while !e.all_decided() && e.round() < 20_000 {
            e.advance();
        }
        e
    }

    #[test]
    fn incremental_hash_matches_log() {
        let g = gen_unit_disk(30, 0.3, 1.0, 4);
        let rec = Recording {
            transitions: true,
            deliveries: false,
        };
        let e = run_to_end(&g, 7, rec);
        assert!(e.all_decided());
        assert_eq!(e.trace_hash(), hash_transitions(e.transitions()));
        let mut sorted = e.transitions().to_vec();
        sorted.sort_by_key(|t| (t.round, t.node));
        assert_eq!(sorted, e.transitions());
        for t in e.transitions() {
            assert!(t.from.may_transition_to(t.to), "{t:?}");
        }
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let g = gen_unit_disk(30, 0.3, 1.0, 4);
        let a = run_to_end(&g, 1, Recording::default());
        let b = run_to_end(&g, 1, Recording::default());
        let c = run_to_end(&g, 2, Recording::default());
        assert_eq!(a.trace_hash(), b.trace_hash());
        assert_ne!(a.trace_hash(), c.trace_hash());
    }

    #[test]
    fn replay_reproduces_every_node() {
        let g = gen_unit_disk(25, 0.35, 1.0, 8);
        let n = g.node_count();
        let p = small_params(n as u64);
        let wake: Vec<u64> = (0..n as u64).map(|v| v % 7).collect();
        let mut e = Engine::new(&g, p.clone(), wake.clone(), 3).with_recording(Recording {
            transitions: true,
            deliveries: true,
        });
        while !e.all_decided() && e.round() < 20_000 {
            e.advance();
        }
        for v in 0..n {
            let replayed = replay_node(&p, 3, v, wake[v], e.round(), e.deliveries());
            let logged: Vec<_> = e.transitions().iter().filter(|t| t.node == v).copied().collect();
            assert_eq!(replayed, logged, "node {v}");
        }
    }
}
