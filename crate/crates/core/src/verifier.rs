//! Correctness checks and analysis probes over end-of-round snapshots.
//!
//! The free functions inspect a whole [`Snapshot`]. [`Monitor`] performs the
//! same checks incrementally, driven by each round's transitions, so that a
//! long run can be audited every round.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Engine, TransitionRecord};
use crate::graph::{Graph, NodeId};
use crate::protocol::{NodeCtx, NodeState};

/// Read-only end-of-round view. A node's state and counters are those in
/// effect for the following round.
#[derive(Clone, Copy)]
pub struct Snapshot<'a> {
    pub round: u64,
    pub graph: &'a Graph,
    pub nodes: &'a [NodeCtx],
    /// Round in which each node last entered H′ or L′.
    pub hs_start: &'a [Option<u64>],
}

/// A leader in L together with a herald in H that names it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    pub leader: NodeId,
    pub herald: NodeId,
    /// Round in which the handshake began.
    pub start: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairClass {
    Good,
    Bad,
}

impl<'a> Snapshot<'a> {
    pub fn of(engine: &'a Engine<'_>) -> Self {
        Snapshot {
            round: engine.round().saturating_sub(1),
            graph: engine.graph(),
            nodes: engine.nodes(),
            hs_start: engine.hs_start(),
        }
    }

    pub fn state(&self, v: NodeId) -> NodeState {
        self.nodes[v].state
    }

    /// Handshake round the node executes next (H′ and L′ only).
    pub fn hs_phase(&self, v: NodeId) -> Option<u64> {
        matches!(self.state(v), NodeState::HeraldCand | NodeState::LeaderCand).then(|| self.nodes[v].count + 1)
    }

    pub fn pair_of_herald(&self, h: NodeId) -> Option<Pair> {
        let node = &self.nodes[h];
        if node.state != NodeState::H {
            return None;
        }
        let l = node.leader_id?;
        let leader = &self.nodes[l];
        (leader.state == NodeState::L && leader.leader_id == Some(l)).then(|| Pair {
            leader: l,
            herald: h,
            start: self.hs_start[h].unwrap_or(0),
        })
    }

    pub fn pairs(&self) -> Vec<Pair> {
        (0..self.nodes.len()).filter_map(|h| self.pair_of_herald(h)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    MisAdjacency,
    DominationMissing,
    Undecided,
    CrossingEdge,
    DegreeBound,
    PairReversion,
}

impl ViolationKind {
    /// Kinds that make a run fail.
    pub fn is_safety(self) -> bool {
        matches!(
            self,
            ViolationKind::MisAdjacency | ViolationKind::DominationMissing | ViolationKind::CrossingEdge
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub round: u64,
    pub nodes: Vec<NodeId>,
    pub detail: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifierError {
    #[error("nodes {leader} and {herald} are not a current leader-herald pair")]
    NotAPair { leader: NodeId, herald: NodeId },
}

fn mis_adjacency(round: u64, u: NodeId, v: NodeId) -> Violation {
    Violation {
        kind: ViolationKind::MisAdjacency,
        round,
        nodes: vec![u.min(v), u.max(v)],
        detail: format!("adjacent nodes {} and {} are both in M", u.min(v), u.max(v)),
    }
}

fn domination_missing(round: u64, v: NodeId) -> Violation {
    Violation {
        kind: ViolationKind::DominationMissing,
        round,
        nodes: vec![v],
        detail: format!("node {v} is in E without a neighbor in M"),
    }
}

/// One violation per edge with both endpoints in M.
pub fn check_property_p(s: &Snapshot) -> Vec<Violation> {
    s.graph
        .edges()
        .filter(|&(u, v)| s.state(u) == NodeState::M && s.state(v) == NodeState::M)
        .map(|(u, v)| mis_adjacency(s.round, u, v))
        .collect()
}

/// Property P restricted to edges touching `new_m`; an edge between two new
/// nodes is reported once.
pub fn check_property_p_at(s: &Snapshot, new_m: &[NodeId]) -> Vec<Violation> {
    let mut out = Vec::new();
    for &v in new_m {
        for &u in s.graph.neighbors(v) {
            if s.state(u) == NodeState::M && !(new_m.contains(&u) && u < v) {
                out.push(mis_adjacency(s.round, u, v));
            }
        }
    }
    out
}

fn dominated(s: &Snapshot, v: NodeId) -> bool {
    s.graph.neighbors(v).iter().any(|&u| s.state(u) == NodeState::M)
}

/// A violation for each E node with no neighbor in M.
pub fn check_domination(s: &Snapshot) -> Vec<Violation> {
    check_domination_at(s, (0..s.nodes.len()).filter(|&v| s.state(v) == NodeState::E))
}

pub fn check_domination_at(s: &Snapshot, nodes: impl IntoIterator<Item = NodeId>) -> Vec<Violation> {
    nodes
        .into_iter()
        .filter(|&v| s.state(v) == NodeState::E && !dominated(s, v))
        .map(|v| domination_missing(s.round, v))
        .collect()
}

/// End-of-run audit: nodes still undecided after `wake + budget`, plus
/// maximality (M independent, every decided node in M or adjacent to M).
pub fn check_final(s: &Snapshot, budget: u64, wake: &[u64]) -> Vec<Violation> {
    let mut out: Vec<Violation> = (0..s.nodes.len())
        .filter(|&v| !s.state(v).is_decided() && s.round + 1 >= wake[v] + budget)
        .map(|v| Violation {
            kind: ViolationKind::Undecided,
            round: s.round,
            nodes: vec![v],
            detail: format!(
                "node {v} woke at {} and is still {} after budget {budget}",
                wake[v],
                s.state(v)
            ),
        })
        .collect();
    out.extend(check_property_p(s));
    out.extend(check_domination(s));
    out
}

/// Definition of a good pair: no neighbor of the leader other than its
/// herald is in L, in H, or a herald candidate about to run handshake round
/// 5 or 6. The herald's other neighbors do not matter.
pub fn classify_pair(s: &Snapshot, leader: NodeId, herald: NodeId) -> Result<PairClass, VerifierError> {
    if s.pair_of_herald(herald).map(|p| p.leader) != Some(leader) {
        return Err(VerifierError::NotAPair { leader, herald });
    }
    Ok(classify_unchecked(s, leader, herald))
}

fn classify_unchecked(s: &Snapshot, leader: NodeId, herald: NodeId) -> PairClass {
    let conflict = s.graph.neighbors(leader).iter().any(|&x| {
        x != herald
            && match s.state(x) {
                NodeState::L | NodeState::H => true,
                NodeState::HeraldCand => matches!(s.hs_phase(x), Some(5 | 6)),
                _ => false,
            }
    });
    if conflict {
        PairClass::Bad
    } else {
        PairClass::Good
    }
}

/// Checks two coexisting pairs against the permitted crossing patterns:
/// simultaneous pairs joined only by leader-leader and/or herald-herald
/// edges, or pairs started two rounds apart joined only by the earlier
/// leader and the later herald.
pub fn crossing_violation(g: &Graph, round: u64, a: &Pair, b: &Pair) -> Option<Violation> {
    let (p1, p2) = if (a.start, a.leader) <= (b.start, b.leader) {
        (a, b)
    } else {
        (b, a)
    };
    let mut crossings = Vec::new();
    for x in [p1.leader, p1.herald] {
        for y in [p2.leader, p2.herald] {
            if g.has_edge(x, y) {
                crossings.push((x, y));
            }
        }
    }
    if crossings.is_empty() {
        return None;
    }
    let simultaneous_ok = p1.start == p2.start
        && crossings
            .iter()
            .all(|&(x, y)| (x, y) == (p1.leader, p2.leader) || (x, y) == (p1.herald, p2.herald));
    let offset_ok = p2.start == p1.start + 2 && crossings == [(p1.leader, p2.herald)];
    if simultaneous_ok || offset_ok {
        return None;
    }
    Some(Violation {
        kind: ViolationKind::CrossingEdge,
        round,
        nodes: vec![p1.leader, p1.herald, p2.leader, p2.herald],
        detail: format!(
            "pairs (l={}, h={}, start {}) and (l={}, h={}, start {}) cross via {:?}",
            p1.leader, p1.herald, p1.start, p2.leader, p2.herald, p2.start, crossings
        ),
    })
}

pub fn crossing_edge_audit(s: &Snapshot) -> Vec<Violation> {
    let pairs = s.pairs();
    let mut out = Vec::new();
    for (i, a) in pairs.iter().enumerate() {
        for b in &pairs[i + 1..] {
            out.extend(crossing_violation(s.graph, s.round, a, b));
        }
    }
    out
}

/// Γ(u): activity summed over the closed neighborhood.
pub fn activity_mass(s: &Snapshot, u: NodeId) -> f64 {
    s.nodes[u].gamma + open_activity_mass(s, u)
}

/// Γ°(u) = Γ(u) − γ(u).
pub fn open_activity_mass(s: &Snapshot, u: NodeId) -> f64 {
    s.graph.neighbors(u).iter().map(|&v| s.nodes[v].gamma).sum()
}

/// Whether Γ(u) ≥ η̂ · max over neighbors v of Γ(v).
pub fn is_fat(s: &Snapshot, u: NodeId, eta_hat: f64) -> bool {
    let own = activity_mass(s, u);
    s.graph
        .neighbors(u)
        .iter()
        .all(|&v| own >= eta_hat * activity_mass(s, v))
}

fn in_hf_or_m(state: NodeState) -> bool {
    state.in_herald_filter() || state == NodeState::M
}

/// Nodes whose degree in the subgraph induced by herald-filter and M nodes
/// exceeds `cap`.
pub fn herald_filter_degree_probe(s: &Snapshot, cap: u64) -> Vec<Violation> {
    (0..s.nodes.len())
        .filter(|&v| in_hf_or_m(s.state(v)))
        .filter_map(|v| {
            let d = s
                .graph
                .neighbors(v)
                .iter()
                .filter(|&&u| in_hf_or_m(s.state(u)))
                .count() as u64;
            (d > cap).then(|| Violation {
                kind: ViolationKind::DegreeBound,
                round: s.round,
                nodes: vec![v],
                detail: format!("induced herald-filter degree {d} exceeds {cap}"),
            })
        })
        .collect()
}

/// Per-round population and pair counts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundAggregate {
    pub round: u64,
    pub active: usize,
    pub paired: usize,
    pub mis: usize,
    pub eliminated: usize,
    pub good_pairs: usize,
    pub bad_pairs: usize,
    /// Largest γ adjacent to a good pair (0 when none).
    pub max_gamma_near_good: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct PairTrack {
    seen_good: bool,
    bad_run: u64,
    seen_round: u64,
}

/// Incremental per-round auditor.
#[derive(Debug, Clone)]
pub struct Monitor {
    degree_cap: u64,
    in_hfm: Vec<bool>,
    hfm_degree: Vec<u32>,
    degree_flagged: Vec<bool>,
    pub max_induced_degree: u32,
    state_counts: [usize; 10],
    heralds: Vec<NodeId>,
    pairs: HashMap<Pair, PairTrack>,
    current: Vec<(Pair, PairClass)>,
    pub violations: Vec<Violation>,
    /// Rounds each bad stretch of a pair lasted.
    pub bad_lifetimes: Vec<u64>,
    pub pairs_formed: u64,
    pub good_pair_events: u64,
    new_m: Vec<NodeId>,
    new_e: Vec<NodeId>,
}

impl Monitor {
    pub fn new(n: usize, degree_cap: u64) -> Self {
        let mut state_counts = [0; 10];
        state_counts[NodeState::Asleep as usize] = n;
        Monitor {
            degree_cap,
            in_hfm: vec![false; n],
            hfm_degree: vec![0; n],
            degree_flagged: vec![false; n],
            max_induced_degree: 0,
            state_counts,
            heralds: Vec::new(),
            pairs: HashMap::new(),
            current: Vec::new(),
            violations: Vec::new(),
            bad_lifetimes: Vec::new(),
            pairs_formed: 0,
            good_pair_events: 0,
            new_m: Vec::new(),
            new_e: Vec::new(),
        }
    }

    pub fn count(&self, state: NodeState) -> usize {
        self.state_counts[state as usize]
    }

    /// Audits the snapshot after a round whose transitions are `changes`.
    pub fn observe(&mut self, s: &Snapshot, changes: &[TransitionRecord]) {
        self.new_m.clear();
        self.new_e.clear();
        for t in changes {
            self.state_counts[t.from as usize] -= 1;
            self.state_counts[t.to as usize] += 1;
            match t.to {
                NodeState::M => self.new_m.push(t.node),
                NodeState::E => self.new_e.push(t.node),
                NodeState::H => self.heralds.push(t.node),
                _ => {}
            }
            if t.from == NodeState::H {
                self.heralds.retain(|&h| h != t.node);
            }
            let inside = in_hf_or_m(t.to);
            if inside != self.in_hfm[t.node] {
                self.set_hfm(s, t.node, inside);
            }
        }
        let new_m = std::mem::take(&mut self.new_m);
        let new_e = std::mem::take(&mut self.new_e);
        self.violations.extend(check_property_p_at(s, &new_m));
        self.violations.extend(check_domination_at(s, new_e.iter().copied()));
        self.new_m = new_m;
        self.new_e = new_e;
        self.observe_pairs(s);
    }

    fn set_hfm(&mut self, s: &Snapshot, v: NodeId, inside: bool) {
        self.in_hfm[v] = inside;
        for &u in s.graph.neighbors(v) {
            if inside {
                self.hfm_degree[u] += 1;
            } else {
                self.hfm_degree[u] -= 1;
            }
            if inside && self.in_hfm[u] {
                self.check_degree(s.round, u);
            }
        }
        if inside {
            self.check_degree(s.round, v);
        }
    }

    fn check_degree(&mut self, round: u64, v: NodeId) {
        let d = self.hfm_degree[v];
        self.max_induced_degree = self.max_induced_degree.max(d);
        if d as u64 > self.degree_cap && !self.degree_flagged[v] {
            self.degree_flagged[v] = true;
            self.violations.push(Violation {
                kind: ViolationKind::DegreeBound,
                round,
                nodes: vec![v],
                detail: format!("induced herald-filter degree {d} exceeds {}", self.degree_cap),
            });
        }
    }

    fn observe_pairs(&mut self, s: &Snapshot) {
        self.current.clear();
        for &h in &self.heralds {
            if let Some(p) = s.pair_of_herald(h) {
                self.current.push((p, classify_unchecked(s, p.leader, p.herald)));
            }
        }
        self.current.sort_unstable_by_key(|(p, _)| *p);
        for i in 0..self.current.len() {
            let (pair, class) = self.current[i];
            let fresh = !self.pairs.contains_key(&pair);
            if fresh {
                self.pairs_formed += 1;
                for (j, (other, _)) in self.current.iter().enumerate() {
                    if j != i && (self.pairs.contains_key(other) || j < i) {
                        if let Some(v) = crossing_violation(s.graph, s.round, &pair, other) {
                            self.violations.push(v);
                        }
                    }
                }
            }
            let track = self.pairs.entry(pair).or_default();
            track.seen_round = s.round;
            match class {
                PairClass::Good => {
                    if !track.seen_good {
                        self.good_pair_events += 1;
                    }
                    track.seen_good = true;
                    if track.bad_run > 0 {
                        self.bad_lifetimes.push(track.bad_run);
                        track.bad_run = 0;
                    }
                }
                PairClass::Bad => {
                    if track.seen_good && track.bad_run == 0 {
                        self.violations.push(Violation {
                            kind: ViolationKind::PairReversion,
                            round: s.round,
                            nodes: vec![pair.leader, pair.herald],
                            detail: format!("good pair (l={}, h={}) became bad", pair.leader, pair.herald),
                        });
                    }
                    track.bad_run += 1;
                }
            }
        }
        let round = s.round;
        let lifetimes = &mut self.bad_lifetimes;
        self.pairs.retain(|_, t| {
            let alive = t.seen_round == round;
            if !alive && t.bad_run > 0 {
                lifetimes.push(t.bad_run);
            }
            alive
        });
    }

    /// Closes bad stretches of pairs still alive at the end of the run.
    pub fn finish(&mut self) {
        for t in self.pairs.values_mut() {
            if t.bad_run > 0 {
                self.bad_lifetimes.push(t.bad_run);
                t.bad_run = 0;
            }
        }
    }

    pub fn aggregate(&self, s: &Snapshot) -> RoundAggregate {
        let mut agg = RoundAggregate {
            round: s.round,
            active: self.count(NodeState::A),
            paired: self.count(NodeState::L) + self.count(NodeState::H),
            mis: self.count(NodeState::M),
            eliminated: self.count(NodeState::E),
            ..Default::default()
        };
        for (p, class) in &self.current {
            match class {
                PairClass::Bad => agg.bad_pairs += 1,
                PairClass::Good => {
                    agg.good_pairs += 1;
                    for &end in &[p.leader, p.herald] {
                        for &x in s.graph.neighbors(end) {
                            if x != p.leader && x != p.herald {
                                agg.max_gamma_near_good = agg.max_gamma_near_good.max(s.nodes[x].gamma);
                            }
                        }
                    }
                }
            }
        }
        agg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_structured, Topology};

    fn nodes_in(states: &[NodeState]) -> Vec<NodeCtx> {
        states
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let mut c = NodeCtx::new(i, 0);
                c.state = s;
                c
            })
            .collect()
    }

    fn snap<'a>(g: &'a Graph, nodes: &'a [NodeCtx], hs: &'a [Option<u64>]) -> Snapshot<'a> {
        Snapshot {
            round: 10,
            graph: g,
            nodes,
            hs_start: hs,
        }
    }

    use NodeState::*;

    #[test]
    fn property_p_examples() {
        let g = gen_structured(Topology::Path, 3, None).unwrap();
        let hs = vec![None; 3];
        let n = nodes_in(&[A, W, E]);
        assert!(check_property_p(&snap(&g, &n, &hs)).is_empty());
        let n = nodes_in(&[M, E, M]);
        assert!(check_property_p(&snap(&g, &n, &hs)).is_empty());
        let g2 = gen_structured(Topology::Path, 2, None).unwrap();
        let n = nodes_in(&[M, M]);
        let v = check_property_p(&snap(&g2, &n, &hs[..2]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].nodes, vec![0, 1]);
        assert_eq!(check_property_p_at(&snap(&g2, &n, &hs[..2]), &[0, 1]), v);
    }

    #[test]
    fn domination_examples() {
        let g = gen_structured(Topology::Star, 4, None).unwrap();
        let hs = vec![None; 4];
        let n = nodes_in(&[M, E, E, E]);
        assert!(check_domination(&snap(&g, &n, &hs)).is_empty());
        let n = nodes_in(&[A, W, D, A]);
        assert!(check_domination(&snap(&g, &n, &hs)).is_empty());
        let g1 = gen_structured(Topology::Empty, 1, None).unwrap();
        let n = nodes_in(&[E]);
        assert_eq!(check_domination(&snap(&g1, &n, &hs[..1])).len(), 1);
    }

    #[test]
    fn final_check_flags_stragglers() {
        let g = gen_structured(Topology::Path, 3, None).unwrap();
        let hs = vec![None; 3];
        let n = nodes_in(&[D, D, D]);
        let v = check_final(&snap(&g, &n, &hs), 5, &[0, 0, 0]);
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|x| x.kind == ViolationKind::Undecided));
        // budget not yet elapsed
        assert!(check_final(&snap(&g, &n, &hs), 50, &[0, 0, 0]).is_empty());
        let n = nodes_in(&[M, E, M]);
        assert!(check_final(&snap(&g, &n, &hs), 5, &[0, 0, 0]).is_empty());
    }

    fn paired(states: &[NodeState], pairs: &[(NodeId, NodeId)]) -> Vec<NodeCtx> {
        let mut n = nodes_in(states);
        for &(l, h) in pairs {
            n[l].leader_id = Some(l);
            n[h].leader_id = Some(l);
        }
        n
    }

    #[test]
    fn pair_classification() {
        // 1 - 0 - 2, pair (l=0, h=1)
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let hs = vec![Some(0); 3];
        let n = paired(&[L, H, E], &[(0, 1)]);
        assert_eq!(classify_pair(&snap(&g, &n, &hs), 0, 1), Ok(PairClass::Good));
        let n = paired(&[L, H, L], &[(0, 1)]);
        assert_eq!(classify_pair(&snap(&g, &n, &hs), 0, 1), Ok(PairClass::Bad));
        let mut n = paired(&[L, H, HeraldCand], &[(0, 1)]);
        n[2].count = 4;
        assert_eq!(classify_pair(&snap(&g, &n, &hs), 0, 1), Ok(PairClass::Bad));
        n[2].count = 2;
        assert_eq!(classify_pair(&snap(&g, &n, &hs), 0, 1), Ok(PairClass::Good));
        // 0 - 1 - 2, herald's extra neighbor in H does not matter
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let n = paired(&[L, H, H], &[(0, 1)]);
        assert_eq!(classify_pair(&snap(&g, &n, &hs), 0, 1), Ok(PairClass::Good));
        assert_eq!(
            classify_pair(&snap(&g, &n, &hs), 1, 0),
            Err(VerifierError::NotAPair { leader: 1, herald: 0 })
        );
    }

    fn two_pairs(edges: &[(NodeId, NodeId)], starts: [u64; 2]) -> Vec<Violation> {
        // pair 1 = (l=0, h=1), pair 2 = (l=2, h=3)
        let mut all = vec![(0, 1), (2, 3)];
        all.extend_from_slice(edges);
        let g = Graph::from_edges(4, all).unwrap();
        let n = paired(&[L, H, L, H], &[(0, 1), (2, 3)]);
        let hs = vec![Some(starts[0]), Some(starts[0]), Some(starts[1]), Some(starts[1])];
        crossing_edge_audit(&snap(&g, &n, &hs))
    }

    #[test]
    fn crossing_edge_examples() {
        assert!(two_pairs(&[], [0, 5]).is_empty());
        assert!(two_pairs(&[(0, 2)], [4, 4]).is_empty());
        assert!(two_pairs(&[(0, 2), (1, 3)], [4, 4]).is_empty());
        assert_eq!(two_pairs(&[(0, 3)], [4, 4]).len(), 1);
        assert!(two_pairs(&[(0, 3)], [4, 6]).is_empty());
        assert_eq!(two_pairs(&[(1, 2)], [4, 6]).len(), 1);
        assert_eq!(two_pairs(&[(0, 3)], [4, 5]).len(), 1);
        // ordering by start, not by id
        assert!(two_pairs(&[(2, 1)], [6, 4]).is_empty());
    }

    fn with_gamma(states: &[NodeState], gammas: &[f64]) -> Vec<NodeCtx> {
        let mut n = nodes_in(states);
        for (c, &g) in n.iter_mut().zip(gammas) {
            c.gamma = g;
        }
        n
    }

    #[test]
    fn activity_mass_examples() {
        let g = gen_structured(Topology::Star, 4, None).unwrap();
        let hs = vec![None; 4];
        let n = with_gamma(&[A; 4], &[0.5; 4]);
        let s = snap(&g, &n, &hs);
        assert_eq!(activity_mass(&s, 0), 2.0);
        assert_eq!(open_activity_mass(&s, 0), 1.5);
        let n = with_gamma(&[A, E, E, E], &[0.3, 0.0, 0.0, 0.0]);
        assert_eq!(activity_mass(&snap(&g, &n, &hs), 0), 0.3);
    }

    #[test]
    fn fatness_examples() {
        let g = gen_structured(Topology::Clique, 5, None).unwrap();
        let hs = vec![None; 5];
        let n = with_gamma(&[A; 5], &[0.2; 5]);
        assert!((0..5).all(|u| is_fat(&snap(&g, &n, &hs), u, 1.0)));
        let g = gen_structured(Topology::Path, 3, None).unwrap();
        let gmin = 1.0 / 512.0;
        let n = with_gamma(&[A; 3], &[0.5, gmin, 0.5]);
        let s = snap(&g, &n, &hs[..3]);
        // Γ(1) = 1 + γ_min, Γ(0) = 0.5 + γ_min
        let ratio = (1.0 + gmin) / (0.5 + gmin);
        assert!(is_fat(&s, 1, 1.0));
        assert!(is_fat(&s, 1, ratio - 1e-9));
        assert!(!is_fat(&s, 1, ratio + 1e-9));
        assert!(!is_fat(&s, 0, 0.6));
        let g1 = gen_structured(Topology::Empty, 1, None).unwrap();
        let n = with_gamma(&[A], &[0.1]);
        assert!(is_fat(&snap(&g1, &n, &hs[..1]), 0, 0.99));
    }

    #[test]
    fn degree_probe_examples() {
        let g = gen_structured(Topology::Clique, 4, None).unwrap();
        let hs = vec![None; 4];
        let n = nodes_in(&[W, D, W, D]);
        assert!(herald_filter_degree_probe(&snap(&g, &n, &hs), 0).is_empty());
        let n = nodes_in(&[A; 4]);
        assert!(herald_filter_degree_probe(&snap(&g, &n, &hs), 3).is_empty());
        assert_eq!(herald_filter_degree_probe(&snap(&g, &n, &hs), 2).len(), 4);
    }

    #[test]
    fn monitor_tracks_reversion_and_lifetimes() {
        // 2 - 0 - 1, pair (l=0, h=1); node 2 becomes L later
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let hs = vec![Some(0); 3];
        let mut m = Monitor::new(3, 100);
        let rec = |node, from, to| TransitionRecord { round: 0, node, from, to };
        let wakes: Vec<_> = (0..3).map(|v| rec(v, Asleep, W)).collect();
        let n = nodes_in(&[W, W, W]);
        m.observe(&Snapshot { round: 1, ..snap(&g, &n, &hs) }, &wakes);

        let n = paired(&[L, H, A], &[(0, 1)]);
        m.observe(&Snapshot { round: 2, ..snap(&g, &n, &hs) }, &[rec(0, W, L), rec(1, W, H), rec(2, W, A)]);
        assert_eq!((m.pairs_formed, m.good_pair_events), (1, 1));
        let n = paired(&[L, H, L], &[(0, 1)]);
        m.observe(&Snapshot { round: 3, ..snap(&g, &n, &hs) }, &[rec(2, A, L)]);
        assert_eq!(m.violations.len(), 1);
        assert_eq!(m.violations[0].kind, ViolationKind::PairReversion);
        m.observe(&Snapshot { round: 4, ..snap(&g, &n, &hs) }, &[]);
        let n = paired(&[E, A, L], &[]);
        m.observe(&Snapshot { round: 5, ..snap(&g, &n, &hs) }, &[rec(0, L, E), rec(1, H, A)]);
        assert_eq!(m.bad_lifetimes, vec![2]);
        assert_eq!(m.count(L), 1);
        assert_eq!(m.max_induced_degree, 2);
    }
}
