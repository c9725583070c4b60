//! Bounded-independence graphs: generators, neighborhoods, exact independence
//! numbers on small induced subgraphs, and the weighted Turán inequalities.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

/// Default size limit for exact independent-set search on an induced subgraph.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 24;
/// Hard limit of the bitset solver.
pub const MAX_BRUTE_FORCE_CAP: usize = 128;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown node {node} (graph has {n} nodes)")]
    UnknownNode { node: NodeId, n: usize },
    #[error("subset of {size} nodes exceeds the exact-search cap of {cap}")]
    SubsetTooLarge { size: usize, cap: usize },
    #[error("invalid grid: {n} nodes cannot be laid out with width {width}")]
    InvalidGrid { n: usize, width: usize },
    #[error("weight of node {node} is not positive ({weight})")]
    NonPositiveWeight { node: NodeId, weight: f64 },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GraphError>;

/// Undirected simple graph with optional unit-disk provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    positions: Option<Vec<(f64, f64)>>,
    radius: Option<f64>,
    label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Path,
    Cycle,
    Grid,
    Star,
    Clique,
    /// No edges at all.
    Empty,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::UnknownNode { node: x, n });
                }
            }
            if u == v {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph {
            adj,
            positions: None,
            radius: None,
            label: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj.get(u).is_some_and(|l| l.binary_search(&v).is_ok())
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn positions(&self) -> Option<&[(f64, f64)]> {
        self.positions.as_deref()
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn average_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownNode {
                node: v,
                n: self.adj.len(),
            })
        }
    }

    /// Serializes to the edge-list text format with an `n=` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.node_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the edge-list format: optional `n=<count>` header, then one
    /// `u v` pair per line. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("n=") {
                let n = rest.trim().parse::<usize>().map_err(|e| GraphError::Parse {
                    line: idx + 1,
                    msg: e.to_string(),
                })?;
                declared = Some(n);
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next = || -> Result<NodeId> {
                it.next()
                    .ok_or_else(|| GraphError::Parse {
                        line: idx + 1,
                        msg: "expected two node ids".into(),
                    })?
                    .parse()
                    .map_err(|e: std::num::ParseIntError| GraphError::Parse {
                        line: idx + 1,
                        msg: e.to_string(),
                    })
            };
            let u = next()?;
            let v = next()?;
            if it.next().is_some() {
                return Err(GraphError::Parse {
                    line: idx + 1,
                    msg: "trailing tokens".into(),
                });
            }
            edges.push((u, v));
        }
        let n = declared.unwrap_or_else(|| {
            edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0)
        });
        Graph::from_edges(n, edges)
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text)
    }
}

/// `n` points uniform in `[0, world]^2`, edge iff Euclidean distance `<= radius`.
pub fn gen_unit_disk(n: usize, radius: f64, world: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = if world > 0.0 { rng.gen_range(0.0..=world) } else { 0.0 };
            let y = if world > 0.0 { rng.gen_range(0.0..=world) } else { 0.0 };
            (x, y)
        })
        .collect();
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let dx = pts[u].0 - pts[v].0;
            let dy = pts[u].1 - pts[v].1;
            if dx * dx + dy * dy <= r2 {
                edges.push((u, v));
            }
        }
    }
    let mut g = Graph::from_edges(n, edges).expect("generated ids are in range");
    g.positions = Some(pts);
    g.radius = Some(radius);
    g.label = Some(format!("udg(n={n},r={radius},w={world},seed={seed})"));
    g
}

/// Radius for which a unit-disk graph on `n` nodes in a `world`-sided square
/// has expected average degree `avg_degree`, boundary effects included.
///
/// Two uniform points in the unit square lie within distance `r <= 1` with
/// probability `pi r^2 - 8 r^3 / 3 + r^4 / 2`; solved for `r` by bisection.
pub fn radius_for_degree(n: usize, avg_degree: f64, world: f64) -> f64 {
    let others = (n.max(2) - 1) as f64;
    let target = (avg_degree / others).min(1.0);
    let p = |r: f64| std::f64::consts::PI * r * r - 8.0 * r.powi(3) / 3.0 + r.powi(4) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    world * hi
}

/// Named topologies with canonical numbering. `width` is required for grids.
pub fn gen_structured(kind: Topology, n: usize, width: Option<usize>) -> Result<Graph> {
    let edges: Vec<(NodeId, NodeId)> = match kind {
        Topology::Path => (1..n).map(|v| (v - 1, v)).collect(),
        Topology::Cycle => {
            let mut e: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            if n >= 3 {
                e.push((n - 1, 0));
            }
            e
        }
        Topology::Star => (1..n).map(|v| (0, v)).collect(),
        Topology::Clique => (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect(),
        Topology::Empty => Vec::new(),
        Topology::Grid => {
            let w = width.unwrap_or(0);
            if w == 0 || !n.is_multiple_of(w) {
                return Err(GraphError::InvalidGrid { n, width: w });
            }
            let mut e = Vec::new();
            for v in 0..n {
                if (v + 1) % w != 0 {
                    e.push((v, v + 1));
                }
                if v + w < n {
                    e.push((v, v + w));
                }
            }
            e
        }
    };
    Ok(Graph::from_edges(n, edges)?.with_label(format!("{kind:?}({n})").to_lowercase()))
}

/// Closed `d`-hop ball around `v`, sorted ascending.
pub fn neighborhood(g: &Graph, v: NodeId, d: usize) -> Result<Vec<NodeId>> {
    g.check_node(v)?;
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue = VecDeque::from([v]);
    dist[v] = 0;
    let mut ball = vec![v];
    while let Some(u) = queue.pop_front() {
        if dist[u] == d {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                ball.push(w);
                queue.push_back(w);
            }
        }
    }
    ball.sort_unstable();
    Ok(ball)
}

/// Exact maximum independent set size of the subgraph induced by `subset`,
/// refusing subsets larger than `cap` (at most [`MAX_BRUTE_FORCE_CAP`]).
pub fn max_independent_set_size(g: &Graph, subset: &[NodeId], cap: usize) -> Result<usize> {
    let cap = cap.min(MAX_BRUTE_FORCE_CAP);
    if subset.len() > cap {
        return Err(GraphError::SubsetTooLarge {
            size: subset.len(),
            cap,
        });
    }
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &v) in subset.iter().enumerate() {
        g.check_node(v)?;
        local[v] = i;
    }
    // Closed-neighborhood masks inside the subset.
    let masks: Vec<u128> = subset
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            g.neighbors(v)
                .iter()
                .filter(|&&w| local[w] != usize::MAX)
                .fold(1u128 << i, |m, &w| m | (1u128 << local[w]))
        })
        .collect();
    let all = if subset.len() == 128 {
        u128::MAX
    } else {
        (1u128 << subset.len()) - 1
    };
    let mut best = 0;
    mis_branch(&masks, all, 0, &mut best);
    Ok(best)
}

fn mis_branch(masks: &[u128], cand: u128, taken: usize, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(taken);
        return;
    }
    if taken + cand.count_ones() as usize <= *best {
        return;
    }
    // A vertex of residual degree <= 1 is always in some maximum set.
    let mut pick_max = (0usize, 0u32);
    let mut rest = cand;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let deg = (masks[i] & cand).count_ones() - 1;
        if deg <= 1 {
            mis_branch(masks, cand & !masks[i], taken + 1, best);
            return;
        }
        if deg > pick_max.1 {
            pick_max = (i, deg);
        }
    }
    let v = pick_max.0;
    mis_branch(masks, cand & !masks[v], taken + 1, best);
    mis_branch(masks, cand & !(1u128 << v), taken, best);
}

/// α(d) at `v`: independence number of the closed `d`-ball.
pub fn independence_function(g: &Graph, v: NodeId, d: usize, cap: usize) -> Result<usize> {
    let ball = neighborhood(g, v, d)?;
    max_independent_set_size(g, &ball, cap)
}

/// α := α(2), maximised over all nodes. Zero for the empty graph.
pub fn alpha_two(g: &Graph, cap: usize) -> Result<usize> {
    (0..g.node_count()).try_fold(0, |acc, v| Ok(acc.max(independence_function(g, v, 2, cap)?)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceProfile {
    pub alpha_of_d: BTreeMap<usize, usize>,
    pub alpha: usize,
}

impl IndependenceProfile {
    /// Checks monotonicity in `d` and the `α(2)^d` envelope.
    pub fn is_consistent(&self) -> bool {
        let monotone = self
            .alpha_of_d
            .values()
            .zip(self.alpha_of_d.values().skip(1))
            .all(|(a, b)| a <= b);
        let envelope = self
            .alpha_of_d
            .iter()
            .filter(|(&d, _)| d >= 1)
            .all(|(&d, &a)| (a as f64) <= (self.alpha as f64).powi(d as i32));
        monotone && envelope
    }
}

/// α(d) for `d` in `0..=max_d` (requires `max_d >= 2`).
pub fn independence_profile(g: &Graph, max_d: usize, cap: usize) -> Result<IndependenceProfile> {
    let mut alpha_of_d = BTreeMap::new();
    for d in 0..=max_d.max(2) {
        let a = (0..g.node_count())
            .try_fold(0, |acc, v| Ok::<_, GraphError>(acc.max(independence_function(g, v, d, cap)?)))?;
        alpha_of_d.insert(d, a);
    }
    let alpha = alpha_of_d[&2];
    Ok(IndependenceProfile { alpha_of_d, alpha })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuranReport {
    /// Σ w_v / W_v.
    pub sum_ratio: f64,
    /// Σ w_v · W_v.
    pub sum_product: f64,
    /// α(G).
    pub alpha_bound: usize,
    /// W² / α(G).
    pub lower_bound: f64,
    pub both_hold: bool,
}

/// Evaluates both weighted Turán inequalities with `W_v` summed over the
/// closed neighborhood. `alpha` overrides the exact α(G) computation.
pub fn weighted_turan_check(
    g: &Graph,
    weights: &[f64],
    alpha: Option<usize>,
    cap: usize,
) -> Result<TuranReport> {
    if weights.len() != g.node_count() {
        return Err(GraphError::WeightCount {
            expected: g.node_count(),
            got: weights.len(),
        });
    }
    if let Some((node, &weight)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
        return Err(GraphError::NonPositiveWeight { node, weight });
    }
    let alpha_bound = match alpha {
        Some(a) => a,
        None => {
            let all: Vec<NodeId> = (0..g.node_count()).collect();
            max_independent_set_size(g, &all, cap)?
        }
    };
    let total: f64 = weights.iter().sum();
    let mut sum_ratio = 0.0;
    let mut sum_product = 0.0;
    for v in 0..g.node_count() {
        let closed = weights[v] + g.neighbors(v).iter().map(|&w| weights[w]).sum::<f64>();
        sum_ratio += weights[v] / closed;
        sum_product += weights[v] * closed;
    }
    let lower_bound = if alpha_bound == 0 {
        0.0
    } else {
        total * total / alpha_bound as f64
    };
    // Relative slack for floating-point summation order.
    let eps = 1e-9;
    let both_hold = sum_ratio <= alpha_bound as f64 * (1.0 + eps)
        && sum_product >= lower_bound * (1.0 - eps);
    Ok(TuranReport {
        sum_ratio,
        sum_product,
        alpha_bound,
        lower_bound,
        both_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, Strategy};

    /// Exhaustive subset enumeration, independent of the branch-and-bound.
    fn brute_mis(g: &Graph, subset: &[NodeId]) -> usize {
        let k = subset.len();
        assert!(k <= 20);
        (0u32..(1 << k))
            .filter(|mask| {
                (0..k).all(|i| {
                    mask & (1 << i) == 0
                        || (i + 1..k).all(|j| mask & (1 << j) == 0 || !g.has_edge(subset[i], subset[j]))
                })
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    fn all(g: &Graph) -> Vec<NodeId> {
        (0..g.node_count()).collect()
    }

    #[test]
    fn unit_disk_edge_cases() {
        let g = gen_unit_disk(2, 1.0, 0.0, 1);
        assert_eq!(g.edge_count(), 1);
        let g = gen_unit_disk(1, 5.0, 1.0, 1);
        assert_eq!(g.edge_count(), 0);
        let a = gen_unit_disk(100, 0.15, 1.0, 7);
        let b = gen_unit_disk(100, 0.15, 1.0, 7);
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        let c = gen_unit_disk(100, 0.15, 1.0, 8);
        assert_ne!(a.edges().collect::<Vec<_>>(), c.edges().collect::<Vec<_>>());
    }

    #[test]
    fn unit_disk_edges_match_radius() {
        let g = gen_unit_disk(60, 0.2, 1.0, 3);
        let pts = g.positions().unwrap();
        for u in 0..60 {
            for v in (u + 1)..60 {
                let d = ((pts[u].0 - pts[v].0).powi(2) + (pts[u].1 - pts[v].1).powi(2)).sqrt();
                assert_eq!(g.has_edge(u, v), d <= 0.2, "{u}-{v} at {d}");
            }
        }
    }

    #[test]
    fn degree_targeted_radius() {
        let n = 400;
        let r = radius_for_degree(n, 8.0, 1.0);
        let mean: f64 = (0..10)
            .map(|s| gen_unit_disk(n, r, 1.0, s).average_degree())
            .sum::<f64>()
            / 10.0;
        assert!((mean - 8.0).abs() < 0.5, "mean degree {mean}");
    }

    #[test]
    fn structured_shapes() {
        assert_eq!(gen_structured(Topology::Clique, 4, None).unwrap().edge_count(), 6);
        let p = gen_structured(Topology::Path, 3, None).unwrap();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let s = gen_structured(Topology::Star, 5, None).unwrap();
        assert_eq!(s.degree(0), 4);
        assert!((1..5).all(|v| s.degree(v) == 1));
        let grid = gen_structured(Topology::Grid, 16, Some(4)).unwrap();
        assert_eq!(grid.edge_count(), 24);
        assert!(matches!(
            gen_structured(Topology::Grid, 10, Some(4)),
            Err(GraphError::InvalidGrid { .. })
        ));
        assert_eq!(gen_structured(Topology::Cycle, 5, None).unwrap().edge_count(), 5);
        assert_eq!(gen_structured(Topology::Empty, 5, None).unwrap().edge_count(), 0);
    }

    #[test]
    fn neighborhoods() {
        let p = gen_structured(Topology::Path, 3, None).unwrap();
        assert_eq!(neighborhood(&p, 0, 1).unwrap(), vec![0, 1]);
        assert_eq!(neighborhood(&p, 2, 0).unwrap(), vec![2]);
        let k = gen_structured(Topology::Clique, 4, None).unwrap();
        assert_eq!(neighborhood(&k, 0, 1).unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(neighborhood(&k, 9, 1), Err(GraphError::UnknownNode { .. })));
    }

    #[test]
    fn exact_mis_small_cases() {
        let tri = gen_structured(Topology::Clique, 3, None).unwrap();
        assert_eq!(max_independent_set_size(&tri, &all(&tri), 24).unwrap(), 1);
        let p3 = gen_structured(Topology::Path, 3, None).unwrap();
        assert_eq!(max_independent_set_size(&p3, &all(&p3), 24).unwrap(), 2);
        let c5 = gen_structured(Topology::Cycle, 5, None).unwrap();
        assert_eq!(brute_mis(&c5, &all(&c5)), 2);
        assert_eq!(max_independent_set_size(&c5, &all(&c5), 24).unwrap(), 2);
        let big = gen_structured(Topology::Empty, 30, None).unwrap();
        assert!(matches!(
            max_independent_set_size(&big, &all(&big), 24),
            Err(GraphError::SubsetTooLarge { size: 30, cap: 24 })
        ));
        assert_eq!(max_independent_set_size(&big, &all(&big), 64).unwrap(), 30);
    }

    #[test]
    fn independence_function_cases() {
        let p5 = gen_structured(Topology::Path, 5, None).unwrap();
        let ball = neighborhood(&p5, 2, 2).unwrap();
        assert_eq!(brute_mis(&p5, &ball), 3);
        assert_eq!(independence_function(&p5, 2, 2, 24).unwrap(), 3);
        let star = gen_structured(Topology::Star, 9, None).unwrap();
        assert_eq!(independence_function(&star, 0, 1, 24).unwrap(), 8);
        let k = gen_structured(Topology::Clique, 6, None).unwrap();
        for d in 1..4 {
            assert_eq!(independence_function(&k, 3, d, 24).unwrap(), 1);
        }
    }

    #[test]
    fn alpha_two_cases() {
        let k = gen_structured(Topology::Clique, 7, None).unwrap();
        assert_eq!(alpha_two(&k, 24).unwrap(), 1);
        let p7 = gen_structured(Topology::Path, 7, None).unwrap();
        let oracle = (0..7)
            .map(|v| brute_mis(&p7, &neighborhood(&p7, v, 2).unwrap()))
            .max()
            .unwrap();
        assert_eq!(oracle, 3);
        assert_eq!(alpha_two(&p7, 24).unwrap(), 3);
        let grid = gen_structured(Topology::Grid, 16, Some(4)).unwrap();
        let oracle = (0..16)
            .map(|v| brute_mis(&grid, &neighborhood(&grid, v, 2).unwrap()))
            .max()
            .unwrap();
        // Frozen from the exhaustive oracle above.
        assert_eq!(oracle, 7);
        assert_eq!(alpha_two(&grid, 24).unwrap(), oracle);
    }

    #[test]
    fn turan_examples() {
        let tri = gen_structured(Topology::Clique, 3, None).unwrap();
        let r = weighted_turan_check(&tri, &[1.0; 3], None, 24).unwrap();
        assert!((r.sum_ratio - 1.0).abs() < 1e-12);
        assert!((r.sum_product - 9.0).abs() < 1e-12);
        assert!((r.lower_bound - 9.0).abs() < 1e-12);
        assert_eq!(r.alpha_bound, 1);
        assert!(r.both_hold);

        let p3 = gen_structured(Topology::Path, 3, None).unwrap();
        let r = weighted_turan_check(&p3, &[1.0; 3], None, 24).unwrap();
        assert!((r.sum_ratio - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.alpha_bound, 2);
        assert!(r.both_hold);

        let g = gen_unit_disk(20, 0.3, 1.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w: Vec<f64> = (0..20).map(|_| 1.0 - rng.gen::<f64>()).collect();
        assert!(weighted_turan_check(&g, &w, None, 24).unwrap().both_hold);

        assert!(matches!(
            weighted_turan_check(&p3, &[1.0, 0.0, 1.0], None, 24),
            Err(GraphError::NonPositiveWeight { node: 1, .. })
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_unit_disk(30, 0.3, 1.0, 11);
        let h = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());
        assert_eq!(h.node_count(), 30);
        let no_header = Graph::parse_edge_list("# c\n0 1\n\n1 2\n").unwrap();
        assert_eq!(no_header.node_count(), 3);
        assert!(matches!(
            Graph::parse_edge_list("n=2\n0 x\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Graph::parse_edge_list("n=2\n0 5\n"),
            Err(GraphError::UnknownNode { node: 5, .. })
        ));
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        (1usize..14, 0.05f64..0.6, any::<u64>()).prop_map(|(n, r, s)| gen_unit_disk(n, r, 1.0, s))
    }

    proptest! {
        #[test]
        fn bnb_matches_enumeration(g in small_graph()) {
            prop_assert_eq!(max_independent_set_size(&g, &all(&g), 24).unwrap(), brute_mis(&g, &all(&g)));
        }

        #[test]
        fn neighborhood_monotone(g in small_graph(), v in 0usize..14, d in 0usize..4) {
            let v = v % g.node_count();
            let inner = neighborhood(&g, v, d).unwrap();
            let outer = neighborhood(&g, v, d + 1).unwrap();
            prop_assert!(inner.iter().all(|x| outer.contains(x)));
        }

        #[test]
        fn profile_envelope(g in small_graph()) {
            let prof = independence_profile(&g, 3, 24).unwrap();
            prop_assert!(prof.is_consistent(), "{:?}", prof);
        }

        #[test]
        fn turan_always_holds(g in small_graph(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w: Vec<f64> = (0..g.node_count()).map(|_| rng.gen_range(1e-3..10.0)).collect();
            prop_assert!(weighted_turan_check(&g, &w, None, 24).unwrap().both_hold);
        }
    }
}
