//! Experiment configuration, single runs, parameter sweeps and trace files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{hash_transitions, DeliveryRecord, Engine, Recording, TransitionRecord};
use crate::graph::{
    alpha_two, gen_structured, gen_unit_disk, radius_for_degree, Graph, GraphError, NodeId, Topology,
    DEFAULT_BRUTE_FORCE_CAP,
};
use crate::protocol::{derive_params, AnalysisConstants, NodeState, ParamError, ParamOverrides, ProtocolParams};
use crate::verifier::{check_final, Monitor, RoundAggregate, Snapshot, Violation, ViolationKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("config: {0}")]
    Config(String),
    #[error("schedule file {path}: {msg}")]
    Schedule { path: PathBuf, msg: String },
    #[error("trace {path}: {msg}")]
    Trace { path: PathBuf, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Random unit disk graph; give either `radius` or `avg_degree`.
    UnitDisk {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        avg_degree: Option<f64>,
        #[serde(default = "default_world")]
        world: f64,
        /// Defaults to the run seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Structured {
        topology: Topology,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<usize>,
    },
    File {
        path: PathBuf,
    },
}

fn default_world() -> f64 {
    1.0
}

impl GraphSpec {
    pub fn unit_disk_with_degree(n: usize, avg_degree: f64) -> Self {
        GraphSpec::UnitDisk {
            n,
            radius: None,
            avg_degree: Some(avg_degree),
            world: 1.0,
            seed: None,
        }
    }

    pub fn build(&self, run_seed: u64) -> Result<Graph> {
        match self {
            GraphSpec::UnitDisk {
                n,
                radius,
                avg_degree,
                world,
                seed,
            } => {
                let r = match (radius, avg_degree) {
                    (Some(r), None) => *r,
                    (None, Some(d)) => radius_for_degree(*n, *d, *world),
                    _ => {
                        return Err(HarnessError::Config(
                            "unit_disk needs exactly one of radius or avg_degree".into(),
                        ))
                    }
                };
                Ok(gen_unit_disk(*n, r, *world, seed.unwrap_or(run_seed)))
            }
            GraphSpec::Structured { topology, n, width } => Ok(gen_structured(*topology, *n, *width)?),
            GraphSpec::File { path } => Ok(Graph::read_edge_list(path)?),
        }
    }

    /// Same generator with a different node count (files are unchanged).
    pub fn with_n(&self, new_n: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            GraphSpec::UnitDisk { n, .. } | GraphSpec::Structured { n, .. } => *n = new_n,
            GraphSpec::File { .. } => {}
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Value(u32),
    Keyword(AutoKeyword),
}

impl Default for AlphaSpec {
    fn default() -> Self {
        AlphaSpec::Keyword(AutoKeyword::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[derive(Default)]
pub enum ScheduleSpec {
    #[default]
    AllAtZero,
    /// Independent uniform wake rounds in `[0, window]`.
    UniformRandom { window: u64 },
    /// Node `i` wakes at `⌊i/size⌋·gap`.
    Blocks { size: usize, gap: u64 },
    /// Whitespace-separated wake rounds, one per node.
    Explicit { path: PathBuf },
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceOptions {
    /// JSONL trace destination; no file when absent.
    pub path: Option<PathBuf>,
    /// Also record every delivery (needed for replay).
    pub deliveries: bool,
    /// Keep a per-round aggregate every `stride` rounds (0 disables).
    pub aggregate_stride: u64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            path: None,
            deliveries: true,
            aggregate_stride: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub graph: GraphSpec,
    /// Channel budget F.
    pub f: u32,
    #[serde(default)]
    pub alpha: AlphaSpec,
    /// Node limit for the exact α(2) search when `alpha` is auto.
    #[serde(default = "default_alpha_cap")]
    pub alpha_cap: usize,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    pub seed: u64,
    #[serde(default)]
    pub max_rounds: Option<u64>,
    /// τ_runtime = multiplier · τ_lonely (default 2α²).
    #[serde(default)]
    pub budget_multiplier: Option<f64>,
    #[serde(default)]
    pub trace: TraceOptions,
}

fn default_alpha_cap() -> usize {
    64
}

impl RunConfig {
    pub fn new(graph: GraphSpec, f: u32, seed: u64) -> Self {
        RunConfig {
            graph,
            f,
            alpha: AlphaSpec::default(),
            alpha_cap: default_alpha_cap(),
            params: ParamOverrides::default(),
            schedule: ScheduleSpec::AllAtZero,
            seed,
            max_rounds: None,
            budget_multiplier: None,
            trace: TraceOptions::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Wake round per node. Explicit schedules are read from their file.
pub fn make_schedule(spec: &ScheduleSpec, n: usize, seed: u64) -> Result<Vec<u64>> {
    Ok(match spec {
        ScheduleSpec::AllAtZero => vec![0; n],
        ScheduleSpec::UniformRandom { window } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            (0..n).map(|_| rng.gen_range(0..=*window)).collect()
        }
        ScheduleSpec::Blocks { size, gap } => {
            if *size == 0 {
                return Err(HarnessError::Config("blocks schedule needs size ≥ 1".into()));
            }
            (0..n).map(|i| (i / size) as u64 * gap).collect()
        }
        ScheduleSpec::Explicit { path } => {
            let err = |msg: String| HarnessError::Schedule {
                path: path.clone(),
                msg,
            };
            let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
            let rounds = text
                .split_whitespace()
                .map(|t| t.parse::<u64>().map_err(|e| err(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if rounds.len() != n {
                return Err(err(format!("{} entries for {n} nodes", rounds.len())));
            }
            rounds
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Mis,
    Eliminated,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeOutcome {
    pub node: NodeId,
    pub wake: u64,
    pub verdict: Verdict,
    pub decision_round: Option<u64>,
    /// decision − wake + 1.
    pub latency: Option<u64>,
    pub hf_entry: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadPairStats {
    pub observed: usize,
    pub mean_lifetime: Option<f64>,
    pub below_red_blue: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    pub seed: u64,
    pub n: usize,
    pub f: u32,
    pub alpha: u32,
    pub alpha_auto: bool,
    pub params: ProtocolParams,
    pub analysis: AnalysisConstants,
    pub warnings: Vec<String>,
    pub divergences: Vec<String>,
    pub rounds: u64,
    pub all_decided: bool,
    pub nodes: Vec<NodeOutcome>,
    pub mis_size: usize,
    pub violation_counts: BTreeMap<ViolationKind, usize>,
    /// Every violation except stragglers beyond the first 64.
    pub violations: Vec<Violation>,
    pub aggregates: Vec<RoundAggregate>,
    pub pairs_formed: u64,
    pub good_pair_events: u64,
    pub bad_pair_lifetimes: Vec<u64>,
    pub bad_pairs: BadPairStats,
    pub max_induced_degree: u32,
    pub degree_cap: u64,
    /// FNV-1a 64 of the transition log, as 16 hex digits.
    pub trace_hash: String,
}

impl RunResult {
    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violation_counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn safety_violations(&self) -> usize {
        self.violation_counts
            .iter()
            .filter(|(k, _)| k.is_safety())
            .map(|(_, c)| c)
            .sum()
    }

    pub fn safety_ok(&self) -> bool {
        self.safety_violations() == 0
    }

    /// Every node decided within the runtime budget of its wake round.
    pub fn within_budget(&self) -> bool {
        self.nodes
            .iter()
            .all(|o| o.latency.is_some_and(|l| l <= self.params.runtime_budget))
    }

    pub fn stragglers(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|o| !o.latency.is_some_and(|l| l <= self.params.runtime_budget))
            .map(|o| o.node)
            .collect()
    }

    /// Largest decision round (None if some node is undecided).
    pub fn makespan(&self) -> Option<u64> {
        self.nodes.iter().map(|o| o.decision_round).collect::<Option<Vec<_>>>()?.into_iter().max()
    }

    pub fn median_decision(&self) -> Option<f64> {
        let mut d: Vec<u64> = self.nodes.iter().filter_map(|o| o.decision_round).collect();
        median(&mut d)
    }

    pub fn mis_set(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|o| o.verdict == Verdict::Mis)
            .map(|o| o.node)
            .collect()
    }

    pub fn trace_hash_u64(&self) -> u64 {
        u64::from_str_radix(&self.trace_hash, 16).unwrap_or_default()
    }
}

pub fn median(values: &mut [u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m] as f64
    } else {
        (values[m - 1] + values[m]) as f64 / 2.0
    })
}

/// Builds the graph from the config and runs it.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    let g = config.graph.build(config.seed)?;
    run_on(&g, config)
}

/// Runs `config` on an already built graph (the config's graph spec is
/// ignored).
pub fn run_on(g: &Graph, config: &RunConfig) -> Result<RunResult> {
    let n = g.node_count();
    let (alpha, alpha_auto) = match config.alpha {
        AlphaSpec::Value(a) => (a.max(1), false),
        AlphaSpec::Keyword(AutoKeyword::Auto) => {
            let cap = config.alpha_cap.max(DEFAULT_BRUTE_FORCE_CAP);
            (alpha_two(g, cap)?.max(1) as u32, true)
        }
    };
    let mut overrides = config.params.clone();
    if config.budget_multiplier.is_some() {
        overrides.budget_multiplier = config.budget_multiplier;
    }
    let derived = derive_params(n as u64, config.f, alpha, &overrides);
    derived.params.validate()?;
    for w in &derived.warnings {
        log::warn!("{w}");
    }
    let params = derived.params.clone();
    let wake = make_schedule(&config.schedule, n, config.seed)?;
    let max_wake = wake.iter().copied().max().unwrap_or(0);
    let budget = params.runtime_budget;
    let max_rounds = config.max_rounds.unwrap_or(max_wake.saturating_add(budget));
    if max_rounds < budget {
        return Err(HarnessError::Config(format!(
            "max_rounds {max_rounds} is below the runtime budget {budget}"
        )));
    }
    let tracing = config.trace.path.is_some();
    let mut engine = Engine::new(g, params.clone(), wake.clone(), config.seed).with_recording(Recording {
        transitions: tracing,
        deliveries: tracing && config.trace.deliveries,
    });
    let mut monitor = Monitor::new(n, derived.analysis.delta_max_cap);
    let stride = config.trace.aggregate_stride;
    let mut aggregates = Vec::new();
    while !engine.all_decided() && engine.round() < max_rounds {
        engine.advance();
        let snap = Snapshot::of(&engine);
        monitor.observe(&snap, engine.round_transitions());
        if stride > 0 && snap.round.is_multiple_of(stride) {
            aggregates.push(monitor.aggregate(&snap));
        }
    }
    monitor.finish();
    log::info!(
        "seed {} n {n} F {}: {} rounds, all decided: {}",
        config.seed,
        config.f,
        engine.round(),
        engine.all_decided()
    );

    let mut violations = std::mem::take(&mut monitor.violations);
    if engine.round() > 0 {
        violations.extend(check_final(&Snapshot::of(&engine), budget, &wake));
    }
    let mut violation_counts = BTreeMap::new();
    for v in &violations {
        *violation_counts.entry(v.kind).or_insert(0) += 1;
    }
    let mut kept = 0;
    violations.retain(|v| {
        if v.kind != ViolationKind::Undecided {
            return true;
        }
        kept += 1;
        kept <= 64
    });

    let nodes: Vec<NodeOutcome> = (0..n)
        .map(|v| {
            let state = engine.nodes()[v].state;
            let decision_round = engine.decision_rounds()[v];
            NodeOutcome {
                node: v,
                wake: wake[v],
                verdict: match state {
                    NodeState::M => Verdict::Mis,
                    NodeState::E => Verdict::Eliminated,
                    _ => Verdict::Undecided,
                },
                decision_round,
                latency: decision_round.map(|d| d - wake[v] + 1),
                hf_entry: engine.hf_entry()[v],
            }
        })
        .collect();
    let lifetimes = monitor.bad_lifetimes.clone();
    let bad_pairs = BadPairStats {
        observed: lifetimes.len(),
        mean_lifetime: (!lifetimes.is_empty())
            .then(|| lifetimes.iter().sum::<u64>() as f64 / lifetimes.len() as f64),
        below_red_blue: lifetimes.iter().filter(|&&l| l < params.tau_red_blue).count(),
    };
    let result = RunResult {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        n,
        f: config.f,
        alpha,
        alpha_auto,
        params,
        analysis: derived.analysis.clone(),
        warnings: derived.warnings,
        divergences: derived.divergences,
        rounds: engine.round(),
        all_decided: engine.all_decided(),
        mis_size: nodes.iter().filter(|o| o.verdict == Verdict::Mis).count(),
        nodes,
        violation_counts,
        violations,
        aggregates,
        pairs_formed: monitor.pairs_formed,
        good_pair_events: monitor.good_pair_events,
        bad_pair_lifetimes: lifetimes,
        bad_pairs,
        max_induced_degree: monitor.max_induced_degree,
        degree_cap: derived.analysis.delta_max_cap,
        trace_hash: format!("{:016x}", engine.trace_hash()),
    };
    if let Some(path) = &config.trace.path {
        emit_trace(&engine, path)?;
    }
    Ok(result)
}

/// One line of a JSONL trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceRecord {
    Transition(TransitionRecord),
    Delivery(DeliveryRecord),
    Summary(TraceSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub schema_version: u32,
    pub rounds: u64,
    pub trace_hash: String,
    pub seed: u64,
    pub params: ProtocolParams,
    pub wake: Vec<u64>,
    pub deliveries_recorded: bool,
}

/// Writes the engine's recorded transitions and deliveries, merged in round
/// order, followed by a summary record.
pub fn emit_trace(engine: &Engine<'_>, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let mut deliveries = engine.deliveries().iter().peekable();
    let line = |rec: &TraceRecord, out: &mut BufWriter<File>| -> Result<()> {
        serde_json::to_writer(&mut *out, rec)?;
        out.write_all(b"\n")?;
        Ok(())
    };
    for t in engine.transitions() {
        while let Some(d) = deliveries.next_if(|d| d.round <= t.round) {
            line(&TraceRecord::Delivery(*d), &mut out)?;
        }
        line(&TraceRecord::Transition(*t), &mut out)?;
    }
    for d in deliveries {
        line(&TraceRecord::Delivery(*d), &mut out)?;
    }
    let summary = TraceSummary {
        schema_version: SCHEMA_VERSION,
        rounds: engine.round(),
        trace_hash: format!("{:016x}", engine.trace_hash()),
        seed: engine.seed(),
        params: engine.params().clone(),
        wake: engine.wake_schedule().to_vec(),
        deliveries_recorded: !engine.deliveries().is_empty() || engine.transitions().is_empty(),
    };
    line(&TraceRecord::Summary(summary), &mut out)?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub transitions: Vec<TransitionRecord>,
    pub deliveries: Vec<DeliveryRecord>,
    pub summary: Option<TraceSummary>,
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let reader = BufReader::new(File::open(path)?);
    let mut trace = Trace::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord = serde_json::from_str(&line).map_err(|e| HarnessError::Trace {
            path: path.to_path_buf(),
            msg: format!("line {}: {e}", i + 1),
        })?;
        match rec {
            TraceRecord::Transition(t) => trace.transitions.push(t),
            TraceRecord::Delivery(d) => trace.deliveries.push(d),
            TraceRecord::Summary(s) => trace.summary = Some(s),
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCheck {
    pub recorded_hash: Option<String>,
    pub computed_hash: String,
    pub hash_matches: bool,
    /// Transitions not on an edge of the state graph.
    pub illegal_transitions: Vec<TransitionRecord>,
    pub out_of_order: usize,
}

impl TraceCheck {
    pub fn ok(&self) -> bool {
        self.hash_matches && self.illegal_transitions.is_empty() && self.out_of_order == 0
    }
}

pub fn verify_trace(trace: &Trace) -> TraceCheck {
    let computed = format!("{:016x}", hash_transitions(&trace.transitions));
    let recorded = trace.summary.as_ref().map(|s| s.trace_hash.clone());
    TraceCheck {
        hash_matches: recorded.as_deref() == Some(computed.as_str()),
        recorded_hash: recorded,
        computed_hash: computed,
        illegal_transitions: trace
            .transitions
            .iter()
            .filter(|t| !t.from.may_transition_to(t.to))
            .copied()
            .collect(),
        out_of_order: trace
            .transitions
            .windows(2)
            .filter(|w| (w[0].round, w[0].node) > (w[1].round, w[1].node))
            .count(),
    }
}

/// One CSV row per (n, F, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub schema_version: u32,
    pub n: usize,
    pub f: u32,
    pub seed: u64,
    pub status: String,
    pub alpha: Option<u32>,
    pub rounds: Option<u64>,
    pub makespan: Option<u64>,
    pub median_decision: Option<f64>,
    pub mis_size: Option<usize>,
    pub mis_adjacency: usize,
    pub domination_missing: usize,
    pub crossing_edge: usize,
    pub undecided: usize,
    pub pair_reversion: usize,
    pub good_pair_events: u64,
    pub within_budget: bool,
    pub flagged: bool,
    pub trace_hash: String,
}

impl SweepRow {
    pub fn from_result(r: &RunResult) -> Self {
        SweepRow {
            schema_version: SCHEMA_VERSION,
            n: r.n,
            f: r.f,
            seed: r.seed,
            status: "ok".into(),
            alpha: Some(r.alpha),
            rounds: Some(r.rounds),
            makespan: r.makespan(),
            median_decision: r.median_decision(),
            mis_size: Some(r.mis_size),
            mis_adjacency: r.count(ViolationKind::MisAdjacency),
            domination_missing: r.count(ViolationKind::DominationMissing),
            crossing_edge: r.count(ViolationKind::CrossingEdge),
            undecided: r.count(ViolationKind::Undecided),
            pair_reversion: r.count(ViolationKind::PairReversion),
            good_pair_events: r.good_pair_events,
            within_budget: r.within_budget(),
            flagged: !r.safety_ok(),
            trace_hash: r.trace_hash.clone(),
        }
    }

    fn failed(n: usize, f: u32, seed: u64, err: &HarnessError) -> Self {
        SweepRow {
            schema_version: SCHEMA_VERSION,
            n,
            f,
            seed,
            status: format!("error: {err}"),
            alpha: None,
            rounds: None,
            makespan: None,
            median_decision: None,
            mis_size: None,
            mis_adjacency: 0,
            domination_missing: 0,
            crossing_edge: 0,
            undecided: 0,
            pair_reversion: 0,
            good_pair_events: 0,
            within_budget: false,
            flagged: true,
            trace_hash: String::new(),
        }
    }
}

/// Runs every (n, F, seed) cell, in parallel, and returns rows sorted by key.
/// Failed cells become flagged rows.
pub fn sweep(base: &RunConfig, n_list: &[usize], f_list: &[u32], seeds: &[u64]) -> Vec<SweepRow> {
    let cells: Vec<(usize, u32, u64)> = n_list
        .iter()
        .flat_map(|&n| f_list.iter().flat_map(move |&f| seeds.iter().map(move |&s| (n, f, s))))
        .collect();
    let mut rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(n, f, seed)| {
            let mut cfg = base.clone();
            cfg.graph = base.graph.with_n(n);
            cfg.f = f;
            cfg.seed = seed;
            cfg.trace.path = None;
            cfg.trace.aggregate_stride = 0;
            match run(&cfg) {
                Ok(r) => SweepRow::from_result(&r),
                Err(e) => SweepRow::failed(n, f, seed, &e),
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.n, r.f, r.seed));
    rows
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_examples() {
        assert_eq!(make_schedule(&ScheduleSpec::AllAtZero, 5, 1).unwrap(), vec![0; 5]);
        assert_eq!(
            make_schedule(&ScheduleSpec::Blocks { size: 2, gap: 10 }, 5, 1).unwrap(),
            vec![0, 0, 10, 10, 20]
        );
        let u = ScheduleSpec::UniformRandom { window: 100 };
        let a = make_schedule(&u, 50, 9).unwrap();
        assert_eq!(a, make_schedule(&u, 50, 9).unwrap());
        assert!(a.iter().all(|&w| w <= 100));
        assert_ne!(a, make_schedule(&u, 50, 10).unwrap());
    }

    #[test]
    fn explicit_schedule_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("wake.txt");
        std::fs::write(&p, "0 3\n7").unwrap();
        let spec = ScheduleSpec::Explicit { path: p.clone() };
        assert_eq!(make_schedule(&spec, 3, 0).unwrap(), vec![0, 3, 7]);
        assert!(matches!(make_schedule(&spec, 4, 0), Err(HarnessError::Schedule { .. })));
        std::fs::write(&p, "0 x 1").unwrap();
        assert!(make_schedule(&spec, 3, 0).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{
            "graph": {"kind": "unit_disk", "n": 64, "avg_degree": 8.0},
            "f": 8, "alpha": "auto", "seed": 5,
            "schedule": {"kind": "blocks", "size": 8, "gap": 20},
            "params": {"c_l": 100.0}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.alpha, AlphaSpec::Keyword(AutoKeyword::Auto));
        assert_eq!(cfg.params.c_l, Some(100.0));
        let again = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
        let fixed = RunConfig::from_json(r#"{"graph":{"kind":"structured","topology":"clique","n":4},"f":4,"alpha":3,"seed":1}"#)
            .unwrap();
        assert_eq!(fixed.alpha, AlphaSpec::Value(3));
        assert!(RunConfig::from_json(r#"{"graph":{"kind":"structured","topology":"clique","n":4},"f":4}"#).is_err());
        assert!(RunConfig::from_json(r#"{"graph":{"kind":"structured","topology":"clique","n":4},"f":4,"seed":1,"bogus":1}"#).is_err());
    }

    #[test]
    fn max_rounds_below_budget_rejected() {
        let mut cfg = RunConfig::new(
            GraphSpec::Structured {
                topology: Topology::Path,
                n: 4,
                width: None,
            },
            4,
            1,
        );
        cfg.max_rounds = Some(10);
        assert!(matches!(run(&cfg), Err(HarnessError::Config(_))));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3, 1, 2]), Some(2.0));
        assert_eq!(median(&mut [4, 1, 2, 3]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }
}
