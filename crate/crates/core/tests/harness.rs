use heraldmis::engine::{replay_node, EMPTY_TRACE_HASH};
use heraldmis::graph::Topology;
use heraldmis::harness::{
    read_trace, run, sweep, verify_trace, write_csv, GraphSpec, RunConfig, SweepRow, TraceRecord, Verdict,
};
use heraldmis::protocol::ParamOverrides;
use heraldmis::verifier::{check_final, ViolationKind};

fn structured(topology: Topology, n: usize, seed: u64) -> RunConfig {
    RunConfig::new(
        GraphSpec::Structured {
            topology,
            n,
            width: None,
        },
        8,
        seed,
    )
}

#[test]
fn single_node_promotes_after_lonely_wait() {
    for seed in 0..5 {
        let r = run(&structured(Topology::Empty, 1, seed)).unwrap();
        let o = &r.nodes[0];
        assert_eq!(o.verdict, Verdict::Mis);
        assert_eq!(o.decision_round.unwrap() - o.hf_entry.unwrap(), r.params.tau_lonely);
        assert_eq!(r.rounds, o.decision_round.unwrap() + 1);
    }
}

#[test]
fn clique_of_eight_has_one_leader() {
    for seed in 0..5 {
        let r = run(&structured(Topology::Clique, 8, seed)).unwrap();
        assert!(r.all_decided);
        assert_eq!(r.mis_size, 1);
        assert_eq!(r.nodes.iter().filter(|o| o.verdict == Verdict::Eliminated).count(), 7);
        assert!(r.violation_counts.is_empty(), "{:?}", r.violation_counts);
        assert_eq!(r.alpha, 1);
    }
}

#[test]
fn path_result_is_maximal() {
    let cfg = structured(Topology::Path, 12, 4);
    let g = cfg.graph.build(cfg.seed).unwrap();
    let r = run(&cfg).unwrap();
    let m = r.mis_set();
    for w in m.windows(2) {
        assert!(w[1] > w[0] + 1, "adjacent MIS nodes {w:?}");
    }
    for v in 0..12 {
        assert!(m.contains(&v) || g.neighbors(v).iter().any(|u| m.contains(u)));
    }
    assert_eq!(r.count(ViolationKind::Undecided), 0);
}

#[test]
fn repeated_run_is_identical() {
    let cfg = RunConfig::new(GraphSpec::unit_disk_with_degree(50, 6.0), 4, 11);
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.seed = 12;
    assert_ne!(run(&other).unwrap().trace_hash, a.trace_hash);
}

#[test]
fn divergences_reported_unless_paper_constants() {
    let cfg = structured(Topology::Path, 6, 1);
    let r = run(&cfg).unwrap();
    assert!(r.divergences.iter().any(|d| d.starts_with("gamma_min")));
    let mut paper = cfg.clone();
    paper.params = ParamOverrides::paper_constants(6, 2);
    paper.params.tau_lonely = Some(2000);
    paper.alpha = heraldmis::harness::AlphaSpec::Value(2);
    let r = run(&paper).unwrap();
    assert!(r.divergences.is_empty(), "{:?}", r.divergences);
    assert!(r.all_decided);
}

#[test]
fn sweep_single_cell_matches_run() {
    let mut base = RunConfig::new(GraphSpec::unit_disk_with_degree(40, 6.0), 8, 0);
    base.trace.aggregate_stride = 0;
    let rows = sweep(&base, &[40], &[8], &[3]);
    assert_eq!(rows.len(), 1);
    let mut cfg = base.clone();
    cfg.seed = 3;
    assert_eq!(rows[0], SweepRow::from_result(&run(&cfg).unwrap()));
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("schema_version,n,f,seed,status"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn sweep_rows_sorted_and_failures_recorded() {
    let base = RunConfig::new(GraphSpec::unit_disk_with_degree(30, 5.0), 4, 0);
    let rows = sweep(&base, &[30, 20], &[8, 4], &[2, 1]);
    let keys: Vec<_> = rows.iter().map(|r| (r.n, r.f, r.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(rows.len(), 8);

    let broken = RunConfig::new(
        GraphSpec::File {
            path: "/nonexistent/graph.txt".into(),
        },
        4,
        0,
    );
    let rows = sweep(&broken, &[5], &[4], &[1, 2]);
    assert!(rows.iter().all(|r| r.flagged && r.status.starts_with("error")));
}

#[test]
fn trace_disabled_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    run(&structured(Topology::Path, 4, 1)).unwrap();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn empty_run_trace_is_summary_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let mut cfg = structured(Topology::Empty, 0, 1);
    cfg.trace.path = Some(path.clone());
    let r = run(&cfg).unwrap();
    assert_eq!(r.rounds, 0);
    assert_eq!(r.trace_hash_u64(), EMPTY_TRACE_HASH);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    let rec: TraceRecord = serde_json::from_str(text.trim()).unwrap();
    assert!(matches!(rec, TraceRecord::Summary(s) if s.schema_version == 1));
}

#[test]
fn trace_round_trip_verifies_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let mut cfg = RunConfig::new(GraphSpec::unit_disk_with_degree(30, 6.0), 4, 5);
    cfg.trace.path = Some(path.clone());
    let r = run(&cfg).unwrap();
    let trace = read_trace(&path).unwrap();
    let check = verify_trace(&trace);
    assert!(check.ok(), "{check:?}");
    assert_eq!(check.computed_hash, r.trace_hash);
    let s = trace.summary.as_ref().unwrap();
    for v in 0..30 {
        let logged: Vec<_> = trace.transitions.iter().filter(|t| t.node == v).copied().collect();
        assert_eq!(replay_node(&s.params, s.seed, v, s.wake[v], s.rounds, &trace.deliveries), logged);
    }
    let mut tampered = trace.clone();
    tampered.transitions.swap(0, 5);
    assert!(!verify_trace(&tampered).ok());
}

#[test]
fn check_final_on_clique_run() {
    use heraldmis::engine::Engine;
    use heraldmis::graph::gen_structured;
    use heraldmis::protocol::derive_params;
    use heraldmis::verifier::Snapshot;
    let g = gen_structured(Topology::Clique, 6, None).unwrap();
    let p = derive_params(6, 8, 1, &ParamOverrides::default()).params;
    let budget = p.runtime_budget;
    let mut e = Engine::new(&g, p, vec![0; 6], 9);
    while !e.all_decided() {
        e.advance();
    }
    assert!(check_final(&Snapshot::of(&e), budget, &[0; 6]).is_empty());
}
