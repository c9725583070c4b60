//! Per-node protocol state machine: decay filter, herald protocol, handshake,
//! red-blue game, and dominator behaviour.
//!
//! Each round a node first runs [`NodeCtx::begin_round`], which advances its
//! local counters, draws this round's randomness and picks one channel
//! action. After the radio resolves the round, [`NodeCtx::end_round`] applies
//! whatever the node decoded (if anything) and performs the state change for
//! the next round. A node only ever sees its own RNG stream and its own
//! receptions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeId;
use crate::radio::{Action, ChannelId, ChannelLayout, Message, MessageKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeState {
    #[serde(rename = "asleep")]
    Asleep,
    W,
    D,
    A,
    /// Herald candidate (H′).
    #[serde(rename = "Hc")]
    HeraldCand,
    /// Leader candidate (L′).
    #[serde(rename = "Lc")]
    LeaderCand,
    H,
    L,
    M,
    E,
}

impl NodeState {
    pub const ALL: [NodeState; 10] = [
        NodeState::Asleep,
        NodeState::W,
        NodeState::D,
        NodeState::A,
        NodeState::HeraldCand,
        NodeState::LeaderCand,
        NodeState::H,
        NodeState::L,
        NodeState::M,
        NodeState::E,
    ];

    /// A, H′, L′, H, L.
    pub fn in_herald_filter(self) -> bool {
        matches!(
            self,
            NodeState::A | NodeState::HeraldCand | NodeState::LeaderCand | NodeState::H | NodeState::L
        )
    }

    pub fn in_decay_filter(self) -> bool {
        matches!(self, NodeState::W | NodeState::D)
    }

    pub fn is_decided(self) -> bool {
        matches!(self, NodeState::M | NodeState::E)
    }

    /// Stable numeric code used in trace hashing.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            NodeState::Asleep => "asleep",
            NodeState::W => "W",
            NodeState::D => "D",
            NodeState::A => "A",
            NodeState::HeraldCand => "Hc",
            NodeState::LeaderCand => "Lc",
            NodeState::H => "H",
            NodeState::L => "L",
            NodeState::M => "M",
            NodeState::E => "E",
        }
    }

    /// Stage rank: asleep < decay filter < herald filter < decided.
    pub fn stage(self) -> u8 {
        match self {
            NodeState::Asleep => 0,
            NodeState::W | NodeState::D => 1,
            NodeState::A
            | NodeState::HeraldCand
            | NodeState::LeaderCand
            | NodeState::H
            | NodeState::L => 2,
            NodeState::M | NodeState::E => 3,
        }
    }

    /// Whether `self -> to` is an edge of the protocol's state graph.
    pub fn may_transition_to(self, to: NodeState) -> bool {
        use NodeState::*;
        match (self, to) {
            (Asleep, W) => true,
            (W, D) | (D, W) | (D, A) => true,
            (A, HeraldCand) | (A, LeaderCand) => true,
            (HeraldCand, A) | (LeaderCand, A) | (HeraldCand, H) | (LeaderCand, L) => true,
            (H, A) | (L, A) => true,
            (W | D | A | HeraldCand | LeaderCand | H, E) => true,
            (A | HeraldCand | LeaderCand | H | L, M) => true,
            // Loneliness promotion under the literal counter reading.
            (W | D, M) => true,
            _ => false,
        }
    }
}

impl std::fmt::Display for NodeState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Which states advance and check the loneliness counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LonelyScope {
    /// Only while in the herald filter; reset to 0 on entry.
    #[default]
    HeraldFilter,
    /// Every awake, undecided round from wake-up on (literal core loop).
    AllStates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Blue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Nodes' knowledge of n.
    pub n_known: u64,
    pub alpha: u32,
    /// Channel budget F.
    pub f: u32,
    pub n_report: u32,
    pub n_decay: u32,
    pub n_herald: u32,
    /// π_ℓ: share of herald-protocol participation spent listening.
    pub pi_l: f64,
    /// σ⊕: per-round activity growth.
    pub sigma_plus: f64,
    /// σ⊖: activity reduction on hearing a leader or herald.
    pub sigma_minus: f64,
    /// Exponent of the per-round red-blue decay σ⊕^-x.
    pub rbg_decay_exp: i32,
    pub m_bar: f64,
    pub gamma_min: f64,
    pub tau_w: u64,
    pub tau_d: u64,
    pub tau_lonely: u64,
    pub tau_red_blue: u64,
    /// Harness budget τ_runtime (rounds from wake-up to decision).
    pub runtime_budget: u64,
    pub lonely_scope: LonelyScope,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("tau_red_blue = {0} is not a positive multiple of 8")]
    RedBlueNotMultipleOf8(u64),
    #[error("n_report = {n_report} is below 3·alpha² = {need}")]
    TooFewReportChannels { n_report: u32, need: u64 },
    #[error("gamma_min = {0} outside (0, 1/2]")]
    GammaMin(f64),
    #[error("pi_l = {0} outside (0, 1/10]")]
    PiL(f64),
    #[error("{name} = {value} must exceed 1")]
    Sigma { name: &'static str, value: f64 },
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("n_herald = {0} exceeds 63")]
    TooManyHeraldChannels(u32),
}

impl ProtocolParams {
    pub fn layout(&self) -> ChannelLayout {
        ChannelLayout {
            report: self.n_report,
            decay: self.n_decay,
            herald: self.n_herald,
        }
    }

    /// Largest decay phase: log₂ n − 2, floored at 0.
    pub fn phase_cap(&self) -> u32 {
        (63 - self.n_known.max(1).leading_zeros()).saturating_sub(2)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.tau_red_blue == 0 || !self.tau_red_blue.is_multiple_of(8) {
            return Err(ParamError::RedBlueNotMultipleOf8(self.tau_red_blue));
        }
        let need = 3 * (self.alpha as u64).pow(2);
        if (self.n_report as u64) < need {
            return Err(ParamError::TooFewReportChannels {
                n_report: self.n_report,
                need,
            });
        }
        if !(self.gamma_min > 0.0 && self.gamma_min <= 0.5) {
            return Err(ParamError::GammaMin(self.gamma_min));
        }
        if !(self.pi_l > 0.0 && self.pi_l <= 0.1) {
            return Err(ParamError::PiL(self.pi_l));
        }
        for (name, value) in [("sigma_plus", self.sigma_plus), ("sigma_minus", self.sigma_minus)] {
            if !(value > 1.0) {
                return Err(ParamError::Sigma { name, value });
            }
        }
        for (name, v) in [
            ("n_known", self.n_known),
            ("n_report", self.n_report as u64),
            ("n_decay", self.n_decay as u64),
            ("n_herald", self.n_herald as u64),
            ("tau_w", self.tau_w),
            ("tau_d", self.tau_d),
            ("tau_lonely", self.tau_lonely),
        ] {
            if v == 0 {
                return Err(ParamError::Zero(name));
            }
        }
        if self.n_herald > 63 {
            return Err(ParamError::TooManyHeraldChannels(self.n_herald));
        }
        Ok(())
    }
}

/// Partial parameter set; `None` fields take the desk-scale defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamOverrides {
    pub n_known: Option<u64>,
    pub n_report: Option<u32>,
    pub n_decay: Option<u32>,
    pub n_herald: Option<u32>,
    pub pi_l: Option<f64>,
    pub sigma_plus: Option<f64>,
    pub sigma_minus: Option<f64>,
    pub rbg_decay_exp: Option<i32>,
    pub m_bar: Option<f64>,
    pub gamma_min: Option<f64>,
    pub c_w: Option<f64>,
    pub c_d: Option<f64>,
    pub c_l: Option<f64>,
    pub c_r: Option<f64>,
    pub tau_w: Option<u64>,
    pub tau_d: Option<u64>,
    pub tau_lonely: Option<u64>,
    pub tau_red_blue: Option<u64>,
    /// τ_runtime = multiplier · τ_lonely; defaults to 2α².
    pub budget_multiplier: Option<f64>,
    pub lonely_scope: Option<LonelyScope>,
}

impl ParamOverrides {
    /// The constants used in the asymptotic analysis: γ_min = log⁻²⁴ n,
    /// m̄ = 2¹⁶·n_R, σ⊕ = 2^(6/(1000 m̄)), σ⊖ = σ⊕^(20 m̄) = 2^0.12.
    pub fn paper_constants(n: u64, alpha: u32) -> Self {
        let lg = log2_floor1(n);
        let n_report = 3 * alpha.max(1).pow(2);
        let m_bar = 65536.0 * n_report as f64;
        let sigma_plus = 2f64.powf(6.0 / (1000.0 * m_bar));
        ParamOverrides {
            gamma_min: Some(lg.powi(-24).min(0.5)),
            m_bar: Some(m_bar),
            sigma_plus: Some(sigma_plus),
            sigma_minus: Some(2f64.powf(0.12)),
            ..Default::default()
        }
    }
}

/// Analysis quantities with no algorithmic role, used by verifier probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConstants {
    /// δ = log log n / (2 log α); `None` when α < 2.
    pub delta: Option<f64>,
    /// η = α⁻⁸.
    pub eta: f64,
    /// γ_low = √γ_min.
    pub gamma_low: f64,
    /// ⌈log⁴ n⌉, the herald-filter degree cap probed at run time.
    pub delta_max_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub params: ProtocolParams,
    pub analysis: AnalysisConstants,
    pub warnings: Vec<String>,
    /// Effective values that differ from the analysis constants.
    pub divergences: Vec<String>,
}

pub const DEFAULT_C_W: f64 = 4.0;
pub const DEFAULT_C_D: f64 = 4.0;
pub const DEFAULT_C_R: f64 = 16.0;
/// τ_lonely scales with n_R: a node hears an MIS neighbour's report at a
/// rate of roughly 1/(6·n_R) per round.
pub const DEFAULT_C_L_PER_REPORT_CHANNEL: f64 = 12.0;
/// Floor on the channel count in c_L so that small α still leaves time for
/// two adjacent active nodes to meet on a herald channel.
pub const DEFAULT_C_L_MIN_CHANNELS: u32 = 256;
pub const DEFAULT_PI_L: f64 = 0.1;
pub const DEFAULT_SIGMA_PLUS_LOG2: f64 = 1.0 / 16.0;
pub const DEFAULT_M_BAR: f64 = 1.0;
pub const DEFAULT_RBG_DECAY_EXP: i32 = 20;

fn log2_floor1(n: u64) -> f64 {
    (n.max(2) as f64).log2().max(1.0)
}

/// Fills every protocol constant from `(n, F, α)` and `overrides`.
pub fn derive_params(n: u64, f: u32, alpha: u32, overrides: &ParamOverrides) -> DerivedParams {
    let n_known = overrides.n_known.unwrap_or(n).max(1);
    let alpha = alpha.max(1);
    let lg = log2_floor1(n_known);
    let f = f.max(1);
    let mut warnings = Vec::new();

    let n_report = overrides.n_report.unwrap_or(3 * alpha * alpha);
    let n_herald = overrides
        .n_herald
        .unwrap_or_else(|| (lg.log2().ceil() as u32).max(1));
    let n_decay = overrides.n_decay.unwrap_or_else(|| {
        (f as i64 - n_report as i64 - n_herald as i64 - 2).max(1) as u32
    });
    if (f as u64) < n_report as u64 + n_herald as u64 + 3 {
        warnings.push(format!(
            "F = {f} is below n_R + n_A + 3 = {}; running with {} channels anyway",
            n_report + n_herald + 3,
            n_report + n_decay + n_herald + 2
        ));
    }

    let c_w = overrides.c_w.unwrap_or(DEFAULT_C_W);
    let c_d = overrides.c_d.unwrap_or(DEFAULT_C_D);
    let c_r = overrides.c_r.unwrap_or(DEFAULT_C_R);
    let c_l = overrides
        .c_l
        .unwrap_or(DEFAULT_C_L_PER_REPORT_CHANNEL * n_report.max(DEFAULT_C_L_MIN_CHANNELS) as f64);
    let tau_w = overrides.tau_w.unwrap_or((c_w * lg).ceil() as u64).max(1);
    let tau_d = overrides
        .tau_d
        .unwrap_or((c_d * lg / f as f64).ceil() as u64)
        .max(1);
    let tau_lonely = overrides
        .tau_lonely
        .unwrap_or((c_l * (lg * lg / f as f64 + lg)).ceil() as u64)
        .max(1);
    let tau_red_blue = overrides
        .tau_red_blue
        .unwrap_or(8 * ((c_r * lg / 8.0).ceil() as u64).max(1));

    let m_bar = overrides.m_bar.unwrap_or(DEFAULT_M_BAR);
    let sigma_plus = overrides
        .sigma_plus
        .unwrap_or(2f64.powf(DEFAULT_SIGMA_PLUS_LOG2));
    let sigma_minus = overrides
        .sigma_minus
        .unwrap_or(sigma_plus.powf(20.0 * m_bar));
    let gamma_min = overrides.gamma_min.unwrap_or(lg.powi(-3).min(0.5));
    let pi_l = overrides.pi_l.unwrap_or(DEFAULT_PI_L);
    let multiplier = overrides
        .budget_multiplier
        .unwrap_or(2.0 * (alpha * alpha) as f64);
    let runtime_budget = (multiplier * tau_lonely as f64).ceil() as u64;

    let paper_gamma_min = lg.powi(-24);
    let paper_m_bar = 65536.0 * n_report as f64;
    let paper_sigma_plus = 2f64.powf(6.0 / (1000.0 * paper_m_bar));
    let paper_sigma_minus = 2f64.powf(0.12);
    let mut divergences = Vec::new();
    let mut diverge = |name: &str, ours: f64, paper: f64| {
        if (ours - paper).abs() > 1e-12 * paper.abs().max(1e-300) {
            divergences.push(format!("{name} = {ours:.6e} (analysis value {paper:.6e})"));
        }
    };
    diverge("gamma_min", gamma_min, paper_gamma_min);
    diverge("m_bar", m_bar, paper_m_bar);
    diverge("sigma_plus", sigma_plus, paper_sigma_plus);
    diverge("sigma_minus", sigma_minus, paper_sigma_minus);

    let analysis = AnalysisConstants {
        delta: (alpha >= 2).then(|| lg.log2() / (2.0 * (alpha as f64).log2())),
        eta: (alpha as f64).powi(-8),
        gamma_low: gamma_min.sqrt(),
        delta_max_cap: lg.powi(4).ceil() as u64,
    };

    DerivedParams {
        params: ProtocolParams {
            n_known,
            alpha,
            f,
            n_report,
            n_decay,
            n_herald,
            pi_l,
            sigma_plus,
            sigma_minus,
            rbg_decay_exp: overrides.rbg_decay_exp.unwrap_or(DEFAULT_RBG_DECAY_EXP),
            m_bar,
            gamma_min,
            tau_w,
            tau_d,
            tau_lonely,
            tau_red_blue,
            runtime_budget,
            lonely_scope: overrides.lonely_scope.unwrap_or_default(),
        },
        analysis,
        warnings,
        divergences,
    }
}

/// This round's uniform draws: q ∈ [0,1), j ∈ 1..=n_D, k ∈ 1..=n_R.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Draws {
    pub q: f64,
    pub j: u32,
    pub k: u32,
}

/// What the node committed to this round; interprets the reception.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Slot {
    #[default]
    Idle,
    Wait,
    DecaySend,
    DecayListen,
    HeraldListen,
    HeraldSend,
    ReportListen,
    Handshake,
    RedBlue,
    Dominate,
}

/// One node's complete local state.
#[derive(Debug, Clone)]
pub struct NodeCtx {
    pub id: NodeId,
    pub state: NodeState,
    pub count: u64,
    pub phase: u32,
    pub gamma: f64,
    pub lonely: u64,
    pub leader_id: Option<NodeId>,
    pub meet: Option<u32>,
    pub handshake_ok: bool,
    pub game_ok: bool,
    pub color: Option<Color>,
    pub enforce: bool,
    pub draws: Draws,
    /// Herald channel index drawn this round (`None` = ⊥).
    pub herald_channel: Option<u32>,
    pub slot: Slot,
    rng: ChaCha8Rng,
}

impl NodeCtx {
    /// Fresh asleep node with its own stream of `(master_seed, id)`.
    pub fn new(id: NodeId, master_seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(id as u64);
        NodeCtx {
            id,
            state: NodeState::Asleep,
            count: 0,
            phase: 0,
            gamma: 0.0,
            lonely: 0,
            leader_id: None,
            meet: None,
            handshake_ok: true,
            game_ok: true,
            color: None,
            enforce: false,
            draws: Draws::default(),
            herald_channel: None,
            slot: Slot::Idle,
            rng,
        }
    }

    pub fn is_awake(&self) -> bool {
        self.state != NodeState::Asleep
    }

    pub fn wake(&mut self) {
        if self.state == NodeState::Asleep {
            self.state = NodeState::W;
            self.count = 0;
        }
    }

    fn message(&self, kind: MessageKind) -> Message {
        Message {
            sender: self.id,
            state_tag: self.state,
            kind,
        }
    }

    /// Counter updates, activity growth and fresh draws, then the channel
    /// action for this round.
    pub fn begin_round(&mut self, p: &ProtocolParams) -> Action {
        if matches!(self.state, NodeState::Asleep | NodeState::E) {
            self.slot = Slot::Idle;
            return Action::Inactive;
        }
        core_tick(self, p);
        select_action(self, p)
    }

    /// Applies this round's reception and the end-of-round state change.
    /// Returns `(from, to)` when the state changed.
    pub fn end_round(
        &mut self,
        p: &ProtocolParams,
        heard: Option<&Message>,
    ) -> Option<(NodeState, NodeState)> {
        let before = self.state;
        match before {
            NodeState::Asleep | NodeState::E | NodeState::M => {}
            NodeState::W | NodeState::D => dfilter_receive(self, p, heard),
            NodeState::A => herald_protocol_receive(self, p, heard),
            NodeState::HeraldCand | NodeState::LeaderCand => handshake_receive(self, p, heard),
            NodeState::H | NodeState::L => red_blue_receive(self, p, heard),
        }
        loneliness_promotion(self, p);
        (self.state != before).then_some((before, self.state))
    }

    fn enter(&mut self, state: NodeState) {
        self.state = state;
        match state {
            NodeState::E | NodeState::M => {
                self.gamma = 0.0;
                self.leader_id = None;
                self.color = None;
                self.enforce = false;
            }
            NodeState::A => {
                self.count = 0;
                self.leader_id = None;
                self.color = None;
            }
            _ => {}
        }
    }
}

/// Draws `i` with `Pr(i = j) = 2^-j` for `j` in `1..=n_a` and `Pr(⊥) = 2^-n_a`.
pub fn draw_herald_channel<R: Rng>(rng: &mut R, n_a: u32) -> Option<u32> {
    let i = rng.gen::<u64>().trailing_zeros() + 1;
    (i <= n_a).then_some(i)
}

/// Counters, activity growth (capped at 1/2) and this round's draws.
pub fn core_tick(ctx: &mut NodeCtx, p: &ProtocolParams) {
    ctx.count += 1;
    let counts_lonely = match p.lonely_scope {
        LonelyScope::HeraldFilter => ctx.state.in_herald_filter(),
        LonelyScope::AllStates => !ctx.state.is_decided(),
    };
    if counts_lonely {
        ctx.lonely += 1;
    }
    if ctx.gamma > 0.0 {
        ctx.gamma = (ctx.gamma * p.sigma_plus).min(0.5);
    }
    ctx.draws = Draws {
        q: ctx.rng.gen::<f64>(),
        j: ctx.rng.gen_range(1..=p.n_decay),
        k: ctx.rng.gen_range(1..=p.n_report),
    };
}

pub fn select_action(ctx: &mut NodeCtx, p: &ProtocolParams) -> Action {
    match ctx.state {
        NodeState::Asleep | NodeState::E => {
            ctx.slot = Slot::Idle;
            Action::Inactive
        }
        NodeState::W | NodeState::D => dfilter_step(ctx, p),
        NodeState::A => herald_protocol_step(ctx, p),
        NodeState::HeraldCand | NodeState::LeaderCand => handshake_step(ctx, p),
        NodeState::H | NodeState::L => red_blue_step(ctx, p),
        NodeState::M => dominator_step(ctx, p),
    }
}

/// Decay filter intent.
pub fn dfilter_step(ctx: &mut NodeCtx, p: &ProtocolParams) -> Action {
    let Draws { q, j, k } = ctx.draws;
    if ctx.state == NodeState::W {
        ctx.slot = Slot::Wait;
        return Action::Listen {
            channel: ChannelId::report(k),
        };
    }
    let send_prob = 2f64.powi(ctx.phase as i32) / p.n_known as f64;
    if q < send_prob {
        ctx.slot = Slot::DecaySend;
        Action::Broadcast {
            channel: ChannelId::decay(j),
            message: ctx.message(MessageKind::Decay),
        }
    } else if q < 0.5 {
        ctx.slot = Slot::DecayListen;
        Action::Listen {
            channel: ChannelId::decay(j),
        }
    } else {
        ctx.slot = Slot::DecayListen;
        Action::Listen {
            channel: ChannelId::report(k),
        }
    }
}

fn dfilter_receive(ctx: &mut NodeCtx, p: &ProtocolParams, heard: Option<&Message>) {
    match (ctx.state, ctx.slot) {
        (NodeState::W, _) => {
            if ctx.count >= p.tau_w {
                ctx.count = 0;
                ctx.phase = 0;
                ctx.state = NodeState::D;
            }
        }
        (NodeState::D, Slot::DecaySend) => {
            // exit decay filter, enter herald filter
            ctx.enter(NodeState::A);
            ctx.gamma = p.gamma_min;
            if p.lonely_scope == LonelyScope::HeraldFilter {
                ctx.lonely = 0;
            }
            return;
        }
        (NodeState::D, _)
            if ctx.count >= p.tau_d => {
                ctx.count = 0;
                ctx.phase = (ctx.phase + 1).min(p.phase_cap());
            }
        _ => {}
    }
    match heard.map(|m| m.kind) {
        Some(MessageKind::Decay) => {
            ctx.count = 0;
            ctx.state = NodeState::W;
        }
        Some(MessageKind::Mis) => ctx.enter(NodeState::E),
        _ => {}
    }
}

/// Herald protocol intent (state A).
pub fn herald_protocol_step(ctx: &mut NodeCtx, p: &ProtocolParams) -> Action {
    let i = draw_herald_channel(&mut ctx.rng, p.n_herald);
    ctx.herald_channel = i;
    if i.is_none() {
        ctx.draws.q = 1.0;
    }
    let q = ctx.draws.q;
    match i {
        Some(i) if q < p.pi_l * ctx.gamma => {
            ctx.slot = Slot::HeraldListen;
            Action::Listen {
                channel: ChannelId::herald(i),
            }
        }
        Some(i) if q < ctx.gamma => {
            ctx.slot = Slot::HeraldSend;
            Action::Broadcast {
                channel: ChannelId::herald(i),
                message: ctx.message(MessageKind::Adv),
            }
        }
        _ => {
            ctx.slot = Slot::ReportListen;
            Action::Listen {
                channel: ChannelId::report(ctx.draws.k),
            }
        }
    }
}

fn herald_protocol_receive(ctx: &mut NodeCtx, p: &ProtocolParams, heard: Option<&Message>) {
    match ctx.slot {
        Slot::HeraldListen => {
            if let Some(msg) = heard.filter(|m| m.kind == MessageKind::Adv) {
                ctx.enter(NodeState::HeraldCand);
                ctx.leader_id = Some(msg.sender);
                ctx.count = 0;
                ctx.handshake_ok = true;
                ctx.lonely = 0;
            }
        }
        Slot::HeraldSend => {
            ctx.enter(NodeState::LeaderCand);
            ctx.count = 0;
            ctx.handshake_ok = true;
        }
        Slot::ReportListen => {
            if let Some(msg) = heard {
                if msg.kind == MessageKind::Mis {
                    handle_mis_message(ctx);
                } else if matches!(msg.state_tag, NodeState::L | NodeState::H) {
                    ctx.gamma = (ctx.gamma / p.sigma_minus).max(p.gamma_min);
                    ctx.lonely = 0;
                }
            }
        }
        _ => {}
    }
}

/// Six-round handshake intent (states H′ and L′).
pub fn handshake_step(ctx: &mut NodeCtx, _p: &ProtocolParams) -> Action {
    ctx.slot = Slot::Handshake;
    let sending_slot = matches!(ctx.count, 1 | 2 | 5 | 6);
    match ctx.state {
        NodeState::HeraldCand if sending_slot => Action::Broadcast {
            channel: ChannelId::HANDSHAKE,
            message: ctx.message(MessageKind::HsHerald {
                leader: ctx.leader_id.expect("herald candidate has a leader"),
            }),
        },
        NodeState::LeaderCand if !sending_slot => {
            let meet = ctx.draws.k;
            ctx.meet = Some(meet);
            Action::Broadcast {
                channel: ChannelId::HANDSHAKE,
                message: ctx.message(MessageKind::HsLeader {
                    leader: ctx.id,
                    meet,
                }),
            }
        }
        _ => Action::Listen {
            channel: ChannelId::HANDSHAKE,
        },
    }
}

fn handshake_receive(ctx: &mut NodeCtx, _p: &ProtocolParams, heard: Option<&Message>) {
    if heard.is_some_and(|m| m.kind == MessageKind::Mis) {
        handle_mis_message(ctx);
        return;
    }
    let listening = match ctx.state {
        NodeState::HeraldCand => matches!(ctx.count, 3 | 4),
        _ => matches!(ctx.count, 1 | 2 | 5 | 6),
    };
    if listening {
        match (ctx.state, heard.map(|m| (m.sender, m.kind))) {
            (NodeState::HeraldCand, Some((from, MessageKind::HsLeader { leader, meet })))
                if Some(from) == ctx.leader_id && Some(leader) == ctx.leader_id =>
            {
                ctx.meet = Some(meet);
            }
            (NodeState::LeaderCand, Some((_, MessageKind::HsHerald { leader }))) if leader == ctx.id => {}
            _ => ctx.handshake_ok = false,
        }
    }
    if !ctx.handshake_ok {
        ctx.enter(NodeState::A);
        return;
    }
    if ctx.count == 6 {
        let next = if ctx.state == NodeState::HeraldCand {
            NodeState::H
        } else {
            ctx.leader_id = Some(ctx.id);
            NodeState::L
        };
        ctx.state = next;
        ctx.count = 0;
        ctx.game_ok = true;
        ctx.lonely = 0;
    }
}

/// Red-blue game intent (states H and L), eight-round cycle.
pub fn red_blue_step(ctx: &mut NodeCtx, p: &ProtocolParams) -> Action {
    ctx.slot = Slot::RedBlue;
    ctx.gamma = (ctx.gamma * p.sigma_plus.powi(-p.rbg_decay_exp)).max(p.gamma_min);
    let leader = ctx.leader_id.expect("paired node knows its leader");
    let meet = ChannelId::report(ctx.meet.expect("meeting channel fixed in handshake"));
    let phase = ctx.count % 8;
    if ctx.state == NodeState::H {
        return match phase {
            1 | 3 | 5 | 7 => Action::Broadcast {
                channel: ChannelId::HANDSHAKE,
                message: ctx.message(MessageKind::Block { leader }),
            },
            2 | 4 => Action::Broadcast {
                channel: ChannelId::GAME,
                message: ctx.message(MessageKind::Game { leader }),
            },
            6 => Action::Listen { channel: meet },
            _ => Action::Broadcast {
                channel: meet,
                message: ctx.message(MessageKind::RbgNotify { leader }),
            },
        };
    }
    match phase {
        1 | 3 | 5 | 7 => {
            if phase == 1 {
                ctx.color = Some(if ctx.rng.gen::<bool>() {
                    Color::Red
                } else {
                    Color::Blue
                });
            }
            Action::Broadcast {
                channel: ChannelId::HANDSHAKE,
                message: ctx.message(MessageKind::Block { leader: ctx.id }),
            }
        }
        2 | 4 => {
            let listen_color = if phase == 2 { Color::Blue } else { Color::Red };
            if ctx.color == Some(listen_color) {
                Action::Listen {
                    channel: ChannelId::GAME,
                }
            } else {
                Action::Broadcast {
                    channel: ChannelId::GAME,
                    message: ctx.message(MessageKind::Game { leader: ctx.id }),
                }
            }
        }
        6 => {
            let next_meet = ctx.draws.k;
            let msg = ctx.message(MessageKind::RbgResult {
                leader: ctx.id,
                success: ctx.game_ok,
                next_meet,
            });
            ctx.meet = Some(next_meet);
            Action::Broadcast {
                channel: meet,
                message: msg,
            }
        }
        _ => Action::Listen { channel: meet },
    }
}

fn red_blue_receive(ctx: &mut NodeCtx, p: &ProtocolParams, heard: Option<&Message>) {
    let phase = ctx.count % 8;
    if ctx.state == NodeState::H {
        if phase != 6 {
            return;
        }
        match heard.map(|m| (m.sender, m.kind)) {
            Some((
                from,
                MessageKind::RbgResult {
                    leader,
                    success: true,
                    next_meet,
                },
            )) if Some(from) == ctx.leader_id && Some(leader) == ctx.leader_id => {
                ctx.meet = Some(next_meet);
            }
            _ => {
                ctx.enter(NodeState::A);
                ctx.lonely = 0;
            }
        }
        if ctx.state == NodeState::H && ctx.count > p.tau_red_blue {
            ctx.enter(NodeState::E);
        }
        return;
    }
    match phase {
        2 | 4 => {
            let listen_color = if phase == 2 { Color::Blue } else { Color::Red };
            if ctx.color == Some(listen_color) {
                let ok = matches!(
                    heard.map(|m| m.kind),
                    Some(MessageKind::Game { leader }) if leader == ctx.id
                );
                if !ok {
                    ctx.game_ok = false;
                }
            }
        }
        6 => {
            if !ctx.game_ok {
                ctx.enter(NodeState::A);
                ctx.lonely = 0;
            } else if ctx.count > p.tau_red_blue {
                ctx.enter(NodeState::M);
            }
        }
        _ => {}
    }
}

/// MIS node intent. Broadcasts on H at least every other round.
pub fn dominator_step(ctx: &mut NodeCtx, _p: &ProtocolParams) -> Action {
    ctx.slot = Slot::Dominate;
    let q = ctx.draws.q;
    let channel = if ctx.enforce || q < 0.5 {
        ctx.enforce = false;
        ChannelId::HANDSHAKE
    } else if q < 0.75 {
        ctx.enforce = true;
        ChannelId::GAME
    } else {
        ctx.enforce = true;
        ChannelId::report(ctx.draws.k)
    };
    Action::Broadcast {
        channel,
        message: ctx.message(MessageKind::Mis),
    }
}

/// A node that decodes an MIS announcement outside the paired states is
/// dominated. Paired nodes are instead disrupted by the game logic.
pub fn handle_mis_message(ctx: &mut NodeCtx) {
    if matches!(
        ctx.state,
        NodeState::W | NodeState::D | NodeState::A | NodeState::HeraldCand | NodeState::LeaderCand
    ) {
        ctx.enter(NodeState::E);
    }
}

/// Joins the MIS once the loneliness counter reaches τ_lonely.
pub fn loneliness_promotion(ctx: &mut NodeCtx, p: &ProtocolParams) {
    let eligible = match p.lonely_scope {
        LonelyScope::HeraldFilter => ctx.state.in_herald_filter(),
        LonelyScope::AllStates => ctx.is_awake() && !ctx.state.is_decided(),
    };
    if eligible && ctx.lonely >= p.tau_lonely {
        ctx.enter(NodeState::M);
    }
}
