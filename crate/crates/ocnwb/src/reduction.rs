//! From weak simulation to strong simulation, and onward to step nets.
//!
//! Weak simulation between one-counter nets is awkward to attack head-on:
//! a single weak step `τ* a τ*` bundles unboundedly many silent moves.
//! The passes here rebuild the problem in stages until only ordinary
//! strong-simulation questions remain:
//!
//! 1. [`build_guarded_omega`] folds the silent structure of a net into a
//!    guarded ω-net `G` whose single steps stand for whole weak steps:
//!    acyclic silent detours become guarded finite transitions, reachable
//!    counter-increasing silent cycles become ω-transitions.
//! 2. [`normalize`] expands an OCN/guarded-ω-net pair into a plain
//!    (OCN, ω-net) pair with unit effects: every original round is
//!    stretched into an `a`-step followed by `k` bookkeeping `@b`-steps
//!    that pay the guard down and re-credit it.
//! 3. [`weak_to_strong`] chains the two. Weak simulation on the original
//!    pair coincides with strong simulation on the output pair, at the
//!    original state names (preserved verbatim), and survival of the
//!    level-α weak game transfers to level α of the strong game.
//! 4. [`build_step_nets`] removes the remaining ω-transitions: given a
//!    table of minimal winning Spoiler counters (an [`MTable`]), it
//!    produces two plain one-counter nets whose strong simulation
//!    relation captures the next ω-budget slice of the input pair.
//!
//! Fresh states and labels invented by these passes carry an `@` marker
//! (`@chain/…`, `@gadget/…`, `@w/…`, `@b`, `@j/…`); inputs containing `@`
//! anywhere in a state or label name are rejected up front so the passes
//! stay injective on names.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::games::approximant::approximant_run;
use crate::games::GameError;
use crate::nets::{Effect, Net, NetError, NetKind, Path, StateId, SILENT_LABEL};

/// Errors from the construction passes.
#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("net `{net}` has kind {got}, expected {want}")]
    WrongKind {
        net: String,
        got: &'static str,
        want: &'static str,
    },
    #[error("name `{0}` contains the reserved marker `@`; rename it before reducing")]
    ReservedName(String),
    #[error("label `{0}` collides with a label this construction introduces")]
    LabelClash(String),
    #[error("net `{net}` must only use counter effects in {{-1,0,+1}} here")]
    UnitDeltaRequired { net: String },
    #[error("table does not match the nets: {0}")]
    TableMismatch(String),
}

fn want_kind(net: &Net, ok: &[NetKind], want: &'static str) -> Result<(), ReductionError> {
    if ok.contains(&net.kind) {
        Ok(())
    } else {
        Err(ReductionError::WrongKind {
            net: net.name.clone(),
            got: net.kind.tag(),
            want,
        })
    }
}

/// Reject nets whose state or label names already contain `@`.
fn plain_names(net: &Net) -> Result<(), ReductionError> {
    if let Some(s) = net.states().iter().find(|s| s.contains('@')) {
        return Err(ReductionError::ReservedName(s.clone()));
    }
    if let Some(l) = net.labels().iter().find(|l| l.text.contains('@')) {
        return Err(ReductionError::ReservedName(l.text.clone()));
    }
    Ok(())
}

/// The constructions below stretch single steps into `k`-step sequences,
/// which only stays faithful when the source net moves its counter by at
/// most one per step.
fn unit_deltas(net: &Net) -> Result<(), ReductionError> {
    for t in &net.trans {
        match t.effect {
            Effect::Fin(-1..=1) => {}
            _ => {
                return Err(ReductionError::UnitDeltaRequired {
                    net: net.name.clone(),
                })
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Direct paths
// ---------------------------------------------------------------------------

/// All direct paths from `source` to `target` in one net: walks whose
/// states are pairwise distinct except that source and target may
/// coincide, in which case the empty path is included too. Their length
/// is therefore bounded by the number of states.
#[derive(Clone, Debug)]
pub struct DirectPathSet {
    pub source: StateId,
    pub target: StateId,
    pub paths: Vec<Path>,
}

/// Enumerate direct paths; with `silent_only` set, only τ-labeled
/// transitions are walked.
pub fn direct_paths(
    net: &Net,
    source: StateId,
    target: StateId,
    silent_only: bool,
) -> Result<DirectPathSet, ReductionError> {
    want_kind(net, &[NetKind::Ocn], "ocn")?;
    for s in [source, target] {
        if s.ix() >= net.states().len() {
            return Err(NetError::UnknownState(format!("#{}", s.0)).into());
        }
    }
    let mut paths = Vec::new();
    if source == target {
        paths.push(Path::default());
    }
    let mut visited = HashSet::new();
    let mut steps = Vec::new();
    walk(net, source, source, target, silent_only, &mut visited, &mut steps, &mut paths);
    Ok(DirectPathSet { source, target, paths })
}

#[allow(clippy::too_many_arguments)]
fn walk(
    net: &Net,
    cur: StateId,
    source: StateId,
    target: StateId,
    silent_only: bool,
    visited: &mut HashSet<StateId>,
    steps: &mut Vec<usize>,
    out: &mut Vec<Path>,
) {
    for (ti, t) in net.trans_from(cur) {
        if silent_only && !net.label(t.label).is_silent() {
            continue;
        }
        let v = t.dst;
        steps.push(ti);
        if v == target {
            out.push(Path::new(steps.clone()));
            // the target may not reappear in the interior, so stop here
        } else if v != source && !visited.contains(&v) {
            visited.insert(v);
            walk(net, v, source, target, silent_only, visited, steps, out);
            visited.remove(&v);
        }
        steps.pop();
    }
}

// ---------------------------------------------------------------------------
// Guarded ω-net construction
// ---------------------------------------------------------------------------

/// Undominated (guard, effect) profiles of a family of silent paths:
/// keep a pair unless another one needs no more counter and gains no
/// less. Composition of two frontiers covers the frontier of all path
/// concatenations, because domination is preserved by concatenation.
type Frontier = Vec<(u64, i64)>;

fn frontier_push(f: &mut Frontier, g: u64, d: i64) {
    if f.iter().any(|&(g2, d2)| g2 <= g && d2 >= d) {
        return;
    }
    f.retain(|&(g2, d2)| !(g <= g2 && d >= d2));
    f.push((g, d));
}

/// Guard of a concatenation: the second leg runs after the first leg's
/// effect has been applied.
fn seq_guard(g1: u64, d1: i64, g2: u64) -> u64 {
    (g1 as i128).max(g2 as i128 - d1 as i128).max(0) as u64
}

/// Pareto profiles of the direct silent paths between every state pair.
fn silent_frontiers(net: &Net) -> Vec<Vec<Frontier>> {
    let nq = net.states().len();
    let mut f = vec![vec![Frontier::new(); nq]; nq];
    for s in 0..nq {
        for t in 0..nq {
            let dp = direct_paths(net, StateId(s as u32), StateId(t as u32), true)
                .expect("kind checked by caller");
            for p in &dp.paths {
                let g = net.path_guard(p);
                let d = net.path_effect(p).fin().expect("no ω in an ocn");
                frontier_push(&mut f[s][t], g, d);
            }
        }
    }
    f
}

/// Fold the silent structure of a one-counter net into a guarded ω-net
/// `G` over the same states, whose single steps mirror the net's weak
/// steps: for every weak step `pm ⇒a qn` there is a `G`-step
/// `pm →a qn'` with `n' ≥ n`, and every `G`-step is realizable as a weak
/// step of at least its landing height.
///
/// Finite transitions come from `silent* · step · silent*` compositions
/// of direct paths; ω-transitions arise when a positive silent cycle can
/// be inserted before or after the visible step, with the guard only
/// paying for the prefix up to and including the first cycle traversal.
/// A `(p, τ, 0, 0, p)` self-loop is kept for every state so silent
/// Spoiler moves always have an answer. Guards never exceed `3|Q|+1` and
/// finite effects stay within `2|Q|+1`.
pub fn build_guarded_omega(net: &Net) -> Result<Net, ReductionError> {
    want_kind(net, &[NetKind::Ocn], "ocn")?;
    plain_names(net)?;
    unit_deltas(net)?;
    let nq = net.states().len();
    let fr = silent_frontiers(net);
    // positive-effect silent cycle profiles per state
    let cyc: Vec<Frontier> = (0..nq)
        .map(|t| fr[t][t].iter().copied().filter(|&(_, d)| d > 0).collect())
        .collect();

    // (p, label, effect, q) -> least guard
    let mut fin: BTreeMap<(u32, u32, i64, u32), u64> = BTreeMap::new();
    // (p, label, q) -> least guard
    let mut om: BTreeMap<(u32, u32, u32), u64> = BTreeMap::new();
    let mut add_fin = |key: (u32, u32, i64, u32), g: u64| {
        let e = fin.entry(key).or_insert(g);
        *e = (*e).min(g);
    };
    let add_om = |om: &mut BTreeMap<(u32, u32, u32), u64>, key: (u32, u32, u32), g: u64| {
        let e = om.entry(key).or_insert(g);
        *e = (*e).min(g);
    };

    for mid in &net.trans {
        let (s, a, sp) = (mid.src.ix(), mid.label.0, mid.dst.ix());
        let dm = mid.effect.fin().expect("no ω in an ocn");
        let gm = (-dm).max(0) as u64;
        for p in 0..nq {
            if fr[p][s].is_empty() {
                continue;
            }
            // finite clause: direct silent prefix, the step, direct silent suffix
            for q in 0..nq {
                if fr[sp][q].is_empty() {
                    continue;
                }
                for &(g1, d1) in &fr[p][s] {
                    for &(g2, d2) in &fr[sp][q] {
                        let g = seq_guard(g1, d1, seq_guard(gm, dm, g2));
                        add_fin((p as u32, a, d1 + dm + d2, q as u32), g);
                    }
                }
            }
            // pump after the step: prefix, step, reach a positive cycle,
            // run it once; everything beyond is free-riding on the pump
            for t in 0..nq {
                if cyc[t].is_empty() || fr[sp][t].is_empty() {
                    continue;
                }
                let mut best: Option<u64> = None;
                for &(g1, d1) in &fr[p][s] {
                    for &(g2, d2) in &fr[sp][t] {
                        for &(gc, _) in &cyc[t] {
                            let g = seq_guard(g1, d1, seq_guard(gm, dm, seq_guard(g2, d2, gc)));
                            best = Some(best.map_or(g, |b: u64| b.min(g)));
                        }
                    }
                }
                let g = best.expect("both frontiers nonempty");
                for q in 0..nq {
                    if !fr[t][q].is_empty() {
                        add_om(&mut om, (p as u32, a, q as u32), g);
                    }
                }
            }
        }
        // pump before the step: reach a positive cycle silently, run it
        // once, then descend to the step and onward at pumped height
        for t in 0..nq {
            if cyc[t].is_empty() || fr[t][s].is_empty() {
                continue;
            }
            for p in 0..nq {
                if fr[p][t].is_empty() {
                    continue;
                }
                let mut best: Option<u64> = None;
                for &(g1, d1) in &fr[p][t] {
                    for &(gc, _) in &cyc[t] {
                        let g = seq_guard(g1, d1, gc);
                        best = Some(best.map_or(g, |b: u64| b.min(g)));
                    }
                }
                let g = best.expect("both frontiers nonempty");
                for q in 0..nq {
                    if !fr[sp][q].is_empty() {
                        add_om(&mut om, (p as u32, a, q as u32), g);
                    }
                }
            }
        }
    }

    // canonicalize: a finite guard at or below the landing floor is 0
    let mut by_edge: BTreeMap<(u32, u32, u32), Frontier> = BTreeMap::new();
    for (&(p, a, d, q), &g) in &fin {
        let floor = (-d).max(0) as u64;
        let g = if g <= floor { 0 } else { g };
        frontier_push(by_edge.entry((p, a, q)).or_default(), g, d);
    }

    let mut out = Net::new(NetKind::GuardedOmega, format!("{}.gw", net.name));
    for s in net.states() {
        out.add_state(s.clone()).expect("input names are unique");
    }
    for ((p, a, q), profs) in &by_edge {
        let text = net.label(crate::nets::LabelId(*a)).text.clone();
        let mut profs = profs.clone();
        profs.sort();
        for (g, d) in profs {
            out.add_trans(StateId(*p), &text, g, Effect::Fin(d), StateId(*q));
        }
    }
    for (&(p, a, q), &g) in &om {
        let text = net.label(crate::nets::LabelId(a)).text.clone();
        out.add_trans(StateId(p), &text, g, Effect::Omega, StateId(q));
    }
    for p in 0..nq {
        let pid = StateId(p as u32);
        let has_stay = out.trans.iter().any(|t| {
            t.src == pid
                && t.dst == pid
                && t.guard == 0
                && t.effect == Effect::Fin(0)
                && out.label(t.label).is_silent()
        });
        if !has_stay {
            out.add_trans(pid, SILENT_LABEL, 0, Effect::Fin(0), pid);
        }
    }

    if cfg!(debug_assertions) {
        let gmax = 3 * nq as u64 + 1;
        let dmax = 2 * nq as i64 + 1;
        for t in &out.trans {
            debug_assert!(t.guard <= gmax, "guard {} exceeds 3|Q|+1", t.guard);
            if let Effect::Fin(d) = t.effect {
                debug_assert!(d.abs() <= dmax, "effect {d} exceeds 2|Q|+1");
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Result of [`normalize`] / [`weak_to_strong`]: a plain OCN for Spoiler
/// and an ω-net for Duplicator, with every original round stretched into
/// `k = 2·gamma + delta + 1` bookkeeping rounds. Original state names are
/// preserved verbatim in both nets.
#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub spoiler: Net,
    pub dup: Net,
    pub k: u64,
    pub gamma: u64,
    pub delta: u64,
}

/// Rebuild an (OCN, guarded ω-net) pair as an (OCN, ω-net) pair with
/// unit effects and no guards, preserving simulation and the round
/// structure: `pm →a qn'` in `G` iff `pm →a →@b^k qn'` in the output
/// Duplicator net, and likewise each Spoiler move is followed by `k`
/// forced `@b`-hops through a fresh chain.
///
/// Each `G`-transition with guard `g` becomes a gadget chain of `k`
/// unit hops: `g` down-steps that check the guard, `g` up-steps that
/// restore it, then the effect (|d| unit steps, or a single ω-hop),
/// padded with zeros. The chain fits because `2g + |d| ≤ 2Γ + Δ = k−1`
/// for finite effects and `2g + 1 ≤ 2Γ + 1 ≤ k` for ω.
pub fn normalize(m: &Net, g: &Net) -> Result<ReductionOutput, ReductionError> {
    want_kind(m, &[NetKind::Ocn], "ocn")?;
    want_kind(g, &[NetKind::GuardedOmega], "guarded omega net")?;
    plain_names(m)?;
    plain_names(g)?;
    unit_deltas(m)?;

    let gamma = g.trans.iter().map(|t| t.guard).max().unwrap_or(0);
    let delta = g
        .trans
        .iter()
        .filter_map(|t| t.effect.fin())
        .map(|d| d.unsigned_abs())
        .max()
        .unwrap_or(0);
    let k = 2 * gamma + delta + 1;

    let mut spoiler = Net::new(NetKind::Ocn, format!("{}.spoiler", m.name));
    for s in m.states() {
        spoiler.add_state(s.clone()).expect("input names are unique");
    }
    for q in m.states() {
        for i in (0..k).rev() {
            spoiler.add_state(format!("@chain/{q}/{i}")).expect("fresh");
        }
    }
    for t in &m.trans {
        let label = m.label(t.label).text.clone();
        let top = spoiler
            .state_id(&format!("@chain/{}/{}", m.state_name(t.dst), k - 1))
            .expect("just added");
        spoiler.add_trans(t.src, &label, 0, t.effect, top);
    }
    for (qi, q) in m.states().iter().enumerate() {
        for i in (1..k).rev() {
            let src = spoiler.state_id(&format!("@chain/{q}/{i}")).expect("added");
            let dst = spoiler.state_id(&format!("@chain/{q}/{}", i - 1)).expect("added");
            spoiler.add_trans(src, "@b", 0, Effect::Fin(0), dst);
        }
        let bottom = spoiler.state_id(&format!("@chain/{q}/0")).expect("added");
        spoiler.add_trans(bottom, "@b", 0, Effect::Fin(0), StateId(qi as u32));
    }

    let mut dup = Net::new(NetKind::OmegaNet, format!("{}.dup", g.name));
    for s in g.states() {
        dup.add_state(s.clone()).expect("input names are unique");
    }
    for j in 0..g.trans.len() {
        for i in (0..k).rev() {
            dup.add_state(format!("@gadget/{j}/{i}")).expect("fresh");
        }
    }
    for (j, t) in g.trans.iter().enumerate() {
        let label = g.label(t.label).text.clone();
        let top = dup
            .state_id(&format!("@gadget/{j}/{}", k - 1))
            .expect("just added");
        dup.add_trans(t.src, &label, 0, Effect::Fin(0), top);

        let mut effs: Vec<Effect> = Vec::with_capacity(k as usize);
        for _ in 0..t.guard {
            effs.push(Effect::Fin(-1));
        }
        for _ in 0..t.guard {
            effs.push(Effect::Fin(1));
        }
        match t.effect {
            Effect::Fin(d) => {
                for _ in 0..d.unsigned_abs() {
                    effs.push(Effect::Fin(d.signum()));
                }
            }
            Effect::Omega => effs.push(Effect::Omega),
        }
        debug_assert!(effs.len() <= k as usize, "gadget slots overflow k");
        while effs.len() < k as usize {
            effs.push(Effect::Fin(0));
        }
        for (h, &eff) in effs.iter().enumerate() {
            let src = dup
                .state_id(&format!("@gadget/{j}/{}", k - 1 - h as u64))
                .expect("added");
            let dst = if h as u64 + 1 == k {
                t.dst
            } else {
                dup.state_id(&format!("@gadget/{j}/{}", k - 2 - h as u64)).expect("added")
            };
            dup.add_trans(src, "@b", 0, eff, dst);
        }
    }

    Ok(ReductionOutput { spoiler, dup, k, gamma, delta })
}

/// Full pipeline: weak simulation between two one-counter nets, recast
/// as strong simulation between an OCN and an ω-net. Original states
/// keep their names; query the output at the same (state, counter)
/// pairs. Survival of the α-round weak game on the inputs implies
/// survival of the α-round strong game on the outputs, and the full
/// relations coincide.
pub fn weak_to_strong(m: &Net, n: &Net) -> Result<ReductionOutput, ReductionError> {
    let g = build_guarded_omega(n)?;
    normalize(m, &g)
}

// ---------------------------------------------------------------------------
// Minimal-counter tables and step nets
// ---------------------------------------------------------------------------

/// A minimal Spoiler counter, or ω when no finite counter suffices.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum MValue {
    Fin(u64),
    Omega,
}

impl std::fmt::Display for MValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MValue::Fin(v) => write!(f, "{v}"),
            MValue::Omega => f.write_str("w"),
        }
    }
}

/// Per state pair (p, q): the least Spoiler counter m from which Spoiler
/// beats every Duplicator counter, or ω if none was found. Produced by
/// [`compute_m_table`] or hand-built via [`MTable::from_entries`] for
/// [`build_step_nets`].
#[derive(Clone, Debug)]
pub struct MTable {
    pub level: u32,
    pub spoiler_states: Vec<String>,
    pub dup_states: Vec<String>,
    entries: Vec<MValue>,
    saturated: Vec<bool>,
}

impl MTable {
    pub fn from_entries(
        level: u32,
        spoiler_states: Vec<String>,
        dup_states: Vec<String>,
        entries: Vec<MValue>,
    ) -> MTable {
        assert_eq!(entries.len(), spoiler_states.len() * dup_states.len());
        let saturated = vec![false; entries.len()];
        MTable { level, spoiler_states, dup_states, entries, saturated }
    }

    pub fn get(&self, p: usize, q: usize) -> MValue {
        self.entries[p * self.dup_states.len() + q]
    }

    /// For an ω entry: did the threshold rows stabilize at the top of the
    /// search window (strong evidence the entry is genuinely ω), or did
    /// the search merely run out of room?
    pub fn is_saturated(&self, p: usize, q: usize) -> bool {
        self.saturated[p * self.dup_states.len() + q]
    }

    pub fn render(&self) -> String {
        let mut s = format!("MTAB level={}\n", self.level);
        for (pi, p) in self.spoiler_states.iter().enumerate() {
            for (qi, q) in self.dup_states.iter().enumerate() {
                match self.get(pi, qi) {
                    MValue::Fin(v) => s.push_str(&format!("M {p} {q} {v}\n")),
                    MValue::Omega => {
                        let diag = if self.is_saturated(pi, qi) { "saturated" } else { "bound-reached" };
                        s.push_str(&format!("M {p} {q} w {diag}\n"));
                    }
                }
            }
        }
        s
    }
}

/// Search the level-`level` refutation thresholds of the (OCN, ω-net)
/// pair for the least Spoiler counter that beats every Duplicator
/// counter, scanning `m ≤ search_bound`.
///
/// `Fin(m)` entries are definitive: from counter `m` Spoiler wins within
/// `level` rounds against every `n`. `Omega` entries are conservative:
/// a refutation needing more rounds or a larger counter stays invisible
/// at this level, so ω here means "not refuted in this window", with
/// [`MTable::is_saturated`] reporting whether the thresholds had
/// stabilized. At `level` 0 nothing is refutable and every entry is ω.
pub fn compute_m_table(
    n: &Net,
    nprime: &Net,
    level: u32,
    search_bound: u64,
) -> Result<MTable, ReductionError> {
    let m_max = search_bound + level as u64;
    let run = approximant_run(n, nprime, level, m_max)?;
    let np = n.states().len();
    let nq = nprime.states().len();
    let mut entries = Vec::with_capacity(np * nq);
    let mut saturated = Vec::with_capacity(np * nq);
    for p in 0..np {
        for q in 0..nq {
            let found = (0..=search_bound).find(|&m| run.min_n(level, p, m, q).is_none());
            match found {
                Some(m) => {
                    entries.push(MValue::Fin(m));
                    saturated.push(false);
                }
                None => {
                    entries.push(MValue::Omega);
                    let sat = search_bound >= 1
                        && run.min_n(level, p, search_bound, q)
                            == run.min_n(level, p, search_bound - 1, q);
                    saturated.push(sat);
                }
            }
        }
    }
    Ok(MTable {
        level,
        spoiler_states: n.states().to_vec(),
        dup_states: nprime.states().to_vec(),
        entries,
        saturated,
    })
}

/// A standalone counter-test pair: Spoiler wins from `(s_start, m)`
/// against `(t_start, n)` iff `m ≥ val`, for every `n`.
#[derive(Clone, Debug)]
pub struct TestGadget {
    pub spoiler: Net,
    pub dup: Net,
    pub s_start: String,
    pub t_start: String,
}

fn jump_label(p: &str, q: &str) -> String {
    format!("@j/{p}/{q}")
}

/// Add the Spoiler half of a counter test to `net`: a chain of `val`
/// counter-decreasing `e`-steps ending in an `f`-step (unanswerable by
/// the `e`-looping Duplicator half), or a deadlock for ω. Returns the
/// chain head.
fn add_s_gadget(net: &mut Net, val: MValue, p: &str, q: &str) -> StateId {
    match val {
        MValue::Omega => net
            .add_state(format!("@gadget/s/{p}/{q}/w"))
            .expect("gadget names are fresh"),
        MValue::Fin(v) => {
            let mut ids = Vec::with_capacity(v as usize + 1);
            for i in (0..=v).rev() {
                ids.push(net.add_state(format!("@gadget/s/{p}/{q}/{i}")).expect("fresh"));
            }
            let end = net.add_state(format!("@gadget/s/{p}/{q}/end")).expect("fresh");
            for w in ids.windows(2) {
                net.add_trans(w[0], "e", 0, Effect::Fin(-1), w[1]);
            }
            net.add_trans(*ids.last().expect("nonempty"), "f", 0, Effect::Fin(0), end);
            ids[0]
        }
    }
}

fn add_t_gadget(net: &mut Net, p: &str, q: &str) -> StateId {
    let t = net.add_state(format!("@gadget/t/{p}/{q}")).expect("fresh");
    net.add_trans(t, "e", 0, Effect::Fin(0), t);
    t
}

/// Build a standalone counter-test pair for one table entry: Spoiler
/// refutes `(s_start, m)` vs `(t_start, n)` exactly when `m ≥ val`,
/// regardless of `n`. The same shapes get embedded into the nets built
/// by [`build_step_nets`].
pub fn build_test_gadget(val: MValue, p: &str, q: &str) -> TestGadget {
    let mut spoiler = Net::new(NetKind::Ocn, "mgadget.s");
    let s = add_s_gadget(&mut spoiler, val, p, q);
    let mut dup = Net::new(NetKind::Ocn, "mgadget.t");
    let t = add_t_gadget(&mut dup, p, q);
    TestGadget {
        s_start: spoiler.state_name(s).to_string(),
        t_start: dup.state_name(t).to_string(),
        spoiler,
        dup,
    }
}

/// Strip the ω-transitions out of an (OCN, ω-net) pair using a table of
/// minimal winning Spoiler counters, producing two plain one-counter
/// nets. When `mtab` holds the exact minimal counters for the ω-budget-k
/// relation of the pair, strong simulation on the outputs coincides with
/// the budget-(k+1) relation of the inputs, at original states and
/// counters.
///
/// Spoiler keeps his net plus, per state pair (p, q), a jump `@j/p/q`
/// into a counter-test chain. Duplicator keeps his non-ω transitions;
/// each ω-transition `q →a,ω→ q'` becomes moves into test states
/// `t(p, q')` that stand for "arbitrarily high counter at q'". The test
/// states answer the matching jump by standing pat, mismatched jumps and
/// original actions by escaping to a universal state `@w/sink`; original
/// Duplicator states escape every jump, so jumping only ever pays for
/// Spoiler right after an ω answer.
pub fn build_step_nets(
    n: &Net,
    nprime: &Net,
    mtab: &MTable,
) -> Result<(Net, Net), ReductionError> {
    want_kind(n, &[NetKind::Ocn], "ocn")?;
    want_kind(nprime, &[NetKind::OmegaNet], "omega net")?;
    plain_names(n)?;
    plain_names(nprime)?;
    for net in [n, nprime] {
        if let Some(l) = net.labels().iter().find(|l| l.text == "e" || l.text == "f") {
            return Err(ReductionError::LabelClash(l.text.clone()));
        }
    }
    if mtab.spoiler_states[..] != *n.states() || mtab.dup_states[..] != *nprime.states() {
        return Err(ReductionError::TableMismatch(
            "state lists differ from the table's".into(),
        ));
    }

    // shared original alphabet, Spoiler's labels first
    let mut acts: Vec<String> = n.labels().iter().map(|l| l.text.clone()).collect();
    for l in nprime.labels() {
        if !acts.contains(&l.text) {
            acts.push(l.text.clone());
        }
    }

    let mut ns = Net::new(NetKind::Ocn, format!("{}.steps", n.name));
    for s in n.states() {
        ns.add_state(s.clone()).expect("input names are unique");
    }
    for t in &n.trans {
        let label = n.label(t.label).text.clone();
        ns.add_trans(t.src, &label, t.guard, t.effect, t.dst);
    }
    for (pi, p) in n.states().iter().enumerate() {
        for (qi, q) in nprime.states().iter().enumerate() {
            let start = add_s_gadget(&mut ns, mtab.get(pi, qi), p, q);
            ns.add_trans(StateId(pi as u32), &jump_label(p, q), 0, Effect::Fin(0), start);
        }
    }

    let mut nd = Net::new(NetKind::Ocn, format!("{}.stepd", nprime.name));
    for s in nprime.states() {
        nd.add_state(s.clone()).expect("input names are unique");
    }
    let w = nd.add_state("@w/sink").expect("fresh");
    let mut tstate = vec![vec![StateId(0); nprime.states().len()]; n.states().len()];
    for (pi, p) in n.states().iter().enumerate() {
        for (qi, q) in nprime.states().iter().enumerate() {
            tstate[pi][qi] = add_t_gadget(&mut nd, p, q);
        }
    }
    for t in &nprime.trans {
        if !t.effect.is_omega() {
            let label = nprime.label(t.label).text.clone();
            nd.add_trans(t.src, &label, t.guard, t.effect, t.dst);
        }
    }
    for t in &nprime.trans {
        if t.effect.is_omega() {
            let label = nprime.label(t.label).text.clone();
            for pi in 0..n.states().len() {
                nd.add_trans(t.src, &label, 0, Effect::Fin(0), tstate[pi][t.dst.ix()]);
            }
        }
    }
    // original Duplicator states shrug off every jump
    for qi in 0..nprime.states().len() {
        for p in n.states() {
            for q in nprime.states() {
                nd.add_trans(StateId(qi as u32), &jump_label(p, q), 0, Effect::Fin(0), w);
            }
        }
    }
    // test states: answer the matching jump in place, punish the rest
    for (pi, p) in n.states().iter().enumerate() {
        for (qi, q) in nprime.states().iter().enumerate() {
            let t = tstate[pi][qi];
            nd.add_trans(t, &jump_label(p, q), 0, Effect::Fin(0), t);
            for q2 in nprime.states() {
                if q2 != q {
                    nd.add_trans(t, &jump_label(p, q2), 0, Effect::Fin(0), w);
                }
            }
            for a in &acts {
                nd.add_trans(t, a, 0, Effect::Fin(0), w);
            }
        }
    }
    // the universal state answers everything
    for a in &acts {
        nd.add_trans(w, a, 0, Effect::Fin(0), w);
    }
    for p in n.states() {
        for q in nprime.states() {
            nd.add_trans(w, &jump_label(p, q), 0, Effect::Fin(0), w);
        }
    }
    nd.add_trans(w, "e", 0, Effect::Fin(0), w);
    nd.add_trans(w, "f", 0, Effect::Fin(0), w);

    Ok((ns, nd))
}
