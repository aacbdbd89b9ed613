//! Exact ordinal ranks of refuted game positions, below ω².
//!
//! The rank of a position is the least approximant level that excludes
//! it: level 0 keeps everything, successor levels demand one more
//! answered round, and limit levels intersect everything below. Because
//! exclusion at a limit always stems from exclusion strictly below it,
//! every rank is a successor `ω·a + b` with `b ≥ 1`; positions surviving
//! all levels below ω² survive outright and report `INF`.
//!
//! The solver is a backward attractor over cells (Spoiler configuration,
//! Duplicator state, Duplicator counter, budget lane), processed in
//! ordinal order of death: a cell dies at `γ + 1` when some Spoiler move
//! exists whose every Duplicator answer leads to a cell already dead by
//! `γ`. The Spoiler side must have a finite reachable configuration
//! space (finite-state, or a counter that provably stays under a caller
//! supplied bound); the Duplicator counter axis is unbounded and handled
//! by a finite window plus tail classification:
//!
//! - cells are materialized for counters `0..=N`;
//! - an ω answer offers every counter above the current one, so the move
//!   holding it can only kill once that whole column is dead; the column
//!   values at the top of the window are classified by successive
//!   differences over a span of (Duplicator states + 2) cells — constant
//!   differences of zero mean the supremum is attained, constant positive
//!   differences mean the deaths diverge and the supremum is the next
//!   limit ordinal `ω·(a+1)`;
//! - an answer that steps just past the window is resolved by the same
//!   tail law: once its target column is dead, the affine pattern at the
//!   top of the window is continued to the answer's offset. Without this,
//!   top-of-window cells holding an upward edge would read as immortal
//!   and poison every column an ω answer watches;
//! - the whole computation is repeated with the window doubled, and a
//!   result is only reported when two consecutive windows agree.
//!
//! Anything else — spilling over the window, unclassifiable tails,
//! disagreement between windows — fails conservatively with
//! [`GameError::Inapplicable`] rather than guessing.
//!
//! Budgets mirror the two-dimensional approximants: an answer that uses
//! (or is shadowed by) an ω-transition drops the budget lane by one, and
//! lane 0 is the full relation, so the last paid ω answer is decisive
//! and cells whose best answer reaches lane 0 are never refuted.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::nets::{Configuration, Effect, LabelId, Net, NetKind, StateId, Step};

use super::{check_position, label_map, GameError, Ordinal2};

/// How a Duplicator edge is read (mirrors the approximant solver).
#[derive(Copy, Clone, Debug)]
enum Reading {
    Normal(i64),
    OmegaJump,
    OmegaLanded(i64),
}

struct REdge {
    dst: usize,
    guard: u64,
    reading: Reading,
}

struct RankCtx {
    ncfg: usize,
    nd: usize,
    lanes: usize,
    budgeted: bool,
    /// Spoiler moves per configuration: label index on the Spoiler side
    /// (`None` when Duplicator lacks the label) and target configuration.
    moves: Vec<Vec<(Option<u32>, usize)>>,
    /// Duplicator edges per (state, Spoiler label index).
    edges: Vec<Vec<REdge>>,
    nlabels: usize,
}

impl RankCtx {
    fn build(
        spoiler: &Net,
        s0: Configuration,
        dup: &Net,
        beta: Option<u32>,
        spoiler_bound: u64,
    ) -> Result<(RankCtx, usize), GameError> {
        match spoiler.kind {
            NetKind::Ocn | NetKind::Fs => {}
            k => return Err(GameError::BadKind { net: spoiler.name.clone(), got: k.tag() }),
        }
        match dup.kind {
            NetKind::Ocn | NetKind::OmegaNet | NetKind::GuardedOmega => {}
            k => return Err(GameError::BadKind { net: dup.name.clone(), got: k.tag() }),
        }
        if s0.counter > spoiler_bound {
            return Err(GameError::Inapplicable(format!(
                "spoiler starts above the declared counter bound {spoiler_bound}"
            )));
        }

        // Reachable Spoiler configurations, rejecting any way past the bound.
        let mut index: HashMap<Configuration, usize> = HashMap::new();
        let mut cfgs = vec![s0];
        index.insert(s0, 0);
        let mut moves_raw: Vec<Vec<(LabelId, Configuration)>> = Vec::new();
        let mut head = 0;
        while head < cfgs.len() {
            let cur = cfgs[head];
            head += 1;
            let mut mv = Vec::new();
            for step in spoiler.successors(cur)? {
                match step {
                    Step::Concrete { label, to } => {
                        if to.counter > spoiler_bound {
                            return Err(GameError::Inapplicable(format!(
                                "spoiler can drive its counter past {spoiler_bound} \
                                 (reached {} at {})",
                                to.counter,
                                spoiler.state_name(to.state)
                            )));
                        }
                        if !index.contains_key(&to) {
                            index.insert(to, cfgs.len());
                            cfgs.push(to);
                        }
                        mv.push((label, to));
                    }
                    Step::Unbounded { .. } => {
                        return Err(GameError::BadKind {
                            net: spoiler.name.clone(),
                            got: spoiler.kind.tag(),
                        })
                    }
                }
            }
            moves_raw.push(mv);
        }

        let map = label_map(spoiler, dup);
        let moves: Vec<Vec<(Option<u32>, usize)>> = moves_raw
            .iter()
            .map(|mv| {
                mv.iter()
                    .map(|&(l, to)| (map[l.ix()].map(|_| l.0), index[&to]))
                    .collect()
            })
            .collect();

        let nd = dup.states().len();
        let nlabels = spoiler.labels().len();
        let shadowed: std::collections::HashSet<(StateId, LabelId, StateId)> = dup
            .trans
            .iter()
            .filter(|t| t.effect.is_omega())
            .map(|t| (t.src, t.label, t.dst))
            .collect();
        let mut edges: Vec<Vec<REdge>> = (0..nd * nlabels).map(|_| Vec::new()).collect();
        for t in &dup.trans {
            for (sl, dl) in map.iter().enumerate() {
                if *dl != Some(t.label) {
                    continue;
                }
                let reading = match t.effect {
                    Effect::Omega => Reading::OmegaJump,
                    Effect::Fin(d) => {
                        if shadowed.contains(&(t.src, t.label, t.dst)) {
                            Reading::OmegaLanded(d)
                        } else {
                            Reading::Normal(d)
                        }
                    }
                };
                edges[t.src.ix() * nlabels + sl].push(REdge {
                    dst: t.dst.ix(),
                    guard: t.guard,
                    reading,
                });
            }
        }

        let (lanes, budgeted) = match beta {
            None => (1, false),
            Some(b) => (b as usize, true),
        };
        Ok((
            RankCtx { ncfg: cfgs.len(), nd, lanes, budgeted, moves, edges, nlabels },
            0,
        ))
    }

    fn ncols(&self) -> usize {
        self.ncfg * self.nd * self.lanes
    }

    fn col(&self, cfg: usize, q: usize, li: usize) -> usize {
        (cfg * self.nd + q) * self.lanes + li
    }

    /// One windowed attractor pass; returns the per-cell death ordinals,
    /// cells laid out as `col * (window + 1) + n`.
    fn attract(&self, window: u64) -> Vec<Option<(u32, u32)>> {
        let nn = window as usize + 1;
        let ncells = self.ncols() * nn;
        let mut death: Vec<Option<(u32, u32)>> = vec![None; ncells];

        // Per (cell, move) bookkeeping, flattened by prefix sums.
        let mut cmbase: Vec<u32> = Vec::with_capacity(ncells + 1);
        let mut acc = 0u32;
        for cell in 0..ncells {
            cmbase.push(acc);
            let cfg = cell / nn / (self.nd * self.lanes);
            acc += self.moves[cfg].len() as u32;
        }
        cmbase.push(acc);
        let ncm = acc as usize;
        let mut cmcell: Vec<u32> = vec![0; ncm];
        let mut alive: Vec<u32> = vec![0; ncm];
        let mut maxdead: Vec<(u32, u32)> = vec![(0, 0); ncm];
        let mut blocked: Vec<bool> = vec![false; ncm];
        let mut pushed: Vec<bool> = vec![false; ncm];
        let mut omega_cols: Vec<Vec<u32>> = vec![Vec::new(); ncm];
        let mut esc_cols: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ncm];
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); ncells];
        let mut watchers: Vec<Vec<u32>> = vec![Vec::new(); self.ncols()];
        let mut col_alive: Vec<u32> = vec![nn as u32; self.ncols()];
        let mut heap: BinaryHeap<Reverse<((u32, u32), u32)>> = BinaryHeap::new();

        let mut resp: Vec<usize> = Vec::new();
        let mut ocols: Vec<u32> = Vec::new();
        let mut escs: Vec<(u32, u32)> = Vec::new();
        for colx in 0..self.ncols() {
            let li = colx % self.lanes;
            let q = (colx / self.lanes) % self.nd;
            let cfg = colx / self.lanes / self.nd;
            for n in 0..=window {
                let cell = colx * nn + n as usize;
                for (mi, &(sl, tcfg)) in self.moves[cfg].iter().enumerate() {
                    let cm = (cmbase[cell] + mi as u32) as usize;
                    cmcell[cm] = cell as u32;
                    let sl = match sl {
                        None => {
                            // Unanswerable move: directly winning.
                            heap.push(Reverse(((0, 1), cell as u32)));
                            continue;
                        }
                        Some(sl) => sl as usize,
                    };
                    resp.clear();
                    ocols.clear();
                    escs.clear();
                    let mut blk = false;
                    for e in &self.edges[q * self.nlabels + sl] {
                        match e.reading {
                            Reading::Normal(d) => {
                                if n >= e.guard && n as i64 + d >= 0 {
                                    let n2 = (n as i64 + d) as u64;
                                    let c2 = self.col(tcfg, e.dst, li);
                                    if n2 > window {
                                        escs.push((c2 as u32, (n2 - window) as u32));
                                    } else {
                                        resp.push(c2 * nn + n2 as usize);
                                    }
                                }
                            }
                            Reading::OmegaLanded(d) => {
                                if n >= e.guard && n as i64 + d >= 0 {
                                    if self.budgeted && li == 0 {
                                        // drops to the full relation: immortal
                                        blk = true;
                                    } else {
                                        let li2 = if self.budgeted { li - 1 } else { li };
                                        let n2 = (n as i64 + d) as u64;
                                        let c2 = self.col(tcfg, e.dst, li2);
                                        if n2 > window {
                                            escs.push((c2 as u32, (n2 - window) as u32));
                                        } else {
                                            resp.push(c2 * nn + n2 as usize);
                                        }
                                    }
                                }
                            }
                            Reading::OmegaJump => {
                                if n >= e.guard {
                                    if self.budgeted && li == 0 {
                                        blk = true;
                                    } else {
                                        let li2 = if self.budgeted { li - 1 } else { li };
                                        ocols.push(self.col(tcfg, e.dst, li2) as u32);
                                    }
                                }
                            }
                        }
                    }
                    if blk {
                        blocked[cm] = true;
                        continue;
                    }
                    resp.sort_unstable();
                    resp.dedup();
                    ocols.sort_unstable();
                    ocols.dedup();
                    escs.sort_unstable();
                    escs.dedup();
                    for &r in &resp {
                        preds[r].push(cm as u32);
                    }
                    alive[cm] = resp.len() as u32;
                    for &c in &ocols {
                        watchers[c as usize].push(cm as u32);
                    }
                    for &(c, _) in &escs {
                        watchers[c as usize].push(cm as u32);
                    }
                    omega_cols[cm] = ocols.clone();
                    esc_cols[cm] = escs.clone();
                    if resp.is_empty() && ocols.is_empty() && escs.is_empty() {
                        heap.push(Reverse(((0, 1), cell as u32)));
                    }
                }
            }
        }

        let mut dirty: Vec<u32> = Vec::new();
        let mut dirty_flag: Vec<bool> = vec![false; ncm];
        let wspan = self.nd + 2;

        loop {
            while let Some(cm) = dirty.pop() {
                let cm = cm as usize;
                dirty_flag[cm] = false;
                if blocked[cm] || pushed[cm] || alive[cm] > 0 {
                    continue;
                }
                let cell = cmcell[cm] as usize;
                if death[cell].is_some() {
                    continue;
                }
                let n = cell % nn;
                let mut total = maxdead[cm];
                let mut ok = true;
                for &colx in &omega_cols[cm] {
                    // Dead cells form a prefix of every column, so the
                    // ω answers above `n` are all dead exactly when the
                    // whole column is. The tail then extrapolates the
                    // answers beyond the window, wherever `n` sits.
                    if col_alive[colx as usize] > 0 {
                        ok = false;
                        break;
                    }
                    let base = colx as usize * nn;
                    let mut mx = (0, 0);
                    for n2 in n + 1..nn {
                        mx = mx.max(death[base + n2].expect("fully dead column"));
                    }
                    let tail: Vec<(u32, u32)> = (nn - wspan..nn)
                        .map(|n2| death[base + n2].expect("fully dead column"))
                        .collect();
                    match classify_tail(&tail) {
                        Some(s) => total = total.max(s.max(mx)),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    for &(colx, off) in &esc_cols[cm] {
                        if col_alive[colx as usize] > 0 {
                            ok = false;
                            break;
                        }
                        let base = colx as usize * nn;
                        let tail: Vec<(u32, u32)> = (nn - wspan..nn)
                            .map(|n2| death[base + n2].expect("fully dead column"))
                            .collect();
                        match extend_tail(&tail, off) {
                            Some(v) => total = total.max(v),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                }
                if ok {
                    pushed[cm] = true;
                    heap.push(Reverse(((total.0, total.1 + 1), cell as u32)));
                }
            }

            let Some(Reverse((ord, cell))) = heap.pop() else { break };
            let cell = cell as usize;
            if death[cell].is_some() {
                continue;
            }
            death[cell] = Some(ord);
            for pi in 0..preds[cell].len() {
                let cm = preds[cell][pi] as usize;
                if blocked[cm] || pushed[cm] {
                    continue;
                }
                let c2 = cmcell[cm] as usize;
                if death[c2].is_some() {
                    continue;
                }
                alive[cm] -= 1;
                maxdead[cm] = maxdead[cm].max(ord);
                if alive[cm] == 0 {
                    if omega_cols[cm].is_empty() && esc_cols[cm].is_empty() {
                        pushed[cm] = true;
                        let md = maxdead[cm];
                        heap.push(Reverse(((md.0, md.1 + 1), c2 as u32)));
                    } else if !dirty_flag[cm] {
                        dirty_flag[cm] = true;
                        dirty.push(cm as u32);
                    }
                }
            }
            let colx = cell / nn;
            col_alive[colx] -= 1;
            if col_alive[colx] == 0 {
                for wi in 0..watchers[colx].len() {
                    let cm = watchers[colx][wi] as usize;
                    if !dirty_flag[cm] && !blocked[cm] && !pushed[cm] {
                        dirty_flag[cm] = true;
                        dirty.push(cm as u32);
                    }
                }
            }
        }

        if cfg!(debug_assertions) {
            // Deaths are monotone along the counter axis: a refutation at
            // some counter refutes every smaller counter no later.
            for colx in 0..self.ncols() {
                for n in 0..nn - 1 {
                    if let Some(hi) = death[colx * nn + n + 1] {
                        match death[colx * nn + n] {
                            Some(lo) => debug_assert!(lo <= hi),
                            None => debug_assert!(false, "alive below a dead cell"),
                        }
                    }
                }
            }
        }
        death
    }
}

/// Affine law of a dead column tail from its last few values: shared
/// limit part `a`, finite part at the window edge, and the constant
/// non-negative difference between consecutive deaths. `None` when the
/// values fit no such law.
fn tail_law(tail: &[(u32, u32)]) -> Option<(u32, u32, u32)> {
    let (a0, _) = tail[0];
    if tail.iter().any(|&(a, _)| a != a0) {
        return None;
    }
    let d0 = tail[1].1 as i64 - tail[0].1 as i64;
    for w in tail.windows(2) {
        if w[1].1 as i64 - w[0].1 as i64 != d0 {
            return None;
        }
    }
    if d0 < 0 {
        return None;
    }
    Some((a0, tail[tail.len() - 1].1, d0 as u32))
}

/// Supremum of a dead column over all counters, by its tail law: an
/// attained constant for difference zero, the next limit `ω·(a+1)`
/// (encoded `(a+1, 0)`) when the deaths diverge.
fn classify_tail(tail: &[(u32, u32)]) -> Option<(u32, u32)> {
    let (a, top, d) = tail_law(tail)?;
    Some(if d == 0 { (a, top) } else { (a + 1, 0) })
}

/// Death of the cell `off` steps past the window edge of a dead column,
/// by continuing its tail law linearly.
fn extend_tail(tail: &[(u32, u32)], off: u32) -> Option<(u32, u32)> {
    let (a, top, d) = tail_law(tail)?;
    let b = top as u64 + d as u64 * off as u64;
    u32::try_from(b).ok().map(|b| (a, b))
}

/// The least approximant level excluding `(s0, d0)`, as an ordinal below
/// ω², or `INF` when no level below ω² does — by convergence at ω² this
/// settles the game. `beta` bounds how many ω answers Duplicator may pay
/// for (`None`: unlimited); `spoiler_bound` is the caller's promise about
/// the Spoiler counter, and the solver verifies it by exhausting the
/// reachable Spoiler configurations before playing.
pub fn rank_solver(
    spoiler: &Net,
    s0: Configuration,
    dup: &Net,
    d0: Configuration,
    beta: Option<u32>,
    spoiler_bound: u64,
) -> Result<Ordinal2, GameError> {
    check_position(spoiler, s0)?;
    check_position(dup, d0)?;
    if beta == Some(0) {
        // The zero approximant keeps every position at every level.
        return Ok(Ordinal2::Infinite);
    }
    let (ctx, cfg0) = RankCtx::build(spoiler, s0, dup, beta, spoiler_bound)?;
    let lanes = ctx.lanes;
    // Above the largest guard the edge set of a column is uniform in the
    // counter, which is what makes the tail pattern trustworthy; keep the
    // whole window in that regime.
    let max_guard = dup.trans.iter().map(|t| t.guard).max().unwrap_or(0);
    let base_window = 32u64
        .max(d0.counter * 2 + 16)
        .max(ctx.nd as u64 + 24)
        .max(max_guard + ctx.nd as u64 + 24);
    let mut prev: Option<Option<(u32, u32)>> = None;
    for shift in 0..3u32 {
        let window = base_window << shift;
        if ctx.ncols() * (window as usize + 1) > 4_000_000 {
            return Err(GameError::Inapplicable(
                "rank state space exceeds the solver's size limit".into(),
            ));
        }
        let death = ctx.attract(window);
        let cell = (ctx.col(cfg0, d0.state.ix(), lanes - 1)) * (window as usize + 1)
            + d0.counter as usize;
        let v = death[cell];
        if prev == Some(v) {
            return Ok(match v {
                Some((a, k)) => Ordinal2::Ord { omega: a, fin: k },
                None => Ordinal2::Infinite,
            });
        }
        prev = Some(v);
    }
    Err(GameError::Inapplicable(
        "rank did not stabilize as the counter window grew".into(),
    ))
}
