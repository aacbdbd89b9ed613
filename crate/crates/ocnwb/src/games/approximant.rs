//! Level-indexed approximants of the strong simulation game, computed as
//! threshold grids: for every (Spoiler state, Spoiler counter, Duplicator
//! state) the least Duplicator counter surviving the current number of
//! rounds. Survival is monotone in the Duplicator counter, so a single
//! number per cell captures the whole fourth dimension; `None` means no
//! counter survives.
//!
//! Spoiler counters are tracked exactly up to `m_max` and clamped there.
//! Clamping only ever helps Duplicator, so refutations read off a grid are
//! sound for every Spoiler counter, while positive cells are exact only in
//! the window `m <= m_max - level` (thresholds grow by at most one per
//! level, so a clamped value can only be reached from outside the window).
//!
//! Duplicator ω-transitions answer by jumping arbitrarily high, which
//! succeeds exactly when the target cell one level down is not `None`. In
//! the budgeted variant each ω answer also consumes one unit of a separate
//! budget; a step whose triple (source, label, target) carries an
//! ω-transition always counts as an ω answer, even when a normal
//! transition on the same triple could explain it. A spent budget ends the
//! scrutiny in Duplicator's favor: lane 0 is the full relation at every
//! level, so the final paid ω answer is decisive.

use crate::nets::{Configuration, Effect, LabelId, Net, NetKind, StateId};

use super::{check_position, label_map, GameError, ThresholdGrid};

/// How a Duplicator edge is read by the level recursion.
#[derive(Copy, Clone, Debug)]
enum Reading {
    /// Plain step: land on `n + d`, stay at the same budget.
    Normal(i64),
    /// Jump to any value strictly above `n`; consumes budget.
    OmegaJump,
    /// A normal transition shadowed by an ω-transition on its triple:
    /// lands on `n + d` but still reads (and is charged) as ω.
    OmegaLanded(i64),
}

#[derive(Clone, Debug)]
struct Edge {
    dst: usize,
    guard: u64,
    reading: Reading,
}

struct LevelCtx {
    spoiler_states: usize,
    dup_states: usize,
    m_max: u64,
    /// Spoiler steps per (state, counter): the Spoiler-side label index
    /// (`None` when the Duplicator net lacks the label entirely), target
    /// state, clamped counter.
    moves: Vec<Vec<(Option<u32>, usize, u64)>>,
    /// Duplicator edges per (state, spoiler-side label id).
    edges: Vec<Vec<Edge>>,
    labels: usize,
}

type RawGrid = Vec<Option<u64>>;

impl LevelCtx {
    fn cell(&self, p: usize, m: u64, q: usize) -> usize {
        (p * (self.m_max as usize + 1) + m as usize) * self.dup_states + q
    }

    fn full_grid(&self) -> RawGrid {
        vec![Some(0); self.spoiler_states * (self.m_max as usize + 1) * self.dup_states]
    }

    fn build(spoiler: &Net, dup: &Net, m_max: u64) -> Result<LevelCtx, GameError> {
        match spoiler.kind {
            NetKind::Ocn | NetKind::Fs => {}
            k => {
                return Err(GameError::BadKind { net: spoiler.name.clone(), got: k.tag() })
            }
        }
        match dup.kind {
            NetKind::Ocn | NetKind::OmegaNet | NetKind::GuardedOmega => {}
            k => return Err(GameError::BadKind { net: dup.name.clone(), got: k.tag() }),
        }
        let map = label_map(spoiler, dup);
        let spoiler_states = spoiler.states().len();
        let dup_states = dup.states().len();
        let labels = spoiler.labels().len();

        let mut moves = vec![Vec::new(); spoiler_states * (m_max as usize + 1)];
        for p in 0..spoiler_states {
            for m in 0..=m_max {
                let cfg = Configuration { state: StateId(p as u32), counter: m };
                let mut v = Vec::new();
                for step in spoiler.successors(cfg)? {
                    match step {
                        crate::nets::Step::Concrete { label, to } => v.push((
                            map[label.ix()].map(|_| label.0),
                            to.state.ix(),
                            to.counter.min(m_max),
                        )),
                        crate::nets::Step::Unbounded { .. } => {
                            return Err(GameError::BadKind {
                                net: spoiler.name.clone(),
                                got: spoiler.kind.tag(),
                            })
                        }
                    }
                }
                moves[p * (m_max as usize + 1) + m as usize] = v;
            }
        }

        let shadowed: std::collections::HashSet<(StateId, LabelId, StateId)> = dup
            .trans
            .iter()
            .filter(|t| t.effect.is_omega())
            .map(|t| (t.src, t.label, t.dst))
            .collect();
        let mut edges = vec![Vec::new(); dup_states * labels];
        for t in &dup.trans {
            // Only labels the Spoiler net can mention ever get queried.
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
                edges[t.src.ix() * labels + sl].push(Edge {
                    dst: t.dst.ix(),
                    guard: t.guard,
                    reading,
                });
            }
        }

        Ok(LevelCtx { spoiler_states, dup_states, m_max, moves, edges, labels })
    }

    /// One recursion level. `prev` is the grid one level down for normal
    /// answers; `omega_prev` the one ω answers consult (the lane below in
    /// budgeted runs, `prev` itself otherwise).
    fn step(&self, prev: &RawGrid, omega_prev: &RawGrid) -> RawGrid {
        let mut out = self.full_grid();
        for p in 0..self.spoiler_states {
            for m in 0..=self.m_max {
                let moves = &self.moves[p * (self.m_max as usize + 1) + m as usize];
                for q in 0..self.dup_states {
                    let mut needed: Option<u64> = Some(0);
                    for &(sl, p2, m2) in moves {
                        let mut best: Option<u64> = None;
                        if let Some(sl) = sl {
                            for e in &self.edges[q * self.labels + sl as usize] {
                                let b = match e.reading {
                                    Reading::Normal(d) => {
                                        landing_bound(prev[self.cell(p2, m2, e.dst)], d, e.guard)
                                    }
                                    Reading::OmegaJump => {
                                        if omega_prev[self.cell(p2, m2, e.dst)].is_some() {
                                            Some(e.guard)
                                        } else {
                                            None
                                        }
                                    }
                                    Reading::OmegaLanded(d) => {
                                        landing_bound(omega_prev[self.cell(p2, m2, e.dst)], d, e.guard)
                                    }
                                };
                                best = match (best, b) {
                                    (None, x) => x,
                                    (x, None) => x,
                                    (Some(a), Some(b)) => Some(a.min(b)),
                                };
                            }
                        }
                        needed = match (needed, best) {
                            (Some(a), Some(b)) => Some(a.max(b)),
                            _ => None,
                        };
                        if needed.is_none() {
                            break;
                        }
                    }
                    out[self.cell(p, m, q)] = needed;
                }
            }
        }
        out
    }
}

/// Least `n` with `n + d >= 0`, `n >= guard` and `n + d` meeting the target
/// threshold; `None` when the target cell is dead.
fn landing_bound(target: Option<u64>, d: i64, guard: u64) -> Option<u64> {
    let t = target?;
    let need = (t as i128 - d as i128).max(-(d as i128)).max(guard as i128);
    Some(need.max(0) as u64)
}

/// The full level history of a grid computation, kept for witness replay.
pub struct ApproximantRun {
    pub m_max: u64,
    pub beta: Option<u32>,
    spoiler_states: Vec<String>,
    dup_states: Vec<String>,
    dims: (usize, usize),
    levels: Vec<RawGrid>,
}

impl ApproximantRun {
    pub fn top_level(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn min_n(&self, level: u32, p: usize, m: u64, q: usize) -> Option<u64> {
        let (ps, ds) = self.dims;
        debug_assert!(p < ps && q < ds && m <= self.m_max);
        self.levels[level as usize][(p * (self.m_max as usize + 1) + m as usize) * ds + q]
    }

    pub fn member(&self, level: u32, p: usize, m: u64, q: usize, n: u64) -> bool {
        matches!(self.min_n(level, p, m, q), Some(t) if n >= t)
    }

    /// Least level refuting (p,m) ≼ (q,n), if any level in the run does.
    pub fn refutation_level(&self, p: usize, m: u64, q: usize, n: u64) -> Option<u32> {
        (0..=self.top_level()).find(|&l| !self.member(l, p, m, q, n))
    }

    /// Named snapshot of one level.
    pub fn grid(&self, level: u32) -> ThresholdGrid {
        let mut g = ThresholdGrid::full(
            level,
            self.beta,
            self.m_max,
            self.spoiler_states.clone(),
            self.dup_states.clone(),
        );
        for p in 0..self.dims.0 {
            for m in 0..=self.m_max {
                for q in 0..self.dims.1 {
                    g.set_min_n(p, m, q, self.min_n(level, p, m, q));
                }
            }
        }
        g
    }
}

/// Runs `alpha` levels of the unbudgeted approximant (ω answers always
/// available) and keeps every level.
pub fn approximant_run(
    spoiler: &Net,
    dup: &Net,
    alpha: u32,
    m_max: u64,
) -> Result<ApproximantRun, GameError> {
    let ctx = LevelCtx::build(spoiler, dup, m_max)?;
    let mut levels = vec![ctx.full_grid()];
    for _ in 0..alpha {
        let prev = levels.last().unwrap();
        let next = ctx.step(prev, prev);
        levels.push(next);
    }
    Ok(ApproximantRun {
        m_max,
        beta: None,
        spoiler_states: spoiler.states().to_vec(),
        dup_states: dup.states().to_vec(),
        dims: (ctx.spoiler_states, ctx.dup_states),
        levels,
    })
}

/// Threshold grid after `alpha` rounds, ω answers unrestricted.
pub fn approximant_finite(
    spoiler: &Net,
    dup: &Net,
    alpha: u32,
    m_max: u64,
) -> Result<ThresholdGrid, GameError> {
    Ok(approximant_run(spoiler, dup, alpha, m_max)?.grid(alpha))
}

/// Threshold grid after `alpha` rounds with a budget of `beta` ω answers.
/// Lane `b` consults lane `b-1` one level down whenever an ω answer is
/// taken; lane 0 is the full relation at every level (budget exhaustion
/// favors Duplicator), so `beta = 0` yields the full grid.
pub fn approximant_two_dim(
    spoiler: &Net,
    dup: &Net,
    alpha: u32,
    beta: u32,
    m_max: u64,
) -> Result<ThresholdGrid, GameError> {
    let ctx = LevelCtx::build(spoiler, dup, m_max)?;
    let lanes0: Vec<RawGrid> = (0..=beta).map(|_| ctx.full_grid()).collect();
    let mut lanes = lanes0;
    for _ in 0..alpha {
        let mut next = Vec::with_capacity(lanes.len());
        for b in 0..=beta as usize {
            if b == 0 {
                next.push(lanes[0].clone());
            } else {
                next.push(ctx.step(&lanes[b], &lanes[b - 1]));
            }
        }
        lanes = next;
    }
    let top = lanes.pop().unwrap();
    let mut g = ThresholdGrid::full(
        alpha,
        Some(beta),
        m_max,
        spoiler.states().to_vec(),
        dup.states().to_vec(),
    );
    for p in 0..ctx.spoiler_states {
        for m in 0..=m_max {
            for q in 0..ctx.dup_states {
                g.set_min_n(p, m, q, top[ctx.cell(p, m, q)]);
            }
        }
    }
    Ok(g)
}

/// Convenience wrapper used by the pipelines: raise `alpha` one level at a
/// time until the queried position falls out, returning the run and the
/// refuting level if one exists at or below `alpha_max`.
pub fn sweep(
    spoiler: &Net,
    s0: Configuration,
    dup: &Net,
    d0: Configuration,
    alpha_max: u32,
    m_max: u64,
) -> Result<(ApproximantRun, Option<u32>), GameError> {
    check_position(spoiler, s0)?;
    check_position(dup, d0)?;
    if s0.counter > m_max {
        return Err(GameError::BadPosition);
    }
    let ctx = LevelCtx::build(spoiler, dup, m_max)?;
    let mut levels = vec![ctx.full_grid()];
    let (p, m, q, n) = (s0.state.ix(), s0.counter, d0.state.ix(), d0.counter);
    let mut refuted = None;
    for level in 1..=alpha_max {
        let prev = levels.last().unwrap();
        let next = ctx.step(prev, prev);
        let covered = matches!(next[ctx.cell(p, m, q)], Some(t) if n >= t);
        levels.push(next);
        if !covered {
            refuted = Some(level);
            break;
        }
        // Early fixpoint: once a level repeats, every later level repeats.
        let len = levels.len();
        if levels[len - 1] == levels[len - 2] {
            break;
        }
    }
    Ok((
        ApproximantRun {
            m_max,
            beta: None,
            spoiler_states: spoiler.states().to_vec(),
            dup_states: dup.states().to_vec(),
            dims: (ctx.spoiler_states, ctx.dup_states),
            levels,
        },
        refuted,
    ))
}
