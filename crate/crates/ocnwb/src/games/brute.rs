//! Exhaustive minimax oracle for bounded-round simulation games.
//!
//! This is the reference the real solvers are tested against, so it stays
//! deliberately naive: enumerate every move, recurse, memoize, no pruning.
//! Unbounded (ω) choices and weak-step closures are enumerated up to a
//! caller-supplied counter ceiling. The oracle is exact whenever the
//! ceiling is generous enough. A single round can move the Duplicator
//! counter by more than one edge's worth: a weak answer threads two
//! silent segments around its visible step, and a segment never needs to
//! revisit a state except to climb, while climbing past the total spend
//! of the remaining rounds cannot help (survival is monotone in the
//! counter). Each round is therefore worth at most `2|Q|+1` edges of
//! forced counter movement, so
//!
//! ```text
//! ceiling >= max(initial counters)
//!            + rounds * (2|Q|+1) * max(1, |delta|_max)
//!            + guard_max + |Q|
//! ```
//!
//! makes the enumeration indistinguishable from the full infinite game
//! ([`generous_cap`] computes exactly that, with `|Q|` the Duplicator's
//! state count).

use std::collections::HashMap;

use crate::nets::{Configuration, Effect, Net, Step};

use super::{label_map, check_position, GameError};

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum GameMode {
    /// Duplicator answers with single steps, silent steps included, and
    /// labels must match exactly.
    Strong,
    /// Spoiler still plays single steps; Duplicator answers a visible label
    /// with a weak step (silent steps around one matching step) and a
    /// silent label with any weak silent step, staying put included.
    Weak,
}

/// The documented "big enough" ceiling for [`duplicator_survives`].
pub fn generous_cap(spoiler: &Net, s0: Configuration, dup: &Net, d0: Configuration, rounds: u32) -> u64 {
    let max_abs = spoiler
        .trans
        .iter()
        .chain(dup.trans.iter())
        .map(|t| match t.effect {
            Effect::Fin(d) => d.unsigned_abs(),
            Effect::Omega => 1,
        })
        .max()
        .unwrap_or(1)
        .max(1);
    let guard_max = spoiler
        .trans
        .iter()
        .chain(dup.trans.iter())
        .map(|t| t.guard)
        .max()
        .unwrap_or(0);
    let nd = dup.states().len() as u64;
    s0.counter.max(d0.counter) + rounds as u64 * (2 * nd + 1) * max_abs + guard_max + nd
}

/// Does Duplicator survive `rounds` rounds from (`s0`, `d0`)?
///
/// `ceiling` bounds every enumerated counter: ω choices range over
/// `above+1 ..= ceiling` and weak closures stop at it. Positions whose
/// counters already exceed it are still played faithfully; only freshly
/// enumerated choices are clipped.
pub fn duplicator_survives(
    spoiler: &Net,
    s0: Configuration,
    dup: &Net,
    d0: Configuration,
    rounds: u32,
    ceiling: u64,
    mode: GameMode,
) -> Result<bool, GameError> {
    check_position(spoiler, s0)?;
    check_position(dup, d0)?;
    let labels = label_map(spoiler, dup);
    let mut memo = HashMap::new();
    survives(
        &Ctx { spoiler, dup, labels, ceiling, mode },
        s0,
        d0,
        rounds,
        &mut memo,
    )
}

struct Ctx<'a> {
    spoiler: &'a Net,
    dup: &'a Net,
    labels: Vec<Option<crate::nets::LabelId>>,
    ceiling: u64,
    mode: GameMode,
}

type Memo = HashMap<(u32, u64, u32, u64, u32), bool>;

fn enumerate(steps: Vec<Step>, ceiling: u64) -> Vec<(crate::nets::LabelId, Configuration)> {
    let mut out = Vec::new();
    for step in steps {
        match step {
            Step::Concrete { label, to } => out.push((label, to)),
            Step::Unbounded { label, state, above } => {
                for c in above + 1..=ceiling.max(above + 1) {
                    out.push((label, Configuration { state, counter: c }));
                }
            }
        }
    }
    out
}

fn survives(
    ctx: &Ctx<'_>,
    s: Configuration,
    d: Configuration,
    rounds: u32,
    memo: &mut Memo,
) -> Result<bool, GameError> {
    if rounds == 0 {
        return Ok(true);
    }
    let key = (s.state.0, s.counter, d.state.0, d.counter, rounds);
    if let Some(&v) = memo.get(&key) {
        return Ok(v);
    }
    let mut all_answered = true;
    for (s_label, s_to) in enumerate(ctx.spoiler.successors(s)?, ctx.ceiling) {
        let mut answered = false;
        match ctx.mode {
            GameMode::Strong => {
                if let Some(want) = ctx.labels[s_label.ix()] {
                    for (d_label, d_to) in enumerate(ctx.dup.successors(d)?, ctx.ceiling) {
                        if d_label == want && survives(ctx, s_to, d_to, rounds - 1, memo)? {
                            answered = true;
                            break;
                        }
                    }
                }
            }
            GameMode::Weak => {
                let silent = ctx.spoiler.label(s_label).is_silent();
                let want = if silent { None } else { ctx.labels[s_label.ix()] };
                if !silent && want.is_none() {
                    // Visible label the Duplicator net never mentions.
                } else {
                    for (d_label, d_to) in ctx.dup.weak_successors_bounded(d, ctx.ceiling)? {
                        if d_label == want && survives(ctx, s_to, d_to, rounds - 1, memo)? {
                            answered = true;
                            break;
                        }
                    }
                }
            }
        }
        if !answered {
            all_answered = false;
            break;
        }
    }
    memo.insert(key, all_answered);
    Ok(all_answered)
}

/// Least number of rounds at which Spoiler wins, up to `alpha_max`.
pub fn least_refuting_level(
    spoiler: &Net,
    s0: Configuration,
    dup: &Net,
    d0: Configuration,
    alpha_max: u32,
    ceiling: u64,
    mode: GameMode,
) -> Result<Option<u32>, GameError> {
    for alpha in 1..=alpha_max {
        if !duplicator_survives(spoiler, s0, dup, d0, alpha, ceiling, mode)? {
            return Ok(Some(alpha));
        }
    }
    Ok(None)
}
