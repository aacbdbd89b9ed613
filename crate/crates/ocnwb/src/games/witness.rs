//! Deterministic refutation plays extracted from a recorded approximant
//! run.
//!
//! When a position is refuted at a finite level, the level history pins
//! down a winning Spoiler strategy: at a position refuted at level `k`,
//! some Spoiler move leaves every Duplicator answer refuted by level
//! `k − 1`. The extractor follows that strategy and plays Duplicator as
//! well as the grids allow — each answer maximizes the level it still
//! survives — so the emitted play is both a genuine win for Spoiler and
//! a fair account of how long Duplicator could stall. Ties on both
//! sides break toward the lowest transition index, and an ω answer
//! lands on the least counter that realizes its best surviving level
//! (but above the current one), which makes extraction deterministic.
//!
//! The play ends with a Spoiler move that has no answer at all; every
//! move replays through the concrete successor relation.

use crate::nets::{Configuration, Effect, Net, NetKind, StateId};

use super::approximant::ApproximantRun;
use super::{check_position, label_map, GameError, PlayMove, WitnessPlay};

/// Extracts a refutation play for `(s0, d0)` from a recorded run. Fails
/// with [`GameError::Inapplicable`] when the run does not refute the
/// position, or when the run's counter window is too small to replay
/// the refuting strategy exactly.
pub fn extract_witness(
    spoiler: &Net,
    s0: Configuration,
    dup: &Net,
    d0: Configuration,
    run: &ApproximantRun,
) -> Result<WitnessPlay, GameError> {
    check_position(spoiler, s0)?;
    check_position(dup, d0)?;
    let map = label_map(spoiler, dup);
    let fs = spoiler.kind == NetKind::Fs;

    let mut level = match run.refutation_level(s0.state.ix(), s0.counter, d0.state.ix(), d0.counter)
    {
        Some(l) => l,
        None => {
            return Err(GameError::Inapplicable(
                "position is not refuted within the recorded run".into(),
            ))
        }
    };
    let mut s = s0;
    let mut d = d0;
    let mut moves = Vec::new();

    while level > 0 {
        // The refuting Spoiler move: every answer dies by `level - 1`.
        let prev = level - 1;
        let mut chosen: Option<(usize, u64)> = None;
        for (ti, t) in spoiler.trans.iter().enumerate() {
            if t.src != s.state {
                continue;
            }
            let m2 = if fs {
                s.counter
            } else {
                match t.effect {
                    Effect::Fin(dm) => {
                        if s.counter < t.guard || s.counter as i64 + dm < 0 {
                            continue;
                        }
                        (s.counter as i64 + dm) as u64
                    }
                    Effect::Omega => continue,
                }
            };
            if m2 > run.m_max {
                return Err(GameError::Inapplicable(
                    "counter window too small to replay the refuting strategy".into(),
                ));
            }
            let survivable = match map[t.label.ix()] {
                None => false,
                Some(dl) => dup.trans.iter().filter(|u| u.src == d.state && u.label == dl).any(
                    |u| match u.effect {
                        Effect::Fin(dn) => {
                            d.counter >= u.guard
                                && d.counter as i64 + dn >= 0
                                && run.member(
                                    prev,
                                    t.dst.ix(),
                                    m2,
                                    u.dst.ix(),
                                    (d.counter as i64 + dn) as u64,
                                )
                        }
                        Effect::Omega => {
                            d.counter >= u.guard
                                && run.min_n(prev, t.dst.ix(), m2, u.dst.ix()).is_some()
                        }
                    },
                ),
            };
            if !survivable {
                chosen = Some((ti, m2));
                break;
            }
        }
        let Some((ti, m2)) = chosen else {
            return Err(GameError::Inapplicable(
                "no refuting move found; the counter window was too small".into(),
            ));
        };
        let t = &spoiler.trans[ti];
        moves.push(PlayMove::Spoiler {
            from: (spoiler.state_name(s.state).to_string(), s.counter),
            label: spoiler.labels()[t.label.ix()].text.clone(),
            to: (spoiler.state_name(t.dst).to_string(), m2),
        });
        s = Configuration { state: t.dst, counter: m2 };

        // Duplicator's best answer: maximal surviving level, then lowest
        // transition index.
        let mut best: Option<(u32, usize, StateId, u64)> = None;
        if let Some(dl) = map[t.label.ix()] {
            for (ui, u) in dup.trans.iter().enumerate() {
                if u.src != d.state || u.label != dl || d.counter < u.guard {
                    continue;
                }
                let cand = match u.effect {
                    Effect::Fin(dn) => {
                        let n2 = d.counter as i64 + dn;
                        if n2 < 0 {
                            continue;
                        }
                        let n2 = n2 as u64;
                        let lvl = run
                            .refutation_level(s.state.ix(), s.counter, u.dst.ix(), n2)
                            .unwrap_or(u32::MAX);
                        (lvl, ui, u.dst, n2)
                    }
                    Effect::Omega => {
                        // Climb to the last level where some landing
                        // counter still survives, and land on the least
                        // such counter above the current one.
                        let lstar = (0..=run.top_level())
                            .rev()
                            .find(|&l| run.min_n(l, s.state.ix(), s.counter, u.dst.ix()).is_some());
                        match lstar {
                            None => continue,
                            Some(l) => {
                                let floor =
                                    run.min_n(l, s.state.ix(), s.counter, u.dst.ix()).unwrap();
                                let n2 = floor.max(d.counter + 1);
                                (l + 1, ui, u.dst, n2)
                            }
                        }
                    }
                };
                let better = match best {
                    None => true,
                    Some((bl, bi, _, _)) => cand.0 > bl || (cand.0 == bl && cand.1 < bi),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        match best {
            None => {
                moves.push(PlayMove::DuplicatorStuck);
                return Ok(WitnessPlay { moves });
            }
            Some((_, ui, q2, n2)) => {
                let u = &dup.trans[ui];
                moves.push(PlayMove::Duplicator {
                    from: (dup.state_name(d.state).to_string(), d.counter),
                    label: dup.labels()[u.label.ix()].text.clone(),
                    to: (dup.state_name(q2).to_string(), n2),
                });
                d = Configuration { state: q2, counter: n2 };
            }
        }
        level = match run.refutation_level(s.state.ix(), s.counter, d.state.ix(), d.counter) {
            Some(l) => {
                debug_assert!(l < level, "refutation level failed to decrease");
                l
            }
            None => {
                return Err(GameError::Inapplicable(
                    "strategy replay left the refuted region; counter window too small".into(),
                ))
            }
        };
    }
    Err(GameError::Inapplicable(
        "refutation level reached zero without a stuck Duplicator".into(),
    ))
}
