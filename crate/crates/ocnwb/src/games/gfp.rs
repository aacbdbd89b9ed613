//! Capped greatest fixpoint and the closure certifier that keeps it
//! honest.
//!
//! [`capped_gfp`] computes the greatest relation closed under one-step
//! simulation expansion on a finite counter window `[0..cap]`. The top
//! class is absorbing: a side sitting at `cap` stands for "arbitrarily
//! large counter", its edges always fire and always land back at `cap`.
//! That deliberately over-approximates Duplicator (a drain at the top
//! class never exhausts), so membership rows touching the cap may be
//! false positives; the [`SaturationReport`] records whether the top
//! row and column have stabilized against their neighbours, which is
//! the cheap signal that the window was large enough to mean something.
//!
//! [`certify_simulation`] is the independent check that turns a capped
//! grid into a proof. It verifies that the monotone extension
//! `W(p m, q n) := grid(p, min(m,cap), q, min(n,cap))` is closed under
//! expansion over the counter-class quotient `{0, …, cap−1, ≥cap}`,
//! resolving every class ambiguity against the claim: a Spoiler edge
//! from the top class must be answered for every concretization (so a
//! decrement may land in `cap−1` or stay `≥cap`, and both need answers),
//! while Duplicator is only granted the weakest concretization (`cap`
//! exactly) and ω answers may pick any class — sound because threshold
//! grids are upward closed in the Duplicator counter. Acceptance proves
//! that every pair of `W` simulates; rejection proves nothing and must
//! never be read as a refutation.

use crate::nets::{Effect, Net, NetKind};

use super::{label_map, GameError, ThresholdGrid};

/// Whether the boundary rows of a capped grid agree with their inner
/// neighbours, in threshold form. Disagreement means the fixpoint was
/// still changing when it hit the window edge, so top-class entries are
/// untrustworthy extrapolations.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SaturationReport {
    /// Row `m = cap` equals row `m = cap − 1`.
    pub rows_stable: bool,
    /// No threshold sits exactly at `n = cap`.
    pub cols_stable: bool,
}

impl SaturationReport {
    pub fn stable(&self) -> bool {
        self.rows_stable && self.cols_stable
    }

    /// Stable one-line text form.
    pub fn render(&self) -> String {
        format!(
            "SATURATION rows-stable={} cols-stable={}",
            self.rows_stable, self.cols_stable
        )
    }
}

/// Outcome of [`certify_simulation`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CertifyOutcome {
    /// The extension of the grid is expansion-closed: every member pair
    /// really simulates.
    Accepted,
    /// Some member pair has an unanswerable concretization. Proves
    /// nothing about the underlying nets.
    Rejected { detail: String },
}

impl CertifyOutcome {
    pub fn accepted(&self) -> bool {
        matches!(self, CertifyOutcome::Accepted)
    }
}

fn check_kinds(spoiler: &Net, dup: &Net) -> Result<(), GameError> {
    match spoiler.kind {
        NetKind::Ocn | NetKind::Fs => {}
        k => return Err(GameError::BadKind { net: spoiler.name.clone(), got: k.tag() }),
    }
    match dup.kind {
        NetKind::Ocn | NetKind::OmegaNet | NetKind::GuardedOmega => {}
        k => return Err(GameError::BadKind { net: dup.name.clone(), got: k.tag() }),
    }
    Ok(())
}

/// Class successor on the capped window with an absorbing top: `None`
/// when the edge cannot fire from this class.
fn class_step(x: u64, guard: u64, effect: Effect, cap: u64) -> Option<u64> {
    if x == cap {
        return Some(cap);
    }
    if x < guard {
        return None;
    }
    match effect {
        Effect::Omega => Some(cap),
        Effect::Fin(d) => {
            let to = x as i64 + d;
            if to < 0 {
                None
            } else {
                Some((to as u64).min(cap))
            }
        }
    }
}

/// Greatest fixpoint of one-step simulation expansion on the capped
/// counter window, with the grid in threshold form and a report on
/// whether the window boundary had stabilized. The grid's `alpha` field
/// holds the number of expansion sweeps until the fixpoint settled.
pub fn capped_gfp(
    spoiler: &Net,
    dup: &Net,
    cap: u64,
) -> Result<(ThresholdGrid, SaturationReport), GameError> {
    check_kinds(spoiler, dup)?;
    assert!(cap >= 2, "capped fixpoint needs cap >= 2");
    let np = spoiler.states().len();
    let nq = dup.states().len();
    let w = cap as usize + 1;
    let map = label_map(spoiler, dup);
    let fs = spoiler.kind == NetKind::Fs;
    let cell = |p: usize, m: usize, q: usize, n: usize| ((p * w + m) * nq + q) * w + n;

    // Spoiler class moves are independent of the Duplicator cell.
    let mut sp_moves: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); np * w];
    for t in &spoiler.trans {
        for m in 0..w {
            let m2 = if fs {
                Some(m as u64)
            } else {
                class_step(m as u64, t.guard, t.effect, cap)
            };
            if let Some(m2) = m2 {
                sp_moves[t.src.ix() * w + m].push((t.label.ix(), t.dst.ix(), m2 as usize));
            }
        }
    }
    // Duplicator class answers per (state, spoiler label, class).
    let nl = spoiler.labels().len();
    let mut dup_answers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nq * nl * w];
    for u in &dup.trans {
        for (sl, dl) in map.iter().enumerate() {
            if *dl != Some(u.label) {
                continue;
            }
            for n in 0..w {
                if let Some(n2) = class_step(n as u64, u.guard, u.effect, cap) {
                    dup_answers[(u.src.ix() * nl + sl) * w + n].push((u.dst.ix(), n2 as usize));
                }
            }
        }
    }

    let mut member = vec![true; np * w * nq * w];
    let mut sweeps = 0u32;
    loop {
        let mut next = vec![false; member.len()];
        let mut changed = false;
        for p in 0..np {
            for m in 0..w {
                for q in 0..nq {
                    for n in 0..w {
                        let c = cell(p, m, q, n);
                        if !member[c] {
                            continue;
                        }
                        let ok = sp_moves[p * w + m].iter().all(|&(sl, p2, m2)| {
                            dup_answers[(q * nl + sl) * w + n]
                                .iter()
                                .any(|&(q2, n2)| member[cell(p2, m2, q2, n2)])
                        });
                        next[c] = ok;
                        changed |= !ok;
                    }
                }
            }
        }
        if !changed {
            break;
        }
        member = next;
        sweeps += 1;
    }

    let mut grid = ThresholdGrid::full(
        sweeps,
        None,
        cap,
        spoiler.states().to_vec(),
        dup.states().to_vec(),
    );
    for p in 0..np {
        for m in 0..w {
            for q in 0..nq {
                let t = (0..w).find(|&n| member[cell(p, m, q, n)]);
                debug_assert!(
                    (0..w).all(|n| member[cell(p, m, q, n)] == t.map_or(false, |v| n >= v)),
                    "membership not upward closed in the Duplicator counter"
                );
                grid.set_min_n(p, m as u64, q, t.map(|n| n as u64));
            }
        }
    }

    let rows_stable = (0..np).all(|p| {
        (0..nq).all(|q| grid.min_n(p, cap, q) == grid.min_n(p, cap - 1, q))
    });
    let cols_stable = (0..np)
        .all(|p| (0..w).all(|m| (0..nq).all(|q| grid.min_n(p, m as u64, q) != Some(cap))));
    Ok((grid, SaturationReport { rows_stable, cols_stable }))
}

/// Verifies that the monotone extension of a capped grid is closed under
/// one-step expansion over the counter-class quotient, resolving class
/// ambiguity conservatively (every Spoiler concretization must be
/// answered; Duplicator only gets the weakest one; ω answers may pick
/// any class). Acceptance is a proof that every member pair simulates;
/// rejection is not a refutation.
pub fn certify_simulation(
    spoiler: &Net,
    dup: &Net,
    grid: &ThresholdGrid,
    cap: u64,
) -> Result<CertifyOutcome, GameError> {
    check_kinds(spoiler, dup)?;
    if grid.m_max != cap
        || grid.spoiler_states != spoiler.states()
        || grid.dup_states != dup.states()
    {
        return Err(GameError::Inapplicable(
            "grid does not match the nets and cap under certification".into(),
        ));
    }
    let map = label_map(spoiler, dup);
    let fs = spoiler.kind == NetKind::Fs;
    let np = spoiler.states().len();
    let nq = dup.states().len();

    for p in 0..np {
        for m in 0..=cap {
            for q in 0..nq {
                for n in 0..=cap {
                    if !grid.member(p, m, q, n) {
                        continue;
                    }
                    for t in spoiler.trans.iter().filter(|t| t.src.ix() == p) {
                        // Landing classes over every concretization of m.
                        let landings: Vec<u64> = if fs {
                            vec![m]
                        } else {
                            let d = match t.effect {
                                Effect::Fin(d) => d,
                                Effect::Omega => {
                                    return Err(GameError::BadKind {
                                        net: spoiler.name.clone(),
                                        got: spoiler.kind.tag(),
                                    })
                                }
                            };
                            if m < cap {
                                if m < t.guard || m as i64 + d < 0 {
                                    continue;
                                }
                                vec![(m as i64 + d).min(cap as i64) as u64]
                            } else {
                                // Concrete m ranges over everything at or
                                // above max(cap, guard, -d); the landings
                                // sweep every class from the lowest up.
                                let lo = (cap as i64).max(t.guard as i64).max(-d) + d;
                                let lo = lo.clamp(0, cap as i64) as u64;
                                (lo..=cap).collect()
                            }
                        };
                        for m2 in landings {
                            let answered = match map[t.label.ix()] {
                                None => false,
                                Some(dl) => {
                                    dup.trans
                                        .iter()
                                        .filter(|u| u.src.ix() == q && u.label == dl)
                                        .any(|u| match u.effect {
                                            Effect::Omega => {
                                                n >= u.guard
                                                    && grid.min_n(t.dst.ix(), m2, u.dst.ix())
                                                        .is_some()
                                            }
                                            Effect::Fin(d2) => {
                                                // Weakest concretization:
                                                // the class value itself.
                                                let n2 = n as i64 + d2;
                                                n >= u.guard
                                                    && n2 >= 0
                                                    && grid.member(
                                                        t.dst.ix(),
                                                        m2,
                                                        u.dst.ix(),
                                                        (n2 as u64).min(cap),
                                                    )
                                            }
                                        })
                                }
                            };
                            if !answered {
                                return Ok(CertifyOutcome::Rejected {
                                    detail: format!(
                                        "pair ({} {m}, {} {n}) loses to {} toward class {m2}",
                                        spoiler.state_name(t.src),
                                        dup.states()[q],
                                        spoiler.labels()[t.label.ix()].text,
                                        ),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(CertifyOutcome::Accepted)
}
