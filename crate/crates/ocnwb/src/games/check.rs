//! Decision pipelines that combine the solvers into a verdict.
//!
//! Both checkers are sound and incomplete: they escalate through three
//! independent engines and return [`Verdict::Unknown`] when none of
//! them settles the question within the caller's budgets.
//!
//! 1. Finite refutation: run the approximant levels up to `alpha_max`.
//!    A refuted position yields a finite rank and a replayable play.
//! 2. Transfinite refutation: when the Spoiler side provably stays
//!    under the counter ceiling, the rank solver searches for an
//!    ordinal rank below ω². A finite answer here means the budgets
//!    missed it; either way a rank refutes.
//! 3. Certification: the capped fixpoint proposes a candidate relation
//!    and the closure certifier independently re-verifies it; only a
//!    certified relation containing the queried pair proves simulation.
//!
//! A solver that answers "no refutation found" (an `INF` rank, a
//! rejected certificate) proves nothing by itself and never turns into
//! a conclusive verdict.
//!
//! The weak checker reduces both one-counter nets to a strong game
//! first; state names and counters carry over unchanged, so the
//! original query designates the same position afterwards.

use crate::nets::{Configuration, Net};
use crate::reduction::{weak_to_strong, ReductionError};

use super::approximant::approximant_run;
use super::gfp::{capped_gfp, certify_simulation};
use super::rank::rank_solver;
use super::witness::extract_witness;
use super::{check_position, GameError, Ordinal2, Verdict};

/// Decides strong simulation between a one-counter (or finite-state)
/// Spoiler and a one-counter or ω-net Duplicator, within budgets:
/// `alpha_max` bounds the finite refutation search, `cap` bounds both
/// the certification window and the Spoiler counter ceiling assumed by
/// the rank solver.
pub fn strong_sim_check(
    spoiler: &Net,
    s0: Configuration,
    dup: &Net,
    d0: Configuration,
    alpha_max: u32,
    cap: u64,
) -> Result<Verdict, GameError> {
    check_position(spoiler, s0)?;
    check_position(dup, d0)?;

    let m_max = s0.counter + alpha_max as u64;
    let run = approximant_run(spoiler, dup, alpha_max, m_max)?;
    if run
        .refutation_level(s0.state.ix(), s0.counter, d0.state.ix(), d0.counter)
        .is_some()
    {
        let play = extract_witness(spoiler, s0, dup, d0, &run)?;
        let alpha = run
            .refutation_level(s0.state.ix(), s0.counter, d0.state.ix(), d0.counter)
            .expect("checked above");
        return Ok(Verdict::NotSimulates {
            rank: Ordinal2::finite(alpha),
            witness: Some(play),
        });
    }

    match rank_solver(spoiler, s0, dup, d0, None, cap) {
        Ok(Ordinal2::Infinite) => {}
        Ok(rank) => return Ok(Verdict::NotSimulates { rank, witness: None }),
        Err(GameError::Inapplicable(_)) => {}
        Err(e) => return Err(e),
    }

    let (grid, _report) = capped_gfp(spoiler, dup, cap)?;
    let certified = certify_simulation(spoiler, dup, &grid, cap)?.accepted();
    if certified && grid.member(s0.state.ix(), s0.counter.min(cap), d0.state.ix(), d0.counter.min(cap))
    {
        return Ok(Verdict::Simulates { cap });
    }

    Ok(Verdict::Unknown { alpha_max, cap })
}

/// Decides weak simulation between two one-counter nets by reducing to
/// the strong game and running [`strong_sim_check`] on the result.
pub fn weak_sim_check(
    m: &Net,
    pm: Configuration,
    n: &Net,
    qn: Configuration,
    alpha_max: u32,
    cap: u64,
) -> Result<Verdict, ReductionError> {
    check_position(m, pm).map_err(ReductionError::from)?;
    check_position(n, qn).map_err(ReductionError::from)?;
    let out = weak_to_strong(m, n)?;
    let s0 = Configuration {
        state: out
            .spoiler
            .state_id(m.state_name(pm.state))
            .expect("reduction preserves state names"),
        counter: pm.counter,
    };
    let d0 = Configuration {
        state: out
            .dup
            .state_id(n.state_name(qn.state))
            .expect("reduction preserves state names"),
        counter: qn.counter,
    };
    Ok(strong_sim_check(&out.spoiler, s0, &out.dup, d0, alpha_max, cap)?)
}
