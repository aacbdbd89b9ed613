//! Simulation games between a Spoiler net and a Duplicator net.
//!
//! The submodules share one convention: Spoiler plays concrete steps on the
//! left net, Duplicator answers on the right net, and a position is a pair
//! of configurations. Duplicator wins a play by surviving forever; every
//! solver in here is some finite-state view of that game.
//!
//! * [`brute`] — exhaustive minimax reference oracle, deliberately naive.
//! * [`approximant`] — counter-bounded threshold grids for the approximant
//!   hierarchy, one level per game round.
//! * [`rank`] — exact refutation ranks below omega-squared for Spoilers
//!   with a bounded counter.
//! * [`gfp`] — greatest fixpoint over counter-capped quotients plus an
//!   independent closure certifier.
//! * [`witness`] — turns a grid refutation into a replayable Spoiler play.
//! * [`check`] — the end-to-end decision pipelines.
//!
//! A note on triples carrying both an ω-transition and a normal transition
//! (same source, label, target): the level-indexed solvers read every such
//! step as the ω response, charging the ω budget even for the step the
//! normal transition could explain. The normalized pairs behind the
//! decision pipelines give every transition its own bookkeeping chain and
//! so never carry both kinds on one triple; guarded intermediates can (a
//! pumping silent detour beside a plain one), which only makes budgeted
//! verdicts on them conservative — never wrong, at worst unrefuted.

use thiserror::Error;

use crate::nets::{Configuration, Net, NetError};

pub mod approximant;
pub mod brute;
pub mod check;
pub mod gfp;
pub mod rank;
pub mod witness;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("net {net} has kind {got}, which this solver does not accept")]
    BadKind { net: String, got: &'static str },
    #[error("configuration references a state outside its net")]
    BadPosition,
    #[error("rank solver not applicable: {0}")]
    Inapplicable(String),
}

/// Ordinals below omega-squared, plus a top element for "never refuted".
/// `Ord { omega: a, fin: b }` denotes omega*a + b.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Ordinal2 {
    Ord { omega: u32, fin: u32 },
    Infinite,
}

impl Ordinal2 {
    pub fn finite(b: u32) -> Self {
        Ordinal2::Ord { omega: 0, fin: b }
    }
}

impl PartialOrd for Ordinal2 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal2 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Ordinal2::*;
        match (self, other) {
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
            (Infinite, _) => std::cmp::Ordering::Greater,
            (_, Infinite) => std::cmp::Ordering::Less,
            (Ord { omega: a1, fin: b1 }, Ord { omega: a2, fin: b2 }) => {
                (a1, b1).cmp(&(a2, b2))
            }
        }
    }
}

impl std::fmt::Display for Ordinal2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ordinal2::Infinite => write!(f, "INF"),
            Ordinal2::Ord { omega, fin } => write!(f, "w*{omega}+{fin}"),
        }
    }
}

impl std::str::FromStr for Ordinal2 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "INF" {
            return Ok(Ordinal2::Infinite);
        }
        let rest = s.strip_prefix("w*").ok_or_else(|| format!("bad ordinal '{s}'"))?;
        let (a, b) = rest.split_once('+').ok_or_else(|| format!("bad ordinal '{s}'"))?;
        let omega = a.parse().map_err(|_| format!("bad ordinal '{s}'"))?;
        let fin = b.parse().map_err(|_| format!("bad ordinal '{s}'"))?;
        Ok(Ordinal2::Ord { omega, fin })
    }
}

/// Least-sufficient-counter table for one approximant level: for every
/// (Spoiler state, Spoiler counter up to `m_max`, Duplicator state) either
/// the least Duplicator counter that survives this level, or `None` when no
/// counter does. Thresholds never exceed the level, so rows are exact for
/// Spoiler counters at most `m_max` minus the level.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThresholdGrid {
    pub alpha: u32,
    /// ω-budget this grid was computed under, if the budgeted game was used.
    pub beta: Option<u32>,
    pub m_max: u64,
    pub spoiler_states: Vec<String>,
    pub dup_states: Vec<String>,
    min_n: Vec<Option<u64>>,
}

impl ThresholdGrid {
    pub fn full(
        alpha: u32,
        beta: Option<u32>,
        m_max: u64,
        spoiler_states: Vec<String>,
        dup_states: Vec<String>,
    ) -> Self {
        let cells = spoiler_states.len() * (m_max as usize + 1) * dup_states.len();
        ThresholdGrid {
            alpha,
            beta,
            m_max,
            spoiler_states,
            dup_states,
            min_n: vec![Some(0); cells],
        }
    }

    fn ix(&self, p: usize, m: u64, q: usize) -> usize {
        debug_assert!(m <= self.m_max);
        (p * (self.m_max as usize + 1) + m as usize) * self.dup_states.len() + q
    }

    pub fn min_n(&self, p: usize, m: u64, q: usize) -> Option<u64> {
        self.min_n[self.ix(p, m, q)]
    }

    pub fn set_min_n(&mut self, p: usize, m: u64, q: usize, v: Option<u64>) {
        let i = self.ix(p, m, q);
        self.min_n[i] = v;
    }

    /// Does (p, m) ≼ (q, n) hold at this level (within the grid window)?
    pub fn member(&self, p: usize, m: u64, q: usize, n: u64) -> bool {
        matches!(self.min_n(p, m, q), Some(t) if n >= t)
    }

    /// Stable text form: a `GRID` header, then one `minN` row per cell in
    /// Spoiler-state declaration order, counter ascending, Duplicator-state
    /// declaration order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let beta = match self.beta {
            Some(b) => b.to_string(),
            None => "-".to_string(),
        };
        out.push_str(&format!("GRID alpha={} beta={}\n", self.alpha, beta));
        for (p, pname) in self.spoiler_states.iter().enumerate() {
            for m in 0..=self.m_max {
                for (q, qname) in self.dup_states.iter().enumerate() {
                    let cell = match self.min_n(p, m, q) {
                        Some(t) => t.to_string(),
                        None => "ABSENT".to_string(),
                    };
                    out.push_str(&format!("minN {pname} {m} {qname} {cell}\n"));
                }
            }
        }
        out
    }
}

/// One half-round of a recorded play.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PlayMove {
    Spoiler { from: (String, u64), label: String, to: (String, u64) },
    Duplicator { from: (String, u64), label: String, to: (String, u64) },
    DuplicatorStuck,
}

/// A finite Spoiler-winning play: alternating Spoiler/Duplicator moves
/// ending with Duplicator unable to answer.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WitnessPlay {
    pub moves: Vec<PlayMove>,
}

impl WitnessPlay {
    /// Stable text form: a `PLAY` header, then `S:`/`D:` lines.
    pub fn render(&self) -> String {
        let mut out = String::from("PLAY\n");
        for mv in &self.moves {
            match mv {
                PlayMove::Spoiler { from, label, to } => {
                    out.push_str(&format!(
                        "S: {} {} -{}-> {} {}\n",
                        from.0, from.1, label, to.0, to.1
                    ));
                }
                PlayMove::Duplicator { from, label, to } => {
                    out.push_str(&format!(
                        "D: {} {} -{}-> {} {}\n",
                        from.0, from.1, label, to.0, to.1
                    ));
                }
                PlayMove::DuplicatorStuck => out.push_str("D: stuck\n"),
            }
        }
        out
    }
}

/// Outcome of a decision pipeline.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// A capped relation passed the independent closure certifier and
    /// contains the queried pair.
    Simulates { cap: u64 },
    /// Refuted, with the least refutation rank found and, when the
    /// refutation came from a finite level, a replayable Spoiler play.
    NotSimulates { rank: Ordinal2, witness: Option<WitnessPlay> },
    /// Budgets exhausted without a proof either way.
    Unknown { alpha_max: u32, cap: u64 },
}

impl Verdict {
    /// Stable one-line machine form.
    pub fn render_machine(&self) -> String {
        match self {
            Verdict::Simulates { cap } => format!("VERDICT simulates cap={cap}"),
            Verdict::NotSimulates { rank, .. } => {
                format!("VERDICT not-simulates rank={rank}")
            }
            Verdict::Unknown { alpha_max, cap } => {
                format!("VERDICT unknown alpha-max={alpha_max} cap={cap}")
            }
        }
    }
}

/// Maps each Spoiler label to the same-text label of the Duplicator net,
/// where present. Labels the Duplicator net never mentions map to `None`;
/// a Spoiler step with such a label is unanswerable (except that the
/// silent label always exists implicitly: weak responses may stay put).
pub(crate) fn label_map(spoiler: &Net, dup: &Net) -> Vec<Option<crate::nets::LabelId>> {
    spoiler
        .labels()
        .iter()
        .map(|l| dup.label_id(&l.text))
        .collect()
}

pub(crate) fn check_position(net: &Net, cfg: Configuration) -> Result<(), GameError> {
    if (cfg.state.ix()) < net.states().len() {
        Ok(())
    } else {
        Err(GameError::BadPosition)
    }
}
