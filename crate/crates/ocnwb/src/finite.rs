//! Weak-simulation checks between one-counter nets and finite-state
//! systems, in both directions, in polynomial time.
//!
//! Both directions reduce to finite problems:
//!
//! * **Finite state vs. net** ([`ocn_simulates_fs`]): whether a net
//!   process `q(n)` weakly simulates a finite state only depends on the
//!   counter up to a polynomial bound `c`. The net is replaced by its
//!   [`capped_net`] — a finite system whose states `q@k` track the
//!   counter saturated at `c` — and the question becomes weak simulation
//!   between two finite systems, decided by [`fs_weak_sim`].
//! * **Net vs. finite state** ([`fs_simulates_ocn`]): whether a finite
//!   state weakly simulates `p(m)` is monotone in `m` (downward closed),
//!   so each pair of a net state and a finite state has a *threshold*:
//!   the largest counter value that is still simulated.
//!   [`threshold_table`] computes every threshold by a Bellman-style
//!   fixpoint; finite values can never exceed `|Q|·|S|` (a play that
//!   repeats a state pair with a higher counter can be pumped forever),
//!   so anything that climbs past that cutoff is reported infinite.
//!
//! Weak steps are dealt with once and for all by [`weak_closure`], which
//! materialises `τ* a τ*` paths as ordinary edges (plus a `τ` self-loop
//! on every state), so the fixpoints above only ever look at single
//! steps.

use std::fmt;

use thiserror::Error;

use crate::games::label_map;
use crate::nets::{Effect, Net, NetKind, StateId, SILENT_LABEL};

/// Errors from the finite-comparison operations.
#[derive(Debug, Error)]
pub enum FiniteError {
    #[error("net `{net}` has kind {got}, expected {want}")]
    WrongKind {
        net: String,
        got: &'static str,
        want: &'static str,
    },
    #[error("name `{0}` contains the reserved marker `@`; rename it before capping")]
    ReservedName(String),
    #[error("configuration references a state outside its net")]
    BadPosition,
    #[error("counter cap must be at least 1")]
    CapRange,
    #[error("net `{0}` carries an unbounded effect, which capping does not support")]
    Unbounded(String),
    #[error("capped system would need {0} states; refusing to build it")]
    TooLarge(u64),
}

fn expect_kind(net: &Net, want: NetKind, tag: &'static str) -> Result<(), FiniteError> {
    if net.kind == want {
        Ok(())
    } else {
        Err(FiniteError::WrongKind {
            net: net.name.clone(),
            got: net.kind.tag(),
            want: tag,
        })
    }
}

// Dense bitset rows keep the closure and reachability loops cheap even
// when capped systems have a few hundred states.
type Row = Vec<u64>;

fn row_set(row: &mut Row, i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

fn row_get(row: &Row, i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

fn row_or(dst: &mut Row, src: &Row) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= *s;
    }
}

/// Replaces the step relation of a finite system with its weak closure:
/// the output has `q -a-> q'` exactly when the input has `q =a=> q'`
/// (some `τ* a τ*` path), and `q -τ-> q'` exactly when `q'` is silently
/// reachable from `q` — including `q' = q`, so every state gains a `τ`
/// self-loop. Strong-step solvers run on the result decide weak notions
/// without any special cases.
pub fn weak_closure(fs: &Net) -> Result<Net, FiniteError> {
    expect_kind(fs, NetKind::Fs, "fs")?;
    let n = fs.states().len();
    let words = n.div_ceil(64);
    let mut tau_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut vis: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for t in &fs.trans {
        if fs.label(t.label).is_silent() {
            tau_adj[t.src.ix()].push(t.dst.ix());
        } else {
            vis[t.src.ix()].push((t.label.ix(), t.dst.ix()));
        }
    }
    // Reflexive-transitive silent reachability, one row per state.
    let mut star: Vec<Row> = Vec::with_capacity(n);
    for q in 0..n {
        let mut row = vec![0u64; words];
        row_set(&mut row, q);
        let mut queue = vec![q];
        while let Some(x) = queue.pop() {
            for &y in &tau_adj[x] {
                if !row_get(&row, y) {
                    row_set(&mut row, y);
                    queue.push(y);
                }
            }
        }
        star.push(row);
    }
    let mut out = Net::new(NetKind::Fs, format!("{}.weak", fs.name));
    for s in fs.states() {
        out.add_state(s.clone()).expect("input names are unique");
    }
    for l in fs.labels() {
        out.intern_label(&l.text);
    }
    for q in 0..n {
        for q2 in 0..n {
            if row_get(&star[q], q2) {
                out.add_trans(
                    StateId(q as u32),
                    SILENT_LABEL,
                    0,
                    Effect::Fin(0),
                    StateId(q2 as u32),
                );
            }
        }
    }
    // q =a=> q2 iff q τ*-reaches some r with r -a-> r2 and r2 τ*-reaches q2.
    let nl = fs.labels().len();
    for q in 0..n {
        let mut reach: Vec<Option<Row>> = vec![None; nl];
        for r in 0..n {
            if !row_get(&star[q], r) {
                continue;
            }
            for &(l, r2) in &vis[r] {
                let row = reach[l].get_or_insert_with(|| vec![0u64; words]);
                row_or(row, &star[r2]);
            }
        }
        for (l, row) in reach.iter().enumerate() {
            let Some(row) = row else { continue };
            let text = fs.labels()[l].text.clone();
            for q2 in 0..n {
                if row_get(row, q2) {
                    out.add_trans(
                        StateId(q as u32),
                        &text,
                        0,
                        Effect::Fin(0),
                        StateId(q2 as u32),
                    );
                }
            }
        }
    }
    Ok(out)
}

/// A net with its counter saturated at `cap`, flattened into a finite
/// system: state `q@k` stands for `q` with counter value `k`, and the
/// top value `cap` absorbs everything above it.
#[derive(Clone, Debug)]
pub struct CappedNet {
    /// The net the capped system was built from.
    pub base: Net,
    /// The saturation value; counters `>= cap` all map onto `q@cap`.
    pub cap: u64,
    /// The finite system itself, `|Q|·(cap+1)` states named `q@k`.
    pub fs: Net,
}

impl CappedNet {
    /// The finite-system state standing for base state `q` with counter
    /// value `n` (values above the cap share the top state).
    pub fn state(&self, q: StateId, n: u64) -> Option<StateId> {
        if q.ix() >= self.base.states().len() {
            return None;
        }
        let id = StateId((q.ix() as u64 * (self.cap + 1) + n.min(self.cap)) as u32);
        debug_assert_eq!(
            self.fs.state_name(id),
            format!("{}@{}", self.base.state_name(q), n.min(self.cap))
        );
        Some(id)
    }
}

/// Builds the `cap`-saturated finite version of a one-counter net:
/// `q@k -a-> q'@min(k', cap)` exactly when `q(k) -a-> q'(k')` is a step
/// of the net. Construction is linear in `cap · |net|`. Requires
/// `cap >= 1` and refuses base nets that already use the reserved `@`
/// marker in state names.
pub fn capped_net(net: &Net, cap: u64) -> Result<CappedNet, FiniteError> {
    expect_kind(net, NetKind::Ocn, "ocn")?;
    if cap == 0 {
        return Err(FiniteError::CapRange);
    }
    if let Some(s) = net.states().iter().find(|s| s.contains('@')) {
        return Err(FiniteError::ReservedName(s.clone()));
    }
    let width = cap + 1;
    let total = (net.states().len() as u64).saturating_mul(width);
    if total > (u32::MAX / 2) as u64 {
        return Err(FiniteError::TooLarge(total));
    }
    let mut fs = Net::new(NetKind::Fs, format!("{}.cap{}", net.name, cap));
    for q in net.states() {
        for k in 0..width {
            fs.add_state(format!("{q}@{k}"))
                .expect("base names are unique and @-free");
        }
    }
    for l in net.labels() {
        fs.intern_label(&l.text);
    }
    for t in &net.trans {
        let Effect::Fin(d) = t.effect else {
            return Err(FiniteError::Unbounded(net.name.clone()));
        };
        let text = net.label(t.label).text.clone();
        for k in t.guard..=cap {
            let landed = k as i128 + d as i128;
            if landed < 0 {
                continue;
            }
            let landed = (landed as u64).min(cap);
            let src = StateId((t.src.ix() as u64 * width + k) as u32);
            let dst = StateId((t.dst.ix() as u64 * width + landed) as u32);
            fs.add_trans(src, &text, 0, Effect::Fin(0), dst);
        }
    }
    Ok(CappedNet { base: net.clone(), cap, fs })
}

/// Greatest fixpoint of one-step simulation refinement between two
/// finite systems, as a row-major table over spoiler × duplicator
/// states. Callers pass weak-closed systems when they mean weak
/// simulation.
fn fs_strong_gfp(spoiler: &Net, dup: &Net) -> Vec<bool> {
    let ns = spoiler.states().len();
    let nd = dup.states().len();
    let map = label_map(spoiler, dup);
    let mut moves: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ns];
    for t in &spoiler.trans {
        moves[t.src.ix()].push((t.label.ix(), t.dst.ix()));
    }
    let ndl = dup.labels().len();
    let mut answers: Vec<Vec<usize>> = vec![Vec::new(); nd * ndl];
    for t in &dup.trans {
        answers[t.src.ix() * ndl + t.label.ix()].push(t.dst.ix());
    }
    let mut rel = vec![true; ns * nd];
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..ns {
            for y in 0..nd {
                if !rel[x * nd + y] {
                    continue;
                }
                let dead = moves[x].iter().any(|&(l, x2)| match map[l] {
                    Some(dl) => !answers[y * ndl + dl.ix()]
                        .iter()
                        .any(|&y2| rel[x2 * nd + y2]),
                    None => true,
                });
                if dead {
                    rel[x * nd + y] = false;
                    changed = true;
                }
            }
        }
    }
    rel
}

/// Does finite state `t` of `fs2` weakly simulate finite state `s` of
/// `fs1`? Both systems are weak-closed and the answer is the greatest
/// fixpoint of strong simulation refinement on the closures.
pub fn fs_weak_sim(fs1: &Net, s: StateId, fs2: &Net, t: StateId) -> Result<bool, FiniteError> {
    expect_kind(fs1, NetKind::Fs, "fs")?;
    expect_kind(fs2, NetKind::Fs, "fs")?;
    if s.ix() >= fs1.states().len() || t.ix() >= fs2.states().len() {
        return Err(FiniteError::BadPosition);
    }
    let a = weak_closure(fs1)?;
    let b = weak_closure(fs2)?;
    let rel = fs_strong_gfp(&a, &b);
    Ok(rel[s.ix() * fs2.states().len() + t.ix()])
}

/// Does net process `q(n)` weakly simulate finite state `p`? The
/// verdict only depends on the counter up to
/// `c = (2|Q|+1)·(|S|·|Q|+1)`: any winning answering strategy can be
/// normalised so that no round drops the counter by more than `2|Q|+1`
/// and no simple cycle of the pair graph (at most `|S|·|Q|` long)
/// decreases it, so everything above `c` behaves like `c`. The check
/// therefore runs [`fs_weak_sim`] against the `c`-capped net.
pub fn ocn_simulates_fs(
    net: &Net,
    q: StateId,
    n: u64,
    fs: &Net,
    p: StateId,
) -> Result<bool, FiniteError> {
    expect_kind(net, NetKind::Ocn, "ocn")?;
    expect_kind(fs, NetKind::Fs, "fs")?;
    if q.ix() >= net.states().len() || p.ix() >= fs.states().len() {
        return Err(FiniteError::BadPosition);
    }
    let nq = net.states().len() as u64;
    let ns = fs.states().len() as u64;
    let c = (2 * nq + 1) * (ns * nq + 1);
    let capped = capped_net(net, c)?;
    let start = capped.state(q, n).expect("state index was checked above");
    fs_weak_sim(fs, p, &capped.fs, start)
}

/// How far up the counter a finite state still simulates a net state.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Threshold {
    /// Not even counter value 0 is simulated.
    Absent,
    /// The largest simulated counter value.
    Finite(u64),
    /// Every counter value is simulated.
    Infinite,
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Absent => write!(f, "ABSENT"),
            Threshold::Finite(v) => write!(f, "{v}"),
            Threshold::Infinite => write!(f, "INF"),
        }
    }
}

/// For each pair of a net state `p` and a finite state `s`: the largest
/// counter `m` such that `s` simulates `p(m)`. Simulated counter values
/// are downward closed, so one threshold per pair tells the whole story.
#[derive(Clone, Debug)]
pub struct ThresholdTable {
    /// Finite thresholds never exceed this bound; fixpoint values that
    /// climb past it are provably infinite (repeating a state pair with
    /// a higher counter lets the answering side pump forever) and are
    /// stored as [`Threshold::Infinite`].
    pub cutoff: u64,
    fs_states: usize,
    vals: Vec<Threshold>,
}

impl ThresholdTable {
    pub fn get(&self, p: StateId, s: StateId) -> Threshold {
        self.vals[p.ix() * self.fs_states + s.ix()]
    }

    /// Is `p(m)` simulated by `s`?
    pub fn admits(&self, p: StateId, m: u64, s: StateId) -> bool {
        match self.get(p, s) {
            Threshold::Absent => false,
            Threshold::Finite(v) => m <= v,
            Threshold::Infinite => true,
        }
    }
}

/// Thresholds for strong simulation of `net` configurations by `fs`
/// states, computed as a Bellman-style fixpoint from the all-infinite
/// table: a pair's threshold is the minimum over net moves of "largest
/// counter from which this move is either not yet fireable or lands
/// within the best answer's threshold". Pass a weak-closed system (see
/// [`weak_closure`]) to decide weak simulation; [`fs_simulates_ocn`]
/// does exactly that.
pub fn threshold_table(fs: &Net, net: &Net) -> Result<ThresholdTable, FiniteError> {
    expect_kind(fs, NetKind::Fs, "fs")?;
    expect_kind(net, NetKind::Ocn, "ocn")?;
    let np = net.states().len();
    let ns = fs.states().len();
    let cutoff = np as u64 * ns as u64;
    let map = label_map(net, fs);
    let nl = fs.labels().len();
    let mut answers: Vec<Vec<usize>> = vec![Vec::new(); ns * nl];
    for t in &fs.trans {
        answers[t.src.ix() * nl + t.label.ix()].push(t.dst.ix());
    }
    // (least fireable counter, effect, answer label, target state)
    let mut moves: Vec<Vec<(i128, i128, Option<usize>, usize)>> = vec![Vec::new(); np];
    for t in &net.trans {
        let Effect::Fin(d) = t.effect else {
            return Err(FiniteError::Unbounded(net.name.clone()));
        };
        let fire = (t.guard as i128).max(-(d as i128));
        moves[t.src.ix()].push((fire, d as i128, map[t.label.ix()].map(|l| l.ix()), t.dst.ix()));
    }
    let mut vals = vec![Threshold::Infinite; np * ns];
    let mut changed = true;
    while changed {
        changed = false;
        for p in 0..np {
            for s in 0..ns {
                let mut new = Threshold::Infinite;
                for &(fire, d, dl, p2) in &moves[p] {
                    let mut best = Threshold::Absent;
                    if let Some(dl) = dl {
                        for &s2 in &answers[s * nl + dl] {
                            best = best.max(vals[p2 * ns + s2]);
                            if best == Threshold::Infinite {
                                break;
                            }
                        }
                    }
                    let bound = match best {
                        // answered at every counter: no constraint
                        Threshold::Infinite => continue,
                        // unanswerable: survives only while it cannot fire
                        Threshold::Absent => fire - 1,
                        // either too small to fire, or lands within the
                        // answer's own threshold
                        Threshold::Finite(b) => (fire - 1).max(b as i128 - d),
                    };
                    let bound = if bound < 0 {
                        Threshold::Absent
                    } else if bound as u64 > cutoff {
                        Threshold::Infinite
                    } else {
                        Threshold::Finite(bound as u64)
                    };
                    new = new.min(bound);
                }
                let slot = p * ns + s;
                if vals[slot] != new {
                    vals[slot] = new;
                    changed = true;
                }
            }
        }
    }
    Ok(ThresholdTable { cutoff, fs_states: ns, vals })
}

/// Does finite state `s` weakly simulate net process `p(m)`? Weak-closes
/// the finite system, computes the [`threshold_table`] against it and
/// compares `m` with the pair's threshold.
pub fn fs_simulates_ocn(
    fs: &Net,
    s: StateId,
    net: &Net,
    p: StateId,
    m: u64,
) -> Result<bool, FiniteError> {
    expect_kind(fs, NetKind::Fs, "fs")?;
    expect_kind(net, NetKind::Ocn, "ocn")?;
    if s.ix() >= fs.states().len() || p.ix() >= net.states().len() {
        return Err(FiniteError::BadPosition);
    }
    let closed = weak_closure(fs)?;
    let table = threshold_table(&closed, net)?;
    Ok(table.admits(p, m, s))
}
