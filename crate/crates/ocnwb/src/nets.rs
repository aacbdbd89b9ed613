//! Core net models: one-counter nets/automata, ω-nets, guarded ω-nets,
//! finite systems and weighted automata, plus configurations, steps and
//! finite paths over them.
//!
//! All kinds share one backing struct ([`Net`]) tagged with a [`NetKind`].
//! Operations that only make sense for some kinds check the tag and error
//! out otherwise. States and labels are interned strings kept in
//! declaration order; every construction and the emitter preserve that
//! order, so repeated runs produce byte-identical artifacts.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// The only silent action name. Every other label is visible.
pub const SILENT_LABEL: &str = "tau";

/// Model kind tag. The textual format spells these exactly as the
/// `Display` impl prints them.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum NetKind {
    /// One-counter net: unit deltas, no zero tests.
    Ocn,
    /// One-counter automaton: OCN plus zero-test transitions.
    Oca,
    /// ω-net: deltas in {-1,0,+1,ω}.
    OmegaNet,
    /// Guarded ω-net: transitions carry a guard and an integer or ω delta.
    GuardedOmega,
    /// Finite labelled transition system (no counter).
    Fs,
    /// Weighted finite automaton: non-negative rewards, initial state.
    Wfa,
    /// Relaxed one-counter net: arbitrary integer deltas, no zero tests.
    /// Produced by the weighted-automaton encoding; not accepted by the
    /// game solvers.
    RelaxedOcn,
}

impl NetKind {
    pub fn tag(self) -> &'static str {
        match self {
            NetKind::Ocn => "ocn",
            NetKind::Oca => "oca",
            NetKind::OmegaNet => "omega",
            NetKind::GuardedOmega => "gomega",
            NetKind::Fs => "fs",
            NetKind::Wfa => "wfa",
            NetKind::RelaxedOcn => "rocn",
        }
    }

    pub fn from_tag(tag: &str) -> Option<NetKind> {
        Some(match tag {
            "ocn" => NetKind::Ocn,
            "oca" => NetKind::Oca,
            "omega" => NetKind::OmegaNet,
            "gomega" => NetKind::GuardedOmega,
            "fs" => NetKind::Fs,
            "wfa" => NetKind::Wfa,
            "rocn" => NetKind::RelaxedOcn,
            _ => return None,
        })
    }

    /// Does this kind track a counter at all?
    pub fn has_counter(self) -> bool {
        !matches!(self, NetKind::Fs | NetKind::Wfa)
    }
}

impl fmt::Display for NetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LabelId(pub u32);

impl StateId {
    #[inline]
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

impl LabelId {
    #[inline]
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

/// An action label. Silence is determined by the name: exactly
/// [`SILENT_LABEL`] is silent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Label {
    pub text: String,
}

impl Label {
    pub fn new(text: impl Into<String>) -> Label {
        Label { text: text.into() }
    }

    pub fn is_silent(&self) -> bool {
        self.text == SILENT_LABEL
    }
}

/// Counter delta of a transition: a finite integer or ω ("any increase").
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Effect {
    Fin(i64),
    Omega,
}

impl Effect {
    pub fn is_omega(self) -> bool {
        matches!(self, Effect::Omega)
    }

    pub fn fin(self) -> Option<i64> {
        match self {
            Effect::Fin(d) => Some(d),
            Effect::Omega => None,
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::Fin(d) => write!(f, "{d}"),
            Effect::Omega => f.write_str("w"),
        }
    }
}

/// A transition. `guard` is only meaningful for guarded ω-nets (0
/// elsewhere); for weighted automata `effect` holds the reward.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trans {
    pub src: StateId,
    pub label: LabelId,
    pub guard: u64,
    pub effect: Effect,
    pub dst: StateId,
}

/// A zero-test transition of a one-counter automaton: enabled only at
/// counter 0, sets the counter to `delta` (0 or 1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZTrans {
    pub src: StateId,
    pub label: LabelId,
    pub delta: u64,
    pub dst: StateId,
}

/// A process: control state plus counter value. For finite systems the
/// counter is carried along but never read or written (0 by convention).
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Configuration {
    pub state: StateId,
    pub counter: u64,
}

impl Configuration {
    pub fn new(state: StateId, counter: u64) -> Configuration {
        Configuration { state, counter }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("duplicate state '{0}'")]
    DuplicateState(String),
    #[error("unknown state '{0}'")]
    UnknownState(String),
    #[error("operation requires kind {expected}, got {got}")]
    WrongKind { expected: &'static str, got: NetKind },
    #[error("successors are undefined for weighted automata")]
    NoSuccessors,
    #[error("path step {step} does not start where the previous one ended")]
    BrokenPath { step: usize },
    #[error("path step {step} is out of range")]
    PathStepRange { step: usize },
}

/// A well-formed net. Construct via [`Net::new`] plus the `add_*`
/// methods, or by compiling a parsed [`NetDraft`](crate::format::NetDraft).
#[derive(Clone, Debug)]
pub struct Net {
    pub name: String,
    pub kind: NetKind,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    labels: Vec<Label>,
    label_index: HashMap<String, LabelId>,
    pub trans: Vec<Trans>,
    pub ztrans: Vec<ZTrans>,
    pub initial: Option<StateId>,
}

impl Net {
    pub fn new(kind: NetKind, name: impl Into<String>) -> Net {
        Net {
            name: name.into(),
            kind,
            states: Vec::new(),
            state_index: HashMap::new(),
            labels: Vec::new(),
            label_index: HashMap::new(),
            trans: Vec::new(),
            ztrans: Vec::new(),
            initial: None,
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.ix()]
    }

    pub fn label(&self, l: LabelId) -> &Label {
        &self.labels[l.ix()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn label_id(&self, text: &str) -> Option<LabelId> {
        self.label_index.get(text).copied()
    }

    pub fn silent_label(&self) -> Option<LabelId> {
        self.label_id(SILENT_LABEL)
    }

    /// Declare a new state. Errors on duplicates.
    pub fn add_state(&mut self, name: impl Into<String>) -> Result<StateId, NetError> {
        let name = name.into();
        if self.state_index.contains_key(&name) {
            return Err(NetError::DuplicateState(name));
        }
        let id = StateId(self.states.len() as u32);
        self.state_index.insert(name.clone(), id);
        self.states.push(name);
        Ok(id)
    }

    /// Declaration-order-preserving get-or-add.
    pub fn state_or_add(&mut self, name: &str) -> StateId {
        match self.state_id(name) {
            Some(id) => id,
            None => self.add_state(name).expect("not present"),
        }
    }

    pub fn intern_label(&mut self, text: &str) -> LabelId {
        match self.label_id(text) {
            Some(id) => id,
            None => {
                let id = LabelId(self.labels.len() as u32);
                self.label_index.insert(text.to_string(), id);
                self.labels.push(Label::new(text));
                id
            }
        }
    }

    pub fn add_trans(&mut self, src: StateId, label: &str, guard: u64, effect: Effect, dst: StateId) {
        let label = self.intern_label(label);
        self.trans.push(Trans { src, label, guard, effect, dst });
    }

    pub fn add_ztrans(&mut self, src: StateId, label: &str, delta: u64, dst: StateId) {
        let label = self.intern_label(label);
        self.ztrans.push(ZTrans { src, label, delta, dst });
    }

    /// Transitions leaving `s`, in declaration order.
    pub fn trans_from(&self, s: StateId) -> impl Iterator<Item = (usize, &Trans)> {
        self.trans.iter().enumerate().filter(move |(_, t)| t.src == s)
    }

    /// Does any state name contain the reserved marker `@`? Constructions
    /// that invent fresh `@`-prefixed names refuse such inputs to keep
    /// their state maps injective.
    pub fn uses_reserved_names(&self) -> bool {
        self.states.iter().any(|s| s.contains('@'))
    }

    fn expect_kind(&self, ok: &[NetKind], expected: &'static str) -> Result<(), NetError> {
        if ok.contains(&self.kind) {
            Ok(())
        } else {
            Err(NetError::WrongKind { expected, got: self.kind })
        }
    }

    /// All single steps from `cfg`. ω-transitions come back as
    /// [`Step::Unbounded`]; everything else is concrete. Order follows
    /// transition declaration order (zero tests after plain transitions).
    pub fn successors(&self, cfg: Configuration) -> Result<Vec<Step>, NetError> {
        if self.kind == NetKind::Wfa {
            return Err(NetError::NoSuccessors);
        }
        if cfg.state.ix() >= self.states.len() {
            return Err(NetError::UnknownState(format!("#{}", cfg.state.0)));
        }
        let m = cfg.counter;
        let mut out = Vec::new();
        for t in &self.trans {
            if t.src != cfg.state {
                continue;
            }
            if self.kind == NetKind::Fs {
                out.push(Step::Concrete {
                    label: t.label,
                    to: Configuration::new(t.dst, cfg.counter),
                });
                continue;
            }
            if m < t.guard {
                continue;
            }
            match t.effect {
                Effect::Fin(d) => {
                    let n = m as i64 + d;
                    if n >= 0 {
                        out.push(Step::Concrete {
                            label: t.label,
                            to: Configuration::new(t.dst, n as u64),
                        });
                    }
                }
                Effect::Omega => out.push(Step::Unbounded {
                    label: t.label,
                    state: t.dst,
                    above: m,
                }),
            }
        }
        if self.kind == NetKind::Oca && m == 0 {
            for t in &self.ztrans {
                if t.src == cfg.state {
                    out.push(Step::Concrete {
                        label: t.label,
                        to: Configuration::new(t.dst, t.delta),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Like [`Net::successors`] but with ω-steps concretized to every
    /// target counter value `above < n' <= cap`.
    pub fn bounded_successors(
        &self,
        cfg: Configuration,
        cap: u64,
    ) -> Result<Vec<(LabelId, Configuration)>, NetError> {
        let mut out = Vec::new();
        for step in self.successors(cfg)? {
            match step {
                Step::Concrete { label, to } => out.push((label, to)),
                Step::Unbounded { label, state, above } => {
                    let mut n = above + 1;
                    while n <= cap {
                        out.push((label, Configuration::new(state, n)));
                        n += 1;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Weak steps from `cfg`, exhaustively enumerated with all counter
    /// values capped at `cap`: for every visible label `a` all targets of
    /// `τ* a τ*` paths, plus the `τ*` targets (including `cfg` itself)
    /// reported with label `None`. Intended for oracles and small nets.
    pub fn weak_successors_bounded(
        &self,
        cfg: Configuration,
        cap: u64,
    ) -> Result<Vec<(Option<LabelId>, Configuration)>, NetError> {
        let silent_set = self.silent_closure_bounded(&[cfg], cap)?;
        let mut seen = std::collections::HashSet::new();
        let mut out: Vec<(Option<LabelId>, Configuration)> = Vec::new();
        for &c in &silent_set {
            if seen.insert((None, c)) {
                out.push((None, c));
            }
        }
        // one visible step out of the pre-closure, then post-closure
        for &c in &silent_set {
            for (label, mid) in self.bounded_successors(c, cap)? {
                if self.label(label).is_silent() || mid.counter > cap {
                    continue;
                }
                for c2 in self.silent_closure_bounded(&[mid], cap)? {
                    if seen.insert((Some(label), c2)) {
                        out.push((Some(label), c2));
                    }
                }
            }
        }
        out.sort_by_key(|(l, c)| (l.map(|l| l.0), c.state.0, c.counter));
        Ok(out)
    }

    /// All configurations reachable from `seeds` via silent steps with
    /// every intermediate counter `<= cap`, including the seeds.
    pub fn silent_closure_bounded(
        &self,
        seeds: &[Configuration],
        cap: u64,
    ) -> Result<Vec<Configuration>, NetError> {
        let mut seen: std::collections::HashSet<Configuration> = seeds.iter().copied().collect();
        let mut queue: Vec<Configuration> = seeds.to_vec();
        while let Some(c) = queue.pop() {
            for (label, to) in self.bounded_successors(c, cap)? {
                if !self.label(label).is_silent() || to.counter > cap {
                    continue;
                }
                if seen.insert(to) {
                    queue.push(to);
                }
            }
        }
        let mut v: Vec<Configuration> = seen.into_iter().collect();
        v.sort();
        Ok(v)
    }

    /// Check that a path's steps exist and chain up.
    pub fn path_is_valid(&self, path: &Path) -> Result<(), NetError> {
        let mut prev_dst: Option<StateId> = None;
        for (i, &ti) in path.steps.iter().enumerate() {
            let t = self.trans.get(ti).ok_or(NetError::PathStepRange { step: i })?;
            if let Some(d) = prev_dst {
                if t.src != d {
                    return Err(NetError::BrokenPath { step: i });
                }
            }
            prev_dst = Some(t.dst);
        }
        Ok(())
    }

    /// Summed effect of a path; ω absorbs everything after it.
    pub fn path_effect(&self, path: &Path) -> Effect {
        let mut sum = 0i64;
        for &ti in &path.steps {
            match self.trans[ti].effect {
                Effect::Fin(d) => sum += d,
                Effect::Omega => return Effect::Omega,
            }
        }
        Effect::Fin(sum)
    }

    /// Guard of a path: the least counter value sufficient to traverse it,
    /// i.e. `-min` over the effects of all prefixes (the empty prefix
    /// included, so the guard is never negative). Prefixes whose effect is
    /// already ω cannot be the minimum and are skipped.
    pub fn path_guard(&self, path: &Path) -> u64 {
        let mut running = 0i64;
        let mut min = 0i64;
        for &ti in &path.steps {
            match self.trans[ti].effect {
                Effect::Fin(d) => {
                    running += d;
                    min = min.min(running);
                }
                Effect::Omega => break,
            }
        }
        (-min) as u64
    }

    /// Visible labels along a path, in order.
    pub fn path_obs(&self, path: &Path) -> Vec<LabelId> {
        path.steps
            .iter()
            .map(|&ti| self.trans[ti].label)
            .filter(|&l| !self.label(l).is_silent())
            .collect()
    }

    /// Embed a finite system as a one-counter net with all deltas 0.
    /// Behaviour-preserving: the counter never changes or blocks.
    pub fn fs_as_ocn(&self) -> Result<Net, NetError> {
        self.expect_kind(&[NetKind::Fs], "fs")?;
        let mut n = Net::new(NetKind::Ocn, self.name.clone());
        self.copy_shape_into(&mut n);
        Ok(n)
    }

    /// Reinterpret a one-counter net as an ω-net without ω-transitions.
    pub fn ocn_as_omega(&self) -> Result<Net, NetError> {
        self.expect_kind(&[NetKind::Ocn], "ocn")?;
        let mut n = Net::new(NetKind::OmegaNet, self.name.clone());
        self.copy_shape_into(&mut n);
        Ok(n)
    }

    /// Reinterpret a one-counter net as an automaton without zero tests.
    pub fn ocn_as_oca(&self) -> Result<Net, NetError> {
        self.expect_kind(&[NetKind::Ocn], "ocn")?;
        let mut n = Net::new(NetKind::Oca, self.name.clone());
        self.copy_shape_into(&mut n);
        Ok(n)
    }

    fn copy_shape_into(&self, out: &mut Net) {
        for s in &self.states {
            out.add_state(s.clone()).expect("source states unique");
        }
        for l in &self.labels {
            out.intern_label(&l.text);
        }
        for t in &self.trans {
            out.trans.push(t.clone());
        }
        out.initial = self.initial;
    }
}

/// One step out of a configuration.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Step {
    Concrete { label: LabelId, to: Configuration },
    /// An ω-transition: any counter value strictly above `above` is a
    /// legal target.
    Unbounded { label: LabelId, state: StateId, above: u64 },
}

impl Step {
    pub fn label(&self) -> LabelId {
        match *self {
            Step::Concrete { label, .. } => label,
            Step::Unbounded { label, .. } => label,
        }
    }
}

/// A finite path: indices into [`Net::trans`]. Validity (steps chain up)
/// is checked by [`Net::path_is_valid`], not by construction.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Path {
    pub steps: Vec<usize>,
}

impl Path {
    pub fn new(steps: Vec<usize>) -> Path {
        Path { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}
