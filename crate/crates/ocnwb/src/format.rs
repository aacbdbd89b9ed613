//! The line-based textual net format.
//!
//! ```text
//! # comment lines start with '#', blank lines are ignored
//! net <ocn|oca|omega|gomega|fs|wfa|rocn> <name>
//! states <s1> <s2> ...          # may repeat; order is significant
//! trans <src> <label> <delta> <dst>    # counter kinds; delta 'w' = ω (omega nets)
//! trans <src> <label> <dst>            # fs: no delta
//! trans <src> <symbol> <reward> <dst>  # wfa: non-negative reward
//! ztrans <src> <label> <0|1> <dst>     # oca only, fires at counter 0
//! gtrans <src> <label> <guard> <delta|w> <dst>   # gomega only
//! init <state>                          # wfa only
//! ```
//!
//! `tau` is the one silent label. Parsing is strict: unknown directives,
//! arity mismatches, undeclared states, deltas outside a kind's range and
//! duplicate declarations are all errors carrying a line number. One net
//! per file.
//!
//! State names containing `@` are reserved for generated nets (`@chain/`,
//! `@gadget/`, `@w/`, capped states `q@n`); the parser accepts them so
//! emitted artifacts round-trip, but the construction operations refuse
//! such names in their *inputs*.

use std::fmt::Write as _;

use thiserror::Error;

use crate::nets::{Effect, Net, NetKind, SILENT_LABEL};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub msg: String,
}

fn err<T>(line: u32, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

/// A parsed-but-unchecked net: endpoints by name, no kind invariants.
/// [`validate`] reports everything wrong with it; [`NetDraft::compile`]
/// interns a clean [`Net`].
#[derive(Clone, Debug, Default)]
pub struct NetDraft {
    pub kind: Option<NetKind>,
    pub name: String,
    pub states: Vec<(String, u32)>,
    pub trans: Vec<DraftTrans>,
    pub ztrans: Vec<DraftZTrans>,
    pub initial: Option<(String, u32)>,
}

#[derive(Clone, Debug)]
pub struct DraftTrans {
    pub src: String,
    pub label: String,
    pub guard: u64,
    pub effect: Effect,
    pub dst: String,
    pub line: u32,
}

#[derive(Clone, Debug)]
pub struct DraftZTrans {
    pub src: String,
    pub label: String,
    pub delta: u64,
    pub dst: String,
    pub line: u32,
}

/// One validation finding; `line` is 0 for drafts built programmatically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: u32,
    pub msg: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.msg)
        } else {
            f.write_str(&self.msg)
        }
    }
}

/// Syntax pass: tokenize and shape-check, no semantic checks.
pub fn parse_draft(text: &str) -> Result<NetDraft, ParseError> {
    let mut draft = NetDraft::default();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = (i + 1) as u32;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "net" => {
                if seen_header {
                    return err(lineno, "second 'net' header; one net per file");
                }
                if toks.len() != 3 {
                    return err(lineno, "expected 'net <kind> <name>'");
                }
                let kind = NetKind::from_tag(toks[1])
                    .ok_or_else(|| ParseError { line: lineno, msg: format!("unknown net kind '{}'", toks[1]) })?;
                draft.kind = Some(kind);
                draft.name = toks[2].to_string();
                seen_header = true;
            }
            "states" => {
                if !seen_header {
                    return err(lineno, "'states' before 'net' header");
                }
                for s in &toks[1..] {
                    draft.states.push((s.to_string(), lineno));
                }
            }
            "trans" => {
                if !seen_header {
                    return err(lineno, "'trans' before 'net' header");
                }
                let kind = draft.kind.unwrap();
                let (src, label, effect, dst) = match kind {
                    NetKind::Fs => {
                        if toks.len() != 4 {
                            return err(lineno, "expected 'trans <src> <label> <dst>' for fs");
                        }
                        (toks[1], toks[2], Effect::Fin(0), toks[3])
                    }
                    NetKind::Wfa => {
                        if toks.len() != 5 {
                            return err(lineno, "expected 'trans <src> <symbol> <reward> <dst>' for wfa");
                        }
                        let reward: u64 = toks[3].parse().map_err(|_| ParseError {
                            line: lineno,
                            msg: format!("bad reward '{}'", toks[3]),
                        })?;
                        (toks[1], toks[2], Effect::Fin(reward as i64), toks[4])
                    }
                    _ => {
                        if toks.len() != 5 {
                            return err(lineno, "expected 'trans <src> <label> <delta> <dst>'");
                        }
                        (toks[1], toks[2], parse_effect(toks[3], lineno)?, toks[4])
                    }
                };
                draft.trans.push(DraftTrans {
                    src: src.to_string(),
                    label: label.to_string(),
                    guard: 0,
                    effect,
                    dst: dst.to_string(),
                    line: lineno,
                });
            }
            "gtrans" => {
                if !seen_header {
                    return err(lineno, "'gtrans' before 'net' header");
                }
                if toks.len() != 6 {
                    return err(lineno, "expected 'gtrans <src> <label> <guard> <delta> <dst>'");
                }
                let guard: u64 = toks[3].parse().map_err(|_| ParseError {
                    line: lineno,
                    msg: format!("bad guard '{}'", toks[3]),
                })?;
                draft.trans.push(DraftTrans {
                    src: toks[1].to_string(),
                    label: toks[2].to_string(),
                    guard,
                    effect: parse_effect(toks[4], lineno)?,
                    dst: toks[5].to_string(),
                    line: lineno,
                });
            }
            "ztrans" => {
                if !seen_header {
                    return err(lineno, "'ztrans' before 'net' header");
                }
                if toks.len() != 5 {
                    return err(lineno, "expected 'ztrans <src> <label> <0|1> <dst>'");
                }
                let delta: u64 = toks[3].parse().map_err(|_| ParseError {
                    line: lineno,
                    msg: format!("bad zero-test delta '{}'", toks[3]),
                })?;
                draft.ztrans.push(DraftZTrans {
                    src: toks[1].to_string(),
                    label: toks[2].to_string(),
                    delta,
                    dst: toks[4].to_string(),
                    line: lineno,
                });
            }
            "init" => {
                if !seen_header {
                    return err(lineno, "'init' before 'net' header");
                }
                if toks.len() != 2 {
                    return err(lineno, "expected 'init <state>'");
                }
                if draft.initial.is_some() {
                    return err(lineno, "duplicate 'init'");
                }
                draft.initial = Some((toks[1].to_string(), lineno));
            }
            other => {
                return err(lineno, format!("unknown directive '{other}'"));
            }
        }
    }
    if !seen_header {
        return err(1, "missing 'net' header");
    }
    Ok(draft)
}

fn parse_effect(tok: &str, line: u32) -> Result<Effect, ParseError> {
    if tok == "w" {
        return Ok(Effect::Omega);
    }
    tok.parse::<i64>()
        .map(Effect::Fin)
        .map_err(|_| ParseError { line, msg: format!("bad delta '{tok}'") })
}

/// Semantic checks: duplicate/undeclared states, per-kind delta and guard
/// ranges, zero tests and `init` only where they belong. Empty result
/// means the draft compiles.
pub fn validate(draft: &NetDraft) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |line: u32, msg: String| out.push(Diagnostic { line, msg });
    let kind = match draft.kind {
        Some(k) => k,
        None => {
            return vec![Diagnostic { line: 0, msg: "missing net kind".into() }];
        }
    };

    let mut seen = std::collections::HashSet::new();
    for (s, line) in &draft.states {
        if !seen.insert(s.as_str()) {
            diag(*line, format!("duplicate state '{s}'"));
        }
    }
    if draft.states.is_empty() {
        diag(0, "empty state list".into());
    }

    let known = |s: &str| seen.contains(s);
    for t in &draft.trans {
        for endpoint in [&t.src, &t.dst] {
            if !known(endpoint) {
                diag(t.line, format!("unknown state '{endpoint}'"));
            }
        }
        if t.guard > 0 && kind != NetKind::GuardedOmega {
            diag(t.line, format!("guard not allowed for kind {kind}"));
        }
        match (kind, t.effect) {
            (NetKind::Ocn | NetKind::Oca, Effect::Fin(d)) if !(-1..=1).contains(&d) => {
                diag(t.line, format!("delta {d} out of range for kind {kind}"));
            }
            (NetKind::Ocn | NetKind::Oca | NetKind::RelaxedOcn | NetKind::Fs, Effect::Omega) => {
                diag(t.line, format!("omega delta not allowed for kind {kind}"));
            }
            (NetKind::OmegaNet, Effect::Fin(d)) if !(-1..=1).contains(&d) => {
                diag(t.line, format!("delta {d} out of range for kind {kind}"));
            }
            (NetKind::Wfa, Effect::Fin(d)) if d < 0 => {
                diag(t.line, format!("negative reward {d} not allowed for wfa"));
            }
            (NetKind::Wfa, Effect::Omega) => {
                diag(t.line, "omega delta not allowed for kind wfa".into());
            }
            _ => {}
        }
        if kind == NetKind::Wfa && t.label == SILENT_LABEL {
            diag(t.line, "silent label not allowed for kind wfa".into());
        }
    }

    for z in &draft.ztrans {
        if kind != NetKind::Oca {
            diag(z.line, format!("zero-test transition not allowed for kind {kind}"));
        }
        for endpoint in [&z.src, &z.dst] {
            if !known(endpoint) {
                diag(z.line, format!("unknown state '{endpoint}'"));
            }
        }
        if z.delta > 1 {
            diag(z.line, format!("zero-test delta must be 0 or 1, got {}", z.delta));
        }
    }

    match (&draft.initial, kind) {
        (Some((s, line)), NetKind::Wfa) => {
            if !known(s) {
                diag(*line, format!("unknown state '{s}'"));
            }
        }
        (Some((_, line)), _) => diag(*line, format!("init not allowed for kind {kind}")),
        (None, NetKind::Wfa) => diag(0, "missing init state for wfa".into()),
        (None, _) => {}
    }

    out
}

impl NetDraft {
    /// Validate and intern. The error is the full diagnostic list.
    pub fn compile(&self) -> Result<Net, Vec<Diagnostic>> {
        let diags = validate(self);
        if !diags.is_empty() {
            return Err(diags);
        }
        let mut net = Net::new(self.kind.unwrap(), self.name.clone());
        for (s, _) in &self.states {
            net.add_state(s.clone()).expect("validated");
        }
        for t in &self.trans {
            let src = net.state_id(&t.src).expect("validated");
            let dst = net.state_id(&t.dst).expect("validated");
            net.add_trans(src, &t.label, t.guard, t.effect, dst);
        }
        for z in &self.ztrans {
            let src = net.state_id(&z.src).expect("validated");
            let dst = net.state_id(&z.dst).expect("validated");
            net.add_ztrans(src, &z.label, z.delta, dst);
        }
        if let Some((s, _)) = &self.initial {
            net.initial = net.state_id(s);
        }
        Ok(net)
    }
}

/// Parse and validate in one go; the first diagnostic becomes the error.
pub fn parse_net(text: &str) -> Result<Net, ParseError> {
    let draft = parse_draft(text)?;
    draft.compile().map_err(|diags| {
        let d = &diags[0];
        ParseError { line: d.line, msg: d.msg.clone() }
    })
}

/// Serialize a net; inverse of [`parse_net`] up to comments and state-line
/// chunking. `header` lines are emitted as leading comments.
pub fn emit_net(net: &Net, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        writeln!(out, "# {h}").unwrap();
    }
    writeln!(out, "net {} {}", net.kind.tag(), net.name).unwrap();
    for chunk in net.states().chunks(16) {
        writeln!(out, "states {}", chunk.join(" ")).unwrap();
    }
    for t in &net.trans {
        let src = net.state_name(t.src);
        let dst = net.state_name(t.dst);
        let label = &net.label(t.label).text;
        match net.kind {
            NetKind::Fs => writeln!(out, "trans {src} {label} {dst}").unwrap(),
            NetKind::GuardedOmega => {
                writeln!(out, "gtrans {src} {label} {} {} {dst}", t.guard, t.effect).unwrap()
            }
            _ => writeln!(out, "trans {src} {label} {} {dst}", t.effect).unwrap(),
        }
    }
    for z in &net.ztrans {
        writeln!(
            out,
            "ztrans {} {} {} {}",
            net.state_name(z.src),
            net.label(z.label).text,
            z.delta,
            net.state_name(z.dst)
        )
        .unwrap();
    }
    if let Some(init) = net.initial {
        writeln!(out, "init {}", net.state_name(init)).unwrap();
    }
    out
}

/// Structural equality for round-trip checks: same kind, name, state
/// order, label text per transition, transition and zero-test lists,
/// initial state.
pub fn structurally_equal(a: &Net, b: &Net) -> bool {
    if a.kind != b.kind || a.name != b.name || a.states() != b.states() {
        return false;
    }
    if a.trans.len() != b.trans.len() || a.ztrans.len() != b.ztrans.len() {
        return false;
    }
    for (x, y) in a.trans.iter().zip(&b.trans) {
        if x.src != y.src
            || x.dst != y.dst
            || x.guard != y.guard
            || x.effect != y.effect
            || a.label(x.label).text != b.label(y.label).text
        {
            return false;
        }
    }
    for (x, y) in a.ztrans.iter().zip(&b.ztrans) {
        if x.src != y.src
            || x.dst != y.dst
            || x.delta != y.delta
            || a.label(x.label).text != b.label(y.label).text
        {
            return false;
        }
    }
    match (a.initial, b.initial) {
        (None, None) => true,
        (Some(x), Some(y)) => a.state_name(x) == b.state_name(y),
        _ => false,
    }
}
