//! Command-line driver for the one-counter-net workbench.
//!
//! Four verb families plus a generator:
//!
//! * `check` — decision pipelines with exit codes for scripting:
//!   0 = simulates / included, 1 = refuted, 2 = undecided within
//!   budgets, 3 = rank precondition failed, 64 = usage or parse
//!   trouble, 65 = a named state is missing.
//! * `build` — constructions emitted in the standard net format,
//!   byte-deterministic so outputs can be golden-tested and re-parsed.
//! * `solve` — the ordinal rank solver and approximant grids.
//! * `oracle` — exhaustive desk-scale baselines (bounded game, bounded
//!   trace enumeration) for cross-checking the pipelines.
//! * `gen` — seeded random nets for reproducible corpora.
//!
//! `--machine` switches reports to the stable line-oriented key=value
//! form; human output may be colored when `OCNWB_COLOR=1`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use ocnwb::corpus::{random_fs, random_ocn, random_omega_net, CorpusParams};
use ocnwb::finite::{capped_net, fs_simulates_ocn, ocn_simulates_fs, weak_closure};
use ocnwb::format::{emit_net, parse_net};
use ocnwb::games::brute::{duplicator_survives, generous_cap, GameMode};
use ocnwb::games::check::{strong_sim_check, weak_sim_check};
use ocnwb::games::rank::rank_solver;
use ocnwb::games::approximant::{approximant_finite, approximant_two_dim};
use ocnwb::games::{GameError, Verdict};
use ocnwb::nets::{Configuration, Net, StateId};
use ocnwb::reduction::{build_step_nets, compute_m_table, normalize, weak_to_strong};
use ocnwb::traces::{oca_subset_fs, traces_bounded, wfa_to_ocn, InclusionVerdict};

#[derive(Parser)]
#[command(name = "ocnwb", version, about = "Simulation and trace workbench for one-counter nets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide simulation and trace-inclusion questions
    #[command(subcommand)]
    Check(CheckCmd),
    /// Emit derived nets in the standard text format
    #[command(subcommand)]
    Build(BuildCmd),
    /// Ordinal ranks and approximant threshold grids
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Exhaustive desk-scale baselines
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Generate a seeded random net on stdout
    Gen(GenArgs),
}

#[derive(Args)]
struct Budgets {
    /// Rounds to search for a finite-level refutation
    #[arg(long, default_value_t = 64)]
    alpha_max: u32,
    /// Counter cap for certification (and Spoiler-counter promise)
    #[arg(long, default_value_t = 64)]
    cap: u64,
}

#[derive(Args)]
struct OutMode {
    /// Print the stable one-line machine form
    #[arg(long)]
    machine: bool,
}

#[derive(Args)]
struct SimArgs {
    /// Spoiler net file
    file1: PathBuf,
    /// Spoiler state name
    p: String,
    /// Spoiler counter
    m: u64,
    /// Duplicator net file
    file2: PathBuf,
    /// Duplicator state name
    q: String,
    /// Duplicator counter
    n: u64,
    #[command(flatten)]
    budgets: Budgets,
    #[command(flatten)]
    out: OutMode,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Weak simulation between two one-counter nets
    WeakSim(SimArgs),
    /// Strong simulation; the Duplicator side may be an ω-net
    StrongSim(SimArgs),
    /// Does a finite-system state weakly simulate a net configuration?
    FsSim {
        /// Finite-system net file
        fs_file: PathBuf,
        /// Finite-system state name
        s: String,
        /// One-counter net file
        ocn_file: PathBuf,
        /// Net state name
        p: String,
        /// Net counter
        m: u64,
        #[command(flatten)]
        out: OutMode,
    },
    /// Does a net configuration weakly simulate a finite-system state?
    OcnSim {
        /// One-counter net file
        ocn_file: PathBuf,
        /// Net state name
        q: String,
        /// Net counter
        n: u64,
        /// Finite-system net file
        fs_file: PathBuf,
        /// Finite-system state name
        p: String,
        #[command(flatten)]
        out: OutMode,
    },
    /// Are the traces of an automaton covered by a finite system's?
    TraceIncl {
        /// One-counter automaton (or net) file
        a_file: PathBuf,
        /// Automaton state name
        p: String,
        /// Automaton counter
        m: u64,
        /// Finite-system net file
        b_file: PathBuf,
        /// Finite-system state name
        q: String,
        /// Compare weak traces (close the right side, hide left τ)
        #[arg(long)]
        weak: bool,
        /// Abort after expanding this many product configurations
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        out: OutMode,
    },
}

#[derive(Subcommand)]
enum BuildCmd {
    /// Stretch a weak-simulation pair into an equivalent strong pair
    Reduce {
        /// Spoiler one-counter net file
        m_file: PathBuf,
        /// Duplicator one-counter net file
        n_file: PathBuf,
        /// Directory for spoiler.net and dup.net
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Rebuild an (OCN, guarded ω-net) pair with unit unguarded steps
    Normalize {
        /// Spoiler one-counter net file
        m_file: PathBuf,
        /// Guarded ω-net file
        g_file: PathBuf,
        /// Directory for spoiler.net and dup.net
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Saturate a net's counter at a bound, yielding a finite system
    Cap {
        /// One-counter net file
        file: PathBuf,
        /// Saturation bound
        #[arg(long, default_value_t = 64)]
        cap: u64,
    },
    /// Weak closure of a finite system
    Closure {
        /// Finite-system net file
        file: PathBuf,
    },
    /// Encode a weighted automaton as a relaxed one-counter net
    WfaEncode {
        /// Weighted automaton file
        file: PathBuf,
    },
    /// Replace ω-moves by counter-test gadgets via a threshold table
    StepNets {
        /// One-counter net file (Spoiler)
        n_file: PathBuf,
        /// ω-net file (Duplicator)
        nprime_file: PathBuf,
        /// Approximant level for the threshold table (--alpha-max) and
        /// Spoiler-counter search bound (--cap)
        #[command(flatten)]
        budgets: Budgets,
        /// Directory for spoiler.net and dup.net
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum SolveCmd {
    /// Least refuting approximant level as an ordinal below ω²
    Rank {
        /// Spoiler net file (counter must stay below --cap)
        file1: PathBuf,
        /// Spoiler state name
        p: String,
        /// Spoiler counter
        m: u64,
        /// Duplicator net file
        file2: PathBuf,
        /// Duplicator state name
        q: String,
        /// Duplicator counter
        n: u64,
        /// Budget of ω answers (unlimited when omitted)
        #[arg(long)]
        beta: Option<u32>,
        /// Promised bound on reachable Spoiler counters
        #[arg(long, default_value_t = 64)]
        cap: u64,
        #[command(flatten)]
        out: OutMode,
    },
    /// Threshold grid after --alpha-max rounds (ω-budgeted with --beta)
    Approximant {
        /// Spoiler net file
        file1: PathBuf,
        /// Duplicator net file
        file2: PathBuf,
        /// Budget of ω answers (unlimited when omitted)
        #[arg(long)]
        beta: Option<u32>,
        /// Rounds (--alpha-max) and Spoiler counter window (--cap)
        #[command(flatten)]
        budgets: Budgets,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Weak,
    Strong,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Play the bounded brute-force simulation game
    Game {
        /// Spoiler net file
        file1: PathBuf,
        /// Spoiler state name
        p: String,
        /// Spoiler counter
        m: u64,
        /// Duplicator net file
        file2: PathBuf,
        /// Duplicator state name
        q: String,
        /// Duplicator counter
        n: u64,
        /// Which game to play
        #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
        mode: ModeArg,
        /// Number of rounds Duplicator must survive
        #[arg(long, default_value_t = 6)]
        rounds: u32,
        /// Counter ceiling (a generous sound default when omitted)
        #[arg(long)]
        ceiling: Option<u64>,
        #[command(flatten)]
        out: OutMode,
    },
    /// Enumerate every trace up to a length bound
    Traces {
        /// Net file (ocn, oca, rocn, or fs)
        file: PathBuf,
        /// State name
        p: String,
        /// Counter
        m: u64,
        /// Word-length bound
        #[arg(long, default_value_t = 4)]
        max_len: u64,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum GenKind {
    Ocn,
    Omega,
    Fs,
}

#[derive(Args)]
struct GenArgs {
    /// Which family to draw from
    #[arg(value_enum)]
    kind: GenKind,
    /// RNG seed; equal seeds give byte-identical nets
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of control states
    #[arg(long, default_value_t = 3)]
    states: usize,
    /// Number of transitions
    #[arg(long, default_value_t = 5)]
    transitions: usize,
    /// Fraction of ω effects (omega family only)
    #[arg(long, default_value_t = 0.25)]
    omega_share: f64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("{path}: no state named `{name}`")]
    UnknownState { path: String, name: String },
    #[error("{0}")]
    Precondition(String),
    #[error("rank solver not applicable: {0}")]
    RankInapplicable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownState { .. } => 65,
            CliError::RankInapplicable(_) => 3,
            _ => 64,
        }
    }
}

fn pre<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Precondition(e.to_string())
}

fn load(path: &Path) -> Result<Net, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_net(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn state(net: &Net, path: &Path, name: &str) -> Result<StateId, CliError> {
    net.state_id(name).ok_or_else(|| CliError::UnknownState {
        path: path.display().to_string(),
        name: name.to_string(),
    })
}

/// Colors `word` when OCNWB_COLOR=1; machine output never goes through
/// here, so its bytes stay frozen.
fn paint(word: &str, code: u32) -> String {
    if std::env::var("OCNWB_COLOR").as_deref() == Ok("1") {
        format!("\x1b[{code}m{word}\x1b[0m")
    } else {
        word.to_string()
    }
}

fn report_verdict(v: &Verdict, machine: bool) -> i32 {
    if machine {
        println!("{}", v.render_machine());
    } else {
        match v {
            Verdict::Simulates { cap } => {
                println!("{}: certified within counter cap {cap}", paint("simulates", 32));
            }
            Verdict::NotSimulates { rank, witness } => {
                println!("{}: refuted at level {rank}", paint("not-simulates", 31));
                if let Some(w) = witness {
                    print!("{}", w.render());
                }
            }
            Verdict::Unknown { alpha_max, cap } => {
                println!(
                    "{}: budgets exhausted (alpha-max {alpha_max}, cap {cap})",
                    paint("unknown", 33)
                );
            }
        }
    }
    match v {
        Verdict::Simulates { .. } => 0,
        Verdict::NotSimulates { .. } => 1,
        Verdict::Unknown { .. } => 2,
    }
}

fn report_bool(yes: bool, machine: bool) -> i32 {
    if machine {
        println!("VERDICT {}", if yes { "simulates" } else { "not-simulates" });
    } else if yes {
        println!("{}", paint("simulates", 32));
    } else {
        println!("{}", paint("not-simulates", 31));
    }
    if yes {
        0
    } else {
        1
    }
}

fn report_inclusion(v: &InclusionVerdict, machine: bool) -> i32 {
    if machine {
        println!("{}", v.render_machine());
    } else {
        match v {
            InclusionVerdict::Included { bound } => {
                println!("{}: search exhausted below bound {bound}", paint("included", 32));
            }
            InclusionVerdict::Counterexample { word } => {
                println!(
                    "{}: separating word `{}`",
                    paint("not-included", 31),
                    word.join(" ")
                );
            }
            InclusionVerdict::BudgetExceeded => {
                println!("{}: step budget ran out", paint("undecided", 33));
            }
        }
    }
    match v {
        InclusionVerdict::Included { .. } => 0,
        InclusionVerdict::Counterexample { .. } => 1,
        InclusionVerdict::BudgetExceeded => 2,
    }
}

fn write_pair(out_dir: &Path, spoiler: &Net, dup: &Net, header: &[String]) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)?;
    for (name, net) in [("spoiler.net", spoiler), ("dup.net", dup)] {
        let path = out_dir.join(name);
        fs::write(&path, emit_net(net, header))?;
        println!("WROTE {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Check(c) => run_check(c),
        Cmd::Build(b) => run_build(b),
        Cmd::Solve(s) => run_solve(s),
        Cmd::Oracle(o) => run_oracle(o),
        Cmd::Gen(g) => run_gen(g),
    }
}

fn run_check(cmd: CheckCmd) -> Result<i32, CliError> {
    match cmd {
        CheckCmd::WeakSim(a) => {
            let m = load(&a.file1)?;
            let n = load(&a.file2)?;
            let pm = Configuration::new(state(&m, &a.file1, &a.p)?, a.m);
            let qn = Configuration::new(state(&n, &a.file2, &a.q)?, a.n);
            let v = weak_sim_check(&m, pm, &n, qn, a.budgets.alpha_max, a.budgets.cap)
                .map_err(pre)?;
            Ok(report_verdict(&v, a.out.machine))
        }
        CheckCmd::StrongSim(a) => {
            let s = load(&a.file1)?;
            let d = load(&a.file2)?;
            let s0 = Configuration::new(state(&s, &a.file1, &a.p)?, a.m);
            let d0 = Configuration::new(state(&d, &a.file2, &a.q)?, a.n);
            let v = strong_sim_check(&s, s0, &d, d0, a.budgets.alpha_max, a.budgets.cap)
                .map_err(pre)?;
            Ok(report_verdict(&v, a.out.machine))
        }
        CheckCmd::FsSim { fs_file, s, ocn_file, p, m, out } => {
            let fs = load(&fs_file)?;
            let net = load(&ocn_file)?;
            let sid = state(&fs, &fs_file, &s)?;
            let pid = state(&net, &ocn_file, &p)?;
            let yes = fs_simulates_ocn(&fs, sid, &net, pid, m).map_err(pre)?;
            Ok(report_bool(yes, out.machine))
        }
        CheckCmd::OcnSim { ocn_file, q, n, fs_file, p, out } => {
            let net = load(&ocn_file)?;
            let fs = load(&fs_file)?;
            let qid = state(&net, &ocn_file, &q)?;
            let pid = state(&fs, &fs_file, &p)?;
            let yes = ocn_simulates_fs(&net, qid, n, &fs, pid).map_err(pre)?;
            Ok(report_bool(yes, out.machine))
        }
        CheckCmd::TraceIncl { a_file, p, m, b_file, q, weak, budget, out } => {
            let a = load(&a_file)?;
            let b = load(&b_file)?;
            let pm = Configuration::new(state(&a, &a_file, &p)?, m);
            let qid = state(&b, &b_file, &q)?;
            let v = oca_subset_fs(&a, pm, &b, qid, weak, budget).map_err(pre)?;
            Ok(report_inclusion(&v, out.machine))
        }
    }
}

fn run_build(cmd: BuildCmd) -> Result<i32, CliError> {
    match cmd {
        BuildCmd::Reduce { m_file, n_file, out_dir } => {
            let m = load(&m_file)?;
            let n = load(&n_file)?;
            let out = weak_to_strong(&m, &n).map_err(pre)?;
            let header = vec![format!(
                "k={} gamma={} delta={}",
                out.k, out.gamma, out.delta
            )];
            write_pair(&out_dir, &out.spoiler, &out.dup, &header)?;
            println!("ROUNDS k={} gamma={} delta={}", out.k, out.gamma, out.delta);
            Ok(0)
        }
        BuildCmd::Normalize { m_file, g_file, out_dir } => {
            let m = load(&m_file)?;
            let g = load(&g_file)?;
            let out = normalize(&m, &g).map_err(pre)?;
            let header = vec![format!(
                "k={} gamma={} delta={}",
                out.k, out.gamma, out.delta
            )];
            write_pair(&out_dir, &out.spoiler, &out.dup, &header)?;
            println!("ROUNDS k={} gamma={} delta={}", out.k, out.gamma, out.delta);
            Ok(0)
        }
        BuildCmd::Cap { file, cap } => {
            let net = load(&file)?;
            let capped = capped_net(&net, cap).map_err(pre)?;
            print!("{}", emit_net(&capped.fs, &[format!("cap={cap}")]));
            Ok(0)
        }
        BuildCmd::Closure { file } => {
            let net = load(&file)?;
            let closed = weak_closure(&net).map_err(pre)?;
            print!("{}", emit_net(&closed, &[]));
            Ok(0)
        }
        BuildCmd::WfaEncode { file } => {
            let net = load(&file)?;
            let (enc, start) = wfa_to_ocn(&net).map_err(pre)?;
            let header = vec![format!(
                "start {} {}",
                enc.state_name(start.state),
                start.counter
            )];
            print!("{}", emit_net(&enc, &header));
            Ok(0)
        }
        BuildCmd::StepNets { n_file, nprime_file, budgets, out_dir } => {
            let n = load(&n_file)?;
            let nprime = load(&nprime_file)?;
            let mtab = compute_m_table(&n, &nprime, budgets.alpha_max, budgets.cap)
                .map_err(pre)?;
            let (s, d) = build_step_nets(&n, &nprime, &mtab).map_err(pre)?;
            let header = vec![format!(
                "level={} search-bound={}",
                budgets.alpha_max, budgets.cap
            )];
            write_pair(&out_dir, &s, &d, &header)?;
            print!("{}", mtab.render());
            Ok(0)
        }
    }
}

fn run_solve(cmd: SolveCmd) -> Result<i32, CliError> {
    match cmd {
        SolveCmd::Rank { file1, p, m, file2, q, n, beta, cap, out } => {
            let s = load(&file1)?;
            let d = load(&file2)?;
            let s0 = Configuration::new(state(&s, &file1, &p)?, m);
            let d0 = Configuration::new(state(&d, &file2, &q)?, n);
            let rank = rank_solver(&s, s0, &d, d0, beta, cap).map_err(|e| match e {
                GameError::Inapplicable(msg) => CliError::RankInapplicable(msg),
                other => pre(other),
            })?;
            if out.machine {
                println!("RANK value={rank}");
            } else {
                println!("least refuting approximant level: {rank}");
            }
            Ok(0)
        }
        SolveCmd::Approximant { file1, file2, beta, budgets } => {
            let s = load(&file1)?;
            let d = load(&file2)?;
            let grid = match beta {
                Some(b) => {
                    approximant_two_dim(&s, &d, budgets.alpha_max, b, budgets.cap).map_err(pre)?
                }
                None => approximant_finite(&s, &d, budgets.alpha_max, budgets.cap).map_err(pre)?,
            };
            print!("{}", grid.render());
            Ok(0)
        }
    }
}

fn run_oracle(cmd: OracleCmd) -> Result<i32, CliError> {
    match cmd {
        OracleCmd::Game { file1, p, m, file2, q, n, mode, rounds, ceiling, out } => {
            let s = load(&file1)?;
            let d = load(&file2)?;
            let s0 = Configuration::new(state(&s, &file1, &p)?, m);
            let d0 = Configuration::new(state(&d, &file2, &q)?, n);
            let ceiling = ceiling.unwrap_or_else(|| generous_cap(&s, s0, &d, d0, rounds));
            let mode = match mode {
                ModeArg::Weak => GameMode::Weak,
                ModeArg::Strong => GameMode::Strong,
            };
            let survives = duplicator_survives(&s, s0, &d, d0, rounds, ceiling, mode)
                .map_err(pre)?;
            if out.machine {
                println!("ORACLE survives={survives} rounds={rounds} ceiling={ceiling}");
            } else if survives {
                println!(
                    "{} survives {rounds} rounds (counter ceiling {ceiling})",
                    paint("duplicator", 32)
                );
            } else {
                println!(
                    "{} wins within {rounds} rounds (counter ceiling {ceiling})",
                    paint("spoiler", 31)
                );
            }
            Ok(if survives { 0 } else { 1 })
        }
        OracleCmd::Traces { file, p, m, max_len } => {
            let net = load(&file)?;
            let from = Configuration::new(state(&net, &file, &p)?, m);
            let ts = traces_bounded(&net, from, max_len).map_err(pre)?;
            println!("TRACES count={} max-len={}", ts.words.len(), ts.max_len);
            for w in &ts.words {
                if w.is_empty() {
                    println!("WORD");
                } else {
                    println!("WORD {}", w.join(" "));
                }
            }
            Ok(0)
        }
    }
}

fn run_gen(args: GenArgs) -> Result<i32, CliError> {
    let params = CorpusParams {
        states: args.states,
        transitions: args.transitions,
        ..CorpusParams::default()
    };
    let net = match args.kind {
        GenKind::Ocn => random_ocn(args.seed, &params),
        GenKind::Omega => random_omega_net(args.seed, &params, args.omega_share),
        GenKind::Fs => random_fs(args.seed, &params),
    };
    print!("{}", emit_net(&net, &[format!("seed {}", args.seed)]));
    Ok(0)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            exit(code);
        }
    };
    match run(cli) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code());
        }
    }
}
