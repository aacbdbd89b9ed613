//! End-to-end tests of the command-line driver: exit codes, frozen
//! machine output, byte determinism, and round-tripping of emitted
//! nets.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ocnwb::format::parse_net;

const STATIONARY: &str = "net ocn still\nstates p\ntrans p a 0 p\n";
const DRAIN: &str = "net ocn drain\nstates p\ntrans p a -1 p\n";
const PUMP: &str = "net ocn pump\nstates q r\ntrans q tau +1 q\ntrans q a 0 r\ntrans r a -1 r\n";
const ALOOP_OCN: &str = "net ocn aloop\nstates p\ntrans p a 0 p\n";
const STAGED: &str = "net ocn staged\nstates q0 q0p q1\n\
                      trans q0 tau 0 q0p\ntrans q0p tau +1 q0p\ntrans q0p a 0 q1\n\
                      trans q1 a -1 q1\n";
const CHAIN_FS: &str = "net fs chain\nstates s0 s1 s2 s3\n\
                        trans s0 a s1\ntrans s1 a s2\ntrans s2 a s3\n";
const HALT_OCA: &str = "net oca halt\nstates p\n";
const BEAT_FS: &str = "net fs beat\nstates s\ntrans s b s\n";
const WFA_HI: &str = "net wfa hi\nstates w\ntrans w a 3 w\ninit w\n";

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ocnwb"))
        .args(args)
        .env_remove("OCNWB_COLOR")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn reflexive_query_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "still.net", STATIONARY);
    let net = net.to_str().unwrap();
    let out = run(&[
        "check", "weak-sim", net, "p", "2", net, "p", "2", "--alpha-max", "6", "--cap", "8",
        "--machine",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "VERDICT simulates cap=8\n");
}

#[test]
fn staged_pump_is_refuted_with_a_transfinite_rank() {
    let dir = tempfile::tempdir().unwrap();
    let spoiler = write(dir.path(), "aloop.net", ALOOP_OCN);
    let dup = write(dir.path(), "staged.net", STAGED);
    let out = run(&[
        "check",
        "weak-sim",
        spoiler.to_str().unwrap(),
        "p",
        "0",
        dup.to_str().unwrap(),
        "q0",
        "0",
        "--alpha-max",
        "12",
        "--cap",
        "16",
        "--machine",
    ]);
    assert_eq!(code(&out), 1, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(
        text.starts_with("VERDICT not-simulates rank=w*"),
        "unexpected report: {text}"
    );
}

#[test]
fn exhausted_budgets_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "pump.net", PUMP);
    let net = net.to_str().unwrap();
    let out = run(&[
        "check", "weak-sim", net, "q", "0", net, "q", "0", "--alpha-max", "0", "--cap", "8",
        "--machine",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout(&out), "VERDICT unknown alpha-max=0 cap=8\n");
}

#[test]
fn parse_trouble_and_unknown_states_get_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.net", "nonsense\n");
    let good = write(dir.path(), "ok.net", STATIONARY);
    let out = run(&[
        "check",
        "weak-sim",
        bad.to_str().unwrap(),
        "p",
        "0",
        good.to_str().unwrap(),
        "p",
        "0",
    ]);
    assert_eq!(code(&out), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    let out = run(&[
        "check",
        "weak-sim",
        good.to_str().unwrap(),
        "nosuch",
        "0",
        good.to_str().unwrap(),
        "p",
        "0",
    ]);
    assert_eq!(code(&out), 65);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nosuch"));
    // missing arguments are a usage error
    let out = run(&["check", "weak-sim"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn trace_inclusion_reports_match_the_library_formats() {
    let dir = tempfile::tempdir().unwrap();
    let halt = write(dir.path(), "halt.net", HALT_OCA);
    let beat = write(dir.path(), "beat.net", BEAT_FS);
    let aloop = write(dir.path(), "aloop.net", ALOOP_OCN);
    let chain = write(dir.path(), "chain.net", CHAIN_FS);
    let out = run(&[
        "check",
        "trace-incl",
        halt.to_str().unwrap(),
        "p",
        "0",
        beat.to_str().unwrap(),
        "s",
        "--machine",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "VERDICT included bound=80\n");
    let out = run(&[
        "check",
        "trace-incl",
        aloop.to_str().unwrap(),
        "p",
        "0",
        chain.to_str().unwrap(),
        "s0",
        "--machine",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "VERDICT counterexample w=a a a a\n");
    let out = run(&[
        "check",
        "trace-incl",
        aloop.to_str().unwrap(),
        "p",
        "0",
        chain.to_str().unwrap(),
        "s0",
        "--budget",
        "2",
        "--machine",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout(&out), "VERDICT budget-exceeded\n");
}

#[test]
fn finite_compare_checks_answer_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    let drain = write(dir.path(), "drain.net", DRAIN);
    let chain = write(dir.path(), "chain.net", CHAIN_FS);
    // the chain covers three a-steps, the drain at counter 2 needs two
    let out = run(&[
        "check",
        "fs-sim",
        chain.to_str().unwrap(),
        "s0",
        drain.to_str().unwrap(),
        "p",
        "2",
        "--machine",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "VERDICT simulates\n");
    let out = run(&[
        "check",
        "fs-sim",
        chain.to_str().unwrap(),
        "s2",
        drain.to_str().unwrap(),
        "p",
        "2",
        "--machine",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "VERDICT not-simulates\n");
    let out = run(&[
        "check",
        "ocn-sim",
        drain.to_str().unwrap(),
        "p",
        "3",
        chain.to_str().unwrap(),
        "s0",
        "--machine",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "VERDICT simulates\n");
}

#[test]
fn cap_build_emits_a_reparsable_finite_system() {
    let dir = tempfile::tempdir().unwrap();
    let drain = write(dir.path(), "drain.net", DRAIN);
    let out = run(&["build", "cap", drain.to_str().unwrap(), "--cap", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let reparsed = parse_net(&text).unwrap();
    assert_eq!(reparsed.kind, ocnwb::nets::NetKind::Fs);
    assert_eq!(reparsed.states(), ["p@0", "p@1", "p@2"]);
}

#[test]
fn reduce_build_writes_a_round_tripping_pair() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.net", STATIONARY);
    let n = write(dir.path(), "n.net", PUMP);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "build",
        "reduce",
        m.to_str().unwrap(),
        n.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("WROTE"), "missing WROTE lines: {text}");
    let rounds = text.lines().last().unwrap();
    assert!(rounds.starts_with("ROUNDS k="), "missing ROUNDS line: {text}");
    for name in ["spoiler.net", "dup.net"] {
        let emitted = fs::read_to_string(out_dir.join(name)).unwrap();
        parse_net(&emitted).unwrap_or_else(|e| panic!("{name} does not re-parse: {e}"));
    }
}

#[test]
fn normalize_header_records_the_round_length() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.net", STATIONARY);
    // largest guard 2 and largest effect magnitude 3 stretch each round
    // into k = 2·2 + 3 + 1 = 8 steps
    let g = write(
        dir.path(),
        "g.net",
        "net gomega wide\nstates u\ngtrans u a 2 3 u\n",
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "build",
        "normalize",
        m.to_str().unwrap(),
        g.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("ROUNDS k=8 gamma=2 delta=3"));
    let dup = fs::read_to_string(out_dir.join("dup.net")).unwrap();
    assert!(dup.starts_with("# k=8 gamma=2 delta=3\n"), "header missing: {dup}");
}

#[test]
fn rank_solving_and_inapplicability() {
    let dir = tempfile::tempdir().unwrap();
    let drain = write(dir.path(), "drain.net", DRAIN);
    let pump = write(dir.path(), "pump.net", PUMP);
    let out = run(&[
        "solve",
        "rank",
        drain.to_str().unwrap(),
        "p",
        "1",
        drain.to_str().unwrap(),
        "p",
        "0",
        "--machine",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "RANK value=w*0+1\n");
    // a Spoiler that can pump its counter past the promised bound is
    // rejected distinctly
    let out = run(&[
        "solve",
        "rank",
        pump.to_str().unwrap(),
        "q",
        "0",
        drain.to_str().unwrap(),
        "p",
        "0",
        "--cap",
        "4",
        "--machine",
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn zero_round_approximant_grid_is_full() {
    let dir = tempfile::tempdir().unwrap();
    let drain = write(dir.path(), "drain.net", DRAIN);
    let out = run(&[
        "solve",
        "approximant",
        drain.to_str().unwrap(),
        drain.to_str().unwrap(),
        "--alpha-max",
        "0",
        "--cap",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("GRID alpha=0"), "header: {text}");
    for line in text.lines().skip(1) {
        assert!(line.ends_with(" 0"), "not the full relation: {line}");
    }
}

#[test]
fn oracle_game_and_traces_reports() {
    let dir = tempfile::tempdir().unwrap();
    let drain = write(dir.path(), "drain.net", DRAIN);
    let out = run(&[
        "oracle",
        "game",
        drain.to_str().unwrap(),
        "p",
        "1",
        drain.to_str().unwrap(),
        "p",
        "1",
        "--rounds",
        "4",
        "--machine",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("ORACLE survives=true rounds=4"));
    let out = run(&[
        "oracle",
        "traces",
        drain.to_str().unwrap(),
        "p",
        "2",
        "--max-len",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "TRACES count=3 max-len=3\nWORD\nWORD a\nWORD a a\n"
    );
}

#[test]
fn emitted_outputs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let wfa = write(dir.path(), "hi.net", WFA_HI);
    let wfa = wfa.to_str().unwrap();
    let first = run(&["build", "wfa-encode", wfa]);
    let second = run(&["build", "wfa-encode", wfa]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).starts_with("# start w 0\nnet rocn hi.ocn\n"));
    parse_net(&stdout(&first)).unwrap();

    let g1 = run(&["gen", "ocn", "--seed", "7"]);
    let g2 = run(&["gen", "ocn", "--seed", "7"]);
    assert_eq!(g1.stdout, g2.stdout);
    parse_net(&stdout(&g1)).unwrap();
    let g3 = run(&["gen", "ocn", "--seed", "8"]);
    assert_ne!(g1.stdout, g3.stdout);
}

#[test]
fn color_is_opt_in_and_never_leaks_into_machine_mode() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "still.net", STATIONARY);
    let net = net.to_str().unwrap();
    let args = [
        "check", "weak-sim", net, "p", "0", net, "p", "0", "--alpha-max", "4", "--cap", "4",
    ];
    let plain = run(&args);
    assert!(!stdout(&plain).contains('\x1b'));
    let colored = Command::new(env!("CARGO_BIN_EXE_ocnwb"))
        .args(args)
        .env("OCNWB_COLOR", "1")
        .output()
        .unwrap();
    assert!(stdout(&colored).contains("\x1b[32m"));
    let mut margs = args.to_vec();
    margs.push("--machine");
    let machine = Command::new(env!("CARGO_BIN_EXE_ocnwb"))
        .args(margs)
        .env("OCNWB_COLOR", "1")
        .output()
        .unwrap();
    assert!(!stdout(&machine).contains('\x1b'));
}
