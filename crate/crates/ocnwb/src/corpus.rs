//! Seeded random net corpora. Shared by the cross-validation test suites
//! and the CLI `gen` verb; the same seed always yields the same net.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nets::{Effect, Net, NetKind};

/// Knobs for [`random_ocn`] and friends. `tau_share`/`omega_share` are
/// probabilities in [0,1].
#[derive(Clone, Debug)]
pub struct CorpusParams {
    pub states: usize,
    pub transitions: usize,
    pub labels: Vec<String>,
    pub tau_share: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            states: 3,
            transitions: 5,
            labels: vec!["a".into(), "b".into()],
            tau_share: 0.3,
        }
    }
}

fn pick_label(rng: &mut ChaCha8Rng, p: &CorpusParams) -> String {
    if p.tau_share > 0.0 && rng.gen_bool(p.tau_share) {
        "tau".to_string()
    } else {
        p.labels[rng.gen_range(0..p.labels.len())].clone()
    }
}

/// Random one-counter net with unit deltas; exact duplicate transitions
/// are skipped, so the result may have fewer transitions than asked.
pub fn random_ocn(seed: u64, p: &CorpusParams) -> Net {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Net::new(NetKind::Ocn, format!("rnd{seed}"));
    for i in 0..p.states {
        net.add_state(format!("s{i}")).unwrap();
    }
    let mut seen = std::collections::HashSet::new();
    for _ in 0..p.transitions {
        let src = rng.gen_range(0..p.states) as u32;
        let dst = rng.gen_range(0..p.states) as u32;
        let label = pick_label(&mut rng, p);
        let delta = rng.gen_range(-1..=1i64);
        if seen.insert((src, label.clone(), delta, dst)) {
            net.add_trans(
                crate::nets::StateId(src),
                &label,
                0,
                Effect::Fin(delta),
                crate::nets::StateId(dst),
            );
        }
    }
    net
}

/// Random ω-net. At most one of {ω, normal} per (src,label,dst) triple:
/// the solvers' treatment of triples carrying both kinds is deliberately
/// not exercised by random corpora (see the games module docs).
pub fn random_omega_net(seed: u64, p: &CorpusParams, omega_share: f64) -> Net {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Net::new(NetKind::OmegaNet, format!("rnw{seed}"));
    for i in 0..p.states {
        net.add_state(format!("t{i}")).unwrap();
    }
    let mut kinds = std::collections::HashMap::new();
    let mut seen = std::collections::HashSet::new();
    for _ in 0..p.transitions {
        let src = rng.gen_range(0..p.states) as u32;
        let dst = rng.gen_range(0..p.states) as u32;
        let label = pick_label(&mut rng, p);
        let omega = rng.gen_bool(omega_share);
        let key = (src, label.clone(), dst);
        match kinds.get(&key) {
            Some(&was_omega) if was_omega != omega => continue,
            _ => {}
        }
        kinds.insert(key, omega);
        let effect = if omega { Effect::Omega } else { Effect::Fin(rng.gen_range(-1..=1i64)) };
        if seen.insert((src, label.clone(), effect_key(effect), dst)) {
            net.add_trans(
                crate::nets::StateId(src),
                &label,
                0,
                effect,
                crate::nets::StateId(dst),
            );
        }
    }
    net
}

/// Random finite system.
pub fn random_fs(seed: u64, p: &CorpusParams) -> Net {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Net::new(NetKind::Fs, format!("rnf{seed}"));
    for i in 0..p.states {
        net.add_state(format!("f{i}")).unwrap();
    }
    let mut seen = std::collections::HashSet::new();
    for _ in 0..p.transitions {
        let src = rng.gen_range(0..p.states) as u32;
        let dst = rng.gen_range(0..p.states) as u32;
        let label = pick_label(&mut rng, p);
        if seen.insert((src, label.clone(), dst)) {
            net.add_trans(
                crate::nets::StateId(src),
                &label,
                0,
                Effect::Fin(0),
                crate::nets::StateId(dst),
            );
        }
    }
    net
}

fn effect_key(e: Effect) -> i64 {
    match e {
        Effect::Fin(d) => d,
        Effect::Omega => i64::MAX,
    }
}
