#![allow(dead_code)]

use std::path::PathBuf;

use vso_core::composer::ep;
use vso_core::{samples, Environment, KnowledgeBase, ModelPath};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compares `actual` with the file, or rewrites the file when `VSO_BLESS`
/// is set.
pub fn check_golden(path: PathBuf, actual: &[u8]) {
    if std::env::var_os("VSO_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path)
        .unwrap_or_else(|e| panic!("{}: {e} (run with VSO_BLESS=1 to create)", path.display()));
    assert!(
        expected == actual,
        "{} differs:\n--- expected\n{}\n--- actual\n{}",
        path.display(),
        String::from_utf8_lossy(&expected),
        String::from_utf8_lossy(actual)
    );
}

pub fn ship_kb() -> KnowledgeBase {
    KnowledgeBase::new(samples::ship_and_waves()).unwrap()
}

/// o1 and o2 side by side, nothing connected.
pub fn ship_env(kb: &KnowledgeBase) -> Environment {
    let mut env = Environment::for_knowledge("ship_and_waves", kb);
    env.instantiate(kb, "o1").unwrap();
    env.instantiate(kb, "o2").unwrap();
    env
}

/// The wind → waves → forcing → motion → plot chain: m2 off, the four
/// package connections ip4→ip5→ip10→ip14→ip15 stored explicitly.
pub fn chain_env(kb: &KnowledgeBase) -> Environment {
    let mut env = ship_env(kb);
    env.env_id = "wave_chain".into();
    env.set_model_enabled(kb, "o1#1", &ModelPath::root("m2"), false)
        .unwrap();
    let links = [
        (
            ep("o1#1", "m1", "s2", 0, "wind"),
            ep("o1#1", "m1", "s2", 1, "wind"),
        ),
        (
            ep("o1#1", "m1", "s2", 1, "spectrum"),
            ep("o1#1", "m3", "s5", 0, "spectrum"),
        ),
        (
            ep("o1#1", "m3", "s5", 0, "forcing"),
            ep("o2#1", "m4", "s7", 0, "forcing"),
        ),
        (
            ep("o2#1", "m4", "s7", 0, "motion"),
            ep("o2#1", "m4", "s7", 1, "motion"),
        ),
    ];
    for (s, t) in &links {
        env.connect(kb, s, t).unwrap();
    }
    env
}
