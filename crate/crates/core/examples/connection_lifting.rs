//! Package-level connections seen from the method, model and object levels.
//!
//!     cargo run -p vso-core --example connection_lifting

use std::collections::BTreeSet;

use vso_core::lift::{lift_through, membership};
use vso_core::{store, KnowledgeBase, Level};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // plain sets, no catalog needed
    let links: BTreeSet<(&str, &str)> = [("a1", "b1"), ("a2", "b2"), ("b1", "b2"), ("b2", "c1")].into();
    let to_group = membership(&[("A", &["a1", "a2"][..]), ("B", &["b1", "b2"]), ("C", &["c1"])]);
    let to_top = membership(&[("left", &["A", "B"][..]), ("right", &["C"])]);
    for (i, view) in lift_through(&links, &[&to_group, &to_top])?.iter().enumerate() {
        println!("level {i}: {view:?}");
    }

    // an environment with a four-link chain across two objects
    let kb = KnowledgeBase::new(store::load_catalog(include_bytes!(
        "data/ship_and_waves.vso-catalog"
    ))?)?;
    let env = store::load_environment(include_bytes!("data/wave_chain.vso-env"))?;
    for level in Level::ALL {
        println!("\n{level}");
        for (a, b) in env.lifted_view(&kb, level)? {
            println!("  {a} -> {b}");
        }
    }
    Ok(())
}
