//! Instantiate images, inspect visible parameters, accept suggestions and
//! connect by hand.
//!
//!     cargo run -p vso-core --example compose_environment

use vso_core::composer::ep;
use vso_core::{samples, store, Environment, KnowledgeBase, Level, ModelPath};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = KnowledgeBase::new(samples::ship_and_waves())?;
    let mut env = Environment::for_knowledge("demo", &kb);
    let ocean = env.instantiate(&kb, "o1")?;
    let ship = env.instantiate(&kb, "o2")?;
    println!("instances: {ocean}, {ship}");

    env.set_model_enabled(&kb, &ocean, &ModelPath::root("m2"), false)?;

    for level in [Level::Model, Level::Object] {
        println!("\nunset, unfed parameters of {ship} at {level}:");
        for group in env.visible_params(&kb, &ship, level)? {
            for p in &group.inputs {
                println!("  {:12} in  {} ({})", group.element, p.site.varname(), p.uri);
            }
        }
    }

    println!("\nsuggestions:");
    for s in env.suggest_connections(&kb)? {
        println!("  {} -> {}  [{}]", s.source, s.target, s.source_uri);
    }
    for c in env.apply_all_suggestions(&kb)? {
        println!("applied {} -> {}", c.source, c.target);
    }

    // wire the wind reader into the spectrum model by hand
    let source = ep(&ocean, "m1", "s2", 0, "wind");
    let target = ep(&ocean, "m1", "s2", 1, "wind");
    env.connect(&kb, &source, &target)?;

    // a mismatched pair is refused
    let wrong = env.connect(
        &kb,
        &ep(&ocean, "m1", "s2", 0, "wind"),
        &ep(&ship, "m4", "s7", 1, "motion"),
    );
    println!("mismatched connect: {}", wrong.unwrap_err());

    println!("\n{}", String::from_utf8(store::save_environment(&env))?);
    Ok(())
}
