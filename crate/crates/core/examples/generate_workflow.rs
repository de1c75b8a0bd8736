//! Generate the same workflow in two vocabularies and show the traversal.
//!
//!     cargo run -p vso-core --example generate_workflow

use vso_core::codegen::BindingSource;
use vso_core::{explain_traversal, generate_script, store, Configuration, DslVocabulary, KnowledgeBase};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = KnowledgeBase::new(store::load_catalog(include_bytes!(
        "data/ship_and_waves.vso-catalog"
    ))?)?;
    let env = store::load_environment(include_bytes!("data/wave_chain.vso-env"))?;
    let config = Configuration::current(&env);
    println!("configuration {}\n", config.key());

    for row in explain_traversal(&env, &kb, &config)? {
        let inputs: Vec<String> = row
            .bindings
            .iter()
            .map(|b| match &b.source {
                BindingSource::Step { step, output } => format!("{} <- {step}.{output}", b.input),
                BindingSource::Literal { value } => format!("{} = {value}", b.input),
            })
            .collect();
        println!("{:7} {:32} {}", row.step, row.node.label(), inputs.join(", "));
    }

    for vocab in [
        DslVocabulary::generic(kb.catalog()),
        store::load_vocabulary(include_bytes!("data/blocks.vso-vocab"))?,
    ] {
        let script = generate_script(&env, &kb, &config, &vocab)?;
        println!("\n--- {} ---\n{}", vocab.name, script.text);
    }
    Ok(())
}
