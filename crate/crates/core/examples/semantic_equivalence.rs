//! sameAs assertions and the equivalence classes they induce.
//!
//!     cargo run -p vso-core --example semantic_equivalence

use vso_core::model::SemanticUri;
use vso_core::{samples, EquivalenceRegistry, KnowledgeBase};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let uri = SemanticUri::new;
    let registry = EquivalenceRegistry::new()
        .with_same_as(&uri("urn:a:wind-speed"), &uri("urn:b:windSpeed"))
        .with_same_as(&uri("urn:b:windSpeed"), &uri("http://example.org/wind#speed"))
        .with_same_as(&uri("urn:a:wave-height"), &uri("urn:b:Hs"));

    for (a, b) in [
        ("urn:a:wind-speed", "http://example.org/wind#speed"),
        ("urn:a:wind-speed", "urn:b:Hs"),
        ("urn:a:unregistered", "urn:a:unregistered"),
    ] {
        println!("{a} ~ {b}: {}", registry.equivalent(&uri(a), &uri(b)));
    }
    for class in registry.classes() {
        let names: Vec<String> = class.iter().map(ToString::to_string).collect();
        println!("class {{{}}}", names.join(", "));
    }

    // the shipped catalog declares its own assertions
    let kb = KnowledgeBase::new(samples::ship_and_waves())?;
    println!(
        "\nship_and_waves: {} URIs in {} classes",
        kb.registry().len(),
        kb.registry().class_count()
    );
    for class in kb.registry().classes().into_iter().filter(|c| c.len() > 1) {
        let names: Vec<String> = class.iter().map(ToString::to_string).collect();
        println!("  {}", names.join(" = "));
    }
    Ok(())
}
