//! Load a catalog, validate it, and look at one image's derived IO.
//!
//!     cargo run -p vso-core --example knowledge_catalog [path.vso-catalog]

use vso_core::io::CatalogDefaults;
use vso_core::{derive_method_io, derive_vso_io, store, validate_catalog, KnowledgeBase, ParamSite};

fn site(s: &ParamSite) -> String {
    match s {
        ParamSite::Package { port, ip } => format!("{port} ({ip})"),
        ParamSite::Property { scope, name } => format!(
            "property {}{name}",
            scope.iter().map(|c| format!("{c}/")).collect::<String>()
        ),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/data/ship_and_waves.vso-catalog"
        )
        .into()
    });
    let catalog = store::load_catalog(&std::fs::read(&path)?)?;
    let report = validate_catalog(&catalog);
    println!(
        "{path}: {}",
        if report.is_clean() {
            "clean".to_string()
        } else {
            report.to_string()
        }
    );

    let kb = KnowledgeBase::new(catalog)?;
    println!("catalog version {}", kb.version());

    for method in &kb.catalog().methods {
        let io = derive_method_io(method, kb.catalog())?;
        let ins: Vec<_> = io
            .inputs
            .iter()
            .map(|p| format!("{}@{}", p.varname, p.position))
            .collect();
        let outs: Vec<_> = io
            .outputs
            .iter()
            .map(|p| format!("{}@{}", p.varname, p.position))
            .collect();
        println!(
            "method {:4} in [{}] out [{}]",
            method.id,
            ins.join(", "),
            outs.join(", ")
        );
    }

    // object IO under each model's catalog-selected method
    for image in &kb.catalog().images {
        let io = derive_vso_io(image, &CatalogDefaults, kb.catalog())?;
        println!("\nimage {}", image.id);
        for p in &io.inputs {
            let value = p.value.as_deref().unwrap_or("-");
            println!("  in  {:40} {:28} {value}", site(&p.site), p.uri.to_string());
        }
        for p in &io.outputs {
            println!("  out {:40} {}", site(&p.site), p.uri);
        }
    }
    Ok(())
}
