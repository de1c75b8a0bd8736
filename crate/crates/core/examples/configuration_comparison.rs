//! Count, enumerate and rank the method configurations of an environment.
//!
//!     cargo run -p vso-core --example configuration_comparison [data_units]

use vso_core::{
    compare_configurations, count_configurations, enumerate_configurations, samples, Criterion, Environment,
    KnowledgeBase,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data_units: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1.0);
    let kb = KnowledgeBase::new(samples::ship_and_waves())?;
    let mut env = Environment::for_knowledge("compare", &kb);
    env.instantiate(&kb, "o1")?;
    env.instantiate(&kb, "o2")?;
    env.apply_all_suggestions(&kb)?;

    println!("{} configurations", count_configurations(&env, &kb)?);
    let configs = enumerate_configurations(&env, &kb)?;

    for criterion in [Criterion::Total, Criterion::CriticalPath] {
        println!("\nranked by {criterion} at {data_units} data units:");
        for r in compare_configurations(&env, &kb, &configs, criterion, data_units)?
            .iter()
            .take(5)
        {
            let mut note = String::new();
            if !r.missing_perf.is_empty() {
                note = format!("  (no perf data: {})", r.missing_perf.join(", "));
            }
            println!("  {:8.1} {}{note}", r.value(criterion), r.key);
        }
    }
    Ok(())
}
