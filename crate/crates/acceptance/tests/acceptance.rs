//! Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
//! fails. Each check compares the library against an oracle written here
//! from first principles.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::RngExt;
use serde_json::{json, Value};

use vso_acceptance::{cap_configurations, random_catalog, random_dag, random_environment, rng, Limits};
use vso_core::composer::ep;
use vso_core::io::{derive_model_io_with, CatalogDefaults};
use vso_core::lift::{lift_through, membership};
use vso_core::model::{Catalog, SemanticUri};
use vso_core::{
    compare_configurations, count_configurations, derive_method_io, derive_model_io, derive_vso_io,
    enumerate_configurations, generate_script, samples, store, Configuration, Criterion, DslVocabulary,
    Endpoint, Environment, EquivalenceRegistry, KnowledgeBase, Level, ModelPath, ParamSite, Selection,
};

type Check = Result<String, String>;
type Named = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn core_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core")
}

// ---------------------------------------------------------------- lifting

fn parents(groups: &[(&str, &[&str])]) -> BTreeMap<String, String> {
    let owned: Vec<(String, Vec<String>)> = groups
        .iter()
        .map(|(p, c)| (p.to_string(), c.iter().map(|s| s.to_string()).collect()))
        .collect();
    let borrowed: Vec<(String, &[String])> = owned.iter().map(|(p, c)| (p.clone(), c.as_slice())).collect();
    membership(&borrowed)
}

fn pairs(items: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    items
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn lifting_fixture() -> Check {
    let conn_ip = pairs(&[
        ("ip4", "ip5"),
        ("ip5", "ip10"),
        ("ip10", "ip14"),
        ("ip14", "ip15"),
    ]);
    let to_method = parents(&[
        ("s1", &["ip1", "ip2", "ip3"]),
        ("s2", &["ip4", "ip5"]),
        ("s3", &["ip6", "ip7"]),
        ("s4", &["ip8", "ip9"]),
        ("s5", &["ip10"]),
        ("s6", &["ip11", "ip12"]),
        ("s7", &["ip14", "ip15"]),
        ("s8", &["ip13"]),
    ]);
    let to_model = parents(&[
        ("m1", &["s1", "s2"]),
        ("m2", &["s3"]),
        ("m3", &["s4", "s5"]),
        ("m4", &["s6", "s7", "s8"]),
    ]);
    let to_object = parents(&[("o1", &["m1", "m2", "m3"]), ("o2", &["m4"])]);

    let start = Instant::now();
    let views = lift_through(&conn_ip, &[&to_method, &to_model, &to_object]).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    ensure!(
        views[1] == pairs(&[("s2", "s5"), ("s5", "s7")]),
        "methods: {:?}",
        views[1]
    );
    ensure!(
        views[2] == pairs(&[("m1", "m3"), ("m3", "m4")]),
        "models: {:?}",
        views[2]
    );
    ensure!(views[3] == pairs(&[("o1", "o2")]), "objects: {:?}", views[3]);
    ensure!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    Ok(format!("3 levels exact in {elapsed:?}"))
}

// ---------------------------------------------------------- IO union laws

/// (site, uri, value) of one generalized parameter.
type Key = (String, String, Option<String>);

fn oracle_ip(catalog: &Catalog, ip_id: &str, prefix: &str) -> (BTreeSet<Key>, BTreeSet<Key>) {
    let ip = catalog
        .implementing_packages
        .iter()
        .find(|p| p.id == ip_id)
        .unwrap();
    let sp = catalog.software_packages.iter().find(|s| s.id == ip.sp).unwrap();
    let mut ins = BTreeSet::new();
    let mut outs = BTreeSet::new();
    for base in &sp.inputs {
        let w = ip.inputs.iter().find(|w| w.base == base.varname).unwrap();
        let value = w.default_value.clone().or(base.value.clone());
        ins.insert((
            format!("{prefix}/{}@{ip_id}", base.varname),
            w.uri.to_string(),
            value,
        ));
    }
    for base in &sp.outputs {
        let w = ip.outputs.iter().find(|w| w.base == base.varname).unwrap();
        outs.insert((
            format!("{prefix}/{}@{ip_id}", base.varname),
            w.uri.to_string(),
            None,
        ));
    }
    (ins, outs)
}

fn oracle_method(catalog: &Catalog, method_id: &str, prefix: &str) -> (BTreeSet<Key>, BTreeSet<Key>) {
    let method = catalog.methods.iter().find(|m| m.id == method_id).unwrap();
    let mut ins = BTreeSet::new();
    let mut outs = BTreeSet::new();
    for (pos, ip) in method.ip_sequence.iter().enumerate() {
        let (i, o) = oracle_ip(catalog, ip, &format!("{prefix}{pos}"));
        ins.extend(i);
        outs.extend(o);
    }
    (ins, outs)
}

/// Recursive union over properties, enabled models and children.
fn oracle_object(
    catalog: &Catalog,
    image_id: &str,
    scope: &[String],
    choice: &dyn Fn(&str) -> Option<String>,
) -> (BTreeSet<Key>, BTreeSet<Key>) {
    let image = catalog.images.iter().find(|i| i.id == image_id).unwrap();
    let scope_str: String = scope.iter().map(|s| format!("{s}/")).collect();
    let mut ins = BTreeSet::new();
    let mut outs = BTreeSet::new();
    for p in &image.properties {
        let site = format!("prop:{scope_str}{}", p.name);
        ins.insert((site.clone(), p.uri.to_string(), p.value.clone()));
        outs.insert((site, p.uri.to_string(), None));
    }
    for m in &image.models {
        let path = format!("{scope_str}{m}");
        if let Some(method) = choice(&path) {
            let (i, o) = oracle_method(catalog, &method, &format!("{path}/{method}/"));
            ins.extend(i);
            outs.extend(o);
        }
    }
    for c in &image.children {
        let mut child_scope = scope.to_vec();
        child_scope.push(c.clone());
        let (i, o) = oracle_object(catalog, c, &child_scope, choice);
        ins.extend(i);
        outs.extend(o);
    }
    (ins, outs)
}

fn param_key(p: &vso_core::Param) -> Key {
    let site = match &p.site {
        ParamSite::Package { port, ip } => format!("{port}@{ip}"),
        ParamSite::Property { scope, name } => {
            format!(
                "prop:{}{name}",
                scope.iter().map(|s| format!("{s}/")).collect::<String>()
            )
        }
    };
    (site, p.uri.to_string(), p.value.clone())
}

fn package_key(p: &vso_core::io::PackageParam, prefix: &str) -> Key {
    (
        format!("{prefix}{}/{}@{}", p.position, p.varname, p.ip),
        p.uri.to_string(),
        p.value.clone(),
    )
}

fn all_model_paths(catalog: &Catalog, image_id: &str, scope: &str, out: &mut Vec<(String, String)>) {
    let image = catalog.images.iter().find(|i| i.id == image_id).unwrap();
    for m in &image.models {
        out.push((format!("{scope}{m}"), m.clone()));
    }
    for c in &image.children {
        all_model_paths(catalog, c, &format!("{scope}{c}/"), out);
    }
}

fn io_union_laws() -> Check {
    let start = Instant::now();
    let mut compared = 0usize;
    for seed in 0..200 {
        let mut r = rng(seed);
        let catalog = random_catalog(&mut r, Limits::default());
        let fail = |what: String| format!("seed {seed}: {what}");

        for method in &catalog.methods {
            let io = derive_method_io(method, &catalog).map_err(|e| fail(e.to_string()))?;
            let got_in: BTreeSet<Key> = io.inputs.iter().map(|p| package_key(p, "")).collect();
            let got_out: BTreeSet<Key> = io.outputs.iter().map(|p| package_key(p, "")).collect();
            let (want_in, want_out) = oracle_method(&catalog, &method.id, "");
            ensure!(
                got_in == want_in && got_out == want_out,
                "{}",
                fail(format!("method {}", method.id))
            );
            ensure!(
                io.inputs.len() == want_in.len(),
                "{}",
                fail(format!("method {} duplicates", method.id))
            );
            compared += 1;
        }
        for model in &catalog.models {
            let selected = model.selected_method.clone().unwrap();
            let io = derive_model_io(model, &catalog).map_err(|e| fail(e.to_string()))?;
            let (want_in, want_out) = oracle_method(&catalog, &selected, "");
            let got_in: BTreeSet<Key> = io.inputs.iter().map(|p| package_key(p, "")).collect();
            let got_out: BTreeSet<Key> = io.outputs.iter().map(|p| package_key(p, "")).collect();
            ensure!(
                got_in == want_in && got_out == want_out,
                "{}",
                fail(format!("model {}", model.id))
            );
            for m in &model.methods {
                let io = derive_model_io_with(model, m, &catalog).map_err(|e| fail(e.to_string()))?;
                let (want_in, _) = oracle_method(&catalog, m, "");
                let got_in: BTreeSet<Key> = io.inputs.iter().map(|p| package_key(p, "")).collect();
                ensure!(
                    got_in == want_in,
                    "{}",
                    fail(format!("model {} via {m}", model.id))
                );
            }
            compared += 1 + model.methods.len();
        }
        for image in &catalog.images {
            // catalog defaults
            let io = derive_vso_io(image, &CatalogDefaults, &catalog).map_err(|e| fail(e.to_string()))?;
            let defaults = |path: &str| {
                let model = path.rsplit('/').next().unwrap();
                catalog
                    .models
                    .iter()
                    .find(|m| m.id == model)
                    .and_then(|m| m.selected_method.clone())
            };
            let (want_in, want_out) = oracle_object(&catalog, &image.id, &[], &defaults);
            let got_in: BTreeSet<Key> = io.inputs.iter().map(param_key).collect();
            let got_out: BTreeSet<Key> = io.outputs.iter().map(param_key).collect();
            ensure!(
                got_in == want_in,
                "{}",
                fail(format!("object {} inputs", image.id))
            );
            ensure!(
                got_out == want_out,
                "{}",
                fail(format!("object {} outputs", image.id))
            );
            ensure!(
                io.inputs.len() == got_in.len(),
                "{}",
                fail(format!("object {} duplicates", image.id))
            );

            // a random selection
            let mut paths = Vec::new();
            all_model_paths(&catalog, &image.id, "", &mut paths);
            let mut chosen: BTreeMap<String, String> = BTreeMap::new();
            let mut sel = Selection::default();
            for (path, model_id) in &paths {
                if r.random_bool(0.3) {
                    continue;
                }
                let methods = &catalog.models.iter().find(|m| &m.id == model_id).unwrap().methods;
                let m = methods[r.random_range(0..methods.len())].clone();
                let mp: ModelPath = path.parse().unwrap();
                sel.enabled.insert(mp.clone());
                sel.methods.insert(mp, m.clone());
                chosen.insert(path.clone(), m);
            }
            let io = derive_vso_io(image, &sel, &catalog).map_err(|e| fail(e.to_string()))?;
            let (want_in, want_out) = oracle_object(&catalog, &image.id, &[], &|p| chosen.get(p).cloned());
            let got_in: BTreeSet<Key> = io.inputs.iter().map(param_key).collect();
            let got_out: BTreeSet<Key> = io.outputs.iter().map(param_key).collect();
            ensure!(
                got_in == want_in && got_out == want_out,
                "{}",
                fail(format!("object {} under selection", image.id))
            );
            compared += 2;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "200 catalogs, {compared} derivations equal the oracle in {elapsed:?}"
    ))
}

// ------------------------------------------------------------ filtration

/// Feeds under the environment's current selections, recomputed from
/// scratch: stored connections whose both ends are active, plus
/// adjacency links to inputs without a stored feed.
fn oracle_feeds(env: &Environment, kb: &KnowledgeBase) -> (BTreeSet<Endpoint>, BTreeSet<Endpoint>) {
    let mut active_in: BTreeMap<Endpoint, SemanticUri> = BTreeMap::new();
    let mut active_out: BTreeMap<Endpoint, SemanticUri> = BTreeMap::new();
    for (id, inst) in &env.instances {
        let image = kb.catalog().image(&inst.image).unwrap();
        let io = derive_vso_io(image, inst, kb.catalog()).unwrap();
        for p in &io.inputs {
            if let Some(port) = p.site.port() {
                active_in.insert(Endpoint::new(id.clone(), port.clone()), p.uri.clone());
            }
        }
        for p in &io.outputs {
            if let Some(port) = p.site.port() {
                active_out.insert(Endpoint::new(id.clone(), port.clone()), p.uri.clone());
            }
        }
    }
    let mut fed = BTreeSet::new();
    let mut consumed = BTreeSet::new();
    for c in &env.connections {
        if active_in.contains_key(&c.target) && active_out.contains_key(&c.source) {
            fed.insert(c.target.clone());
            consumed.insert(c.source.clone());
        }
    }
    for (target, uri) in &active_in {
        if target.port.position == 0 || fed.contains(target) {
            continue;
        }
        let source = active_out
            .iter()
            .filter(|(src, _)| {
                src.instance == target.instance
                    && src.port.model == target.port.model
                    && src.port.method == target.port.method
                    && src.port.position + 1 == target.port.position
            })
            .find(|(_, u)| kb.registry().equivalent(u, uri));
        if let Some((src, _)) = source {
            fed.insert(target.clone());
            consumed.insert(src.clone());
        }
    }
    (fed, consumed)
}

fn filtration_soundness() -> Check {
    let mut visible_inputs = 0usize;
    let mut hidden = 0usize;
    for seed in 0..200 {
        let mut r = rng(10_000 + seed);
        let kb = KnowledgeBase::new(random_catalog(&mut r, Limits::default())).unwrap();
        let env = random_environment(&mut r, &kb);
        let (fed, consumed) = oracle_feeds(&env, &kb);
        let fail = |what: String| format!("seed {seed}: {what}");
        for (id, inst) in &env.instances {
            let image = kb.catalog().image(&inst.image).unwrap();
            let all = derive_vso_io(image, inst, kb.catalog()).unwrap();
            let all_in: BTreeSet<_> = all.inputs.iter().collect();
            let all_out: BTreeSet<_> = all.outputs.iter().collect();
            for level in Level::ALL {
                let groups = env
                    .visible_params(&kb, id, level)
                    .map_err(|e| fail(e.to_string()))?;
                let mut seen_in = BTreeSet::new();
                for g in &groups {
                    for p in &g.inputs {
                        ensure!(
                            p.value.is_none(),
                            "{}",
                            fail(format!("{level} input {p:?} has a value"))
                        );
                        if let Some(port) = p.site.port() {
                            let e = Endpoint::new(id.clone(), port.clone());
                            ensure!(!fed.contains(&e), "{}", fail(format!("{level} input {e} is fed")));
                            ensure!(
                                g.element == vso_core::composer::element_label(level, id, &port.occurrence()),
                                "{}",
                                fail(format!("{e} grouped under {}", g.element))
                            );
                        }
                        ensure!(
                            all_in.contains(p),
                            "{}",
                            fail(format!("{level} input {p:?} not derived"))
                        );
                        seen_in.insert(p);
                    }
                    for p in &g.outputs {
                        if let Some(port) = p.site.port() {
                            let e = Endpoint::new(id.clone(), port.clone());
                            ensure!(
                                !consumed.contains(&e),
                                "{}",
                                fail(format!("{level} output {e} consumed"))
                            );
                        }
                        ensure!(
                            all_out.contains(p),
                            "{}",
                            fail(format!("{level} output {p:?} not derived"))
                        );
                    }
                }
                // nothing eligible is dropped either
                for p in &all.inputs {
                    let eligible = p.value.is_none()
                        && p.site
                            .port()
                            .is_none_or(|port| !fed.contains(&Endpoint::new(id.clone(), port.clone())))
                        && (level == Level::Object || p.site.port().is_some());
                    ensure!(
                        eligible == seen_in.contains(p),
                        "{}",
                        fail(format!("{level} input {p:?} eligible={eligible}"))
                    );
                    if level == Level::Object {
                        if eligible {
                            visible_inputs += 1;
                        } else {
                            hidden += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "200 environments, 4 levels; {visible_inputs} visible / {hidden} hidden object inputs"
    ))
}

// ----------------------------------------------------------------- sameAs

fn same_as_equivalence() -> Check {
    let mut positive = 0usize;
    for case in 0..500u64 {
        let mut r = rng(20_000 + case);
        let n = r.random_range(1..=50usize);
        let uris: Vec<SemanticUri> = (0..n).map(|i| SemanticUri::new(format!("urn:u:{i}"))).collect();
        let m = r.random_range(0..=n);
        let mut adj = vec![Vec::new(); n];
        let mut reg = EquivalenceRegistry::new();
        for u in &uris {
            reg.register(u);
        }
        for _ in 0..m {
            let (a, b) = (r.random_range(0..n), r.random_range(0..n));
            adj[a].push(b);
            adj[b].push(a);
            reg.assert_same_as(&uris[a], &uris[b]);
        }
        // breadth-first reachability from every node
        let mut reach = vec![vec![false; n]; n];
        for s in 0..n {
            let mut queue = VecDeque::from([s]);
            reach[s][s] = true;
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if !reach[s][y] {
                        reach[s][y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        let mut eq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                eq[i][j] = reg
                    .semantically_equal(&uris[i], &uris[j])
                    .map_err(|e| e.to_string())?;
                ensure!(
                    eq[i][j] == reach[i][j],
                    "case {case}: {i}~{j} is {} but oracle says {}",
                    eq[i][j],
                    reach[i][j]
                );
                positive += usize::from(eq[i][j]);
            }
        }
        for i in 0..n {
            ensure!(eq[i][i], "case {case}: not reflexive at {i}");
            for j in 0..n {
                ensure!(eq[i][j] == eq[j][i], "case {case}: not symmetric at {i},{j}");
                if eq[i][j] {
                    for k in 0..n {
                        ensure!(
                            !eq[j][k] || eq[i][k],
                            "case {case}: not transitive at {i},{j},{k}"
                        );
                    }
                }
            }
        }
    }
    Ok(format!(
        "500 assertion sets, {positive} equal pairs, all matching reachability"
    ))
}

// ------------------------------------------------------ configuration count

fn brute_force(slots: &[Vec<String>], at: usize, current: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    if at == slots.len() {
        out.push(current.clone());
        return;
    }
    for m in &slots[at] {
        current.push(m.clone());
        brute_force(slots, at + 1, current, out);
        current.pop();
    }
}

fn configuration_count() -> Check {
    let mut total = 0u128;
    for seed in 0..100 {
        let mut r = rng(30_000 + seed);
        let kb = KnowledgeBase::new(random_catalog(&mut r, Limits::default())).unwrap();
        let mut env = random_environment(&mut r, &kb);
        cap_configurations(&mut r, &mut env, &kb, 10_000);

        let mut slots: Vec<(String, Vec<String>)> = Vec::new();
        for (id, inst) in &env.instances {
            for m in &inst.enabled_models {
                let model = kb.catalog().models.iter().find(|x| x.id == m.model).unwrap();
                slots.push((format!("{id}:{m}"), model.methods.clone()));
            }
        }
        let mut all = Vec::new();
        let method_lists: Vec<Vec<String>> = slots.iter().map(|s| s.1.clone()).collect();
        brute_force(&method_lists, 0, &mut Vec::new(), &mut all);

        let count = count_configurations(&env, &kb).map_err(|e| e.to_string())?;
        let listed = enumerate_configurations(&env, &kb).map_err(|e| e.to_string())?;
        ensure!(
            count == all.len() as u128,
            "seed {seed}: count {count}, brute force {}",
            all.len()
        );
        ensure!(
            listed.len() == all.len(),
            "seed {seed}: enumerated {}, brute force {}",
            listed.len(),
            all.len()
        );
        let distinct: BTreeSet<String> = listed.iter().map(Configuration::key).collect();
        ensure!(
            distinct.len() == listed.len(),
            "seed {seed}: duplicate configurations"
        );
        let oracle_keys: BTreeSet<BTreeMap<String, String>> = all
            .iter()
            .map(|choice| {
                slots
                    .iter()
                    .map(|s| s.0.clone())
                    .zip(choice.iter().cloned())
                    .collect()
            })
            .collect();
        let got_keys: BTreeSet<BTreeMap<String, String>> = listed
            .iter()
            .map(|c| {
                c.choices
                    .iter()
                    .map(|(s, m)| (s.to_string(), m.clone()))
                    .collect()
            })
            .collect();
        ensure!(oracle_keys == got_keys, "seed {seed}: configuration sets differ");
        total += count;
    }
    let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
    let mut env = Environment::for_knowledge("fig", &kb);
    env.instantiate(&kb, "o1").unwrap();
    env.instantiate(&kb, "o2").unwrap();
    let fig = count_configurations(&env, &kb).map_err(|e| e.to_string())?;
    ensure!(fig == 12, "ship-and-waves fixture gives {fig}, expected 12");
    Ok(format!(
        "100 environments ({total} configurations) match brute force; fixture = 12"
    ))
}

// --------------------------------------------------------------- codegen

fn check_script(
    script: &str,
    env: &Environment,
    kb: &KnowledgeBase,
    steps: &[vso_core::TraversalRow],
) -> Result<(), String> {
    let lines: Vec<&str> = script.lines().collect();
    ensure!(script.ends_with('\n') && !script.contains('\r'), "line endings");
    ensure!(lines.iter().all(|l| l.trim_end() == *l), "trailing whitespace");
    let occurrences: usize = env
        .instances
        .values()
        .map(|inst| {
            inst.method_choice
                .values()
                .map(|m| kb.catalog().method(m).unwrap().ip_sequence.len())
                .sum::<usize>()
        })
        .sum();
    ensure!(
        lines.len() == occurrences,
        "{} statements for {occurrences} occurrences",
        lines.len()
    );

    // step_k -> (line index, package occurrence)
    let mut line_of: BTreeMap<String, usize> = BTreeMap::new();
    for (i, line) in lines.iter().enumerate() {
        let (label, _) = line.split_once(" = ").ok_or(format!("odd line {line}"))?;
        ensure!(label == format!("step_{}", i + 1), "line {i} is {label}");
        line_of.insert(label.to_owned(), i);
    }
    let step_of = |e: &Endpoint| -> Option<String> {
        steps
            .iter()
            .find(|r| r.node.instance == e.instance && r.node.occurrence == e.port.occurrence())
            .map(|r| r.step.clone())
    };
    // reference integrity: every `step_N.var` names an earlier step and one
    // of its outputs
    for (i, line) in lines.iter().enumerate() {
        let args = line.split_once('(').map(|x| x.1).unwrap_or("");
        for arg in args.trim_end_matches(')').split(", ") {
            let Some((_, value)) = arg.split_once('=') else {
                continue;
            };
            if let Some((step, var)) = value.split_once('.') {
                let j = *line_of
                    .get(step)
                    .ok_or(format!("{step} referenced but not emitted"))?;
                ensure!(j < i, "{step} referenced before emission on line {i}");
                let sp = &steps[j].node.sp;
                ensure!(
                    kb.catalog().software_package(sp).unwrap().output(var).is_some(),
                    "{step}.{var} is not an output of {sp}"
                );
            }
        }
    }
    // topological soundness for stored connections and relay adjacency
    let mut edges: Vec<(Endpoint, Endpoint)> = env
        .connections
        .iter()
        .map(|c| (c.source.clone(), c.target.clone()))
        .collect();
    for r in steps.iter().filter(|r| r.node.sp == "relay") {
        let mut prev = r.node.occurrence.clone();
        prev.position -= 1;
        let src = Endpoint::new(
            r.node.instance.clone(),
            vso_core::PortRef::new(prev.model.clone(), prev.method.clone(), prev.position, "y"),
        );
        let tgt = Endpoint::new(
            r.node.instance.clone(),
            vso_core::PortRef::new(prev.model, prev.method, r.node.occurrence.position, "x"),
        );
        edges.push((src, tgt));
    }
    for (src, tgt) in &edges {
        let (a, b) = (
            step_of(src).ok_or("missing producer")?,
            step_of(tgt).ok_or("missing consumer")?,
        );
        ensure!(line_of[&a] < line_of[&b], "{src} -> {tgt}: {a} after {b}");
        let expected = format!("{}={a}.{}", tgt.port.varname, src.port.varname);
        ensure!(lines[line_of[&b]].contains(&expected), "{b} lacks `{expected}`");
    }
    Ok(())
}

fn chain_environment(kb: &KnowledgeBase) -> Environment {
    let mut env = Environment::for_knowledge("wave_chain", kb);
    env.instantiate(kb, "o1").unwrap();
    env.instantiate(kb, "o2").unwrap();
    env.set_model_enabled(kb, "o1#1", &ModelPath::root("m2"), false)
        .unwrap();
    for (s, t) in [
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
    ] {
        env.connect(kb, &s, &t).unwrap();
    }
    env
}

fn codegen_determinism() -> Check {
    let mut statements = 0usize;
    for seed in 0..100 {
        let case = random_dag(&mut rng(40_000 + seed), 12);
        let kb = KnowledgeBase::new(case.catalog.clone()).unwrap();
        let env = case.environment(&kb);
        let vocab = DslVocabulary::generic(kb.catalog());
        let config = Configuration::current(&env);
        let first = generate_script(&env, &kb, &config, &vocab).map_err(|e| format!("seed {seed}: {e}"))?;
        for _ in 0..2 {
            let again = generate_script(&env, &kb, &config, &vocab).unwrap();
            ensure!(
                again.text.as_bytes() == first.text.as_bytes(),
                "seed {seed}: regeneration differs"
            );
        }
        // a fresh environment built in another order must not matter either
        let mut rebuilt = case.environment(&kb);
        rebuilt.connections = env.connections.iter().rev().cloned().collect();
        let other = generate_script(&rebuilt, &kb, &config, &vocab).unwrap();
        ensure!(
            other.text == first.text,
            "seed {seed}: depends on insertion order"
        );
        check_script(&first.text, &env, &kb, &first.steps).map_err(|e| format!("seed {seed}: {e}"))?;
        statements += first.steps.len();
    }

    let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
    let env = chain_environment(&kb);
    let script = generate_script(
        &env,
        &kb,
        &Configuration::current(&env),
        &DslVocabulary::generic(kb.catalog()),
    )
    .map_err(|e| e.to_string())?;
    let golden = std::fs::read_to_string(core_dir().join("tests/golden/wave_chain.generic.wf"))
        .map_err(|e| e.to_string())?;
    ensure!(
        script.text == golden,
        "chain script differs from golden:\n{}",
        script.text
    );
    Ok(format!(
        "100 random DAGs ({statements} statements) stable and ordered; chain golden matches"
    ))
}

// ----------------------------------------------------------- persistence

fn persistence_round_trip() -> Check {
    let mut files = 0;
    for entry in std::fs::read_dir(core_dir().join("examples/data")).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
        let name = path.display().to_string();
        let again = match path.extension().and_then(|e| e.to_str()) {
            Some(store::CATALOG_EXTENSION) => {
                store::save_catalog(&store::load_catalog(&bytes).map_err(|e| format!("{name}: {e}"))?)
                    .unwrap()
            }
            Some(store::ENVIRONMENT_EXTENSION) => {
                store::save_environment(&store::load_environment(&bytes).map_err(|e| format!("{name}: {e}"))?)
            }
            Some(store::VOCABULARY_EXTENSION) => {
                store::save_vocabulary(&store::load_vocabulary(&bytes).map_err(|e| format!("{name}: {e}"))?)
            }
            _ => continue,
        };
        ensure!(again == bytes, "{name}: save(load(b)) != b");
        files += 1;
    }

    let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
    let mut catalogs = vec![
        samples::ship_and_waves(),
        samples::linear_pipeline(5),
        Catalog::default(),
    ];
    let mut envs = vec![chain_environment(&kb)];
    for seed in 0..50 {
        let mut r = rng(50_000 + seed);
        let c = random_catalog(&mut r, Limits::default());
        let k = KnowledgeBase::new(c.clone()).unwrap();
        envs.push(random_environment(&mut r, &k));
        catalogs.push(c);
    }
    for c in &catalogs {
        let bytes = store::save_catalog(c).map_err(|e| e.to_string())?;
        let back = store::load_catalog(&bytes).map_err(|e| e.to_string())?;
        ensure!(back == c.normalized(), "catalog load(save(x)) != x");
        ensure!(
            store::save_catalog(&back).unwrap() == bytes,
            "catalog bytes unstable"
        );
    }
    for env in &envs {
        let bytes = store::save_environment(env);
        let back = store::load_environment(&bytes).map_err(|e| e.to_string())?;
        ensure!(&back == env, "environment load(save(x)) != x");
        ensure!(
            store::save_environment(&back) == bytes,
            "environment bytes unstable"
        );
    }
    let vocab = samples::ship_vocabulary();
    let back = store::load_vocabulary(&store::save_vocabulary(&vocab)).map_err(|e| e.to_string())?;
    ensure!(back == vocab, "vocabulary load(save(x)) != x");
    Ok(format!(
        "{files} shipped files byte-stable; {} catalogs, {} environments, 1 vocabulary round-trip",
        catalogs.len(),
        envs.len()
    ))
}

// ------------------------------------------------- API/library equivalence

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (u16, Vec<u8>) {
    use http_body_util::BodyExt;
    use tower::ServiceExt;
    let req = axum::http::Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(b) => axum::body::Body::from(b.to_string()),
            None => axum::body::Body::empty(),
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    (
        status,
        resp.into_body().collect().await.unwrap().to_bytes().to_vec(),
    )
}

async fn json_call(
    app: &axum::Router,
    method: &str,
    uri: &str,
    body: Option<Value>,
) -> Result<Value, String> {
    let (status, bytes) = call(app, method, uri, body).await;
    let v: Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    ensure!(status == 200, "{method} {uri}: {status} {v}");
    Ok(v)
}

async fn scripted_session() -> Check {
    let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
    let app = vso_service::router(Arc::new(vso_service::AppState::new(kb.clone())));

    let created = json_call(&app, "POST", "/v1/sessions", None).await?;
    let sid = created["session_id"].as_str().unwrap().to_owned();
    let base = format!("/v1/sessions/{sid}");
    json_call(
        &app,
        "POST",
        &format!("{base}/instances"),
        Some(json!({"revision": 1, "image": "o1"})),
    )
    .await?;
    json_call(
        &app,
        "POST",
        &format!("{base}/instances"),
        Some(json!({"revision": 2, "image": "o2"})),
    )
    .await?;
    let api_suggestions = json_call(&app, "GET", &format!("{base}/suggestions"), None).await?;
    let applied = json_call(
        &app,
        "POST",
        &format!("{base}/suggestions/apply"),
        Some(json!({"revision": 3})),
    )
    .await?;
    let api_compare = json_call(
        &app,
        "POST",
        &format!("{base}/compare"),
        Some(json!({"criterion": "critical-path", "data_units": 2.0})),
    )
    .await?;
    let api_script = json_call(
        &app,
        "POST",
        &format!("{base}/generate"),
        Some(json!({"vocabulary": "generic"})),
    )
    .await?;
    let (_, api_env) = call(&app, "GET", &format!("{base}/environment"), None).await;

    let mut env = Environment::for_knowledge("env", &kb);
    env.instantiate(&kb, "o1").unwrap();
    env.instantiate(&kb, "o2").unwrap();
    let lib_suggestions = env.suggest_connections(&kb).unwrap();
    let lib_applied = env.apply_all_suggestions(&kb).unwrap();
    let configs = enumerate_configurations(&env, &kb).unwrap();
    let lib_compare = compare_configurations(&env, &kb, &configs, Criterion::CriticalPath, 2.0).unwrap();
    let lib_script = generate_script(
        &env,
        &kb,
        &Configuration::current(&env),
        &DslVocabulary::generic(kb.catalog()),
    )
    .unwrap();

    ensure!(
        api_suggestions["suggestions"] == serde_json::to_value(&lib_suggestions).unwrap(),
        "suggestions differ"
    );
    ensure!(
        applied["applied"] == serde_json::to_value(&lib_applied).unwrap(),
        "applied connections differ"
    );
    ensure!(
        applied["revision"] == 4,
        "revision after apply is {}",
        applied["revision"]
    );
    ensure!(
        api_compare["reports"] == serde_json::to_value(&lib_compare).unwrap(),
        "compare reports differ"
    );
    ensure!(api_script["script"] == lib_script.text, "scripts differ");
    ensure!(
        api_env == store::save_environment(&env),
        "environment documents differ"
    );
    Ok(format!(
        "state, {} suggestion(s), {} reports and {}-line script identical",
        lib_suggestions.len(),
        lib_compare.len(),
        lib_script.steps.len()
    ))
}

fn api_library_equivalence() -> Check {
    tokio::runtime::Runtime::new()
        .map_err(|e| e.to_string())?
        .block_on(scripted_session())
}

fn main() -> ExitCode {
    let criteria: [Named; 8] = [
        ("lifting fixture exactness", lifting_fixture),
        ("IO derivation union laws", io_union_laws),
        ("filtration soundness", filtration_soundness),
        ("sameAs equivalence", same_as_equivalence),
        ("configuration count", configuration_count),
        (
            "codegen determinism and topological soundness",
            codegen_determinism,
        ),
        ("persistence round-trip", persistence_round_trip),
        ("API/library equivalence", api_library_equivalence),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
