//! Seeded random catalogs and environments shared by the acceptance runner
//! and the property tests.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vso_core::composer::ep;
use vso_core::io::{image_at_scope, model_paths};
use vso_core::model::*;
use vso_core::{count_configurations, Endpoint, Environment, KnowledgeBase, PortRef};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size bounds for [`random_catalog`].
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub packages_per_method: usize,
    pub methods_per_model: usize,
    pub models_per_object: usize,
    pub nesting: usize,
    pub uris: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            packages_per_method: 5,
            methods_per_model: 4,
            models_per_object: 3,
            nesting: 2,
            uris: 4,
        }
    }
}

struct Builder<'r> {
    rng: &'r mut TestRng,
    limits: Limits,
    catalog: Catalog,
    uris: Vec<String>,
    values: usize,
}

impl Builder<'_> {
    fn uri(&mut self) -> SemanticUri {
        let i = self.rng.random_range(0..self.uris.len());
        SemanticUri::new(self.uris[i].clone())
    }

    fn value(&mut self, p: f64) -> Option<String> {
        if self.rng.random_bool(p) {
            self.values += 1;
            Some(format!("v{}", self.values))
        } else {
            None
        }
    }

    fn software_package(&mut self) {
        let id = format!("sp{}", self.catalog.software_packages.len());
        let n_in = self.rng.random_range(1..=3);
        let n_out = self.rng.random_range(1..=2);
        let inputs = (0..n_in)
            .map(|i| InputParamSp {
                varname: format!("in{i}"),
                value: self.value(0.15),
            })
            .collect();
        let outputs = (0..n_out)
            .map(|i| OutputParamSp {
                varname: format!("out{i}"),
            })
            .collect();
        let perf = self.rng.random_bool(0.8).then(|| PerformanceModel {
            fixed_cost: self.rng.random_range(0..20) as f64,
            per_unit_cost: self.rng.random_range(0..4) as f64 * 0.5,
        });
        self.catalog.software_packages.push(SoftwarePackage {
            id,
            inputs,
            outputs,
            perf,
        });
    }

    fn implementing_package(&mut self) -> String {
        let id = format!("ip{}", self.catalog.implementing_packages.len());
        let sp_idx = self.rng.random_range(0..self.catalog.software_packages.len());
        let sp = self.catalog.software_packages[sp_idx].clone();
        let inputs = sp
            .inputs
            .iter()
            .map(|p| InputParamIp {
                base: p.varname.clone(),
                default_value: self.value(0.3),
                uri: self.uri(),
            })
            .collect();
        let outputs = sp
            .outputs
            .iter()
            .map(|p| OutputParamIp {
                base: p.varname.clone(),
                uri: self.uri(),
            })
            .collect();
        self.catalog.implementing_packages.push(ImplementingPackage {
            id: id.clone(),
            sp: sp.id,
            inputs,
            outputs,
        });
        id
    }

    fn method(&mut self) -> String {
        let id = format!("s{}", self.catalog.methods.len());
        let len = self.rng.random_range(1..=self.limits.packages_per_method);
        let mut seq = Vec::with_capacity(len);
        for _ in 0..len {
            let existing = self.catalog.implementing_packages.len();
            if existing > 0 && self.rng.random_bool(0.15) {
                seq.push(
                    self.catalog.implementing_packages[self.rng.random_range(0..existing)]
                        .id
                        .clone(),
                );
            } else {
                seq.push(self.implementing_package());
            }
        }
        self.catalog.methods.push(Method {
            id: id.clone(),
            ip_sequence: seq,
        });
        id
    }

    fn model(&mut self) -> String {
        let id = format!("m{}", self.catalog.models.len());
        let n = self.rng.random_range(1..=self.limits.methods_per_model);
        let methods: Vec<String> = (0..n).map(|_| self.method()).collect();
        let selected = methods[self.rng.random_range(0..n)].clone();
        self.catalog.models.push(SimulationModel {
            id: id.clone(),
            methods,
            selected_method: Some(selected),
        });
        id
    }

    fn image(&mut self, depth: usize) -> String {
        let id = format!("o{}", self.catalog.images.len());
        // reserve the slot so children get later ids
        self.catalog.images.push(VsoImage {
            id: id.clone(),
            properties: vec![],
            models: vec![],
            children: vec![],
        });
        let idx = self.catalog.images.len() - 1;
        let n_children = if depth < self.limits.nesting {
            self.rng.random_range(0..=(2 - depth.min(1)))
        } else {
            0
        };
        let children: Vec<String> = (0..n_children).map(|_| self.image(depth + 1)).collect();
        let min_models = usize::from(children.is_empty());
        let n_models = self.rng.random_range(min_models..=self.limits.models_per_object);
        let models = (0..n_models).map(|_| self.model()).collect();
        let properties = (0..self.rng.random_range(0..=2))
            .map(|i| Property {
                name: format!("prop{i}"),
                uri: self.uri(),
                value: self.value(0.5),
            })
            .collect();
        let img = &mut self.catalog.images[idx];
        img.models = models;
        img.children = children;
        img.properties = properties;
        id
    }
}

/// A valid catalog within `limits`. URIs are drawn from a small pool so
/// that matches are common; a few `sameAs` pairs join pool URIs with each
/// other and with URIs used nowhere else.
pub fn random_catalog(rng: &mut TestRng, limits: Limits) -> Catalog {
    let uris: Vec<String> = (0..limits.uris).map(|i| format!("urn:t:{i}")).collect();
    let mut b = Builder {
        rng,
        limits,
        catalog: Catalog::default(),
        uris,
        values: 0,
    };
    for _ in 0..b.rng.random_range(2..=5) {
        b.software_package();
    }
    for _ in 0..b.rng.random_range(1..=3) {
        b.image(0);
    }
    for k in 0..b.rng.random_range(0..=2) {
        let a = b.uri();
        let other = if b.rng.random_bool(0.5) {
            b.uri()
        } else {
            SemanticUri::new(format!("urn:ext:{k}"))
        };
        b.catalog.same_as.push(SameAs(a, other));
    }
    b.catalog
}

/// Every structural package port of an instance: (endpoint, uri, is_input).
pub fn structural_ports(
    env: &Environment,
    kb: &KnowledgeBase,
    instance: &str,
) -> Vec<(Endpoint, SemanticUri, bool)> {
    let catalog = kb.catalog();
    let inst = &env.instances[instance];
    let root = catalog.image(&inst.image).expect("known image");
    let mut out = Vec::new();
    for path in model_paths(root, catalog).expect("acyclic") {
        assert!(image_at_scope(root, &path.scope, catalog).is_some());
        let model = catalog.model(&path.model).expect("known model");
        for m in &model.methods {
            let method = catalog.method(m).expect("known method");
            for (pos, ip_id) in method.ip_sequence.iter().enumerate() {
                let ip = catalog.implementing_package(ip_id).expect("known ip");
                let port =
                    |var: &str| Endpoint::new(instance, PortRef::new(path.clone(), m.clone(), pos, var));
                for p in &ip.inputs {
                    out.push((port(&p.base), p.uri.clone(), true));
                }
                for p in &ip.outputs {
                    out.push((port(&p.base), p.uri.clone(), false));
                }
            }
        }
    }
    out
}

/// Up to three instances with random model toggles, method choices and
/// connections (some of which fail and are skipped).
pub fn random_environment(rng: &mut TestRng, kb: &KnowledgeBase) -> Environment {
    let catalog = kb.catalog();
    let mut env = Environment::for_knowledge("random", kb);
    for _ in 0..rng.random_range(1..=3) {
        let img = &catalog.images[rng.random_range(0..catalog.images.len())];
        let id = env.instantiate(kb, &img.id).expect("valid image");
        let root = catalog.image(&img.id).unwrap();
        for path in model_paths(root, catalog).unwrap() {
            if rng.random_bool(0.2) {
                env.set_model_enabled(kb, &id, &path, false).unwrap();
            } else if rng.random_bool(0.4) {
                let methods = &catalog.model(&path.model).unwrap().methods;
                let m = methods[rng.random_range(0..methods.len())].clone();
                env.choose_method(kb, &id, &path, &m).unwrap();
            }
        }
    }
    let mut ports = Vec::new();
    for id in env.instances.keys().cloned().collect::<Vec<_>>() {
        ports.extend(structural_ports(&env, kb, &id));
    }
    let inputs: Vec<_> = ports.iter().filter(|p| p.2).collect();
    let outputs: Vec<_> = ports.iter().filter(|p| !p.2).collect();
    for _ in 0..rng.random_range(0..=10) {
        if inputs.is_empty() || outputs.is_empty() {
            break;
        }
        let tgt = inputs[rng.random_range(0..inputs.len())];
        let matching: Vec<_> = outputs
            .iter()
            .filter(|o| kb.registry().equivalent(&o.1, &tgt.1))
            .collect();
        if matching.is_empty() {
            continue;
        }
        let src = matching[rng.random_range(0..matching.len())];
        let _ = env.connect(kb, &src.0, &tgt.0);
    }
    env
}

/// Disables randomly picked enabled models until at most `cap`
/// configurations remain.
pub fn cap_configurations(rng: &mut TestRng, env: &mut Environment, kb: &KnowledgeBase, cap: u128) {
    while count_configurations(env, kb).unwrap() > cap {
        let slots: Vec<(String, vso_core::ModelPath)> = env
            .instances
            .iter()
            .flat_map(|(id, i)| i.enabled_models.iter().map(move |m| (id.clone(), m.clone())))
            .collect();
        let (id, m) = &slots[rng.random_range(0..slots.len())];
        env.set_model_enabled(kb, id, m, false).unwrap();
    }
}

/// A random acyclic dataflow: one object per node, each with a single
/// model and method. Edges are stored connections from a node's last output
/// `y` to an input of a later node; some methods append a relay package
/// that is fed implicitly by adjacency. Node ids are shuffled so instance
/// order and dataflow order disagree.
#[derive(Debug, Clone)]
pub struct DagCase {
    pub catalog: Catalog,
    pub images: Vec<String>,
    pub connections: Vec<(Endpoint, Endpoint)>,
}

impl DagCase {
    pub fn environment(&self, kb: &KnowledgeBase) -> Environment {
        let mut env = Environment::for_knowledge("dag", kb);
        for img in &self.images {
            env.instantiate(kb, img).unwrap();
        }
        for (s, t) in &self.connections {
            env.connect(kb, s, t).unwrap();
        }
        env
    }
}

pub fn random_dag(rng: &mut TestRng, max_nodes: usize) -> DagCase {
    let n = rng.random_range(1..=max_nodes);
    let mut names: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        names.swap(i, rng.random_range(0..=i));
    }
    let mut catalog = Catalog::default();
    catalog.software_packages.push(SoftwarePackage {
        id: "relay".into(),
        inputs: vec![InputParamSp {
            varname: "x".into(),
            value: None,
        }],
        outputs: vec![OutputParamSp { varname: "y".into() }],
        perf: Some(PerformanceModel::fixed(1.0)),
    });
    let mut images = Vec::new();
    let mut connections = Vec::new();
    let mut last_pos = Vec::new();
    for k in 0..n {
        let node = format!("n{:02}", names[k]);
        let arity = rng.random_range(1..=3usize);
        let sp_id = format!("op_{node}");
        catalog.software_packages.push(SoftwarePackage {
            id: sp_id.clone(),
            inputs: (0..arity)
                .map(|i| InputParamSp {
                    varname: format!("x{i}"),
                    value: None,
                })
                .collect(),
            outputs: vec![OutputParamSp { varname: "y".into() }],
            perf: Some(PerformanceModel::fixed(rng.random_range(1..10) as f64)),
        });
        let relay = rng.random_bool(0.3);
        let mut inputs = Vec::new();
        let mut preds = Vec::new();
        for i in 0..arity {
            let pred = (k > 0 && rng.random_bool(0.7)).then(|| rng.random_range(0..k));
            match pred {
                Some(j) => {
                    inputs.push(InputParamIp {
                        base: format!("x{i}"),
                        default_value: None,
                        uri: SemanticUri::new(format!("urn:dag:{j}")),
                    });
                    preds.push((j, i));
                }
                None => inputs.push(InputParamIp {
                    base: format!("x{i}"),
                    default_value: Some(format!("lit_{node}_{i}")),
                    uri: SemanticUri::new(format!("urn:lit:{k}:{i}")),
                }),
            }
        }
        let head_out = if relay {
            format!("urn:mid:{k}")
        } else {
            format!("urn:dag:{k}")
        };
        let head = format!("ip_{node}");
        catalog.implementing_packages.push(ImplementingPackage {
            id: head.clone(),
            sp: sp_id,
            inputs,
            outputs: vec![OutputParamIp {
                base: "y".into(),
                uri: SemanticUri::new(head_out.clone()),
            }],
        });
        let mut seq = vec![head];
        if relay {
            let id = format!("relay_{node}");
            catalog.implementing_packages.push(ImplementingPackage {
                id: id.clone(),
                sp: "relay".into(),
                inputs: vec![InputParamIp {
                    base: "x".into(),
                    default_value: None,
                    uri: SemanticUri::new(head_out),
                }],
                outputs: vec![OutputParamIp {
                    base: "y".into(),
                    uri: SemanticUri::new(format!("urn:dag:{k}")),
                }],
            });
            seq.push(id);
        }
        last_pos.push(seq.len() - 1);
        let (model, method) = (format!("m_{node}"), format!("s_{node}"));
        catalog.methods.push(Method {
            id: method.clone(),
            ip_sequence: seq,
        });
        catalog.models.push(SimulationModel {
            id: model.clone(),
            methods: vec![method.clone()],
            selected_method: Some(method.clone()),
        });
        catalog.images.push(VsoImage {
            id: node.clone(),
            properties: vec![],
            models: vec![model.clone()],
            children: vec![],
        });
        images.push(node.clone());
        for (j, i) in preds {
            let src_node = format!("n{:02}", names[j]);
            connections.push((
                ep(
                    &format!("{src_node}#1"),
                    &format!("m_{src_node}"),
                    &format!("s_{src_node}"),
                    last_pos[j],
                    "y",
                ),
                ep(&format!("{node}#1"), &model, &method, 0, &format!("x{i}")),
            ));
        }
    }
    DagCase {
        catalog,
        images,
        connections,
    }
}
