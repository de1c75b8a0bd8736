//! The design-time environment: instantiated objects plus user-defined
//! package-level connections.
//!
//! Connections are stored only between package parameters. Method-, model-
//! and object-level connections are always derived from them by lifting.
//!
//! Inside a method, two adjacent packages are additionally linked wherever an
//! output of the first is semantically equal to an input of the second that
//! has no explicit incoming connection. These implicit links count as feeds
//! for filtration and code generation but are never stored.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{
    derive_vso_io, image_at_scope, model_paths, ModelSelection, ObjectIo, Param, ParamSite, Selection,
};
use crate::knowledge::KnowledgeBase;
use crate::lift::{lift_connections, Level};
use crate::model::{SemanticUri, VsoImage};
use crate::paths::{Endpoint, ModelPath, OccurrenceRef, PortRef};
use crate::validate::{ValidationReport, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VsoInstance {
    pub instance_id: String,
    pub image: String,
    pub enabled_models: BTreeSet<ModelPath>,
    pub method_choice: BTreeMap<ModelPath, String>,
}

impl ModelSelection for VsoInstance {
    fn is_enabled(&self, path: &ModelPath) -> bool {
        self.enabled_models.contains(path)
    }
    fn chosen_method(&self, path: &ModelPath) -> Option<&str> {
        self.method_choice.get(path).map(String::as_str)
    }
}

impl VsoInstance {
    pub fn selection(&self) -> Selection {
        Selection {
            enabled: self.enabled_models.clone(),
            methods: self.method_choice.clone(),
        }
    }
}

/// A directed package-level connection, output to input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Connection {
    pub source: Endpoint,
    pub target: Endpoint,
}

/// A feed between two active package parameters; `implicit` marks
/// intra-method adjacency links.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub source: Endpoint,
    pub target: Endpoint,
    pub implicit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateConnection {
    pub source: Endpoint,
    pub target: Endpoint,
    pub source_uri: SemanticUri,
    pub target_uri: SemanticUri,
}

impl CandidateConnection {
    fn sort_key(&self) -> (&str, &str, &str, &str, &Endpoint, &Endpoint) {
        (
            &self.source.instance,
            &self.source.port.varname,
            &self.target.instance,
            &self.target.port.varname,
            &self.source,
            &self.target,
        )
    }
}

/// Visible parameters of one element at the requested level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementParams {
    pub element: String,
    pub inputs: Vec<Param>,
    pub outputs: Vec<Param>,
}

/// A package parameter resolved against the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedPort {
    pub ip: String,
    pub uri: SemanticUri,
    pub is_input: bool,
    pub value: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub env_id: String,
    pub catalog_version: Option<String>,
    pub instances: BTreeMap<String, VsoInstance>,
    pub connections: BTreeSet<Connection>,
}

/// Labels of the element a package occurrence belongs to, per level.
pub fn element_label(level: Level, instance: &str, occ: &OccurrenceRef) -> String {
    match level {
        Level::Ip => format!("{instance}:{occ}"),
        Level::Method => format!("{instance}:{}/{}", occ.model, occ.method),
        Level::Model => format!("{instance}:{}", occ.model),
        Level::Object => instance.to_owned(),
    }
}

impl Environment {
    pub fn new(env_id: impl Into<String>) -> Self {
        Environment {
            env_id: env_id.into(),
            ..Default::default()
        }
    }

    pub fn for_knowledge(env_id: impl Into<String>, kb: &KnowledgeBase) -> Self {
        Environment {
            env_id: env_id.into(),
            catalog_version: Some(kb.version().to_owned()),
            ..Default::default()
        }
    }

    pub fn instance(&self, id: &str) -> Result<&VsoInstance> {
        self.instances
            .get(id)
            .ok_or_else(|| Error::UnknownInstance(id.to_owned()))
    }

    fn image<'k>(&self, kb: &'k KnowledgeBase, inst: &VsoInstance) -> Result<&'k VsoImage> {
        kb.catalog()
            .image(&inst.image)
            .ok_or_else(|| Error::UnknownImage(inst.image.clone()))
    }

    /// Adds a fresh instance of `image_id` with every model enabled on its
    /// default method. Ids are `<image>#<n>`, `n` counting from 1.
    pub fn instantiate(&mut self, kb: &KnowledgeBase, image_id: &str) -> Result<String> {
        let image = kb
            .catalog()
            .image(image_id)
            .ok_or_else(|| Error::UnknownImage(image_id.to_owned()))?;
        let paths = model_paths(image, kb.catalog())?;
        let mut method_choice = BTreeMap::new();
        for path in &paths {
            let model = kb
                .catalog()
                .model(&path.model)
                .ok_or_else(|| Error::DanglingReference {
                    from: image_id.to_owned(),
                    to: path.model.clone(),
                })?;
            let method = model
                .selected_method
                .clone()
                .ok_or_else(|| Error::NoMethodSelected {
                    model: model.id.clone(),
                })?;
            method_choice.insert(path.clone(), method);
        }
        let prefix = format!("{image_id}#");
        let ordinal = self
            .instances
            .keys()
            .filter_map(|k| k.strip_prefix(&prefix)?.parse::<u64>().ok())
            .max()
            .unwrap_or(0)
            + 1;
        let instance_id = format!("{image_id}#{ordinal}");
        self.instances.insert(
            instance_id.clone(),
            VsoInstance {
                instance_id: instance_id.clone(),
                image: image_id.to_owned(),
                enabled_models: paths.into_iter().collect(),
                method_choice,
            },
        );
        Ok(instance_id)
    }

    /// Resolves a package parameter structurally: the model must belong to
    /// the (nested) image, the method to the model, and the varname to the
    /// package at that position. The model need not be enabled nor the
    /// method chosen.
    pub fn resolve(&self, kb: &KnowledgeBase, endpoint: &Endpoint) -> Result<ResolvedPort> {
        let unknown = || Error::UnknownEndpoint(endpoint.to_string());
        let inst = self.instance(&endpoint.instance)?;
        let root = self.image(kb, inst)?;
        let catalog = kb.catalog();
        let port = &endpoint.port;
        let owner = image_at_scope(root, &port.model.scope, catalog).ok_or_else(unknown)?;
        if !owner.models.contains(&port.model.model) {
            return Err(unknown());
        }
        let model = catalog.model(&port.model.model).ok_or_else(unknown)?;
        if !model.methods.contains(&port.method) {
            return Err(unknown());
        }
        let method = catalog.method(&port.method).ok_or_else(unknown)?;
        let ip_id = method.ip_sequence.get(port.position).ok_or_else(unknown)?;
        let ip = catalog.implementing_package(ip_id).ok_or_else(unknown)?;
        if let Some(p) = ip.inputs.iter().find(|p| p.base == port.varname) {
            let base = catalog
                .software_package(&ip.sp)
                .and_then(|sp| sp.input(&p.base))
                .and_then(|b| b.value.clone());
            return Ok(ResolvedPort {
                ip: ip.id.clone(),
                uri: p.uri.clone(),
                is_input: true,
                value: p.default_value.clone().or(base),
            });
        }
        if let Some(p) = ip.outputs.iter().find(|p| p.base == port.varname) {
            return Ok(ResolvedPort {
                ip: ip.id.clone(),
                uri: p.uri.clone(),
                is_input: false,
                value: None,
            });
        }
        Err(unknown())
    }

    /// Adds a user-defined connection from an output to a semantically equal,
    /// currently unfed input.
    pub fn connect(&mut self, kb: &KnowledgeBase, source: &Endpoint, target: &Endpoint) -> Result<()> {
        let src = self.resolve(kb, source)?;
        let tgt = self.resolve(kb, target)?;
        if src.is_input {
            return Err(Error::UnknownEndpoint(format!("{source} is not an output")));
        }
        if !tgt.is_input {
            return Err(Error::UnknownEndpoint(format!("{target} is not an input")));
        }
        if !kb.registry().semantically_equal(&src.uri, &tgt.uri)? {
            return Err(Error::SemanticMismatch {
                source_port: source.to_string(),
                target: target.to_string(),
            });
        }
        if self.connections.iter().any(|c| &c.target == target) {
            return Err(Error::InputOccupied(target.to_string()));
        }
        self.connections.insert(Connection {
            source: source.clone(),
            target: target.clone(),
        });
        Ok(())
    }

    pub fn disconnect(&mut self, source: &Endpoint, target: &Endpoint) -> Result<()> {
        let conn = Connection {
            source: source.clone(),
            target: target.clone(),
        };
        if self.connections.remove(&conn) {
            Ok(())
        } else {
            Err(Error::NotConnected {
                source_port: source.to_string(),
                target: target.to_string(),
            })
        }
    }

    fn model_slot(&self, kb: &KnowledgeBase, instance: &str, model: &ModelPath) -> Result<()> {
        let inst = self.instance(instance)?;
        let image = self.image(kb, inst)?;
        if !model_paths(image, kb.catalog())?.contains(model) {
            return Err(Error::UnknownModel {
                instance: instance.to_owned(),
                model: model.to_string(),
            });
        }
        Ok(())
    }

    /// Switches a model on (restoring its default method) or off (dropping
    /// its method choice).
    pub fn set_model_enabled(
        &mut self,
        kb: &KnowledgeBase,
        instance: &str,
        model: &ModelPath,
        enabled: bool,
    ) -> Result<()> {
        self.model_slot(kb, instance, model)?;
        let default = kb
            .catalog()
            .model(&model.model)
            .and_then(|m| m.selected_method.clone())
            .ok_or_else(|| Error::NoMethodSelected {
                model: model.model.clone(),
            })?;
        let inst = self.instances.get_mut(instance).expect("checked above");
        if enabled {
            if inst.enabled_models.insert(model.clone()) {
                inst.method_choice.insert(model.clone(), default);
            }
        } else {
            inst.enabled_models.remove(model);
            inst.method_choice.remove(model);
        }
        Ok(())
    }

    pub fn choose_method(
        &mut self,
        kb: &KnowledgeBase,
        instance: &str,
        model: &ModelPath,
        method: &str,
    ) -> Result<()> {
        self.model_slot(kb, instance, model)?;
        let m = kb.catalog().model(&model.model).expect("validated catalog");
        if !m.methods.iter().any(|s| s == method) {
            return Err(Error::UnknownMethod {
                model: model.model.clone(),
                method: method.to_owned(),
            });
        }
        let inst = self.instances.get_mut(instance).expect("checked above");
        if !inst.enabled_models.contains(model) {
            return Err(Error::InvalidConfiguration(format!(
                "model {model} of {instance} is disabled"
            )));
        }
        inst.method_choice.insert(model.clone(), method.to_owned());
        Ok(())
    }

    /// Generalized (unfiltered) parameters of every instance under the given
    /// per-instance selections.
    pub(crate) fn active_io(
        &self,
        kb: &KnowledgeBase,
        selections: &BTreeMap<String, Selection>,
    ) -> Result<BTreeMap<String, ObjectIo>> {
        let mut out = BTreeMap::new();
        for (id, inst) in &self.instances {
            let image = self.image(kb, inst)?;
            let sel = selections.get(id).cloned().unwrap_or_else(|| inst.selection());
            out.insert(id.clone(), derive_vso_io(image, &sel, kb.catalog())?);
        }
        Ok(out)
    }

    pub(crate) fn current_selections(&self) -> BTreeMap<String, Selection> {
        self.instances
            .iter()
            .map(|(id, inst)| (id.clone(), inst.selection()))
            .collect()
    }

    /// Explicit connections between active ports plus implicit intra-method
    /// adjacency links, for the given active parameter sets.
    pub(crate) fn links(&self, kb: &KnowledgeBase, io: &BTreeMap<String, ObjectIo>) -> Vec<Link> {
        let mut active_in: BTreeMap<Endpoint, &Param> = BTreeMap::new();
        let mut active_out: BTreeMap<Endpoint, &Param> = BTreeMap::new();
        for (inst, obj) in io {
            for p in &obj.inputs {
                if let Some(port) = p.site.port() {
                    active_in.insert(Endpoint::new(inst.clone(), port.clone()), p);
                }
            }
            for p in &obj.outputs {
                if let Some(port) = p.site.port() {
                    active_out.insert(Endpoint::new(inst.clone(), port.clone()), p);
                }
            }
        }

        let mut links: Vec<Link> = self
            .connections
            .iter()
            .filter(|c| active_out.contains_key(&c.source) && active_in.contains_key(&c.target))
            .map(|c| Link {
                source: c.source.clone(),
                target: c.target.clone(),
                implicit: false,
            })
            .collect();
        let explicitly_fed: BTreeSet<Endpoint> = links.iter().map(|l| l.target.clone()).collect();

        // outputs grouped by (instance, occurrence) for adjacency lookups
        let mut outputs_at: BTreeMap<(&str, OccurrenceRef), Vec<(&Endpoint, &Param)>> = BTreeMap::new();
        for (ep, p) in &active_out {
            outputs_at
                .entry((ep.instance.as_str(), ep.port.occurrence()))
                .or_default()
                .push((ep, p));
        }
        for (ep, p) in &active_in {
            if ep.port.position == 0 || explicitly_fed.contains(ep) {
                continue;
            }
            let mut prev = ep.port.occurrence();
            prev.position -= 1;
            let Some(candidates) = outputs_at.get(&(ep.instance.as_str(), prev)) else {
                continue;
            };
            // candidates are sorted by endpoint, i.e. by varname
            if let Some((src, _)) = candidates
                .iter()
                .find(|(_, out)| kb.registry().equivalent(&out.uri, &p.uri))
            {
                links.push(Link {
                    source: (*src).clone(),
                    target: ep.clone(),
                    implicit: true,
                });
            }
        }
        links.sort();
        links
    }

    /// Filtered parameters of one instance, grouped by element at `level`.
    ///
    /// An input stays visible only if its effective value is unset and
    /// nothing feeds it; an output only if nothing consumes it. Properties
    /// are reported at the object level only.
    pub fn visible_params(
        &self,
        kb: &KnowledgeBase,
        instance: &str,
        level: Level,
    ) -> Result<Vec<ElementParams>> {
        self.instance(instance)?;
        let io = self.active_io(kb, &self.current_selections())?;
        let links = self.links(kb, &io);
        let fed: BTreeSet<&Endpoint> = links.iter().map(|l| &l.target).collect();
        let consumed: BTreeSet<&Endpoint> = links.iter().map(|l| &l.source).collect();
        let obj = &io[instance];

        let mut groups: BTreeMap<String, ElementParams> = BTreeMap::new();
        let mut group = |site: &ParamSite| -> Option<String> {
            let element = match site {
                ParamSite::Package { port, .. } => element_label(level, instance, &port.occurrence()),
                ParamSite::Property { .. } if level == Level::Object => instance.to_owned(),
                ParamSite::Property { .. } => return None,
            };
            groups.entry(element.clone()).or_insert_with(|| ElementParams {
                element: element.clone(),
                inputs: Vec::new(),
                outputs: Vec::new(),
            });
            Some(element)
        };
        let mut inputs = Vec::new();
        for p in &obj.inputs {
            let hidden = p.value.is_some()
                || p.site
                    .port()
                    .is_some_and(|port| fed.contains(&Endpoint::new(instance, port.clone())));
            if let Some(g) = group(&p.site) {
                if !hidden {
                    inputs.push((g, p.clone()));
                }
            }
        }
        let mut outputs = Vec::new();
        for p in &obj.outputs {
            let hidden = p
                .site
                .port()
                .is_some_and(|port| consumed.contains(&Endpoint::new(instance, port.clone())));
            if let Some(g) = group(&p.site) {
                if !hidden {
                    outputs.push((g, p.clone()));
                }
            }
        }
        for (g, p) in inputs {
            groups.get_mut(&g).expect("grouped").inputs.push(p);
        }
        for (g, p) in outputs {
            groups.get_mut(&g).expect("grouped").outputs.push(p);
        }
        Ok(groups.into_values().collect())
    }

    /// Flattened object-level view of [`visible_params`](Self::visible_params).
    pub fn visible_object_params(&self, kb: &KnowledgeBase, instance: &str) -> Result<ObjectIo> {
        let mut io = ObjectIo::default();
        for g in self.visible_params(kb, instance, Level::Object)? {
            io.inputs.extend(g.inputs);
            io.outputs.extend(g.outputs);
        }
        Ok(io)
    }

    /// Candidate connections between visible package outputs and visible
    /// package inputs of different instances whose URIs are semantically
    /// equal, ordered by (source instance, source varname, target instance,
    /// target varname).
    pub fn suggest_connections(&self, kb: &KnowledgeBase) -> Result<Vec<CandidateConnection>> {
        let mut visible: BTreeMap<&str, ObjectIo> = BTreeMap::new();
        for id in self.instances.keys() {
            visible.insert(id, self.visible_object_params(kb, id)?);
        }
        let occupied: BTreeSet<&Endpoint> = self.connections.iter().map(|c| &c.target).collect();
        let mut out = Vec::new();
        for (src_inst, src_io) in &visible {
            for out_p in &src_io.outputs {
                let Some(src_port) = out_p.site.port() else {
                    continue;
                };
                for (tgt_inst, tgt_io) in &visible {
                    if src_inst == tgt_inst {
                        continue;
                    }
                    for in_p in &tgt_io.inputs {
                        let Some(tgt_port) = in_p.site.port() else {
                            continue;
                        };
                        let target = Endpoint::new(*tgt_inst, tgt_port.clone());
                        if occupied.contains(&target) || !kb.registry().equivalent(&out_p.uri, &in_p.uri) {
                            continue;
                        }
                        out.push(CandidateConnection {
                            source: Endpoint::new(*src_inst, src_port.clone()),
                            target,
                            source_uri: out_p.uri.clone(),
                            target_uri: in_p.uri.clone(),
                        });
                    }
                }
            }
        }
        out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(out)
    }

    /// Applies every current suggestion in order, skipping those an earlier
    /// application invalidated. Returns the connections actually added.
    pub fn apply_all_suggestions(&mut self, kb: &KnowledgeBase) -> Result<Vec<Connection>> {
        let mut applied = Vec::new();
        for c in self.suggest_connections(kb)? {
            match self.connect(kb, &c.source, &c.target) {
                Ok(()) => applied.push(Connection {
                    source: c.source,
                    target: c.target,
                }),
                Err(Error::InputOccupied(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(applied)
    }

    /// Object-level connect gesture: succeeds only when exactly one
    /// candidate joins the two instances in that direction.
    pub fn connect_objects(
        &mut self,
        kb: &KnowledgeBase,
        source_instance: &str,
        target_instance: &str,
    ) -> Result<Connection> {
        self.instance(source_instance)?;
        self.instance(target_instance)?;
        let matches: Vec<CandidateConnection> = self
            .suggest_connections(kb)?
            .into_iter()
            .filter(|c| c.source.instance == source_instance && c.target.instance == target_instance)
            .collect();
        match matches.as_slice() {
            [only] => {
                self.connect(kb, &only.source, &only.target)?;
                Ok(Connection {
                    source: only.source.clone(),
                    target: only.target.clone(),
                })
            }
            [] => Err(Error::NoCandidate {
                source_instance: source_instance.to_owned(),
                target_instance: target_instance.to_owned(),
            }),
            many => Err(Error::AmbiguousConnection {
                source_instance: source_instance.to_owned(),
                target_instance: target_instance.to_owned(),
                count: many.len(),
            }),
        }
    }

    /// Stored connections between active ports, lifted to `level`.
    pub fn lifted_view(&self, kb: &KnowledgeBase, level: Level) -> Result<BTreeSet<(String, String)>> {
        let io = self.active_io(kb, &self.current_selections())?;
        let mut active: BTreeSet<Endpoint> = BTreeSet::new();
        for (inst, obj) in &io {
            for p in obj.inputs.iter().chain(&obj.outputs) {
                if let Some(port) = p.site.port() {
                    active.insert(Endpoint::new(inst.clone(), port.clone()));
                }
            }
        }
        let mut maps: [BTreeMap<String, String>; 3] = Default::default();
        let mut view: BTreeSet<(String, String)> = BTreeSet::new();
        for c in &self.connections {
            if !(active.contains(&c.source) && active.contains(&c.target)) {
                continue;
            }
            let mut pair = Vec::with_capacity(2);
            for ep in [&c.source, &c.target] {
                let occ = ep.port.occurrence();
                let labels: Vec<String> = Level::ALL
                    .iter()
                    .map(|&l| element_label(l, &ep.instance, &occ))
                    .collect();
                for i in 0..3 {
                    maps[i].insert(labels[i].clone(), labels[i + 1].clone());
                }
                pair.push(labels[0].clone());
            }
            view.insert((pair[0].clone(), pair[1].clone()));
        }
        for map in maps.iter().take(level as usize) {
            view = lift_connections(&view, map)?;
        }
        Ok(view)
    }

    /// Checks the environment against a knowledge base.
    pub fn validate(&self, kb: &KnowledgeBase) -> ValidationReport {
        use ViolationKind::*;
        let mut r = ValidationReport::default();
        if let Some(v) = &self.catalog_version {
            if v != kb.version() {
                r.push(
                    CatalogVersionMismatch,
                    format!("environment built for {v}, catalog is {}", kb.version()),
                );
            }
        }
        for (id, inst) in &self.instances {
            if id != &inst.instance_id {
                r.push(
                    UnknownEndpoint,
                    format!("instance key {id} holds {}", inst.instance_id),
                );
            }
            let Some(image) = kb.catalog().image(&inst.image) else {
                r.push(UnknownImage, format!("{id}\u{2192}{}", inst.image));
                continue;
            };
            let paths: BTreeSet<ModelPath> = match model_paths(image, kb.catalog()) {
                Ok(p) => p.into_iter().collect(),
                Err(e) => {
                    r.push(UnknownImage, format!("{id}: {e}"));
                    continue;
                }
            };
            for m in &inst.enabled_models {
                if !paths.contains(m) {
                    r.push(UnknownModel, format!("{id}: {m}"));
                }
            }
            for (m, s) in &inst.method_choice {
                if !inst.enabled_models.contains(m) {
                    r.push(
                        UnknownModel,
                        format!("{id}: method choice for disabled model {m}"),
                    );
                }
                match kb.catalog().model(&m.model) {
                    Some(model) if model.methods.contains(s) => {}
                    _ => r.push(UnknownMethod, format!("{id}: {m}={s}")),
                }
            }
        }
        let mut fed = BTreeSet::new();
        for c in &self.connections {
            let (src, tgt) = match (self.resolve(kb, &c.source), self.resolve(kb, &c.target)) {
                (Ok(s), Ok(t)) => (s, t),
                (Err(e), _) | (_, Err(e)) => {
                    r.push(UnknownEndpoint, e.to_string());
                    continue;
                }
            };
            if src.is_input || !tgt.is_input {
                r.push(
                    UnknownEndpoint,
                    format!("{} -> {} has wrong direction", c.source, c.target),
                );
            }
            if !kb.registry().equivalent(&src.uri, &tgt.uri) {
                r.push(SemanticMismatch, format!("{} -> {}", c.source, c.target));
            }
            if !fed.insert(&c.target) {
                r.push(InputOccupied, c.target.to_string());
            }
        }
        r
    }
}

/// Convenience for building endpoints in code: `ep("o1#1", "m1", "s2", 1, "out")`.
pub fn ep(instance: &str, model: &str, method: &str, position: usize, varname: &str) -> Endpoint {
    Endpoint::new(
        instance,
        PortRef::new(ModelPath::root(model), method, position, varname),
    )
}
