//! Catalog well-formedness checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{is_valid_identifier, Catalog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    InvalidIdentifier,
    DuplicateId,
    DuplicateParam,
    DuplicateProperty,
    MissingMandatoryIo,
    InvalidPerformanceModel,
    DanglingReference,
    UnknownBaseParam,
    PartialInheritance,
    EmptyUri,
    EmptySequence,
    NoMethods,
    SelectedMethodInvalid,
    CyclicContainment,
    // environment checks
    UnknownImage,
    UnknownModel,
    UnknownMethod,
    UnknownEndpoint,
    SemanticMismatch,
    InputOccupied,
    CatalogVersionMismatch,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn push(&mut self, kind: ViolationKind, message: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_ids<'a>(
    report: &mut ValidationReport,
    kind: &str,
    ids: impl Iterator<Item = &'a str>,
) -> BTreeSet<&'a str> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !is_valid_identifier(id) {
            report.push(ViolationKind::InvalidIdentifier, format!("{kind} `{id}`"));
        }
        if !seen.insert(id) {
            report.push(ViolationKind::DuplicateId, format!("{kind} {id}"));
        }
    }
    seen
}

fn check_unique_names<'a>(
    report: &mut ValidationReport,
    owner: &str,
    names: impl Iterator<Item = &'a str>,
    kind: ViolationKind,
) {
    let mut seen = BTreeSet::new();
    for n in names {
        if !is_valid_identifier(n) {
            report.push(ViolationKind::InvalidIdentifier, format!("{owner}.{n}"));
        }
        if !seen.insert(n) {
            report.push(kind, format!("{owner}.{n}"));
        }
    }
}

/// Lists every violated invariant. An empty report means the catalog is
/// well-formed. Pure: never mutates the catalog.
pub fn validate_catalog(catalog: &Catalog) -> ValidationReport {
    use ViolationKind::*;
    let mut r = ValidationReport::default();

    let sp_ids = check_ids(
        &mut r,
        "software package",
        catalog.software_packages.iter().map(|x| x.id.as_str()),
    );
    let ip_ids = check_ids(
        &mut r,
        "implementing package",
        catalog.implementing_packages.iter().map(|x| x.id.as_str()),
    );
    let method_ids = check_ids(&mut r, "method", catalog.methods.iter().map(|x| x.id.as_str()));
    let model_ids = check_ids(&mut r, "model", catalog.models.iter().map(|x| x.id.as_str()));
    let image_ids = check_ids(&mut r, "image", catalog.images.iter().map(|x| x.id.as_str()));

    for sp in &catalog.software_packages {
        if sp.inputs.is_empty() || sp.outputs.is_empty() {
            r.push(
                MissingMandatoryIo,
                format!("{} needs at least one input and one output", sp.id),
            );
        }
        check_unique_names(
            &mut r,
            &sp.id,
            sp.inputs.iter().map(|p| p.varname.as_str()),
            DuplicateParam,
        );
        check_unique_names(
            &mut r,
            &sp.id,
            sp.outputs.iter().map(|p| p.varname.as_str()),
            DuplicateParam,
        );
        if let Some(perf) = &sp.perf {
            if !perf.is_valid() {
                r.push(
                    InvalidPerformanceModel,
                    format!(
                        "{}: fixed_cost={} per_unit_cost={}",
                        sp.id, perf.fixed_cost, perf.per_unit_cost
                    ),
                );
            }
        }
    }

    for ip in &catalog.implementing_packages {
        for p in &ip.inputs {
            if p.uri.as_str().is_empty() {
                r.push(EmptyUri, format!("{}.{}", ip.id, p.base));
            }
        }
        for p in &ip.outputs {
            if p.uri.as_str().is_empty() {
                r.push(EmptyUri, format!("{}.{}", ip.id, p.base));
            }
        }
        let Some(sp) = catalog.software_package(&ip.sp) else {
            if !sp_ids.contains(ip.sp.as_str()) {
                r.push(DanglingReference, format!("{}\u{2192}{}", ip.id, ip.sp));
            }
            continue;
        };
        let mut wrapped_in: BTreeMap<&str, usize> = BTreeMap::new();
        for p in &ip.inputs {
            if sp.input(&p.base).is_none() {
                r.push(
                    UnknownBaseParam,
                    format!("{}.{} (input of {})", ip.id, p.base, sp.id),
                );
            }
            *wrapped_in.entry(p.base.as_str()).or_default() += 1;
        }
        let mut wrapped_out: BTreeMap<&str, usize> = BTreeMap::new();
        for p in &ip.outputs {
            if sp.output(&p.base).is_none() {
                r.push(
                    UnknownBaseParam,
                    format!("{}.{} (output of {})", ip.id, p.base, sp.id),
                );
            }
            *wrapped_out.entry(p.base.as_str()).or_default() += 1;
        }
        for base in &sp.inputs {
            match wrapped_in.get(base.varname.as_str()) {
                Some(1) => {}
                Some(n) => r.push(
                    PartialInheritance,
                    format!("{} wraps input {}.{} {n} times", ip.id, sp.id, base.varname),
                ),
                None => r.push(
                    PartialInheritance,
                    format!("{} does not wrap input {}.{}", ip.id, sp.id, base.varname),
                ),
            }
        }
        for base in &sp.outputs {
            match wrapped_out.get(base.varname.as_str()) {
                Some(1) => {}
                Some(n) => r.push(
                    PartialInheritance,
                    format!("{} wraps output {}.{} {n} times", ip.id, sp.id, base.varname),
                ),
                None => r.push(
                    PartialInheritance,
                    format!("{} does not wrap output {}.{}", ip.id, sp.id, base.varname),
                ),
            }
        }
    }

    for m in &catalog.methods {
        if m.ip_sequence.is_empty() {
            r.push(EmptySequence, m.id.clone());
        }
        for ip in &m.ip_sequence {
            if !ip_ids.contains(ip.as_str()) {
                r.push(DanglingReference, format!("{}\u{2192}{ip}", m.id));
            }
        }
    }

    for model in &catalog.models {
        if model.methods.is_empty() {
            r.push(NoMethods, model.id.clone());
        }
        let mut seen = BTreeSet::new();
        for s in &model.methods {
            if !method_ids.contains(s.as_str()) {
                r.push(DanglingReference, format!("{}\u{2192}{s}", model.id));
            }
            if !seen.insert(s.as_str()) {
                r.push(DuplicateId, format!("{} lists method {s} twice", model.id));
            }
        }
        match &model.selected_method {
            Some(s) if model.methods.contains(s) => {}
            Some(s) => r.push(
                SelectedMethodInvalid,
                format!("{} selects {s}, which is not among its methods", model.id),
            ),
            None => r.push(SelectedMethodInvalid, format!("{} selects no method", model.id)),
        }
    }

    for img in &catalog.images {
        check_unique_names(
            &mut r,
            &img.id,
            img.properties.iter().map(|p| p.name.as_str()),
            DuplicateProperty,
        );
        for p in &img.properties {
            if p.uri.as_str().is_empty() {
                r.push(EmptyUri, format!("{}.{}", img.id, p.name));
            }
        }
        for m in &img.models {
            if !model_ids.contains(m.as_str()) {
                r.push(DanglingReference, format!("{}\u{2192}{m}", img.id));
            }
        }
        for c in &img.children {
            if !image_ids.contains(c.as_str()) {
                r.push(DanglingReference, format!("{}\u{2192}{c}", img.id));
            }
        }
    }

    for cycle in containment_cycles(catalog) {
        r.push(CyclicContainment, cycle.join(" -> "));
    }

    r
}

/// Elementary containment cycles, each reported once starting from its
/// smallest image id.
fn containment_cycles(catalog: &Catalog) -> Vec<Vec<String>> {
    let children: BTreeMap<&str, Vec<&str>> = catalog
        .images
        .iter()
        .map(|img| (img.id.as_str(), img.children.iter().map(String::as_str).collect()))
        .collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }

    fn visit<'a>(
        node: &'a str,
        children: &BTreeMap<&'a str, Vec<&'a str>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
        found: &mut BTreeSet<Vec<String>>,
    ) {
        marks.insert(node, Mark::Open);
        stack.push(node);
        for &next in children.get(node).map(Vec::as_slice).unwrap_or(&[]) {
            match marks.get(next) {
                Some(Mark::Open) => {
                    let at = stack.iter().position(|s| *s == next).unwrap_or(0);
                    let mut cycle: Vec<String> = stack[at..].iter().map(|s| s.to_string()).collect();
                    let min = cycle
                        .iter()
                        .enumerate()
                        .min_by(|a, b| a.1.cmp(b.1))
                        .map(|(i, _)| i)
                        .unwrap_or(0);
                    cycle.rotate_left(min);
                    cycle.push(cycle[0].clone());
                    found.insert(cycle);
                }
                Some(Mark::Done) => {}
                None if children.contains_key(next) => visit(next, children, marks, stack, found),
                None => {}
            }
        }
        stack.pop();
        marks.insert(node, Mark::Done);
    }

    let mut marks = BTreeMap::new();
    let mut found = BTreeSet::new();
    for &id in children.keys() {
        if !marks.contains_key(id) {
            visit(id, &children, &mut marks, &mut Vec::new(), &mut found);
        }
    }
    found.into_iter().collect()
}
