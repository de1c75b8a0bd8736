//! Generalization of input/output parameters up the hierarchy.
//!
//! A method's parameters are the union of its packages' parameters, a
//! model's are those of its selected method, and an object's are the union
//! over its enabled models, its child objects, and its properties. Union
//! elements are occurrences keyed by where they come from (sequence position
//! and varname), so two packages that happen to share a varname never merge.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Catalog, ImplementingPackage, Method, SemanticUri, SimulationModel, VsoImage};
use crate::paths::{ModelPath, PortRef};

/// A parameter of one package occurrence inside a method sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PackageParam {
    pub position: usize,
    pub ip: String,
    pub varname: String,
    pub uri: SemanticUri,
    /// Effective value: the wrapper's default if any, else the base value.
    /// Always `None` for outputs.
    pub value: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageIo {
    pub inputs: Vec<PackageParam>,
    pub outputs: Vec<PackageParam>,
}

/// Parameters of a single implementing package placed at `position`.
pub fn implementing_package_io(
    ip: &ImplementingPackage,
    position: usize,
    catalog: &Catalog,
) -> Result<PackageIo> {
    let sp = catalog
        .software_package(&ip.sp)
        .ok_or_else(|| Error::DanglingReference {
            from: ip.id.clone(),
            to: ip.sp.clone(),
        })?;
    let mut io = PackageIo::default();
    for input in &ip.inputs {
        let base = sp.input(&input.base).ok_or_else(|| Error::DanglingReference {
            from: ip.id.clone(),
            to: format!("{}.{}", sp.id, input.base),
        })?;
        io.inputs.push(PackageParam {
            position,
            ip: ip.id.clone(),
            varname: input.base.clone(),
            uri: input.uri.clone(),
            value: input.default_value.clone().or_else(|| base.value.clone()),
        });
    }
    for output in &ip.outputs {
        if sp.output(&output.base).is_none() {
            return Err(Error::DanglingReference {
                from: ip.id.clone(),
                to: format!("{}.{}", sp.id, output.base),
            });
        }
        io.outputs.push(PackageParam {
            position,
            ip: ip.id.clone(),
            varname: output.base.clone(),
            uri: output.uri.clone(),
            value: None,
        });
    }
    Ok(io)
}

/// Union of the parameters of every package in the method's sequence.
pub fn derive_method_io(method: &Method, catalog: &Catalog) -> Result<PackageIo> {
    let mut io = PackageIo::default();
    for (position, ip_id) in method.ip_sequence.iter().enumerate() {
        let ip = catalog
            .implementing_package(ip_id)
            .ok_or_else(|| Error::DanglingReference {
                from: method.id.clone(),
                to: ip_id.clone(),
            })?;
        let part = implementing_package_io(ip, position, catalog)?;
        io.inputs.extend(part.inputs);
        io.outputs.extend(part.outputs);
    }
    io.inputs.sort();
    io.outputs.sort();
    Ok(io)
}

/// The parameters of the model's selected method.
pub fn derive_model_io(model: &SimulationModel, catalog: &Catalog) -> Result<PackageIo> {
    let selected = model
        .selected_method
        .as_deref()
        .ok_or_else(|| Error::NoMethodSelected {
            model: model.id.clone(),
        })?;
    derive_model_io_with(model, selected, catalog)
}

/// The parameters of the model when `method_id` is chosen instead of the
/// catalog default.
pub fn derive_model_io_with(
    model: &SimulationModel,
    method_id: &str,
    catalog: &Catalog,
) -> Result<PackageIo> {
    if !model.methods.iter().any(|m| m == method_id) {
        return Err(Error::UnknownMethod {
            model: model.id.clone(),
            method: method_id.to_owned(),
        });
    }
    let method = catalog
        .method(method_id)
        .ok_or_else(|| Error::DanglingReference {
            from: model.id.clone(),
            to: method_id.to_owned(),
        })?;
    derive_method_io(method, catalog)
}

/// Which models of an object are switched on and which method each uses.
pub trait ModelSelection {
    fn is_enabled(&self, path: &ModelPath) -> bool;
    /// Overrides the model's catalog default; `None` falls back to it.
    fn chosen_method(&self, path: &ModelPath) -> Option<&str>;
}

/// Every model enabled, every model on its catalog default method.
#[derive(Debug, Clone, Copy, Default)]
pub struct CatalogDefaults;

impl ModelSelection for CatalogDefaults {
    fn is_enabled(&self, _: &ModelPath) -> bool {
        true
    }
    fn chosen_method(&self, _: &ModelPath) -> Option<&str> {
        None
    }
}

/// An explicit enabled set plus method overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    pub enabled: BTreeSet<ModelPath>,
    pub methods: BTreeMap<ModelPath, String>,
}

impl ModelSelection for Selection {
    fn is_enabled(&self, path: &ModelPath) -> bool {
        self.enabled.contains(path)
    }
    fn chosen_method(&self, path: &ModelPath) -> Option<&str> {
        self.methods.get(path).map(String::as_str)
    }
}

/// Where a generalized object parameter comes from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamSite {
    Package { port: PortRef, ip: String },
    Property { scope: Vec<String>, name: String },
}

impl ParamSite {
    pub fn port(&self) -> Option<&PortRef> {
        match self {
            ParamSite::Package { port, .. } => Some(port),
            ParamSite::Property { .. } => None,
        }
    }

    pub fn varname(&self) -> &str {
        match self {
            ParamSite::Package { port, .. } => &port.varname,
            ParamSite::Property { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Param {
    pub site: ParamSite,
    pub uri: SemanticUri,
    pub value: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectIo {
    pub inputs: Vec<Param>,
    pub outputs: Vec<Param>,
}

/// Generalized parameters of an object: enabled models (on their chosen
/// methods), child objects recursively, and properties. Each property is
/// both a settable pseudo-input and a readable pseudo-output.
pub fn derive_vso_io(
    image: &VsoImage,
    selection: &impl ModelSelection,
    catalog: &Catalog,
) -> Result<ObjectIo> {
    let mut io = ObjectIo::default();
    let mut stack = vec![image.id.clone()];
    collect_object_io(image, &[], &mut stack, selection, catalog, &mut io)?;
    io.inputs.sort();
    io.outputs.sort();
    Ok(io)
}

fn collect_object_io(
    image: &VsoImage,
    scope: &[String],
    stack: &mut Vec<String>,
    selection: &impl ModelSelection,
    catalog: &Catalog,
    io: &mut ObjectIo,
) -> Result<()> {
    for model_id in &image.models {
        let path = ModelPath::nested(scope.to_vec(), model_id.clone());
        if !selection.is_enabled(&path) {
            continue;
        }
        let model = catalog.model(model_id).ok_or_else(|| Error::DanglingReference {
            from: image.id.clone(),
            to: model_id.clone(),
        })?;
        let method = selection
            .chosen_method(&path)
            .or(model.selected_method.as_deref())
            .ok_or_else(|| Error::NoMethodSelected {
                model: model_id.clone(),
            })?
            .to_owned();
        let part = derive_model_io_with(model, &method, catalog)?;
        let lift = |p: PackageParam| Param {
            site: ParamSite::Package {
                port: PortRef::new(path.clone(), method.clone(), p.position, p.varname),
                ip: p.ip,
            },
            uri: p.uri,
            value: p.value,
        };
        io.inputs.extend(part.inputs.into_iter().map(lift));
        io.outputs.extend(part.outputs.into_iter().map(lift));
    }
    for child_id in &image.children {
        if let Some(at) = stack.iter().position(|s| s == child_id) {
            let mut cycle = stack[at..].to_vec();
            cycle.push(child_id.clone());
            return Err(Error::CyclicContainment { cycle });
        }
        let child = catalog.image(child_id).ok_or_else(|| Error::DanglingReference {
            from: image.id.clone(),
            to: child_id.clone(),
        })?;
        let mut child_scope = scope.to_vec();
        child_scope.push(child_id.clone());
        stack.push(child_id.clone());
        collect_object_io(child, &child_scope, stack, selection, catalog, io)?;
        stack.pop();
    }
    for prop in &image.properties {
        let site = ParamSite::Property {
            scope: scope.to_vec(),
            name: prop.name.clone(),
        };
        io.inputs.push(Param {
            site: site.clone(),
            uri: prop.uri.clone(),
            value: prop.value.clone(),
        });
        io.outputs.push(Param {
            site,
            uri: prop.uri.clone(),
            value: None,
        });
    }
    Ok(())
}

/// Every model reachable from `image` (own models first, then children
/// depth-first), regardless of enabled state.
pub fn model_paths(image: &VsoImage, catalog: &Catalog) -> Result<Vec<ModelPath>> {
    fn walk(
        image: &VsoImage,
        scope: &[String],
        stack: &mut Vec<String>,
        catalog: &Catalog,
        out: &mut Vec<ModelPath>,
    ) -> Result<()> {
        for m in &image.models {
            out.push(ModelPath::nested(scope.to_vec(), m.clone()));
        }
        for child_id in &image.children {
            if let Some(at) = stack.iter().position(|s| s == child_id) {
                let mut cycle = stack[at..].to_vec();
                cycle.push(child_id.clone());
                return Err(Error::CyclicContainment { cycle });
            }
            let child = catalog.image(child_id).ok_or_else(|| Error::DanglingReference {
                from: image.id.clone(),
                to: child_id.clone(),
            })?;
            let mut child_scope = scope.to_vec();
            child_scope.push(child_id.clone());
            stack.push(child_id.clone());
            walk(child, &child_scope, stack, catalog, out)?;
            stack.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(image, &[], &mut vec![image.id.clone()], catalog, &mut out)?;
    Ok(out)
}

/// Resolves the image that directly owns the model at `path`.
pub fn image_at_scope<'c>(
    root: &'c VsoImage,
    scope: &[String],
    catalog: &'c Catalog,
) -> Option<&'c VsoImage> {
    let mut current = root;
    for child in scope {
        if !current.children.contains(child) {
            return None;
        }
        current = catalog.image(child)?;
    }
    Some(current)
}
