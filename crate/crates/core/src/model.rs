//! The five-level knowledge hierarchy: software packages at the bottom,
//! implementing packages wrapping them with semantic bindings, methods
//! sequencing implementing packages, simulation models choosing among
//! methods, and object images grouping models, properties and nested images.
//!
//! Every record refers to others by id. A [`Catalog`] owns one flat list per
//! kind; nothing here checks referential integrity (see [`crate::validate`]).

use std::fmt;

use serde::{Deserialize, Serialize};

/// An IRI-shaped semantic identifier. Compared by exact string equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SemanticUri(String);

impl SemanticUri {
    pub fn new(value: impl Into<String>) -> Self {
        SemanticUri(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SemanticUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SemanticUri {
    fn from(s: &str) -> Self {
        SemanticUri::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputParamSp {
    pub varname: String,
    /// `None` means unset, which is distinct from an empty literal.
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputParamSp {
    pub varname: String,
}

/// Affine cost estimate: `fixed_cost + per_unit_cost * data_units` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerformanceModel {
    pub fixed_cost: f64,
    pub per_unit_cost: f64,
}

impl PerformanceModel {
    pub fn fixed(seconds: f64) -> Self {
        PerformanceModel {
            fixed_cost: seconds,
            per_unit_cost: 0.0,
        }
    }

    pub fn estimate(&self, data_units: f64) -> f64 {
        self.fixed_cost + self.per_unit_cost * data_units
    }

    pub fn is_valid(&self) -> bool {
        self.fixed_cost.is_finite()
            && self.per_unit_cost.is_finite()
            && self.fixed_cost >= 0.0
            && self.per_unit_cost >= 0.0
    }
}

/// A really-executable package on the target platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoftwarePackage {
    pub id: String,
    pub inputs: Vec<InputParamSp>,
    pub outputs: Vec<OutputParamSp>,
    pub perf: Option<PerformanceModel>,
}

impl SoftwarePackage {
    pub fn input(&self, varname: &str) -> Option<&InputParamSp> {
        self.inputs.iter().find(|p| p.varname == varname)
    }

    pub fn output(&self, varname: &str) -> Option<&OutputParamSp> {
        self.outputs.iter().find(|p| p.varname == varname)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputParamIp {
    /// Varname of the wrapped software-package input.
    pub base: String,
    pub default_value: Option<String>,
    pub uri: SemanticUri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputParamIp {
    pub base: String,
    pub uri: SemanticUri,
}

/// Platform-independent wrapper over a [`SoftwarePackage`]. Must wrap every
/// parameter of the underlying package exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplementingPackage {
    pub id: String,
    pub sp: String,
    pub inputs: Vec<InputParamIp>,
    pub outputs: Vec<OutputParamIp>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Method {
    pub id: String,
    pub ip_sequence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationModel {
    pub id: String,
    pub methods: Vec<String>,
    pub selected_method: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Property {
    pub name: String,
    pub uri: SemanticUri,
    pub value: Option<String>,
}

/// A simulation-object image. Basic when `children` is empty, composite
/// otherwise; composites may still carry their own models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VsoImage {
    pub id: String,
    pub properties: Vec<Property>,
    pub models: Vec<String>,
    pub children: Vec<String>,
}

impl VsoImage {
    pub fn is_composite(&self) -> bool {
        !self.children.is_empty()
    }
}

/// An unordered `sameAs` assertion between two URIs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SameAs(pub SemanticUri, pub SemanticUri);

impl SameAs {
    /// Orders the pair so that equal assertions compare equal.
    pub fn normalized(&self) -> SameAs {
        if self.0 <= self.1 {
            self.clone()
        } else {
            SameAs(self.1.clone(), self.0.clone())
        }
    }
}

/// The knowledge base content: one flat list per record kind plus the
/// `sameAs` assertions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    pub software_packages: Vec<SoftwarePackage>,
    pub implementing_packages: Vec<ImplementingPackage>,
    pub methods: Vec<Method>,
    pub models: Vec<SimulationModel>,
    pub images: Vec<VsoImage>,
    pub same_as: Vec<SameAs>,
}

impl Catalog {
    pub fn software_package(&self, id: &str) -> Option<&SoftwarePackage> {
        self.software_packages.iter().find(|x| x.id == id)
    }

    pub fn implementing_package(&self, id: &str) -> Option<&ImplementingPackage> {
        self.implementing_packages.iter().find(|x| x.id == id)
    }

    pub fn method(&self, id: &str) -> Option<&Method> {
        self.methods.iter().find(|x| x.id == id)
    }

    pub fn model(&self, id: &str) -> Option<&SimulationModel> {
        self.models.iter().find(|x| x.id == id)
    }

    pub fn image(&self, id: &str) -> Option<&VsoImage> {
        self.images.iter().find(|x| x.id == id)
    }

    /// Canonical form: every record list sorted by id, every parameter,
    /// property, method and child list sorted by name, `sameAs` pairs
    /// ordered and deduplicated. Method sequences keep their order.
    pub fn normalized(&self) -> Catalog {
        let mut c = self.clone();
        c.software_packages.sort_by(|a, b| a.id.cmp(&b.id));
        for sp in &mut c.software_packages {
            sp.inputs.sort_by(|a, b| a.varname.cmp(&b.varname));
            sp.outputs.sort_by(|a, b| a.varname.cmp(&b.varname));
        }
        c.implementing_packages.sort_by(|a, b| a.id.cmp(&b.id));
        for ip in &mut c.implementing_packages {
            ip.inputs.sort_by(|a, b| a.base.cmp(&b.base));
            ip.outputs.sort_by(|a, b| a.base.cmp(&b.base));
        }
        c.methods.sort_by(|a, b| a.id.cmp(&b.id));
        c.models.sort_by(|a, b| a.id.cmp(&b.id));
        for m in &mut c.models {
            m.methods.sort();
        }
        c.images.sort_by(|a, b| a.id.cmp(&b.id));
        for img in &mut c.images {
            img.properties.sort_by(|a, b| a.name.cmp(&b.name));
            img.models.sort();
            img.children.sort();
        }
        c.same_as = c.same_as.iter().map(SameAs::normalized).collect();
        c.same_as.sort();
        c.same_as.dedup();
        c
    }
}

/// Identifiers end up inside `/`-separated paths, `inst:port` endpoints and
/// `slot=method` configuration keys, so those separators are reserved.
pub fn is_valid_identifier(id: &str) -> bool {
    !id.is_empty()
        && !id
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '/' | ':' | '=' | ',' | '#' | '@'))
}
