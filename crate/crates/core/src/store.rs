//! Canonical documents for catalogs, environments and vocabularies.
//!
//! Every document is pretty-printed JSON with a fixed key order, sorted
//! record arrays, two-space indentation and a trailing LF, so saving the
//! same content twice gives identical bytes.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codegen::DslVocabulary;
use crate::composer::{Connection, Environment, VsoInstance};
use crate::error::{Error, Result};
use crate::model::*;
use crate::validate::{validate_catalog, ValidationReport};

pub const SCHEMA_VERSION: u64 = 1;

pub const CATALOG_EXTENSION: &str = "vso-catalog";
pub const ENVIRONMENT_EXTENSION: &str = "vso-env";
pub const VOCABULARY_EXTENSION: &str = "vso-vocab";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogDocument {
    pub schema_version: u64,
    pub software_packages: Vec<SoftwarePackage>,
    pub implementing_packages: Vec<ImplementingPackage>,
    pub methods: Vec<Method>,
    pub models: Vec<SimulationModel>,
    pub images: Vec<VsoImage>,
    pub same_as: Vec<SameAs>,
}

impl From<&Catalog> for CatalogDocument {
    fn from(c: &Catalog) -> Self {
        let c = c.normalized();
        CatalogDocument {
            schema_version: SCHEMA_VERSION,
            software_packages: c.software_packages,
            implementing_packages: c.implementing_packages,
            methods: c.methods,
            models: c.models,
            images: c.images,
            same_as: c.same_as,
        }
    }
}

impl From<CatalogDocument> for Catalog {
    fn from(d: CatalogDocument) -> Self {
        Catalog {
            software_packages: d.software_packages,
            implementing_packages: d.implementing_packages,
            methods: d.methods,
            models: d.models,
            images: d.images,
            same_as: d.same_as,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentDocument {
    pub schema_version: u64,
    pub env_id: String,
    pub catalog_version: Option<String>,
    pub instances: Vec<VsoInstance>,
    pub connections: Vec<Connection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabularyDocument {
    pub schema_version: u64,
    pub name: String,
    pub header: Option<String>,
    pub footer: Option<String>,
    pub ref_syntax: String,
    pub statement_templates: std::collections::BTreeMap<String, String>,
}

fn to_canonical_bytes<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(doc).expect("documents always serialize");
    bytes.push(b'\n');
    bytes
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = bytes
        .split_inclusive(|&b| b == b'\n')
        .take(line - 1)
        .map(<[u8]>::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

/// Syntax check, version gate, then typed decoding with the path of the
/// first offending field.
fn decode<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })?;
    match value.get("schema_version") {
        Some(v) => match v.as_u64() {
            Some(SCHEMA_VERSION) => {}
            Some(other) => return Err(Error::SchemaVersionUnsupported(other)),
            None => {
                return Err(Error::Schema {
                    path: "schema_version".into(),
                    message: "expected a non-negative integer".into(),
                })
            }
        },
        None => {
            return Err(Error::Schema {
                path: ".".into(),
                message: "missing field `schema_version`".into(),
            })
        }
    }
    serde_path_to_error::deserialize(value).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

/// Canonical bytes of a valid catalog.
pub fn save_catalog(catalog: &Catalog) -> Result<Vec<u8>> {
    let report = validate_catalog(catalog);
    if !report.is_clean() {
        return Err(Error::ValidationFailed(report));
    }
    Ok(to_canonical_bytes(&CatalogDocument::from(catalog)))
}

/// Decodes a catalog document and validates it, returning the report
/// instead of failing on violations.
pub fn parse_catalog(bytes: &[u8]) -> Result<(Catalog, ValidationReport)> {
    let doc: CatalogDocument = decode(bytes)?;
    let catalog = Catalog::from(doc);
    let report = validate_catalog(&catalog);
    Ok((catalog, report))
}

/// Like [`parse_catalog`] but fails with [`Error::ValidationFailed`] on any
/// violation.
pub fn load_catalog(bytes: &[u8]) -> Result<Catalog> {
    let (catalog, report) = parse_catalog(bytes)?;
    if report.is_clean() {
        Ok(catalog)
    } else {
        Err(Error::ValidationFailed(report))
    }
}

/// First 16 hex digits of the SHA-256 of the canonical document.
pub fn catalog_version(catalog: &Catalog) -> String {
    let digest = Sha256::digest(to_canonical_bytes(&CatalogDocument::from(catalog)));
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_environment(env: &Environment) -> Vec<u8> {
    to_canonical_bytes(&EnvironmentDocument {
        schema_version: SCHEMA_VERSION,
        env_id: env.env_id.clone(),
        catalog_version: env.catalog_version.clone(),
        instances: env.instances.values().cloned().collect(),
        connections: env.connections.iter().cloned().collect(),
    })
}

/// Decodes an environment. Checking it against a catalog is left to
/// [`Environment::validate`].
pub fn load_environment(bytes: &[u8]) -> Result<Environment> {
    let doc: EnvironmentDocument = decode(bytes)?;
    let mut env = Environment::new(doc.env_id);
    env.catalog_version = doc.catalog_version;
    for inst in doc.instances {
        if env.instances.contains_key(&inst.instance_id) {
            return Err(Error::Schema {
                path: "instances".into(),
                message: format!("duplicate instance `{}`", inst.instance_id),
            });
        }
        env.instances.insert(inst.instance_id.clone(), inst);
    }
    env.connections = doc.connections.into_iter().collect();
    Ok(env)
}

pub fn save_vocabulary(vocab: &DslVocabulary) -> Vec<u8> {
    let v = vocab.clone();
    to_canonical_bytes(&VocabularyDocument {
        schema_version: SCHEMA_VERSION,
        name: v.name,
        header: v.header,
        footer: v.footer,
        ref_syntax: v.ref_syntax,
        statement_templates: v.statement_templates,
    })
}

pub fn load_vocabulary(bytes: &[u8]) -> Result<DslVocabulary> {
    let d: VocabularyDocument = decode(bytes)?;
    Ok(DslVocabulary {
        name: d.name,
        header: d.header,
        footer: d.footer,
        ref_syntax: d.ref_syntax,
        statement_templates: d.statement_templates,
    })
}
