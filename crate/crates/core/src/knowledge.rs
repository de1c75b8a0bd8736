use crate::error::{Error, Result};
use crate::model::Catalog;
use crate::registry::EquivalenceRegistry;
use crate::store;
use crate::validate::validate_catalog;

/// A validated, immutable catalog together with its equivalence registry.
///
/// This is the read-only context every composition, configuration and
/// generation operation runs against. It is cheap to share behind an `Arc`.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    catalog: Catalog,
    registry: EquivalenceRegistry,
    version: String,
}

impl KnowledgeBase {
    /// Fails with [`Error::ValidationFailed`] unless the catalog is clean.
    pub fn new(catalog: Catalog) -> Result<Self> {
        let report = validate_catalog(&catalog);
        if !report.is_clean() {
            return Err(Error::ValidationFailed(report));
        }
        let catalog = catalog.normalized();
        let version = store::catalog_version(&catalog);
        let registry = EquivalenceRegistry::from_catalog(&catalog);
        Ok(KnowledgeBase {
            catalog,
            registry,
            version,
        })
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn registry(&self) -> &EquivalenceRegistry {
        &self.registry
    }

    /// Content hash of the canonical catalog document.
    pub fn version(&self) -> &str {
        &self.version
    }
}
