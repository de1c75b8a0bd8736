//! Virtual simulation objects: a catalog of simulation software described on
//! four abstraction levels (object, model, method, implementing package),
//! composition of object instances by semantically matched connections, and
//! generation of workflow scripts from a chosen configuration.
//!
//! Start from [`KnowledgeBase::new`] with a catalog (see [`samples`] or
//! [`store::load_catalog`]), build an [`Environment`], then enumerate
//! configurations and generate scripts.

pub mod codegen;
pub mod composer;
pub mod configurator;
pub mod dag;
pub mod error;
pub mod io;
pub mod knowledge;
pub mod lift;
pub mod model;
pub mod paths;
pub mod registry;
pub mod samples;
pub mod store;
pub mod validate;

pub use codegen::{explain_traversal, generate_script, DslVocabulary, TraversalRow, WorkflowScript};
pub use composer::{CandidateConnection, Connection, ElementParams, Environment, VsoInstance};
pub use configurator::{
    compare_configurations, count_configurations, enumerate_configurations, Configuration,
    ConfigurationReport, Criterion, Slot,
};
pub use dag::{build_package_dag, PackageDag};
pub use error::{Error, Result};
pub use io::{derive_method_io, derive_model_io, derive_vso_io, ObjectIo, Param, ParamSite, Selection};
pub use knowledge::KnowledgeBase;
pub use lift::{lift_connections, Level};
pub use model::Catalog;
pub use paths::{Endpoint, ModelPath, OccurrenceRef, PortRef};
pub use registry::EquivalenceRegistry;
pub use validate::{validate_catalog, ValidationReport, Violation, ViolationKind};
