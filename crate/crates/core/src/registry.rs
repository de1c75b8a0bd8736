//! URI bindings and the `sameAs` equivalence relation.
//!
//! Two parameters are semantically equal when they are bound to the same
//! URI or when their URIs are connected by a chain of `sameAs` assertions.
//! The relation is the reflexive, symmetric, transitive closure of the
//! assertions, kept as a disjoint-set forest.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::io::{PackageParam, Param};
use crate::model::{Catalog, SemanticUri};

/// Anything carrying an (optional) semantic binding.
pub trait HasUri {
    fn uri(&self) -> Option<&SemanticUri>;
    fn label(&self) -> String;
}

impl HasUri for SemanticUri {
    fn uri(&self) -> Option<&SemanticUri> {
        Some(self).filter(|u| !u.as_str().is_empty())
    }
    fn label(&self) -> String {
        self.to_string()
    }
}

impl HasUri for Param {
    fn uri(&self) -> Option<&SemanticUri> {
        Some(&self.uri).filter(|u| !u.as_str().is_empty())
    }
    fn label(&self) -> String {
        self.site.varname().to_owned()
    }
}

impl HasUri for PackageParam {
    fn uri(&self) -> Option<&SemanticUri> {
        Some(&self.uri).filter(|u| !u.as_str().is_empty())
    }
    fn label(&self) -> String {
        format!("{}.{}", self.ip, self.varname)
    }
}

impl<T: HasUri> HasUri for Option<T> {
    fn uri(&self) -> Option<&SemanticUri> {
        self.as_ref().and_then(HasUri::uri)
    }
    fn label(&self) -> String {
        self.as_ref().map(HasUri::label).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Default)]
pub struct EquivalenceRegistry {
    index: HashMap<SemanticUri, usize>,
    uris: Vec<SemanticUri>,
    parent: Vec<usize>,
    rank: Vec<u8>,
    classes: usize,
}

impl EquivalenceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers every URI bound in the catalog and applies its assertions.
    pub fn from_catalog(catalog: &Catalog) -> Self {
        let mut reg = Self::new();
        for ip in &catalog.implementing_packages {
            for p in &ip.inputs {
                reg.register(&p.uri);
            }
            for p in &ip.outputs {
                reg.register(&p.uri);
            }
        }
        for img in &catalog.images {
            for p in &img.properties {
                reg.register(&p.uri);
            }
        }
        for pair in &catalog.same_as {
            reg.assert_same_as(&pair.0, &pair.1);
        }
        reg
    }

    /// Adds `uri` as a singleton class if it is not known yet.
    pub fn register(&mut self, uri: &SemanticUri) -> usize {
        if let Some(&i) = self.index.get(uri) {
            return i;
        }
        let i = self.uris.len();
        self.index.insert(uri.clone(), i);
        self.uris.push(uri.clone());
        self.parent.push(i);
        self.rank.push(0);
        self.classes += 1;
        i
    }

    fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn find_compress(&mut self, i: usize) -> usize {
        let root = self.find(i);
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Records `a sameAs b`. Unknown URIs are registered first.
    pub fn assert_same_as(&mut self, a: &SemanticUri, b: &SemanticUri) {
        let ia = self.register(a);
        let ib = self.register(b);
        let ra = self.find_compress(ia);
        let rb = self.find_compress(ib);
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.classes -= 1;
    }

    /// Builder-style variant of [`assert_same_as`](Self::assert_same_as).
    pub fn with_same_as(mut self, a: &SemanticUri, b: &SemanticUri) -> Self {
        self.assert_same_as(a, b);
        self
    }

    pub fn equivalent(&self, a: &SemanticUri, b: &SemanticUri) -> bool {
        if a == b {
            return true;
        }
        match (self.index.get(a), self.index.get(b)) {
            (Some(&ia), Some(&ib)) => self.find(ia) == self.find(ib),
            _ => false,
        }
    }

    /// Semantic equality of two parameters.
    pub fn semantically_equal(&self, p1: &impl HasUri, p2: &impl HasUri) -> Result<bool> {
        let u1 = p1.uri().ok_or_else(|| Error::MissingUri { param: p1.label() })?;
        let u2 = p2.uri().ok_or_else(|| Error::MissingUri { param: p2.label() })?;
        Ok(self.equivalent(u1, u2))
    }

    pub fn len(&self) -> usize {
        self.uris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.uris.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    /// The partition, each class sorted, classes ordered by first member.
    pub fn classes(&self) -> Vec<Vec<SemanticUri>> {
        let mut by_root: BTreeMap<usize, Vec<SemanticUri>> = BTreeMap::new();
        for (i, uri) in self.uris.iter().enumerate() {
            by_root.entry(self.find(i)).or_default().push(uri.clone());
        }
        let mut classes: Vec<_> = by_root
            .into_values()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        classes.sort();
        classes
    }
}
