//! Addresses of models and parameters inside an instantiated object.
//!
//! Textual forms (used in environment files, the CLI and the HTTP API):
//!
//! ```text
//! ModelPath   [child/...]model              e.g. m1, hull/m5
//! PortRef     <ModelPath>/method/pos/var    e.g. m1/s2/1/spectrum
//! Endpoint    instance:<PortRef>            e.g. o1#1:m1/s2/1/spectrum
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A model reached from an instance root through a chain of child images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ModelPath {
    pub scope: Vec<String>,
    pub model: String,
}

impl ModelPath {
    pub fn root(model: impl Into<String>) -> Self {
        ModelPath {
            scope: Vec::new(),
            model: model.into(),
        }
    }

    pub fn nested(scope: Vec<String>, model: impl Into<String>) -> Self {
        ModelPath {
            scope,
            model: model.into(),
        }
    }
}

impl fmt::Display for ModelPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.scope {
            write!(f, "{s}/")?;
        }
        f.write_str(&self.model)
    }
}

impl FromStr for ModelPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts: Vec<String> = s.split('/').map(str::to_owned).collect();
        let model = parts.pop().unwrap_or_default();
        if model.is_empty() || parts.iter().any(String::is_empty) {
            return Err(Error::UnknownEndpoint(s.to_owned()));
        }
        Ok(ModelPath { scope: parts, model })
    }
}

impl TryFrom<String> for ModelPath {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModelPath> for String {
    fn from(p: ModelPath) -> String {
        p.to_string()
    }
}

/// A package parameter inside one instance: which model, which of its
/// methods, which position in the method's package sequence, which varname.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PortRef {
    pub model: ModelPath,
    pub method: String,
    pub position: usize,
    pub varname: String,
}

impl PortRef {
    pub fn new(
        model: ModelPath,
        method: impl Into<String>,
        position: usize,
        varname: impl Into<String>,
    ) -> Self {
        PortRef {
            model,
            method: method.into(),
            position,
            varname: varname.into(),
        }
    }

    pub fn occurrence(&self) -> OccurrenceRef {
        OccurrenceRef {
            model: self.model.clone(),
            method: self.method.clone(),
            position: self.position,
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/{}",
            self.model, self.method, self.position, self.varname
        )
    }
}

impl FromStr for PortRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownEndpoint(s.to_owned());
        let mut parts: Vec<&str> = s.split('/').collect();
        if parts.len() < 4 || parts.iter().any(|p| p.is_empty()) {
            return Err(bad());
        }
        let varname = parts.pop().ok_or_else(bad)?.to_owned();
        let position = parts.pop().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let method = parts.pop().ok_or_else(bad)?.to_owned();
        let model = parts.pop().ok_or_else(bad)?.to_owned();
        Ok(PortRef {
            model: ModelPath {
                scope: parts.into_iter().map(str::to_owned).collect(),
                model,
            },
            method,
            position,
            varname,
        })
    }
}

impl TryFrom<String> for PortRef {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PortRef> for String {
    fn from(p: PortRef) -> String {
        p.to_string()
    }
}

/// One occurrence of an implementing package inside a method sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OccurrenceRef {
    pub model: ModelPath,
    pub method: String,
    pub position: usize,
}

impl fmt::Display for OccurrenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.model, self.method, self.position)
    }
}

/// A parameter address qualified by its instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Endpoint {
    pub instance: String,
    pub port: PortRef,
}

impl Endpoint {
    pub fn new(instance: impl Into<String>, port: PortRef) -> Self {
        Endpoint {
            instance: instance.into(),
            port,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.instance, self.port)
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (instance, port) = s
            .split_once(':')
            .ok_or_else(|| Error::UnknownEndpoint(s.to_owned()))?;
        if instance.is_empty() {
            return Err(Error::UnknownEndpoint(s.to_owned()));
        }
        Ok(Endpoint {
            instance: instance.to_owned(),
            port: port.parse().map_err(|_| Error::UnknownEndpoint(s.to_owned()))?,
        })
    }
}

impl TryFrom<String> for Endpoint {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Endpoint> for String {
    fn from(e: Endpoint) -> String {
        e.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn port_paths_parse_back() {
        let p = PortRef::new(ModelPath::nested(vec!["hull".into()], "m5"), "s9", 2, "x");
        assert_eq!(p.to_string(), "hull/m5/s9/2/x");
        assert_eq!("hull/m5/s9/2/x".parse::<PortRef>().unwrap(), p);

        let e: Endpoint = "o1#1:m1/s2/0/out".parse().unwrap();
        assert_eq!(e.instance, "o1#1");
        assert_eq!(e.port.model, ModelPath::root("m1"));
        assert_eq!(e.to_string(), "o1#1:m1/s2/0/out");
    }

    #[test]
    fn malformed_paths_are_rejected() {
        assert!("m1/s2/out".parse::<PortRef>().is_err());
        assert!("m1/s2/x/out".parse::<PortRef>().is_err());
        assert!("m1//0/out".parse::<PortRef>().is_err());
        assert!("no-colon".parse::<Endpoint>().is_err());
        assert!(":m1/s2/0/out".parse::<Endpoint>().is_err());
        assert!("a//m".parse::<ModelPath>().is_err());
    }
}
