//! Connection implication across abstraction levels.
//!
//! A connection between two elements at one level implies a connection
//! between their parents one level up, unless both share the same parent.
//! Only the upward direction is computed: an upper-level connection is never
//! expanded back into lower-level ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Abstraction levels, lowest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Level {
    Ip,
    Method,
    Model,
    Object,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Ip, Level::Method, Level::Model, Level::Object];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Ip => "IP",
            Level::Method => "METHOD",
            Level::Model => "MODEL",
            Level::Object => "OBJECT",
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IP" => Ok(Level::Ip),
            "METHOD" => Ok(Level::Method),
            "MODEL" => Ok(Level::Model),
            "OBJECT" => Ok(Level::Object),
            _ => Err(Error::InvalidConfiguration(format!("unknown level `{s}`"))),
        }
    }
}

/// Lifts every pair one level up through `parent`, dropping pairs whose
/// endpoints share a parent and deduplicating the rest.
pub fn lift_connections<T>(
    connections: &BTreeSet<(T, T)>,
    parent: &BTreeMap<T, T>,
) -> Result<BTreeSet<(T, T)>>
where
    T: Ord + Clone + Display,
{
    let up = |x: &T| {
        parent
            .get(x)
            .cloned()
            .ok_or_else(|| Error::UnmappedElement(x.to_string()))
    };
    let mut lifted = BTreeSet::new();
    for (a, b) in connections {
        let (pa, pb) = (up(a)?, up(b)?);
        if pa != pb {
            lifted.insert((pa, pb));
        }
    }
    Ok(lifted)
}

/// Applies [`lift_connections`] once per membership map, in order. Returns
/// the view after every step, starting with the input itself.
pub fn lift_through<T>(
    connections: &BTreeSet<(T, T)>,
    maps: &[&BTreeMap<T, T>],
) -> Result<Vec<BTreeSet<(T, T)>>>
where
    T: Ord + Clone + Display,
{
    let mut views = vec![connections.clone()];
    for map in maps {
        let next = lift_connections(views.last().expect("non-empty"), map)?;
        views.push(next);
    }
    Ok(views)
}

/// Builds a child→parent map from parent→children sets, as the memberships
/// are usually written (`IP_s2 = {ip4, ip5}`).
pub fn membership<T: Ord + Clone>(groups: &[(T, &[T])]) -> BTreeMap<T, T> {
    groups
        .iter()
        .flat_map(|(parent, children)| children.iter().map(move |c| (c.clone(), parent.clone())))
        .collect()
}
