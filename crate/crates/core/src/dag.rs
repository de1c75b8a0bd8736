//! The package-occurrence graph induced by a configuration.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::composer::{Environment, Link};
use crate::configurator::Configuration;
use crate::error::{Error, Result};
use crate::io::{ObjectIo, ParamSite};
use crate::knowledge::KnowledgeBase;
use crate::paths::{Endpoint, OccurrenceRef};

/// One implementing-package occurrence of the configured environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageNode {
    pub instance: String,
    pub occurrence: OccurrenceRef,
    pub ip: String,
    pub sp: String,
}

impl PackageNode {
    /// Traversal tie-break: instance, method, sequence position, then model
    /// path to separate equal methods in different models.
    pub fn order_key(&self) -> (&str, &str, usize, &crate::paths::ModelPath) {
        (
            &self.instance,
            &self.occurrence.method,
            self.occurrence.position,
            &self.occurrence.model,
        )
    }

    pub fn label(&self) -> String {
        format!("{}:{}={}", self.instance, self.occurrence, self.ip)
    }
}

/// A dataflow edge: `output` of node `from` feeds `input` of node `to`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DagEdge {
    pub from: usize,
    pub to: usize,
    pub output: String,
    pub input: String,
    pub implicit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackageDag {
    /// Sorted by [`PackageNode::order_key`].
    pub nodes: Vec<PackageNode>,
    pub edges: Vec<DagEdge>,
    /// Effective literal values of every node input, keyed by (node, varname).
    pub values: BTreeMap<(usize, String), Option<String>>,
}

impl PackageDag {
    /// Nodes, edges and input values without acyclicity or completeness
    /// checks.
    pub fn assemble(env: &Environment, kb: &KnowledgeBase, config: &Configuration) -> Result<Self> {
        let selections = config.selections(env, kb)?;
        let io = env.active_io(kb, &selections)?;
        let links = env.links(kb, &io);
        Ok(Self::from_parts(kb, &io, &links))
    }

    fn from_parts(kb: &KnowledgeBase, io: &BTreeMap<String, ObjectIo>, links: &[Link]) -> Self {
        let mut occurrences: BTreeMap<(String, OccurrenceRef), String> = BTreeMap::new();
        let mut values: BTreeMap<(String, OccurrenceRef, String), Option<String>> = BTreeMap::new();
        for (inst, obj) in io {
            for p in obj.inputs.iter().chain(&obj.outputs) {
                if let ParamSite::Package { port, ip } = &p.site {
                    occurrences.insert((inst.clone(), port.occurrence()), ip.clone());
                }
            }
            for p in &obj.inputs {
                if let ParamSite::Package { port, .. } = &p.site {
                    values.insert(
                        (inst.clone(), port.occurrence(), port.varname.clone()),
                        p.value.clone(),
                    );
                }
            }
        }
        let mut nodes: Vec<PackageNode> = occurrences
            .into_iter()
            .map(|((instance, occurrence), ip)| {
                let sp = kb
                    .catalog()
                    .implementing_package(&ip)
                    .map(|x| x.sp.clone())
                    .unwrap_or_default();
                PackageNode {
                    instance,
                    occurrence,
                    ip,
                    sp,
                }
            })
            .collect();
        nodes.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        let index: BTreeMap<(&str, &OccurrenceRef), usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| ((n.instance.as_str(), &n.occurrence), i))
            .collect();
        let node_of = |e: &Endpoint| index.get(&(e.instance.as_str(), &e.port.occurrence())).copied();
        let mut edges: Vec<DagEdge> = links
            .iter()
            .filter_map(|l| {
                Some(DagEdge {
                    from: node_of(&l.source)?,
                    to: node_of(&l.target)?,
                    output: l.source.port.varname.clone(),
                    input: l.target.port.varname.clone(),
                    implicit: l.implicit,
                })
            })
            .collect();
        edges.sort();
        let values = values
            .into_iter()
            .filter_map(|((inst, occ, var), v)| Some(((*index.get(&(inst.as_str(), &occ))?, var), v)))
            .collect();
        PackageDag { nodes, edges, values }
    }

    /// Topological order, smallest ready node (by `order_key`) first.
    /// Fails with [`Error::CycleDetected`] naming one cycle.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for e in &self.edges {
            if succ[e.from].insert(e.to) {
                indegree[e.to] += 1;
            }
        }
        // node indices are already sorted by order_key
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &j in &succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        let remaining: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] > 0).collect();
        Err(Error::CycleDetected {
            cycle: self.find_cycle(&remaining, &succ),
        })
    }

    fn find_cycle(&self, remaining: &BTreeSet<usize>, succ: &[BTreeSet<usize>]) -> Vec<String> {
        // every remaining node has a remaining predecessor; walking
        // predecessors must revisit a node
        let mut pred: BTreeMap<usize, usize> = BTreeMap::new();
        for (from, tos) in succ.iter().enumerate() {
            if !remaining.contains(&from) {
                continue;
            }
            for &to in tos {
                if remaining.contains(&to) {
                    pred.entry(to).or_insert(from);
                }
            }
        }
        let Some(&start) = remaining.first() else {
            return Vec::new();
        };
        let mut seen: Vec<usize> = Vec::new();
        let mut cur = start;
        while !seen.contains(&cur) {
            seen.push(cur);
            cur = pred[&cur];
        }
        let at = seen.iter().position(|&x| x == cur).unwrap_or(0);
        let mut cycle: Vec<usize> = seen[at..].to_vec();
        cycle.reverse();
        cycle.push(cycle[0]);
        cycle.iter().map(|&i| self.nodes[i].label()).collect()
    }

    /// First input (in node order) with neither a feed nor a value.
    pub fn check_required_inputs(&self) -> Result<()> {
        let fed: BTreeSet<(usize, &str)> = self.edges.iter().map(|e| (e.to, e.input.as_str())).collect();
        let order: Vec<usize> = (0..self.nodes.len()).collect();
        for i in order {
            for ((node, var), value) in self.values.range((i, String::new())..) {
                if *node != i {
                    break;
                }
                if value.is_none() && !fed.contains(&(i, var.as_str())) {
                    let n = &self.nodes[i];
                    return Err(Error::DisconnectedRequiredInput {
                        input: format!("{}:{}/{}", n.instance, n.occurrence, var),
                    });
                }
            }
        }
        Ok(())
    }

    /// Edges feeding node `i`, by input varname.
    pub fn feeds(&self, i: usize) -> BTreeMap<&str, &DagEdge> {
        self.edges
            .iter()
            .filter(|e| e.to == i)
            .map(|e| (e.input.as_str(), e))
            .collect()
    }
}

/// The package DAG of `config`, failing on cycles and on inputs that have
/// neither a value nor a feed.
pub fn build_package_dag(
    env: &Environment,
    kb: &KnowledgeBase,
    config: &Configuration,
) -> Result<PackageDag> {
    let dag = PackageDag::assemble(env, kb, config)?;
    dag.topological_order()?;
    dag.check_required_inputs()?;
    Ok(dag)
}
