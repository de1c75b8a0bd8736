//! Workflow script generation by traversal of the package DAG.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::composer::Environment;
use crate::configurator::Configuration;
use crate::dag::{build_package_dag, PackageDag, PackageNode};
use crate::error::{Error, Result};
use crate::knowledge::KnowledgeBase;
use crate::model::Catalog;

/// Statement templates per software package.
///
/// Templates use `{step}`, `{in:<var>}` and `{out:<var>}`; `{{` and `}}`
/// are literal braces. `ref_syntax` uses `{step}` and `{var}` and renders a
/// reference to an earlier step's output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DslVocabulary {
    pub name: String,
    pub header: Option<String>,
    pub footer: Option<String>,
    pub ref_syntax: String,
    pub statement_templates: BTreeMap<String, String>,
}

impl DslVocabulary {
    /// A neutral `step_1 = pkg(x=..., y=...)` syntax covering every
    /// software package of `catalog`.
    pub fn generic(catalog: &Catalog) -> Self {
        let statement_templates = catalog
            .software_packages
            .iter()
            .map(|sp| {
                let args: Vec<String> = sp
                    .inputs
                    .iter()
                    .map(|i| format!("{0}={{in:{0}}}", i.varname))
                    .collect();
                (
                    sp.id.clone(),
                    format!("{{step}} = {}({})", sp.id, args.join(", ")),
                )
            })
            .collect();
        DslVocabulary {
            name: "generic".into(),
            header: None,
            footer: None,
            ref_syntax: "{step}.{var}".into(),
            statement_templates,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Text(String),
    Step,
    Var,
    In(String),
    Out(String),
}

fn parse_template(template: &str, package: &str, allow_var: bool) -> Result<Vec<Piece>> {
    let unresolved = |p: &str| Error::UnresolvedPlaceholder {
        package: package.to_owned(),
        placeholder: p.to_owned(),
    };
    let mut pieces = Vec::new();
    let mut text = String::new();
    let mut rest = template;
    while let Some(c) = rest.chars().next() {
        if rest.starts_with("{{") || rest.starts_with("}}") {
            text.push(c);
            rest = &rest[2..];
        } else if c == '{' {
            let end = rest.find('}').ok_or_else(|| unresolved(rest))?;
            let name = &rest[1..end];
            let piece = match name.split_once(':') {
                None if name == "step" => Piece::Step,
                None if name == "var" && allow_var => Piece::Var,
                Some(("in", v)) if !v.is_empty() => Piece::In(v.to_owned()),
                Some(("out", v)) if !v.is_empty() => Piece::Out(v.to_owned()),
                _ => return Err(unresolved(&rest[..=end])),
            };
            if !text.is_empty() {
                pieces.push(Piece::Text(std::mem::take(&mut text)));
            }
            pieces.push(piece);
            rest = &rest[end + 1..];
        } else if c == '}' {
            return Err(unresolved("}"));
        } else {
            text.push(c);
            rest = &rest[c.len_utf8()..];
        }
    }
    if !text.is_empty() {
        pieces.push(Piece::Text(text));
    }
    Ok(pieces)
}

/// Where an input's value comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BindingSource {
    Step { step: String, output: String },
    Literal { value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub input: String,
    pub source: BindingSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraversalRow {
    pub step: String,
    pub node: PackageNode,
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkflowScript {
    pub text: String,
    /// Emission order.
    pub steps: Vec<TraversalRow>,
}

impl WorkflowScript {
    /// Step label → package occurrence.
    pub fn step_index(&self) -> BTreeMap<&str, &PackageNode> {
        self.steps.iter().map(|r| (r.step.as_str(), &r.node)).collect()
    }
}

fn traverse(dag: &PackageDag) -> Result<Vec<TraversalRow>> {
    let order = dag.topological_order()?;
    let mut labels = vec![String::new(); dag.nodes.len()];
    for (k, &i) in order.iter().enumerate() {
        labels[i] = format!("step_{}", k + 1);
    }
    let mut rows = Vec::with_capacity(order.len());
    for &i in &order {
        let feeds = dag.feeds(i);
        let mut bindings = Vec::new();
        for ((node, var), value) in dag.values.range((i, String::new())..) {
            if *node != i {
                break;
            }
            let source = match (feeds.get(var.as_str()), value) {
                (Some(e), _) => BindingSource::Step {
                    step: labels[e.from].clone(),
                    output: e.output.clone(),
                },
                (None, Some(v)) => BindingSource::Literal { value: v.clone() },
                (None, None) => {
                    let n = &dag.nodes[i];
                    return Err(Error::DisconnectedRequiredInput {
                        input: format!("{}:{}/{}", n.instance, n.occurrence, var),
                    });
                }
            };
            bindings.push(Binding {
                input: var.clone(),
                source,
            });
        }
        rows.push(TraversalRow {
            step: labels[i].clone(),
            node: dag.nodes[i].clone(),
            bindings,
        });
    }
    Ok(rows)
}

/// Emission-ordered rows with resolved input bindings; the structural
/// mirror of [`generate_script`].
pub fn explain_traversal(
    env: &Environment,
    kb: &KnowledgeBase,
    config: &Configuration,
) -> Result<Vec<TraversalRow>> {
    traverse(&build_package_dag(env, kb, config)?)
}

fn render(
    pieces: &[Piece],
    step: &str,
    var: &str,
    bindings: &BTreeMap<&str, String>,
    package: &str,
) -> Result<String> {
    let mut out = String::new();
    for p in pieces {
        match p {
            Piece::Text(t) => out.push_str(t),
            Piece::Step => out.push_str(step),
            Piece::Var => out.push_str(var),
            Piece::In(v) => {
                out.push_str(
                    bindings
                        .get(v.as_str())
                        .ok_or_else(|| Error::UnresolvedPlaceholder {
                            package: package.to_owned(),
                            placeholder: format!("{{in:{v}}}"),
                        })?,
                )
            }
            Piece::Out(v) => out.push_str(v),
        }
    }
    Ok(out)
}

fn push_block(text: &mut String, block: &str) {
    for line in block.lines() {
        text.push_str(line.trim_end());
        text.push('\n');
    }
}

/// Renders one statement per package occurrence in topological order.
///
/// Fed inputs render through `ref_syntax`; unfed inputs render their
/// literal effective value. Output ends with a single LF and carries no
/// trailing whitespace.
pub fn generate_script(
    env: &Environment,
    kb: &KnowledgeBase,
    config: &Configuration,
    vocab: &DslVocabulary,
) -> Result<WorkflowScript> {
    let rows = explain_traversal(env, kb, config)?;
    let catalog = kb.catalog();

    // check every template before emitting anything
    let mut compiled: BTreeMap<&str, Vec<Piece>> = BTreeMap::new();
    for row in &rows {
        let sp_id = row.node.sp.as_str();
        if compiled.contains_key(sp_id) {
            continue;
        }
        let template = vocab
            .statement_templates
            .get(sp_id)
            .ok_or_else(|| Error::MissingTemplate {
                package: sp_id.to_owned(),
            })?;
        let pieces = parse_template(template, sp_id, false)?;
        let sp = catalog
            .software_package(sp_id)
            .ok_or_else(|| Error::MissingTemplate {
                package: sp_id.to_owned(),
            })?;
        for p in &pieces {
            let ok = match p {
                Piece::In(v) => sp.input(v).is_some(),
                Piece::Out(v) => sp.output(v).is_some(),
                _ => true,
            };
            if !ok {
                return Err(Error::UnresolvedPlaceholder {
                    package: sp_id.to_owned(),
                    placeholder: match p {
                        Piece::In(v) => format!("{{in:{v}}}"),
                        Piece::Out(v) => format!("{{out:{v}}}"),
                        _ => unreachable!(),
                    },
                });
            }
        }
        compiled.insert(sp_id, pieces);
    }
    let ref_pieces = parse_template(&vocab.ref_syntax, "ref_syntax", true)?;

    let mut text = String::new();
    if let Some(h) = &vocab.header {
        push_block(&mut text, h);
    }
    for row in &rows {
        let mut values = BTreeMap::new();
        for b in &row.bindings {
            let rendered = match &b.source {
                BindingSource::Step { step, output } => {
                    render(&ref_pieces, step, output, &BTreeMap::new(), "ref_syntax")?
                }
                BindingSource::Literal { value } => value.clone(),
            };
            values.insert(b.input.as_str(), rendered);
        }
        let stmt = render(
            &compiled[row.node.sp.as_str()],
            &row.step,
            "",
            &values,
            &row.node.sp,
        )?;
        push_block(&mut text, &stmt);
    }
    if let Some(f) = &vocab.footer {
        push_block(&mut text, f);
    }
    Ok(WorkflowScript { text, steps: rows })
}
