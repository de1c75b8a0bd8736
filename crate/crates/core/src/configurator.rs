//! Enumeration and comparison of alternative configurations.
//!
//! A configuration fixes one method for every enabled model of every
//! instance. The enabled-model set itself belongs to the environment and is
//! not enumerated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::composer::Environment;
use crate::dag::PackageDag;
use crate::error::{Error, Result};
use crate::io::Selection;
use crate::knowledge::KnowledgeBase;
use crate::paths::ModelPath;

/// An enabled model of one instance, written `instance:model/path`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Slot {
    pub instance: String,
    pub model: ModelPath,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.instance, self.model)
    }
}

impl FromStr for Slot {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfiguration(format!("malformed slot `{s}`"));
        let (instance, model) = s.split_once(':').ok_or_else(bad)?;
        if instance.is_empty() {
            return Err(bad());
        }
        Ok(Slot {
            instance: instance.to_owned(),
            model: model.parse().map_err(|_| bad())?,
        })
    }
}

impl TryFrom<String> for Slot {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Slot> for String {
    fn from(s: Slot) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub choices: BTreeMap<Slot, String>,
}

impl Configuration {
    /// The environment's current method choices.
    pub fn current(env: &Environment) -> Self {
        let choices = env
            .instances
            .iter()
            .flat_map(|(id, inst)| {
                inst.method_choice.iter().map(move |(m, s)| {
                    (
                        Slot {
                            instance: id.clone(),
                            model: m.clone(),
                        },
                        s.clone(),
                    )
                })
            })
            .collect();
        Configuration { choices }
    }

    /// `slot=method` pairs joined by commas, in slot order.
    pub fn key(&self) -> String {
        self.choices
            .iter()
            .map(|(slot, m)| format!("{slot}={m}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(key: &str) -> Result<Self> {
        let mut choices = BTreeMap::new();
        for part in key.split(',').filter(|p| !p.is_empty()) {
            let (slot, method) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfiguration(format!("malformed choice `{part}`")))?;
            if choices.insert(slot.parse()?, method.to_owned()).is_some() {
                return Err(Error::InvalidConfiguration(format!("slot `{slot}` chosen twice")));
            }
        }
        Ok(Configuration { choices })
    }

    /// Per-instance selections, after checking that the configuration
    /// chooses exactly one valid method for every enabled model.
    pub fn selections(&self, env: &Environment, kb: &KnowledgeBase) -> Result<BTreeMap<String, Selection>> {
        let mut expected: BTreeSet<Slot> = BTreeSet::new();
        let mut out = BTreeMap::new();
        for (id, inst) in &env.instances {
            let mut sel = Selection {
                enabled: inst.enabled_models.clone(),
                methods: BTreeMap::new(),
            };
            for m in &inst.enabled_models {
                let slot = Slot {
                    instance: id.clone(),
                    model: m.clone(),
                };
                let method = self
                    .choices
                    .get(&slot)
                    .ok_or_else(|| Error::InvalidConfiguration(format!("no method chosen for {slot}")))?;
                let model = kb.catalog().model(&m.model).ok_or_else(|| Error::UnknownModel {
                    instance: id.clone(),
                    model: m.to_string(),
                })?;
                if !model.methods.contains(method) {
                    return Err(Error::UnknownMethod {
                        model: m.model.clone(),
                        method: method.clone(),
                    });
                }
                sel.methods.insert(m.clone(), method.clone());
                expected.insert(slot);
            }
            out.insert(id.clone(), sel);
        }
        if let Some(extra) = self.choices.keys().find(|s| !expected.contains(s)) {
            return Err(Error::InvalidConfiguration(format!(
                "{extra} is not an enabled model"
            )));
        }
        Ok(out)
    }
}

/// Every (instance, enabled model) slot with its candidate methods, both in
/// lexicographic order.
pub fn configuration_slots(env: &Environment, kb: &KnowledgeBase) -> Result<Vec<(Slot, Vec<String>)>> {
    let mut slots = Vec::new();
    for (id, inst) in &env.instances {
        for m in &inst.enabled_models {
            let model = kb.catalog().model(&m.model).ok_or_else(|| Error::UnknownModel {
                instance: id.clone(),
                model: m.to_string(),
            })?;
            let mut methods = model.methods.clone();
            methods.sort();
            methods.dedup();
            slots.push((
                Slot {
                    instance: id.clone(),
                    model: m.clone(),
                },
                methods,
            ));
        }
    }
    slots.sort();
    Ok(slots)
}

/// Number of configurations, saturating at `u128::MAX`.
pub fn count_configurations(env: &Environment, kb: &KnowledgeBase) -> Result<u128> {
    Ok(configuration_slots(env, kb)?
        .iter()
        .fold(1u128, |acc, (_, methods)| {
            acc.saturating_mul(methods.len() as u128)
        }))
}

/// The Cartesian product of method choices, in lexicographic order of the
/// choice vectors (last slot varies fastest). An empty environment has
/// exactly one, empty, configuration.
pub fn enumerate_configurations(env: &Environment, kb: &KnowledgeBase) -> Result<Vec<Configuration>> {
    let slots = configuration_slots(env, kb)?;
    if slots.iter().any(|(_, m)| m.is_empty()) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; slots.len()];
    loop {
        out.push(Configuration {
            choices: slots
                .iter()
                .zip(&digits)
                .map(|((slot, methods), &d)| (slot.clone(), methods[d].clone()))
                .collect(),
        });
        // odometer increment from the last slot
        let mut i = slots.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < slots[i].1.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Sum of all package estimates.
    Total,
    /// Longest path through the package DAG, assuming unlimited parallelism.
    CriticalPath,
}

impl FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" | "total-time" => Ok(Criterion::Total),
            "critical-path" | "critical_path" => Ok(Criterion::CriticalPath),
            other => Err(Error::UnsupportedCriterion(other.to_owned())),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Total => "total",
            Criterion::CriticalPath => "critical-path",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationReport {
    pub key: String,
    pub config: Configuration,
    pub total_time: f64,
    pub critical_path_time: f64,
    pub package_count: usize,
    /// Software packages without a performance model; they count as 0s.
    pub missing_perf: Vec<String>,
    /// Set when the induced graph is cyclic; the critical path then falls
    /// back to the total.
    pub error: Option<String>,
}

impl ConfigurationReport {
    pub fn value(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Total => self.total_time,
            Criterion::CriticalPath => self.critical_path_time,
        }
    }
}

/// Time estimates for one configuration. Each package costs
/// `fixed + per_unit * data_units` seconds.
pub fn evaluate_configuration(
    env: &Environment,
    kb: &KnowledgeBase,
    config: &Configuration,
    data_units: f64,
) -> Result<ConfigurationReport> {
    let dag = PackageDag::assemble(env, kb, config)?;
    let mut missing = BTreeSet::new();
    let cost: Vec<f64> = dag
        .nodes
        .iter()
        .map(
            |n| match kb.catalog().software_package(&n.sp).and_then(|sp| sp.perf) {
                Some(perf) => perf.estimate(data_units),
                None => {
                    missing.insert(n.sp.clone());
                    0.0
                }
            },
        )
        .collect();
    let total: f64 = cost.iter().sum();
    let (critical, error) = match dag.topological_order() {
        Ok(order) => {
            let mut finish = vec![0.0f64; dag.nodes.len()];
            let mut preds: Vec<Vec<usize>> = vec![Vec::new(); dag.nodes.len()];
            for e in &dag.edges {
                preds[e.to].push(e.from);
            }
            for &i in &order {
                let start = preds[i].iter().map(|&p| finish[p]).fold(0.0, f64::max);
                finish[i] = start + cost[i];
            }
            (finish.into_iter().fold(0.0, f64::max), None)
        }
        Err(e) => (total, Some(e.code().to_owned())),
    };
    Ok(ConfigurationReport {
        key: config.key(),
        config: config.clone(),
        total_time: total,
        critical_path_time: critical,
        package_count: dag.nodes.len(),
        missing_perf: missing.into_iter().collect(),
        error,
    })
}

/// Reports sorted ascending by `criterion`, ties broken by configuration
/// order.
pub fn compare_configurations(
    env: &Environment,
    kb: &KnowledgeBase,
    configs: &[Configuration],
    criterion: Criterion,
    data_units: f64,
) -> Result<Vec<ConfigurationReport>> {
    let mut reports = configs
        .iter()
        .map(|c| evaluate_configuration(env, kb, c, data_units))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| {
        a.value(criterion)
            .total_cmp(&b.value(criterion))
            .then_with(|| a.config.cmp(&b.config))
    });
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn slot_and_key_round_trip() {
        let key = "o1#1:m1=s2,o1#1:m3=s5,o2#1:m4=s7";
        let c = Configuration::parse_key(key).unwrap();
        assert_eq!(c.choices.len(), 3);
        assert_eq!(c.key(), key);
        assert!(Configuration::parse_key("o1#1:m1").is_err());
        assert!(Configuration::parse_key("o1#1:m1=s1,o1#1:m1=s2").is_err());
        assert_eq!(Configuration::parse_key("").unwrap(), Configuration::default());
    }

    #[test]
    fn empty_environment_has_one_configuration() {
        let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
        let env = Environment::new("e");
        assert_eq!(count_configurations(&env, &kb).unwrap(), 1);
        assert_eq!(
            enumerate_configurations(&env, &kb).unwrap(),
            vec![Configuration::default()]
        );
    }

    #[test]
    fn ship_and_waves_gives_twelve() {
        let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
        let mut env = Environment::new("e");
        env.instantiate(&kb, "o1").unwrap();
        env.instantiate(&kb, "o2").unwrap();
        // m1: 2, m2: 1, m3: 2, m4: 3
        assert_eq!(count_configurations(&env, &kb).unwrap(), 12);
        let all = enumerate_configurations(&env, &kb).unwrap();
        assert_eq!(all.len(), 12);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(all[0].key(), "o1#1:m1=s1,o1#1:m2=s3,o1#1:m3=s4,o2#1:m4=s6");
    }

    #[test]
    fn disabling_a_model_divides_the_count() {
        let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
        let mut env = Environment::new("e");
        env.instantiate(&kb, "o2").unwrap();
        env.instantiate(&kb, "o1").unwrap();
        let before = count_configurations(&env, &kb).unwrap();
        env.set_model_enabled(&kb, "o2#1", &ModelPath::root("m4"), false)
            .unwrap();
        assert_eq!(count_configurations(&env, &kb).unwrap(), before / 3);
    }

    #[test]
    fn criteria_parse() {
        assert_eq!("total".parse::<Criterion>().unwrap(), Criterion::Total);
        assert_eq!(
            "critical-path".parse::<Criterion>().unwrap(),
            Criterion::CriticalPath
        );
        assert_eq!(
            "quality".parse::<Criterion>().unwrap_err().code(),
            "UnsupportedCriterion"
        );
    }

    #[test]
    fn configuration_must_cover_enabled_models_exactly() {
        let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
        let mut env = Environment::new("e");
        env.instantiate(&kb, "o2").unwrap();
        let ok = Configuration::parse_key("o2#1:m4=s8").unwrap();
        assert!(ok.selections(&env, &kb).is_ok());
        let missing = Configuration::default();
        assert_eq!(
            missing.selections(&env, &kb).unwrap_err().code(),
            "InvalidConfiguration"
        );
        let extra = Configuration::parse_key("o2#1:m4=s8,o2#1:m9=s1").unwrap();
        assert_eq!(
            extra.selections(&env, &kb).unwrap_err().code(),
            "InvalidConfiguration"
        );
        let wrong = Configuration::parse_key("o2#1:m4=s1").unwrap();
        assert_eq!(wrong.selections(&env, &kb).unwrap_err().code(), "UnknownMethod");
    }

    #[test]
    fn missing_perf_is_flagged_and_free() {
        let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
        let mut env = Environment::new("e");
        let o1 = env.instantiate(&kb, "o1").unwrap();
        env.set_model_enabled(&kb, &o1, &ModelPath::root("m2"), false)
            .unwrap();
        env.set_model_enabled(&kb, &o1, &ModelPath::root("m3"), false)
            .unwrap();
        env.choose_method(&kb, &o1, &ModelPath::root("m1"), "s1").unwrap();
        let r = evaluate_configuration(&env, &kb, &Configuration::current(&env), 1.0).unwrap();
        // wind_reader 2 + ww3 45 + spectrum_filter (missing) 0
        assert_eq!(r.total_time, 47.0);
        assert_eq!(r.critical_path_time, 47.0);
        assert_eq!(r.missing_perf, ["spectrum_filter"]);
        assert_eq!(r.package_count, 3);
    }

    #[test]
    fn per_unit_cost_scales_with_data() {
        let kb = KnowledgeBase::new(samples::ship_and_waves()).unwrap();
        let mut env = Environment::new("e");
        let o1 = env.instantiate(&kb, "o1").unwrap();
        for m in ["m1", "m2"] {
            env.set_model_enabled(&kb, &o1, &ModelPath::root(m), false)
                .unwrap();
        }
        let c = Configuration::current(&env);
        // forcing_calc: 8 + 0.5 * units
        assert_eq!(
            evaluate_configuration(&env, &kb, &c, 0.0).unwrap().total_time,
            8.0
        );
        assert_eq!(
            evaluate_configuration(&env, &kb, &c, 10.0).unwrap().total_time,
            13.0
        );
    }
}
