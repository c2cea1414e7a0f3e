//! JSON network file format: nodes, edges, optional demand entries and
//! budget policy. Attribute fields omitted in the file take the same
//! defaults as [`EdgeSpec`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{
    BudgetPolicy, DemandMatrix, EdgeSpec, NetworkError, SurveillanceNetwork,
};

/// Budgets may be infinite; JSON has no literal for that, so infinity is
/// written and read back as the string `"inf"`.
pub(crate) mod budget_value {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if value.is_infinite() && *value > 0.0 {
            ser.serialize_str("inf")
        } else {
            ser.serialize_f64(*value)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        match Raw::deserialize(de)? {
            Raw::Number(v) => Ok(v),
            Raw::Text(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Text(s) => Err(D::Error::custom(format!(
                "expected a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

/// Parses a budget given as text: a positive number or `inf`.
pub fn parse_budget_text(text: &str) -> Option<f64> {
    if text == "inf" {
        Some(f64::INFINITY)
    } else {
        text.parse().ok()
    }
}

#[derive(Debug, Error)]
pub enum NetworkFileError {
    #[error("invalid network file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandEntry {
    pub from: String,
    pub to: String,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetOverrideEntry {
    pub from: String,
    pub to: String,
    #[serde(with = "budget_value")]
    pub budget: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetsEntry {
    #[serde(with = "budget_value")]
    pub default: f64,
    #[serde(default)]
    pub overrides: Vec<BudgetOverrideEntry>,
}

/// On-disk shape of a network document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub nodes: Vec<NodeEntry>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<Vec<DemandEntry>>,
    #[serde(default = "default_weight_one")]
    pub default_weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<BudgetsEntry>,
}

fn default_weight_one() -> f64 {
    1.0
}

impl NetworkFile {
    pub fn parse(json: &str) -> Result<Self, NetworkFileError> {
        Ok(serde_json::from_str(json)?)
    }

    /// Resolves labels and validates everything, yielding the analysis
    /// inputs. Missing demand means uniform weights; missing budgets mean
    /// a uniform unit budget.
    pub fn into_parts(
        self,
    ) -> Result<(SurveillanceNetwork, DemandMatrix, BudgetPolicy), NetworkFileError> {
        let network =
            SurveillanceNetwork::build(self.nodes.into_iter().map(|n| n.label), self.edges)?;

        let resolve = |label: &str| {
            network
                .node_id(label)
                .ok_or_else(|| NetworkError::UnknownEndpoint(label.to_string()))
        };

        let mut demand = DemandMatrix::uniform(self.default_weight)?;
        for entry in self.demand.unwrap_or_default() {
            demand.set(resolve(&entry.from)?, resolve(&entry.to)?, entry.weight)?;
        }

        let budgets = match self.budgets {
            None => BudgetPolicy::default(),
            Some(spec) => {
                let mut policy = BudgetPolicy::uniform(spec.default)?;
                for entry in spec.overrides {
                    policy.set_override(resolve(&entry.from)?, resolve(&entry.to)?, entry.budget)?;
                }
                policy
            }
        };

        Ok((network, demand, budgets))
    }
}

/// Reads a network document from JSON text.
pub fn parse_network(
    json: &str,
) -> Result<(SurveillanceNetwork, DemandMatrix, BudgetPolicy), NetworkFileError> {
    NetworkFile::parse(json)?.into_parts()
}

/// Writes the analysis inputs back out as a network document. Entries are
/// sorted so the output is stable byte for byte.
pub fn write_network(
    network: &SurveillanceNetwork,
    demand: &DemandMatrix,
    budgets: &BudgetPolicy,
) -> String {
    let nodes = network
        .node_ids()
        .map(|n| NodeEntry {
            label: network.label(n).to_string(),
        })
        .collect();
    let edges = network
        .edges()
        .iter()
        .map(|e| EdgeSpec {
            from: network.label(e.from).to_string(),
            to: network.label(e.to).to_string(),
            quality: e.quality,
            monitor_bits: e.monitor_bits,
            sensor_failure_prob: e.sensor_failure_prob,
            access_failure_prob: e.access_failure_prob,
            access_failure_mode: e.access_failure_mode,
        })
        .collect();

    let mut demand_entries: Vec<DemandEntry> = demand
        .entries()
        .map(|(o, d, w)| DemandEntry {
            from: network.label(o).to_string(),
            to: network.label(d).to_string(),
            weight: w,
        })
        .collect();
    demand_entries.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));

    let mut override_entries: Vec<BudgetOverrideEntry> = budgets
        .overrides()
        .map(|(o, d, b)| BudgetOverrideEntry {
            from: network.label(o).to_string(),
            to: network.label(d).to_string(),
            budget: b,
        })
        .collect();
    override_entries.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));

    let file = NetworkFile {
        nodes,
        edges,
        demand: if demand_entries.is_empty() {
            None
        } else {
            Some(demand_entries)
        },
        default_weight: demand.default_weight(),
        budgets: Some(BudgetsEntry {
            default: budgets.default_budget(),
            overrides: override_entries,
        }),
    };
    serde_json::to_string_pretty(&file).expect("network file serialization cannot fail")
}
