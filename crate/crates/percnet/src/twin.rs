//! Digital-twin ingestion: parses a twin document (spaces, doors and the
//! surveillance assets serving them) and flattens it into a
//! [`SurveillanceNetwork`].
//!
//! One door becomes a forward directed edge and, unless the door is
//! one-way or the policy says otherwise, a reverse edge sharing the same
//! physical-link id. Per door, the forward quality is the most
//! restrictive serving reader's access level, monitored bits add up
//! across serving cameras, and the chance of crossing without leaving
//! any trace is the probability that every serving camera is down at
//! once. With a single camera per door that is exactly 1 - availability.

use serde::Deserialize;
use thiserror::Error;

use crate::network::{AccessFailureMode, EdgeSpec, NetworkError, SurveillanceNetwork};

/// Schema marker expected at the top of every twin document.
pub const TWIN_SCHEMA: &str = "surveillance-twin/1";

/// The reconstructed example building shipped with this crate: a campus,
/// a card-controlled building entrance watched by a good camera, and an
/// office reachable by a camera-watched elevator or by unmonitored
/// stairs.
pub const DEMO_TWIN_JSON: &str = include_str!("../data/demo.twin.json");

/// Parsed copy of the bundled demo building.
pub fn demo_document() -> TwinDocument {
    parse_twin(DEMO_TWIN_JSON).expect("bundled demo twin is valid")
}

#[derive(Debug, Error)]
pub enum TwinError {
    #[error("invalid twin document: {0}")]
    Schema(String),
    #[error("unsupported twin schema `{0}`, expected `{TWIN_SCHEMA}`")]
    UnsupportedSchema(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("`{entity}` references unknown {field} `{target}`")]
    DanglingReference {
        entity: String,
        field: &'static str,
        target: String,
    },
    #[error("`{entity}`: {field} = {value} is out of range")]
    Range {
        entity: String,
        field: &'static str,
        value: f64,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Space {
    pub id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub kind: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Door {
    pub id: String,
    pub from_space: String,
    pub to_space: String,
    #[serde(default)]
    pub one_way: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetKind {
    Camera,
    AccessReader,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Asset {
    pub id: String,
    pub serves_door: String,
    pub kind: AssetKind,
    /// Chance the device works at a randomly chosen moment.
    #[serde(default = "one")]
    pub availability: f64,
    /// Bits a working camera captures per crossing.
    #[serde(default)]
    pub privacy_cost_bits: f64,
    /// Reader access level as a fraction in (0, 1].
    #[serde(default = "one")]
    pub access_level: f64,
    #[serde(default)]
    pub failure_mode: AccessFailureMode,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwinDocument {
    pub schema: String,
    pub spaces: Vec<Space>,
    pub doors: Vec<Door>,
    pub assets: Vec<Asset>,
}

/// How doors and sensors translate into directed edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractionPolicy {
    /// Emit a reverse edge for every two-way door.
    pub reverse_traversal: bool,
    /// Apply the forward access restriction to the reverse edge too;
    /// off by default so fire-egress movement needs no card.
    pub reverse_requires_access: bool,
    /// Sensors watch crossings in both directions.
    pub sensors_bidirectional: bool,
}

impl Default for ExtractionPolicy {
    fn default() -> Self {
        Self {
            reverse_traversal: true,
            reverse_requires_access: false,
            sensors_bidirectional: true,
        }
    }
}

/// Parses and validates a twin document.
pub fn parse_twin(json: &str) -> Result<TwinDocument, TwinError> {
    let doc: TwinDocument = serde_json::from_str(json).map_err(|e| TwinError::Schema(e.to_string()))?;
    validate(&doc)?;
    Ok(doc)
}

fn validate(doc: &TwinDocument) -> Result<(), TwinError> {
    if doc.schema != TWIN_SCHEMA {
        return Err(TwinError::UnsupportedSchema(doc.schema.clone()));
    }

    let mut ids = std::collections::HashSet::new();
    for id in doc
        .spaces
        .iter()
        .map(|s| &s.id)
        .chain(doc.doors.iter().map(|d| &d.id))
        .chain(doc.assets.iter().map(|a| &a.id))
    {
        if !ids.insert(id.as_str()) {
            return Err(TwinError::DuplicateId(id.clone()));
        }
    }

    let space_ids: std::collections::HashSet<&str> =
        doc.spaces.iter().map(|s| s.id.as_str()).collect();
    for door in &doc.doors {
        for (field, target) in [("from_space", &door.from_space), ("to_space", &door.to_space)] {
            if !space_ids.contains(target.as_str()) {
                return Err(TwinError::DanglingReference {
                    entity: door.id.clone(),
                    field,
                    target: target.clone(),
                });
            }
        }
    }

    let door_ids: std::collections::HashSet<&str> =
        doc.doors.iter().map(|d| d.id.as_str()).collect();
    for asset in &doc.assets {
        if !door_ids.contains(asset.serves_door.as_str()) {
            return Err(TwinError::DanglingReference {
                entity: asset.id.clone(),
                field: "serves_door",
                target: asset.serves_door.clone(),
            });
        }
        let range = |field: &'static str, value: f64, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(TwinError::Range {
                    entity: asset.id.clone(),
                    field,
                    value,
                })
            }
        };
        range(
            "availability",
            asset.availability,
            (0.0..=1.0).contains(&asset.availability),
        )?;
        range(
            "privacy_cost_bits",
            asset.privacy_cost_bits,
            asset.privacy_cost_bits.is_finite() && asset.privacy_cost_bits >= 0.0,
        )?;
        range(
            "access_level",
            asset.access_level,
            asset.access_level > 0.0 && asset.access_level <= 1.0,
        )?;
    }
    Ok(())
}

/// Transforms a validated twin into the analysis network.
pub fn extract_network(
    twin: &TwinDocument,
    policy: &ExtractionPolicy,
) -> Result<SurveillanceNetwork, TwinError> {
    let mut edges = Vec::new();
    for door in &twin.doors {
        let serving: Vec<&Asset> = twin
            .assets
            .iter()
            .filter(|a| a.serves_door == door.id)
            .collect();
        let cameras: Vec<&Asset> = serving
            .iter()
            .copied()
            .filter(|a| a.kind == AssetKind::Camera)
            .collect();

        // The most restrictive reader controls passage; the first one in
        // document order wins ties.
        let mut binding_reader: Option<&Asset> = None;
        for reader in serving.iter().copied().filter(|a| a.kind == AssetKind::AccessReader) {
            if binding_reader.is_none_or(|b| reader.access_level < b.access_level) {
                binding_reader = Some(reader);
            }
        }

        let quality = binding_reader.map_or(1.0, |r| r.access_level);
        let access_failure_prob = binding_reader.map_or(0.0, |r| 1.0 - r.availability);
        let access_failure_mode =
            binding_reader.map_or(AccessFailureMode::FailClosed, |r| r.failure_mode);
        // fold from +0.0: summing an empty camera list must not produce -0.0
        let monitor_bits = cameras.iter().fold(0.0, |acc, c| acc + c.privacy_cost_bits);
        // Free passage requires every serving camera to be down at once.
        let sensor_failure_prob = if cameras.is_empty() {
            0.0
        } else {
            cameras.iter().map(|c| 1.0 - c.availability).product()
        };

        let forward = EdgeSpec::new(door.from_space.clone(), door.to_space.clone())
            .with_quality(quality)
            .with_monitor_bits(monitor_bits)
            .with_sensor_failure(sensor_failure_prob)
            .with_access_failure(access_failure_prob, access_failure_mode);

        if !door.one_way && policy.reverse_traversal {
            let mut reverse = EdgeSpec::new(door.to_space.clone(), door.from_space.clone());
            if policy.reverse_requires_access {
                reverse = reverse
                    .with_quality(quality)
                    .with_access_failure(access_failure_prob, access_failure_mode);
            }
            if policy.sensors_bidirectional {
                reverse = reverse
                    .with_monitor_bits(monitor_bits)
                    .with_sensor_failure(sensor_failure_prob);
            }
            edges.push(forward);
            edges.push(reverse);
        } else {
            edges.push(forward);
        }
    }

    Ok(SurveillanceNetwork::build(
        twin.spaces.iter().map(|s| s.id.clone()),
        edges,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(doors: &str, assets: &str) -> String {
        format!(
            r#"{{
                "schema": "surveillance-twin/1",
                "spaces": [
                    {{"id": "A", "name": "A", "kind": "room"}},
                    {{"id": "B", "name": "B", "kind": "room"}}
                ],
                "doors": [{doors}],
                "assets": [{assets}]
            }}"#
        )
    }

    #[test]
    fn demo_document_counts() {
        let doc = demo_document();
        assert_eq!(doc.spaces.len(), 5);
        assert_eq!(doc.doors.len(), 5);
        assert_eq!(doc.assets.len(), 3);
    }

    #[test]
    fn dangling_asset_reference_rejected() {
        let json = minimal(
            r#"{"id": "d1", "from_space": "A", "to_space": "B"}"#,
            r#"{"id": "cam", "serves_door": "nope", "kind": "camera", "privacy_cost_bits": 1.0}"#,
        );
        let err = parse_twin(&json).unwrap_err();
        assert!(matches!(err, TwinError::DanglingReference { field: "serves_door", .. }));
    }

    #[test]
    fn availability_out_of_range_rejected() {
        let json = minimal(
            r#"{"id": "d1", "from_space": "A", "to_space": "B"}"#,
            r#"{"id": "cam", "serves_door": "d1", "kind": "camera", "availability": 1.2}"#,
        );
        let err = parse_twin(&json).unwrap_err();
        assert!(matches!(err, TwinError::Range { field: "availability", .. }));
    }

    #[test]
    fn unknown_asset_kind_rejected() {
        let json = minimal(
            r#"{"id": "d1", "from_space": "A", "to_space": "B"}"#,
            r#"{"id": "x", "serves_door": "d1", "kind": "turret"}"#,
        );
        assert!(matches!(parse_twin(&json).unwrap_err(), TwinError::Schema(_)));
    }

    #[test]
    fn missing_field_rejected() {
        let json = minimal(r#"{"id": "d1", "from_space": "A"}"#, "");
        assert!(matches!(parse_twin(&json).unwrap_err(), TwinError::Schema(_)));
    }

    #[test]
    fn wrong_schema_marker_rejected() {
        let json = r#"{"schema": "surveillance-twin/9", "spaces": [], "doors": [], "assets": []}"#;
        assert!(matches!(
            parse_twin(json).unwrap_err(),
            TwinError::UnsupportedSchema(_)
        ));
    }

    #[test]
    fn duplicate_id_rejected() {
        let json = minimal(
            r#"{"id": "A", "from_space": "A", "to_space": "B"}"#,
            "",
        );
        assert!(matches!(parse_twin(&json).unwrap_err(), TwinError::DuplicateId(_)));
    }

    #[test]
    fn unguarded_door_extracts_public_edges() {
        let json = minimal(r#"{"id": "d1", "from_space": "A", "to_space": "B"}"#, "");
        let net = extract_network(&parse_twin(&json).unwrap(), &ExtractionPolicy::default()).unwrap();
        assert_eq!(net.edge_count(), 2);
        for edge in net.edges() {
            assert_eq!(edge.quality, 1.0);
            assert_eq!(edge.monitor_bits, 0.0);
            assert_eq!(edge.sensor_failure_prob, 0.0);
        }
    }

    #[test]
    fn reader_and_camera_compose_onto_the_edge() {
        let doc = demo_document();
        let net = extract_network(&doc, &ExtractionPolicy::default()).unwrap();
        let campus = net.node_id("Campus").unwrap();
        let entrance = net.node_id("BuildingEntrance").unwrap();

        let forward = net
            .edges()
            .iter()
            .find(|e| e.from == campus && e.to == entrance)
            .unwrap();
        assert_eq!(forward.quality, 0.75);
        assert_eq!(forward.monitor_bits, 10.0);
        assert!((forward.sensor_failure_prob - 0.01).abs() < 1e-12);
        assert_eq!(forward.access_failure_prob, 0.0);

        let reverse = net
            .edges()
            .iter()
            .find(|e| e.from == entrance && e.to == campus)
            .unwrap();
        assert_eq!(reverse.quality, 1.0);
        assert_eq!(reverse.monitor_bits, 10.0);
        assert!((reverse.sensor_failure_prob - 0.01).abs() < 1e-12);
        assert_eq!(reverse.pair, forward.pair);
    }

    #[test]
    fn camera_bits_add_and_failures_multiply() {
        let json = minimal(
            r#"{"id": "d1", "from_space": "A", "to_space": "B"}"#,
            r#"{"id": "c1", "serves_door": "d1", "kind": "camera", "privacy_cost_bits": 1.0},
               {"id": "c2", "serves_door": "d1", "kind": "camera", "privacy_cost_bits": 2.0}"#,
        );
        let net = extract_network(&parse_twin(&json).unwrap(), &ExtractionPolicy::default()).unwrap();
        assert_eq!(net.edges()[0].monitor_bits, 3.0);
        assert_eq!(net.edges()[0].sensor_failure_prob, 0.0);
    }

    #[test]
    fn most_restrictive_reader_wins() {
        let json = minimal(
            r#"{"id": "d1", "from_space": "A", "to_space": "B"}"#,
            r#"{"id": "r1", "serves_door": "d1", "kind": "access_reader", "access_level": 0.75},
               {"id": "r2", "serves_door": "d1", "kind": "access_reader", "access_level": 0.25, "availability": 0.9}"#,
        );
        let net = extract_network(&parse_twin(&json).unwrap(), &ExtractionPolicy::default()).unwrap();
        assert_eq!(net.edges()[0].quality, 0.25);
        assert!((net.edges()[0].access_failure_prob - 0.1).abs() < 1e-12);
    }

    #[test]
    fn one_way_door_has_no_reverse_edge() {
        let json = minimal(
            r#"{"id": "d1", "from_space": "A", "to_space": "B", "one_way": true}"#,
            "",
        );
        let net = extract_network(&parse_twin(&json).unwrap(), &ExtractionPolicy::default()).unwrap();
        assert_eq!(net.edge_count(), 1);
    }

    #[test]
    fn edge_counts_follow_one_way_rule() {
        let doc = demo_document();
        let net = extract_network(&doc, &ExtractionPolicy::default()).unwrap();
        assert_eq!(net.node_count(), doc.spaces.len());
        assert_eq!(net.edge_count(), doc.doors.len() * 2);
        assert_eq!(net.pair_count(), doc.doors.len());
    }

    #[test]
    fn extraction_is_idempotent() {
        let doc = demo_document();
        let policy = ExtractionPolicy::default();
        assert_eq!(
            extract_network(&doc, &policy).unwrap(),
            extract_network(&doc, &policy).unwrap()
        );
    }

    #[test]
    fn policy_variants() {
        let doc = demo_document();

        let no_reverse = extract_network(
            &doc,
            &ExtractionPolicy {
                reverse_traversal: false,
                ..ExtractionPolicy::default()
            },
        )
        .unwrap();
        assert_eq!(no_reverse.edge_count(), 5);

        let secured = extract_network(
            &doc,
            &ExtractionPolicy {
                reverse_requires_access: true,
                ..ExtractionPolicy::default()
            },
        )
        .unwrap();
        let entrance = secured.node_id("BuildingEntrance").unwrap();
        let campus = secured.node_id("Campus").unwrap();
        let reverse = secured
            .edges()
            .iter()
            .find(|e| e.from == entrance && e.to == campus)
            .unwrap();
        assert_eq!(reverse.quality, 0.75);

        let blind_reverse = extract_network(
            &doc,
            &ExtractionPolicy {
                sensors_bidirectional: false,
                ..ExtractionPolicy::default()
            },
        )
        .unwrap();
        let reverse = blind_reverse
            .edges()
            .iter()
            .find(|e| e.from == entrance && e.to == campus)
            .unwrap();
        assert_eq!(reverse.monitor_bits, 0.0);
        assert_eq!(reverse.sensor_failure_prob, 0.0);
    }

    #[test]
    fn self_loop_door_fails_extraction() {
        let json = minimal(r#"{"id": "d1", "from_space": "A", "to_space": "A"}"#, "");
        let err = extract_network(&parse_twin(&json).unwrap(), &ExtractionPolicy::default())
            .unwrap_err();
        assert!(matches!(err, TwinError::Network(NetworkError::SelfLoop(_))));
    }
}
