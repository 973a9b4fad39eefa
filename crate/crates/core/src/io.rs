//! JSON instance and point files.
//!
//! ```json
//! {
//!   "nodes": ["1", "2", "3"],
//!   "edges": [["1", "2"], ["1", "3"], ["2", "3"]],
//!   "facilities": [1],
//!   "existing": {"1-2": "1/2"},
//!   "traffic": [{"from": "1", "to": "2", "amount": "3/2"}]
//! }
//! ```
//!
//! Existing capacities are keyed by edge (`"1-2"`) or by arc (`"1>2"`), never
//! both. A point file holds `kind`, a `flow` map keyed by flow variable names
//! and a `capacity` map keyed by capacity variable names.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulate::{ModelKind, VarRef};
use crate::instance::{ExistingCapacity, FacilityMenu, Instance, TrafficMatrix};
use crate::network::Network;
use crate::point::{CapacityVector, ModelPoint};
use crate::rational::Rational;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrafficEntry {
    from: String,
    to: String,
    amount: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    nodes: Vec<String>,
    edges: Vec<[String; 2]>,
    facilities: Vec<i64>,
    #[serde(default)]
    existing: BTreeMap<String, Rational>,
    #[serde(default)]
    traffic: Vec<TrafficEntry>,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let edges: Vec<(String, String)> = file.edges.into_iter().map(|[a, b]| (a, b)).collect();
    let network = Network::new(&file.nodes, &edges)?;
    let facilities = FacilityMenu::new(file.facilities)?;
    let existing = parse_existing(&network, &file.existing)?;
    let mut traffic = TrafficMatrix::for_network(&network);
    for e in file.traffic {
        if traffic.get_named(&e.from, &e.to)?.is_positive() {
            return Err(Error::Parse(format!("traffic {} -> {} given twice", e.from, e.to)));
        }
        traffic.set(&e.from, &e.to, e.amount)?;
    }
    Instance::new(network, facilities, existing, traffic)
}

fn parse_existing(network: &Network, map: &BTreeMap<String, Rational>) -> Result<ExistingCapacity> {
    let arc_keyed = map.keys().filter(|k| k.contains('>')).count();
    if arc_keyed > 0 && arc_keyed < map.len() {
        return Err(Error::ExistingCapacity("mixes edge keys (i-j) and arc keys (i>j)".into()));
    }
    if arc_keyed > 0 {
        let mut values = vec![Rational::zero(); network.arcs().len()];
        for (k, v) in map {
            values[network.parse_arc(k)?] = v.clone();
        }
        Ok(ExistingCapacity::Arcs(values))
    } else {
        let mut values = vec![Rational::zero(); network.edges().len()];
        for (k, v) in map {
            values[network.parse_edge(k)?] = v.clone();
        }
        Ok(ExistingCapacity::Edges(values))
    }
}

pub fn write_instance(inst: &Instance) -> String {
    let net = &inst.network;
    let existing = match &inst.existing {
        ExistingCapacity::Edges(v) => keyed(v, |i| net.edge_label(i)),
        ExistingCapacity::Arcs(v) => keyed(v, |i| net.arc_label(i)),
    };
    let file = InstanceFile {
        nodes: net.nodes().to_vec(),
        edges: net.edges().iter().map(|e| [net.name(e.a).to_string(), net.name(e.b).to_string()]).collect(),
        facilities: inst.facilities.capacities().to_vec(),
        existing,
        traffic: inst
            .traffic
            .entries()
            .map(|((i, j), t)| TrafficEntry { from: net.name(i).into(), to: net.name(j).into(), amount: t.clone() })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("plain data");
    out.push('\n');
    out
}

fn keyed(values: &[Rational], label: impl Fn(usize) -> String) -> BTreeMap<String, Rational> {
    values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (label(i), v.clone())).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    kind: String,
    #[serde(default)]
    flow: BTreeMap<String, Rational>,
    #[serde(default)]
    capacity: BTreeMap<String, u64>,
}

/// A model point tagged with the model kind its capacity keys belong to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointDocument {
    pub kind: ModelKind,
    pub point: ModelPoint,
}

pub fn parse_point(text: &str, network: &Network) -> Result<PointDocument> {
    let file: PointFile = serde_json::from_str(text)?;
    let kind: ModelKind = file.kind.parse()?;
    let mut point = ModelPoint::default();
    for (name, v) in file.flow {
        match VarRef::parse(&name, network)? {
            VarRef::Flow { commodity, arc } => point.flow.set(commodity, arc, v)?,
            _ => return Err(Error::Parse(format!("`{name}` in the flow map is not a flow variable"))),
        }
    }
    let mut capacity = CapacityVector::new();
    for (name, v) in file.capacity {
        let var = VarRef::parse(&name, network)?;
        let arc_keyed = matches!(var, VarRef::CapArc { .. });
        if var.is_flow() || arc_keyed != (kind == ModelKind::Directed) {
            return Err(Error::Parse(format!("`{name}` is not a capacity variable of a {kind} model")));
        }
        capacity.set(var, v);
    }
    point.capacity = capacity;
    Ok(PointDocument { kind, point })
}

pub fn write_point(doc: &PointDocument, network: &Network) -> String {
    let file = PointFile {
        kind: doc.kind.to_string(),
        flow: doc
            .point
            .flow
            .entries()
            .map(|((k, a), v)| (VarRef::Flow { commodity: k, arc: a }.name(network), v.clone()))
            .collect(),
        capacity: doc.point.capacity.entries().map(|(v, n)| (v.name(network), *n)).collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("plain data");
    out.push('\n');
    out
}
