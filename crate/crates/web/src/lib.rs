//! Browser bindings for the netcap demo page in `www/`.
//!
//! Each export takes and returns JSON strings. The plain `*_json` functions do
//! the work so they can be tested natively; the `#[wasm_bindgen]` wrappers
//! only convert errors.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use netcap::cuts::{cutset_inequality, mir_data, phi_minus, phi_plus, translate_to_bidirected, CutsetSpec};
use netcap::formulate::build;
use netcap::io::parse_instance;
use netcap::projlab::{
    box_points, project, render_capacity, triangle_bidirected_projection, Variant, DEFAULT_BOX_LIMIT,
};
use netcap::solver::model_accommodates;
use netcap::{CapacityVector, FacilityMenu, Instance, ModelKind, Network, Rational, TrafficMatrix, VarRef};

#[derive(Serialize)]
struct PhiRow {
    c: i64,
    plus: String,
    minus: String,
    plus_value: f64,
    minus_value: f64,
}

/// `φ⁺(c)` and `φ⁻(c)` for `c = 0..=max_c`.
pub fn phi_table_json(c_s: i64, r: &str, max_c: i64) -> Result<String, String> {
    let r: Rational = r.parse().map_err(|e| format!("r: {e}"))?;
    let mut rows = Vec::new();
    for c in 0..=max_c.clamp(0, 200) {
        let plus = phi_plus(c, c_s, &r).map_err(|e| e.to_string())?;
        let minus = phi_minus(c, c_s, &r).map_err(|e| e.to_string())?;
        rows.push(PhiRow {
            c,
            plus_value: plus.to_f64(),
            minus_value: minus.to_f64(),
            plus: plus.to_string(),
            minus: minus.to_string(),
        });
    }
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct TriangleInput {
    /// Six entries in the order 1>2, 1>3, 2>1, 2>3, 3>1, 3>2.
    traffic: Vec<String>,
    bound: u64,
}

#[derive(Serialize)]
struct TrianglePoint {
    y: [u64; 3],
    closed_form: bool,
    lp: bool,
}

#[derive(Serialize)]
struct TriangleOutput {
    node_demand: [i64; 3],
    theta: String,
    half_sum: i64,
    total_bound: i64,
    minimal: Vec<String>,
    points: Vec<TrianglePoint>,
    disagreements: usize,
}

/// Closed-form membership against LP feasibility on every vector of the box,
/// plus the minimal vectors of the bidirected projection.
pub fn triangle_json(input: &str) -> Result<String, String> {
    let input: TriangleInput = serde_json::from_str(input).map_err(|e| e.to_string())?;
    if input.traffic.len() != 6 {
        return Err("expected six traffic entries".into());
    }
    let bound = input.bound.min(6);
    let net = Network::complete(&["1", "2", "3"]).map_err(|e| e.to_string())?;
    let mut traffic = TrafficMatrix::for_network(&net);
    let pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
    for ((i, j), text) in pairs.into_iter().zip(&input.traffic) {
        let v: Rational = if text.trim().is_empty() {
            Rational::zero()
        } else {
            text.trim().parse().map_err(|e| format!("{text}: {e}"))?
        };
        traffic.set_index(i, j, v).map_err(|e| e.to_string())?;
    }
    let closed = triangle_bidirected_projection(&traffic).map_err(|e| e.to_string())?;
    let inst = Instance::bare(net.clone(), FacilityMenu::single(1).map_err(|e| e.to_string())?, traffic)
        .map_err(|e| e.to_string())?;
    let model = build(&inst, ModelKind::Bidirected).map_err(|e| e.to_string())?;
    let vars: Vec<VarRef> = model.capacity_vars().collect();
    let mut points = Vec::new();
    for p in box_points(3, bound) {
        let y = CapacityVector::from_pairs(vars.iter().copied().zip(p.iter().copied()));
        let lp = model_accommodates(&model, &y).map_err(|e| e.to_string())?;
        points.push(TrianglePoint { y: [p[0], p[1], p[2]], closed_form: closed.contains(&y), lp });
    }
    let projection = project(&inst, ModelKind::Bidirected, Variant::Plain, Some(bound), DEFAULT_BOX_LIMIT)
        .map_err(|e| e.to_string())?;
    let out = TriangleOutput {
        node_demand: closed.node_demand,
        theta: closed.theta.to_string(),
        half_sum: closed.half_sum,
        total_bound: closed.total_bound,
        minimal: projection.render(&net),
        disagreements: points.iter().filter(|p| p.closed_form != p.lp).count(),
        points,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct CutInput {
    instance: String,
    side_u: Vec<String>,
    /// Commodity labels such as `1>2`; empty means all.
    #[serde(default)]
    commodities: Vec<String>,
    #[serde(default)]
    s_plus: Vec<String>,
    #[serde(default)]
    s_minus: Vec<String>,
    /// 1-based.
    facility: usize,
}

#[derive(Serialize)]
struct CutOutput {
    b_q: String,
    b_prime: String,
    r: String,
    eta: String,
    flipped: bool,
    directed: String,
    bidirected: String,
    minimal_directed: Vec<String>,
}

/// Directed cut-set inequality and its bidirected translation.
pub fn cutset_json(input: &str) -> Result<String, String> {
    let input: CutInput = serde_json::from_str(input).map_err(|e| e.to_string())?;
    let inst = parse_instance(&input.instance).map_err(|e| e.to_string())?;
    let net = &inst.network;
    let side_u = input
        .side_u
        .iter()
        .map(|n| net.node(n.trim()))
        .collect::<Result<BTreeSet<_>, _>>()
        .map_err(|e| e.to_string())?;
    let commodities: BTreeSet<usize> = if input.commodities.is_empty() {
        (0..net.commodity_count()).collect()
    } else {
        input
            .commodities
            .iter()
            .map(|c| net.parse_commodity(c.trim()).map(|k| net.commodity_index(k)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?
    };
    let arcs = |list: &[String]| -> Result<BTreeSet<usize>, String> {
        list.iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| net.parse_arc(s.trim()).map_err(|e| e.to_string()))
            .collect()
    };
    if input.facility == 0 {
        return Err("facility is 1-based".into());
    }
    let spec = CutsetSpec {
        side_u,
        commodities,
        s_plus: arcs(&input.s_plus)?,
        s_minus: arcs(&input.s_minus)?,
        facility: input.facility - 1,
    };
    let mir = mir_data(&inst, &spec).map_err(|e| e.to_string())?;
    let cut = cutset_inequality(&inst, &spec).map_err(|e| e.to_string())?;
    let bi = translate_to_bidirected(&cut, net).map_err(|e| e.to_string())?;
    // Small instances only: the minimal directed designs give context for the cut.
    let minimal_directed = match project(&inst, ModelKind::Directed, Variant::Plain, None, 5_000) {
        Ok(p) => p.minimal.iter().map(|y| render_capacity(net, y)).collect(),
        Err(_) => Vec::new(),
    };
    let out = CutOutput {
        b_q: mir.b_q.to_string(),
        b_prime: mir.b_prime.to_string(),
        r: mir.r.to_string(),
        eta: mir.eta.to_string(),
        flipped: mir.flipped,
        directed: cut.to_text(net),
        bidirected: bi.to_text(net),
        minimal_directed,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn phi_table(c_s: i64, r: &str, max_c: i64) -> Result<String, JsError> {
    phi_table_json(c_s, r, max_c).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn triangle(input: &str) -> Result<String, JsError> {
    triangle_json(input).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cutset(input: &str) -> Result<String, JsError> {
    cutset_json(input).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_table_rows() {
        let rows: Vec<serde_json::Value> = serde_json::from_str(&phi_table_json(3, "1", 6).unwrap()).unwrap();
        assert_eq!(rows.len(), 7);
        assert_eq!(rows[3]["plus"], "1");
        assert_eq!(rows[2]["minus"], "2");
        assert!(phi_table_json(3, "3", 6).is_err());
    }

    #[test]
    fn triangle_agrees() {
        let input = r#"{"traffic": ["1", "", "", "", "", ""], "bound": 2}"#;
        let out: serde_json::Value = serde_json::from_str(&triangle_json(input).unwrap()).unwrap();
        assert_eq!(out["disagreements"], 0);
        assert_eq!(out["points"].as_array().unwrap().len(), 27);
        assert_eq!(out["node_demand"], serde_json::json!([1, 1, 0]));
    }

    #[test]
    fn cut_two_node() {
        let instance = r#"{"nodes": ["1", "2"], "edges": [["1", "2"]], "facilities": [1],
            "traffic": [{"from": "1", "to": "2", "amount": "3/2"}]}"#;
        let input = serde_json::json!({"instance": instance, "side_u": ["1"], "s_plus": ["1>2"], "facility": 1});
        let out: serde_json::Value = serde_json::from_str(&cutset_json(&input.to_string()).unwrap()).unwrap();
        assert_eq!(out["directed"], "cut: + 1/2 y(1|1>2) >= 1");
        assert_eq!(out["bidirected"], "cut: + 1/2 y(1|1-2) >= 1");
        assert_eq!(out["minimal_directed"], serde_json::json!(["{y(1|1>2)=2}"]));
    }
}
