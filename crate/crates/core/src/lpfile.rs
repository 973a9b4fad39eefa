//! Human-readable LP text format with exact `p/q` coefficients.
//!
//! ```text
//! \ netcap undirected model
//! \ flags: symmetric-flows
//! minimize
//!  obj: + 1 y(1|1-2)
//! subject to
//!  bal(1>2@1): - 1 x(1>2|1>2) + 1 x(1>2|2>1) = -3/2
//! bounds
//!  y(1|1-2) <= 4
//! general
//!  y(1|1-2)
//! end
//! ```
//!
//! Every term is written as `sign coefficient name` separated by spaces.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formulate::{CostVector, LinearConstraint, MipModel, ModelKind, Sense, VarRef, Variable};
use crate::network::Network;
use crate::rational::Rational;

pub fn format_terms(network: &Network, terms: &BTreeMap<VarRef, Rational>) -> String {
    let mut out = String::new();
    for (i, (v, c)) in terms.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let sign = if c.is_negative() { '-' } else { '+' };
        let _ = write!(out, "{sign} {} {}", c.abs(), v.name(network));
    }
    out
}

/// Parses `sign coefficient name` triples.
pub fn parse_terms(network: &Network, text: &str) -> Result<BTreeMap<VarRef, Rational>> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if !tokens.len().is_multiple_of(3) {
        return Err(Error::Parse(format!("terms must be `sign coefficient name` triples: `{text}`")));
    }
    let mut out = BTreeMap::new();
    for chunk in tokens.chunks(3) {
        let negative = match chunk[0] {
            "+" => false,
            "-" => true,
            other => return Err(Error::Parse(format!("expected + or -, found `{other}`"))),
        };
        let c: Rational = chunk[1].parse()?;
        let var = VarRef::parse(chunk[2], network)?;
        if out.insert(var, if negative { -c } else { c }).is_some() {
            return Err(Error::Parse(format!("variable `{}` repeated", chunk[2])));
        }
    }
    Ok(out)
}

/// Splits `lhs (<=|=|>=) rhs`.
pub fn split_relation(text: &str) -> Result<(&str, Sense, Rational)> {
    for (op, sense) in [("<=", Sense::Le), (">=", Sense::Ge), ("=", Sense::Eq)] {
        if let Some(pos) = text.rfind(op) {
            let rhs: Rational = text[pos + op.len()..].trim().parse()?;
            return Ok((&text[..pos], sense, rhs));
        }
    }
    Err(Error::Parse(format!("no relation in `{text}`")))
}

pub fn write_model(model: &MipModel) -> String {
    let net = model.network();
    let mut out = String::new();
    let _ = writeln!(out, "\\ netcap {} model", model.kind());
    let caps: Vec<String> = model.facilities().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "\\ facilities: {}", caps.join(" "));
    let mut flags = Vec::new();
    if model.has_flow_symmetry() {
        flags.push("symmetric-flows");
    }
    if model.is_equalized() {
        flags.push("equalized");
    }
    if !flags.is_empty() {
        let _ = writeln!(out, "\\ flags: {}", flags.join(" "));
    }
    out.push_str("minimize\n");
    let _ = writeln!(out, " obj: {}", format_terms(net, model.objective()));
    out.push_str("subject to\n");
    for c in model.constraints() {
        let _ = writeln!(out, " {}: {} {} {}", c.label, format_terms(net, &c.coefficients), c.sense, c.rhs);
    }
    out.push_str("bounds\n");
    for v in model.variables() {
        if let Some(u) = &v.upper {
            let _ = writeln!(out, " {} <= {u}", v.var.name(net));
        }
    }
    out.push_str("general\n");
    for v in model.variables().iter().filter(|v| v.integer) {
        let _ = writeln!(out, " {}", v.var.name(net));
    }
    out.push_str("end\n");
    out
}

#[derive(PartialEq)]
enum Section {
    Header,
    Objective,
    Constraints,
    Bounds,
    General,
    End,
}

/// Reads a model written by [`write_model`] back, resolving names against `network`.
/// Variables are declared in canonical order: all flows, then all capacities
/// of the kind named in the header.
pub fn parse_model(text: &str, network: &Network) -> Result<MipModel> {
    let mut kind: Option<ModelKind> = None;
    let mut facilities: Vec<i64> = Vec::new();
    let mut flags: Vec<String> = Vec::new();
    let mut objective = CostVector::new();
    let mut constraints = Vec::new();
    let mut uppers: BTreeMap<VarRef, Rational> = BTreeMap::new();
    let mut integers = Vec::new();
    let mut section = Section::Header;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('\\') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("netcap ") {
                kind = Some(rest.trim_end_matches(" model").parse()?);
            } else if let Some(rest) = comment.strip_prefix("facilities:") {
                facilities = rest
                    .split_whitespace()
                    .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad facility `{s}`"))))
                    .collect::<Result<_>>()?;
            } else if let Some(rest) = comment.strip_prefix("flags:") {
                flags = rest.split_whitespace().map(str::to_string).collect();
            }
            continue;
        }
        match line {
            "minimize" => section = Section::Objective,
            "subject to" => section = Section::Constraints,
            "bounds" => section = Section::Bounds,
            "general" => section = Section::General,
            "end" => section = Section::End,
            _ => match section {
                Section::Objective => {
                    let body = line
                        .strip_prefix("obj:")
                        .ok_or_else(|| Error::Parse("objective must be labelled obj".into()))?;
                    objective = parse_terms(network, body)?;
                }
                Section::Constraints => {
                    let (label, body) =
                        line.split_once(": ").ok_or_else(|| Error::Parse(format!("unlabelled row `{line}`")))?;
                    let (lhs, sense, rhs) = split_relation(body)?;
                    let terms = parse_terms(network, lhs)?;
                    let row = LinearConstraint::new(label, terms, sense, rhs)
                        .ok_or_else(|| Error::Parse(format!("row {label} has no terms")))?;
                    constraints.push(row);
                }
                Section::Bounds => {
                    let (name, sense, u) = split_relation(line)?;
                    if sense != Sense::Le {
                        return Err(Error::Parse(format!("only upper bounds are supported: `{line}`")));
                    }
                    uppers.insert(VarRef::parse(name.trim(), network)?, u);
                }
                Section::General => {
                    for name in line.split_whitespace() {
                        integers.push(VarRef::parse(name, network)?);
                    }
                }
                Section::Header | Section::End => {
                    return Err(Error::Parse(format!("unexpected line `{line}`")));
                }
            },
        }
    }
    let kind = kind.ok_or_else(|| Error::Parse("missing `\\ netcap <kind> model` header".into()))?;
    if facilities.is_empty() {
        return Err(Error::Parse("missing facilities header".into()));
    }
    let mut variables = Vec::new();
    for k in 0..network.commodity_count() {
        for a in 0..network.arcs().len() {
            let var = VarRef::Flow { commodity: k, arc: a };
            variables.push(Variable { var, integer: false, upper: uppers.remove(&var) });
        }
    }
    let cap_count = if kind == ModelKind::Directed { network.arcs().len() } else { network.edges().len() };
    for m in 0..facilities.len() {
        for i in 0..cap_count {
            let var = if kind == ModelKind::Directed {
                VarRef::CapArc { facility: m, arc: i }
            } else {
                VarRef::CapEdge { facility: m, edge: i }
            };
            variables.push(Variable { var, integer: integers.contains(&var), upper: uppers.remove(&var) });
        }
    }
    if let Some(v) = uppers.keys().next() {
        return Err(Error::Parse(format!("bound on undeclared variable {}", v.name(network))));
    }
    MipModel::from_parts(
        kind,
        network.clone(),
        facilities,
        variables,
        constraints,
        objective,
        flags.iter().any(|f| f == "symmetric-flows"),
        flags.iter().any(|f| f == "equalized"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulate::{add_flow_symmetry, build, equalize_directed};
    use crate::instance::{FacilityMenu, Instance, TrafficMatrix};

    fn instance() -> Instance {
        let net = Network::complete(&["1", "2", "3"]).unwrap();
        let t = TrafficMatrix::for_network(&net)
            .with("1", "2", Rational::new(3, 2))
            .unwrap()
            .with("3", "1", Rational::new(1, 4))
            .unwrap();
        Instance::bare(net, FacilityMenu::new(vec![1, 3]).unwrap(), t).unwrap()
    }

    #[test]
    fn models_round_trip() {
        let inst = instance();
        for kind in [ModelKind::Undirected, ModelKind::Bidirected, ModelKind::Directed] {
            let mut model = build(&inst, kind).unwrap().with_capacity_bound(4);
            if kind == ModelKind::Directed {
                model = equalize_directed(&model).unwrap();
            } else {
                model = add_flow_symmetry(&model);
            }
            let text = write_model(&model);
            let back = parse_model(&text, &inst.network).unwrap();
            assert_eq!(back, model, "{kind}");
            assert_eq!(write_model(&back), text);
        }
    }

    #[test]
    fn rejects_garbage() {
        let net = Network::complete(&["1", "2"]).unwrap();
        assert!(parse_model("minimize\n obj: + 1 z(1)\nend\n", &net).is_err());
        assert!(
            parse_model("\\ netcap undirected model\n\\ facilities: 1\nsubject to\n c: + 1 y(1|1-2)\n", &net).is_err()
        );
    }
}
