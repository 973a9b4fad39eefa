//! Constructive maps between solutions of the capacity models.
//!
//! Every operation checks its input point against the relevant constraints
//! before transforming it and re-checks the output afterwards, so a returned
//! value is always a certified member of the target set.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formulate::{self, add_flow_symmetry, reverse_commodity, CostVector, VarRef};
use crate::instance::{demand_matrix, first_dissimilar_pair, scale_traffic, Instance, TrafficMatrix};
use crate::network::Network;
use crate::point::{FlowVector, ModelPoint};
use crate::rational::Rational;

/// First violated flow-balance equation of `x` for traffic `t`, if any.
pub fn balance_violation(network: &Network, x: &FlowVector, t: &TrafficMatrix) -> Result<Option<String>> {
    let demand = demand_matrix(t, network.nodes())?;
    for (k, &commodity) in network.commodities().iter().enumerate() {
        for node in 0..network.node_count() {
            let inflow: Rational = network.in_arcs(node).map(|a| x.get(k, a)).sum();
            let outflow: Rational = network.out_arcs(node).map(|a| x.get(k, a)).sum();
            if &inflow - &outflow != *demand.get(k, node) {
                return Ok(Some(format!(
                    "balance of {} at {}",
                    network.commodity_label(commodity),
                    network.name(node)
                )));
            }
        }
    }
    Ok(None)
}

fn require_balanced(network: &Network, x: &FlowVector, t: &TrafficMatrix, what: &str) -> Result<()> {
    match balance_violation(network, x, t)? {
        Some(v) => Err(Error::Precondition(format!("{what}: {v} violated"))),
        None => Ok(()),
    }
}

fn check_keys(network: &Network, x: &FlowVector) -> Result<()> {
    let (kc, ac) = (network.commodity_count(), network.arcs().len());
    match x.entries().find(|((k, a), _)| *k >= kc || *a >= ac) {
        Some(((k, a), _)) => Err(Error::Precondition(format!("flow key ({k}, {a}) outside the network"))),
        None => Ok(()),
    }
}

/// Per edge and unordered commodity pair `{uv, vu}`: the sum of the four
/// entries `x_ij^uv + x_ji^uv + x_ij^vu + x_ji^vu`. Keys are
/// `(edge, smaller commodity index)`; zero sums are omitted.
pub fn pair_aggregates(network: &Network, x: &FlowVector) -> BTreeMap<(usize, usize), Rational> {
    let mut out: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for ((k, a), v) in x.entries() {
        let key = (network.edge_of_arc(a), k.min(reverse_commodity(network, k)));
        *out.entry(key).or_default() += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `Σ cost · x` over the flow part of a cost vector.
pub fn flow_cost(cost: &CostVector, x: &FlowVector) -> Rational {
    x.entries()
        .map(|((commodity, arc), v)| cost.get(&VarRef::Flow { commodity, arc }).map(|c| c * v).unwrap_or_default())
        .sum()
}

/// Cost of a full point.
pub fn point_cost(cost: &CostVector, p: &ModelPoint) -> Rational {
    let cap: Rational =
        p.capacity.entries().map(|(v, n)| cost.get(v).map(|c| c * &Rational::from(*n)).unwrap_or_default()).sum();
    flow_cost(cost, &p.flow) + cap
}

/// `g` with `g(x, y) = f(x/2, y)`: flow coefficients halved, capacity ones kept.
pub fn halve_flow_cost(cost: &CostVector) -> CostVector {
    let half = Rational::new(1, 2);
    cost.iter().map(|(v, c)| (*v, if v.is_flow() { c * &half } else { c.clone() })).collect()
}

/// Rebuilds a flow for `target` from a flow for `source` when the two traffic
/// matrices are pairwise similar.
///
/// For each node pair `{u, v}` with `σ = t_uv + t_vu`, the combined flow
/// `x_ij^uv + x_ji^vu` is split with `α = t̂_uv / σ` onto commodity `uv` and
/// the remainder, reversed, onto `vu`. When `σ = 0`, `α` is taken as 0 and any
/// circulation ends up on the `vu` side. Other commodities are untouched.
pub fn redistribute(
    network: &Network,
    x: &FlowVector,
    source: &TrafficMatrix,
    target: &TrafficMatrix,
) -> Result<FlowVector> {
    check_keys(network, x)?;
    if let Some((i, j)) = first_dissimilar_pair(source, target)? {
        return Err(Error::NotPairwiseSimilar(format!("{}-{}", source.nodes()[i], source.nodes()[j])));
    }
    require_balanced(network, x, source, "input flow")?;
    let node_of = |id: &str| network.node(id);
    let mut out = FlowVector::new();
    for u in 0..network.node_count() {
        for v in (u + 1)..network.node_count() {
            let (su, sv) = (node_of(&source.nodes()[u])?, node_of(&source.nodes()[v])?);
            let sigma = source.get(u, v) + source.get(v, u);
            let alpha = if sigma.is_zero() { Rational::zero() } else { &target.get(u, v) / &sigma };
            let beta = Rational::one() - &alpha;
            let kuv = network.commodity_index((su, sv));
            let kvu = network.commodity_index((sv, su));
            for a in 0..network.arcs().len() {
                let ra = network.reverse_arc(a);
                out.set(kuv, a, &alpha * &(x.get(kuv, a) + x.get(kvu, ra)))?;
                out.set(kvu, a, &beta * &(x.get(kvu, a) + x.get(kuv, ra)))?;
            }
        }
    }
    require_balanced(network, &out, target, "redistributed flow")?;
    debug_assert_eq!(pair_aggregates(network, x), pair_aggregates(network, &out));
    Ok(out)
}

/// `x̂ = (x + x̃)/2` with `x̃_ij^uv = x_ji^vu`, for symmetric traffic.
/// The result satisfies `x̂_ij^uv = x̂_ji^vu` everywhere.
pub fn symmetrize(network: &Network, x: &FlowVector, t_star: &TrafficMatrix) -> Result<FlowVector> {
    check_keys(network, x)?;
    t_star.require_symmetric()?;
    require_balanced(network, x, t_star, "input flow")?;
    let half = Rational::new(1, 2);
    let mut out = FlowVector::new();
    for k in 0..network.commodity_count() {
        let rk = reverse_commodity(network, k);
        for a in 0..network.arcs().len() {
            let mirrored = x.get(rk, network.reverse_arc(a));
            out.set(k, a, &(x.get(k, a) + mirrored) * &half)?;
        }
    }
    require_balanced(network, &out, t_star, "symmetrized flow")?;
    debug_assert!(symmetry_violation(network, &out).is_none());
    Ok(out)
}

/// First `(commodity, arc)` where `x_ij^uv != x_ji^vu`, if any.
pub fn symmetry_violation(network: &Network, x: &FlowVector) -> Option<(usize, usize)> {
    (0..network.commodity_count())
        .flat_map(|k| (0..network.arcs().len()).map(move |a| (k, a)))
        .find(|&(k, a)| x.get(k, a) != x.get(reverse_commodity(network, k), network.reverse_arc(a)))
}

fn require_member(model: &crate::formulate::MipModel, p: &ModelPoint, what: &str) -> Result<()> {
    let violations = model.violations(&p.to_values());
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what}: violates {}", violations.join(", "))))
    }
}

/// Maps `(x, y)` in `U(T*)^=` to `(2x, y)` in `B(2T*)^=`. `inst` carries `T*`.
pub fn lift_to_bidirected(inst: &Instance, p: &ModelPoint) -> Result<ModelPoint> {
    inst.traffic.require_symmetric()?;
    let source = add_flow_symmetry(&formulate::build_undirected(inst)?);
    require_member(&source, p, "point is not in the symmetric undirected set")?;
    let lifted = ModelPoint { flow: p.flow.scaled(&Rational::from_integer(2)), capacity: p.capacity.clone() };
    let doubled = inst.with_traffic(scale_traffic(&inst.traffic, &Rational::from_integer(2))?)?;
    let target = add_flow_symmetry(&formulate::build_bidirected(&doubled)?);
    require_member(&target, &lifted, "lifted point")?;
    Ok(lifted)
}

/// Maps `(x', y')` in `B(2T*)^=` to `(x'/2, y')` in `U(T*)^=`. `inst` carries `T*`.
pub fn drop_to_undirected(inst: &Instance, q: &ModelPoint) -> Result<ModelPoint> {
    inst.traffic.require_symmetric()?;
    let doubled = inst.with_traffic(scale_traffic(&inst.traffic, &Rational::from_integer(2))?)?;
    let source = add_flow_symmetry(&formulate::build_bidirected(&doubled)?);
    require_member(&source, q, "point is not in the symmetric bidirected set")?;
    let dropped = ModelPoint { flow: q.flow.scaled(&Rational::new(1, 2)), capacity: q.capacity.clone() };
    let target = add_flow_symmetry(&formulate::build_undirected(inst)?);
    require_member(&target, &dropped, "dropped point")?;
    Ok(dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulate::arc_symmetric_cost;
    use crate::instance::{symmetric_counterpart, FacilityMenu};
    use crate::point::CapacityVector;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn flow(net: &Network, entries: &[((&str, &str), (&str, &str), Rational)]) -> FlowVector {
        let mut x = FlowVector::new();
        for ((o, d), (t, h), v) in entries {
            let k = net.commodity_index((net.node(o).unwrap(), net.node(d).unwrap()));
            let a = net.arc_index(net.node(t).unwrap(), net.node(h).unwrap()).unwrap();
            x.set(k, a, v.clone()).unwrap();
        }
        x
    }

    fn traffic(net: &Network, entries: &[(&str, &str, Rational)]) -> TrafficMatrix {
        let mut t = TrafficMatrix::for_network(net);
        for (a, b, v) in entries {
            t.set(a, b, v.clone()).unwrap();
        }
        t
    }

    #[test]
    fn redistribute_two_nodes() {
        let net = Network::complete(&["1", "2"]).unwrap();
        let t = traffic(&net, &[("1", "2", q(2, 1))]);
        let th = traffic(&net, &[("1", "2", q(1, 1)), ("2", "1", q(1, 1))]);
        let x = flow(&net, &[(("1", "2"), ("1", "2"), q(2, 1))]);
        let xh = redistribute(&net, &x, &t, &th).unwrap();
        assert_eq!(xh, flow(&net, &[(("1", "2"), ("1", "2"), q(1, 1)), (("2", "1"), ("2", "1"), q(1, 1))]));
    }

    #[test]
    fn redistribute_identity_target_keeps_aggregates() {
        let net = Network::complete(&["1", "2", "3"]).unwrap();
        let t = traffic(&net, &[("1", "2", q(1, 1)), ("2", "1", q(1, 2))]);
        let x = flow(
            &net,
            &[(("1", "2"), ("1", "3"), q(1, 1)), (("1", "2"), ("3", "2"), q(1, 1)), (("2", "1"), ("2", "1"), q(1, 2))],
        );
        let xh = redistribute(&net, &x, &t, &t).unwrap();
        assert_eq!(pair_aggregates(&net, &x), pair_aggregates(&net, &xh));
    }

    #[test]
    fn redistribute_full_reversal_via_third_node() {
        let net = Network::complete(&["1", "2", "3"]).unwrap();
        let t = traffic(&net, &[("1", "2", q(1, 1))]);
        let th = traffic(&net, &[("2", "1", q(1, 1))]);
        let x = flow(&net, &[(("1", "2"), ("1", "3"), q(1, 1)), (("1", "2"), ("3", "2"), q(1, 1))]);
        let xh = redistribute(&net, &x, &t, &th).unwrap();
        let expected = flow(&net, &[(("2", "1"), ("3", "1"), q(1, 1)), (("2", "1"), ("2", "3"), q(1, 1))]);
        assert_eq!(xh, expected);
        assert!(balance_violation(&net, &xh, &th).unwrap().is_none());
    }

    #[test]
    fn redistribute_rejects_bad_inputs() {
        let net = Network::complete(&["1", "2"]).unwrap();
        let t = traffic(&net, &[("1", "2", q(2, 1))]);
        let other = traffic(&net, &[("1", "2", q(2, 1)), ("2", "1", q(1, 1))]);
        let x = flow(&net, &[(("1", "2"), ("1", "2"), q(2, 1))]);
        assert!(matches!(redistribute(&net, &x, &t, &other), Err(Error::NotPairwiseSimilar(_))));
        let short = flow(&net, &[(("1", "2"), ("1", "2"), q(1, 1))]);
        assert!(matches!(redistribute(&net, &short, &t, &t), Err(Error::Precondition(_))));
    }

    #[test]
    fn redistribute_zero_pair_circulation_moves_to_reverse_commodity() {
        let net = Network::complete(&["1", "2"]).unwrap();
        let t = TrafficMatrix::for_network(&net);
        let x = flow(&net, &[(("1", "2"), ("1", "2"), q(1, 1)), (("1", "2"), ("2", "1"), q(1, 1))]);
        let xh = redistribute(&net, &x, &t, &t).unwrap();
        assert_eq!(xh, flow(&net, &[(("2", "1"), ("1", "2"), q(1, 1)), (("2", "1"), ("2", "1"), q(1, 1))]));
    }

    #[test]
    fn symmetrize_fixed_points() {
        let net = Network::complete(&["1", "2"]).unwrap();
        let ts = traffic(&net, &[("1", "2", q(1, 1)), ("2", "1", q(1, 1))]);
        let x = flow(&net, &[(("1", "2"), ("1", "2"), q(1, 1)), (("2", "1"), ("2", "1"), q(1, 1))]);
        assert_eq!(symmetrize(&net, &x, &ts).unwrap(), x);
        let zero = TrafficMatrix::for_network(&net);
        assert_eq!(symmetrize(&net, &FlowVector::new(), &zero).unwrap(), FlowVector::new());
    }

    #[test]
    fn symmetrize_triangle_splits_routes() {
        let net = Network::complete(&["1", "2", "3"]).unwrap();
        let ts = traffic(&net, &[("1", "2", q(1, 1)), ("2", "1", q(1, 1))]);
        let x = flow(
            &net,
            &[(("1", "2"), ("1", "3"), q(1, 1)), (("1", "2"), ("3", "2"), q(1, 1)), (("2", "1"), ("2", "1"), q(1, 1))],
        );
        let xh = symmetrize(&net, &x, &ts).unwrap();
        let h = q(1, 2);
        let expected = flow(
            &net,
            &[
                (("1", "2"), ("1", "2"), h.clone()),
                (("1", "2"), ("1", "3"), h.clone()),
                (("1", "2"), ("3", "2"), h.clone()),
                (("2", "1"), ("2", "1"), h.clone()),
                (("2", "1"), ("2", "3"), h.clone()),
                (("2", "1"), ("3", "1"), h),
            ],
        );
        assert_eq!(xh, expected);
        assert!(balance_violation(&net, &xh, &ts).unwrap().is_none());
        assert_eq!(pair_aggregates(&net, &x), pair_aggregates(&net, &xh));
        let cost = arc_symmetric_cost(&net, &[q(1, 1), q(2, 1), q(5, 3)], []);
        assert_eq!(flow_cost(&cost, &x), flow_cost(&cost, &xh));
    }

    #[test]
    fn symmetrize_requires_symmetric_traffic() {
        let net = Network::complete(&["1", "2"]).unwrap();
        let t = traffic(&net, &[("1", "2", q(1, 1))]);
        let x = flow(&net, &[(("1", "2"), ("1", "2"), q(1, 1))]);
        assert!(matches!(symmetrize(&net, &x, &t), Err(Error::NotSymmetric(_))));
    }

    fn two_node_half() -> (Instance, ModelPoint) {
        let net = Network::complete(&["1", "2"]).unwrap();
        let ts = traffic(&net, &[("1", "2", q(1, 2)), ("2", "1", q(1, 2))]);
        let x = flow(&net, &[(("1", "2"), ("1", "2"), q(1, 2)), (("2", "1"), ("2", "1"), q(1, 2))]);
        let inst = Instance::bare(net, FacilityMenu::single(1).unwrap(), ts).unwrap();
        let y = CapacityVector::from_pairs([(VarRef::CapEdge { facility: 0, edge: 0 }, 1)]);
        (inst, ModelPoint { flow: x, capacity: y })
    }

    #[test]
    fn lift_and_drop_two_nodes() {
        let (inst, p) = two_node_half();
        let lifted = lift_to_bidirected(&inst, &p).unwrap();
        assert_eq!(lifted.flow.get(0, 0), q(1, 1));
        assert_eq!(lifted.capacity, p.capacity);
        assert_eq!(drop_to_undirected(&inst, &lifted).unwrap(), p);

        let cost = arc_symmetric_cost(&inst.network, &[q(3, 1)], [(VarRef::CapEdge { facility: 0, edge: 0 }, q(7, 1))]);
        assert_eq!(point_cost(&halve_flow_cost(&cost), &lifted), point_cost(&cost, &p));
    }

    #[test]
    fn lift_zero_point() {
        let net = Network::complete(&["1", "2"]).unwrap();
        let inst =
            Instance::bare(net.clone(), FacilityMenu::single(1).unwrap(), TrafficMatrix::for_network(&net)).unwrap();
        let zero = ModelPoint::default();
        assert_eq!(lift_to_bidirected(&inst, &zero).unwrap(), zero);
        assert_eq!(drop_to_undirected(&inst, &zero).unwrap(), zero);
    }

    #[test]
    fn lift_rejects_asymmetric_points() {
        let (inst, mut p) = two_node_half();
        p.flow = flow(&inst.network, &[(("1", "2"), ("1", "2"), q(1, 2)), (("2", "1"), ("2", "1"), q(1, 4))]);
        assert!(lift_to_bidirected(&inst, &p).is_err());
        let asym = inst.with_traffic(traffic(&inst.network, &[("1", "2", q(1, 1))])).unwrap();
        assert!(matches!(lift_to_bidirected(&asym, &p), Err(Error::NotSymmetric(_))));
        let sym = symmetric_counterpart(&asym.traffic);
        assert!(sym.is_symmetric());
    }
}
