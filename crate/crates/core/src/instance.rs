//! Facility menus, traffic and demand matrices, and problem instances.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::{Commodity, Network};
use crate::rational::Rational;

/// Installable facility capacities `c_1 < c_2 < ... < c_|M|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacilityMenu(Vec<i64>);

impl FacilityMenu {
    pub fn new(capacities: Vec<i64>) -> Result<Self> {
        if capacities.is_empty() {
            return Err(Error::InvalidFacilities("no facility types".into()));
        }
        if capacities.iter().any(|&c| c <= 0) {
            return Err(Error::InvalidFacilities("capacities must be positive".into()));
        }
        if capacities.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFacilities("capacities must be strictly increasing".into()));
        }
        Ok(FacilityMenu(capacities))
    }

    pub fn single(capacity: i64) -> Result<Self> {
        FacilityMenu::new(vec![capacity])
    }

    pub fn capacities(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn capacity(&self, m: usize) -> i64 {
        self.0[m]
    }

    pub fn smallest(&self) -> i64 {
        self.0[0]
    }
}

/// Directed point-to-point traffic `t_ij >= 0`; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficMatrix {
    nodes: Vec<String>,
    entries: BTreeMap<Commodity, Rational>,
}

impl TrafficMatrix {
    /// The zero matrix over `nodes` (sorted internally).
    pub fn new<S: AsRef<str>>(nodes: &[S]) -> Self {
        let mut nodes: Vec<String> = nodes.iter().map(|s| s.as_ref().to_string()).collect();
        nodes.sort();
        nodes.dedup();
        TrafficMatrix { nodes, entries: BTreeMap::new() }
    }

    pub fn for_network(network: &Network) -> Self {
        TrafficMatrix { nodes: network.nodes().to_vec(), entries: BTreeMap::new() }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    fn index(&self, id: &str) -> Result<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(id)).map_err(|_| Error::UnknownNode(id.into()))
    }

    pub fn set(&mut self, from: &str, to: &str, amount: Rational) -> Result<()> {
        let (i, j) = (self.index(from)?, self.index(to)?);
        self.set_index(i, j, amount)
    }

    pub fn with(mut self, from: &str, to: &str, amount: Rational) -> Result<Self> {
        self.set(from, to, amount)?;
        Ok(self)
    }

    pub fn set_index(&mut self, i: usize, j: usize, amount: Rational) -> Result<()> {
        if i == j {
            return Err(Error::Precondition("traffic matrices have no diagonal".into()));
        }
        if amount.is_negative() {
            return Err(Error::NegativeTraffic {
                from: self.nodes[i].clone(),
                to: self.nodes[j].clone(),
                amount: amount.to_string(),
            });
        }
        if amount.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), amount);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn get_named(&self, from: &str, to: &str) -> Result<Rational> {
        Ok(self.get(self.index(from)?, self.index(to)?))
    }

    /// Nonzero entries in `(i, j)` order.
    pub fn entries(&self) -> impl Iterator<Item = (Commodity, &Rational)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetric_pair().is_none()
    }

    fn asymmetric_pair(&self) -> Option<Commodity> {
        self.entries.keys().find(|&&(i, j)| self.get(i, j) != self.get(j, i)).copied()
    }

    pub(crate) fn require_symmetric(&self) -> Result<()> {
        match self.asymmetric_pair() {
            Some((i, j)) => Err(Error::NotSymmetric(format!("{}>{}", self.nodes[i], self.nodes[j]))),
            None => Ok(()),
        }
    }
}

/// `d_u^k` for every commodity `k = (i, j)` and node `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandMatrix {
    node_count: usize,
    commodities: Vec<Commodity>,
    values: Vec<Rational>,
}

impl DemandMatrix {
    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Demand of the `k`-th commodity (in sorted order) at node `u`.
    pub fn get(&self, k: usize, u: usize) -> &Rational {
        &self.values[k * self.node_count + u]
    }

    pub fn row(&self, k: usize) -> &[Rational] {
        &self.values[k * self.node_count..(k + 1) * self.node_count]
    }
}

/// Builds `d_j^(ij) = t_ij`, `d_i^(ij) = -t_ij`, zero elsewhere, over the node list `nodes`.
pub fn demand_matrix<S: AsRef<str>>(traffic: &TrafficMatrix, nodes: &[S]) -> Result<DemandMatrix> {
    let mut sorted: Vec<&str> = nodes.iter().map(|s| s.as_ref()).collect();
    sorted.sort();
    let position = |id: &str| sorted.binary_search(&id).map_err(|_| Error::UnknownNode(id.to_string()));
    let n = sorted.len();
    let commodities: Vec<Commodity> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut values = vec![Rational::zero(); commodities.len() * n];
    for ((i, j), t) in traffic.entries() {
        let u = position(&traffic.nodes()[i])?;
        let v = position(&traffic.nodes()[j])?;
        let k = u * (n - 1) + if v < u { v } else { v - 1 };
        values[k * n + v] = t.clone();
        values[k * n + u] = -t;
    }
    Ok(DemandMatrix { node_count: n, commodities, values })
}

/// `T* = (T + Tᵀ)/2`.
pub fn symmetric_counterpart(traffic: &TrafficMatrix) -> TrafficMatrix {
    let half = Rational::new(1, 2);
    let mut out = TrafficMatrix { nodes: traffic.nodes.clone(), entries: BTreeMap::new() };
    for ((i, j), _) in traffic.entries() {
        let avg = (traffic.get(i, j) + traffic.get(j, i)) * &half;
        out.entries.insert((i, j), avg.clone());
        out.entries.insert((j, i), avg);
    }
    out
}

/// True iff `t_ij + t_ji = t̂_ij + t̂_ji` for every pair of nodes.
pub fn pairwise_similar(a: &TrafficMatrix, b: &TrafficMatrix) -> Result<bool> {
    Ok(first_dissimilar_pair(a, b)?.is_none())
}

pub(crate) fn first_dissimilar_pair(a: &TrafficMatrix, b: &TrafficMatrix) -> Result<Option<Commodity>> {
    if a.nodes != b.nodes {
        return Err(Error::NodeSetMismatch);
    }
    let pairs = a.entries.keys().chain(b.entries.keys()).map(|&(i, j)| (i.min(j), i.max(j)));
    for (i, j) in pairs {
        if a.get(i, j) + a.get(j, i) != b.get(i, j) + b.get(j, i) {
            return Ok(Some((i, j)));
        }
    }
    Ok(None)
}

/// Multiplies every entry by a nonnegative factor.
pub fn scale_traffic(traffic: &TrafficMatrix, factor: &Rational) -> Result<TrafficMatrix> {
    if factor.is_negative() {
        return Err(Error::NegativeFactor(factor.to_string()));
    }
    let entries = if factor.is_zero() {
        BTreeMap::new()
    } else {
        traffic.entries.iter().map(|(k, v)| (*k, v * factor)).collect()
    };
    Ok(TrafficMatrix { nodes: traffic.nodes.clone(), entries })
}

/// Pre-installed capacity, keyed by edge (undirected/bidirected models) or by arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExistingCapacity {
    Edges(Vec<Rational>),
    Arcs(Vec<Rational>),
}

impl ExistingCapacity {
    pub fn none(network: &Network) -> Self {
        ExistingCapacity::Edges(vec![Rational::zero(); network.edges().len()])
    }

    /// Per-arc capacities; edge-keyed values are copied onto both arcs.
    pub fn arc_values(&self, network: &Network) -> Vec<Rational> {
        match self {
            ExistingCapacity::Arcs(v) => v.clone(),
            ExistingCapacity::Edges(v) => {
                (0..network.arcs().len()).map(|a| v[network.edge_of_arc(a)].clone()).collect()
            }
        }
    }

    pub fn edge_values(&self) -> Result<&[Rational]> {
        match self {
            ExistingCapacity::Edges(v) => Ok(v),
            ExistingCapacity::Arcs(_) => Err(Error::ExistingCapacity(
                "arc-keyed existing capacities cannot be used with an edge-capacity model".into(),
            )),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExistingCapacity::Edges(v) | ExistingCapacity::Arcs(v) => v.iter().all(|c| c.is_zero()),
        }
    }
}

/// A network design problem input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub network: Network,
    pub facilities: FacilityMenu,
    pub existing: ExistingCapacity,
    pub traffic: TrafficMatrix,
}

impl Instance {
    pub fn new(
        network: Network,
        facilities: FacilityMenu,
        existing: ExistingCapacity,
        traffic: TrafficMatrix,
    ) -> Result<Self> {
        if traffic.nodes() != network.nodes() {
            return Err(Error::NodeSetMismatch);
        }
        let (len, expected, what) = match &existing {
            ExistingCapacity::Edges(v) => (v.len(), network.edges().len(), "edge"),
            ExistingCapacity::Arcs(v) => (v.len(), network.arcs().len(), "arc"),
        };
        if len != expected {
            return Err(Error::ExistingCapacity(format!("expected {expected} {what} values, got {len}")));
        }
        match &existing {
            ExistingCapacity::Edges(v) | ExistingCapacity::Arcs(v) => {
                if v.iter().any(|c| c.is_negative()) {
                    return Err(Error::ExistingCapacity("capacities must be nonnegative".into()));
                }
            }
        }
        Ok(Instance { network, facilities, existing, traffic })
    }

    /// An instance without existing capacity.
    pub fn bare(network: Network, facilities: FacilityMenu, traffic: TrafficMatrix) -> Result<Self> {
        let existing = ExistingCapacity::none(&network);
        Instance::new(network, facilities, existing, traffic)
    }

    pub fn with_traffic(&self, traffic: TrafficMatrix) -> Result<Self> {
        Instance::new(self.network.clone(), self.facilities.clone(), self.existing.clone(), traffic)
    }

    pub fn demand(&self) -> DemandMatrix {
        demand_matrix(&self.traffic, self.network.nodes()).expect("traffic shares the network's nodes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn facility_menu_validation() {
        assert!(FacilityMenu::new(vec![1, 3]).is_ok());
        assert!(FacilityMenu::new(vec![3, 1]).is_err());
        assert!(FacilityMenu::new(vec![1, 1]).is_err());
        assert!(FacilityMenu::new(vec![0]).is_err());
        assert!(FacilityMenu::new(vec![]).is_err());
    }

    #[test]
    fn demand_two_nodes() {
        let t = TrafficMatrix::new(&["1", "2"]).with("1", "2", q(3, 2)).unwrap();
        let d = demand_matrix(&t, &["1", "2"]).unwrap();
        // commodity (1,2) is index 0
        assert_eq!(d.get(0, 0), &q(-3, 2));
        assert_eq!(d.get(0, 1), &q(3, 2));
        assert!(d.row(1).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn demand_zero_and_three_nodes() {
        let zero = TrafficMatrix::new(&["1", "2", "3"]);
        let d = demand_matrix(&zero, &["1", "2", "3"]).unwrap();
        assert!((0..6).all(|k| d.row(k).iter().all(|v| v.is_zero())));

        let t = TrafficMatrix::new(&["1", "2", "3"]).with("1", "2", q(1, 1)).unwrap().with("3", "1", q(2, 1)).unwrap();
        let d = demand_matrix(&t, &["1", "2", "3"]).unwrap();
        let k12 = d.commodities().iter().position(|&k| k == (0, 1)).unwrap();
        let k31 = d.commodities().iter().position(|&k| k == (2, 0)).unwrap();
        assert_eq!(d.get(k31, 0), &q(2, 1));
        assert_eq!(d.get(k31, 2), &q(-2, 1));
        assert_eq!(d.get(k12, 1), &q(1, 1));
        assert_eq!(d.get(k12, 0), &q(-1, 1));
    }

    #[test]
    fn demand_rejects_unknown_nodes() {
        let t = TrafficMatrix::new(&["1", "9"]).with("1", "9", q(1, 1)).unwrap();
        assert!(matches!(demand_matrix(&t, &["1", "2"]), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn symmetric_counterpart_examples() {
        let t = TrafficMatrix::new(&["1", "2"]).with("1", "2", q(2, 1)).unwrap();
        let s = symmetric_counterpart(&t);
        assert_eq!(s.get(0, 1), q(1, 1));
        assert_eq!(s.get(1, 0), q(1, 1));
        assert_eq!(symmetric_counterpart(&s), s);

        let t = TrafficMatrix::new(&["1", "2"]).with("1", "2", q(1, 2)).unwrap().with("2", "1", q(3, 2)).unwrap();
        let s = symmetric_counterpart(&t);
        assert_eq!((s.get(0, 1), s.get(1, 0)), (q(1, 1), q(1, 1)));
    }

    #[test]
    fn pairwise_similarity_examples() {
        let nodes = ["1", "2"];
        let a = TrafficMatrix::new(&nodes).with("1", "2", q(2, 1)).unwrap();
        let b = TrafficMatrix::new(&nodes).with("1", "2", q(1, 1)).unwrap().with("2", "1", q(1, 1)).unwrap();
        let c = TrafficMatrix::new(&nodes).with("1", "2", q(2, 1)).unwrap().with("2", "1", q(1, 1)).unwrap();
        assert!(pairwise_similar(&a, &b).unwrap());
        assert!(!pairwise_similar(&a, &c).unwrap());
        assert!(pairwise_similar(&c, &symmetric_counterpart(&c)).unwrap());
        let other = TrafficMatrix::new(&["1", "3"]);
        assert!(matches!(pairwise_similar(&a, &other), Err(Error::NodeSetMismatch)));
    }

    #[test]
    fn scaling_examples() {
        let s = symmetric_counterpart(&TrafficMatrix::new(&["1", "2"]).with("1", "2", q(2, 1)).unwrap());
        let d = scale_traffic(&s, &q(2, 1)).unwrap();
        assert_eq!((d.get(0, 1), d.get(1, 0)), (q(2, 1), q(2, 1)));
        assert!(scale_traffic(&s, &q(0, 1)).unwrap().is_zero());
        let t = TrafficMatrix::new(&["1", "2"]).with("1", "2", q(3, 1)).unwrap();
        assert_eq!(scale_traffic(&t, &q(1, 2)).unwrap().get(0, 1), q(3, 2));
        assert!(scale_traffic(&t, &q(-1, 1)).is_err());
    }

    #[test]
    fn negative_traffic_rejected() {
        let mut t = TrafficMatrix::new(&["1", "2"]);
        assert!(t.set("1", "2", q(-1, 1)).is_err());
    }

    fn arb_traffic() -> impl Strategy<Value = TrafficMatrix> {
        proptest::collection::vec((0i64..9, prop_oneof![Just(1i64), Just(2), Just(4)]), 6).prop_map(|v| {
            let mut t = TrafficMatrix::new(&["a", "b", "c"]);
            let pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
            for ((p, q), (i, j)) in v.into_iter().zip(pairs) {
                t.set_index(i, j, Rational::new(p, q)).unwrap();
            }
            t
        })
    }

    /// Moves a random share of each pair's total to the reverse direction.
    fn reshuffle(t: &TrafficMatrix, shares: &[i64]) -> TrafficMatrix {
        let mut out = TrafficMatrix::new(t.nodes());
        for (idx, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            let sigma = t.get(i, j) + t.get(j, i);
            let share = Rational::new(shares[idx], 4);
            out.set_index(i, j, &sigma * &share).unwrap();
            out.set_index(j, i, &sigma * &(Rational::one() - share)).unwrap();
        }
        out
    }

    proptest! {
        #[test]
        fn demand_rows_conserve(t in arb_traffic()) {
            let d = demand_matrix(&t, t.nodes()).unwrap();
            for k in 0..d.commodities().len() {
                prop_assert!(d.row(k).iter().sum::<Rational>().is_zero());
            }
        }

        #[test]
        fn symmetric_counterpart_is_idempotent_and_similar(t in arb_traffic()) {
            let s = symmetric_counterpart(&t);
            prop_assert!(s.is_symmetric());
            prop_assert_eq!(symmetric_counterpart(&s), s.clone());
            prop_assert!(pairwise_similar(&t, &s).unwrap());
        }

        #[test]
        fn pairwise_similarity_is_an_equivalence(
            t in arb_traffic(),
            s1 in proptest::collection::vec(0i64..5, 3),
            s2 in proptest::collection::vec(0i64..5, 3),
        ) {
            let a = reshuffle(&t, &s1);
            let b = reshuffle(&a, &s2);
            prop_assert!(pairwise_similar(&t, &t).unwrap());
            prop_assert!(pairwise_similar(&t, &a).unwrap());
            prop_assert!(pairwise_similar(&a, &t).unwrap());
            prop_assert!(pairwise_similar(&a, &b).unwrap());
            prop_assert!(pairwise_similar(&t, &b).unwrap());
        }
    }
}
