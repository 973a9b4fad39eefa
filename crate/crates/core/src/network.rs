//! Undirected graphs and their bidirected arc sets.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// An edge `{tail, head}` stored with `a < b` in node order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

/// A directed arc `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

impl Arc {
    pub fn reversed(self) -> Arc {
        Arc { tail: self.head, head: self.tail }
    }

    /// True for arcs in the `i < j` orientation (the `y¹` half of a directed model).
    pub fn is_forward(self) -> bool {
        self.tail < self.head
    }
}

/// An origin-destination pair `(i, j)` with `i != j`.
pub type Commodity = (usize, usize);

const RESERVED: &[char] = &['>', '-', '|', '(', ')', ',', '[', ']', ':'];

/// A simple undirected graph with nodes ordered lexicographically by id.
///
/// Arcs are sorted by `(tail, head)`; commodities are all ordered node pairs
/// sorted the same way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<String>,
    node_index: HashMap<String, usize>,
    edges: Vec<Edge>,
    arcs: Vec<Arc>,
    arc_index: HashMap<Arc, usize>,
    edge_index: HashMap<Edge, usize>,
}

impl Network {
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut sorted: Vec<String> = nodes.iter().map(|n| n.as_ref().to_string()).collect();
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidNetwork(format!("duplicate node `{}`", pair[0])));
            }
        }
        for id in &sorted {
            if id.is_empty() || id.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
                return Err(Error::InvalidNetwork(format!("node id `{id}` is empty or contains a reserved character")));
            }
        }
        let node_index: HashMap<String, usize> = sorted.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();

        let mut edge_set = BTreeSet::new();
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            let iu = *node_index.get(u).ok_or_else(|| Error::UnknownNode(u.to_string()))?;
            let iv = *node_index.get(v).ok_or_else(|| Error::UnknownNode(v.to_string()))?;
            if iu == iv {
                return Err(Error::InvalidNetwork(format!("self-loop at `{u}`")));
            }
            let edge = Edge { a: iu.min(iv), b: iu.max(iv) };
            if !edge_set.insert(edge) {
                return Err(Error::InvalidNetwork(format!("duplicate edge {u}-{v}")));
            }
        }
        let edges: Vec<Edge> = edge_set.into_iter().collect();
        let mut arcs: Vec<Arc> =
            edges.iter().flat_map(|e| [Arc { tail: e.a, head: e.b }, Arc { tail: e.b, head: e.a }]).collect();
        arcs.sort();
        let arc_index = arcs.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let edge_index = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Ok(Network { nodes: sorted, node_index, edges, arcs, arc_index, edge_index })
    }

    /// The complete graph on the given node ids.
    pub fn complete<S: AsRef<str>>(nodes: &[S]) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, u) in nodes.iter().enumerate() {
            for v in &nodes[i + 1..] {
                pairs.push((u.as_ref(), v.as_ref()));
            }
        }
        let names: Vec<&str> = nodes.iter().map(|n| n.as_ref()).collect();
        Network::new(&names, &pairs)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: &str) -> Result<usize> {
        self.node_index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn name(&self, node: usize) -> &str {
        &self.nodes[node]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, index: usize) -> Arc {
        self.arcs[index]
    }

    pub fn arc_index(&self, tail: usize, head: usize) -> Option<usize> {
        self.arc_index.get(&Arc { tail, head }).copied()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&Edge { a: u.min(v), b: u.max(v) }).copied()
    }

    pub fn reverse_arc(&self, arc: usize) -> usize {
        self.arc_index[&self.arcs[arc].reversed()]
    }

    pub fn edge_of_arc(&self, arc: usize) -> usize {
        let a = self.arcs[arc];
        self.edge_index(a.tail, a.head).expect("arc without edge")
    }

    /// The two arcs of an edge, forward (`a -> b`) first.
    pub fn arcs_of_edge(&self, edge: usize) -> (usize, usize) {
        let e = self.edges[edge];
        (self.arc_index[&Arc { tail: e.a, head: e.b }], self.arc_index[&Arc { tail: e.b, head: e.a }])
    }

    /// All ordered pairs of distinct nodes, sorted.
    pub fn commodities(&self) -> Vec<Commodity> {
        let n = self.nodes.len();
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect()
    }

    pub fn commodity_count(&self) -> usize {
        let n = self.nodes.len();
        n * n.saturating_sub(1)
    }

    pub fn commodity_index(&self, (i, j): Commodity) -> usize {
        debug_assert!(i != j);
        i * (self.nodes.len() - 1) + if j < i { j } else { j - 1 }
    }

    pub fn arc_label(&self, arc: usize) -> String {
        let a = self.arcs[arc];
        format!("{}>{}", self.nodes[a.tail], self.nodes[a.head])
    }

    pub fn edge_label(&self, edge: usize) -> String {
        let e = self.edges[edge];
        format!("{}-{}", self.nodes[e.a], self.nodes[e.b])
    }

    pub fn commodity_label(&self, (i, j): Commodity) -> String {
        format!("{}>{}", self.nodes[i], self.nodes[j])
    }

    /// Parses an `i>j` arc label.
    pub fn parse_arc(&self, label: &str) -> Result<usize> {
        let (t, h) =
            label.split_once('>').ok_or_else(|| Error::Parse(format!("arc `{label}` is not of the form i>j")))?;
        let (t, h) = (self.node(t.trim())?, self.node(h.trim())?);
        self.arc_index(t, h).ok_or_else(|| Error::Parse(format!("no arc {label}")))
    }

    /// Parses an `i-j` edge label.
    pub fn parse_edge(&self, label: &str) -> Result<usize> {
        let (u, v) =
            label.split_once('-').ok_or_else(|| Error::Parse(format!("edge `{label}` is not of the form i-j")))?;
        let (u, v) = (self.node(u.trim())?, self.node(v.trim())?);
        self.edge_index(u, v).ok_or_else(|| Error::Parse(format!("no edge {label}")))
    }

    /// Parses an `i>j` commodity label, or the concatenated `ij` form when
    /// every node id is a single character.
    pub fn parse_commodity(&self, label: &str) -> Result<Commodity> {
        let label = label.trim();
        let (u, v) = match label.split_once('>') {
            Some((u, v)) => (self.node(u.trim())?, self.node(v.trim())?),
            None => {
                let chars: Vec<char> = label.chars().collect();
                if chars.len() != 2 || self.nodes.iter().any(|n| n.chars().count() != 1) {
                    return Err(Error::Parse(format!("commodity `{label}` is not of the form i>j")));
                }
                (self.node(&chars[0].to_string())?, self.node(&chars[1].to_string())?)
            }
        };
        if u == v {
            return Err(Error::Parse(format!("commodity `{label}` has equal endpoints")));
        }
        Ok((u, v))
    }

    pub fn out_arcs(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().enumerate().filter(move |(_, a)| a.tail == node).map(|(i, _)| i)
    }

    pub fn in_arcs(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().enumerate().filter(move |(_, a)| a.head == node).map(|(i, _)| i)
    }

    /// Connected-component label of every node.
    pub fn components(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut label: Vec<usize> = (0..n).collect();
        fn find(label: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while label[r] != r {
                r = label[r];
            }
            label[x] = r;
            r
        }
        for e in &self.edges {
            let (ra, rb) = (find(&mut label, e.a), find(&mut label, e.b));
            if ra != rb {
                label[ra.max(rb)] = ra.min(rb);
            }
        }
        (0..n).map(|i| find(&mut label, i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Network {
        Network::complete(&["1", "2", "3"]).unwrap()
    }

    #[test]
    fn arcs_double_the_edges() {
        let net = triangle();
        assert_eq!(net.edges().len(), 3);
        assert_eq!(net.arcs().len(), 6);
        for (i, _) in net.arcs().iter().enumerate() {
            let r = net.reverse_arc(i);
            assert_ne!(r, i);
            assert_eq!(net.reverse_arc(r), i);
            assert_eq!(net.edge_of_arc(i), net.edge_of_arc(r));
        }
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(Network::new(&["1", "2"], &[("1", "1")]).is_err());
        assert!(Network::new(&["1", "2"], &[("1", "2"), ("2", "1")]).is_err());
        assert!(Network::new(&["1", "2"], &[("1", "3")]).is_err());
        assert!(Network::new(&["1", "1"], &[]).is_err());
        assert!(Network::new(&["a>b", "c"], &[]).is_err());
    }

    #[test]
    fn commodity_indexing_is_dense_and_sorted() {
        let net = triangle();
        let ks = net.commodities();
        assert_eq!(ks.len(), 6);
        for (idx, k) in ks.iter().enumerate() {
            assert_eq!(net.commodity_index(*k), idx);
        }
        assert_eq!(net.parse_commodity("13").unwrap(), (0, 2));
        assert_eq!(net.parse_commodity("3>1").unwrap(), (2, 0));
    }

    #[test]
    fn labels_round_trip() {
        let net = triangle();
        for i in 0..net.arcs().len() {
            assert_eq!(net.parse_arc(&net.arc_label(i)).unwrap(), i);
        }
        for i in 0..net.edges().len() {
            assert_eq!(net.parse_edge(&net.edge_label(i)).unwrap(), i);
        }
    }

    #[test]
    fn components_of_a_split_graph() {
        let net = Network::new(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]).unwrap();
        let c = net.components();
        assert_eq!(c[0], c[1]);
        assert_eq!(c[2], c[3]);
        assert_ne!(c[0], c[2]);
    }
}
