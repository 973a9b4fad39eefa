//! Projections of the capacity models onto the capacity variables, computed
//! as minimal accommodating vectors inside a finite box, and the checks that
//! compare them across models.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cuts::edge_to_arc_capacity;
use crate::error::{Error, Result};
use crate::formulate::{self, add_flow_symmetry, equalize_directed, MipModel, ModelKind, VarRef};
use crate::instance::{scale_traffic, symmetric_counterpart, FacilityMenu, Instance, TrafficMatrix};
use crate::network::Network;
use crate::point::CapacityVector;
use crate::rational::Rational;
use crate::solver::model_accommodates;

/// Largest box enumerated unless the caller says otherwise.
pub const DEFAULT_BOX_LIMIT: u64 = 1_000_000;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Fails unless `(bound + 1)^dims <= limit`.
pub fn check_box_size(dims: usize, bound: u64, limit: u64) -> Result<u64> {
    let mut size: u128 = 1;
    for _ in 0..dims {
        size = size.saturating_mul(bound as u128 + 1);
        if size > limit as u128 {
            let exact = num_bigint::BigUint::from(bound + 1).pow(dims as u32);
            return Err(Error::BoxTooLarge { size: exact.to_string(), limit });
        }
    }
    Ok(size as u64)
}

/// All points of `{0..=bound}^dims` in lexicographic order.
pub fn box_points(dims: usize, bound: u64) -> impl Iterator<Item = Vec<u64>> {
    let mut next = Some(vec![0u64; dims]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for i in (0..dims).rev() {
            if succ[i] < bound {
                succ[i] += 1;
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

/// Points of `{0..=bound}^dims` whose coordinates sum to `total`, lexicographic.
pub fn grade_points(dims: usize, bound: u64, total: u64) -> Vec<Vec<u64>> {
    fn fill(prefix: &mut Vec<u64>, dims: usize, bound: u64, left: u64, out: &mut Vec<Vec<u64>>) {
        let remaining = (dims - prefix.len()) as u64;
        if remaining == 0 {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // The coordinates after this one can absorb at most (remaining - 1) * bound.
        let low = left.saturating_sub((remaining - 1) * bound);
        for v in low..=bound.min(left) {
            prefix.push(v);
            fill(prefix, dims, bound, left - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if total <= dims as u64 * bound {
        fill(&mut Vec::with_capacity(dims), dims, bound, total, &mut out);
    }
    out
}

/// `⌈Σ t / c_1⌉`: with this many units of the smallest facility on every
/// edge (or arc), any routing along a spanning tree fits.
pub fn capacity_bound(inst: &Instance) -> Result<u64> {
    let components = inst.network.components();
    for ((i, j), t) in inst.traffic.entries() {
        if t.is_positive() && components[i] != components[j] {
            return Err(Error::Disconnected(inst.network.name(i).into(), inst.network.name(j).into()));
        }
    }
    let b = (inst.traffic.total() / Rational::from_integer(inst.facilities.smallest())).ceil();
    Ok(b.to_i64().expect("capacity bound fits in i64") as u64)
}

/// Extra constraints on the model whose projection is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Plain,
    /// `x_ij^{uv} = x_ji^{vu}` for every commodity pair.
    SymmetrizedFlows,
    /// Directed model with equal capacity on both arcs of an edge; the
    /// projection is reported in edge keys.
    Equalized,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plain => "plain",
            Variant::SymmetrizedFlows => "symmetrized-flows",
            Variant::Equalized => "equalized",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plain" => Ok(Variant::Plain),
            "symmetrized-flows" | "symmetric" | "sym" => Ok(Variant::SymmetrizedFlows),
            "equalized" | "eq" => Ok(Variant::Equalized),
            other => Err(Error::Parse(format!("unknown variant `{other}`"))),
        }
    }
}

/// Minimal accommodating capacity vectors within `[0, bound]^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionSet {
    pub kind: ModelKind,
    pub variant: Variant,
    pub bound: u64,
    /// The enumerated coordinates, in order.
    pub components: Vec<VarRef>,
    pub minimal: BTreeSet<CapacityVector>,
    /// Feasibility LPs actually solved.
    pub lp_calls: usize,
}

impl ProjectionSet {
    /// Whether `y` dominates some minimal element, i.e. lies in the projection
    /// (for `y` inside the box).
    pub fn contains(&self, y: &CapacityVector) -> bool {
        self.minimal.iter().any(|m| m.le(y))
    }

    pub fn render(&self, network: &Network) -> Vec<String> {
        self.minimal.iter().map(|y| render_capacity(network, y)).collect()
    }
}

/// `{y(1|1-2)=2, y(1|2-3)=1}`; the zero vector is `{}`.
pub fn render_capacity(network: &Network, y: &CapacityVector) -> String {
    let parts: Vec<String> = y.entries().map(|(v, n)| format!("{}={n}", v.name(network))).collect();
    format!("{{{}}}", parts.join(", "))
}

/// The model whose projection `project` takes, and the coordinates it enumerates.
pub fn projection_model(inst: &Instance, kind: ModelKind, variant: Variant) -> Result<(MipModel, Vec<VarRef>)> {
    let base = formulate::build(inst, kind)?;
    let net = &inst.network;
    match variant {
        Variant::Plain => {
            let comps = base.capacity_vars().collect();
            Ok((base, comps))
        }
        Variant::SymmetrizedFlows => {
            let comps = base.capacity_vars().collect();
            Ok((add_flow_symmetry(&base), comps))
        }
        Variant::Equalized => {
            let model = equalize_directed(&base)?;
            let comps = (0..inst.facilities.len())
                .flat_map(|m| (0..net.edges().len()).map(move |e| VarRef::CapEdge { facility: m, edge: e }))
                .collect();
            Ok((model, comps))
        }
    }
}

/// Enumerates the box in order of total capacity. A vector dominating a
/// minimal element already found is skipped; any other accommodating vector
/// is minimal, since everything strictly below it has a smaller total.
pub fn project(
    inst: &Instance,
    kind: ModelKind,
    variant: Variant,
    bound: Option<u64>,
    limit: u64,
) -> Result<ProjectionSet> {
    let bound = match bound {
        Some(b) => b,
        None => capacity_bound(inst)?,
    };
    let (model, components) = projection_model(inst, kind, variant)?;
    check_box_size(components.len(), bound, limit)?;
    let net = inst.network.clone();
    let to_model = |y: &CapacityVector| -> CapacityVector {
        if variant == Variant::Equalized {
            edge_to_arc_capacity(&net, y)
        } else {
            y.clone()
        }
    };

    let mut minimal: BTreeSet<CapacityVector> = BTreeSet::new();
    let mut lp_calls = 0;
    for total in 0..=components.len() as u64 * bound {
        let candidates: Vec<CapacityVector> = grade_points(components.len(), bound, total)
            .into_iter()
            .map(|p| CapacityVector::from_pairs(components.iter().copied().zip(p)))
            .filter(|y| !minimal.iter().any(|m| m.le(y)))
            .collect();
        lp_calls += candidates.len();
        let verdicts = par_map(&candidates, |y| model_accommodates(&model, &to_model(y)));
        for (y, ok) in candidates.into_iter().zip(verdicts) {
            if ok? {
                minimal.insert(y);
            }
        }
    }
    Ok(ProjectionSet { kind, variant, bound, components, minimal, lp_calls })
}

/// One labelled projection in a comparison.
#[derive(Debug, Clone)]
pub struct NamedProjection {
    pub label: String,
    pub set: ProjectionSet,
}

#[derive(Debug, Clone)]
pub struct CorollaryReport {
    pub bound: u64,
    pub projections: Vec<NamedProjection>,
    /// A vector minimal in one projection but not in another, with the labels.
    pub counterexample: Option<(String, String, CapacityVector)>,
}

impl CorollaryReport {
    pub fn identical(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn minimal_count(&self) -> usize {
        self.projections.first().map(|p| p.set.minimal.len()).unwrap_or(0)
    }
}

fn first_difference(projections: &[NamedProjection]) -> Option<(String, String, CapacityVector)> {
    let first = projections.first()?;
    for other in &projections[1..] {
        if let Some(y) = first.set.minimal.symmetric_difference(&other.set.minimal).next() {
            let (has, lacks) = if first.set.minimal.contains(y) { (first, other) } else { (other, first) };
            return Some((has.label.clone(), lacks.label.clone(), y.clone()));
        }
    }
    None
}

/// Projections of `U(T)`, `U(T*)`, `U(T*)^=`, `B(2T*)` and `B(2T*)^=` over a
/// common box, where `^=` adds the flow-symmetry equations.
pub fn verify_corollary(inst: &Instance, bound: Option<u64>, limit: u64) -> Result<CorollaryReport> {
    let bound = match bound {
        Some(b) => b,
        None => capacity_bound(inst)?,
    };
    let t_star = symmetric_counterpart(&inst.traffic);
    let sym = inst.with_traffic(t_star.clone())?;
    let doubled = inst.with_traffic(scale_traffic(&t_star, &Rational::from_integer(2))?)?;
    let cases = [
        ("U(T)", inst, ModelKind::Undirected, Variant::Plain),
        ("U(T*)", &sym, ModelKind::Undirected, Variant::Plain),
        ("U(T*)^=", &sym, ModelKind::Undirected, Variant::SymmetrizedFlows),
        ("B(2T*)", &doubled, ModelKind::Bidirected, Variant::Plain),
        ("B(2T*)^=", &doubled, ModelKind::Bidirected, Variant::SymmetrizedFlows),
    ];
    let mut projections = Vec::new();
    for (label, i, kind, variant) in cases {
        projections.push(NamedProjection { label: label.into(), set: project(i, kind, variant, Some(bound), limit)? });
    }
    let counterexample = first_difference(&projections);
    Ok(CorollaryReport { bound, projections, counterexample })
}

/// Projections of `U(T)` and `U(T̂)` for pairwise-similar traffic.
pub fn similar_projections_agree(inst: &Instance, other: &TrafficMatrix, bound: u64, limit: u64) -> Result<bool> {
    if !crate::instance::pairwise_similar(&inst.traffic, other)? {
        return Err(Error::NotPairwiseSimilar("traffic matrices differ on some pair total".into()));
    }
    let a = project(inst, ModelKind::Undirected, Variant::Plain, Some(bound), limit)?;
    let b = project(&inst.with_traffic(other.clone())?, ModelKind::Undirected, Variant::Plain, Some(bound), limit)?;
    Ok(a.minimal == b.minimal)
}

/// Closed-form projection of the bidirected model on the complete triangle
/// with a single unit facility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleProjection {
    pub network: Network,
    /// `T(i) = ⌈max(t_ij + t_ik, t_ji + t_ki)⌉`.
    pub node_demand: [i64; 3],
    /// `max` over node permutations of `t_ij + t_ik + t_jk`.
    pub theta: Rational,
    /// `⌈Σ T(i) / 2⌉`.
    pub half_sum: i64,
    /// `max(half_sum, ⌈Θ⌉)`.
    pub total_bound: i64,
}

impl TriangleProjection {
    pub fn node_capacity(&self, y: &CapacityVector, node: usize) -> u64 {
        let net = &self.network;
        (0..3)
            .filter(|&v| v != node)
            .map(|v| y.get(&VarRef::CapEdge { facility: 0, edge: net.edge_index(node, v).expect("complete") }))
            .sum()
    }

    pub fn contains(&self, y: &CapacityVector) -> bool {
        (0..3).all(|i| self.node_capacity(y, i) as i64 >= self.node_demand[i]) && y.total() as i64 >= self.total_bound
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub fn triangle_bidirected_projection(traffic: &TrafficMatrix) -> Result<TriangleProjection> {
    if traffic.nodes().len() != 3 {
        return Err(Error::WrongShape(format!("the closed form needs 3 nodes, got {}", traffic.nodes().len())));
    }
    let network = Network::complete(traffic.nodes())?;
    let t = |i: usize, j: usize| traffic.get(i, j);
    let mut node_demand = [0i64; 3];
    for (i, slot) in node_demand.iter_mut().enumerate() {
        let others: Vec<usize> = (0..3).filter(|&v| v != i).collect();
        let (j, k) = (others[0], others[1]);
        let out = t(i, j) + t(i, k);
        let inn = t(j, i) + t(k, i);
        *slot = out.max(inn).ceil().to_i64().expect("small");
    }
    let theta = PERMUTATIONS.iter().map(|&[i, j, k]| t(i, j) + t(i, k) + t(j, k)).max().expect("six permutations");
    let half_sum =
        (Rational::from_integer(node_demand.iter().sum()) / Rational::from_integer(2)).ceil().to_i64().expect("small");
    let total_bound = half_sum.max(theta.ceil().to_i64().expect("small"));
    Ok(TriangleProjection { network, node_demand, theta, half_sum, total_bound })
}

fn triangle_instance(traffic: &TrafficMatrix) -> Result<Instance> {
    let net = Network::complete(traffic.nodes())?;
    Instance::bare(net, FacilityMenu::single(1)?, traffic.clone())
}

/// Instance accepted by the closed form: complete triangle, menu `{1}`, no
/// existing capacity.
pub fn check_triangle_shape(inst: &Instance) -> Result<()> {
    let n = inst.network.node_count();
    if n != 3 || inst.network.edges().len() != 3 {
        return Err(Error::WrongShape("the closed form needs the complete graph on 3 nodes".into()));
    }
    if inst.facilities.capacities() != [1] {
        return Err(Error::WrongShape("the closed form needs the single facility {1}".into()));
    }
    if !inst.existing.is_zero() {
        return Err(Error::WrongShape("the closed form assumes no existing capacity".into()));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TriangleReport {
    pub bound: u64,
    pub points: usize,
    /// Vectors where the closed form and the LP oracle disagree, with the
    /// LP verdict.
    pub disagreements: Vec<(CapacityVector, bool)>,
    /// `⌈Σ T*(i) / 2⌉` and `⌈Θ⌉` computed on `T*`.
    pub star_half_sum: i64,
    pub star_theta_ceil: i64,
    pub projections_equal: bool,
    /// Minimal vectors of `B(T*)` and `U(T/2)`.
    pub bidirected_star: BTreeSet<CapacityVector>,
    pub undirected_half: BTreeSet<CapacityVector>,
}

impl TriangleReport {
    pub fn ceiling_holds(&self) -> bool {
        self.star_half_sum >= self.star_theta_ceil
    }

    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.ceiling_holds() && self.projections_equal
    }
}

/// Compares the closed form with LP feasibility on every vector of the box,
/// checks the ceiling inequality on `T*`, and compares `proj B(T*)` with
/// `proj U(T/2)`.
pub fn verify_triangle_remark(traffic: &TrafficMatrix, bound: u64, limit: u64) -> Result<TriangleReport> {
    let closed = triangle_bidirected_projection(traffic)?;
    let inst = triangle_instance(traffic)?;
    let model = formulate::build(&inst, ModelKind::Bidirected)?;
    let comps: Vec<VarRef> = model.capacity_vars().collect();
    check_box_size(comps.len(), bound, limit)?;
    let points: Vec<CapacityVector> =
        box_points(comps.len(), bound).map(|p| CapacityVector::from_pairs(comps.iter().copied().zip(p))).collect();
    let verdicts = par_map(&points, |y| model_accommodates(&model, y));
    let mut disagreements = Vec::new();
    for (y, lp) in points.iter().zip(verdicts) {
        let lp = lp?;
        if lp != closed.contains(y) {
            disagreements.push((y.clone(), lp));
        }
    }

    let t_star = symmetric_counterpart(traffic);
    let star = triangle_bidirected_projection(&t_star)?;
    let star_inst = inst.with_traffic(t_star)?;
    let half_inst = inst.with_traffic(scale_traffic(traffic, &Rational::new(1, 2))?)?;
    let b_star = project(&star_inst, ModelKind::Bidirected, Variant::Plain, Some(bound), limit)?;
    let u_half = project(&half_inst, ModelKind::Undirected, Variant::Plain, Some(bound), limit)?;
    Ok(TriangleReport {
        bound,
        points: points.len(),
        disagreements,
        star_half_sum: star.half_sum,
        star_theta_ceil: star.theta.ceil().to_i64().expect("small"),
        projections_equal: b_star.minimal == u_half.minimal,
        bidirected_star: b_star.minimal,
        undirected_half: u_half.minimal,
    })
}

/// Seeded generator of random traffic: each entry is `p/q` with `p` uniform
/// in `0..=8` and `q` uniform in `{1, 2, 4}`, redrawn until it is at most
/// `max_entry`.
pub struct TrafficSampler {
    rng: ChaCha8Rng,
    pub max_entry: Rational,
}

impl TrafficSampler {
    pub fn new(seed: u64, max_entry: Rational) -> Self {
        TrafficSampler { rng: ChaCha8Rng::seed_from_u64(seed), max_entry }
    }

    pub fn entry(&mut self) -> Rational {
        loop {
            let p = self.rng.gen_range(0..=8i64);
            let q = [1i64, 2, 4][self.rng.gen_range(0..3usize)];
            let v = Rational::new(p, q);
            if v <= self.max_entry {
                return v;
            }
        }
    }

    /// Full random matrix over every ordered pair of `nodes`.
    pub fn dense(&mut self, nodes: &[String]) -> TrafficMatrix {
        let mut t = TrafficMatrix::new(nodes);
        for i in 0..nodes.len() {
            for j in 0..nodes.len() {
                if i != j {
                    let v = self.entry();
                    t.set_index(i, j, v).expect("nonnegative");
                }
            }
        }
        t
    }

    /// Random entries on `pairs` ordered pairs drawn uniformly; all others zero.
    pub fn sparse(&mut self, nodes: &[String], pairs: usize) -> TrafficMatrix {
        let mut t = TrafficMatrix::new(nodes);
        let n = nodes.len();
        for _ in 0..pairs {
            let i = self.rng.gen_range(0..n);
            let j = (i + self.rng.gen_range(1..n)) % n;
            let v = self.entry();
            t.set_index(i, j, v).expect("nonnegative");
        }
        t
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}
