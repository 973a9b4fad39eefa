//! Mixed-integer-rounding cut-set inequalities for the directed model and
//! their translation to the bidirected model.
//!
//! For a node partition `(U, V)`, commodity subset `Q`, arc subsets
//! `S⁺ ⊆ A⁺` (arcs `U → V`) and `S⁻ ⊆ A⁻` (arcs `V → U`), and a facility `s`,
//! the inequality reads
//!
//! ```text
//! Σ_m φ⁺(c_m) y_m(S⁺) + x_Q(A⁺ \ S⁺) + Σ_m φ⁻(c_m) y_m(S⁻) − x_Q(S⁻) ≥ r·η − c̄(S⁻)
//! ```
//!
//! with `b'_Q = b_Q − c̄(S⁺) + c̄(S⁻)`, `r = b'_Q − ⌊b'_Q / c_s⌋ c_s` and
//! `η = ⌈b'_Q / c_s⌉`. The `c̄(S⁻)` term comes from the existing capacity that
//! sits inside the nonnegative slack `c̄(S⁻) + Σ_m c_m y_m(S⁻) − x_Q(S⁻)`
//! the rounding is applied to; it vanishes without existing capacity on `S⁻`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formulate::{MipModel, ModelKind, VarRef};
use crate::instance::Instance;
use crate::lpfile::{format_terms, parse_terms, split_relation};
use crate::network::Network;
use crate::point::CapacityVector;
use crate::rational::Rational;
use crate::solver::min_flow_cost;

/// Which cut-set inequality to generate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutsetSpec {
    /// Nodes on the `U` side; the rest form `V`.
    pub side_u: BTreeSet<usize>,
    /// Commodity indices in `Q`.
    pub commodities: BTreeSet<usize>,
    /// Arc indices, all directed `U → V`.
    pub s_plus: BTreeSet<usize>,
    /// Arc indices, all directed `V → U`.
    pub s_minus: BTreeSet<usize>,
    /// 0-based facility index `s`.
    pub facility: usize,
}

impl CutsetSpec {
    pub fn validate(&self, network: &Network, facilities: usize) -> Result<()> {
        let n = network.node_count();
        if self.side_u.is_empty() || self.side_u.len() >= n || self.side_u.iter().any(|&u| u >= n) {
            return Err(Error::InvalidCutset("U and V must be nonempty and partition the nodes".into()));
        }
        if self.commodities.is_empty() {
            return Err(Error::InvalidCutset("the commodity set Q is empty".into()));
        }
        if self.commodities.iter().any(|&k| k >= network.commodity_count()) {
            return Err(Error::InvalidCutset("unknown commodity".into()));
        }
        if self.facility >= facilities {
            return Err(Error::InvalidCutset(format!("facility {} does not exist", self.facility + 1)));
        }
        let plus: BTreeSet<usize> = self.a_plus(network).into_iter().collect();
        let minus: BTreeSet<usize> = self.a_minus(network).into_iter().collect();
        if let Some(a) = self.s_plus.iter().find(|a| !plus.contains(a)) {
            return Err(Error::InvalidCutset(format!("S+ arc {} does not go from U to V", label(network, *a))));
        }
        if let Some(a) = self.s_minus.iter().find(|a| !minus.contains(a)) {
            return Err(Error::InvalidCutset(format!("S- arc {} does not go from V to U", label(network, *a))));
        }
        Ok(())
    }

    /// Arcs from `U` to `V`.
    pub fn a_plus(&self, network: &Network) -> Vec<usize> {
        (0..network.arcs().len())
            .filter(|&a| {
                let arc = network.arc(a);
                self.side_u.contains(&arc.tail) && !self.side_u.contains(&arc.head)
            })
            .collect()
    }

    /// Arcs from `V` to `U`.
    pub fn a_minus(&self, network: &Network) -> Vec<usize> {
        (0..network.arcs().len())
            .filter(|&a| {
                let arc = network.arc(a);
                !self.side_u.contains(&arc.tail) && self.side_u.contains(&arc.head)
            })
            .collect()
    }

    /// The same cut seen from the other side: `U ↔ V`, `S⁺ ↔ S⁻`.
    pub fn swapped(&self, network: &Network) -> CutsetSpec {
        CutsetSpec {
            side_u: (0..network.node_count()).filter(|u| !self.side_u.contains(u)).collect(),
            commodities: self.commodities.clone(),
            s_plus: self.s_minus.clone(),
            s_minus: self.s_plus.clone(),
            facility: self.facility,
        }
    }
}

fn label(network: &Network, arc: usize) -> String {
    network.arc_label(arc)
}

/// Rounding data of a cut-set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirData {
    /// Net demand of `Q` in `V` from `U` (nonnegative after normalisation).
    pub b_q: Rational,
    pub b_prime: Rational,
    pub r: Rational,
    pub eta: Rational,
    /// The cut-set after orienting it so that `b_q >= 0`.
    pub spec: CutsetSpec,
    pub flipped: bool,
}

fn net_demand(inst: &Instance, spec: &CutsetSpec) -> Rational {
    let demand = inst.demand();
    spec.commodities
        .iter()
        .map(|&k| {
            (0..inst.network.node_count())
                .filter(|u| !spec.side_u.contains(u))
                .map(|u| demand.get(k, u).clone())
                .sum::<Rational>()
        })
        .sum()
}

fn existing_on(arc_caps: &[Rational], arcs: &BTreeSet<usize>) -> Rational {
    arcs.iter().map(|&a| arc_caps[a].clone()).sum()
}

/// `b_Q`, `b'_Q`, `r_{s,Q}` and `η_{s,Q}`; flips the partition when `b_Q < 0`.
pub fn mir_data(inst: &Instance, spec: &CutsetSpec) -> Result<MirData> {
    spec.validate(&inst.network, inst.facilities.len())?;
    let mut spec = spec.clone();
    let mut b_q = net_demand(inst, &spec);
    let flipped = b_q.is_negative();
    if flipped {
        spec = spec.swapped(&inst.network);
        b_q = -b_q;
    }
    let arc_caps = inst.existing.arc_values(&inst.network);
    let b_prime = &b_q - &existing_on(&arc_caps, &spec.s_plus) + existing_on(&arc_caps, &spec.s_minus);
    let c_s = Rational::from_integer(inst.facilities.capacity(spec.facility));
    let ratio = &b_prime / &c_s;
    let r = &b_prime - &(ratio.floor() * &c_s);
    let eta = ratio.ceil();
    Ok(MirData { b_q, b_prime, r, eta, spec, flipped })
}

fn check_phi_domain(c: i64, c_s: i64, r: &Rational) -> Result<()> {
    if c < 0 || c_s < 1 || r.is_negative() || *r >= Rational::from_integer(c_s) {
        return Err(Error::Precondition(format!("phi needs c >= 0, c_s >= 1, 0 <= r < c_s (c={c}, c_s={c_s}, r={r})")));
    }
    Ok(())
}

/// MIR coefficient of a facility of capacity `c` on an `S⁺` arc.
/// With `k = ⌊c/c_s⌋`: `c − k(c_s − r)` if `c − k c_s < r`, else `(k+1) r`.
pub fn phi_plus(c: i64, c_s: i64, r: &Rational) -> Result<Rational> {
    check_phi_domain(c, c_s, r)?;
    let k = c / c_s;
    let rem = Rational::from_integer(c - k * c_s);
    let k = Rational::from_integer(k);
    Ok(if rem < *r {
        Rational::from_integer(c) - &k * &(Rational::from_integer(c_s) - r)
    } else {
        (k + Rational::one()) * r
    })
}

/// MIR coefficient of a facility of capacity `c` on an `S⁻` arc.
/// With `k = ⌊c/c_s⌋`: `c − k r` if `c − k c_s < c_s − r`, else `(k+1)(c_s − r)`.
pub fn phi_minus(c: i64, c_s: i64, r: &Rational) -> Result<Rational> {
    check_phi_domain(c, c_s, r)?;
    let k = c / c_s;
    let rem = Rational::from_integer(c - k * c_s);
    let complement = Rational::from_integer(c_s) - r;
    let k = Rational::from_integer(k);
    Ok(if rem < complement { Rational::from_integer(c) - &k * r } else { (k + Rational::one()) * complement })
}

/// `Σ coefficients · vars ≥ rhs` over the variables of one model kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearInequality {
    pub kind: ModelKind,
    pub coefficients: BTreeMap<VarRef, Rational>,
    pub rhs: Rational,
}

impl LinearInequality {
    pub fn lhs(&self, values: &BTreeMap<VarRef, Rational>) -> Rational {
        self.coefficients.iter().map(|(v, c)| values.get(v).map(|x| c * x).unwrap_or_default()).sum()
    }

    pub fn is_satisfied(&self, values: &BTreeMap<VarRef, Rational>) -> bool {
        self.lhs(values) >= self.rhs
    }

    pub fn flow_part(&self) -> BTreeMap<VarRef, Rational> {
        self.coefficients.iter().filter(|(v, _)| v.is_flow()).map(|(v, c)| (*v, c.clone())).collect()
    }

    pub fn capacity_part(&self, y: &CapacityVector) -> Rational {
        self.coefficients.iter().filter(|(v, _)| v.is_capacity()).map(|(v, c)| c * &Rational::from(y.get(v))).sum()
    }

    /// One-line LP fragment: `cut: + 1/2 y(1|1>2) >= 1`.
    pub fn to_text(&self, network: &Network) -> String {
        format!("cut: {} >= {}", format_terms(network, &self.coefficients), self.rhs)
    }

    /// Parses [`LinearInequality::to_text`] output; the model kind is inferred
    /// from the capacity keys (arc keys mean directed).
    pub fn parse(text: &str, network: &Network, default_kind: ModelKind) -> Result<Self> {
        let body = text.trim().strip_prefix("cut:").unwrap_or(text).trim();
        let (lhs, sense, rhs) = split_relation(body)?;
        if sense != crate::formulate::Sense::Ge {
            return Err(Error::Parse("cuts are written as `... >= rhs`".into()));
        }
        let coefficients = parse_terms(network, lhs)?;
        let kind = if coefficients.keys().any(|v| matches!(v, VarRef::CapArc { .. })) {
            ModelKind::Directed
        } else if coefficients.keys().any(|v| matches!(v, VarRef::CapEdge { .. }))
            && default_kind == ModelKind::Directed
        {
            ModelKind::Bidirected
        } else {
            default_kind
        };
        Ok(LinearInequality { kind, coefficients, rhs })
    }
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} >= {}", self.coefficients, self.rhs)
    }
}

fn x_terms(
    commodities: &BTreeSet<usize>,
    arcs: impl IntoIterator<Item = usize>,
    sign: Rational,
) -> Vec<(VarRef, Rational)> {
    let arcs: Vec<usize> = arcs.into_iter().collect();
    commodities
        .iter()
        .flat_map(|&k| arcs.iter().map(move |&a| VarRef::Flow { commodity: k, arc: a }))
        .map(|v| (v, sign.clone()))
        .collect()
}

fn collect(kind: ModelKind, terms: Vec<(VarRef, Rational)>, rhs: Rational) -> LinearInequality {
    let mut coefficients: BTreeMap<VarRef, Rational> = BTreeMap::new();
    for (v, c) in terms {
        *coefficients.entry(v).or_default() += c;
    }
    coefficients.retain(|_, c| !c.is_zero());
    LinearInequality { kind, coefficients, rhs }
}

/// Multi-commodity multi-facility cut-set inequality over directed-model
/// variables. Fails with [`Error::VacuousCut`] when `r = 0`.
pub fn cutset_inequality(inst: &Instance, spec: &CutsetSpec) -> Result<LinearInequality> {
    let mir = mir_data(inst, spec)?;
    if mir.r.is_zero() {
        return Err(Error::VacuousCut);
    }
    let spec = &mir.spec;
    let net = &inst.network;
    let c_s = inst.facilities.capacity(spec.facility);
    let mut terms = Vec::new();
    for (m, &c) in inst.facilities.capacities().iter().enumerate() {
        let plus = phi_plus(c, c_s, &mir.r)?;
        let minus = phi_minus(c, c_s, &mir.r)?;
        terms.extend(spec.s_plus.iter().map(|&a| (VarRef::CapArc { facility: m, arc: a }, plus.clone())));
        terms.extend(spec.s_minus.iter().map(|&a| (VarRef::CapArc { facility: m, arc: a }, minus.clone())));
    }
    let outside: Vec<usize> = spec.a_plus(net).into_iter().filter(|a| !spec.s_plus.contains(a)).collect();
    terms.extend(x_terms(&spec.commodities, outside, Rational::one()));
    terms.extend(x_terms(&spec.commodities, spec.s_minus.iter().copied(), -Rational::one()));
    let arc_caps = inst.existing.arc_values(net);
    let rhs = &mir.r * &mir.eta - existing_on(&arc_caps, &spec.s_minus);
    Ok(collect(ModelKind::Directed, terms, rhs))
}

/// The unit-capacity single-facility form
/// `r y(S⁺) + x_Q(A⁺ \ S⁺) + (1 − r) y(S⁻) − x_Q(S⁻) ≥ r η − c̄(S⁻)`
/// with `r = b' − ⌊b'⌋` and `η = ⌈b'⌉`.
pub fn single_facility_cutset(inst: &Instance, spec: &CutsetSpec) -> Result<LinearInequality> {
    if inst.facilities.capacities() != [1] {
        return Err(Error::InvalidCutset("single-facility cut-sets need the facility menu {1}".into()));
    }
    spec.validate(&inst.network, 1)?;
    let mut spec = spec.clone();
    let mut b = net_demand(inst, &spec);
    if b.is_negative() {
        spec = spec.swapped(&inst.network);
        b = -b;
    }
    let net = &inst.network;
    let arc_caps = inst.existing.arc_values(net);
    let b_prime = b - existing_on(&arc_caps, &spec.s_plus) + existing_on(&arc_caps, &spec.s_minus);
    let r = b_prime.fract();
    if r.is_zero() {
        return Err(Error::VacuousCut);
    }
    let eta = b_prime.ceil();
    let mut terms: Vec<(VarRef, Rational)> = Vec::new();
    terms.extend(spec.s_plus.iter().map(|&a| (VarRef::CapArc { facility: 0, arc: a }, r.clone())));
    terms.extend(spec.s_minus.iter().map(|&a| (VarRef::CapArc { facility: 0, arc: a }, Rational::one() - &r)));
    let outside: Vec<usize> = spec.a_plus(net).into_iter().filter(|a| !spec.s_plus.contains(a)).collect();
    terms.extend(x_terms(&spec.commodities, outside, Rational::one()));
    terms.extend(x_terms(&spec.commodities, spec.s_minus.iter().copied(), -Rational::one()));
    let rhs = &r * &eta - existing_on(&arc_caps, &spec.s_minus);
    Ok(collect(ModelKind::Directed, terms, rhs))
}

/// `πx + β¹y¹ + β²y² ≥ π₀` over directed variables becomes
/// `πx + (β¹ + β²) y ≥ π₀` over bidirected ones.
pub fn translate_to_bidirected(ineq: &LinearInequality, network: &Network) -> Result<LinearInequality> {
    if ineq.kind != ModelKind::Directed || ineq.coefficients.keys().any(|v| matches!(v, VarRef::CapEdge { .. })) {
        return Err(Error::WrongModelKind { expected: ModelKind::Directed, found: ineq.kind });
    }
    let terms = ineq
        .coefficients
        .iter()
        .map(|(v, c)| match *v {
            VarRef::CapArc { facility, arc } => {
                (VarRef::CapEdge { facility, edge: network.edge_of_arc(arc) }, c.clone())
            }
            other => (other, c.clone()),
        })
        .collect();
    Ok(collect(ModelKind::Bidirected, terms, ineq.rhs.clone()))
}

/// `y¹ = y² = y`: copies edge capacities onto both arcs.
pub fn edge_to_arc_capacity(network: &Network, y: &CapacityVector) -> CapacityVector {
    let mut out = CapacityVector::new();
    for (v, n) in y.entries() {
        if let VarRef::CapEdge { facility, edge } = *v {
            let (fwd, bwd) = network.arcs_of_edge(edge);
            out.set(VarRef::CapArc { facility, arc: fwd }, *n);
            out.set(VarRef::CapArc { facility, arc: bwd }, *n);
        }
    }
    out
}

/// Outcome of checking an inequality against every integer capacity vector
/// of a bounded box.
#[derive(Debug, Clone, Default)]
pub struct ValidityReport {
    /// Capacity vectors in the box that accommodate the traffic.
    pub feasible_points: usize,
    pub box_points: usize,
    /// Capacity vectors where some routing violates the inequality, with the
    /// minimum left-hand side found.
    pub violations: Vec<(CapacityVector, Rational)>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Minimum of the inequality's left-hand side over flows feasible at `y`.
pub fn min_lhs(model: &MipModel, ineq: &LinearInequality, y: &CapacityVector) -> Result<Option<Rational>> {
    let flow_model = model.clone().with_objective(ineq.flow_part())?;
    Ok(min_flow_cost(&flow_model, y)?.map(|(v, _)| v + ineq.capacity_part(y)))
}

/// Exhaustive validity check: for every `y` in `[0, bound]^n` over the model's
/// capacity variables that accommodates the traffic, minimises the inequality
/// over the flows and compares with the right-hand side.
pub fn check_validity(model: &MipModel, ineq: &LinearInequality, bound: u64, limit: u64) -> Result<ValidityReport> {
    if ineq.kind != model.kind() {
        return Err(Error::WrongModelKind { expected: model.kind(), found: ineq.kind });
    }
    let vars: Vec<VarRef> = model.capacity_vars().collect();
    if let Some(v) = ineq.coefficients.keys().find(|v| model.column(v).is_none()) {
        return Err(Error::Precondition(format!("inequality references {v:?}, absent from the model")));
    }
    crate::projlab::check_box_size(vars.len(), bound, limit)?;
    let flow_model = model.clone().with_objective(ineq.flow_part())?;
    let points: Vec<CapacityVector> = crate::projlab::box_points(vars.len(), bound)
        .map(|p| CapacityVector::from_pairs(vars.iter().copied().zip(p)))
        .collect();
    let evaluate = |y: &CapacityVector| -> Result<Option<Rational>> {
        Ok(min_flow_cost(&flow_model, y)?.map(|(v, _)| v + ineq.capacity_part(y)))
    };
    let results: Vec<Result<Option<Rational>>> = crate::projlab::par_map(&points, evaluate);
    let mut report = ValidityReport { box_points: points.len(), ..Default::default() };
    for (y, res) in points.into_iter().zip(results) {
        if let Some(lhs) = res? {
            report.feasible_points += 1;
            if lhs < ineq.rhs {
                report.violations.push((y, lhs));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulate::build_directed;
    use crate::instance::{ExistingCapacity, FacilityMenu, TrafficMatrix};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn two_node(t12: Rational, caps: Vec<i64>) -> Instance {
        let net = Network::complete(&["1", "2"]).unwrap();
        let t = TrafficMatrix::for_network(&net).with("1", "2", t12).unwrap();
        Instance::bare(net, FacilityMenu::new(caps).unwrap(), t).unwrap()
    }

    fn spec(u: &[usize], ks: &[usize], sp: &[usize], sm: &[usize], s: usize) -> CutsetSpec {
        CutsetSpec {
            side_u: u.iter().copied().collect(),
            commodities: ks.iter().copied().collect(),
            s_plus: sp.iter().copied().collect(),
            s_minus: sm.iter().copied().collect(),
            facility: s,
        }
    }

    #[test]
    fn mir_data_examples() {
        let inst = two_node(q(3, 2), vec![1]);
        let a12 = inst.network.arc_index(0, 1).unwrap();
        let k12 = inst.network.commodity_index((0, 1));
        let d = mir_data(&inst, &spec(&[0], &[k12], &[a12], &[], 0)).unwrap();
        assert_eq!((d.b_q, d.b_prime, d.r, d.eta), (q(3, 2), q(3, 2), q(1, 2), q(2, 1)));

        let mut with_cap = inst.clone();
        with_cap.existing = ExistingCapacity::Arcs(vec![q(1, 1), q(0, 1)]);
        let d = mir_data(&with_cap, &spec(&[0], &[k12], &[a12], &[], 0)).unwrap();
        assert_eq!((d.b_prime, d.r, d.eta), (q(1, 2), q(1, 2), q(1, 1)));

        let whole = two_node(q(2, 1), vec![1]);
        let d = mir_data(&whole, &spec(&[0], &[k12], &[a12], &[], 0)).unwrap();
        assert!(d.r.is_zero());
        assert!(mir_data(&inst, &spec(&[0], &[], &[a12], &[], 0)).is_err());
    }

    #[test]
    fn mir_data_flips_negative_demand() {
        let inst = two_node(q(3, 2), vec![1]);
        let a12 = inst.network.arc_index(0, 1).unwrap();
        let k12 = inst.network.commodity_index((0, 1));
        // Seen from V = {1}, the demand is negative; S- = {1>2} turns into S+.
        let d = mir_data(&inst, &spec(&[1], &[k12], &[], &[a12], 0)).unwrap();
        assert!(d.flipped);
        assert_eq!(d.b_q, q(3, 2));
        assert_eq!(d.spec.side_u, [0].into_iter().collect());
        assert_eq!(d.spec.s_plus, [a12].into_iter().collect());
    }

    #[test]
    fn phi_examples() {
        let r = q(1, 1);
        assert_eq!(phi_plus(3, 3, &r).unwrap(), q(1, 1));
        assert_eq!(phi_plus(2, 3, &r).unwrap(), q(1, 1));
        assert_eq!(phi_plus(4, 3, &r).unwrap(), q(2, 1));
        assert_eq!(phi_minus(1, 3, &r).unwrap(), q(1, 1));
        assert_eq!(phi_minus(2, 3, &r).unwrap(), q(2, 1));
        assert_eq!(phi_minus(0, 3, &r).unwrap(), q(0, 1));
        assert!(phi_plus(-1, 3, &r).is_err());
        assert!(phi_plus(1, 3, &q(3, 1)).is_err());
        assert!(phi_minus(1, 0, &q(0, 1)).is_err());
    }

    #[test]
    fn two_node_capacity_cut() {
        let inst = two_node(q(3, 2), vec![1]);
        let net = &inst.network;
        let a12 = net.arc_index(0, 1).unwrap();
        let k12 = net.commodity_index((0, 1));
        let s = spec(&[0], &[k12], &[a12], &[], 0);
        let cut = cutset_inequality(&inst, &s).unwrap();
        let expected: BTreeMap<VarRef, Rational> =
            [(VarRef::CapArc { facility: 0, arc: a12 }, q(1, 2))].into_iter().collect();
        assert_eq!(cut.coefficients, expected);
        assert_eq!(cut.rhs, q(1, 1));
        assert_eq!(single_facility_cutset(&inst, &s).unwrap(), cut);
        assert_eq!(cut.to_text(net), "cut: + 1/2 y(1|1>2) >= 1");
        assert_eq!(LinearInequality::parse(&cut.to_text(net), net, ModelKind::Directed).unwrap(), cut);
    }

    #[test]
    fn two_node_flow_cut_is_valid() {
        let inst = two_node(q(3, 2), vec![1]);
        let net = &inst.network;
        let k12 = net.commodity_index((0, 1));
        let cut = cutset_inequality(&inst, &spec(&[0], &[k12], &[], &[], 0)).unwrap();
        let x12 = VarRef::Flow { commodity: k12, arc: net.arc_index(0, 1).unwrap() };
        assert_eq!(cut.coefficients, [(x12, q(1, 1))].into_iter().collect());
        assert_eq!(cut.rhs, q(1, 1));
        let report = check_validity(&build_directed(&inst).unwrap(), &cut, 3, 1 << 20).unwrap();
        assert!(report.is_valid());
        assert_eq!(report.box_points, 16);
        // y(1>2) must be at least 2 to carry 3/2 units.
        assert_eq!(report.feasible_points, 8);
    }

    #[test]
    fn vacuous_cuts_are_typed() {
        let inst = two_node(q(2, 1), vec![1]);
        let a12 = inst.network.arc_index(0, 1).unwrap();
        let s = spec(&[0], &[0], &[a12], &[], 0);
        assert!(matches!(cutset_inequality(&inst, &s), Err(Error::VacuousCut)));
        assert!(matches!(single_facility_cutset(&inst, &s), Err(Error::VacuousCut)));
    }

    #[test]
    fn single_facility_needs_unit_menu() {
        let inst = two_node(q(3, 2), vec![2]);
        assert!(single_facility_cutset(&inst, &spec(&[0], &[0], &[], &[], 0)).is_err());
    }

    #[test]
    fn triangle_single_facility_coefficients() {
        // b' = 5/2 with S- nonempty: r = 1/2, 1 - r = 1/2, rhs = 3/2.
        let net = Network::complete(&["1", "2", "3"]).unwrap();
        let t = TrafficMatrix::for_network(&net).with("1", "2", q(3, 2)).unwrap().with("1", "3", q(1, 1)).unwrap();
        let inst = Instance::bare(net.clone(), FacilityMenu::single(1).unwrap(), t).unwrap();
        let ks = [net.commodity_index((0, 1)), net.commodity_index((0, 2))];
        let s = spec(&[0], &ks, &[net.arc_index(0, 1).unwrap()], &[net.arc_index(2, 0).unwrap()], 0);
        let cut = single_facility_cutset(&inst, &s).unwrap();
        assert_eq!(cut.rhs, q(3, 2));
        assert_eq!(cut.coefficients[&VarRef::CapArc { facility: 0, arc: net.arc_index(0, 1).unwrap() }], q(1, 2));
        assert_eq!(cut.coefficients[&VarRef::CapArc { facility: 0, arc: net.arc_index(2, 0).unwrap() }], q(1, 2));
        assert_eq!(cutset_inequality(&inst, &s).unwrap(), cut);
    }

    #[test]
    fn existing_capacity_on_s_minus_moves_to_rhs() {
        // Zero traffic, c̄ = 1/2 on 2>1 in S-: the unadjusted right-hand side
        // r·η = 1/2 would cut off the all-zero point.
        let mut inst = two_node(q(0, 1), vec![1]);
        inst.existing = ExistingCapacity::Arcs(vec![q(0, 1), q(1, 2)]);
        let net = inst.network.clone();
        let a21 = net.arc_index(1, 0).unwrap();
        let k12 = net.commodity_index((0, 1));
        let cut = cutset_inequality(&inst, &spec(&[0], &[k12], &[], &[a21], 0)).unwrap();
        assert_eq!(cut.rhs, q(0, 1));
        let model = build_directed(&inst).unwrap();
        assert!(check_validity(&model, &cut, 2, 1 << 20).unwrap().is_valid());
        let unadjusted = LinearInequality { rhs: q(1, 2), ..cut };
        assert!(!check_validity(&model, &unadjusted, 2, 1 << 20).unwrap().is_valid());
    }

    #[test]
    fn translation_adds_arc_coefficients() {
        let net = Network::complete(&["1", "2"]).unwrap();
        let (a12, a21) = (net.arc_index(0, 1).unwrap(), net.arc_index(1, 0).unwrap());
        let directed = LinearInequality {
            kind: ModelKind::Directed,
            coefficients: [
                (VarRef::CapArc { facility: 0, arc: a12 }, q(1, 2)),
                (VarRef::CapArc { facility: 0, arc: a21 }, q(1, 2)),
            ]
            .into_iter()
            .collect(),
            rhs: q(1, 1),
        };
        let bi = translate_to_bidirected(&directed, &net).unwrap();
        assert_eq!(bi.coefficients, [(VarRef::CapEdge { facility: 0, edge: 0 }, q(1, 1))].into_iter().collect());
        assert_eq!(bi.rhs, q(1, 1));
        assert!(translate_to_bidirected(&bi, &net).is_err());

        let one_sided = LinearInequality {
            coefficients: [(VarRef::CapArc { facility: 0, arc: a12 }, q(1, 2))].into_iter().collect(),
            ..directed
        };
        let bi = translate_to_bidirected(&one_sided, &net).unwrap();
        assert_eq!(bi.coefficients[&VarRef::CapEdge { facility: 0, edge: 0 }], q(1, 2));
    }

    #[test]
    fn spec_validation() {
        let inst = two_node(q(1, 1), vec![1]);
        let net = &inst.network;
        let a21 = net.arc_index(1, 0).unwrap();
        assert!(spec(&[0], &[0], &[a21], &[], 0).validate(net, 1).is_err());
        assert!(spec(&[0, 1], &[0], &[], &[], 0).validate(net, 1).is_err());
        assert!(spec(&[0], &[0], &[], &[], 1).validate(net, 1).is_err());
    }

    proptest::proptest! {
        #[test]
        fn phi_is_subadditive_and_monotone(c_s in 1i64..6, num in 1i64..24, a in 0i64..20, b in 0i64..20) {
            let r = Rational::new(num % (4 * c_s), 4);
            for phi in [phi_plus, phi_minus] {
                let f = |c: i64| phi(c, c_s, &r).unwrap();
                proptest::prop_assert!(f(a + b) <= f(a) + f(b));
                proptest::prop_assert!(f(a) <= f(a + 1));
                proptest::prop_assert!(f(a) <= Rational::from_integer(a));
            }
        }
    }
}
