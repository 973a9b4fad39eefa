//! Mixed-integer formulations of the undirected, bidirected and directed
//! capacity models, plus the flow-symmetric and capacity-equalized variants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::network::Network;
use crate::rational::Rational;

/// How installed capacity limits flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    /// Edge capacity bounds the sum of the flows in both directions.
    Undirected,
    /// Edge capacity bounds each direction separately.
    Bidirected,
    /// Capacity is installed per arc.
    Directed,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Undirected => "undirected",
            ModelKind::Bidirected => "bidirected",
            ModelKind::Directed => "directed",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "undirected" | "u" => Ok(ModelKind::Undirected),
            "bidirected" | "b" => Ok(ModelKind::Bidirected),
            "directed" | "d" => Ok(ModelKind::Directed),
            other => Err(Error::Parse(format!("unknown model kind `{other}`"))),
        }
    }
}

/// A model variable. Commodity, arc and edge fields index into the owning
/// [`Network`]'s sorted commodity, arc and edge lists; facilities are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarRef {
    Flow { commodity: usize, arc: usize },
    CapEdge { facility: usize, edge: usize },
    CapArc { facility: usize, arc: usize },
}

impl VarRef {
    pub fn is_flow(&self) -> bool {
        matches!(self, VarRef::Flow { .. })
    }

    pub fn is_capacity(&self) -> bool {
        !self.is_flow()
    }

    /// Canonical name: `x(u>v|i>j)`, `y(m|i-j)` or `y(m|i>j)` with 1-based `m`.
    pub fn name(&self, network: &Network) -> String {
        match *self {
            VarRef::Flow { commodity, arc } => {
                let k = network.commodities()[commodity];
                format!("x({}|{})", network.commodity_label(k), network.arc_label(arc))
            }
            VarRef::CapEdge { facility, edge } => {
                format!("y({}|{})", facility + 1, network.edge_label(edge))
            }
            VarRef::CapArc { facility, arc } => format!("y({}|{})", facility + 1, network.arc_label(arc)),
        }
    }

    pub fn parse(name: &str, network: &Network) -> Result<VarRef> {
        let bad = || Error::Parse(format!("malformed variable name `{name}`"));
        let (prefix, rest) = name.split_once('(').ok_or_else(bad)?;
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        let (first, second) = inner.split_once('|').ok_or_else(bad)?;
        match prefix {
            "x" => {
                let k = network.parse_commodity(first)?;
                if !first.contains('>') {
                    return Err(bad());
                }
                Ok(VarRef::Flow { commodity: network.commodity_index(k), arc: network.parse_arc(second)? })
            }
            "y" => {
                let m: usize = first.parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(bad());
                }
                if second.contains('>') {
                    Ok(VarRef::CapArc { facility: m - 1, arc: network.parse_arc(second)? })
                } else {
                    Ok(VarRef::CapEdge { facility: m - 1, edge: network.parse_edge(second)? })
                }
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

impl Sense {
    pub fn holds(&self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Eq => lhs == rhs,
            Sense::Ge => lhs >= rhs,
        }
    }
}

/// `Σ coefficients · vars (sense) rhs`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub label: String,
    pub coefficients: BTreeMap<VarRef, Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl LinearConstraint {
    /// Returns `None` when every coefficient is zero.
    pub fn new(
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (VarRef, Rational)>,
        sense: Sense,
        rhs: Rational,
    ) -> Option<Self> {
        let mut coefficients: BTreeMap<VarRef, Rational> = BTreeMap::new();
        for (v, c) in terms {
            *coefficients.entry(v).or_default() += c;
        }
        coefficients.retain(|_, c| !c.is_zero());
        if coefficients.is_empty() {
            return None;
        }
        Some(LinearConstraint { label: label.into(), coefficients, sense, rhs })
    }

    pub fn lhs(&self, values: &dyn Fn(&VarRef) -> Rational) -> Rational {
        self.coefficients.iter().map(|(v, c)| c * &values(v)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub var: VarRef,
    pub integer: bool,
    /// Every variable has lower bound 0.
    pub upper: Option<Rational>,
}

/// Linear cost over model variables.
pub type CostVector = BTreeMap<VarRef, Rational>;

/// A minimisation MILP over one of the three capacity models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MipModel {
    kind: ModelKind,
    network: Network,
    facilities: Vec<i64>,
    variables: Vec<Variable>,
    index: HashMap<VarRef, usize>,
    constraints: Vec<LinearConstraint>,
    objective: CostVector,
    symmetric_flows: bool,
    equalized: bool,
}

impl MipModel {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn facilities(&self) -> &[i64] {
        &self.facilities
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &CostVector {
        &self.objective
    }

    pub fn has_flow_symmetry(&self) -> bool {
        self.symmetric_flows
    }

    pub fn is_equalized(&self) -> bool {
        self.equalized
    }

    pub fn column(&self, var: &VarRef) -> Option<usize> {
        self.index.get(var).copied()
    }

    pub fn var_name(&self, var: &VarRef) -> String {
        var.name(&self.network)
    }

    pub fn capacity_vars(&self) -> impl Iterator<Item = VarRef> + '_ {
        self.variables.iter().map(|v| v.var).filter(|v| v.is_capacity())
    }

    pub fn flow_vars(&self) -> impl Iterator<Item = VarRef> + '_ {
        self.variables.iter().map(|v| v.var).filter(|v| v.is_flow())
    }

    /// Replaces the objective; every referenced variable must exist.
    pub fn set_objective(&mut self, cost: CostVector) -> Result<()> {
        if let Some(v) = cost.keys().find(|v| !self.index.contains_key(v)) {
            return Err(Error::Precondition(format!("objective references unknown variable {v:?}")));
        }
        self.objective = cost.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(())
    }

    pub fn with_objective(mut self, cost: CostVector) -> Result<Self> {
        self.set_objective(cost)?;
        Ok(self)
    }

    /// Sets the same upper bound on every integer variable.
    pub fn with_capacity_bound(mut self, bound: u64) -> Self {
        for v in self.variables.iter_mut().filter(|v| v.integer) {
            v.upper = Some(Rational::from(bound));
        }
        self
    }

    pub fn set_upper(&mut self, var: &VarRef, upper: Option<Rational>) -> Result<()> {
        let col = self.column(var).ok_or_else(|| Error::Precondition(format!("unknown variable {var:?}")))?;
        self.variables[col].upper = upper;
        Ok(())
    }

    /// Cost of a point given by a value lookup.
    pub fn objective_value(&self, values: &dyn Fn(&VarRef) -> Rational) -> Rational {
        self.objective.iter().map(|(v, c)| c * &values(v)).sum()
    }

    /// Labels of the constraints, bounds and integrality marks violated by `values`
    /// (missing variables read as zero).
    pub fn violations(&self, values: &BTreeMap<VarRef, Rational>) -> Vec<String> {
        let lookup = |v: &VarRef| values.get(v).cloned().unwrap_or_default();
        let mut out = Vec::new();
        if let Some(v) = values.keys().find(|v| !self.index.contains_key(v)) {
            out.push(format!("unknown variable {}", v.name(&self.network)));
        }
        for var in &self.variables {
            let x = lookup(&var.var);
            if x.is_negative() {
                out.push(format!("{} < 0", self.var_name(&var.var)));
            }
            if var.integer && !x.is_integer() {
                out.push(format!("{} not integral", self.var_name(&var.var)));
            }
            if let Some(u) = &var.upper {
                if &x > u {
                    out.push(format!("{} > {u}", self.var_name(&var.var)));
                }
            }
        }
        for c in &self.constraints {
            if !c.sense.holds(&c.lhs(&lookup), &c.rhs) {
                out.push(c.label.clone());
            }
        }
        out
    }

    pub fn is_feasible_point(&self, values: &BTreeMap<VarRef, Rational>) -> bool {
        self.violations(values).is_empty()
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        kind: ModelKind,
        network: Network,
        facilities: Vec<i64>,
        variables: Vec<Variable>,
        constraints: Vec<LinearConstraint>,
        objective: CostVector,
        symmetric_flows: bool,
        equalized: bool,
    ) -> Result<Self> {
        let index: HashMap<VarRef, usize> = variables.iter().enumerate().map(|(i, v)| (v.var, i)).collect();
        if index.len() != variables.len() {
            return Err(Error::Parse("duplicate variable".into()));
        }
        for c in &constraints {
            if let Some(v) = c.coefficients.keys().find(|v| !index.contains_key(v)) {
                return Err(Error::Parse(format!("constraint {} references undeclared {v:?}", c.label)));
            }
        }
        Ok(MipModel { kind, network, facilities, variables, index, constraints, objective, symmetric_flows, equalized })
    }
}

fn flow_skeleton(inst: &Instance, kind: ModelKind) -> Result<(Vec<Variable>, Vec<LinearConstraint>)> {
    let net = &inst.network;
    let commodities = net.commodities();
    let mut variables = Vec::new();
    for k in 0..commodities.len() {
        for a in 0..net.arcs().len() {
            variables.push(Variable { var: VarRef::Flow { commodity: k, arc: a }, integer: false, upper: None });
        }
    }
    let cap_count = match kind {
        ModelKind::Directed => net.arcs().len(),
        _ => net.edges().len(),
    };
    for m in 0..inst.facilities.len() {
        for i in 0..cap_count {
            let var = match kind {
                ModelKind::Directed => VarRef::CapArc { facility: m, arc: i },
                _ => VarRef::CapEdge { facility: m, edge: i },
            };
            variables.push(Variable { var, integer: true, upper: None });
        }
    }

    // Net inflow of commodity k at node i equals d_i^k.
    let demand = inst.demand();
    let mut constraints = Vec::new();
    for (k, &(o, d)) in commodities.iter().enumerate() {
        for i in 0..net.node_count() {
            let rhs = demand.get(k, i).clone();
            let inflow = net.in_arcs(i).map(|a| (VarRef::Flow { commodity: k, arc: a }, Rational::one()));
            let outflow = net.out_arcs(i).map(|a| (VarRef::Flow { commodity: k, arc: a }, -Rational::one()));
            let label = format!("bal({}@{})", net.commodity_label((o, d)), net.name(i));
            match LinearConstraint::new(label, inflow.chain(outflow), Sense::Eq, rhs.clone()) {
                Some(row) => constraints.push(row),
                None if rhs.is_zero() => {}
                None => return Err(Error::Disconnected(net.name(o).into(), net.name(d).into())),
            }
        }
    }
    Ok((variables, constraints))
}

fn all_commodities_on(net: &Network, arc: usize) -> impl Iterator<Item = (VarRef, Rational)> {
    (0..net.commodity_count()).map(move |k| (VarRef::Flow { commodity: k, arc }, Rational::one()))
}

fn installed_on<'a>(
    facilities: &'a [i64],
    var: impl Fn(usize) -> VarRef + 'a,
) -> impl Iterator<Item = (VarRef, Rational)> + 'a {
    facilities.iter().enumerate().map(move |(m, &c)| (var(m), Rational::from_integer(-c)))
}

fn default_objective(inst: &Instance, variables: &[Variable]) -> CostVector {
    variables
        .iter()
        .filter_map(|v| match v.var {
            VarRef::CapEdge { facility, .. } | VarRef::CapArc { facility, .. } => {
                Some((v.var, Rational::from_integer(inst.facilities.capacity(facility))))
            }
            VarRef::Flow { .. } => None,
        })
        .collect()
}

fn assemble(
    inst: &Instance,
    kind: ModelKind,
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
) -> Result<MipModel> {
    let objective = default_objective(inst, &variables);
    MipModel::from_parts(
        kind,
        inst.network.clone(),
        inst.facilities.capacities().to_vec(),
        variables,
        constraints,
        objective,
        false,
        false,
    )
}

/// `U(T)`: per edge, flow in both directions shares the installed capacity.
pub fn build_undirected(inst: &Instance) -> Result<MipModel> {
    let existing = inst.existing.edge_values()?;
    let (variables, mut constraints) = flow_skeleton(inst, ModelKind::Undirected)?;
    let net = &inst.network;
    let caps = inst.facilities.capacities();
    for (e, _) in net.edges().iter().enumerate() {
        let (fwd, bwd) = net.arcs_of_edge(e);
        let terms = all_commodities_on(net, fwd)
            .chain(all_commodities_on(net, bwd))
            .chain(installed_on(caps, |m| VarRef::CapEdge { facility: m, edge: e }));
        let label = format!("cap({})", net.edge_label(e));
        constraints.extend(LinearConstraint::new(label, terms, Sense::Le, existing[e].clone()));
    }
    assemble(inst, ModelKind::Undirected, variables, constraints)
}

/// `B(T)`: the per-edge max of the two directional loads is capacitated,
/// written as one row per direction.
pub fn build_bidirected(inst: &Instance) -> Result<MipModel> {
    let existing = inst.existing.edge_values()?;
    let (variables, mut constraints) = flow_skeleton(inst, ModelKind::Bidirected)?;
    let net = &inst.network;
    let caps = inst.facilities.capacities();
    for (e, _) in net.edges().iter().enumerate() {
        let (fwd, bwd) = net.arcs_of_edge(e);
        for arc in [fwd, bwd] {
            let terms =
                all_commodities_on(net, arc).chain(installed_on(caps, |m| VarRef::CapEdge { facility: m, edge: e }));
            let label = format!("cap({})", net.arc_label(arc));
            constraints.extend(LinearConstraint::new(label, terms, Sense::Le, existing[e].clone()));
        }
    }
    assemble(inst, ModelKind::Bidirected, variables, constraints)
}

/// `D(T)`: capacity per arc. Edge-keyed existing capacity applies to both arcs.
pub fn build_directed(inst: &Instance) -> Result<MipModel> {
    let existing = inst.existing.arc_values(&inst.network);
    let (variables, mut constraints) = flow_skeleton(inst, ModelKind::Directed)?;
    let net = &inst.network;
    let caps = inst.facilities.capacities();
    for arc in 0..net.arcs().len() {
        let terms = all_commodities_on(net, arc).chain(installed_on(caps, |m| VarRef::CapArc { facility: m, arc }));
        let label = format!("cap({})", net.arc_label(arc));
        constraints.extend(LinearConstraint::new(label, terms, Sense::Le, existing[arc].clone()));
    }
    assemble(inst, ModelKind::Directed, variables, constraints)
}

pub fn build(inst: &Instance, kind: ModelKind) -> Result<MipModel> {
    match kind {
        ModelKind::Undirected => build_undirected(inst),
        ModelKind::Bidirected => build_bidirected(inst),
        ModelKind::Directed => build_directed(inst),
    }
}

/// The reverse of commodity index `k` (`(u,v)` to `(v,u)`).
pub fn reverse_commodity(net: &Network, k: usize) -> usize {
    let (u, v) = net.commodities()[k];
    net.commodity_index((v, u))
}

/// Appends `x_ij^uv = x_ji^vu` for every arc and commodity, each pair once.
/// Applying it to a model that already has the rows is a no-op.
pub fn add_flow_symmetry(model: &MipModel) -> MipModel {
    let mut out = model.clone();
    if model.symmetric_flows {
        return out;
    }
    let net = &model.network;
    for k in 0..net.commodity_count() {
        let rk = reverse_commodity(net, k);
        for a in 0..net.arcs().len() {
            let ra = net.reverse_arc(a);
            if (k, a) > (rk, ra) {
                continue;
            }
            let this = VarRef::Flow { commodity: k, arc: a };
            let mirror = VarRef::Flow { commodity: rk, arc: ra };
            let label = format!("sym({}|{})", net.commodity_label(net.commodities()[k]), net.arc_label(a));
            out.constraints.extend(LinearConstraint::new(
                label,
                [(this, Rational::one()), (mirror, -Rational::one())],
                Sense::Eq,
                Rational::zero(),
            ));
        }
    }
    out.symmetric_flows = true;
    out
}

/// `D^=(T)`: appends `y_{m,ij} = y_{m,ji}` for every edge and facility.
pub fn equalize_directed(model: &MipModel) -> Result<MipModel> {
    if model.kind != ModelKind::Directed {
        return Err(Error::WrongModelKind { expected: ModelKind::Directed, found: model.kind });
    }
    let mut out = model.clone();
    if model.equalized {
        return Ok(out);
    }
    let net = &model.network;
    for m in 0..model.facilities.len() {
        for e in 0..net.edges().len() {
            let (fwd, bwd) = net.arcs_of_edge(e);
            let label = format!("eq({}|{})", m + 1, net.edge_label(e));
            out.constraints.extend(LinearConstraint::new(
                label,
                [
                    (VarRef::CapArc { facility: m, arc: fwd }, Rational::one()),
                    (VarRef::CapArc { facility: m, arc: bwd }, -Rational::one()),
                ],
                Sense::Eq,
                Rational::zero(),
            ));
        }
    }
    out.equalized = true;
    Ok(out)
}

/// True iff, for every edge `{i,j}` and commodity pair `{uv, vu}`, the four
/// flow coefficients `a_ij^uv, a_ji^uv, a_ij^vu, a_ji^vu` agree.
pub fn is_arc_symmetric(cost: &CostVector, network: &Network) -> bool {
    let coef = |k: usize, a: usize| cost.get(&VarRef::Flow { commodity: k, arc: a }).cloned().unwrap_or_default();
    for k in 0..network.commodity_count() {
        let rk = reverse_commodity(network, k);
        for e in 0..network.edges().len() {
            let (fwd, bwd) = network.arcs_of_edge(e);
            let first = coef(k, fwd);
            if [coef(k, bwd), coef(rk, fwd), coef(rk, bwd)].iter().any(|c| *c != first) {
                return false;
            }
        }
    }
    true
}

/// A linear arc-symmetric cost: `per_edge_flow[e]` on all four flow entries of
/// every commodity pair on edge `e`, plus the given capacity costs.
pub fn arc_symmetric_cost(
    network: &Network,
    per_edge_flow: &[Rational],
    capacity: impl IntoIterator<Item = (VarRef, Rational)>,
) -> CostVector {
    let mut cost: CostVector = capacity.into_iter().collect();
    for k in 0..network.commodity_count() {
        for a in 0..network.arcs().len() {
            let c = &per_edge_flow[network.edge_of_arc(a)];
            if !c.is_zero() {
                cost.insert(VarRef::Flow { commodity: k, arc: a }, c.clone());
            }
        }
    }
    cost
}
