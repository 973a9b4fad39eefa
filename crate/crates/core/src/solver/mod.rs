//! Exact LP and branch-and-bound MIP solving for [`MipModel`]s.

mod branch;
pub mod simplex;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formulate::{self, MipModel, ModelKind, VarRef};
use crate::instance::Instance;
use crate::point::{CapacityVector, ModelPoint};
use crate::rational::Rational;

pub use branch::solve_mip;
pub use simplex::{LinearProgram, LpOutcome, LpStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl From<LpStatus> for SolveStatus {
    fn from(s: LpStatus) -> Self {
        match s {
            LpStatus::Optimal => SolveStatus::Optimal,
            LpStatus::Infeasible => SolveStatus::Infeasible,
            LpStatus::Unbounded => SolveStatus::Unbounded,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: SolveStatus,
    pub values: BTreeMap<VarRef, Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone)]
pub struct MipResult {
    pub status: SolveStatus,
    pub incumbent: Option<ModelPoint>,
    pub objective: Option<Rational>,
    /// Branch-and-bound nodes whose LP relaxation was solved.
    pub nodes: usize,
}

/// A model lowered to a [`LinearProgram`], with some variables fixed.
pub struct LoweredModel {
    pub lp: LinearProgram,
    /// Model variable of each LP column.
    pub columns: Vec<VarRef>,
    /// For every model variable, its LP column (or `None` when fixed).
    pub column_of: BTreeMap<VarRef, usize>,
    pub fixed: BTreeMap<VarRef, Rational>,
}

impl LoweredModel {
    /// Lowers `model`, substituting the `fixed` values into every row and the objective.
    pub fn new(model: &MipModel, fixed: &BTreeMap<VarRef, Rational>) -> Self {
        let mut columns = Vec::new();
        let mut column_of = BTreeMap::new();
        for v in model.variables() {
            if !fixed.contains_key(&v.var) {
                column_of.insert(v.var, columns.len());
                columns.push(v.var);
            }
        }
        let mut lp = LinearProgram::new(columns.len());
        for (j, var) in columns.iter().enumerate() {
            let decl = &model.variables()[model.column(var).expect("declared")];
            lp.upper[j] = decl.upper.clone();
            lp.cost[j] = model.objective().get(var).cloned().unwrap_or_default();
        }
        lp.offset = fixed.iter().map(|(v, x)| model.objective().get(v).map(|c| c * x).unwrap_or_default()).sum();
        for c in model.constraints() {
            let mut rhs = c.rhs.clone();
            let mut coeffs = Vec::with_capacity(c.coefficients.len());
            for (v, a) in &c.coefficients {
                match fixed.get(v) {
                    Some(x) => rhs -= a * x,
                    None => coeffs.push((column_of[v], a.clone())),
                }
            }
            if coeffs.is_empty() {
                // A row over fixed variables only: keep it as `0 (sense) rhs`
                // so that an unsatisfied one makes the program infeasible.
                if !c.sense.holds(&Rational::zero(), &rhs) {
                    lp.add_row(Vec::new(), c.sense, rhs);
                }
                continue;
            }
            lp.add_row(coeffs, c.sense, rhs);
        }
        LoweredModel { lp, columns, column_of, fixed: fixed.clone() }
    }

    /// Full assignment (fixed values included) from LP column values.
    pub fn assignment(&self, values: &[Rational]) -> BTreeMap<VarRef, Rational> {
        let mut out = self.fixed.clone();
        for (var, x) in self.columns.iter().zip(values) {
            out.insert(*var, x.clone());
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

/// Solves the LP relaxation (`ignore_integrality`) or, otherwise, the MIP
/// via branch and bound.
pub fn solve_lp(model: &MipModel, ignore_integrality: bool) -> Result<LpSolution> {
    if !ignore_integrality {
        let mip = solve_mip(model)?;
        return Ok(LpSolution {
            status: mip.status,
            values: mip.incumbent.map(|p| p.to_values()).unwrap_or_default(),
            objective: mip.objective.unwrap_or_default(),
        });
    }
    let lowered = LoweredModel::new(model, &BTreeMap::new());
    let out = lowered.lp.solve();
    let values = if out.status == LpStatus::Optimal { lowered.assignment(&out.values) } else { BTreeMap::new() };
    if out.status == LpStatus::Optimal {
        debug_assert!(model.violations(&values).iter().all(|v| v.contains("not integral")));
    }
    Ok(LpSolution { status: out.status.into(), values, objective: out.objective })
}

/// Capacity variables of `kind` expected in a capacity vector.
fn check_capacity_keys(model: &MipModel, y: &CapacityVector) -> Result<()> {
    for (var, _) in y.entries() {
        if var.is_flow() || model.column(var).is_none() {
            return Err(Error::Precondition(format!(
                "capacity key {} does not belong to a {} model",
                var.name(model.network()),
                model.kind()
            )));
        }
    }
    Ok(())
}

/// Whether the flow LP of `model` is feasible with capacities fixed at `y`.
pub fn model_accommodates(model: &MipModel, y: &CapacityVector) -> Result<bool> {
    check_capacity_keys(model, y)?;
    let fixed: BTreeMap<VarRef, Rational> = model.capacity_vars().map(|v| (v, Rational::from(y.get(&v)))).collect();
    Ok(LoweredModel::new(model, &fixed).lp.is_feasible())
}

/// Whether capacity vector `y` admits a feasible routing of the instance's traffic.
pub fn accommodates(inst: &Instance, kind: ModelKind, y: &CapacityVector) -> Result<bool> {
    model_accommodates(&formulate::build(inst, kind)?, y)
}

/// Minimum of the model objective over flows with capacities fixed at `y`,
/// or `None` when `y` does not accommodate the traffic.
pub fn min_flow_cost(model: &MipModel, y: &CapacityVector) -> Result<Option<(Rational, BTreeMap<VarRef, Rational>)>> {
    check_capacity_keys(model, y)?;
    let fixed: BTreeMap<VarRef, Rational> = model.capacity_vars().map(|v| (v, Rational::from(y.get(&v)))).collect();
    let lowered = LoweredModel::new(model, &fixed);
    let out = lowered.lp.solve();
    match out.status {
        LpStatus::Optimal => Ok(Some((out.objective.clone(), lowered.assignment(&out.values)))),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Precondition("flow objective is unbounded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulate::{build_bidirected, build_undirected};
    use crate::instance::{FacilityMenu, TrafficMatrix};
    use crate::network::Network;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn two_node(t12: Rational, t21: Rational) -> Instance {
        let net = Network::complete(&["1", "2"]).unwrap();
        let t = TrafficMatrix::for_network(&net).with("1", "2", t12).unwrap().with("2", "1", t21).unwrap();
        Instance::bare(net, FacilityMenu::single(1).unwrap(), t).unwrap()
    }

    fn y_edge(v: u64) -> CapacityVector {
        CapacityVector::from_pairs([(VarRef::CapEdge { facility: 0, edge: 0 }, v)])
    }

    #[test]
    fn undirected_two_node_accommodation() {
        let i = two_node(q(1, 1), q(1, 1));
        assert!(!accommodates(&i, ModelKind::Undirected, &y_edge(1)).unwrap());
        assert!(accommodates(&i, ModelKind::Undirected, &y_edge(2)).unwrap());
        assert!(accommodates(&i, ModelKind::Bidirected, &y_edge(1)).unwrap());
    }

    #[test]
    fn zero_traffic_accommodated_by_zero() {
        let i = two_node(q(0, 1), q(0, 1));
        for kind in [ModelKind::Undirected, ModelKind::Bidirected, ModelKind::Directed] {
            assert!(accommodates(&i, kind, &CapacityVector::new()).unwrap());
        }
    }

    #[test]
    fn key_mismatch_is_an_error() {
        let i = two_node(q(1, 1), q(0, 1));
        let arc_y = CapacityVector::from_pairs([(VarRef::CapArc { facility: 0, arc: 0 }, 1)]);
        assert!(accommodates(&i, ModelKind::Undirected, &arc_y).is_err());
        assert!(accommodates(&i, ModelKind::Directed, &y_edge(1)).is_err());
    }

    #[test]
    fn lp_relaxation_of_triangle() {
        let net = Network::complete(&["1", "2", "3"]).unwrap();
        let t = TrafficMatrix::for_network(&net).with("1", "2", q(1, 1)).unwrap();
        let i = Instance::bare(net, FacilityMenu::single(1).unwrap(), t).unwrap();
        let sol = solve_lp(&build_undirected(&i).unwrap(), true).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.objective, q(1, 1));
    }

    #[test]
    fn mip_two_node_models() {
        let i = two_node(q(1, 1), q(1, 1));
        let u = solve_mip(&build_undirected(&i).unwrap().with_capacity_bound(2)).unwrap();
        assert_eq!(u.objective, Some(q(2, 1)));
        let b = solve_mip(&build_bidirected(&i).unwrap().with_capacity_bound(2)).unwrap();
        assert_eq!(b.objective, Some(q(1, 1)));
        let z = solve_mip(&build_undirected(&two_node(q(0, 1), q(0, 1))).unwrap().with_capacity_bound(0)).unwrap();
        assert_eq!(z.objective, Some(q(0, 1)));
    }

    #[test]
    fn unbounded_integer_variables_rejected() {
        let i = two_node(q(1, 1), q(0, 1));
        assert!(matches!(solve_mip(&build_undirected(&i).unwrap()), Err(Error::MissingBound(_))));
    }
}
