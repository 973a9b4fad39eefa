//! Depth-first branch and bound over the exact simplex.

use std::collections::BTreeMap;

use super::{LoweredModel, LpStatus, MipResult, SolveStatus};
use crate::error::{Error, Result};
use crate::formulate::MipModel;
use crate::point::ModelPoint;
use crate::rational::Rational;

/// Exact integer optimum. Branches on the first fractional integer variable in
/// model order, explores the down branch first, and prunes nodes whose
/// relaxation bound is not strictly better than the incumbent.
pub fn solve_mip(model: &MipModel) -> Result<MipResult> {
    if let Some(v) = model.variables().iter().find(|v| v.integer && v.upper.is_none()) {
        return Err(Error::MissingBound(model.var_name(&v.var)));
    }
    let root = LoweredModel::new(model, &BTreeMap::new());
    let integer_cols: Vec<usize> = root
        .columns
        .iter()
        .enumerate()
        .filter(|(_, v)| model.variables()[model.column(v).expect("declared")].integer)
        .map(|(j, _)| j)
        .collect();

    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut nodes = 0usize;
    let mut saw_unbounded = false;
    // Each node carries its (lower, upper) bound overrides.
    let mut stack: Vec<Vec<(usize, Rational, Option<Rational>)>> = vec![Vec::new()];
    while let Some(overrides) = stack.pop() {
        let mut lp = root.lp.clone();
        for (j, lo, hi) in &overrides {
            lp.lower[*j] = lo.clone();
            lp.upper[*j] = hi.clone();
        }
        nodes += 1;
        let out = lp.solve();
        match out.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                saw_unbounded = true;
                continue;
            }
            LpStatus::Optimal => {}
        }
        if let Some((incumbent, _)) = &best {
            if out.objective >= *incumbent {
                continue;
            }
        }
        match integer_cols.iter().find(|&&j| !out.values[j].is_integer()) {
            None => best = Some((out.objective, out.values)),
            Some(&j) => {
                let value = &out.values[j];
                let (lo, hi) = (lp.lower[j].clone(), lp.upper[j].clone());
                let mut up = overrides.clone();
                up.push((j, value.ceil(), hi));
                let mut down = overrides;
                down.push((j, lo, Some(value.floor())));
                stack.push(up);
                stack.push(down);
            }
        }
    }

    match best {
        Some((objective, values)) => {
            let assignment = root.assignment(&values);
            debug_assert!(model.is_feasible_point(&assignment));
            Ok(MipResult {
                status: SolveStatus::Optimal,
                incumbent: Some(ModelPoint::from_values(&assignment)?),
                objective: Some(objective),
                nodes,
            })
        }
        None => Ok(MipResult {
            status: if saw_unbounded { SolveStatus::Unbounded } else { SolveStatus::Infeasible },
            incumbent: None,
            objective: None,
            nodes,
        }),
    }
}
