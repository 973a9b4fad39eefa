//! Flow vectors, capacity vectors and model points.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formulate::VarRef;
use crate::rational::Rational;

/// Nonnegative flow `x_a^k`, keyed by `(commodity, arc)` indices. Zero entries
/// are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowVector {
    entries: BTreeMap<(usize, usize), Rational>,
}

impl FlowVector {
    pub fn new() -> Self {
        FlowVector::default()
    }

    pub fn get(&self, commodity: usize, arc: usize) -> Rational {
        self.entries.get(&(commodity, arc)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, commodity: usize, arc: usize, value: Rational) -> Result<()> {
        if value.is_negative() {
            return Err(Error::Precondition(format!("negative flow {value}")));
        }
        if value.is_zero() {
            self.entries.remove(&(commodity, arc));
        } else {
            self.entries.insert((commodity, arc), value);
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn scaled(&self, factor: &Rational) -> FlowVector {
        let entries = if factor.is_zero() {
            BTreeMap::new()
        } else {
            self.entries.iter().map(|(k, v)| (*k, v * factor)).collect()
        };
        FlowVector { entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Nonnegative integer capacities keyed by capacity variable. Missing keys are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CapacityVector(BTreeMap<VarRef, u64>);

impl CapacityVector {
    pub fn new() -> Self {
        CapacityVector::default()
    }

    /// Builds from `(var, value)` pairs; zero values are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarRef, u64)>) -> Self {
        CapacityVector(pairs.into_iter().filter(|(_, v)| *v > 0).collect())
    }

    pub fn get(&self, var: &VarRef) -> u64 {
        self.0.get(var).copied().unwrap_or(0)
    }

    pub fn set(&mut self, var: VarRef, value: u64) {
        if value == 0 {
            self.0.remove(&var);
        } else {
            self.0.insert(var, value);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&VarRef, &u64)> {
        self.0.iter()
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &CapacityVector) -> bool {
        self.0.iter().all(|(k, v)| *v <= other.get(k))
    }

    pub fn to_rationals(&self) -> BTreeMap<VarRef, Rational> {
        self.0.iter().map(|(k, v)| (*k, Rational::from(*v))).collect()
    }
}

/// A flow/capacity pair `(x, y)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelPoint {
    pub flow: FlowVector,
    pub capacity: CapacityVector,
}

impl ModelPoint {
    /// Splits solver values into flow and capacity parts. Capacity values must
    /// be nonnegative integers.
    pub fn from_values(values: &BTreeMap<VarRef, Rational>) -> Result<Self> {
        let mut point = ModelPoint::default();
        for (var, value) in values {
            match *var {
                VarRef::Flow { commodity, arc } => point.flow.set(commodity, arc, value.clone())?,
                _ => {
                    let int = value.to_i64().and_then(|v| u64::try_from(v).ok()).ok_or_else(|| {
                        Error::Precondition(format!("capacity value {value} is not a nonnegative integer"))
                    })?;
                    point.capacity.set(*var, int);
                }
            }
        }
        Ok(point)
    }

    pub fn to_values(&self) -> BTreeMap<VarRef, Rational> {
        let mut out: BTreeMap<VarRef, Rational> =
            self.flow.entries().map(|((commodity, arc), v)| (VarRef::Flow { commodity, arc }, v.clone())).collect();
        out.extend(self.capacity.to_rationals());
        out
    }
}
