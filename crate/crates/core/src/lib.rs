//! Exact undirected, bidirected and directed capacity models for
//! multicommodity network design.
//!
//! Everything is computed in exact rational arithmetic: model building,
//! LP/MIP solving, the flow transformations that map solutions between the
//! models, mixed-integer-rounding cut-set inequalities, and the enumeration
//! of capacity-space projections.

pub mod cuts;
pub mod error;
pub mod formulate;
pub mod instance;
pub mod io;
pub mod lpfile;
pub mod network;
pub mod point;
pub mod projlab;
pub mod rational;
pub mod solver;
pub mod transform;

pub use error::{Error, Result};
pub use formulate::{LinearConstraint, MipModel, ModelKind, Sense, VarRef};
pub use instance::{ExistingCapacity, FacilityMenu, Instance, TrafficMatrix};
pub use network::Network;
pub use point::{CapacityVector, FlowVector, ModelPoint};
pub use rational::Rational;
